//! Subordinator paths, their inverses, first passage and composition.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::sampler::{ln_standard_stable, CutoffSampler, IncrementSampler, SamplerMode};
use crate::error::{Error, Result};
use crate::symbols::{BernsteinSymbol, SymbolKind};

/// A nondecreasing path on a time grid, right-continuous, starting at 0.
#[derive(Debug, Clone, Default)]
pub struct MonotonePath {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    /// (time, size) of every jump above the cutoff; empty for exact increments.
    pub jumps: Vec<(f64, f64)>,
}

impl MonotonePath {
    /// The path at rest at 0.
    pub fn origin() -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![0.0],
            jumps: Vec::new(),
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap_or(&0.0)
    }

    pub(crate) fn push(&mut self, t: f64, v: f64) {
        self.breakpoints.push(t);
        self.values.push(v);
    }

    /// Value at the last breakpoint ≤ t.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        self.values[i.saturating_sub(1)]
    }

    /// CSV with columns t,value.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value"])?;
        for (t, v) in self.breakpoints.iter().zip(&self.values) {
            out.write_record([t.to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Simulates H on [0, horizon] with grid step `step`.
pub fn sample_subordinator<R: Rng + ?Sized>(
    sym: &BernsteinSymbol,
    horizon: f64,
    step: f64,
    mode: SamplerMode,
    rng: &mut R,
) -> Result<MonotonePath> {
    if !(horizon > 0.0 && step > 0.0) {
        return Err(Error::invalid(format!("horizon and step must be positive, got {horizon}, {step}")));
    }
    let sampler = IncrementSampler::new(sym, mode, horizon)?;
    let n = (horizon / step).ceil() as usize;
    let mut path = MonotonePath::origin();
    let mut h = 0.0;
    let mut sizes = Vec::new();
    for k in 1..=n {
        let t0 = (k - 1) as f64 * step;
        let t1 = (k as f64 * step).min(horizon);
        sizes.clear();
        h += sampler.sample_recording(t1 - t0, rng, Some(&mut sizes));
        for &z in &sizes {
            let at = t0 + (t1 - t0) * rng.random::<f64>();
            path.jumps.push((at, z));
        }
        path.push(t1, h);
    }
    path.jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(path)
}

/// L_t = inf{s : H_s > t}, interpolated linearly inside the crossing step.
pub fn invert_path(path: &MonotonePath, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("level must be nonnegative, got {t}")));
    }
    let k = path.values.partition_point(|&v| v <= t);
    if k >= path.values.len() {
        return Err(Error::HorizonTooShort {
            level: t,
            horizon: path.horizon(),
        });
    }
    let (v0, v1) = (path.values[k - 1], path.values[k]);
    let (s0, s1) = (path.breakpoints[k - 1], path.breakpoints[k]);
    Ok(s0 + (t - v0) / (v1 - v0) * (s1 - s0))
}

/// Clock of H run forward in steps of `ds` until it first exceeds a level.
#[derive(Debug, Clone)]
pub struct PassageClock {
    sampler: IncrementSampler,
    identity: bool,
    ds: f64,
    /// Clock time (the inverse L at the last passage).
    pub s: f64,
    /// H at clock time s.
    pub h: f64,
}

impl PassageClock {
    pub fn new(sym: &BernsteinSymbol, ds: f64, horizon: f64) -> Result<Self> {
        if !(ds > 0.0) {
            return Err(Error::invalid(format!("clock step must be positive, got {ds}")));
        }
        Ok(Self {
            sampler: IncrementSampler::auto(sym, horizon)?,
            identity: sym.is_identity(),
            ds,
            s: 0.0,
            h: 0.0,
        })
    }

    /// Advances until H > level (for the identity, H = s = level exactly).
    /// The clock is resolved to one step `ds`.
    pub fn pass<R: Rng + ?Sized>(&mut self, level: f64, rng: &mut R, record: Option<&mut MonotonePath>) {
        if self.identity {
            if level > self.h {
                self.s = level;
                self.h = level;
                if let Some(p) = record {
                    p.push(self.s, self.h);
                }
            }
            return;
        }
        let mut record = record;
        while self.h <= level {
            self.h += self.sampler.sample(self.ds, rng);
            self.s += self.ds;
            if let Some(p) = record.as_deref_mut() {
                p.push(self.s, self.h);
            }
        }
    }
}

/// One draw of L_t. Exact for stable (L_t = (t/S)^α) and identity; other kinds
/// run H with clock step `ds` and interpolate inside the crossing step.
pub fn sample_inverse<R: Rng + ?Sized>(sym: &BernsteinSymbol, t: f64, ds: f64, rng: &mut R) -> Result<f64> {
    match *sym.kind() {
        SymbolKind::Identity => Ok(t),
        SymbolKind::Stable { alpha } => Ok((alpha * (t.ln() - ln_standard_stable(alpha, rng))).exp()),
        _ => {
            let sampler = IncrementSampler::auto(sym, 1e6)?;
            let (mut s, mut h) = (0.0, 0.0);
            loop {
                let dh = sampler.sample(ds, rng);
                if h + dh > t {
                    return Ok(s + (t - h) / dh * ds);
                }
                h += dh;
                s += ds;
            }
        }
    }
}

/// Default cutoff for first-passage sampling at level t.
pub const PASSAGE_CUTOFF: f64 = 1e-5;

/// (H_{L_t}, H_{L_t−}) from one path.
///
/// Jumps above ε·t are simulated one by one with the smaller ones replaced by
/// their mean. If that drift carries the path over t, the crossing is
/// attributed to a small jump drawn from its size-biased law zπ(z) on (0, ε·t)
/// placed uniformly across t, so both sides of the crossing stay strict.
pub fn overshoot_undershoot<R: Rng + ?Sized>(
    sym: &BernsteinSymbol,
    t: f64,
    cutoff: Option<f64>,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("level must be positive, got {t}")));
    }
    if sym.drift() != 0.0 {
        return Err(Error::invalid("first passage by a jump needs a zero-drift symbol"));
    }
    Ok(PassageSampler::new(sym, t, cutoff)?.sample(rng))
}

/// Reusable sampler of (H_{L_t}, H_{L_t−}) at a fixed level.
#[derive(Debug, Clone)]
pub struct PassageSampler {
    cutoff: CutoffSampler,
    level: f64,
}

impl PassageSampler {
    pub fn new(sym: &BernsteinSymbol, t: f64, cutoff: Option<f64>) -> Result<Self> {
        let eps = cutoff.unwrap_or(PASSAGE_CUTOFF) * t;
        Ok(Self {
            cutoff: CutoffSampler::new(sym, eps, 1.0)?,
            level: t,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (c, t) = (&self.cutoff, self.level);
        let mut h = 0.0;
        loop {
            let tau: f64 = Exp1.sample(rng);
            let tau = tau / c.rate;
            if h + c.drift * tau > t {
                let z = c.small_jump(rng);
                let u = loop {
                    let u: f64 = rng.random();
                    if u > 0.0 {
                        break u;
                    }
                };
                // Keep both sides strict even when z is below the spacing of doubles at t.
                let under = (t - u * z).max(h).min(t.next_down());
                return ((t + (1.0 - u) * z).max(t.next_up()), under);
            }
            h += c.drift * tau;
            if let Some(z) = c.jump(rng) {
                if h + z > t {
                    return (h + z, h);
                }
                h += z;
            }
        }
    }
}

/// H^Ψ(L^Φ_t) from independent streams.
pub fn compose_independent<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    psi: &BernsteinSymbol,
    phi: &BernsteinSymbol,
    t: f64,
    ds: f64,
    rng_phi: &mut R1,
    rng_psi: &mut R2,
) -> Result<f64> {
    let l = sample_inverse(phi, t, ds, rng_phi)?;
    let sampler = IncrementSampler::auto(psi, l.max(1.0))?;
    Ok(sampler.sample(l, rng_psi))
}

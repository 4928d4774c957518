//! The jumping reflected process B• and the time change S that makes it sticky.
//!
//! B•_t = H(L(γ_t)) − γ_t + B⁺_t, where H is run on the clock of its own
//! inverse L: the level H(L(γ)) is constant while γ stays below it and is
//! pushed to the next overshoot as soon as γ catches up.

use std::io::Write;

use rand::Rng;

use super::reflected::ReflectedPath;
use super::sampler::IncrementSampler;
use super::subordinator::{MonotonePath, PassageClock};
use crate::error::{Error, Result};
use crate::symbols::BernsteinSymbol;

/// Default clock step of the H^Φ run.
pub const CLOCK_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct BulletPath {
    pub reflected: ReflectedPath,
    /// H^Φ on its own clock, extended as far as γ required.
    pub phi_path: MonotonePath,
    /// B• on the grid of `reflected`.
    pub positions: Vec<f64>,
    /// H(L(γ_k)).
    pub levels: Vec<f64>,
    /// L(γ_k), resolved to one clock step.
    pub clock: Vec<f64>,
    /// H^Ψ(η·L(γ_k)) once a time change is attached.
    pub holding: Option<Vec<f64>>,
}

/// Where the solution process sits at time t, given the grid around S⁻¹(t):
/// `s_prev = S_{k−1}`, `cont_end` = end of the continuous part of step k.
/// Inside the plateau the process waits at the boundary.
#[inline]
pub(crate) fn locate(t: f64, s_prev: f64, cont_end: f64, b_prev: f64, b_next: f64) -> f64 {
    if t <= cont_end {
        if t - s_prev <= 0.5 * (cont_end - s_prev) {
            b_prev
        } else {
            b_next
        }
    } else {
        0.0
    }
}

impl BulletPath {
    pub fn dt(&self) -> f64 {
        self.reflected.dt
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// B• at grid time t (right-continuous step interpolation).
    pub fn at(&self, t: f64) -> f64 {
        let k = ((t / self.dt()).floor() as usize).min(self.len() - 1);
        self.positions[k]
    }

    /// S_k on the grid; the identity when no time change is attached.
    pub fn time_change(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.len())
            .map(|k| k as f64 * dt + self.holding.as_ref().map_or(0.0, |h| h[k]))
            .collect()
    }

    fn s(&self, k: usize) -> f64 {
        k as f64 * self.dt() + self.holding.as_ref().map_or(0.0, |h| h[k])
    }

    fn first_reaching(&self, t: f64) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.s(mid) >= t {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        (lo < self.len()).then_some(lo)
    }

    /// S⁻¹(t) = inf{u : S_u ≥ t}; linear inside the continuous part of a step,
    /// constant across a plateau. None beyond the simulated range.
    pub fn s_inverse(&self, t: f64) -> Option<f64> {
        let k = self.first_reaching(t)?;
        if k == 0 {
            return Some(0.0);
        }
        let dt = self.dt();
        let s_prev = self.s(k - 1);
        let cont_end = k as f64 * dt + self.holding.as_ref().map_or(0.0, |h| h[k - 1]);
        Some(if t <= cont_end {
            (k - 1) as f64 * dt + (t - s_prev).max(0.0)
        } else {
            k as f64 * dt
        })
    }

    /// B•(S⁻¹(t)). None beyond the simulated range.
    pub fn solution_position(&self, t: f64) -> Option<f64> {
        let k = self.first_reaching(t)?;
        if k == 0 {
            return Some(self.positions[0]);
        }
        let h_prev = self.holding.as_ref().map_or(0.0, |h| h[k - 1]);
        let dt = self.dt();
        let s_prev = (k - 1) as f64 * dt + h_prev;
        let cont_end = k as f64 * dt + h_prev;
        Some(locate(t, s_prev, cont_end, self.positions[k - 1], self.positions[k]))
    }

    /// CSV with columns t,value,regulator and S when a time change is attached.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let s = self.holding.as_ref().map(|_| self.time_change());
        let mut header = vec!["t", "value", "regulator"];
        if s.is_some() {
            header.push("S");
        }
        out.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![
                (k as f64 * self.dt()).to_string(),
                self.positions[k].to_string(),
                self.reflected.regulator[k].to_string(),
            ];
            if let Some(s) = &s {
                row.push(s[k].to_string());
            }
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// B• on the grid of `reflected`, with H^Φ run on a clock of step `ds`
/// (extended as long as γ keeps growing).
pub fn build_bullet<R: Rng + ?Sized>(
    phi: &BernsteinSymbol,
    reflected: ReflectedPath,
    ds: f64,
    rng: &mut R,
) -> Result<BulletPath> {
    let gmax = *reflected.regulator.last().unwrap_or(&0.0);
    let mut clock = PassageClock::new(phi, ds, gmax.max(1.0))?;
    let mut phi_path = MonotonePath::origin();
    let n = reflected.len();
    let (mut positions, mut levels, mut clocks) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut level = 0.0;
    for k in 0..n {
        let (b, g) = (reflected.positions[k], reflected.regulator[k]);
        if g > level {
            clock.pass(g, rng, Some(&mut phi_path));
            level = clock.h;
        }
        positions.push(b + (level - g));
        levels.push(level);
        clocks.push(clock.s);
    }
    Ok(BulletPath {
        reflected,
        phi_path,
        positions,
        levels,
        clock: clocks,
        holding: None,
    })
}

/// Attaches S_k = t_k + H^Ψ(η·L(γ_k)) with H^Ψ independent of everything else.
pub fn time_change<R: Rng + ?Sized>(
    mut bullet: BulletPath,
    eta: f64,
    psi: &BernsteinSymbol,
    rng: &mut R,
) -> Result<BulletPath> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::invalid(format!("η must be finite and nonnegative, got {eta}")));
    }
    let lmax = *bullet.clock.last().unwrap_or(&0.0);
    let sampler = IncrementSampler::auto(psi, (eta * lmax).max(1.0))?;
    let mut holding = Vec::with_capacity(bullet.len());
    let (mut h, mut last) = (0.0, 0.0);
    for &l in &bullet.clock {
        if eta > 0.0 && l > last {
            h += sampler.sample(eta * (l - last), rng);
            last = l;
        }
        holding.push(h);
    }
    bullet.holding = Some(holding);
    Ok(bullet)
}

//! Increments of subordinators: exact where the law is known, otherwise a
//! compound Poisson process of the jumps above a cutoff ε plus the mean of the
//! jumps below it as a linear drift.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use super::rng::open_uniform;
use crate::error::{Error, Result};
use crate::num::gamma;
use crate::symbols::{BernsteinSymbol, SymbolKind};

/// Expected jump count above which a cutoff is refused.
pub const MAX_EXPECTED_JUMPS: f64 = 1e8;
/// Expected jump count aimed at when the cutoff is chosen automatically.
const AUTO_EXPECTED_JUMPS: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerMode {
    /// Exact increments; available for every kind except custom measures.
    Exact,
    /// Jumps above ε simulated one by one, the rest replaced by their mean.
    Cutoff(f64),
}

/// ln S for the standard positive stable law E e^{−λS} = e^{−λ^α}
/// (Kanter's representation, kept in logs so tiny α does not overflow early).
pub fn ln_standard_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u = PI * rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let ln_a = alpha / (1.0 - alpha) * (alpha * u).sin().ln() + ((1.0 - alpha) * u).sin().ln()
        - (u.sin()).ln() / (1.0 - alpha);
    (1.0 - alpha) / alpha * (ln_a - e.ln())
}

fn stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, rng: &mut R) -> f64 {
    (dt.ln() / alpha + ln_standard_stable(alpha, rng)).exp()
}

fn gamma_increment<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        return Gamma::new(shape, 1.0 / rate).expect("valid gamma").sample(rng);
    }
    // G(k) = G(k+1)·U^{1/k}, in logs: tiny shapes underflow gracefully.
    let g: f64 = Gamma::new(shape + 1.0, 1.0).expect("valid gamma").sample(rng);
    (g.ln() + open_uniform(rng).ln() / shape).exp() / rate
}

/// Law of the jumps larger than ε, normalized.
#[derive(Debug, Clone)]
enum JumpSizes {
    /// Stable: Pareto with index α.
    Pareto { alpha: f64 },
    /// Tempered: stable Pareto proposals kept with probability e^{−θz}.
    Thinned { alpha: f64, theta: f64 },
    /// Inverse tail by interpolation of (ln Π̄, ln z) on a geometric grid.
    Table { ln_tail: Vec<f64>, ln_z: Vec<f64> },
}

/// Sizes of small jumps seen at a crossing: density ∝ zπ(z) on (0, ε).
#[derive(Clone)]
enum SmallJumps {
    Power { alpha: f64, theta: f64 },
    TruncatedExp { b: f64 },
    Numeric(BernsteinSymbol),
}

/// Compound Poisson approximation with cutoff ε.
#[derive(Clone)]
pub struct CutoffSampler {
    pub epsilon: f64,
    /// Poisson rate of the proposals (Π̄(ε), or the stable tail when thinning).
    pub rate: f64,
    /// ∫₀^ε zπ(dz), the compensating drift.
    pub drift: f64,
    /// Variance rate ∫₀^ε z²π(dz) of what the drift replaces.
    pub small_variance: f64,
    sizes: JumpSizes,
    small: SmallJumps,
}

impl std::fmt::Debug for CutoffSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CutoffSampler")
            .field("epsilon", &self.epsilon)
            .field("rate", &self.rate)
            .field("drift", &self.drift)
            .finish()
    }
}

fn proposal_rate(sym: &BernsteinSymbol, eps: f64) -> f64 {
    match sym.kind() {
        SymbolKind::Tempered { alpha, .. } => eps.powf(-alpha) / gamma(1.0 - alpha),
        _ => sym.tail(eps),
    }
}

/// Smallest cutoff whose expected jump count over `horizon` is at most `jumps`.
pub fn cutoff_for(sym: &BernsteinSymbol, horizon: f64, jumps: f64) -> f64 {
    let count = |e: f64| proposal_rate(sym, e) * horizon;
    let (mut lo, mut hi) = ((1e-14f64).ln(), (1e3f64).ln());
    if count(lo.exp()) <= jumps {
        return lo.exp();
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if count(mid.exp()) > jumps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.exp()
}

impl CutoffSampler {
    pub fn new(sym: &BernsteinSymbol, epsilon: f64, horizon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("cutoff must be positive, got {epsilon}")));
        }
        if sym.is_identity() {
            return Err(Error::invalid("the identity symbol has no jumps to cut off"));
        }
        let rate = proposal_rate(sym, epsilon);
        let expected = rate * horizon;
        if !(expected <= MAX_EXPECTED_JUMPS) {
            return Err(Error::CutoffTooSmall {
                epsilon,
                expected_jumps: expected,
                suggested: cutoff_for(sym, horizon, MAX_EXPECTED_JUMPS / 10.0),
            });
        }
        let (sizes, small) = match *sym.kind() {
            SymbolKind::Stable { alpha } => (JumpSizes::Pareto { alpha }, SmallJumps::Power { alpha, theta: 0.0 }),
            SymbolKind::Tempered { alpha, theta } => {
                (JumpSizes::Thinned { alpha, theta }, SmallJumps::Power { alpha, theta })
            }
            SymbolKind::Gamma { b, .. } => (tail_table(sym, epsilon), SmallJumps::TruncatedExp { b }),
            _ => (tail_table(sym, epsilon), SmallJumps::Numeric(sym.clone())),
        };
        Ok(Self {
            epsilon,
            rate,
            drift: sym.m1(epsilon),
            small_variance: sym.m2(epsilon),
            sizes,
            small,
        })
    }

    /// One jump of size > ε, or `None` when a thinned proposal is discarded.
    pub fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let u = open_uniform(rng);
        match &self.sizes {
            JumpSizes::Pareto { alpha } => Some(self.epsilon * u.powf(-1.0 / alpha)),
            JumpSizes::Thinned { alpha, theta } => {
                let z = self.epsilon * u.powf(-1.0 / alpha);
                (rng.random::<f64>() < (-theta * z).exp()).then_some(z)
            }
            JumpSizes::Table { ln_tail, ln_z } => Some(invert_table(ln_tail, ln_z, ln_tail[0] + u.ln()).exp()),
        }
    }

    /// Size of the small jump that carries a crossing: density ∝ zπ(z) on (0, ε).
    pub fn small_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let eps = self.epsilon;
        match &self.small {
            SmallJumps::Power { alpha, theta } => loop {
                let z = eps * open_uniform(rng).powf(1.0 / (1.0 - alpha));
                if *theta == 0.0 || rng.random::<f64>() < (-theta * z).exp() {
                    return z;
                }
            },
            SmallJumps::TruncatedExp { b } => {
                let u = open_uniform(rng);
                -(u * (-b * eps).exp_m1()).ln_1p() / b
            }
            SmallJumps::Numeric(sym) => {
                let target = open_uniform(rng) * self.drift;
                let (mut lo, mut hi) = (0.0, eps);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if sym.m1(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Increment over `dt`, pushing the accepted jump sizes to `jumps`.
    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R, mut jumps: Option<&mut Vec<f64>>) -> f64 {
        let mut total = self.drift * dt;
        let mut clock: f64 = Exp1.sample(rng);
        let scale = 1.0 / self.rate;
        while clock * scale <= dt {
            if let Some(z) = self.jump(rng) {
                total += z;
                if let Some(j) = jumps.as_deref_mut() {
                    j.push(z);
                }
            }
            let e: f64 = Exp1.sample(rng);
            clock += e;
        }
        total
    }
}

/// ln z at which ln Π̄ drops to `target`, by linear interpolation (log-log
/// extrapolation past the last node).
fn invert_table(ln_tail: &[f64], ln_z: &[f64], target: f64) -> f64 {
    let n = ln_tail.len();
    let i = ln_tail.partition_point(|&v| v > target);
    let (a, b) = if i == 0 {
        (0, 1)
    } else if i >= n {
        (n - 2, n - 1)
    } else {
        (i - 1, i)
    };
    let w = (target - ln_tail[a]) / (ln_tail[b] - ln_tail[a]);
    ln_z[a] + w * (ln_z[b] - ln_z[a])
}

fn tail_table(sym: &BernsteinSymbol, eps: f64) -> JumpSizes {
    let t0 = sym.tail(eps);
    let mut ln_tail = vec![t0.ln()];
    let mut ln_z = vec![eps.ln()];
    let mut z = eps;
    for _ in 0..2000 {
        z *= 1.05;
        let t = sym.tail(z);
        if !(t > 0.0) || t < 1e-15 * t0 {
            break;
        }
        ln_tail.push(t.ln());
        ln_z.push(z.ln());
    }
    if ln_tail.len() < 2 {
        ln_tail.push(ln_tail[0] - 40.0);
        ln_z.push(ln_z[0] + 1e-3);
    }
    JumpSizes::Table { ln_tail, ln_z }
}

#[derive(Debug, Clone)]
enum Inner {
    Drift,
    Stable { alpha: f64 },
    Gamma { a: f64, b: f64 },
    Tempered { alpha: f64, theta: f64 },
    Cutoff(CutoffSampler),
}

/// Sampler of H_{s+dt} − H_s for one symbol.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    inner: Inner,
}

impl IncrementSampler {
    /// `horizon` bounds the total clock time, used to check the jump budget.
    pub fn new(sym: &BernsteinSymbol, mode: SamplerMode, horizon: f64) -> Result<Self> {
        let inner = match (mode, sym.kind()) {
            (_, SymbolKind::Identity) => Inner::Drift,
            (SamplerMode::Exact, SymbolKind::Stable { alpha }) => Inner::Stable { alpha: *alpha },
            (SamplerMode::Exact, SymbolKind::Gamma { a, b }) => Inner::Gamma { a: *a, b: *b },
            (SamplerMode::Exact, SymbolKind::Tempered { alpha, theta }) => Inner::Tempered {
                alpha: *alpha,
                theta: *theta,
            },
            (SamplerMode::Exact, SymbolKind::Custom(_)) => {
                return Err(Error::invalid("custom measures have no exact sampler; give a cutoff ε"))
            }
            (SamplerMode::Cutoff(eps), _) => Inner::Cutoff(CutoffSampler::new(sym, eps, horizon)?),
        };
        Ok(Self { inner })
    }

    /// Exact when possible, otherwise a cutoff sized to about 10⁵ jumps over `horizon`.
    pub fn auto(sym: &BernsteinSymbol, horizon: f64) -> Result<Self> {
        match sym.kind() {
            SymbolKind::Custom(_) => {
                let eps = cutoff_for(sym, horizon.max(1e-12), AUTO_EXPECTED_JUMPS);
                Self::new(sym, SamplerMode::Cutoff(eps), horizon)
            }
            _ => Self::new(sym, SamplerMode::Exact, horizon),
        }
    }

    pub fn cutoff(&self) -> Option<&CutoffSampler> {
        match &self.inner {
            Inner::Cutoff(c) => Some(c),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        self.sample_recording(dt, rng, None)
    }

    /// As `sample`, also reporting individual jumps when running with a cutoff.
    pub fn sample_recording<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R, jumps: Option<&mut Vec<f64>>) -> f64 {
        if !(dt > 0.0) {
            return 0.0;
        }
        match &self.inner {
            Inner::Drift => dt,
            Inner::Stable { alpha } => stable_increment(*alpha, dt, rng),
            Inner::Gamma { a, b } => gamma_increment(a * dt, *b, rng),
            Inner::Tempered { alpha, theta } => {
                // Exponential tilting of the stable law; split so each piece
                // needs e^{dt θ^α} ≤ e trials on average.
                let load = dt * theta.powf(*alpha);
                let pieces = load.ceil().max(1.0) as usize;
                let h = dt / pieces as f64;
                (0..pieces)
                    .map(|_| loop {
                        let x = stable_increment(*alpha, h, rng);
                        if rng.random::<f64>() < (-theta * x).exp() {
                            break x;
                        }
                    })
                    .sum()
            }
            Inner::Cutoff(c) => c.increment(dt, rng, jumps),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::rng::{stream, Component};

    fn laplace_mc(sampler: &IncrementSampler, dt: f64, lambda: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = stream(seed, 0, Component::Phi);
        let v: Vec<f64> = (0..n).map(|_| (-lambda * sampler.sample(dt, &mut rng)).exp()).collect();
        let m = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (m, (var / n as f64).sqrt())
    }

    #[test]
    fn exact_samplers_match_the_symbol() {
        let syms = [
            BernsteinSymbol::stable(0.5).unwrap(),
            BernsteinSymbol::stable(0.2).unwrap(),
            BernsteinSymbol::stable(0.9).unwrap(),
            BernsteinSymbol::gamma(1.0, 1.0).unwrap(),
            BernsteinSymbol::gamma(0.3, 2.0).unwrap(),
            BernsteinSymbol::tempered(0.6, 1.5).unwrap(),
            BernsteinSymbol::identity(),
        ];
        for (i, s) in syms.iter().enumerate() {
            let sampler = IncrementSampler::new(s, SamplerMode::Exact, 1.0).unwrap();
            for &(dt, lambda) in &[(1.0, 1.0), (0.3, 2.0), (3.0, 0.5)] {
                let (m, se) = laplace_mc(&sampler, dt, lambda, 40_000, i as u64);
                let target = (-dt * s.phi(lambda)).exp();
                assert!((m - target).abs() <= 3.5 * se.max(1e-12), "{s:?} dt={dt} λ={lambda}: {m} vs {target} (se {se})");
            }
        }
    }

    #[test]
    fn cutoff_samplers_match_the_symbol() {
        let custom = BernsteinSymbol::custom(|z| 0.5 * z.powf(-1.5) * (-z).exp()).unwrap();
        let syms = [
            BernsteinSymbol::stable(0.5).unwrap(),
            BernsteinSymbol::gamma(1.0, 1.0).unwrap(),
            BernsteinSymbol::tempered(0.6, 1.5).unwrap(),
            custom,
        ];
        for (i, s) in syms.iter().enumerate() {
            let sampler = IncrementSampler::new(s, SamplerMode::Cutoff(1e-4), 1e4).unwrap();
            let (m, se) = laplace_mc(&sampler, 1.0, 1.0, 20_000, 100 + i as u64);
            let target = (-s.phi(1.0)).exp();
            assert!((m - target).abs() <= 3.5 * se + 2e-3, "{s:?}: {m} vs {target} (se {se})");
        }
    }

    #[test]
    fn tiny_cutoff_is_refused_with_a_suggestion() {
        let s = BernsteinSymbol::stable(0.9).unwrap();
        match IncrementSampler::new(&s, SamplerMode::Cutoff(1e-12), 10.0) {
            Err(Error::CutoffTooSmall { suggested, expected_jumps, .. }) => {
                assert!(expected_jumps > MAX_EXPECTED_JUMPS);
                assert!(IncrementSampler::new(&s, SamplerMode::Cutoff(suggested), 10.0).is_ok());
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn tiny_index_stays_finite_in_logs() {
        let mut rng = stream(1, 0, Component::Phi);
        for _ in 0..100 {
            let l = ln_standard_stable(0.01, &mut rng);
            assert!(l.is_finite());
        }
    }

    #[test]
    fn small_jump_sizes_are_size_biased() {
        // For stable, zπ(z) ∝ z^{−α} on (0, ε): mean ε(1−α)/(2−α).
        let s = BernsteinSymbol::stable(0.5).unwrap();
        let c = CutoffSampler::new(&s, 0.01, 1.0).unwrap();
        let mut rng = stream(2, 0, Component::Extra);
        let n = 20_000;
        let m = (0..n).map(|_| c.small_jump(&mut rng)).sum::<f64>() / n as f64;
        assert!((m - 0.01 / 3.0).abs() < 1e-4, "{m}");
        // The numeric inverse agrees on a gamma measure.
        let g = BernsteinSymbol::gamma(1.0, 3.0).unwrap();
        let exact = CutoffSampler::new(&g, 0.5, 1.0).unwrap();
        let mut numeric = exact.clone();
        numeric.small = SmallJumps::Numeric(g.clone());
        let mut r1 = stream(3, 0, Component::Extra);
        let mut r2 = stream(3, 0, Component::Extra);
        for _ in 0..50 {
            let (a, b) = (exact.small_jump(&mut r1), numeric.small_jump(&mut r2));
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

//! Monte Carlo estimators: the solution υ(t,x) = E_x f(B•(S⁻¹_t)), holding-time
//! survival and the double Laplace transform of H^Ψ(L^Φ).

use std::io::Write;

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bullet::{locate, CLOCK_STEP};
use super::reflected::{brownian_increment, reflect_step, Reflection};
use super::rng::{stream, Component};
use super::sampler::{IncrementSampler, SamplerMode};
use super::subordinator::{compose_independent, PassageClock};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::symbols::BernsteinSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub mean: f64,
    /// Sample standard deviation over √count.
    pub se: f64,
    pub count: usize,
    pub seed: u64,
}

impl EstimateWithError {
    /// Mean and standard error, accumulated in sample order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n as f64).sqrt(),
            count: n,
            seed,
        }
    }

    /// |mean − target| ≤ k·SE + rel·|target|.
    pub fn agrees(&self, target: f64, k: f64, rel: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + rel * target.abs()
    }
}

/// Simulation settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub paths: usize,
    pub dt: f64,
    /// Clock step of the H^Φ run.
    pub clock_step: f64,
    pub seed: u64,
    pub reflection: Reflection,
    /// Small-jump cutoff for symbols without an exact sampler.
    pub epsilon: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 10_000,
            dt: 1e-4,
            clock_step: CLOCK_STEP,
            seed: 0,
            reflection: Reflection::Bridge,
            epsilon: None,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.paths == 0 || !(self.dt > 0.0) || !(self.clock_step > 0.0) {
            return Err(Error::invalid(format!(
                "need paths > 0, dt > 0, clock step > 0; got {}, {}, {}",
                self.paths, self.dt, self.clock_step
            )));
        }
        Ok(())
    }

    fn sampler(&self, sym: &BernsteinSymbol, horizon: f64) -> Result<IncrementSampler> {
        match self.epsilon {
            Some(eps) if sym.spec().is_none() => IncrementSampler::new(sym, SamplerMode::Cutoff(eps), horizon),
            _ => IncrementSampler::auto(sym, horizon),
        }
    }
}

/// Shared, read-only ingredients of every path.
struct Ingredients<'a> {
    problem: &'a Problem,
    clock: PassageClock,
    psi: IncrementSampler,
}

/// f(B•(S⁻¹_τ)) for each sorted τ in `times`, from path bundle `index`.
fn simulate_path(ing: &Ingredients<'_>, times: &[f64], x: f64, cfg: &McConfig, index: u64) -> Vec<f64> {
    let p = ing.problem;
    let mut rb = stream(cfg.seed, index, Component::Brownian);
    let mut rphi = stream(cfg.seed, index, Component::Phi);
    let mut rpsi = stream(cfg.seed, index, Component::Psi);
    let mut clock = ing.clock.clone();
    let (dt, sd, eta) = (cfg.dt, (2.0 * cfg.dt).sqrt(), p.eta);
    let mut out = Vec::with_capacity(times.len());
    while out.len() < times.len() && times[out.len()] <= 0.0 {
        out.push(p.f.eval(x));
    }
    let (mut bplus, mut gamma, mut level, mut hold, mut lclock) = (x, 0.0, 0.0, 0.0, 0.0);
    let mut prev = x;
    let mut k = 0u64;
    while out.len() < times.len() {
        k += 1;
        let (y, dg) = reflect_step(bplus, brownian_increment(sd, &mut rb), dt, cfg.reflection, &mut rb);
        bplus = y;
        gamma += dg;
        let hold_prev = hold;
        if gamma > level {
            clock.pass(gamma, &mut rphi, None);
            level = clock.h;
            if eta > 0.0 && clock.s > lclock {
                hold += ing.psi.sample(eta * (clock.s - lclock), &mut rpsi);
            }
            lclock = clock.s;
        }
        let pos = bplus + (level - gamma);
        let tk = k as f64 * dt;
        let s_k = tk + hold;
        while out.len() < times.len() && times[out.len()] <= s_k {
            let t = times[out.len()];
            let s_prev = (k - 1) as f64 * dt + hold_prev;
            out.push(p.f.eval(locate(t, s_prev, tk + hold_prev, prev, pos)));
        }
        prev = pos;
    }
    out
}

/// υ(t,x) at several times from the same path bundles, one estimate per time.
pub fn mc_solution_times(problem: &Problem, times: &[f64], x: f64, cfg: &McConfig) -> Result<Vec<EstimateWithError>> {
    cfg.validate()?;
    if !(x >= 0.0) || times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::invalid("need x ≥ 0 and finite times ≥ 0"));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| times[i]).collect();
    let t_max = sorted.last().copied().unwrap_or(0.0).max(1.0);
    let ing = Ingredients {
        problem,
        clock: PassageClock::new(&problem.phi, cfg.clock_step, t_max)?,
        psi: cfg.sampler(&problem.psi, t_max)?,
    };
    let rows: Vec<Vec<f64>> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(&ing, &sorted, x, cfg, i))
        .collect();
    let mut out = vec![None; times.len()];
    for (j, &i) in order.iter().enumerate() {
        let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        out[i] = Some(EstimateWithError::from_samples(&column, cfg.seed));
    }
    Ok(out.into_iter().map(|e| e.expect("every time filled")).collect())
}

pub fn mc_solution(problem: &Problem, t: f64, x: f64, cfg: &McConfig) -> Result<EstimateWithError> {
    Ok(mc_solution_times(problem, &[t], x, cfg)?[0])
}

/// R_λf(x) = E_x ∫₀^∞ e^{−λt} f(X_t) dt, truncated at `horizon` and summed by
/// the trapezoid rule with step `h`. The dropped tail is at most e^{−λT}·sup|f|/λ.
pub fn mc_resolvent(
    problem: &Problem,
    lambda: f64,
    x: f64,
    horizon: f64,
    h: f64,
    cfg: &McConfig,
) -> Result<EstimateWithError> {
    cfg.validate()?;
    if !(lambda > 0.0 && horizon > 0.0 && h > 0.0 && x >= 0.0) {
        return Err(Error::invalid("need λ > 0, T > 0, h > 0 and x ≥ 0"));
    }
    let n = (horizon / h).round().max(1.0) as usize;
    let h = horizon / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let weights: Vec<f64> = times
        .iter()
        .enumerate()
        .map(|(i, t)| (-lambda * t).exp() * if i == 0 || i == n { 0.5 * h } else { h })
        .collect();
    let ing = Ingredients {
        problem,
        clock: PassageClock::new(&problem.phi, cfg.clock_step, horizon.max(1.0))?,
        psi: cfg.sampler(&problem.psi, horizon.max(1.0))?,
    };
    let samples: Vec<f64> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| {
            let v = simulate_path(&ing, &times, x, cfg, i);
            v.iter().zip(&weights).map(|(a, w)| a * w).sum()
        })
        .collect();
    Ok(EstimateWithError::from_samples(&samples, cfg.seed))
}

/// P(H^Ψ_e > t) with e ~ Exp(1) independent of H^Ψ.
pub fn holding_time_survival(psi: &BernsteinSymbol, t: f64, paths: usize, seed: u64) -> Result<EstimateWithError> {
    Ok(holding_time_survival_many(psi, &[t], paths, seed)?[0])
}

/// Survival at several levels from the same samples.
pub fn holding_time_survival_many(
    psi: &BernsteinSymbol,
    levels: &[f64],
    paths: usize,
    seed: u64,
) -> Result<Vec<EstimateWithError>> {
    if paths == 0 || levels.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::invalid("need paths > 0 and levels ≥ 0"));
    }
    let sampler = IncrementSampler::auto(psi, 50.0)?;
    let samples: Vec<f64> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut re = stream(seed, i, Component::Extra);
            let mut rp = stream(seed, i, Component::Psi);
            let e: f64 = Exp1.sample(&mut re);
            sampler.sample(e, &mut rp)
        })
        .collect();
    Ok(levels
        .iter()
        .map(|&t| {
            let ind: Vec<f64> = samples.iter().map(|&h| if t <= 0.0 || h > t { 1.0 } else { 0.0 }).collect();
            EstimateWithError::from_samples(&ind, seed)
        })
        .collect())
}

/// E ∫e^{−λt}e^{−ξH^Ψ(L^Φ_t)}dt as the mean of (1/λ)e^{−ξH^Ψ(L^Φ_T)}, T ~ Exp(λ).
pub fn double_laplace(
    psi: &BernsteinSymbol,
    phi: &BernsteinSymbol,
    lambda: f64,
    xi: f64,
    paths: usize,
    seed: u64,
    ds: f64,
) -> Result<EstimateWithError> {
    if !(lambda > 0.0 && xi >= 0.0) || paths == 0 {
        return Err(Error::invalid("need λ > 0, ξ ≥ 0 and paths > 0"));
    }
    let samples: Result<Vec<f64>> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut re = stream(seed, i, Component::Extra);
            let mut rphi = stream(seed, i, Component::Phi);
            let mut rpsi = stream(seed, i, Component::Psi);
            let e: f64 = Exp1.sample(&mut re);
            let h = compose_independent(psi, phi, e / lambda, ds, &mut rphi, &mut rpsi)?;
            Ok((-xi * h).exp() / lambda)
        })
        .collect();
    Ok(EstimateWithError::from_samples(&samples?, seed))
}

/// Φ(λ)/λ · 1/(Φ(λ) + Ψ(ξ)).
pub fn double_laplace_target(psi: &BernsteinSymbol, phi: &BernsteinSymbol, lambda: f64, xi: f64) -> f64 {
    let p = phi.phi(lambda);
    p / lambda / (p + psi.phi(xi))
}

/// One sample per row under a single header.
pub fn write_samples_csv<W: Write>(w: W, header: &str, samples: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([header])?;
    for v in samples {
        out.write_record([v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

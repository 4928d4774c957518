//! Non-local derivatives driven by a Bernstein symbol: Marchaud, Riemann–Liouville
//! and Caputo–Dzherbashian types, with the identities that certify them.
//!
//! Every integral against the singular kernel is split into a Taylor part on
//! (0, δ), closed with the exact moment functions of the measure, and an
//! adaptive quadrature on a logarithmic scale beyond δ.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::{deriv1, deriv2, fd_step};
use crate::quad::{self, Tolerance};
use crate::symbols::BernsteinSymbol;

/// A real function on [0, ∞) with the regularity flags the operators need.
#[derive(Clone)]
pub struct SampledFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub bound: Option<f64>,
    pub lipschitz: Option<f64>,
    pub zero_extended: bool,
    pub decays: bool,
    /// Characteristic length, used for step sizes and truncation.
    pub scale: f64,
    /// Optional closed form Σ cᵢ e^{−βᵢx}, used by the Laplace-domain oracles.
    pub exp_sum: Option<Vec<(f64, f64)>>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("bound", &self.bound)
            .field("lipschitz", &self.lipschitz)
            .field("zero_extended", &self.zero_extended)
            .field("decays", &self.decays)
            .field("scale", &self.scale)
            .field("exp_sum", &self.exp_sum)
            .finish()
    }
}

impl SampledFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            bound: None,
            lipschitz: None,
            zero_extended: false,
            decays: false,
            scale: 1.0,
            exp_sum: None,
        }
    }

    /// Σ cᵢ e^{−βᵢx} with flags filled in; β = 0 terms are constants.
    pub fn exp_sum(terms: Vec<(f64, f64)>) -> Self {
        assert!(terms.iter().all(|&(_, b)| b >= 0.0), "exponents must be nonnegative");
        let t = terms.clone();
        let bound = terms.iter().map(|(c, _)| c.abs()).sum();
        let lip = terms.iter().map(|(c, b)| (c * b).abs()).sum();
        let decays = terms.iter().all(|&(c, b)| b > 0.0 || c == 0.0);
        let scale = terms
            .iter()
            .filter(|&&(_, b)| b > 0.0)
            .map(|&(_, b)| 1.0 / b)
            .fold(0.0, f64::max);
        let mut s = Self::new(move |x| t.iter().map(|(c, b)| c * (-b * x).exp()).sum());
        s.bound = Some(bound);
        s.lipschitz = Some(lip);
        s.decays = decays;
        s.scale = if scale > 0.0 { scale.min(1.0).max(0.1) } else { 1.0 };
        s.exp_sum = Some(terms);
        s
    }

    pub fn constant(c: f64) -> Self {
        Self::exp_sum(vec![(c, 0.0)])
    }

    pub fn bounded(mut self, m: f64) -> Self {
        self.bound = Some(m);
        self
    }

    pub fn lipschitz(mut self, k: f64) -> Self {
        self.lipschitz = Some(k);
        self
    }

    pub fn zero_extended(mut self) -> Self {
        self.zero_extended = true;
        self
    }

    pub fn decaying(mut self) -> Self {
        self.decays = true;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.zero_extended && x <= 0.0 {
            return 0.0;
        }
        (self.f)(x)
    }

    pub fn d1(&self, x: f64, tol: f64) -> f64 {
        deriv1(&|y| self.eval(y), x, fd_step(tol, self.scale), 0.0)
    }

    pub fn d2(&self, x: f64, tol: f64) -> f64 {
        deriv2(&|y| self.eval(y), x, fd_step(tol, self.scale), 0.0)
    }

    pub fn is_zero_exp_sum(&self) -> bool {
        matches!(&self.exp_sum, Some(t) if t.iter().all(|&(c, _)| c == 0.0))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Split between small and large jumps.
    pub split: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
    /// Upper truncation; `None` picks one from the decay flag and the tail.
    pub y_max: Option<f64>,
    /// Target accuracy driving the finite-difference step.
    pub fd_tol: f64,
    /// Width of the Taylor-closed interval near the kernel singularity, in units of the function scale.
    pub taylor_width: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            split: 1.0,
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_segments: 4000,
            y_max: None,
            fd_tol: 1e-12,
            taylor_width: 1e-4,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.fd_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(self.split > 0.0) {
            return Err(Error::invalid("split point must be positive"));
        }
        Ok(())
    }

    fn tol(&self) -> Tolerance {
        Tolerance {
            abs: self.abs_tol,
            rel: self.rel_tol,
            max_segments: self.max_segments,
        }
    }

    fn delta(&self, u: &SampledFunction) -> f64 {
        self.taylor_width * u.scale
    }

    /// Truncation point: far enough that the measure beyond is below the
    /// absolute tolerance, or where a decaying function has died out.
    fn y_max(&self, u: &SampledFunction, sym: &BernsteinSymbol) -> f64 {
        if let Some(y) = self.y_max {
            return y;
        }
        if u.decays {
            return 60.0 * u.scale;
        }
        let mut y = 1.0f64.max(self.split);
        while sym.tail(y) > self.abs_tol && y < 1e15 {
            y *= 10.0;
        }
        y
    }
}

fn check(est: quad::Estimate<f64>, tol: &Tolerance) -> Result<f64> {
    est.into_result(tol)
}

/// ∫_a^b g on a log scale, splitting at `split` when it falls inside.
fn log_integral(g: &dyn Fn(f64) -> f64, a: f64, b: f64, split: f64, tol: &Tolerance) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if split > a && split < b {
        Ok(check(quad::estimate_log(g, a, split, tol), tol)?
            + check(quad::estimate_log(g, split, b, tol), tol)?)
    } else {
        check(quad::estimate_log(g, a, b, tol), tol)
    }
}

fn sanity_bound(u: &SampledFunction, sym: &BernsteinSymbol, value: f64, what: &str) -> Result<()> {
    if let (Some(m), Some(k)) = (u.bound, u.lipschitz) {
        let bound = (k + 2.0 * m) * sym.integrated_tail(1.0) + sym.drift() * k;
        if value.abs() > bound * (1.0 + 1e-6) + 1e-9 {
            return Err(Error::Consistency(format!(
                "{what} = {value:e} exceeds the a-priori bound {bound:e}"
            )));
        }
    }
    Ok(())
}

/// 𝐃ₓ₋u(x) = −d·u′(x) + ∫₀^∞ (u(x) − u(x+y)) Π(dy).
pub fn marchaud_left(
    u: &SampledFunction,
    x: f64,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if x < 0.0 {
        return Err(Error::invalid("marchaud_left needs x ≥ 0"));
    }
    let u1 = u.d1(x, cfg.fd_tol);
    if sym.is_identity() {
        return Ok(-u1);
    }
    let tol = cfg.tol();
    let delta = cfg.delta(u);
    let ymax = cfg.y_max(u, sym);
    let ux = u.eval(x);
    let u2 = u.d2(x, cfg.fd_tol);
    let taylor = -u1 * sym.m1(delta) - 0.5 * u2 * sym.m2(delta);
    let g = |y: f64| (ux - u.eval(x + y)) * sym.levy_density(y);
    let body = log_integral(&g, delta, ymax, cfg.split, &tol)?;
    let closure = (ux - u.eval(x + ymax)) * sym.tail(ymax);
    let value = -sym.drift() * u1 + taylor + body + closure;
    sanity_bound(u, sym, value, "left Marchaud derivative")?;
    Ok(value)
}

/// 𝐃ₓ₊u(x) = d·u′(x) + ∫₀^∞ (u(x) − u(x−y)) Π(dy), with u = 0 on (−∞, 0].
pub fn marchaud_right(
    u: &SampledFunction,
    x: f64,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !u.zero_extended {
        return Err(Error::invalid(
            "marchaud_right needs a function extended by zero on the negative half-line",
        ));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let u1 = u.d1(x, cfg.fd_tol);
    if sym.is_identity() {
        return Ok(u1);
    }
    let tol = cfg.tol();
    let delta = cfg.delta(u).min(0.25 * x);
    let ux = u.eval(x);
    let u2 = u.d2(x, cfg.fd_tol);
    let taylor = u1 * sym.m1(delta) - 0.5 * u2 * sym.m2(delta);
    let g = |y: f64| (ux - u.eval(x - y)) * sym.levy_density(y);
    let body = log_integral(&g, delta, x, cfg.split, &tol)?;
    let value = sym.drift() * u1 + taylor + body + ux * sym.tail(x);
    sanity_bound(u, sym, value, "right Marchaud derivative")?;
    Ok(value)
}

/// Riemann–Liouville derivative on (x, ∞): −d/dx ∫ₓ^∞ u(y)Π̄(y−x)dy.
/// With the decay flag it is evaluated through the Caputo reduction
/// −∫₀^∞ u′(x+z)Π̄(z)dz; otherwise the convolution is differentiated directly.
pub fn riemann_liouville_right(
    u: &SampledFunction,
    x: f64,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if x < 0.0 {
        return Err(Error::invalid("riemann_liouville_right needs x ≥ 0"));
    }
    if sym.is_identity() {
        return Ok(-u.d1(x, cfg.fd_tol));
    }
    let tol = cfg.tol();
    let ymax = cfg.y_max(u, sym);
    if !u.decays {
        let conv = |x: f64| -> f64 {
            let g = |z: f64| u.eval(x + z) * sym.tail(z);
            let a = cfg.split.min(ymax);
            quad::estimate_from_zero(g, a, &tol).value + quad::estimate_log(g, a, ymax, &tol).value
        };
        let h = fd_step(cfg.fd_tol, u.scale);
        return Ok(-deriv1(&conv, x, h, 0.0));
    }
    let delta = cfg.delta(u);
    let u1 = u.d1(x, cfg.fd_tol);
    let u2 = u.d2(x, cfg.fd_tol);
    let near = u1 * sym.integrated_tail(delta) + u2 * sym.j1(delta);
    let g = |z: f64| u.d1(x + z, cfg.fd_tol) * sym.tail(z);
    let body = log_integral(&g, delta, ymax, cfg.split, &tol)?;
    Ok(-sym.drift() * u1 - near - body)
}

/// Riemann–Liouville derivative on (0, x): d/dx [d·u(x) + ∫₀^x u(x−z)Π̄(z)dz].
pub fn riemann_liouville_left(
    u: &SampledFunction,
    x: f64,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(x > 0.0) {
        return Err(Error::invalid("riemann_liouville_left needs x > 0"));
    }
    let tol = Tolerance {
        abs: cfg.abs_tol * 1e-2,
        rel: cfg.rel_tol * 1e-2,
        max_segments: cfg.max_segments,
    };
    let failure = RefCell::new(None);
    let conv = |y: f64| -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let g = |z: f64| u.eval(y - z) * sym.tail(z);
        let a = cfg.split.min(y);
        let near = quad::estimate_from_zero(g, a, &tol);
        let far = quad::estimate(g, a, y, &tol);
        if !(near.converged && far.converged) {
            failure.borrow_mut().get_or_insert(Error::Quadrature {
                achieved: near.error + far.error,
                requested: tol.abs,
            });
        }
        sym.drift() * u.eval(y) + near.value + far.value
    };
    let h = fd_step(cfg.fd_tol, u.scale).min(0.1 * x);
    let v = deriv1(&conv, x, h, 0.0);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Caputo–Dzherbashian derivative d·u′(t) + ∫₀^t u′(t−z)Π̄(z)dz.
pub fn caputo_dzherbashian(
    u: &SampledFunction,
    t: f64,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(Error::invalid("caputo_dzherbashian needs t > 0"));
    }
    let u1 = u.d1(t, cfg.fd_tol);
    if sym.is_identity() {
        return Ok(u1);
    }
    let tol = cfg.tol();
    let delta = cfg.delta(u).min(0.25 * t);
    let u2 = u.d2(t, cfg.fd_tol);
    let near = u1 * sym.integrated_tail(delta) - u2 * sym.j1(delta);
    let g = |z: f64| u.d1(t - z, cfg.fd_tol) * sym.tail(z);
    let body = log_integral(&g, delta, t, cfg.split, &tol)?;
    Ok(sym.drift() * u1 + near + body)
}

/// |∫u·𝐃ₓ₋v − ∫𝐃ₓ₊u·v| over (0, ∞).
pub fn integration_by_parts_residual(
    u: &SampledFunction,
    v: &SampledFunction,
    sym: &BernsteinSymbol,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut u = u.clone();
    u.zero_extended = true;
    let outer = Tolerance::new(1e-10, 1e-9);
    let scale = u.scale.max(v.scale);
    let failure = RefCell::new(None);
    let record = |r: Result<f64>| -> f64 {
        r.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let lhs = quad::estimate_to_inf(
        |x| {
            let ux = u.eval(x);
            if ux == 0.0 {
                0.0
            } else {
                ux * record(marchaud_left(v, x, sym, cfg))
            }
        },
        0.0,
        scale,
        &outer,
    );
    let rhs = quad::estimate_to_inf(
        |x| {
            let vx = v.eval(x);
            if vx == 0.0 {
                0.0
            } else {
                record(marchaud_right(&u, x, sym, cfg)) * vx
            }
        },
        0.0,
        scale,
        &outer,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((lhs.into_result(&outer)? - rhs.into_result(&outer)?).abs())
}

/// (‖𝔇ᵗu‖_p, c·‖u′‖_p) on a uniform grid over (0, T]; p = ∞ allowed.
pub fn norm_bound_check(
    u: &SampledFunction,
    sym: &BernsteinSymbol,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let c = sym.mean_coefficient();
    if !c.is_finite() {
        return Err(Error::invalid(format!(
            "norm bound needs a finite lim Φ(λ)/λ; {} has c = ∞",
            sym.name()
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::invalid("norm exponent must be ≥ 1"));
    }
    let horizon = 40.0 * u.scale;
    let n = 800;
    let ts: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    let mut lhs_vals = Vec::with_capacity(n + 1);
    let mut rhs_vals = Vec::with_capacity(n + 1);
    for &t in &ts {
        // The memory integral is empty at t = 0.
        let l = if t == 0.0 {
            sym.drift() * u.d1(0.0, cfg.fd_tol)
        } else {
            caputo_dzherbashian(u, t, sym, cfg)?
        };
        lhs_vals.push(l.abs());
        rhs_vals.push(u.d1(t, cfg.fd_tol).abs());
    }
    let norm = |v: &[f64]| -> f64 {
        if p.is_infinite() {
            v.iter().cloned().fold(0.0, f64::max)
        } else {
            let y: Vec<f64> = v.iter().map(|a| a.powf(p)).collect();
            quad::trapezoid(&ts, &y).powf(1.0 / p)
        }
    };
    Ok((norm(&lhs_vals), c * norm(&rhs_vals)))
}

//! Analytic oracles: densities of H and L, the Dirichlet and boundary
//! resolvents, the solution υ(t,x), the elliptic resolvents w∓ and the
//! half-line heat semigroups.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::inversion::{
    gaver_stehfest, invert_checked, invert_checked_with, talbot, Inversion, Method, TransformFunction,
    CROSS_CHECK_TOL,
};
use crate::error::{Error, Result};
use crate::num::{exp_erfc, erfc, gamma, ln_gamma, CubicSpline};
use crate::operators::SampledFunction;
use crate::problem::Problem;
use crate::quad::{self, Tolerance};
use crate::symbols::{BernsteinSymbol, SymbolKind};

const TALBOT_NODES: usize = 32;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn tol() -> Tolerance {
    Tolerance::new(1e-11, 1e-10)
}

/// (1 − e^{−w})/w.
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        c(1.0) - w / 2.0 + w * w / 6.0 - w * w * w / 24.0
    } else {
        crate::symbols::one_minus_exp(-w) / w
    }
}

/// R^D_λ applied to e^{−βy} at x, with s = √λ:
/// (e^{−βx} − e^{−sx})/(s² − β²) written without cancellation.
fn rd_exp(beta: f64, s: Complex64, x: f64) -> Complex64 {
    (-beta * x).exp() * x * phi1((s - beta) * x) / (s + beta)
}

/// ∫ R^D_λ e^{−β·} dΠ with drift, (Φ(s) − Φ(β))/(s² − β²).
fn levy_term(phi: &BernsteinSymbol, beta: f64, s: Complex64) -> Complex64 {
    let ds = s - beta;
    if ds.norm() < 1e-7 * (1.0 + beta) {
        return c(phi.phi_prime(beta)) / (s + beta);
    }
    (phi.phi_complex(s) - c(phi.phi(beta))) / (ds * (s + beta))
}

fn exp_terms(f: &SampledFunction) -> Option<&[(f64, f64)]> {
    f.exp_sum.as_deref()
}

// ---------------------------------------------------------------------------
// Half-line heat semigroups

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLine {
    Dirichlet,
    Neumann,
}

/// Heat kernel g(t,z) = e^{−z²/4t}/√(4πt).
pub fn heat_kernel(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// ∫₀^∞ (g(t,x−y) ∓ g(t,x+y)) f(y) dy; closed form for exponential sums.
pub fn heat_half_line(f: &SampledFunction, t: f64, x: f64, bc: HalfLine) -> Result<f64> {
    if !(t > 0.0) || x < 0.0 {
        return Err(Error::invalid("heat_half_line needs t > 0 and x ≥ 0"));
    }
    let sign = match bc {
        HalfLine::Dirichlet => -1.0,
        HalfLine::Neumann => 1.0,
    };
    if let Some(terms) = exp_terms(f) {
        let st = t.sqrt();
        return Ok(terms
            .iter()
            .map(|&(cf, b)| {
                let a = b * b * t;
                let first = 0.5 * exp_erfc(-b * x + a, (2.0 * b * t - x) / (2.0 * st));
                let second = 0.5 * exp_erfc(b * x + a, (x + 2.0 * b * t) / (2.0 * st));
                cf * (first + sign * second)
            })
            .sum());
    }
    let k = |y: f64| (heat_kernel(t, x - y) + sign * heat_kernel(t, x + y)) * f.eval(y);
    let tl = tol();
    let left = quad::integrate(k, 0.0, x, &tl)?;
    let right = quad::integrate_to_inf(k, x, t.sqrt(), &tl)?;
    Ok(left + right)
}

// ---------------------------------------------------------------------------
// Dirichlet resolvent

/// R^D_λ f(x) = ½∫(e^{−|x−y|√λ} − e^{−(x+y)√λ})/√λ · f(y) dy, λ ≥ 0.
/// At λ = 0 the kernel is y∧x.
pub fn dirichlet_resolvent(f: &SampledFunction, lambda: f64, x: f64) -> Result<f64> {
    if !(lambda >= 0.0) || x < 0.0 {
        return Err(Error::invalid("dirichlet_resolvent needs λ ≥ 0 and x ≥ 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = lambda.sqrt();
    if let Some(terms) = exp_terms(f) {
        if lambda > 0.0 || terms.iter().all(|&(cf, b)| b > 0.0 || cf == 0.0) {
            return Ok(terms.iter().map(|&(cf, b)| cf * rd_exp(b, c(s), x).re).sum());
        }
    }
    if lambda == 0.0 && !f.decays {
        return Err(Error::invalid("R^D at λ = 0 needs an integrable datum"));
    }
    // e^{−|x−y|s}(1 − e^{−2s·min(x,y)})/(2s), which tends to min(x,y) as s → 0.
    let kernel = |y: f64| {
        let m = x.min(y);
        let w = 2.0 * s * m;
        let frac = if w == 0.0 { m } else { -(-w).exp_m1() / (2.0 * s) };
        (-(x - y).abs() * s).exp() * frac * f.eval(y)
    };
    let tl = tol();
    let scale = if s > 0.0 { (1.0 / s).min(f.scale) } else { f.scale };
    let left = quad::integrate(kernel, 0.0, x, &tl)?;
    let right = quad::integrate_to_inf(kernel, x, scale, &tl)?;
    Ok(left + right)
}

/// (R^D_λ f)′(l) = ½∫[e^{−(l+y)s} − sgn(l−y)e^{−|l−y|s}]f(y)dy for general f.
fn rd_derivative(f: &SampledFunction, s: f64, l: f64, tl: &Tolerance) -> Result<f64> {
    let scale = (1.0 / s).min(f.scale.max(1e-3));
    let a = quad::integrate_to_inf(|y| (-s * (l + y)).exp() * f.eval(y), 0.0, scale, tl)?;
    let b = quad::integrate(|y| (-s * (l - y)).exp() * f.eval(y), 0.0, l, tl)?;
    let cc = quad::integrate_to_inf(|y| (-s * (y - l)).exp() * f.eval(y), l, scale, tl)?;
    Ok(0.5 * (a - b + cc))
}

/// N(λ) = d·(R^D f)′(0) + ∫(R^D f)′ Π̄, which is ∫R^D f dΠ with the drift term included.
/// Closed form on ℂ for exponential sums; real λ only otherwise.
fn levy_numerator(phi: &BernsteinSymbol, f: &SampledFunction, lambda: Complex64) -> Result<Complex64> {
    let s = lambda.sqrt();
    if let Some(terms) = exp_terms(f) {
        return Ok(terms.iter().map(|&(cf, b)| levy_term(phi, b, s) * cf).sum());
    }
    if lambda.im != 0.0 || !(lambda.re > 0.0) {
        return Err(Error::invalid("the general-datum resolvent is evaluated on the positive axis only"));
    }
    let s = s.re;
    // The real-axis inversion amplifies errors in V; integrate close to round-off.
    let tl = Tolerance::new(1e-15, 1e-13);
    let mut n = 0.0;
    if phi.drift() > 0.0 {
        n += rd_derivative(f, s, 0.0, &tl)? * phi.drift();
    }
    if !phi.is_identity() {
        let failed = std::cell::Cell::new(None);
        let g = |l: f64| match rd_derivative(f, s, l, &tl) {
            Ok(v) => v * phi.tail(l),
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        };
        let split = f.scale.max(0.1);
        let near = quad::estimate_from_zero(g, split, &tl);
        let far = quad::estimate_to_inf(g, split, split.min(1.0 / s), &tl);
        if let Some(e) = failed.take() {
            return Err(e);
        }
        n += near.into_result(&tl)? + far.into_result(&tl)?;
    }
    if let Some(k) = f.bound {
        let ceiling = k / lambda.re * phi.phi(s);
        if n.abs() > ceiling * (1.0 + 1e-6) + 1e-12 {
            return Err(Error::Consistency(format!(
                "Lévy integral {n} exceeds the ceiling {ceiling} at λ = {}",
                lambda.re
            )));
        }
    }
    Ok(c(n))
}

fn boundary_resolvent_complex(p: &Problem, lambda: Complex64) -> Result<Complex64> {
    let s = lambda.sqrt();
    let f0 = p.f.eval(0.0);
    let psi = p.psi.phi_complex(lambda);
    let num = levy_numerator(&p.phi, &p.f, lambda)?;
    Ok((psi * (p.eta * f0) / lambda + num) / (psi * p.eta + p.phi.phi_complex(s)))
}

fn boundary_resolvent_exact(p: &Problem, lambda: Complex64) -> Complex64 {
    boundary_resolvent_complex(p, lambda).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// V(λ) = ∫e^{−λt}υ(t,0)dt = (η/λ·Ψ(λ)f(0) + ∫R^D_λ f dΠ) / (ηΨ(λ) + Φ(√λ)).
pub fn resolvent_at_zero(
    f: &SampledFunction,
    lambda: f64,
    eta: f64,
    psi: &BernsteinSymbol,
    phi: &BernsteinSymbol,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::invalid(format!("resolvent needs λ > 0, got {lambda}")));
    }
    let p = Problem::new(phi.clone(), psi.clone(), eta, f.clone())?;
    boundary_resolvent(&p, lambda)
}

fn boundary_resolvent(p: &Problem, lambda: f64) -> Result<f64> {
    Ok(boundary_resolvent_complex(p, c(lambda))?.re)
}

// ---------------------------------------------------------------------------
// Solution υ(t,x)

/// υ(·,0) on (0, t_max]: exact inversion for exponential sums, otherwise a
/// spline in √s through Gaver–Stehfest values.
pub struct BoundaryCurve {
    problem: Problem,
    table: Option<CubicSpline>,
    t_max: f64,
    f0: f64,
    /// Largest inversion cross-check discrepancy seen while building.
    pub discrepancy: f64,
}

impl BoundaryCurve {
    pub fn new(p: &Problem, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::invalid("boundary curve needs a positive horizon"));
        }
        let f0 = p.f.eval(0.0);
        let mut curve = Self {
            problem: p.clone(),
            table: None,
            t_max,
            f0,
            discrepancy: 0.0,
        };
        if exp_terms(&p.f).is_some() {
            for s in [t_max, 0.5 * t_max] {
                let inv = curve.checked(s)?;
                curve.discrepancy = curve.discrepancy.max(inv.discrepancy);
                inv.into_result(s)?;
            }
        } else {
            use rayon::prelude::*;
            let n = 24;
            let u: Vec<f64> = (0..=n).map(|i| t_max.sqrt() * i as f64 / n as f64).collect();
            let pr = &curve.problem;
            let mut v: Vec<f64> = u[1..]
                .par_iter()
                .map(|&ui| gaver_stehfest(&|l| boundary_resolvent(pr, l).unwrap_or(f64::NAN), ui * ui, 14))
                .collect::<Result<_>>()?;
            if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                boundary_resolvent(pr, 1.0 / (u[bad + 1] * u[bad + 1]))?;
                return Err(Error::Consistency("boundary inversion produced a non-finite value".into()));
            }
            for s in [t_max, 0.25 * t_max] {
                let inv = curve.checked(s)?;
                curve.discrepancy = curve.discrepancy.max(inv.discrepancy);
                inv.into_result(s)?;
            }
            v.insert(0, f0);
            curve.table = Some(CubicSpline::extrapolated(u, v));
        }
        Ok(curve)
    }

    fn checked(&self, s: f64) -> Result<Inversion> {
        let p = &self.problem;
        let inv = if exp_terms(&p.f).is_some() {
            let f = TransformFunction::analytic(move |l: Complex64| boundary_resolvent_exact(p, l));
            invert_checked(&f, s, CROSS_CHECK_TOL)?
        } else {
            let f = TransformFunction::real(move |l| boundary_resolvent(p, l).unwrap_or(f64::NAN));
            invert_checked(&f, s, CROSS_CHECK_TOL)?
        };
        if !inv.value.is_finite() {
            boundary_resolvent(p, std::f64::consts::LN_2 / s)?;
        }
        Ok(inv)
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 1e-14 * self.t_max {
            return self.f0;
        }
        match &self.table {
            Some(sp) => sp.eval(s.min(self.t_max).sqrt()),
            None => talbot(
                &|l: Complex64| boundary_resolvent_exact(&self.problem, l),
                s,
                TALBOT_NODES,
            ),
        }
    }
}

/// Oracle value with its inversion diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: f64,
    pub error: f64,
}

/// υ(t,x) = Q^D_t f(x) + ∫₀^t (x/τ)g(τ,x)υ(t−τ,0)dτ.
pub fn solution_oracle(
    f: &SampledFunction,
    t: f64,
    x: f64,
    eta: f64,
    psi: &BernsteinSymbol,
    phi: &BernsteinSymbol,
) -> Result<OracleValue> {
    let p = Problem::new(phi.clone(), psi.clone(), eta, f.clone())?;
    let curve = BoundaryCurve::new(&p, t)?;
    solution_with_curve(&p, &curve, t, x)
}

/// Same as [`solution_oracle`] with a boundary curve reused across points.
pub fn solution_with_curve(p: &Problem, curve: &BoundaryCurve, t: f64, x: f64) -> Result<OracleValue> {
    if !(t > 0.0) || x < 0.0 || t > curve.t_max * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("solution needs 0 < t ≤ {} and x ≥ 0", curve.t_max)));
    }
    if x == 0.0 {
        return Ok(OracleValue {
            value: curve.eval(t),
            error: curve.discrepancy,
        });
    }
    let q = heat_half_line(&p.f, t, x, HalfLine::Dirichlet)?;
    // First cell: the kernel mass erfc(x/2√τ₁) against the midpoint boundary value.
    let tau1 = 1e-6 * t;
    let first = erfc(x / (2.0 * tau1.sqrt())) * curve.eval(t - 0.5 * tau1);
    let kernel = |tau: f64| x / tau * heat_kernel(tau, x) * curve.eval(t - tau);
    let est = quad::estimate(kernel, tau1, t, &Tolerance::new(1e-11, 1e-10));
    let conv = est.into_result(&Tolerance::new(1e-11, 1e-10))?;
    Ok(OracleValue {
        value: q + first + conv,
        error: curve.discrepancy + est.error,
    })
}

/// υ(t,x) by direct inversion of R^D_λ f(x) + e^{−x√λ}V(λ); exponential sums only.
pub fn solution_direct(p: &Problem, t: f64, x: f64) -> Result<Inversion> {
    let terms = exp_terms(&p.f)
        .ok_or_else(|| Error::invalid("direct inversion needs an exponential-sum datum"))?;
    let f = TransformFunction::analytic(move |l: Complex64| {
        let s = l.sqrt();
        let rd: Complex64 = terms.iter().map(|&(cf, b)| rd_exp(b, s, x) * cf).sum();
        rd + (-s * x).exp() * boundary_resolvent_exact(p, l)
    });
    invert_checked(&f, t, CROSS_CHECK_TOL)
}

// ---------------------------------------------------------------------------
// Densities

/// Density of the standard one-sided stable law, E e^{−λS} = e^{−λ^α}.
///
/// Small arguments use Zolotarev's integral over the Kanter angle, large ones
/// the convergent series in x^{−α}.
pub fn stable_density(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if alpha == 0.5 {
        return (-0.25 / x).exp() / (2.0 * PI.sqrt() * x.powf(1.5));
    }
    let z = x.powf(-alpha);
    if z < 0.1 {
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            let mag = (ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0) + kf * z.ln()).exp();
            let term = mag * (PI * alpha * kf).sin();
            sum += if k % 2 == 1 { term } else { -term };
            if mag < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum / (PI * x);
    }
    let k = alpha / (1.0 - alpha);
    let lx = x.ln();
    let c = (-k * lx).exp();
    let ln_a = |u: f64| {
        k * (alpha * u).sin().ln() + ((1.0 - alpha) * u).sin().ln() - u.sin().ln() / (1.0 - alpha)
    };
    // A·e^{−A·c} peaks at 1/(e·c).
    let peak = 1.0 / (std::f64::consts::E * c);
    let tl = Tolerance { abs: 1e-15 * peak, rel: 1e-12, max_segments: 4000 };
    let integral = quad::estimate(
        |u: f64| {
            let la = ln_a(u);
            let v = (la - la.exp() * c).exp();
            if v.is_finite() { v } else { 0.0 }
        },
        0.0,
        PI,
        &tl,
    )
    .value;
    k * c / x / PI * integral
}

/// h(t,x): density of H_t. Exact representations where known, otherwise
/// inversion of e^{−tΦ(λ)} in x.
pub fn density_h(sym: &BernsteinSymbol, t: f64, x: f64) -> Result<f64> {
    density_h_checked(sym, t, x)?.into_result(x)
}

/// Whether the fixed Talbot contour is safe for e^{−tΦ}: Φ must not grow
/// along the left half of the contour.
fn talbot_safe(sym: &BernsteinSymbol) -> bool {
    match *sym.kind() {
        SymbolKind::Stable { alpha } | SymbolKind::Tempered { alpha, .. } => alpha <= 0.5,
        _ => true,
    }
}

fn cross_check(value: f64, f: &TransformFunction<'_>, at: f64, safe: bool) -> Result<Inversion> {
    let other = if safe {
        invert_laplace_method(f, at, Method::TALBOT_DEFAULT)?
    } else {
        invert_laplace_method(f, at, Method::GS_DEFAULT)?
    };
    let discrepancy = (value - other).abs();
    Ok(Inversion {
        value,
        discrepancy,
        reliable: value.is_finite() && discrepancy <= CROSS_CHECK_TOL * (1.0 + value.abs()),
    })
}

fn invert_laplace_method(f: &TransformFunction<'_>, at: f64, m: Method) -> Result<f64> {
    super::inversion::invert_laplace(f, at, m)
}

pub fn density_h_checked(sym: &BernsteinSymbol, t: f64, x: f64) -> Result<Inversion> {
    check_density_args(sym, t)?;
    if x <= 0.0 {
        return Ok(Inversion { value: 0.0, discrepancy: 0.0, reliable: true });
    }
    let s = sym.clone();
    let f = TransformFunction::analytic(move |l: Complex64| (-s.phi_complex(l) * t).exp());
    match h_closed_form(sym, t, x) {
        Some(v) => cross_check(v, &f, x, talbot_safe(sym)),
        None => invert_checked(&f, x, CROSS_CHECK_TOL),
    }
}

/// l(t,x): density of L_t, from the stable representation or by inverting
/// Φ(λ)/λ·e^{−xΦ(λ)} in t.
pub fn density_l(sym: &BernsteinSymbol, t: f64, x: f64) -> Result<f64> {
    density_l_checked(sym, t, x)?.into_result(t)
}

pub fn density_l_checked(sym: &BernsteinSymbol, t: f64, x: f64) -> Result<Inversion> {
    check_density_args(sym, t)?;
    if x < 0.0 {
        return Ok(Inversion { value: 0.0, discrepancy: 0.0, reliable: true });
    }
    let s = sym.clone();
    let f = TransformFunction::analytic(move |l: Complex64| {
        let p = s.phi_complex(l);
        p / l * (-p * x).exp()
    });
    match l_closed_form(sym, t, x) {
        Some(v) => cross_check(v, &f, t, talbot_safe(sym)),
        None if talbot_safe(sym) => invert_checked(&f, t, CROSS_CHECK_TOL),
        None => invert_checked_with(&f, t, CROSS_CHECK_TOL, Method::GS_DEFAULT, Method::GaverStehfest(12)),
    }
}

fn check_density_args(sym: &BernsteinSymbol, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("density needs t > 0, got {t}")));
    }
    if sym.is_identity() {
        return Err(Error::invalid("pure drift has no density"));
    }
    Ok(())
}

fn h_closed_form(sym: &BernsteinSymbol, t: f64, x: f64) -> Option<f64> {
    if x <= 0.0 {
        return Some(0.0);
    }
    match *sym.kind() {
        SymbolKind::Stable { alpha } => {
            let sc = t.powf(1.0 / alpha);
            Some(stable_density(alpha, x / sc) / sc)
        }
        SymbolKind::Tempered { alpha, theta } => {
            let sc = t.powf(1.0 / alpha);
            Some((t * theta.powf(alpha) - theta * x).exp() * stable_density(alpha, x / sc) / sc)
        }
        SymbolKind::Gamma { a, b } => {
            let k = a * t;
            Some((k * b.ln() + (k - 1.0) * x.ln() - b * x - ln_gamma(k)).exp())
        }
        _ => None,
    }
}

/// From P(L_t ≤ x) = P(S ≥ t·x^{−1/α}) for the stable case.
fn l_closed_form(sym: &BernsteinSymbol, t: f64, x: f64) -> Option<f64> {
    match *sym.kind() {
        SymbolKind::Stable { alpha } => {
            if x < 0.0 {
                Some(0.0)
            } else if x == 0.0 {
                Some(t.powf(-alpha) / gamma(1.0 - alpha))
            } else {
                let y = t * x.powf(-1.0 / alpha);
                Some(t / alpha * x.powf(-1.0 / alpha - 1.0) * stable_density(alpha, y))
            }
        }
        _ => None,
    }
}

/// h(t,x) without the cross-check, for inner loops.
pub(crate) fn h_fast(sym: &BernsteinSymbol, t: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if let Some(v) = h_closed_form(sym, t, x) {
        return v;
    }
    talbot(&|l: Complex64| (-sym.phi_complex(l) * t).exp(), x, TALBOT_NODES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedForm,
    Inverted,
}

/// A density tabulated on a grid.
#[derive(Debug, Clone)]
pub struct DensityOracle {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub method: OracleMethod,
    pub error: f64,
}

impl DensityOracle {
    pub fn mass(&self) -> f64 {
        quad::trapezoid(&self.grid, &self.values)
    }

    pub fn write_csv(&self, w: impl Write, abscissa: &str) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([abscissa, "value", "error"])?;
        for ((x, v), e) in self.grid.iter().zip(&self.values).zip(&self.errors) {
            wr.write_record([x.to_string(), v.to_string(), e.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

type Cache = RwLock<HashMap<String, Arc<DensityOracle>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cache_key(tag: &str, sym: &BernsteinSymbol, at: f64, grid: &[f64]) -> Option<String> {
    if matches!(sym.kind(), SymbolKind::Custom(_)) {
        return None;
    }
    let mut h = DefaultHasher::new();
    for g in grid {
        g.to_bits().hash(&mut h);
    }
    Some(format!("{tag}|{}|{:x}|{:x}", sym.name(), at.to_bits(), h.finish()))
}

fn tabulate(
    tag: &str,
    sym: &BernsteinSymbol,
    at: f64,
    grid: &[f64],
    point: impl Fn(f64) -> Result<Inversion> + Sync,
    closed: bool,
) -> Result<Arc<DensityOracle>> {
    let key = cache_key(tag, sym, at, grid);
    if let Some(k) = &key {
        if let Some(hit) = cache().read().expect("density cache poisoned").get(k) {
            return Ok(hit.clone());
        }
    }
    use rayon::prelude::*;
    let pts: Vec<Inversion> = grid.par_iter().map(|&x| point(x)).collect::<Result<_>>()?;
    let oracle = Arc::new(DensityOracle {
        grid: grid.to_vec(),
        values: pts.iter().map(|p| p.value).collect(),
        errors: pts.iter().map(|p| p.discrepancy).collect(),
        method: if closed { OracleMethod::ClosedForm } else { OracleMethod::Inverted },
        error: pts.iter().map(|p| p.discrepancy).fold(0.0, f64::max),
    });
    if let Some(k) = key {
        cache()
            .write()
            .expect("density cache poisoned")
            .entry(k)
            .or_insert_with(|| oracle.clone());
    }
    Ok(oracle)
}

/// h(t,·) on a grid; closed forms when known, otherwise checked inversion.
pub fn tabulate_h(sym: &BernsteinSymbol, t: f64, grid: &[f64]) -> Result<Arc<DensityOracle>> {
    check_density_args(sym, t)?;
    let closed = h_closed_form(sym, t, 1.0).is_some();
    tabulate(
        "h",
        sym,
        t,
        grid,
        |x| {
            if let (true, Some(v)) = (closed, h_closed_form(sym, t, x)) {
                return Ok(Inversion { value: v, discrepancy: 0.0, reliable: true });
            }
            let inv = density_h_checked(sym, t, x)?;
            inv.into_result(x)?;
            Ok(inv)
        },
        closed,
    )
}

/// l(t,·) on a grid of x values.
pub fn tabulate_l(sym: &BernsteinSymbol, t: f64, grid: &[f64]) -> Result<Arc<DensityOracle>> {
    check_density_args(sym, t)?;
    let closed = l_closed_form(sym, t, 1.0).is_some();
    tabulate(
        "l",
        sym,
        t,
        grid,
        |x| {
            if let (true, Some(v)) = (closed, l_closed_form(sym, t, x)) {
                return Ok(Inversion { value: v, discrepancy: 0.0, reliable: true });
            }
            let inv = density_l_checked(sym, t, x)?;
            inv.into_result(t)?;
            Ok(inv)
        },
        closed,
    )
}

/// ∫h(t,x)dx over (lo, hi) on a logarithmic scale.
pub fn density_h_mass(sym: &BernsteinSymbol, t: f64, lo: f64, hi: f64) -> Result<f64> {
    check_density_args(sym, t)?;
    let tl = Tolerance::new(1e-9, 1e-9);
    quad::estimate_log(|x| h_fast(sym, t, x), lo, hi, &tl).into_result(&tl)
}

// ---------------------------------------------------------------------------
// Convolutions with the densities

/// h_f(t,x) = ∫₀^x f(x−y)h(t,y)dy = E[f(x − H_t); H_t < x].
pub fn h_convolution(sym: &BernsteinSymbol, f: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let tl = Tolerance::new(1e-11, 1e-9);
    quad::integrate_from_zero(|y| f.eval(x - y) * h_fast(sym, t, y), x, &tl)
}

/// l_f(t,x) = ∫₀^x f(x−y)l(t,y)dy via its time transform Φ(λ)/λ ∫₀^x f(x−y)e^{−yΦ(λ)}dy.
pub fn l_convolution(sym: &BernsteinSymbol, f: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let tl = Tolerance::new(1e-12, 1e-10);
    let transform = |l: Complex64| {
        let p = sym.phi_complex(l);
        let inner: Complex64 = quad::estimate(|y| (-p * y).exp() * f.eval(x - y), 0.0, x, &tl).value;
        p / l * inner
    };
    Ok(talbot(&transform, t, TALBOT_NODES))
}

// ---------------------------------------------------------------------------
// Elliptic resolvents

/// Potential density u_λ(z) = ∫e^{−λt}h(t,z)dt, inverse transform of 1/(λ + Φ(ξ)).
pub fn potential_density(sym: &BernsteinSymbol, lambda: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    match *sym.kind() {
        SymbolKind::Stable { alpha } if lambda == 0.0 => z.powf(alpha - 1.0) / gamma(alpha),
        SymbolKind::Identity => (-lambda * z).exp(),
        _ => talbot(&|xi: Complex64| 1.0 / (sym.phi_complex(xi) + lambda), z, TALBOT_NODES),
    }
}

/// w₋(x) = ∫₀^∞ u_λ(z)f(x+z)dz.
pub fn elliptic_minus(f: &SampledFunction, lambda: f64, x: f64, sym: &BernsteinSymbol) -> Result<f64> {
    check_elliptic(f, lambda, x, sym)?;
    if f.is_zero_exp_sum() {
        return Ok(0.0);
    }
    if lambda == 0.0 && !f.decays {
        return Err(Error::invalid("w₋ at λ = 0 needs a decaying datum"));
    }
    let tl = Tolerance::new(1e-10, 1e-9);
    let g = |z: f64| potential_density(sym, lambda, z) * f.eval(x + z);
    let first = f.eval(x) * potential_mass(sym, lambda, FIRST_CELL);
    let near = quad::estimate_log(g, FIRST_CELL, 1.0, &tl).into_result(&tl)?;
    let scale = if lambda > 0.0 { f.scale.min(1.0 / lambda) } else { f.scale };
    Ok(first + near + quad::estimate_to_inf(g, 1.0, scale, &tl).into_result(&tl)?)
}

/// w₊(x) = ∫₀^x u_λ(z)f(x−z)dz.
pub fn elliptic_plus(f: &SampledFunction, lambda: f64, x: f64, sym: &BernsteinSymbol) -> Result<f64> {
    check_elliptic(f, lambda, x, sym)?;
    if f.is_zero_exp_sum() || x == 0.0 {
        return Ok(0.0);
    }
    let tl = Tolerance::new(1e-10, 1e-9);
    let eps = FIRST_CELL.min(0.5 * x);
    let first = f.eval(x) * potential_mass(sym, lambda, eps);
    let g = |z: f64| potential_density(sym, lambda, z) * f.eval(x - z);
    Ok(first + quad::estimate_log(g, eps, x, &tl).into_result(&tl)?)
}

/// Cell (0, ε) of the potential integrals, where u_λ may carry mass at every
/// scale (1/(z·ln²z) for Gamma symbols).
const FIRST_CELL: f64 = 1e-10;

/// U_λ(ε) = ∫₀^ε u_λ(z)dz, inverse transform of 1/(ξ(λ + Φ(ξ))).
pub fn potential_mass(sym: &BernsteinSymbol, lambda: f64, eps: f64) -> f64 {
    match *sym.kind() {
        SymbolKind::Stable { alpha } if lambda == 0.0 => eps.powf(alpha) / gamma(1.0 + alpha),
        _ => talbot(&|xi: Complex64| 1.0 / (xi * (sym.phi_complex(xi) + lambda)), eps, TALBOT_NODES),
    }
}

fn check_elliptic(f: &SampledFunction, lambda: f64, x: f64, sym: &BernsteinSymbol) -> Result<()> {
    if !(lambda >= 0.0) || x < 0.0 {
        return Err(Error::invalid("elliptic resolvents need λ ≥ 0 and x ≥ 0"));
    }
    if sym.is_identity() && !f.is_zero_exp_sum() {
        return Err(Error::invalid("elliptic resolvents need a symbol with jumps"));
    }
    Ok(())
}

/// (w₋(x), w₊(x)).
pub fn elliptic_resolvents(
    f: &SampledFunction,
    lambda: f64,
    x: f64,
    sym: &BernsteinSymbol,
) -> Result<(f64, f64)> {
    Ok((elliptic_minus(f, lambda, x, sym)?, elliptic_plus(f, lambda, x, sym)?))
}

/// ∫₀^∞ P(H_x > t)dt = E[H_x], with P(H_x > t) from inverting (1 − e^{−xΦ(λ)})/λ.
pub fn mean_occupation(sym: &BernsteinSymbol, x: f64) -> Result<f64> {
    let tl = Tolerance::new(1e-8, 1e-8);
    let surv = |t: f64| {
        talbot(
            &|l: Complex64| crate::symbols::one_minus_exp(-sym.phi_complex(l) * x) / l,
            t,
            TALBOT_NODES,
        )
    };
    let scale = x * sym.mean_coefficient().max(1e-3);
    let near = quad::estimate_from_zero(surv, scale, &tl).into_result(&tl)?;
    let far = quad::estimate_to_inf(surv, scale, scale, &tl).into_result(&tl)?;
    Ok(near + far)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stable(a: f64) -> BernsteinSymbol {
        BernsteinSymbol::stable(a).unwrap()
    }

    #[test]
    fn stable_half_density_at_one() {
        let v = density_h(&stable(0.5), 1.0, 1.0).unwrap();
        let e = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        assert!((e - 0.219_696).abs() < 1e-6);
        assert_eq!(density_h(&stable(0.5), 1.0, -0.3).unwrap(), 0.0);
        assert_eq!(density_h(&stable(0.5), 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_density_matches_inversion() {
        let g = BernsteinSymbol::gamma(2.0, 1.5).unwrap();
        for &x in &[0.2, 1.0, 3.0] {
            let inv = density_h_checked(&g, 1.3, x).unwrap();
            assert!(inv.reliable && inv.discrepancy < 1e-7, "x={x}: {inv:?}");
        }
    }

    #[test]
    fn densities_have_unit_mass() {
        for sym in [stable(0.5), stable(0.8), BernsteinSymbol::tempered(0.5, 1.0).unwrap()] {
            let m = density_h_mass(&sym, 1.0, 1e-6, 1e12).unwrap();
            let tail = if sym.stable_index() == Some(0.5) { 1.0 / (PI * 1e12).sqrt() } else { 0.0 };
            assert!((m + tail - 1.0).abs() < 1e-4, "{}: {m}", sym.name());
        }
    }

    #[test]
    fn l_density_closed_form_and_mass() {
        let s = stable(0.5);
        let inv = density_l_checked(&s, 0.7, 0.4).unwrap();
        assert!(inv.reliable && inv.discrepancy < 1e-8, "{inv:?}");
        let g = BernsteinSymbol::gamma(1.0, 1.0).unwrap();
        let tab = tabulate_l(&g, 1.0, &crate::num::linspace(0.0, 30.0, 3001)).unwrap();
        assert_eq!(tab.method, OracleMethod::Inverted);
        assert!((tab.mass() - 1.0).abs() < 1e-4, "{}", tab.mass());
        assert!(tab.values.iter().all(|&v| v > -1e-6));
    }

    #[test]
    fn tabulation_is_cached() {
        let s = stable(0.6);
        let grid = crate::num::linspace(0.05, 5.0, 50);
        let a = tabulate_h(&s, 0.8, &grid).unwrap();
        let b = tabulate_h(&s, 0.8, &grid).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let mut buf = Vec::new();
        a.write_csv(&mut buf, "x").unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,value,error\n"));
    }

    #[test]
    fn dirichlet_resolvent_examples() {
        let one = SampledFunction::constant(1.0);
        let v = dirichlet_resolvent(&one, 1.0, 1.0).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-14);
        assert_eq!(dirichlet_resolvent(&one, 1.0, 0.0).unwrap(), 0.0);
        // Quadrature path against the closed form.
        let e = SampledFunction::new(|y| (-y).exp()).bounded(1.0).decaying();
        let closed = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        for &(l, x) in &[(0.5, 0.3), (1.0, 1.0), (4.0, 2.0), (1.0, 1e-3)] {
            let a = dirichlet_resolvent(&e, l, x).unwrap();
            let b = dirichlet_resolvent(&closed, l, x).unwrap();
            assert!((a - b).abs() < 1e-10, "λ={l} x={x}: {a} vs {b}");
        }
        // λ = 0: ∫(y∧x)e^{−y}dy = 1 − e^{−1} at x = 1.
        let z = dirichlet_resolvent(&e, 0.0, 1.0).unwrap();
        assert!((z - (1.0 - (-1f64).exp())).abs() < 1e-10, "{z}");
        assert!((dirichlet_resolvent(&closed, 0.0, 1.0).unwrap() - z).abs() < 1e-12);
    }

    #[test]
    fn resolvent_of_constant_is_one_over_lambda() {
        let one = SampledFunction::constant(1.0);
        for (phi, psi) in [
            (stable(0.5), stable(0.5)),
            (BernsteinSymbol::gamma(1.0, 1.0).unwrap(), BernsteinSymbol::identity()),
            (BernsteinSymbol::identity(), BernsteinSymbol::gamma(1.0, 2.0).unwrap()),
        ] {
            for eta in [0.0, 1.0] {
                for l in [0.3, 1.0, 5.0] {
                    let v = resolvent_at_zero(&one, l, eta, &psi, &phi).unwrap();
                    assert!((v - 1.0 / l).abs() < 1e-12 / l, "{v}");
                }
            }
        }
    }

    #[test]
    fn near_identity_resolvent_is_neumann() {
        let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let v = resolvent_at_zero(&f, 1.0, 0.0, &stable(0.5), &stable(0.999)).unwrap();
        assert!((v - 0.5).abs() < 0.01 * 0.5, "{v}");
    }

    #[test]
    fn general_resolvent_matches_closed_form() {
        let closed = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let general = SampledFunction::new(|y| (-y).exp()).bounded(1.0).decaying();
        for phi in [stable(0.5), BernsteinSymbol::gamma(1.0, 1.0).unwrap(), BernsteinSymbol::identity()] {
            for l in [0.5, 2.0] {
                let a = resolvent_at_zero(&closed, l, 1.0, &stable(0.5), &phi).unwrap();
                let b = resolvent_at_zero(&general, l, 1.0, &stable(0.5), &phi).unwrap();
                assert!((a - b).abs() < 1e-7, "{} λ={l}: {a} vs {b}", phi.name());
            }
        }
    }

    #[test]
    fn constant_solution_is_preserved() {
        let one = SampledFunction::constant(1.0);
        for (phi, psi, eta) in [
            (stable(0.5), stable(0.5), 1.0),
            (BernsteinSymbol::tempered(0.5, 1.0).unwrap(), BernsteinSymbol::identity(), 0.0),
        ] {
            for &(t, x) in &[(0.25, 0.0), (0.5, 0.5), (1.0, 1.0)] {
                let v = solution_oracle(&one, t, x, eta, &psi, &phi).unwrap();
                assert!((v.value - 1.0).abs() < 1e-9, "t={t} x={x}: {}", v.value);
            }
        }
    }

    #[test]
    fn convolution_matches_direct_inversion() {
        let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let p = Problem::new(stable(0.5), stable(0.5), 1.0, f).unwrap();
        let curve = BoundaryCurve::new(&p, 1.0).unwrap();
        for &(t, x) in &[(1.0, 0.5), (1.0, 1.0), (1.0, 2.0)] {
            let a = solution_with_curve(&p, &curve, t, x).unwrap().value;
            let b = solution_direct(&p, t, x).unwrap();
            assert!(b.reliable);
            assert!((a - b.value).abs() < 1e-8, "x={x}: {a} vs {}", b.value);
        }
    }

    #[test]
    fn limits_reduce_to_neumann_and_dirichlet() {
        let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let id = BernsteinSymbol::identity();
        for &x in &[0.0, 0.5, 1.0] {
            let n = solution_oracle(&f, 0.5, x, 0.0, &id, &id).unwrap().value;
            let e = heat_half_line(&f, 0.5, x.max(1e-300), HalfLine::Neumann).unwrap();
            assert!((n - e).abs() < 1e-8, "x={x}: {n} vs {e}");
        }
        let d = heat_half_line(&f, 0.5, 1.0, HalfLine::Dirichlet).unwrap();
        let general = SampledFunction::new(|y| (-y).exp());
        let dq = heat_half_line(&general, 0.5, 1.0, HalfLine::Dirichlet).unwrap();
        assert!((d - dq).abs() < 1e-10);
    }

    #[test]
    fn general_datum_uses_tabulated_boundary() {
        let closed = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let general = SampledFunction::new(|y| (-y).exp()).bounded(1.0).decaying();
        let phi = stable(0.5);
        let id = BernsteinSymbol::identity();
        let a = solution_oracle(&closed, 0.5, 0.5, 0.0, &id, &phi).unwrap().value;
        let b = solution_oracle(&general, 0.5, 0.5, 0.0, &id, &phi).unwrap().value;
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn elliptic_examples() {
        let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
        let (wm, _) = elliptic_resolvents(&f, 1.0, 1.0, &stable(0.5)).unwrap();
        assert!((wm - (-1f64).exp() / 2.0).abs() < 1e-7, "{wm}");
        let zero = SampledFunction::exp_sum(vec![(0.0, 1.0)]);
        assert_eq!(elliptic_resolvents(&zero, 1.0, 1.0, &stable(0.5)).unwrap(), (0.0, 0.0));
        let one = SampledFunction::constant(1.0);
        let wp = elliptic_plus(&one, 0.0, 1.0, &stable(0.5)).unwrap();
        assert!((wp - 1.0 / gamma(1.5)).abs() < 1e-9, "{wp}");
        assert!((1.0 / gamma(1.5) - 1.128_379).abs() < 1e-6);
        // Gamma symbol: w₋ for e^{−y} is e^{−x}/(λ + Φ(1)).
        let g = BernsteinSymbol::gamma(1.0, 1.0).unwrap();
        let (wm, _) = elliptic_resolvents(&f, 0.5, 0.7, &g).unwrap();
        let e = (-0.7f64).exp() / (0.5 + g.phi(1.0));
        assert!((wm - e).abs() < 1e-7, "{wm} vs {e}");
    }

    #[test]
    fn gamma_mean_occupation() {
        let g = BernsteinSymbol::gamma(2.0, 3.0).unwrap();
        for &x in &[0.5, 2.0] {
            let m = mean_occupation(&g, x).unwrap();
            assert!((m - x * 2.0 / 3.0).abs() < 1e-6, "{m}");
        }
    }
}

//! Bernstein symbols: Laplace exponents of subordinators with their Lévy
//! densities, tails and moment functions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{e1, gamma, gamma_p, gamma_q};
use crate::quad::{self, Tolerance};

/// Lévy density callback for user-supplied measures.
pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct CustomMeasure {
    density: Density,
    /// ∫(1∧z)π(dz), computed at construction.
    pub integrability: f64,
    /// Finite total mass: accepted, but the inverse subordinator then has flat stretches.
    pub finite_activity: bool,
}

#[derive(Clone)]
pub enum SymbolKind {
    Stable { alpha: f64 },
    Gamma { a: f64, b: f64 },
    Tempered { alpha: f64, theta: f64 },
    Identity,
    Custom(CustomMeasure),
}

#[derive(Clone)]
pub struct BernsteinSymbol {
    kind: SymbolKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    Delayed,
    Rushed,
    Base,
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundaryClass::Delayed => "Delayed",
            BoundaryClass::Rushed => "Rushed",
            BoundaryClass::Base => "Base",
        };
        f.write_str(s)
    }
}

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11)
}

impl BernsteinSymbol {
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("stable index must lie in (0,1), got {alpha}")));
        }
        Ok(Self { kind: SymbolKind::Stable { alpha } })
    }

    pub fn gamma(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("gamma parameters must be positive, got a={a}, b={b}")));
        }
        Ok(Self { kind: SymbolKind::Gamma { a, b } })
    }

    pub fn tempered(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("tempered index must lie in (0,1), got {alpha}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::invalid(format!("tempering must be positive, got {theta}")));
        }
        Ok(Self { kind: SymbolKind::Tempered { alpha, theta } })
    }

    pub fn identity() -> Self {
        Self { kind: SymbolKind::Identity }
    }

    /// Symbol from a Lévy density on (0,∞). Rejects measures with
    /// ∫(1∧z)π(dz) = ∞; finite-activity measures are kept but flagged.
    pub fn custom(density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let density: Density = Arc::new(density);
        let tol = quad_tol();
        let near = quad::estimate_from_zero(|z| z * density(z), 1.0, &tol);
        let far = quad::estimate_to_inf(|z| density(z), 1.0, 1.0, &tol);
        if !near.converged || !far.converged || !(near.value + far.value).is_finite() {
            return Err(Error::invalid(format!(
                "Lévy density fails ∫(1∧z)π(dz) < ∞ (quadrature error {:.3e})",
                near.error + far.error
            )));
        }
        if (0..8).map(|k| density(10f64.powi(-k))).any(|v| v < 0.0 || !v.is_finite()) {
            return Err(Error::invalid("Lévy density must be nonnegative and finite on (0,∞)"));
        }
        // Mass of (e^{-40}, 1] against (e^{-20}, 1]: a finite measure stops growing.
        let mass = |lo: f64| quad::estimate_log(|z| density(z), lo, 1.0, &tol).value;
        let m20 = mass((-20f64).exp());
        let m40 = mass((-40f64).exp());
        let finite_activity = m40 - m20 <= 1e-6 * (1.0 + m20);
        Ok(Self {
            kind: SymbolKind::Custom(CustomMeasure {
                density,
                integrability: near.value + far.value,
                finite_activity,
            }),
        })
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, SymbolKind::Identity)
    }

    pub fn drift(&self) -> f64 {
        if self.is_identity() {
            1.0
        } else {
            0.0
        }
    }

    pub fn kill(&self) -> f64 {
        0.0
    }

    /// Infinite Lévy measure (strictly increasing subordinator).
    pub fn infinite_activity(&self) -> bool {
        match &self.kind {
            SymbolKind::Identity => false,
            SymbolKind::Custom(c) => !c.finite_activity,
            _ => true,
        }
    }

    /// Stable index when the symbol is stable.
    pub fn stable_index(&self) -> Option<f64> {
        match self.kind {
            SymbolKind::Stable { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Φ(λ), closed form where available.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(Error::invalid(format!("symbol argument must be nonnegative, got {lambda}")));
        }
        Ok(match self.kind {
            SymbolKind::Stable { alpha } => lambda.powf(alpha),
            SymbolKind::Gamma { a, b } => a * (lambda / b).ln_1p(),
            SymbolKind::Tempered { alpha, theta } => (lambda + theta).powf(alpha) - theta.powf(alpha),
            SymbolKind::Identity => lambda,
            SymbolKind::Custom(_) => return self.levy_khintchine(lambda),
        })
    }

    /// Infallible evaluation; custom symbols fall back to the best quadrature estimate.
    pub fn phi(&self, lambda: f64) -> f64 {
        match &self.kind {
            SymbolKind::Custom(c) => {
                if lambda == 0.0 {
                    return 0.0;
                }
                lk_estimate(&c.density, lambda).0
            }
            _ => self.eval(lambda).unwrap_or(f64::NAN),
        }
    }

    /// d·λ + ∫(1 − e^{−λz})π(dz) by quadrature, for any kind.
    pub fn levy_khintchine(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 || self.is_identity() {
            return Ok(self.drift() * lambda);
        }
        let dens = self.density_fn();
        let (v, err, ok) = lk_estimate(&dens, lambda);
        if ok {
            Ok(v)
        } else {
            Err(Error::Quadrature {
                achieved: err,
                requested: quad_tol().abs.max(quad_tol().rel * v.abs()),
            })
        }
    }

    fn density_fn(&self) -> Density {
        match &self.kind {
            SymbolKind::Custom(c) => c.density.clone(),
            _ => {
                let s = self.clone();
                Arc::new(move |z| s.levy_density(z))
            }
        }
    }

    /// Φ'(λ).
    pub fn phi_prime(&self, lambda: f64) -> f64 {
        match &self.kind {
            SymbolKind::Stable { alpha } => alpha * lambda.powf(alpha - 1.0),
            SymbolKind::Gamma { a, b } => a / (b + lambda),
            SymbolKind::Tempered { alpha, theta } => alpha * (lambda + theta).powf(alpha - 1.0),
            SymbolKind::Identity => 1.0,
            SymbolKind::Custom(c) => {
                let tol = quad_tol();
                let d = &c.density;
                quad::estimate_from_zero(|z| z * (-lambda * z).exp() * d(z), 1.0, &tol).value
                    + quad::estimate_to_inf(|z| z * (-lambda * z).exp() * d(z), 1.0, 1.0, &tol).value
            }
        }
    }

    /// Analytic continuation of Φ to the cut plane ℂ \ (−∞, 0].
    pub fn phi_complex(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            SymbolKind::Stable { alpha } => z.powf(*alpha),
            SymbolKind::Gamma { a, b } => (Complex64::new(1.0, 0.0) + z / *b).ln() * *a,
            SymbolKind::Tempered { alpha, theta } => {
                (z + *theta).powf(*alpha) - Complex64::new(theta.powf(*alpha), 0.0)
            }
            SymbolKind::Identity => z,
            SymbolKind::Custom(c) => {
                let tol = quad_tol();
                let d = &c.density;
                let g = |y: f64| one_minus_exp(-z * y) * d(y);
                quad::estimate_from_zero(g, 1.0, &tol).value
                    + quad::estimate_to_inf(g, 1.0, 1.0, &tol).value
            }
        }
    }

    /// Lévy density π(z).
    pub fn levy_density(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            SymbolKind::Stable { alpha } => alpha / gamma(1.0 - alpha) * z.powf(-alpha - 1.0),
            SymbolKind::Gamma { a, b } => a * (-b * z).exp() / z,
            SymbolKind::Tempered { alpha, theta } => {
                alpha / gamma(1.0 - alpha) * z.powf(-alpha - 1.0) * (-theta * z).exp()
            }
            SymbolKind::Identity => 0.0,
            SymbolKind::Custom(c) => (c.density)(z),
        }
    }

    /// Π̄(z) = κ + Π((z, ∞)).
    pub fn tail(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return if self.is_identity() { 0.0 } else { f64::INFINITY };
        }
        match &self.kind {
            SymbolKind::Stable { alpha } => z.powf(-alpha) / gamma(1.0 - alpha),
            SymbolKind::Gamma { a, b } => a * e1(b * z),
            SymbolKind::Tempered { alpha, theta } => {
                if theta * z > 20.0 {
                    let d = self.density_fn();
                    quad::estimate_to_inf(|y| d(y), z, 1.0 / theta, &quad_tol()).value
                } else {
                    z.powf(-alpha) * (-theta * z).exp() / gamma(1.0 - alpha)
                        - theta.powf(*alpha) * gamma_q(1.0 - alpha, theta * z)
                }
            }
            SymbolKind::Identity => 0.0,
            SymbolKind::Custom(c) => {
                let d = &c.density;
                quad::estimate_to_inf(|y| d(y), z, z, &quad_tol()).value
            }
        }
    }

    /// ∫₀^δ zπ(dz).
    pub fn m1(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            SymbolKind::Stable { alpha } => alpha * delta.powf(1.0 - alpha) / gamma(2.0 - alpha),
            SymbolKind::Gamma { a, b } => -a * (-b * delta).exp_m1() / b,
            SymbolKind::Tempered { alpha, theta } => {
                alpha * theta.powf(alpha - 1.0) * gamma_p(1.0 - alpha, theta * delta)
            }
            SymbolKind::Identity => 0.0,
            SymbolKind::Custom(c) => {
                let d = &c.density;
                quad::estimate_from_zero(|z| z * d(z), delta, &quad_tol()).value
            }
        }
    }

    /// ∫₀^δ z²π(dz).
    pub fn m2(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            SymbolKind::Stable { alpha } => {
                alpha * delta.powf(2.0 - alpha) / ((2.0 - alpha) * gamma(1.0 - alpha))
            }
            SymbolKind::Gamma { a, b } => {
                let x = b * delta;
                // 1 − e^{−x}(1+x), series for small x.
                let s = if x < 1e-3 {
                    x * x / 2.0 - x * x * x / 3.0 + x.powi(4) / 8.0
                } else {
                    1.0 - (-x).exp() * (1.0 + x)
                };
                a * s / (b * b)
            }
            SymbolKind::Tempered { alpha, theta } => {
                alpha * (1.0 - alpha) * theta.powf(alpha - 2.0) * gamma_p(2.0 - alpha, theta * delta)
            }
            SymbolKind::Identity => 0.0,
            SymbolKind::Custom(c) => {
                let d = &c.density;
                quad::estimate_from_zero(|z| z * z * d(z), delta, &quad_tol()).value
            }
        }
    }

    /// Integrated tail I(z) = ∫₀^z Π̄(y) dy = ∫(y∧z)π(dy).
    pub fn integrated_tail(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            SymbolKind::Stable { alpha } => z.powf(1.0 - alpha) / gamma(2.0 - alpha),
            SymbolKind::Gamma { a, b } => a * (z * e1(b * z) - (-b * z).exp_m1() / b),
            SymbolKind::Identity => 0.0,
            _ => self.m1(z) + z * self.tail(z),
        }
    }

    /// ∫₀^δ zΠ̄(z) dz.
    pub fn j1(&self, delta: f64) -> f64 {
        if delta <= 0.0 || self.is_identity() {
            return 0.0;
        }
        0.5 * (self.m2(delta) + delta * delta * self.tail(delta))
    }

    /// c = lim_{λ↓0} Φ(λ)/λ, possibly +∞.
    pub fn mean_coefficient(&self) -> f64 {
        match &self.kind {
            SymbolKind::Stable { .. } => f64::INFINITY,
            SymbolKind::Gamma { a, b } => a / b,
            SymbolKind::Tempered { alpha, theta } => alpha * theta.powf(alpha - 1.0),
            SymbolKind::Identity => 1.0,
            SymbolKind::Custom(c) => {
                let d = &c.density;
                let tol = quad_tol();
                let far = quad::estimate_to_inf(|z| z * d(z), 1.0, 1.0, &tol);
                if far.converged && far.value.is_finite() {
                    self.m1(1.0) + far.value
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Classification of a time-condition symbol by c.
    pub fn boundary_behavior_class(&self) -> (BoundaryClass, f64) {
        let c = self.mean_coefficient();
        let class = if (c - 1.0).abs() <= 1e-12 {
            BoundaryClass::Base
        } else if c < 1.0 {
            BoundaryClass::Delayed
        } else {
            BoundaryClass::Rushed
        };
        (class, c)
    }

    /// |Φ(λ)/λ − d − ∫e^{−λz}Π̄(z)dz| with the integral done by quadrature.
    pub fn check_tail_identity(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::invalid("tail identity needs λ > 0"));
        }
        if self.is_identity() {
            return Ok((self.phi(lambda) / lambda - self.drift()).abs());
        }
        let tol = Tolerance::new(1e-13, 1e-12);
        let g = |z: f64| (-lambda * z).exp() * self.tail(z);
        let near = quad::integrate_from_zero(g, 1.0, &tol)?;
        let far = quad::integrate_to_inf(g, 1.0, 1.0 / lambda, &tol)?;
        Ok((self.eval(lambda)? / lambda - self.drift() - near - far).abs())
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SymbolKind::Stable { alpha } => format!("stable(alpha={alpha})"),
            SymbolKind::Gamma { a, b } => format!("gamma(a={a},b={b})"),
            SymbolKind::Tempered { alpha, theta } => format!("tempered(alpha={alpha},theta={theta})"),
            SymbolKind::Identity => "identity".to_string(),
            SymbolKind::Custom(_) => "custom".to_string(),
        }
    }
}

/// 1 − e^{w} without cancellation for small |w|.
pub(crate) fn one_minus_exp(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        -(w * (Complex64::new(1.0, 0.0) + w * (0.5 + w / 6.0 * (1.0 + w / 4.0))))
    } else {
        Complex64::new(1.0, 0.0) - w.exp()
    }
}

fn lk_estimate(dens: &Density, lambda: f64) -> (f64, f64, bool) {
    let tol = quad_tol();
    let g = |z: f64| -(-lambda * z).exp_m1() * dens(z);
    let near = quad::estimate_from_zero(g, 1.0, &tol);
    let far = quad::estimate_to_inf(g, 1.0, 1.0, &tol);
    (near.value + far.value, near.error + far.error, near.converged && far.converged)
}

impl fmt::Debug for BernsteinSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for BernsteinSymbol {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (SymbolKind::Custom(a), SymbolKind::Custom(b)) => Arc::ptr_eq(&a.density, &b.density),
            (SymbolKind::Custom(_), _) | (_, SymbolKind::Custom(_)) => false,
            _ => self.spec() == other.spec(),
        }
    }
}

/// Serialized form of the built-in kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SymbolSpec {
    Stable { alpha: f64 },
    Gamma { a: f64, b: f64 },
    Tempered { alpha: f64, theta: f64 },
    Identity,
}

impl BernsteinSymbol {
    pub fn spec(&self) -> Option<SymbolSpec> {
        Some(match self.kind {
            SymbolKind::Stable { alpha } => SymbolSpec::Stable { alpha },
            SymbolKind::Gamma { a, b } => SymbolSpec::Gamma { a, b },
            SymbolKind::Tempered { alpha, theta } => SymbolSpec::Tempered { alpha, theta },
            SymbolKind::Identity => SymbolSpec::Identity,
            SymbolKind::Custom(_) => return None,
        })
    }
}

impl TryFrom<SymbolSpec> for BernsteinSymbol {
    type Error = Error;
    fn try_from(s: SymbolSpec) -> Result<Self> {
        match s {
            SymbolSpec::Stable { alpha } => Self::stable(alpha),
            SymbolSpec::Gamma { a, b } => Self::gamma(a, b),
            SymbolSpec::Tempered { alpha, theta } => Self::tempered(alpha, theta),
            SymbolSpec::Identity => Ok(Self::identity()),
        }
    }
}

impl Serialize for BernsteinSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.spec() {
            Some(spec) => spec.serialize(serializer),
            None => Err(serde::ser::Error::custom("custom Lévy densities are not serializable")),
        }
    }
}

impl<'de> Deserialize<'de> for BernsteinSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = SymbolSpec::deserialize(deserializer)?;
        BernsteinSymbol::try_from(spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::logspace;
    use proptest::prelude::*;

    fn builtins() -> Vec<BernsteinSymbol> {
        vec![
            BernsteinSymbol::stable(0.5).unwrap(),
            BernsteinSymbol::stable(0.3).unwrap(),
            BernsteinSymbol::stable(0.9).unwrap(),
            BernsteinSymbol::gamma(1.0, 1.0).unwrap(),
            BernsteinSymbol::gamma(2.0, 0.5).unwrap(),
            BernsteinSymbol::tempered(0.5, 1.0).unwrap(),
            BernsteinSymbol::tempered(0.7, 2.0).unwrap(),
            BernsteinSymbol::identity(),
        ]
    }

    #[test]
    fn closed_form_values() {
        let s = BernsteinSymbol::stable(0.5).unwrap();
        assert_eq!(s.eval(4.0).unwrap(), 2.0);
        assert!((s.tail(1.0) - 0.564_189_583_547_756_3).abs() < 1e-14);
        let g = BernsteinSymbol::gamma(1.0, 1.0).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        assert!((g.tail(1.0) - 0.219_383_934_395_520_3).abs() < 1e-13);
        assert_eq!(BernsteinSymbol::identity().tail(3.0), 0.0);
    }

    #[test]
    fn tail_oracles_by_quadrature() {
        let tol = Tolerance::new(1e-14, 1e-13);
        let s = BernsteinSymbol::stable(0.5).unwrap();
        let q = quad::integrate_to_inf(|y| s.levy_density(y), 1.0, 1.0, &tol).unwrap();
        assert!((q - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-10);
        let g = BernsteinSymbol::gamma(1.0, 1.0).unwrap();
        let q = quad::integrate_to_inf(|y: f64| (-y).exp() / y, 1.0, 1.0, &tol).unwrap();
        assert!((q - g.tail(1.0)).abs() < 1e-12);
    }

    #[test]
    fn levy_khintchine_matches_closed_forms() {
        let s = BernsteinSymbol::stable(0.7).unwrap();
        let q = s.levy_khintchine(2.0).unwrap();
        assert!(((q - 2f64.powf(0.7)) / 2f64.powf(0.7)).abs() < 1e-8);
        for sym in builtins() {
            for &l in &[0.01, 1.0, 30.0] {
                let q = sym.levy_khintchine(l).unwrap();
                let c = sym.eval(l).unwrap();
                assert!((q - c).abs() < 1e-8 * (1.0 + c), "{sym:?} λ={l}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn moment_functions_match_quadrature() {
        let tol = Tolerance::new(1e-15, 1e-12);
        for sym in builtins().into_iter().filter(|s| !s.is_identity()) {
            for &d in &[0.01, 0.7, 3.0] {
                let m1 = quad::integrate_from_zero(|z| z * sym.levy_density(z), d, &tol).unwrap();
                let m2 = quad::integrate_from_zero(|z| z * z * sym.levy_density(z), d, &tol).unwrap();
                let it = quad::integrate_from_zero(|z| sym.tail(z), d, &tol).unwrap();
                let j1 = quad::integrate_from_zero(|z| z * sym.tail(z), d, &tol).unwrap();
                assert!((m1 - sym.m1(d)).abs() < 1e-10 * (1.0 + m1), "{sym:?} m1 {d}");
                assert!((m2 - sym.m2(d)).abs() < 1e-10 * (1.0 + m2), "{sym:?} m2 {d}");
                assert!((it - sym.integrated_tail(d)).abs() < 1e-10 * (1.0 + it), "{sym:?} I {d}");
                assert!((j1 - sym.j1(d)).abs() < 1e-10 * (1.0 + j1), "{sym:?} J1 {d}");
            }
        }
    }

    #[test]
    fn tail_identity_on_log_grid() {
        for sym in builtins() {
            for l in logspace(1e-3, 1e3, 20) {
                let r = sym.check_tail_identity(l).unwrap();
                assert!(r < 1e-6, "{sym:?} λ={l}: residual {r}");
            }
        }
        assert_eq!(BernsteinSymbol::identity().check_tail_identity(3.0).unwrap(), 0.0);
    }

    #[test]
    fn classification() {
        let (c, v) = BernsteinSymbol::gamma(1.0, 2.0).unwrap().boundary_behavior_class();
        assert_eq!((c, v), (BoundaryClass::Delayed, 0.5));
        let (c, v) = BernsteinSymbol::identity().boundary_behavior_class();
        assert_eq!((c, v), (BoundaryClass::Base, 1.0));
        let (c, v) = BernsteinSymbol::stable(0.5).unwrap().boundary_behavior_class();
        assert_eq!(c, BoundaryClass::Rushed);
        assert!(v.is_infinite());
        let (c, _) = BernsteinSymbol::gamma(3.0, 1.5).unwrap().boundary_behavior_class();
        assert_eq!(c, BoundaryClass::Rushed);
        let (c, _) = BernsteinSymbol::gamma(2.0, 2.0).unwrap().boundary_behavior_class();
        assert_eq!(c, BoundaryClass::Base);
    }

    #[test]
    fn custom_symbol_matches_builtin() {
        let g = BernsteinSymbol::gamma(1.0, 1.0).unwrap();
        let c = BernsteinSymbol::custom(|z: f64| (-z).exp() / z).unwrap();
        assert!(c.infinite_activity());
        for &l in &[0.5, 2.0, 10.0] {
            assert!((c.eval(l).unwrap() - g.eval(l).unwrap()).abs() < 1e-9);
            let pc = c.phi_complex(Complex64::new(l, 1.0));
            let pg = g.phi_complex(Complex64::new(l, 1.0));
            assert!((pc - pg).norm() < 1e-9);
        }
        assert!((c.tail(0.5) - g.tail(0.5)).abs() < 1e-9);
        assert!((c.mean_coefficient() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn custom_symbol_validation() {
        assert!(BernsteinSymbol::custom(|z: f64| z.powf(-2.5)).is_err());
        let poisson = BernsteinSymbol::custom(|z: f64| (-z).exp()).unwrap();
        assert!(!poisson.infinite_activity());
        match poisson.kind() {
            SymbolKind::Custom(m) => assert!((m.integrability - (1.0 - 2.0 * (-1f64).exp() + (-1f64).exp())).abs() < 1e-9),
            _ => unreachable!(),
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for sym in builtins() {
            let s = serde_json::to_string(&sym).unwrap();
            let back: BernsteinSymbol = serde_json::from_str(&s).unwrap();
            assert_eq!(back.spec(), sym.spec(), "{s}");
        }
        let s: BernsteinSymbol = serde_json::from_str(r#"{"kind":"stable","alpha":0.1}"#).unwrap();
        assert_eq!(s.stable_index().unwrap().to_bits(), 0.1f64.to_bits());
        assert!(serde_json::from_str::<BernsteinSymbol>(r#"{"kind":"stable","alpha":0.5,"beta":1}"#).is_err());
        assert!(serde_json::from_str::<BernsteinSymbol>(r#"{"kind":"stable","alpha":1.5}"#).is_err());
    }

    #[test]
    fn tail_decays_to_zero() {
        for sym in builtins().into_iter().filter(|s| !s.is_identity()) {
            let zs = logspace(1e-4, 1e4, 40);
            let t: Vec<f64> = zs.iter().map(|&z| sym.tail(z)).collect();
            assert!(t.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{sym:?}");
            assert!(sym.tail(1e30) < 1e-8, "{sym:?}");
        }
    }

    fn arb_symbol() -> impl Strategy<Value = BernsteinSymbol> {
        prop_oneof![
            (0.05f64..0.95).prop_map(|a| BernsteinSymbol::stable(a).unwrap()),
            (0.1f64..5.0, 0.1f64..5.0).prop_map(|(a, b)| BernsteinSymbol::gamma(a, b).unwrap()),
            (0.05f64..0.95, 0.1f64..5.0).prop_map(|(a, t)| BernsteinSymbol::tempered(a, t).unwrap()),
            Just(BernsteinSymbol::identity()),
        ]
    }

    proptest! {
        #[test]
        fn phi_is_bernstein_on_grid(sym in arb_symbol()) {
            prop_assert_eq!(sym.phi(0.0), 0.0);
            let ls = logspace(1e-3, 1e3, 40);
            let v: Vec<f64> = ls.iter().map(|&l| sym.phi(l)).collect();
            for w in v.windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
            // Concavity on a uniform grid.
            let h = 0.05;
            for k in 1..60 {
                let x = k as f64 * h;
                let d2 = sym.phi(x + h) - 2.0 * sym.phi(x) + sym.phi(x - h);
                prop_assert!(d2 <= 1e-12 * (1.0 + sym.phi(x)));
            }
            // Φ(λ)/λ nonincreasing.
            for w in ls.windows(2) {
                prop_assert!(sym.phi(w[1]) / w[1] <= sym.phi(w[0]) / w[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn spec_round_trip(sym in arb_symbol()) {
            let s = serde_json::to_string(&sym).unwrap();
            let back: BernsteinSymbol = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.spec(), sym.spec());
        }
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature over real or complex integrands.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool {
        self.modulus().is_finite()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-11,
            rel: 1e-11,
            max_segments: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

impl<T: Scalar> Estimate<T> {
    pub fn into_result(self, tol: &Tolerance) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                achieved: self.error,
                requested: tol.abs.max(tol.rel * self.value.modulus()),
            })
        }
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<T: Scalar>(f: &mut dyn FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).modulus())
}

/// Adaptive quadrature of `f` over a finite interval, returning the estimate
/// even when the tolerance is not met.
pub fn estimate<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Estimate<T> {
    if a == b {
        return Estimate {
            value: T::zero(),
            error: 0.0,
            converged: true,
        };
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    // Segments that cannot be split further in floating point.
    let mut frozen_err = 0.0;
    let mut frozen_val = T::zero();
    while total_err + frozen_err > tol.abs.max(tol.rel * total.modulus()) {
        if heap.len() >= tol.max_segments {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b || (seg.b - seg.a) < 1e-15 * seg.a.abs().max(seg.b.abs()) {
            frozen_err += seg.error;
            frozen_val = frozen_val + seg.value;
            total_err -= seg.error;
            total = total - seg.value;
            continue;
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to avoid drift from incremental updates.
    let mut value = frozen_val;
    let mut error = frozen_err;
    for s in heap.iter() {
        value = value + s.value;
        error += s.error;
    }
    let converged = error.is_finite() && error <= tol.abs.max(tol.rel * value.modulus());
    Estimate {
        value,
        error,
        converged,
    }
}

/// ∫_a^b f with a non-convergence diagnostic.
pub fn integrate<T: Scalar>(f: impl FnMut(f64) -> T, a: f64, b: f64, tol: &Tolerance) -> Result<T> {
    estimate(f, a, b, tol).into_result(tol)
}

/// ∫_a^∞ f via x = a + scale·(1−t)/t.
pub fn estimate_to_inf<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    scale: f64,
    tol: &Tolerance,
) -> Estimate<T> {
    estimate(
        |t: f64| {
            let jac = scale / (t * t);
            if !jac.is_finite() {
                return T::zero();
            }
            f(a + scale * (1.0 - t) / t) * jac
        },
        0.0,
        1.0,
        tol,
    )
}

pub fn integrate_to_inf<T: Scalar>(
    f: impl FnMut(f64) -> T,
    a: f64,
    scale: f64,
    tol: &Tolerance,
) -> Result<T> {
    estimate_to_inf(f, a, scale, tol).into_result(tol)
}

/// ∫_a^b f for 0 < a < b on a logarithmic scale, z = e^s.
pub fn estimate_log<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Estimate<T> {
    estimate(
        |s: f64| {
            let z = s.exp();
            f(z) * z
        },
        a.ln(),
        b.ln(),
        tol,
    )
}

/// ∫_0^b f for integrands singular at the origin, z = b·e^{−u}.
pub fn estimate_from_zero<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    b: f64,
    tol: &Tolerance,
) -> Estimate<T> {
    estimate_to_inf(
        |u: f64| {
            let z = b * (-u).exp();
            if z < 1e-300 {
                return T::zero();
            }
            // Overflow here is round-off in an integrable singularity.
            let v = f(z) * z;
            if v.finite() {
                v
            } else {
                T::zero()
            }
        },
        0.0,
        1.0,
        tol,
    )
}

pub fn integrate_from_zero<T: Scalar>(
    f: impl FnMut(f64) -> T,
    b: f64,
    tol: &Tolerance,
) -> Result<T> {
    estimate_from_zero(f, b, tol).into_result(tol)
}

/// Trapezoid rule on a sampled grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x.powi(5) - 3.0 * x, 0.0, 2.0, &Tolerance::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn infinite_range() {
        let v = integrate_to_inf(|x: f64| (-x).exp(), 0.0, 1.0, &Tolerance::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let v = integrate_to_inf(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, &Tolerance::default())
            .unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn singular_at_origin() {
        let v = integrate_from_zero(|z: f64| z.powf(-0.9), 1.0, &Tolerance::default()).unwrap();
        assert!((v - 10.0).abs() < 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let v: Complex64 = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            &Tolerance::default(),
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tol = Tolerance {
            abs: 1e-15,
            rel: 0.0,
            max_segments: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}

//! Mittag-Leffler function E_α(z) for α ∈ (0, 1] and z ≤ 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::num::ln_gamma;
use crate::quad::{self, Tolerance};

/// Which evaluation produced a Mittag-Leffler value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlMethod {
    Exponential,
    Series,
    Inversion,
}

#[derive(Debug, Clone, Copy)]
pub struct MlValue {
    pub value: f64,
    pub method: MlMethod,
    /// Disagreement with the other method when both were run, else 0.
    pub discrepancy: f64,
}

/// The power series loses about log₁₀ e^{|z|^{1/α}} digits to cancellation.
fn series_ok(alpha: f64, z: f64) -> bool {
    z.abs().powf(1.0 / alpha) <= 2.0
}

fn series(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let lz = z.abs().ln();
    let neg = z < 0.0;
    let mut sum = 1.0;
    for k in 1..2000 {
        let mag = (k as f64 * lz - ln_gamma(alpha * k as f64 + 1.0)).exp();
        let term = if neg && k % 2 == 1 { -mag } else { mag };
        sum += term;
        if mag < 1e-17 * sum.abs().max(1e-300) && k as f64 * alpha > z.abs().powf(1.0 / alpha) {
            break;
        }
    }
    sum
}

/// E_α(−t^α) as the inverse transform of λ^{α−1}/(λ^α + 1), with the Bromwich
/// contour collapsed onto the branch cut:
/// ∫₀^∞ e^{−rt} r^{α−1} sin(απ) / (π(r^{2α} + 2r^α cos(απ) + 1)) dr.
fn by_inversion(alpha: f64, z: f64) -> f64 {
    let t = (-z).powf(1.0 / alpha);
    let (sn, cs) = (PI * alpha).sin_cos();
    let k = |r: f64| {
        let ra = r.powf(alpha);
        (-r * t).exp() * ra / r * sn / (PI * (ra * ra + 2.0 * ra * cs + 1.0))
    };
    let tol = Tolerance::new(1e-16, 1e-13);
    let b = 1.0 / t.max(1e-3);
    quad::estimate_from_zero(k, b, &tol).value + quad::estimate_to_inf(k, b, b, &tol).value
}

#[cfg(test)]
/// Same inversion on the fixed Talbot contour, used as an independent check.
fn by_talbot(alpha: f64, z: f64) -> f64 {
    use super::inversion::talbot;
    use num_complex::Complex64;
    talbot(&|l: Complex64| l.powf(alpha - 1.0) / (l.powf(alpha) - z), 1.0, 32)
}

pub fn mittag_leffler_checked(alpha: f64, z: f64) -> Result<MlValue> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("Mittag-Leffler index must lie in (0, 1], got {alpha}")));
    }
    if !(z <= 0.0) {
        return Err(Error::invalid(format!("Mittag-Leffler argument must be ≤ 0, got {z}")));
    }
    if alpha == 1.0 {
        return Ok(MlValue {
            value: z.exp(),
            method: MlMethod::Exponential,
            discrepancy: 0.0,
        });
    }
    if series_ok(alpha, z) {
        let s = series(alpha, z);
        // Near the switch both are accurate; record their disagreement.
        let discrepancy = if z.abs().powf(1.0 / alpha) > 1.0 {
            (s - by_inversion(alpha, z)).abs()
        } else {
            0.0
        };
        Ok(MlValue {
            value: s,
            method: MlMethod::Series,
            discrepancy,
        })
    } else {
        Ok(MlValue {
            value: by_inversion(alpha, z),
            method: MlMethod::Inversion,
            discrepancy: 0.0,
        })
    }
}

pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    let v = mittag_leffler_checked(alpha, z)?;
    if v.discrepancy > 1e-8 {
        return Err(Error::Unreliable {
            t: z,
            discrepancy: v.discrepancy,
        });
    }
    Ok(v.value)
}

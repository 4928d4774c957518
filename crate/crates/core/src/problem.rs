//! The boundary value problem: initial datum f, boundary symbols Φ and Ψ, weight η.

use crate::error::{Error, Result};
use crate::operators::SampledFunction;
use crate::symbols::BernsteinSymbol;

/// ∂ₜυ = ∂ₓₓυ on (0, ∞) with η·𝔇ᵗ_Ψ υ(t,0) = −𝐃ₓ₋^Φ υ(t,0) and υ(0,·) = f.
#[derive(Debug, Clone)]
pub struct Problem {
    pub phi: BernsteinSymbol,
    pub psi: BernsteinSymbol,
    pub eta: f64,
    pub f: SampledFunction,
}

impl Problem {
    pub fn new(phi: BernsteinSymbol, psi: BernsteinSymbol, eta: f64, f: SampledFunction) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::invalid(format!("η must be finite and nonnegative, got {eta}")));
        }
        Ok(Self { phi, psi, eta, f })
    }

    /// Sup of |f|, from the declared bound or the closed form.
    pub fn f_bound(&self) -> Option<f64> {
        self.f.bound
    }
}

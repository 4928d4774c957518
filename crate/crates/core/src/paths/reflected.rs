//! Brownian motion with generator d²/dx² reflected at 0, with its Skorokhod regulator.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::open_uniform;
use crate::error::{Error, Result};

/// How the regulator is advanced across one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reflection {
    /// Samples the minimum of the Brownian bridge inside the step, so γ has no
    /// discretization bias.
    #[default]
    Bridge,
    /// position ← max(0, position + ΔW), regulator += the clipped part.
    Euler,
}

/// Bridge minima are skipped when P(min < 0) = e^{−ab/dt} is below e^{−30}.
const BRIDGE_CUTOFF: f64 = 30.0;

/// One step of the reflected path from `a` with free increment `dw`.
/// Returns (new position, regulator increment).
#[inline]
pub(crate) fn reflect_step<R: Rng + ?Sized>(a: f64, dw: f64, dt: f64, mode: Reflection, rng: &mut R) -> (f64, f64) {
    let b = a + dw;
    match mode {
        Reflection::Euler => {
            if b < 0.0 {
                (0.0, -b)
            } else {
                (b, 0.0)
            }
        }
        Reflection::Bridge => {
            if b > 0.0 && a * b >= BRIDGE_CUTOFF * dt {
                return (b, 0.0);
            }
            // P(min ≤ m) = exp(−(a−m)(b−m)/dt) for variance 2 per unit time.
            let c = -dt * open_uniform(rng).ln();
            let m = 0.5 * (a + b - ((a - b) * (a - b) + 4.0 * c).sqrt());
            if m < 0.0 {
                (b - m, -m)
            } else {
                (b, 0.0)
            }
        }
    }
}

#[inline]
pub(crate) fn brownian_increment<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

#[derive(Debug, Clone)]
pub struct ReflectedPath {
    pub dt: f64,
    pub positions: Vec<f64>,
    /// Cumulative regulator γ, γ(0) = 0.
    pub regulator: Vec<f64>,
}

impl ReflectedPath {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        (self.len().saturating_sub(1)) as f64 * self.dt
    }

    /// CSV with columns t,value,regulator.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value", "regulator"])?;
        for (k, (x, g)) in self.positions.iter().zip(&self.regulator).enumerate() {
            out.write_record([(k as f64 * self.dt).to_string(), x.to_string(), g.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn sample_reflected_bm<R: Rng + ?Sized>(
    x0: f64,
    dt: f64,
    horizon: f64,
    mode: Reflection,
    rng: &mut R,
) -> Result<ReflectedPath> {
    if !(x0 >= 0.0 && dt > 0.0 && horizon > 0.0) {
        return Err(Error::invalid(format!(
            "need x0 ≥ 0, dt > 0, T > 0; got x0={x0}, dt={dt}, T={horizon}"
        )));
    }
    let n = (horizon / dt).round().max(1.0) as usize;
    let sd = (2.0 * dt).sqrt();
    let mut positions = Vec::with_capacity(n + 1);
    let mut regulator = Vec::with_capacity(n + 1);
    positions.push(x0);
    regulator.push(0.0);
    let (mut x, mut g) = (x0, 0.0);
    for _ in 0..n {
        let dw = brownian_increment(sd, rng);
        let (y, dg) = reflect_step(x, dw, dt, mode, rng);
        x = y;
        g += dg;
        positions.push(x);
        regulator.push(g);
    }
    Ok(ReflectedPath { dt, positions, regulator })
}

//! Named initial data, selectable from configuration files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::erfc;
use crate::operators::SampledFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Datum {
    /// e^{−rate·x}.
    ExpDecay {
        #[serde(default = "one")]
        rate: f64,
    },
    /// Smooth bump of unit height, supported on (center − width, center + width).
    Bump { center: f64, width: f64 },
    /// Indicator of [a, b] with erf edges of width `smoothing`.
    IndicatorSmoothed {
        a: f64,
        b: f64,
        #[serde(default = "tenth")]
        smoothing: f64,
    },
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn tenth() -> f64 {
    0.1
}

impl Default for Datum {
    fn default() -> Self {
        Datum::ExpDecay { rate: 1.0 }
    }
}

impl Datum {
    pub fn build(&self) -> Result<SampledFunction> {
        match *self {
            Datum::ExpDecay { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::invalid(format!("exp-decay rate must be positive, got {rate}")));
                }
                Ok(SampledFunction::exp_sum(vec![(1.0, rate)]))
            }
            Datum::Bump { center, width } => {
                if !(width > 0.0 && center.is_finite()) {
                    return Err(Error::invalid(format!("bump needs width > 0, got {width}")));
                }
                let f = move |x: f64| {
                    let r = (x - center) / width;
                    if r.abs() >= 1.0 {
                        0.0
                    } else {
                        (1.0 - 1.0 / (1.0 - r * r)).exp()
                    }
                };
                // max |g′| of the unit bump is about 2.17.
                Ok(SampledFunction::new(f)
                    .bounded(1.0)
                    .lipschitz(2.2 / width)
                    .decaying()
                    .with_scale((0.25 * width).min(1.0)))
            }
            Datum::IndicatorSmoothed { a, b, smoothing } => {
                if !(b > a && smoothing > 0.0) {
                    return Err(Error::invalid(format!(
                        "indicator needs a < b and smoothing > 0, got [{a}, {b}], {smoothing}"
                    )));
                }
                let f = move |x: f64| 0.5 * (erfc((x - b) / smoothing) - erfc((x - a) / smoothing));
                Ok(SampledFunction::new(f)
                    .bounded(1.0)
                    .lipschitz(1.0 / (smoothing * std::f64::consts::PI.sqrt()))
                    .decaying()
                    .with_scale(smoothing.min(1.0)))
            }
            Datum::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::invalid("constant datum must be finite"));
                }
                Ok(SampledFunction::constant(value))
            }
        }
    }

    /// Right end of the region where the datum is not negligible (below 1e-8 beyond).
    pub fn effective_support(&self) -> f64 {
        match *self {
            Datum::ExpDecay { rate } => 18.5 / rate,
            Datum::Bump { center, width } => center + width,
            Datum::IndicatorSmoothed { b, smoothing, .. } => b + 4.1 * smoothing,
            Datum::Constant { .. } => f64::INFINITY,
        }
    }

    /// Value assumed beyond a truncated domain.
    pub fn far_value(&self) -> f64 {
        match *self {
            Datum::Constant { value } => value,
            _ => 0.0,
        }
    }
}

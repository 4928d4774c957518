//! Numerical Laplace inversion: Gaver–Stehfest on the real axis and the fixed
//! Talbot contour for transforms with an analytic continuation.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

type RealFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;
type ComplexFn<'a> = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync + 'a>;

/// A Laplace transform F(λ) on (λ_min, λ_max), optionally continued to ℂ.
pub struct TransformFunction<'a> {
    real: RealFn<'a>,
    complex: Option<ComplexFn<'a>>,
    pub domain: (f64, f64),
    pub notes: String,
}

impl<'a> TransformFunction<'a> {
    /// Transform known only on the positive real axis.
    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            real: Box::new(f),
            complex: None,
            domain: (0.0, f64::INFINITY),
            notes: String::new(),
        }
    }

    /// Transform given in closed form on the cut plane; the real form is its restriction.
    pub fn analytic(f: impl Fn(Complex64) -> Complex64 + Send + Sync + Clone + 'a) -> Self {
        let g = f.clone();
        Self {
            real: Box::new(move |l| g(Complex64::new(l, 0.0)).re),
            complex: Some(Box::new(f)),
            domain: (0.0, f64::INFINITY),
            notes: String::new(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        (self.real)(lambda)
    }

    pub fn has_continuation(&self) -> bool {
        self.complex.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GaverStehfest(usize),
    Talbot(usize),
}

impl Method {
    pub const GS_DEFAULT: Method = Method::GaverStehfest(14);
    pub const TALBOT_DEFAULT: Method = Method::Talbot(32);
}

/// Result of a cross-checked inversion.
#[derive(Debug, Clone, Copy)]
pub struct Inversion {
    pub value: f64,
    pub discrepancy: f64,
    pub reliable: bool,
}

impl Inversion {
    pub fn into_result(self, t: f64) -> Result<f64> {
        if self.reliable {
            Ok(self.value)
        } else {
            Err(Error::Unreliable {
                t,
                discrepancy: self.discrepancy,
            })
        }
    }
}

pub fn invert_laplace(f: &TransformFunction<'_>, t: f64, method: Method) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("inversion time must be positive, got {t}")));
    }
    match method {
        Method::GaverStehfest(n) => gaver_stehfest(&|l| f.eval(l), t, n),
        Method::Talbot(m) => match &f.complex {
            Some(c) => Ok(talbot(&|z| c(z), t, m)),
            None => Err(Error::invalid("Talbot inversion needs the transform in closed form on ℂ")),
        },
    }
}

/// Inverts with both methods when possible and flags disagreement beyond
/// `tol·(1 + |value|)`. Without a continuation two Gaver–Stehfest orders are compared.
pub fn invert_checked(f: &TransformFunction<'_>, t: f64, tol: f64) -> Result<Inversion> {
    if f.has_continuation() {
        invert_checked_with(f, t, tol, Method::TALBOT_DEFAULT, Method::GS_DEFAULT)
    } else {
        invert_checked_with(f, t, tol, Method::GS_DEFAULT, Method::GaverStehfest(12))
    }
}

/// Inverts with `primary`, reporting its distance to `secondary`.
pub fn invert_checked_with(
    f: &TransformFunction<'_>,
    t: f64,
    tol: f64,
    primary: Method,
    secondary: Method,
) -> Result<Inversion> {
    let value = invert_laplace(f, t, primary)?;
    let other = invert_laplace(f, t, secondary)?;
    let discrepancy = (value - other).abs();
    Ok(Inversion {
        value,
        discrepancy,
        reliable: value.is_finite() && discrepancy <= tol * (1.0 + value.abs()),
    })
}

/// Default tolerance of the inversion cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-3;

#[derive(Clone, Copy)]
struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

impl Rational {
    fn new(num: i128, den: i128) -> Self {
        let g = gcd(num, den);
        let s = if den < 0 { -1 } else { 1 };
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }

    fn add(self, o: Rational) -> Self {
        let g = gcd(self.den, o.den);
        let den = self.den / g * o.den;
        let num = self.num * (o.den / g) + o.num * (self.den / g);
        Self::new(num, den)
    }
}

fn factorial(n: i128) -> i128 {
    (1..=n).product::<i128>().max(1)
}

/// Stehfest weights in exact rational arithmetic, rounded once at the end.
fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = (n / 2) as i128;
    (1..=n as i128)
        .map(|k| {
            let mut acc = Rational::new(0, 1);
            for j in (k + 1) / 2..=k.min(half) {
                let num = j.pow(half as u32) * factorial(2 * j);
                let den = factorial(half - j)
                    * factorial(j)
                    * factorial(j - 1)
                    * factorial(k - j)
                    * factorial(2 * j - k);
                acc = acc.add(Rational::new(num, den));
            }
            let sign = if (k + half) % 2 == 0 { 1.0 } else { -1.0 };
            sign * acc.num as f64 / acc.den as f64
        })
        .collect()
}

fn cached_weights(n: usize) -> &'static [f64] {
    static CACHE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let table = CACHE.get_or_init(|| (0..=20).map(|m| if m >= 2 && m % 2 == 0 { stehfest_weights(m) } else { Vec::new() }).collect());
    &table[n]
}

pub fn gaver_stehfest(f: &dyn Fn(f64) -> f64, t: f64, n: usize) -> Result<f64> {
    if n < 2 || n > 20 || n % 2 != 0 {
        return Err(Error::invalid(format!("Gaver–Stehfest order must be even in [2, 20], got {n}")));
    }
    let w = cached_weights(n);
    let a = std::f64::consts::LN_2 / t;
    Ok(a * w.iter().enumerate().map(|(k, v)| v * f(a * (k + 1) as f64)).sum::<f64>())
}

/// Fixed Talbot contour of Abate and Valkó with `m` nodes.
pub fn talbot(f: &dyn Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * std::f64::consts::PI / m as f64;
        let cot = 1.0 / theta.tan();
        let delta = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (delta * t).exp() * f(delta) * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    r / m as f64 * sum
}

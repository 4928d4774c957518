//! Point-by-point comparison of two runs on a shared (t, x) grid.

use serde::{Deserialize, Serialize};

use super::commands::ValueRow;
use crate::error::{Error, Result};

/// A point passes when |a − b| ≤ abs + k·√(se_a² + se_b²) + rel·max(|a|, |b|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub se_multiple: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 0.0,
            rel: 0.02,
            se_multiple: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub max_abs_diff: f64,
    pub points_exceeding: usize,
    pub pass: bool,
    pub points: usize,
    pub tolerance: Tolerance,
}

pub fn compare(a: &[ValueRow], b: &[ValueRow], tol: &Tolerance) -> Result<CompareReport> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} points against {}", a.len(), b.len())));
    }
    let same = |u: f64, v: f64| (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0);
    let mut max_abs_diff = 0.0f64;
    let mut points_exceeding = 0;
    for (i, (p, q)) in a.iter().zip(b).enumerate() {
        if !same(p.t, q.t) || !same(p.x, q.x) {
            return Err(Error::GridMismatch(format!(
                "row {}: (t, x) = ({}, {}) against ({}, {})",
                i + 1,
                p.t,
                p.x,
                q.t,
                q.x
            )));
        }
        let d = (p.value - q.value).abs();
        max_abs_diff = max_abs_diff.max(d);
        let se = p.se.unwrap_or(0.0).hypot(q.se.unwrap_or(0.0));
        let allowed = tol.abs + tol.se_multiple * se + tol.rel * p.value.abs().max(q.value.abs());
        if !(d <= allowed) {
            points_exceeding += 1;
        }
    }
    Ok(CompareReport {
        max_abs_diff,
        points_exceeding,
        pass: points_exceeding == 0,
        points: a.len(),
        tolerance: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(t: f64, x: f64, value: f64, se: Option<f64>) -> ValueRow {
        ValueRow { t, x, value, se, error: None }
    }

    #[test]
    fn reflexive_and_mismatch() {
        let a = vec![row(0.5, 0.0, 0.3, Some(0.01)), row(0.5, 1.0, 0.2, Some(0.01))];
        let r = compare(&a, &a, &Tolerance::default()).unwrap();
        assert_eq!(r.max_abs_diff, 0.0);
        assert!(r.pass);
        let b = vec![row(0.5, 0.0, 0.3, None), row(0.5, 2.0, 0.2, None)];
        assert!(matches!(compare(&a, &b, &Tolerance::default()), Err(Error::GridMismatch(_))));
        assert!(compare(&a, &a[..1], &Tolerance::default()).is_err());
    }

    #[test]
    fn standard_errors_widen_the_band() {
        let a = vec![row(1.0, 0.0, 0.50, Some(0.01))];
        let b = vec![row(1.0, 0.0, 0.53, None)];
        assert!(compare(&a, &b, &Tolerance::default()).unwrap().pass);
        let tight = Tolerance { se_multiple: 0.0, ..Default::default() };
        assert!(!compare(&a, &b, &tight).unwrap().pass);
    }

    proptest! {
        #[test]
        fn symmetric(v in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..0.05f64, 0.0..0.05f64), 1..20)) {
            let a: Vec<ValueRow> = v.iter().enumerate().map(|(i, &(p, _, s, _))| row(i as f64, 0.0, p, Some(s))).collect();
            let b: Vec<ValueRow> = v.iter().enumerate().map(|(i, &(_, q, _, s))| row(i as f64, 0.0, q, Some(s))).collect();
            let tol = Tolerance::default();
            prop_assert_eq!(compare(&a, &b, &tol).unwrap(), compare(&b, &a, &tol).unwrap());
        }
    }
}

//! Comparing two value tables with the same tolerance band as `nlheat compare`.

use nonlocal_heat::cli::compare::compare;
use nonlocal_heat::cli::{Tolerance, ValueRow};

fn row(t: f64, x: f64, value: f64, se: Option<f64>) -> ValueRow {
    ValueRow { t, x, value, se, error: None }
}

fn main() -> nonlocal_heat::Result<()> {
    let oracle = vec![row(0.5, 0.0, 0.4182, None), row(0.5, 1.0, 0.3156, None)];
    let mc = vec![row(0.5, 0.0, 0.4201, Some(0.0015)), row(0.5, 1.0, 0.3149, Some(0.0012))];
    let off = vec![row(0.5, 0.0, 0.47, Some(0.001)), row(0.5, 1.0, 0.3149, Some(0.001))];
    let tol = Tolerance::default();
    for (name, other) in [("mc", &mc), ("off", &off)] {
        let r = compare(&oracle, other, &tol)?;
        println!("{name}: pass {} max diff {:.4} exceeding {}", r.pass, r.max_abs_diff, r.points_exceeding);
    }
    Ok(())
}

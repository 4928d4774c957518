//! The Laplace-domain oracle, with one boundary curve reused across points,
//! and its two limits: Neumann as α → 1 and Dirichlet as α → 0.

use nonlocal_heat::laplace::{heat_half_line, solution_oracle, solution_with_curve, BoundaryCurve, HalfLine};
use nonlocal_heat::operators::SampledFunction;
use nonlocal_heat::{BernsteinSymbol, Problem};

fn main() -> nonlocal_heat::Result<()> {
    let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
    let p = Problem::new(BernsteinSymbol::stable(0.5)?, BernsteinSymbol::identity(), 0.0, f.clone())?;
    let curve = BoundaryCurve::new(&p, 1.0)?;
    for t in [0.25, 0.5, 1.0] {
        let row: Vec<String> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&x| solution_with_curve(&p, &curve, t, x).map(|v| format!("{:.6}", v.value)))
            .collect::<Result<_, _>>()?;
        println!("t = {t:<5} {}", row.join("  "));
    }
    let id = BernsteinSymbol::identity();
    for x in [0.0, 0.5, 1.0] {
        let near_one = solution_oracle(&f, 0.5, x, 0.0, &id, &BernsteinSymbol::stable(0.99)?)?.value;
        let near_zero = solution_oracle(&f, 0.5, x, 0.0, &id, &BernsteinSymbol::stable(0.01)?)?.value;
        println!(
            "x = {x}: α=.99 {near_one:.5} Neumann {:.5}   α=.01 {near_zero:.5} Dirichlet {:.5}",
            heat_half_line(&f, 0.5, x, HalfLine::Neumann)?,
            heat_half_line(&f, 0.5, x, HalfLine::Dirichlet)?
        );
    }
    Ok(())
}

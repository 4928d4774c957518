//! Explicit finite differences for the heat equation with the non-local
//! boundary condition, checked against the oracle and in residual form.

use nonlocal_heat::laplace::solution_oracle;
use nonlocal_heat::operators::SampledFunction;
use nonlocal_heat::pde::{boundary_condition_residual, solve_heat_nonlocal_bc, BoundaryForm, Grid1D, SolverOptions};
use nonlocal_heat::{BernsteinSymbol, Problem};

fn main() -> nonlocal_heat::Result<()> {
    let phi = BernsteinSymbol::stable(0.5)?;
    let psi = BernsteinSymbol::identity();
    let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
    let p = Problem::new(phi.clone(), psi.clone(), 1.0, f.clone())?;
    let grid = Grid1D::stable(20.0, 1000, 1.0)?;
    let u = solve_heat_nonlocal_bc(&p, &grid, &SolverOptions::default())?;
    println!("hx = {}, dt = {:.2e}, {} steps", grid.hx(), grid.dt, grid.steps());
    for x in [0.0, 0.5, 1.0] {
        let o = solution_oracle(&f, 1.0, x, 1.0, &psi, &phi)?.value;
        println!("x = {x}: FD {:.6}  oracle {o:.6}", u.at(1.0, x)?);
    }
    let r = boundary_condition_residual(&u, &p, 0.2, BoundaryForm::Memory)?;
    println!("boundary residual on [0.2, 1]: {r:.2e}");
    for w in &u.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

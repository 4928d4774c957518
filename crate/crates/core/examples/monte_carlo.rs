//! Monte Carlo estimate of the solution with standard errors, next to the
//! Laplace-domain oracle.

use nonlocal_heat::laplace::solution_oracle;
use nonlocal_heat::operators::SampledFunction;
use nonlocal_heat::paths::{mc_solution_times, McConfig};
use nonlocal_heat::{BernsteinSymbol, Problem};

fn main() -> nonlocal_heat::Result<()> {
    let s = BernsteinSymbol::stable(0.5)?;
    let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
    let p = Problem::new(s.clone(), s.clone(), 1.0, f.clone())?;
    let cfg = McConfig {
        paths: 20_000,
        dt: 1e-3,
        seed: 2024,
        ..Default::default()
    };
    let times = [0.25, 0.5, 1.0];
    for x in [0.0, 1.0] {
        for (t, est) in times.iter().zip(mc_solution_times(&p, &times, x, &cfg)?) {
            let o = solution_oracle(&f, *t, x, 1.0, &s, &s)?.value;
            println!("t = {t:<5} x = {x}: {:.5} ± {:.5}   oracle {o:.5}", est.mean, est.se);
        }
    }
    Ok(())
}

//! Fractional operators on e^{−x}: the Marchaud derivatives, the Caputo form in
//! time and integration by parts between left and right operators.

use nonlocal_heat::operators::{
    caputo_dzherbashian, integration_by_parts_residual, marchaud_left, marchaud_right, riemann_liouville_right,
    QuadratureConfig, SampledFunction,
};
use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    let s = BernsteinSymbol::stable(0.5)?;
    let cfg = QuadratureConfig::default();
    let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "x", "D_- f", "RL_- f", "D_+ f", "Caputo");
    for x in [0.25, 0.5, 1.0, 2.0] {
        println!(
            "{x:>5} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            marchaud_left(&f, x, &s, &cfg)?,
            riemann_liouville_right(&f, x, &s, &cfg)?,
            marchaud_right(&f.clone().zero_extended(), x, &s, &cfg)?,
            caputo_dzherbashian(&f, x, &s, &cfg)?,
        );
    }
    // For e^{−x} the left operator is Φ(1)e^{−x}.
    println!("Φ(1) = {:.8}", s.phi(1.0));

    let xexp = |b: f64| {
        SampledFunction::new(move |x| x * (-b * x).exp())
            .bounded(1.0 / (b * std::f64::consts::E))
            .lipschitz(1.0)
            .decaying()
    };
    let r = integration_by_parts_residual(&xexp(1.0), &xexp(2.0), &s, &cfg)?;
    println!("integration by parts residual: {r:.2e}");
    Ok(())
}

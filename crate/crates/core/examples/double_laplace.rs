//! E∫e^{−λt − ξH^Φ(L^Ψ_t)}dt by simulation against Ψ(λ)/(λ(Ψ(λ)+Φ(ξ))).

use nonlocal_heat::paths::{double_laplace, double_laplace_target};
use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    let cases = [
        (BernsteinSymbol::stable(0.5)?, BernsteinSymbol::stable(0.5)?, 1.0, 1.0),
        (BernsteinSymbol::gamma(1.0, 1.0)?, BernsteinSymbol::stable(0.5)?, 1.0, 1.0),
        (BernsteinSymbol::stable(0.7)?, BernsteinSymbol::gamma(1.0, 2.0)?, 2.0, 0.5),
    ];
    for (psi, phi, l, xi) in &cases {
        let est = double_laplace(psi, phi, *l, *xi, 20_000, 11, 1e-3)?;
        println!(
            "Ψ = {:<16} Φ = {:<16} λ = {l} ξ = {xi}: {:.4} ± {:.4}   exact {:.4}",
            psi.name(),
            phi.name(),
            est.mean,
            est.se,
            double_laplace_target(psi, phi, *l, *xi)
        );
    }
    Ok(())
}

//! One path of the solution process: reflected Brownian motion, boundary
//! excursions replaced by jumps of H^Φ, then delayed by H^Ψ.

use nonlocal_heat::paths::{build_bullet, sample_reflected_bm, stream, time_change, Component, Reflection, CLOCK_STEP};
use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    let phi = BernsteinSymbol::stable(0.5)?;
    let psi = BernsteinSymbol::stable(0.5)?;
    let reflected = sample_reflected_bm(0.5, 1e-3, 1.0, Reflection::Bridge, &mut stream(3, 0, Component::Brownian))?;
    let bullet = build_bullet(&phi, reflected, CLOCK_STEP, &mut stream(3, 0, Component::Phi))?;
    let bullet = time_change(bullet, 0.05, &psi, &mut stream(3, 0, Component::Psi))?;
    let rises = bullet.levels.windows(2).filter(|w| w[1] > w[0]).count();
    println!("boundary visits that jumped: {rises}, final level H(L) = {:.4}", bullet.levels.last().unwrap());
    for t in [0.1, 0.25, 0.5, 0.75, 1.0] {
        match bullet.solution_position(t) {
            Some(x) => println!("t = {t:<5} X_t = {x:.4}  S⁻¹(t) = {:.4}", bullet.s_inverse(t).unwrap()),
            None => println!("t = {t:<5} beyond the simulated range"),
        }
    }
    Ok(())
}

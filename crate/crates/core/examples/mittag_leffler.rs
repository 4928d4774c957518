//! With Ψ stable(α) the process holds at the boundary for a time whose
//! survival function is E_α(−t^α).

use nonlocal_heat::laplace::mittag_leffler;
use nonlocal_heat::paths::holding_time_survival_many;
use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    let times = [0.25, 1.0, 4.0];
    for alpha in [0.3, 0.5, 0.8] {
        let psi = BernsteinSymbol::stable(alpha)?;
        for (t, est) in times.iter().zip(holding_time_survival_many(&psi, &times, 50_000, 7)?) {
            let exact = mittag_leffler(alpha, -t.powf(alpha))?;
            println!("α = {alpha} t = {t:<5} {:.4} ± {:.4}   E_α = {exact:.4}", est.mean, est.se);
        }
    }
    Ok(())
}

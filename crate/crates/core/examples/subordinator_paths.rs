//! Sample paths of stable subordinators and their inverses.
//!
//! Small indices give paths made of one big jump; indices near one look
//! like the identity.

use nonlocal_heat::paths::{invert_path, sample_subordinator, stream, Component, SamplerMode};
use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    for (i, alpha) in [0.01, 0.5, 0.99].into_iter().enumerate() {
        let s = BernsteinSymbol::stable(alpha)?;
        let mut rng = stream(42, i as u64, Component::Phi);
        let path = sample_subordinator(&s, 1.0, 1e-3, SamplerMode::Exact, &mut rng)?;
        let end = *path.values.last().unwrap();
        let biggest = path.values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let level = 0.5 * end.min(1.0);
        println!(
            "α = {alpha:<5} H(1) = {end:<11.3e} largest jump share {:.3}  L({level:.3e}) = {:.4}",
            biggest / end,
            invert_path(&path, level)?
        );
    }
    let mut rng = stream(42, 9, Component::Phi);
    let path = sample_subordinator(&BernsteinSymbol::stable(0.5)?, 1.0, 0.01, SamplerMode::Exact, &mut rng)?;
    path.write_csv(std::io::stdout().lock())
}

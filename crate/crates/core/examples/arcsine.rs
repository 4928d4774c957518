//! Undershoot and overshoot of a stable subordinator at level 1.
//!
//! H(L_1−) is Beta(α, 1−α) and so is 1/H(L_1).

use nonlocal_heat::paths::{stream, Component, PassageSampler};
use nonlocal_heat::stats::ks_one_sample;
use nonlocal_heat::BernsteinSymbol;
use statrs::distribution::{Beta, ContinuousCDF};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 20_000;
    for alpha in [0.3, 0.5, 0.7] {
        let sampler = PassageSampler::new(&BernsteinSymbol::stable(alpha)?, 1.0, None)?;
        let (mut under, mut inv_over) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n as u64 {
            let (o, u) = sampler.sample(&mut stream(1, i, Component::Phi));
            under.push(u);
            inv_over.push(1.0 / o);
        }
        let law = Beta::new(alpha, 1.0 - alpha)?;
        let cdf = |x: f64| law.cdf(x.clamp(0.0, 1.0));
        println!(
            "α = {alpha}: KS undershoot {:.4}, KS 1/overshoot {:.4} (n = {n})",
            ks_one_sample(&under, cdf),
            ks_one_sample(&inv_over, cdf)
        );
    }
    Ok(())
}

//! Per-path random streams split from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

/// Independent ingredient of one path bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Brownian = 0,
    Phi = 1,
    Psi = 2,
    Extra = 3,
}

/// Stream `path·8 + component` of the ChaCha8 generator keyed by `seed`.
/// Streams never overlap, so the draws of a path do not depend on which
/// worker produced them.
pub fn stream(seed: u64, path: u64, component: Component) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path.wrapping_mul(8).wrapping_add(component as u64));
    rng
}

/// Uniform on (0, 1], safe to take logarithms of.
pub(crate) fn open_uniform<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

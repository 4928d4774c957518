//! Laplace transforms, their inversion, and the analytic oracles built on them.

pub mod inversion;
pub mod mittag_leffler;
pub mod oracles;

pub use inversion::{invert_checked, invert_laplace, Inversion, Method, TransformFunction};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_checked};
pub use oracles::*;

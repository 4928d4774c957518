//! Simulation of subordinators, reflected Brownian motion, the jumping process
//! B• and its time change, and the Monte Carlo solution estimator.

pub mod bullet;
pub mod estimate;
pub mod reflected;
pub mod rng;
pub mod sampler;
pub mod subordinator;

pub use bullet::{build_bullet, time_change, BulletPath, CLOCK_STEP};
pub use estimate::{
    double_laplace, double_laplace_target, holding_time_survival, holding_time_survival_many, mc_resolvent, mc_solution,
    mc_solution_times, write_samples_csv, EstimateWithError, McConfig,
};
pub use reflected::{sample_reflected_bm, Reflection, ReflectedPath};
pub use rng::{stream, Component, PathRng};
pub use sampler::{IncrementSampler, SamplerMode};
pub use subordinator::{
    compose_independent, invert_path, overshoot_undershoot, sample_inverse, sample_subordinator, MonotonePath,
    PassageClock, PassageSampler,
};

//! The C_1 random walk viewed as a Markov chain on circle indices.

mod kernel;
mod mixing;
mod simulate;

pub use kernel::{
    build_kernel, detailed_balance, iterate, stationary, tv_distance, tv_distance_exact,
    Distribution, ExactMatrix, StochasticKernel, FLOAT_MASS_TOL,
};
pub use mixing::{
    boost_epsilon, mixing_time, mixing_time_from, MixingReport, DEFAULT_EPSILON, EXACT_MIXING_GATE,
};
pub use simulate::{simulate, SimulationResult, WalkTrace};

pub(crate) use kernel::ratio_to_f64;

use crate::bounds::coupling_bound;
use crate::modular::PrimeModulus;

/// Step budget for [`mixing_time`]: ten times the coupling bound on τ.
pub fn default_max_steps(modulus: &PrimeModulus) -> usize {
    let bound = coupling_bound(modulus, DEFAULT_EPSILON).expect("default epsilon is admissible");
    10 * bound.tau_bound as usize
}

//! Random walks on the hypergroup of circles over a prime field F_p with
//! p = 3 (mod 4).
//!
//! The crate builds the exact structure constants of the circle hypergroup,
//! turns the walk driven by the unit circle into a Markov chain on circle
//! indices, and measures how fast it mixes against several upper bounds:
//! path-congestion and odd-cycle eigenvalue bounds, the spectral TV bound and
//! a four-step coupling bound.
//!
//! ```
//! use circle_walk::{bounds, circles::StructureTensor, modular::make_modulus, walk};
//!
//! let m = make_modulus(7).unwrap();
//! let kernel = walk::build_kernel(&StructureTensor::new(&m), 1).unwrap();
//! let pi = walk::stationary(&m);
//! let mix = walk::mixing_time(&kernel, &pi, walk::DEFAULT_EPSILON, 1000).unwrap();
//! let coupling = bounds::coupling_bound(&m, walk::DEFAULT_EPSILON).unwrap();
//! assert!(mix.tau as u64 <= coupling.tau_bound);
//! ```

pub mod bounds;
pub mod circles;
pub mod cli;
mod error;
pub mod modular;
pub mod walk;

pub use error::{Error, Result};

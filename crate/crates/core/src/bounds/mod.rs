//! Eigenvalue and mixing-time bounds for the circle walk.

mod comparison;
mod coupling;
mod cycles;
pub mod eigen;
mod spectrum;

pub use comparison::{comparison_a, default_paths, ComparisonReport, PathAssignment};
pub use coupling::{
    closed_form_bounds, coupling_bound, doeblin_claim_check, minorization_constant,
    ClosedFormBounds, CouplingBound, DoeblinReport, EXACT_FOURTH_POWER_GATE,
};
pub use cycles::{cycles_v, default_cycles, shortest_odd_cycles, CycleCollection, CycleReport};
pub use spectrum::{
    dirichlet_form, spectrum, symmetrization_residual, tv_upper_theorem7, SpectrumReport,
};

use serde::Serialize;

use crate::circles::StructureTensor;
use crate::error::Result;
use crate::modular::PrimeModulus;
use crate::walk::{build_kernel, stationary, StochasticKernel, DEFAULT_EPSILON};

/// Every computed bound for one prime, next to the measured spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub p: u32,
    pub lambda1: f64,
    pub lambda_min: f64,
    pub alpha_star: f64,
    /// Congestion constant of the default paths against the equilibrium chain.
    pub comparison_a: f64,
    /// 1 - 1/comparison_a.
    pub alpha1_upper: f64,
    /// Odd-cycle constant of the default cycles.
    pub v_value: f64,
    /// -1 + 2/v_value.
    pub alpha_min_lower: f64,
    pub coupling_n: u64,
    /// 4·coupling_n.
    pub coupling_tau: u64,
    pub closed_form: ClosedFormBounds,
    pub tau_measured: Option<usize>,
}

/// The per-prime JSON record, in its fixed key order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub p: u32,
    pub lambda1: f64,
    pub lambda_min: f64,
    pub alpha_star: f64,
    #[serde(rename = "comparison_A")]
    pub comparison_a: f64,
    pub v: f64,
    pub alpha1_upper_closed: f64,
    pub alpha_min_lower_closed: f64,
    pub coupling_n: u64,
    pub coupling_tau: u64,
    pub tau_measured: Option<usize>,
}

impl BoundReport {
    pub fn summary(&self) -> BoundSummary {
        BoundSummary {
            p: self.p,
            lambda1: self.lambda1,
            lambda_min: self.lambda_min,
            alpha_star: self.alpha_star,
            comparison_a: self.comparison_a,
            v: self.v_value,
            alpha1_upper_closed: self.closed_form.alpha1_upper,
            alpha_min_lower_closed: self.closed_form.alpha_min_lower,
            coupling_n: self.coupling_n,
            coupling_tau: self.coupling_tau,
            tau_measured: self.tau_measured,
        }
    }
}

/// Runs the full bound pipeline for the C_1 walk over F_p.
pub fn bound_report(modulus: &PrimeModulus, tau_measured: Option<usize>) -> Result<BoundReport> {
    let kernel = build_kernel(&StructureTensor::new(modulus), 1)?;
    bound_report_for(modulus, &kernel, tau_measured)
}

pub(crate) fn bound_report_for(
    modulus: &PrimeModulus,
    kernel: &StochasticKernel,
    tau_measured: Option<usize>,
) -> Result<BoundReport> {
    let pi = stationary(modulus);
    let spec = spectrum(kernel, &pi)?;
    let equilibrium = StochasticKernel::equilibrium(&pi)?;
    let cmp = comparison_a(kernel, &pi, &equilibrium, &pi, &default_paths(modulus)?)?;
    let cyc = cycles_v(kernel, &pi, &shortest_odd_cycles(kernel)?)?;
    let coupling = coupling_bound(modulus, DEFAULT_EPSILON)?;
    Ok(BoundReport {
        p: modulus.p(),
        lambda1: spec.lambda1(),
        lambda_min: spec.lambda_min(),
        alpha_star: spec.alpha_star,
        comparison_a: cmp.constant,
        alpha1_upper: cmp.eigenvalue_bound(0.0),
        v_value: cyc.v,
        alpha_min_lower: cyc.lower_bound,
        coupling_n: coupling.n,
        coupling_tau: coupling.tau_bound,
        closed_form: closed_form_bounds(modulus),
        tau_measured,
    })
}

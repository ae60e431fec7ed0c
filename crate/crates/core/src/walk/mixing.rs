use std::f64::consts::E;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kernel::{Distribution, StochasticKernel};
use crate::circles::CircleIndex;
use crate::error::{Error, Result};

/// The conventional mixing threshold 1/(2e).
pub const DEFAULT_EPSILON: f64 = 1.0 / (2.0 * E);

/// Largest p for which all-start mixing is run without an explicit override.
pub const EXACT_MIXING_GATE: u32 = 499;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub epsilon: f64,
    pub tau: usize,
    /// Worst-case TV distance to stationarity at t = 0, 1, ..., tau.
    pub tv_curve: Vec<f64>,
    /// Start attaining the worst case at each step.
    pub curve_starts: Vec<CircleIndex>,
    /// A start whose own mixing time equals tau.
    pub worst_start: CircleIndex,
}

/// Mixing time over every starting circle.
pub fn mixing_time(
    kernel: &StochasticKernel,
    stationary: &Distribution,
    epsilon: f64,
    max_steps: usize,
) -> Result<MixingReport> {
    let starts: Vec<usize> = (0..kernel.order()).collect();
    mixing_time_from(kernel, stationary, &starts, epsilon, max_steps)
}

/// Mixing time restricted to the given starting circles.
///
/// All starts are advanced together as the rows of one matrix.
pub fn mixing_time_from(
    kernel: &StochasticKernel,
    stationary: &Distribution,
    starts: &[CircleIndex],
    epsilon: f64,
    max_steps: usize,
) -> Result<MixingReport> {
    // ε = 1 is admitted as the trivial threshold (τ = 0).
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::BadEpsilon(epsilon));
    }
    let n = kernel.order();
    if stationary.len() != n {
        return Err(Error::LengthMismatch {
            left: stationary.len(),
            right: n,
        });
    }
    if let Some(&bad) = starts.iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            order: n,
        });
    }
    let pi = stationary.to_f64();
    let mut rows = DMatrix::from_fn(
        starts.len(),
        n,
        |r, c| {
            if starts[r] == c {
                1.0
            } else {
                0.0
            }
        },
    );
    let mut tv_curve = Vec::new();
    let mut curve_starts = Vec::new();
    for t in 0..=max_steps {
        let (worst, at) = worst_row(&rows, &pi);
        tv_curve.push(worst);
        curve_starts.push(starts.get(at).copied().unwrap_or(0));
        if worst <= epsilon {
            let worst_start = if t == 0 {
                curve_starts[0]
            } else {
                curve_starts[t - 1]
            };
            return Ok(MixingReport {
                epsilon,
                tau: t,
                tv_curve,
                curve_starts,
                worst_start,
            });
        }
        if t < max_steps {
            rows = &rows * kernel.matrix();
        }
    }
    let worst_start = *curve_starts.last().unwrap_or(&0);
    Err(Error::NotMixed(Box::new(MixingReport {
        epsilon,
        tau: max_steps,
        tv_curve,
        curve_starts,
        worst_start,
    })))
}

// Largest TV distance over rows; ties go to the first row.
fn worst_row(rows: &DMatrix<f64>, pi: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for r in 0..rows.nrows() {
        let tv = 0.5
            * pi.iter()
                .enumerate()
                .map(|(c, p)| (rows[(r, c)] - p).abs())
                .sum::<f64>();
        if tv > best.0 {
            best = (tv, r);
        }
    }
    best
}

/// Upper bound on τ(ε) from τ(1/(2e)) by submultiplicativity:
/// `tau_base · ⌈ln(1/ε)⌉`, with factor 1 at ε = 1/(2e) itself.
pub fn boost_epsilon(tau_base: usize, epsilon: f64) -> Result<usize> {
    const SLACK: f64 = 1e-12;
    if !(epsilon > 0.0 && epsilon <= DEFAULT_EPSILON + SLACK) {
        return Err(Error::BadEpsilon(epsilon));
    }
    if epsilon >= DEFAULT_EPSILON - SLACK {
        return Ok(tau_base);
    }
    let factor = ((1.0 / epsilon).ln() - SLACK).ceil() as usize;
    Ok(tau_base * factor.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circles::StructureTensor;
    use crate::modular::make_modulus;
    use crate::walk::{build_kernel, iterate, stationary, tv_distance};

    fn setup(p: u64) -> (StochasticKernel, Distribution) {
        let m = make_modulus(p).unwrap();
        (
            build_kernel(&StructureTensor::new(&m), 1).unwrap(),
            stationary(&m),
        )
    }

    // Independent oracle: iterate each start on its own and take the max hit time.
    fn per_start_tau(k: &StochasticKernel, pi: &Distribution, eps: f64) -> usize {
        (0..k.order())
            .map(|s| {
                let start = Distribution::point_mass(k.order(), s);
                (0..)
                    .find(|&t| tv_distance(&iterate(k, &start, t).unwrap(), pi).unwrap() <= eps)
                    .unwrap()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn epsilon_one_mixes_immediately() {
        let (k, pi) = setup(7);
        let rep = mixing_time(&k, &pi, 1.0, 10).unwrap();
        assert_eq!(rep.tau, 0);
        assert_eq!(rep.tv_curve.len(), 1);
    }

    #[test]
    fn matches_per_start_oracle() {
        for p in [3u64, 7, 11, 19] {
            let (k, pi) = setup(p);
            for eps in [DEFAULT_EPSILON, 0.01, 1e-6] {
                let rep = mixing_time(&k, &pi, eps, 1000).unwrap();
                assert_eq!(rep.tau, per_start_tau(&k, &pi, eps), "p={p} eps={eps}");
                assert!(rep.tv_curve[rep.tau] <= eps);
                if rep.tau > 0 {
                    assert!(rep.tv_curve[rep.tau - 1] > eps);
                    let start = Distribution::point_mass(k.order(), rep.worst_start);
                    let before = iterate(&k, &start, rep.tau - 1).unwrap();
                    assert!(tv_distance(&before, &pi).unwrap() > eps);
                }
                assert!(rep.tv_curve.windows(2).all(|w| w[1] <= w[0] + 1e-15));
            }
        }
        let (k, pi) = setup(7);
        assert!(mixing_time(&k, &pi, DEFAULT_EPSILON, 1000).unwrap().tau <= 92);
    }

    #[test]
    fn not_mixed_carries_curve() {
        let (k, pi) = setup(7);
        match mixing_time(&k, &pi, 1e-12, 2) {
            Err(Error::NotMixed(rep)) => assert_eq!(rep.tv_curve.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_start_list() {
        let (k, pi) = setup(11);
        let all = mixing_time(&k, &pi, DEFAULT_EPSILON, 100).unwrap();
        let some = mixing_time_from(&k, &pi, &[all.worst_start], DEFAULT_EPSILON, 100).unwrap();
        assert_eq!(some.tau, all.tau);
        assert!(mixing_time_from(&k, &pi, &[11], DEFAULT_EPSILON, 10).is_err());
        assert!(mixing_time(&k, &pi, 0.0, 10).is_err());
    }

    #[test]
    fn boost_examples() {
        assert_eq!(boost_epsilon(10, DEFAULT_EPSILON).unwrap(), 10);
        assert_eq!(boost_epsilon(10, (-5.0f64).exp()).unwrap(), 50);
        assert_eq!(boost_epsilon(10, 0.01).unwrap(), 50);
        assert_eq!(boost_epsilon(10, 0.15).unwrap(), 20);
        assert!(boost_epsilon(10, 0.5).is_err());
        assert!(boost_epsilon(10, 0.0).is_err());
    }

    #[test]
    fn boost_bounds_direct_measurement() {
        for p in [7u64, 11, 19] {
            let (k, pi) = setup(p);
            let base = mixing_time(&k, &pi, DEFAULT_EPSILON, 1000).unwrap().tau;
            for eps in [0.1, 0.01, 1e-4] {
                let direct = mixing_time(&k, &pi, eps, 10_000).unwrap().tau;
                assert!(direct <= boost_epsilon(base, eps).unwrap());
            }
        }
    }
}

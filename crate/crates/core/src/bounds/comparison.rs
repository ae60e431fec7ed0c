//! Path-congestion comparison of Dirichlet forms.
//!
//! Given paths in the support of K joining every transition of a second chain
//! K', the congestion constant A satisfies D' ≤ A·D, which transfers
//! eigenvalue bounds from K' to K.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::circles::StructureTensor;
use crate::error::{Error, Result};
use crate::modular::PrimeModulus;
use crate::walk::{Distribution, StochasticKernel};

/// One path γ_xy per ordered pair, stored as its state sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathAssignment {
    paths: BTreeMap<(usize, usize), Vec<usize>>,
}

impl PathAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets γ_xy; `states` runs from x to y.
    pub fn insert(&mut self, states: Vec<usize>) {
        let key = (states[0], *states.last().expect("nonempty path"));
        self.paths.insert(key, states);
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&[usize]> {
        self.paths.get(&(x, y)).map(Vec::as_slice)
    }

    pub fn remove(&mut self, x: usize, y: usize) -> Option<Vec<usize>> {
        self.paths.remove(&(x, y))
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<usize>)> {
        self.paths.iter()
    }
}

/// The congestion constant and the eigenvalue comparison it licenses.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// A: the largest weighted path load over edges of K.
    pub constant: f64,
    /// a = min_x π'(x)/π(x).
    pub a: f64,
    /// An edge attaining A.
    pub bottleneck: (usize, usize),
}

impl ComparisonReport {
    /// α_i ≤ 1 - (a/A)(1 - α'_i).
    pub fn eigenvalue_bound(&self, alpha_prime: f64) -> f64 {
        1.0 - self.a / self.constant * (1.0 - alpha_prime)
    }
}

fn validate_path(kernel: &StochasticKernel, x: usize, y: usize, states: &[usize]) -> Result<()> {
    let bad = |from, to| Error::InvalidPathEdge { x, y, from, to };
    if states.len() < 2 || states[0] != x || states[states.len() - 1] != y {
        return Err(bad(x, y));
    }
    let mut seen = HashSet::new();
    for w in states.windows(2) {
        let (from, to) = (w[0], w[1]);
        if from >= kernel.order() || to >= kernel.order() || !kernel.support(from, to) {
            return Err(bad(from, to));
        }
        if !seen.insert((from, to)) {
            return Err(bad(from, to));
        }
    }
    Ok(())
}

/// A = max_{(z,w)∈E} 1/(π(z)K(z,w)) Σ_{γ_xy ∋ (z,w)} |γ_xy| π'(x)K'(x,y).
pub fn comparison_a(
    kernel: &StochasticKernel,
    stationary: &Distribution,
    other: &StochasticKernel,
    other_stationary: &Distribution,
    paths: &PathAssignment,
) -> Result<ComparisonReport> {
    let n = kernel.order();
    for len in [other.order(), stationary.len(), other_stationary.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                left: len,
                right: n,
            });
        }
    }
    let pi = stationary.to_f64();
    let pi2 = other_stationary.to_f64();

    let mut load: HashMap<(usize, usize), f64> = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            if x == y || !other.support(x, y) {
                continue;
            }
            let states = paths.get(x, y).ok_or(Error::MissingPath(x, y))?;
            validate_path(kernel, x, y, states)?;
            let weight = (states.len() - 1) as f64 * pi2[x] * other.get(x, y);
            for e in states.windows(2) {
                *load.entry((e[0], e[1])).or_insert(0.0) += weight;
            }
        }
    }

    let mut best = (0.0f64, (0, 0));
    let mut edges: Vec<_> = load.into_iter().collect();
    edges.sort_by_key(|&(e, _)| e);
    for ((z, w), total) in edges {
        let value = total / (pi[z] * kernel.get(z, w));
        if value > best.0 {
            best = (value, (z, w));
        }
    }
    let a = (0..n).map(|x| pi2[x] / pi[x]).fold(f64::INFINITY, f64::min);
    Ok(ComparisonReport {
        constant: best.0,
        a,
        bottleneck: best.1,
    })
}

fn smallest_bridge(tensor: &StructureTensor, from: usize, to: usize) -> Option<usize> {
    (0..tensor.modulus().order())
        .find(|&k| tensor.weight(from, 1, k) > 0 && tensor.weight(k, 1, to) > 0)
}

/// Paths joining every ordered pair through the C_1 walk's support:
/// c_0 → c_1 directly, c_0 → y via {c_0, c_1, c_k, y}, and x → y (both
/// nonzero) via {x, c_k, y}, always with the smallest admissible k. Pairs
/// with x > y reuse the reversed path of (y, x).
pub fn default_paths(modulus: &PrimeModulus) -> Result<PathAssignment> {
    let tensor = StructureTensor::new(modulus);
    let n = modulus.order();
    let mut paths = PathAssignment::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let forward = if x == 0 && y == 1 {
                vec![0, 1]
            } else if x == 0 {
                let k = smallest_bridge(&tensor, 1, y).ok_or(Error::ConstructionFailed(x, y))?;
                vec![0, 1, k, y]
            } else {
                let k = smallest_bridge(&tensor, x, y).ok_or(Error::ConstructionFailed(x, y))?;
                vec![x, k, y]
            };
            let mut backward = forward.clone();
            backward.reverse();
            paths.insert(forward);
            paths.insert(backward);
        }
    }
    Ok(paths)
}

//! Odd-cycle bound on the smallest eigenvalue.

use std::collections::HashMap;

use crate::circles::StructureTensor;
use crate::error::{Error, Result};
use crate::modular::PrimeModulus;
use crate::walk::{build_kernel, Distribution, StochasticKernel};

/// One closed odd walk per state. `cycles[x]` starts and ends at x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCollection {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleCollection {
    /// Number of edges in σ_x.
    pub fn edge_count(&self, x: usize) -> usize {
        self.cycles[x].len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    /// v = max_e Σ_{σ_x ∋ e} |σ_x|_K π(x).
    pub v: f64,
    /// -1 + 2/v.
    pub lower_bound: f64,
    /// |σ_x|_K = Σ_{(z,w)∈σ_x} 1/(π(z)K(z,w)), per state.
    pub weighted_lengths: Vec<f64>,
}

fn validate_cycle(kernel: &StochasticKernel, owner: usize, states: &[usize]) -> Result<()> {
    let bad = |from, to| Error::InvalidCycleEdge { owner, from, to };
    if states.len() < 2 || states[0] != owner || states[states.len() - 1] != owner {
        return Err(bad(owner, owner));
    }
    let edges = states.len() - 1;
    if edges.is_multiple_of(2) {
        return Err(Error::EvenCycle(owner, edges));
    }
    let mut seen = Vec::with_capacity(edges);
    for w in states.windows(2) {
        let (from, to) = (w[0], w[1]);
        if from >= kernel.order() || to >= kernel.order() || !kernel.support(from, to) {
            return Err(bad(from, to));
        }
        if seen.contains(&(from, to)) {
            return Err(bad(from, to));
        }
        seen.push((from, to));
    }
    Ok(())
}

/// Evaluates v for a cycle family and the implied bound λ_min ≥ -1 + 2/v.
pub fn cycles_v(
    kernel: &StochasticKernel,
    stationary: &Distribution,
    cycles: &CycleCollection,
) -> Result<CycleReport> {
    let n = kernel.order();
    if cycles.cycles.len() != n {
        return Err(Error::LengthMismatch {
            left: cycles.cycles.len(),
            right: n,
        });
    }
    let pi = stationary.to_f64();
    let mut weighted_lengths = Vec::with_capacity(n);
    let mut load: HashMap<(usize, usize), f64> = HashMap::new();
    for (x, states) in cycles.cycles.iter().enumerate() {
        validate_cycle(kernel, x, states)?;
        let len: f64 = states
            .windows(2)
            .map(|e| 1.0 / (pi[e[0]] * kernel.get(e[0], e[1])))
            .sum();
        weighted_lengths.push(len);
        for e in states.windows(2) {
            *load.entry((e[0], e[1])).or_insert(0.0) += len * pi[x];
        }
    }
    let v = load.values().copied().fold(0.0, f64::max);
    Ok(CycleReport {
        v,
        lower_bound: -1.0 + 2.0 / v,
        weighted_lengths,
    })
}

/// Shortest odd closed walk through every state with no repeated (directed)
/// edge; among equal lengths the lexicographically smallest state sequence.
pub fn shortest_odd_cycles(kernel: &StochasticKernel) -> Result<CycleCollection> {
    let n = kernel.order();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| kernel.support(x, y)).collect())
        .collect();
    let max_len = 2 * n + 1;
    let cycles = (0..n)
        .map(|x| {
            (1..=max_len)
                .step_by(2)
                .find_map(|len| {
                    let mut walk = vec![x];
                    search(&neighbours, x, len, &mut walk).then_some(walk)
                })
                .ok_or(Error::NoOddCycle(x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CycleCollection { cycles })
}

// Depth-first extension of `walk` to exactly `len` edges ending at `target`.
fn search(neighbours: &[Vec<usize>], target: usize, len: usize, walk: &mut Vec<usize>) -> bool {
    let here = *walk.last().unwrap();
    let remaining = len + 1 - walk.len();
    if remaining == 0 {
        return here == target;
    }
    for &next in &neighbours[here] {
        if remaining == 1 && next != target {
            continue;
        }
        let repeated = walk.windows(2).any(|e| e == [here, next]);
        if repeated {
            continue;
        }
        walk.push(next);
        if search(neighbours, target, len, walk) {
            return true;
        }
        walk.pop();
    }
    false
}

/// Shortest odd cycles for the C_1 walk over F_p.
pub fn default_cycles(modulus: &PrimeModulus) -> Result<CycleCollection> {
    let kernel = build_kernel(&StructureTensor::new(modulus), 1)?;
    shortest_odd_cycles(&kernel)
}

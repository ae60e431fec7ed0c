use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::Distribution;
use crate::circles::{circle_points, quadrance, CircleIndex};
use crate::modular::PrimeModulus;

/// One walk on the plane: positions and their quadrances, t = 0..=steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkTrace {
    pub seed: u64,
    pub trial: u64,
    pub positions: Vec<(u32, u32)>,
    pub quadrances: Vec<CircleIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub p: u32,
    pub steps: usize,
    pub trials: u64,
    pub seed: u64,
    /// Final-quadrance histogram, indexed by circle.
    pub counts: Vec<u64>,
    /// Final-position histogram over F_p², indexed by `x * p + y`.
    pub plane_counts: Option<Vec<u64>>,
    /// The walk of trial 0.
    pub trace: WalkTrace,
}

impl SimulationResult {
    pub fn empirical(&self) -> Distribution {
        let total = self.trials as f64;
        Distribution::Float(self.counts.iter().map(|&c| c as f64 / total).collect())
    }
}

/// Per-trial stream: trial `i` always draws from stream `i` of the seeded
/// ChaCha generator, so results do not depend on scheduling.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(
    modulus: &PrimeModulus,
    unit: &[(u32, u32)],
    steps: usize,
    seed: u64,
    trial: u64,
    mut record: Option<&mut Vec<(u32, u32)>>,
) -> (u32, u32) {
    let p = modulus.p();
    let mut rng = trial_rng(seed, trial);
    let mut pos = (0u32, 0u32);
    if let Some(r) = record.as_deref_mut() {
        r.push(pos);
    }
    for _ in 0..steps {
        let (dx, dy) = unit[rng.gen_range(0..unit.len())];
        pos = ((pos.0 + dx) % p, (pos.1 + dy) % p);
        if let Some(r) = record.as_deref_mut() {
            r.push(pos);
        }
    }
    pos
}

/// Runs `trials` independent walks from the origin, each step adding a
/// uniform point of C_1.
pub fn simulate(
    modulus: &PrimeModulus,
    steps: usize,
    trials: u64,
    seed: u64,
    record_plane: bool,
) -> SimulationResult {
    let trials = trials.max(1);
    let unit = circle_points(modulus, 1).expect("C_1 exists").points;
    let n = modulus.order();
    let cells = if record_plane { n * n } else { 0 };

    let (counts, plane) = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; n], vec![0u64; cells]),
            |(mut counts, mut plane), trial| {
                let pos = run_trial(modulus, &unit, steps, seed, trial, None);
                counts[quadrance(modulus, pos) as usize] += 1;
                if record_plane {
                    plane[pos.0 as usize * n + pos.1 as usize] += 1;
                }
                (counts, plane)
            },
        )
        .reduce(
            || (vec![0u64; n], vec![0u64; cells]),
            |(mut a, mut pa), (b, pb)| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                pa.iter_mut().zip(pb).for_each(|(x, y)| *x += y);
                (a, pa)
            },
        );

    let mut positions = Vec::with_capacity(steps + 1);
    run_trial(modulus, &unit, steps, seed, 0, Some(&mut positions));
    let quadrances = positions
        .iter()
        .map(|&pt| quadrance(modulus, pt) as usize)
        .collect();

    SimulationResult {
        p: modulus.p(),
        steps,
        trials,
        seed,
        counts,
        plane_counts: record_plane.then_some(plane),
        trace: WalkTrace {
            seed,
            trial: 0,
            positions,
            quadrances,
        },
    }
}

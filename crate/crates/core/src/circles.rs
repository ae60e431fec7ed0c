//! The hypergroup of origin-centred circles C_0, ..., C_{p-1} in F_p².
//!
//! Stepping by a uniform point of C_i and then by a uniform point of C_j lands
//! on C_k with probability n_ij^k. For nonzero i, j the value depends only on
//! the quadratic character of `V = ij - (k - i - j)²/4`: nonsquare gives 0,
//! zero gives 1/(p+1), a nonzero square gives 2/(p+1). Index 0 is the identity.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{PrimeModulus, Residue};

/// Quadrance label of an origin-centred circle, in `0..p`.
pub type CircleIndex = usize;

/// Largest p for which [`StructureTensor::with_dense_cache`] materializes the table.
pub const DENSE_CACHE_GATE: u32 = 512;

/// x² + y² mod p.
pub fn quadrance(modulus: &PrimeModulus, (x, y): (u32, u32)) -> u32 {
    let p = modulus.p() as u64;
    ((x as u64 * x as u64 + y as u64 * y as u64) % p) as u32
}

fn check_index(modulus: &PrimeModulus, index: usize) -> Result<()> {
    if index >= modulus.order() {
        Err(Error::IndexOutOfRange {
            index,
            order: modulus.order(),
        })
    } else {
        Ok(())
    }
}

/// The points of one circle, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirclePointSet {
    pub k: CircleIndex,
    pub points: Vec<(u32, u32)>,
}

impl CirclePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Enumerates C_k by solving y² = k - x² for each x.
pub fn circle_points(modulus: &PrimeModulus, k: CircleIndex) -> Result<CirclePointSet> {
    check_index(modulus, k)?;
    let p = modulus.p();
    let mut points = Vec::with_capacity(p as usize + 1);
    for x in 0..p {
        let rhs = modulus.element(k as i64) - modulus.element(x as i64).square();
        if let Ok(root) = rhs.sqrt() {
            let y = root.value();
            points.push((x, y));
            if y != 0 {
                points.push((x, p - y));
            }
        }
    }
    points.sort_unstable();
    points.dedup();
    Ok(CirclePointSet { k, points })
}

/// |C_k|: 1 for the origin, p + 1 otherwise.
pub fn circle_size(modulus: &PrimeModulus, k: CircleIndex) -> u64 {
    if k == 0 {
        1
    } else {
        modulus.p() as u64 + 1
    }
}

/// Anything that exposes a table of exact structure constants n_ij^k.
pub trait StructureConstants {
    fn order(&self) -> usize;
    fn constant(&self, i: usize, j: usize, k: usize) -> BigRational;
}

/// Closed-form structure constants of the circle hypergroup.
///
/// Every constant is `weight / (p + 1)` with weight in {0, 1, 2} for nonzero
/// i, j, or {0, p + 1} on the identity rows.
#[derive(Clone, Debug)]
pub struct StructureTensor {
    modulus: PrimeModulus,
    inv4: u32,
    dense: Option<Vec<u8>>,
}

impl StructureTensor {
    pub fn new(modulus: &PrimeModulus) -> Self {
        let inv4 = modulus
            .element(4)
            .inv()
            .expect("4 is invertible for odd p")
            .value();
        StructureTensor {
            modulus: modulus.clone(),
            inv4,
            dense: None,
        }
    }

    /// Like [`StructureTensor::new`], but eagerly tabulates the nonzero-index
    /// weights when p ≤ [`DENSE_CACHE_GATE`].
    pub fn with_dense_cache(modulus: &PrimeModulus) -> Self {
        let mut tensor = Self::new(modulus);
        if modulus.p() <= DENSE_CACHE_GATE {
            let n = modulus.order();
            let mut table = vec![0u8; n * n * n];
            for i in 1..n {
                for j in 1..n {
                    for k in 0..n {
                        table[(i * n + j) * n + k] = tensor.nonzero_weight(i, j, k) as u8;
                    }
                }
            }
            tensor.dense = Some(table);
        }
        tensor
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn has_dense_cache(&self) -> bool {
        self.dense.is_some()
    }

    /// V = ij - (k - i - j)²/4 in F_p.
    pub fn discriminant(&self, i: usize, j: usize, k: usize) -> u32 {
        let m = &self.modulus;
        let (i, j, k) = (i as i64, j as i64, k as i64);
        let diff = m.element(k - i - j);
        (m.element(i * j) - diff.square() * m.element(self.inv4 as i64)).value()
    }

    fn nonzero_weight(&self, i: usize, j: usize, k: usize) -> u32 {
        match self.modulus.classify(self.discriminant(i, j, k)) {
            Residue::NonSquare => 0,
            Residue::Zero => 1,
            Residue::Square => 2,
        }
    }

    /// (p + 1)·n_ij^k, an exact integer. Indices must be in range.
    #[inline]
    pub fn weight(&self, i: usize, j: usize, k: usize) -> u32 {
        let n = self.modulus.order();
        debug_assert!(i < n && j < n && k < n);
        if i == 0 {
            return if k == j { self.modulus.p() + 1 } else { 0 };
        }
        if j == 0 {
            return if k == i { self.modulus.p() + 1 } else { 0 };
        }
        match &self.dense {
            Some(table) => table[(i * n + j) * n + k] as u32,
            None => self.nonzero_weight(i, j, k),
        }
    }

    /// N_ij^k: the number of step pairs in C_i × C_j that land on C_k.
    pub fn raw_count(&self, i: usize, j: usize, k: usize) -> Result<u64> {
        for idx in [i, j, k] {
            check_index(&self.modulus, idx)?;
        }
        let w = self.weight(i, j, k) as u64;
        let pairs = circle_size(&self.modulus, i) * circle_size(&self.modulus, j);
        Ok(w * pairs / (self.modulus.p() as u64 + 1))
    }

    /// Exact n_ij^k.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Result<BigRational> {
        for idx in [i, j, k] {
            check_index(&self.modulus, idx)?;
        }
        Ok(BigRational::new(
            BigInt::from(self.weight(i, j, k)),
            BigInt::from(self.modulus.p() + 1),
        ))
    }

    /// Whether α_ijk^l = Σ_t n_ij^t n_tk^l is strictly positive.
    pub fn triple_support(&self, i: usize, j: usize, k: usize, l: usize) -> Result<bool> {
        Ok(self.triple_product(i, j, k, l)? > BigRational::zero())
    }

    /// Exact α_ijk^l, the coefficient of c_l in c_i c_j c_k.
    pub fn triple_product(&self, i: usize, j: usize, k: usize, l: usize) -> Result<BigRational> {
        for idx in [i, j, k, l] {
            check_index(&self.modulus, idx)?;
        }
        let total: u64 = (0..self.modulus.order())
            .map(|t| self.weight(i, j, t) as u64 * self.weight(t, k, l) as u64)
            .sum();
        let d = BigInt::from(self.modulus.p() + 1);
        Ok(BigRational::new(BigInt::from(total), &d * &d))
    }
}

impl StructureConstants for StructureTensor {
    fn order(&self) -> usize {
        self.modulus.order()
    }

    fn constant(&self, i: usize, j: usize, k: usize) -> BigRational {
        self.structure_constant(i, j, k)
            .expect("index within order")
    }
}

/// Counts, for every k, the pairs (a, b) ∈ C_i × C_j with quadrance(a + b) = k.
pub fn bruteforce_counts(modulus: &PrimeModulus, i: usize, j: usize) -> Result<Vec<u64>> {
    let ci = circle_points(modulus, i)?;
    let cj = circle_points(modulus, j)?;
    let p = modulus.p();
    let mut hist = vec![0u64; modulus.order()];
    for &(x, y) in &ci.points {
        for &(u, v) in &cj.points {
            let q = quadrance(modulus, ((x + u) % p, (y + v) % p));
            hist[q as usize] += 1;
        }
    }
    Ok(hist)
}

/// n_ij^k by direct enumeration of C_i × C_j.
pub fn structure_constant_bruteforce(
    modulus: &PrimeModulus,
    i: usize,
    j: usize,
    k: usize,
) -> Result<BigRational> {
    check_index(modulus, k)?;
    let hist = bruteforce_counts(modulus, i, j)?;
    let pairs = circle_size(modulus, i) * circle_size(modulus, j);
    Ok(BigRational::new(BigInt::from(hist[k]), BigInt::from(pairs)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Positivity,
    Normalization,
    Commutativity,
    HermitianSupport,
    Associativity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Positivity,
        Axiom::Normalization,
        Axiom::Commutativity,
        Axiom::HermitianSupport,
        Axiom::Associativity,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Positivity => "positivity",
            Axiom::Normalization => "normalization",
            Axiom::Commutativity => "commutativity",
            Axiom::HermitianSupport => "hermitian_support",
            Axiom::Associativity => "associativity",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// First failing index tuple, if any.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub order: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is checked")
    }
}

/// Exhaustive exact check of the hypergroup axioms.
///
/// The table is rescaled to integers over the lcm of its denominators so the
/// O(n⁴) associativity sweep runs in machine integers when they fit.
pub fn validate_axioms<T: StructureConstants + ?Sized>(table: &T) -> AxiomReport {
    let n = table.order();
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut consts = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                consts.push(table.constant(i, j, k));
            }
        }
    }

    let mut checks = Vec::with_capacity(5);

    let witness = (0..n * n * n)
        .find(|&f| consts[f] < BigRational::zero())
        .map(|f| vec![f / (n * n), (f / n) % n, f % n]);
    checks.push(AxiomCheck {
        axiom: Axiom::Positivity,
        passed: witness.is_none(),
        witness,
    });

    let one = BigRational::one();
    let witness = (0..n * n)
        .find(|&ij| {
            let s: BigRational = consts[ij * n..(ij + 1) * n].iter().sum();
            s != one
        })
        .map(|ij| vec![ij / n, ij % n]);
    checks.push(AxiomCheck {
        axiom: Axiom::Normalization,
        passed: witness.is_none(),
        witness,
    });

    let mut witness = None;
    'comm: for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if consts[idx(i, j, k)] != consts[idx(j, i, k)] {
                    witness = Some(vec![i, j, k]);
                    break 'comm;
                }
            }
        }
    }
    checks.push(AxiomCheck {
        axiom: Axiom::Commutativity,
        passed: witness.is_none(),
        witness,
    });

    let mut witness = None;
    'herm: for i in 1..n {
        for j in 1..n {
            let positive = consts[idx(i, j, 0)] > BigRational::zero();
            if positive != (i == j) {
                witness = Some(vec![i, j]);
                break 'herm;
            }
        }
    }
    checks.push(AxiomCheck {
        axiom: Axiom::HermitianSupport,
        passed: witness.is_none(),
        witness,
    });

    let witness = associativity_witness(&consts, n);
    checks.push(AxiomCheck {
        axiom: Axiom::Associativity,
        passed: witness.is_none(),
        witness,
    });

    AxiomReport { order: n, checks }
}

fn associativity_witness(consts: &[BigRational], n: usize) -> Option<Vec<usize>> {
    if n == 0 {
        return None;
    }
    let lcm = consts
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<BigInt> = consts
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let small: Option<Vec<i128>> = scaled.iter().map(|v| v.to_i128()).collect();
    let fits = small.as_ref().is_some_and(|s| {
        let max = s.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        max.checked_mul(max)
            .and_then(|sq| sq.checked_mul(n as u128))
            .is_some_and(|bound| bound < i128::MAX as u128)
    });
    match (fits, small) {
        (true, Some(s)) => find_nonassociative(&s, n),
        _ => find_nonassociative(&scaled, n),
    }
}

fn find_nonassociative<T>(w: &[T], n: usize) -> Option<Vec<usize>>
where
    T: Clone + Zero + PartialEq,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut left = T::zero();
                    let mut right = T::zero();
                    for t in 0..n {
                        let a = &w[idx(i, j, t)];
                        if !a.is_zero() {
                            left = left + a * &w[idx(t, k, m)];
                        }
                        let b = &w[idx(j, k, t)];
                        if !b.is_zero() {
                            right = right + b * &w[idx(i, t, m)];
                        }
                    }
                    if left != right {
                        return Some(vec![i, j, k, m]);
                    }
                }
            }
        }
    }
    None
}

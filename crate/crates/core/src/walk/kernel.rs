use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::circles::{CircleIndex, StructureTensor};
use crate::error::{Error, Result};
use crate::modular::PrimeModulus;

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A probability vector over circle indices, exact or floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Slack allowed on the total mass of a float distribution.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

impl Distribution {
    pub fn exact(weights: Vec<BigRational>) -> Result<Self> {
        let total: BigRational = weights.iter().sum();
        if weights.iter().any(|w| w.is_negative()) || !total.is_one() {
            return Err(Error::NotADistribution);
        }
        Ok(Distribution::Exact(weights))
    }

    pub fn float(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > FLOAT_MASS_TOL {
            return Err(Error::NotADistribution);
        }
        Ok(Distribution::Float(weights))
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut w = vec![BigRational::zero(); len];
        w[at] = BigRational::one();
        Distribution::Exact(w)
    }

    pub fn uniform(len: usize) -> Self {
        Distribution::Exact(vec![BigRational::new(1.into(), len.into()); len])
    }

    pub fn len(&self) -> usize {
        match self {
            Distribution::Exact(w) => w.len(),
            Distribution::Float(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distribution::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&[BigRational]> {
        match self {
            Distribution::Exact(w) => Some(w),
            Distribution::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Distribution::Exact(w) => w.iter().map(ratio_to_f64).collect(),
            Distribution::Float(w) => w.clone(),
        }
    }

    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            Distribution::Exact(w) => ratio_to_f64(&w[i]),
            Distribution::Float(w) => w[i],
        }
    }

    /// One exact step `μK`. Fails for float distributions.
    pub fn step_exact(&self, kernel: &StochasticKernel) -> Result<Vec<BigRational>> {
        let w = self.as_exact().ok_or(Error::NotADistribution)?;
        check_len(w.len(), kernel.order())?;
        let n = kernel.order();
        Ok((0..n)
            .map(|y| {
                (0..n)
                    .filter(|&x| !w[x].is_zero())
                    .map(|x| &w[x] * kernel.exact(x, y))
                    .sum()
            })
            .collect())
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        Err(Error::LengthMismatch { left, right })
    } else {
        Ok(())
    }
}

/// A row-stochastic matrix held exactly, with a float64 projection.
#[derive(Clone, Debug)]
pub struct StochasticKernel {
    n: usize,
    exact: Vec<BigRational>,
    float: DMatrix<f64>,
}

impl StochasticKernel {
    /// Validates nonnegativity and exact unit row sums.
    pub fn from_exact_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        let mut exact = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            check_len(row.len(), n)?;
            let total: BigRational = row.iter().sum();
            if row.iter().any(|v| v.is_negative()) || !total.is_one() {
                return Err(Error::NotStochastic { row: i });
            }
            exact.extend(row);
        }
        let float = DMatrix::from_fn(n, n, |i, j| ratio_to_f64(&exact[i * n + j]));
        Ok(StochasticKernel { n, exact, float })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_exact_rows(rows).expect("identity is stochastic")
    }

    /// The chain that jumps straight to `pi` from every state.
    pub fn equilibrium(pi: &Distribution) -> Result<Self> {
        let w = pi.as_exact().ok_or(Error::NotADistribution)?;
        Self::from_exact_rows(vec![w.to_vec(); w.len()])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn exact(&self, i: usize, j: usize) -> &BigRational {
        &self.exact[i * self.n + j]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.float[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.float
    }

    /// Whether (i, j) is an edge of the support graph.
    #[inline]
    pub fn support(&self, i: usize, j: usize) -> bool {
        !self.exact(i, j).is_zero()
    }

    /// Exact `K^t`, computed over a common denominator.
    pub fn exact_power(&self, t: u32) -> ExactMatrix {
        let n = self.n;
        let denom = self
            .exact
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numer: Vec<BigInt> = self
            .exact
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        let total_denom = num_traits::pow(denom.clone(), t as usize);
        // Rows of the numerator matrix sum to denom, so every entry of its
        // t-th power is bounded by denom^t.
        let numer = match (total_denom.to_i128(), t) {
            (_, 0) => identity_numer(n),
            (Some(_), _) => {
                let base: Vec<i128> = numer.iter().map(|v| v.to_i128().unwrap()).collect();
                let mut acc = base.clone();
                for _ in 1..t {
                    acc = matmul(&acc, &base, n);
                }
                acc.into_iter().map(BigInt::from).collect()
            }
            (None, _) => {
                let mut acc = numer.clone();
                for _ in 1..t {
                    acc = matmul(&acc, &numer, n);
                }
                acc
            }
        };
        ExactMatrix {
            n,
            numer,
            denom: total_denom,
        }
    }
}

fn identity_numer(n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = BigInt::one();
    }
    v
}

fn matmul<T>(a: &[T], b: &[T], n: usize) -> Vec<T>
where
    T: Clone + Zero,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b[k * n + j];
                if !bkj.is_zero() {
                    let cur = std::mem::replace(&mut out[i * n + j], T::zero());
                    out[i * n + j] = cur + aik * bkj;
                }
            }
        }
    }
    out
}

/// Square matrix of rationals sharing one denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    pub n: usize,
    pub numer: Vec<BigInt>,
    pub denom: BigInt,
}

impl ExactMatrix {
    pub fn get(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.numer[i * self.n + j].clone(), self.denom.clone())
    }
}

/// K(i, j) = n_im^j: one step by a uniform point of C_m.
pub fn build_kernel(tensor: &StructureTensor, m: CircleIndex) -> Result<StochasticKernel> {
    let n = tensor.modulus().order();
    if m == 0 {
        return Err(Error::ZeroGenerator);
    }
    if m >= n {
        return Err(Error::IndexOutOfRange { index: m, order: n });
    }
    let denom = BigInt::from(tensor.modulus().p() + 1);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::new(tensor.weight(i, m, j).into(), denom.clone()))
                .collect()
        })
        .collect();
    StochasticKernel::from_exact_rows(rows)
}

/// π(c_0) = 1/p², π(c_j) = (p+1)/p².
pub fn stationary(modulus: &PrimeModulus) -> Distribution {
    let p = BigInt::from(modulus.p());
    let p2 = &p * &p;
    let weights = (0..modulus.order())
        .map(|k| {
            let num = if k == 0 { BigInt::one() } else { &p + 1 };
            BigRational::new(num, p2.clone())
        })
        .collect();
    Distribution::Exact(weights)
}

/// Checks π(x)K(x, y) = π(y)K(y, x) exactly. Returns the first violating
/// pair, or `None` when the chain is reversible with respect to `dist`.
pub fn detailed_balance(
    kernel: &StochasticKernel,
    dist: &Distribution,
) -> Result<Option<(usize, usize)>> {
    let pi = dist.as_exact().ok_or(Error::NotADistribution)?;
    check_len(pi.len(), kernel.order())?;
    let n = kernel.order();
    for x in 0..n {
        for y in (x + 1)..n {
            if &pi[x] * kernel.exact(x, y) != &pi[y] * kernel.exact(y, x) {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// Half the L1 distance between two distributions.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    check_len(mu.len(), nu.len())?;
    if let (Distribution::Exact(_), Distribution::Exact(_)) = (mu, nu) {
        return Ok(ratio_to_f64(&tv_distance_exact(mu, nu)?));
    }
    let (a, b) = (mu.to_f64(), nu.to_f64());
    Ok(tv_slices(&a, &b))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Exact total variation distance; both inputs must be exact.
pub fn tv_distance_exact(mu: &Distribution, nu: &Distribution) -> Result<BigRational> {
    check_len(mu.len(), nu.len())?;
    let (a, b) = match (mu.as_exact(), nu.as_exact()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NotADistribution),
    };
    let sum: BigRational = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok(sum / BigRational::from_integer(2.into()))
}

/// `start · K^t` in float64.
pub fn iterate(kernel: &StochasticKernel, start: &Distribution, t: usize) -> Result<Distribution> {
    check_len(start.len(), kernel.order())?;
    let mut row = nalgebra::RowDVector::from_vec(start.to_f64());
    for _ in 0..t {
        row = &row * kernel.matrix();
    }
    Ok(Distribution::Float(row.iter().copied().collect()))
}

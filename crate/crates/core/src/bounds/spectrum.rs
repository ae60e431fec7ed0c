use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::eigen::jacobi_eigen;
use crate::error::{Error, Result};
use crate::walk::{detailed_balance, ratio_to_f64, Distribution, StochasticKernel};

/// Spectrum of a reversible kernel, via its symmetrization on l²(π).
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// λ_0 ≥ λ_1 ≥ ... ≥ λ_{n-1}.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors of `symmetric`, column `i` for `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    /// S(x, y) = √(π(x)/π(y)) K(x, y).
    pub symmetric: DMatrix<f64>,
    /// max(λ_1, |λ_{n-1}|).
    pub alpha_star: f64,
    /// 1 - λ_1.
    pub gap: f64,
    /// min_x π(x).
    pub pi_min: f64,
}

impl SpectrumReport {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues.get(1).copied().unwrap_or(f64::NAN)
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Largest |S u - λ u| entry over all eigenpairs.
    pub fn max_residual(&self) -> f64 {
        (0..self.eigenvalues.len())
            .map(|i| {
                let u = self.eigenvectors.column(i);
                (&self.symmetric * u - u * self.eigenvalues[i]).amax()
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvector `i` mapped back to a function g = u/√π with ⟨g, g⟩_π = 1.
    pub fn eigenfunction(&self, i: usize, stationary: &Distribution) -> Vec<f64> {
        let pi = stationary.to_f64();
        self.eigenvectors
            .column(i)
            .iter()
            .zip(&pi)
            .map(|(u, p)| u / p.sqrt())
            .collect()
    }
}

/// Largest |S(x,y)² - S(y,x)²| computed in exact arithmetic, where
/// S(x,y)² = π(x) K(x,y)² / π(y). Zero iff the symmetrization is exact.
pub fn symmetrization_residual(
    kernel: &StochasticKernel,
    stationary: &Distribution,
) -> Result<BigRational> {
    let pi = stationary.as_exact().ok_or(Error::NotADistribution)?;
    let n = kernel.order();
    let sq = |x: usize, y: usize| {
        let k = kernel.exact(x, y);
        &pi[x] * k * k / &pi[y]
    };
    let mut worst = BigRational::zero();
    for x in 0..n {
        for y in (x + 1)..n {
            let d = (sq(x, y) - sq(y, x)).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

/// Eigenvalues of a kernel that is reversible with respect to `stationary`.
pub fn spectrum(kernel: &StochasticKernel, stationary: &Distribution) -> Result<SpectrumReport> {
    if let Some((x, y)) = detailed_balance(kernel, stationary)? {
        return Err(Error::NotReversible(x, y));
    }
    let pi = stationary.as_exact().ok_or(Error::NotADistribution)?;
    let n = kernel.order();
    let pif: Vec<f64> = pi.iter().map(ratio_to_f64).collect();
    // S(x,y) = π(x)K(x,y)/√(π(x)π(y)); reading the flux from the lower index
    // makes the float matrix bit-for-bit symmetric.
    let symmetric = DMatrix::from_fn(n, n, |x, y| {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let flux = ratio_to_f64(&(&pi[a] * kernel.exact(a, b)));
        if flux == 0.0 {
            0.0
        } else {
            flux / (pif[x] * pif[y]).sqrt()
        }
    });
    let eig = jacobi_eigen(&symmetric)?;
    let values = eig.values;
    let alpha_star = if n > 1 {
        values[1].max(values[n - 1].abs())
    } else {
        0.0
    };
    let gap = if n > 1 { 1.0 - values[1] } else { 1.0 };
    Ok(SpectrumReport {
        eigenvalues: values,
        eigenvectors: eig.vectors,
        symmetric,
        alpha_star,
        gap,
        pi_min: pif.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// D(f, f) = ½ Σ_{x,y} (f(x) - f(y))² π(x) K(x, y).
pub fn dirichlet_form(kernel: &StochasticKernel, stationary: &Distribution, f: &[f64]) -> f64 {
    let n = kernel.order();
    assert_eq!(f.len(), n, "function length must match state count");
    let pi = stationary.to_f64();
    let mut total = 0.0;
    for x in 0..n {
        for y in 0..n {
            let k = kernel.get(x, y);
            if k != 0.0 {
                let d = f[x] - f[y];
                total += d * d * pi[x] * k;
            }
        }
    }
    0.5 * total
}

/// ‖K_t(x,·) - π‖_TV ≤ ½ π_*^{-1/2} α_*^t.
pub fn tv_upper_theorem7(spectrum: &SpectrumReport, t: u32) -> f64 {
    0.5 / spectrum.pi_min.sqrt() * spectrum.alpha_star.powi(t as i32)
}

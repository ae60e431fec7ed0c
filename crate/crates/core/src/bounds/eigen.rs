//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Target for the off-diagonal Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; column `i` belongs to `values[i]`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes `a` by plane rotations until the off-diagonal Frobenius norm
/// drops below [`OFF_DIAGONAL_TOL`]. Only the symmetric part of `a` is used.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    assert!(a.is_square(), "eigensolver needs a square matrix");
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&m);
    while off >= OFF_DIAGONAL_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNotConverged(off));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = jacobi_eigen(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, -2.0]));
        let e = jacobi_eigen(&a).unwrap();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![3.0, 1.0, -2.0]);
    }

    #[test]
    fn agrees_with_nalgebra_and_residuals_are_small() {
        // deterministic pseudo-random symmetric matrix
        let n = 40;
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = next();
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        let ours = jacobi_eigen(&a).unwrap();
        let mut theirs: Vec<f64> = a
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.values.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10);
        }
        for i in 0..n {
            let u = ours.vectors.column(i);
            let res = &a * u - u * ours.values[i];
            assert!(res.amax() < 1e-10);
        }
        let orth = ours.vectors.transpose() * &ours.vectors - DMatrix::identity(n, n);
        assert!(orth.amax() < 1e-10);
    }
}

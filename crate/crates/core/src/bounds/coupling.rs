use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::PrimeModulus;
use crate::walk::{ratio_to_f64, Distribution, StochasticKernel};

/// Largest state count for which K⁴ is formed in exact arithmetic.
pub const EXACT_FOURTH_POWER_GATE: usize = 199;

/// p²(p-1)/(p+1)⁴, the minorization constant of the four-step kernel.
pub fn minorization_constant(p: u32) -> BigRational {
    let p = BigInt::from(p);
    let num = &p * &p * (&p - 1);
    let den = num_traits::pow(&p + 1, 4);
    BigRational::new(num, den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingBound {
    pub p: u32,
    pub epsilon: f64,
    /// 1 - p²(p-1)/(p+1)⁴.
    pub contraction: f64,
    /// Smallest n with contraction^n < ε.
    pub n: u64,
    /// 4n.
    pub tau_bound: u64,
    /// ⌈ln(1/ε)(p+1)⁴/(p²(p-1))⌉, equal to the (1 + ln 2) form at ε = 1/(2e).
    pub closed_form_n: u64,
}

fn power(base: f64, n: u64) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * base)
}

/// Smallest n with (1 - p²(p-1)/(p+1)⁴)^n < ε; τ(ε) ≤ 4n.
pub fn coupling_bound(modulus: &PrimeModulus, epsilon: f64) -> Result<CouplingBound> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadEpsilon(epsilon));
    }
    let c = ratio_to_f64(&minorization_constant(modulus.p()));
    let q = 1.0 - c;
    let mut n = ((epsilon.ln() / q.ln()).ceil() as u64).max(1);
    while power(q, n) >= epsilon {
        n += 1;
    }
    while n > 1 && power(q, n - 1) < epsilon {
        n -= 1;
    }
    let closed_form_n = ((1.0 / epsilon).ln() / c).ceil() as u64;
    Ok(CouplingBound {
        p: modulus.p(),
        epsilon,
        contraction: q,
        n,
        tau_bound: 4 * n,
        closed_form_n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoeblinReport {
    pub holds: bool,
    /// K⁴ has no zero entry.
    pub strictly_positive: bool,
    /// min_{i,j} K⁴(i, j)/π(j).
    pub min_ratio: f64,
    pub claimed_constant: f64,
    /// First (i, j) with K⁴(i, j) < c·π(j), if any.
    pub witness: Option<(usize, usize)>,
    /// Whether K⁴ was formed exactly.
    pub exact: bool,
}

/// Checks K⁴(i, j) ≥ p²(p-1)/(p+1)⁴ · π(j) entrywise, with p the state count.
pub fn doeblin_claim_check(
    kernel: &StochasticKernel,
    stationary: &Distribution,
) -> Result<DoeblinReport> {
    let n = kernel.order();
    if stationary.len() != n {
        return Err(Error::LengthMismatch {
            left: stationary.len(),
            right: n,
        });
    }
    let constant = minorization_constant(n as u32);
    let claimed_constant = ratio_to_f64(&constant);
    match stationary.as_exact() {
        Some(pi) if n <= EXACT_FOURTH_POWER_GATE => {
            let k4 = kernel.exact_power(4);
            let mut min_ratio: Option<BigRational> = None;
            let mut witness = None;
            let mut strictly_positive = true;
            for i in 0..n {
                for j in 0..n {
                    let entry = k4.get(i, j);
                    if entry == BigRational::from_integer(0.into()) {
                        strictly_positive = false;
                    }
                    let ratio = entry / &pi[j];
                    if witness.is_none() && ratio < constant {
                        witness = Some((i, j));
                    }
                    if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                        min_ratio = Some(ratio);
                    }
                }
            }
            Ok(DoeblinReport {
                holds: witness.is_none(),
                strictly_positive,
                min_ratio: min_ratio.as_ref().map_or(f64::NAN, ratio_to_f64),
                claimed_constant,
                witness,
                exact: true,
            })
        }
        _ => {
            const SLACK: f64 = 1e-12;
            let m = kernel.matrix();
            let k2 = m * m;
            let k4 = &k2 * &k2;
            let pi = stationary.to_f64();
            let mut min_ratio = f64::INFINITY;
            let mut witness = None;
            let mut strictly_positive = true;
            for i in 0..n {
                for j in 0..n {
                    let entry = k4[(i, j)];
                    if entry <= 0.0 {
                        strictly_positive = false;
                    }
                    if witness.is_none() && entry < claimed_constant * pi[j] - SLACK {
                        witness = Some((i, j));
                    }
                    min_ratio = min_ratio.min(entry / pi[j]);
                }
            }
            Ok(DoeblinReport {
                holds: witness.is_none(),
                strictly_positive,
                min_ratio,
                claimed_constant,
                witness,
                exact: false,
            })
        }
    }
}

/// Reference bounds from the path-congestion and odd-cycle constructions in
/// closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormBounds {
    /// 3(p+3)(p+1)²/p², an upper bound on the congestion constant.
    pub comparison_a: f64,
    /// 63(p+1), an upper bound on the odd-cycle constant.
    pub cycle_v: f64,
    /// 1 - 1/comparison_a.
    pub alpha1_upper: f64,
    /// -1 + 2/cycle_v.
    pub alpha_min_lower: f64,
}

pub fn closed_form_bounds(modulus: &PrimeModulus) -> ClosedFormBounds {
    let p = modulus.p() as f64;
    let comparison_a = 3.0 * (p + 3.0) * (p + 1.0).powi(2) / (p * p);
    let cycle_v = 63.0 * (p + 1.0);
    ClosedFormBounds {
        comparison_a,
        cycle_v,
        alpha1_upper: 1.0 - 1.0 / comparison_a,
        alpha_min_lower: -1.0 + 2.0 / cycle_v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circles::StructureTensor;
    use crate::modular::make_modulus;
    use crate::walk::{build_kernel, stationary, DEFAULT_EPSILON};

    #[test]
    fn coupling_for_seven() {
        let m = make_modulus(7).unwrap();
        let b = coupling_bound(&m, DEFAULT_EPSILON).unwrap();
        assert_eq!(
            minorization_constant(7),
            BigRational::new(294.into(), 4096.into())
        );
        assert!((b.contraction - 0.928_222_656_25).abs() < 1e-12);
        assert_eq!(b.n, 23);
        assert_eq!(b.tau_bound, 92);
        assert!(b.contraction.powi(23) < DEFAULT_EPSILON);
        assert!(b.contraction.powi(22) > DEFAULT_EPSILON);
        // ⌈1.693147·4096/294⌉
        assert_eq!(b.closed_form_n, 24);
        assert!(coupling_bound(&m, 0.0).is_err());
        assert!(coupling_bound(&m, 1.0).is_err());
    }

    #[test]
    fn coupling_is_monotone_in_p() {
        let mut last = 0;
        for p in [
            3u64, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83, 103, 199, 499, 4003,
        ] {
            let b = coupling_bound(&make_modulus(p).unwrap(), DEFAULT_EPSILON).unwrap();
            assert!(b.closed_form_n >= b.n);
            // p = 3 is the one exception: its contraction is weaker than p = 7's
            if p > 7 {
                assert!(b.n >= last, "p={p}");
            }
            last = b.n;
        }
    }

    #[test]
    fn claim_holds_for_small_primes() {
        for p in [3u64, 7, 11, 19, 23] {
            let m = make_modulus(p).unwrap();
            let k = build_kernel(&StructureTensor::new(&m), 1).unwrap();
            let rep = doeblin_claim_check(&k, &stationary(&m)).unwrap();
            assert!(rep.exact && rep.holds && rep.strictly_positive, "p={p}");
            assert!(rep.min_ratio >= rep.claimed_constant);
        }
        let m = make_modulus(7).unwrap();
        let k = build_kernel(&StructureTensor::new(&m), 1).unwrap();
        let rep = doeblin_claim_check(&k, &stationary(&m)).unwrap();
        assert!(rep.min_ratio >= 294.0 / 4096.0);
    }

    #[test]
    fn float_path_agrees_with_exact() {
        let m = make_modulus(11).unwrap();
        let k = build_kernel(&StructureTensor::new(&m), 1).unwrap();
        let exact = doeblin_claim_check(&k, &stationary(&m)).unwrap();
        let float = doeblin_claim_check(&k, &Distribution::Float(stationary(&m).to_f64())).unwrap();
        assert!(!float.exact && float.holds);
        assert!((exact.min_ratio - float.min_ratio).abs() < 1e-12);
    }

    #[test]
    fn identity_violates_claim() {
        let k = StochasticKernel::identity(7);
        let m = make_modulus(7).unwrap();
        let rep = doeblin_claim_check(&k, &stationary(&m)).unwrap();
        assert!(!rep.holds && !rep.strictly_positive);
        assert_eq!(rep.witness, Some((0, 1)));
    }

    #[test]
    fn closed_forms_for_seven() {
        let b = closed_form_bounds(&make_modulus(7).unwrap());
        assert!((b.alpha1_upper - (1.0 - 49.0 / 1920.0)).abs() < 1e-15);
        assert!((b.alpha_min_lower - (-1.0 + 2.0 / 504.0)).abs() < 1e-15);
        assert!((b.alpha1_upper - 0.97448).abs() < 1e-5);
        assert!((b.alpha_min_lower + 0.99603).abs() < 1e-5);
    }
}

//! Arithmetic in the prime field F_p for primes p = 3 (mod 4).
//!
//! A [`PrimeModulus`] carries a quadratic-residue table built once at
//! construction, so residue classification is a table lookup. Square roots use
//! the exponent shortcut `a^((p+1)/4)` available when p = 3 (mod 4).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Quadratic character of a field element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Residue {
    Zero,
    Square,
    NonSquare,
}

/// A validated prime `p` with `p % 4 == 3`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeModulus {
    p: u32,
    // squares[a] is true iff a is a nonzero square; squares[0] is always false.
    squares: Vec<bool>,
}

impl fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeModulus").field("p", &self.p).finish()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Validates `n` and builds its residue table.
pub fn make_modulus(n: u64) -> Result<PrimeModulus> {
    PrimeModulus::new(n)
}

impl PrimeModulus {
    pub fn new(n: u64) -> Result<Self> {
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        if n % 4 != 3 {
            return Err(Error::WrongResidueClass(n));
        }
        let p = u32::try_from(n).map_err(|_| Error::NotPrime(n))?;
        let mut squares = vec![false; p as usize];
        for a in 1..p as u64 {
            squares[((a * a) % n) as usize] = true;
        }
        Ok(PrimeModulus { p, squares })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of field elements, as an index bound.
    #[inline]
    pub fn order(&self) -> usize {
        self.p as usize
    }

    /// Reduces an arbitrary integer into the field.
    pub fn element(&self, value: i64) -> Fp<'_> {
        Fp {
            value: value.rem_euclid(self.p as i64) as u32,
            modulus: self,
        }
    }

    pub fn zero(&self) -> Fp<'_> {
        self.element(0)
    }

    pub fn one(&self) -> Fp<'_> {
        self.element(1)
    }

    /// Number of nonzero quadratic residues recorded in the table.
    pub fn square_count(&self) -> usize {
        self.squares.iter().filter(|&&s| s).count()
    }

    /// Residue class of `a mod p`.
    #[inline]
    pub fn classify(&self, a: u32) -> Residue {
        let a = (a % self.p) as usize;
        if a == 0 {
            Residue::Zero
        } else if self.squares[a] {
            Residue::Square
        } else {
            Residue::NonSquare
        }
    }

    /// Modular exponentiation by squaring.
    pub fn pow(&self, base: u32, mut exp: u64) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u64;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }
}

/// An element of F_p tied to its modulus.
#[derive(Clone, Copy)]
pub struct Fp<'m> {
    value: u32,
    modulus: &'m PrimeModulus,
}

impl fmt::Debug for Fp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.p)
    }
}

impl PartialEq for Fp<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.modulus.p == other.modulus.p
    }
}

impl Eq for Fp<'_> {}

impl<'m> Fp<'m> {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> &'m PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_square(self) -> Residue {
        self.modulus.classify(self.value)
    }

    /// Canonical square root: the smaller of the two roots `s`, `p - s`.
    pub fn sqrt(self) -> Result<Fp<'m>> {
        let m = self.modulus;
        match self.is_square() {
            Residue::Zero => Ok(self),
            Residue::NonSquare => Err(Error::NotASquare {
                value: self.value,
                p: m.p,
            }),
            Residue::Square => {
                let s = m.pow(self.value, (m.p as u64 + 1) / 4);
                Ok(Fp {
                    value: s.min(m.p - s),
                    modulus: m,
                })
            }
        }
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Fp<'m>> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.modulus.p));
        }
        let m = self.modulus;
        Ok(Fp {
            value: m.pow(self.value, m.p as u64 - 2),
            modulus: m,
        })
    }

    pub fn square(self) -> Fp<'m> {
        self * self
    }
}

pub fn is_square(a: Fp<'_>) -> Residue {
    a.is_square()
}

pub fn sqrt_mod(a: Fp<'_>) -> Result<Fp<'_>> {
    a.sqrt()
}

pub fn inv_mod(a: Fp<'_>) -> Result<Fp<'_>> {
    a.inv()
}

impl<'m> Add for Fp<'m> {
    type Output = Fp<'m>;
    fn add(self, rhs: Self) -> Self::Output {
        debug_assert_eq!(self.modulus.p, rhs.modulus.p);
        let p = self.modulus.p as u64;
        Fp {
            value: ((self.value as u64 + rhs.value as u64) % p) as u32,
            modulus: self.modulus,
        }
    }
}

impl<'m> Sub for Fp<'m> {
    type Output = Fp<'m>;
    fn sub(self, rhs: Self) -> Self::Output {
        self + (-rhs)
    }
}

impl<'m> Neg for Fp<'m> {
    type Output = Fp<'m>;
    fn neg(self) -> Self::Output {
        let p = self.modulus.p;
        Fp {
            value: (p - self.value) % p,
            modulus: self.modulus,
        }
    }
}

impl<'m> Mul for Fp<'m> {
    type Output = Fp<'m>;
    fn mul(self, rhs: Self) -> Self::Output {
        debug_assert_eq!(self.modulus.p, rhs.modulus.p);
        let p = self.modulus.p as u64;
        Fp {
            value: (self.value as u64 * rhs.value as u64 % p) as u32,
            modulus: self.modulus,
        }
    }
}

use thiserror::Error;

use crate::walk::MixingReport;

/// Errors raised by the circle-walk library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not congruent to 3 mod 4")]
    WrongResidueClass(u64),
    #[error("{value} is not a square mod {p}")]
    NotASquare { value: u32, p: u32 },
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("the walk generator must be a nonzero circle")]
    ZeroGenerator,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("row {row} of the kernel is not a probability vector")]
    NotStochastic { row: usize },
    #[error("distribution is not a probability vector")]
    NotADistribution,
    #[error("chain did not mix within {} steps", .0.tv_curve.len().saturating_sub(1))]
    NotMixed(Box<MixingReport>),
    #[error("epsilon {0} is outside the admissible range")]
    BadEpsilon(f64),
    #[error("Jacobi iteration stalled with off-diagonal norm {0:e}")]
    EigenNotConverged(f64),
    #[error("kernel is not reversible: detailed balance fails at ({0}, {1})")]
    NotReversible(usize, usize),
    #[error("no path assigned for pair ({0}, {1})")]
    MissingPath(usize, usize),
    #[error("path for ({x}, {y}) is invalid at edge ({from}, {to})")]
    InvalidPathEdge {
        x: usize,
        y: usize,
        from: usize,
        to: usize,
    },
    #[error("cycle for state {0} has even length {1}")]
    EvenCycle(usize, usize),
    #[error("cycle for state {owner} is invalid at edge ({from}, {to})")]
    InvalidCycleEdge {
        owner: usize,
        from: usize,
        to: usize,
    },
    #[error("no intermediate state joins ({0}, {1})")]
    ConstructionFailed(usize, usize),
    #[error("no odd cycle through state {0}")]
    NoOddCycle(usize),
    #[error("no prime p = 3 mod 4 in [{0}, {1}]")]
    EmptyRange(u64, u64),
    #[error("p = {p} exceeds the gate {gate} for {what}; pass --force to override")]
    Gated {
        p: u32,
        gate: u32,
        what: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Spatial dimension outside `1..=3`.
    InvalidDimension(usize),
    /// Lattice half-extent `N` below one.
    InvalidHalfExtent(i64),
    /// Momentum spacing not strictly positive (or not finite).
    InvalidSpacing(f64),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Hopping parameter κ must be strictly positive.
    NonPositiveKappa(f64),
    NegativeLambda(f64),
    NegativeKineticMass(f64),
    NonFiniteParameter(&'static str),
    /// The basis was enumerated on a different lattice.
    BasisMismatch,
    /// An operator term produced a state outside the basis.
    StateOutsideBasis,
    NonFiniteEntry {
        row: usize,
        col: usize,
    },
    EmptyOperator,
    InvalidEntry {
        row: usize,
        col: usize,
        dim: usize,
    },
    NoConvergence {
        dim: usize,
        iterations: usize,
    },
    Unnormalized {
        norm: f64,
    },
    VectorLength {
        expected: usize,
        found: usize,
    },
    OracleSizeGuard {
        dim: usize,
        max: usize,
    },
    InvalidGrid(&'static str),
    /// No sign change of the lowest M² was found; carries the scanned `(κ, M₁²)` pairs.
    NoBracket {
        lambda: f64,
        scanned: Vec<(f64, f64)>,
    },
    InsufficientPoints {
        needed: usize,
        found: usize,
    },
    InvalidTolerance(f64),
    InvalidReference(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(d) => write!(f, "spatial dimension {d} not in 1..=3"),
            Error::InvalidHalfExtent(n) => write!(f, "lattice half-extent N={n} must be >= 1"),
            Error::InvalidSpacing(dk) => write!(f, "momentum spacing dk={dk} must be > 0"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonPositiveKappa(k) => write!(f, "kappa={k} must be > 0"),
            Error::NegativeLambda(l) => write!(f, "lambda={l} must be >= 0"),
            Error::NegativeKineticMass(m) => write!(f, "kinetic mass squared {m} must be >= 0"),
            Error::NonFiniteParameter(name) => write!(f, "parameter {name} is not finite"),
            Error::BasisMismatch => write!(f, "basis was built on a different lattice"),
            Error::StateOutsideBasis => write!(f, "operator term left the momentum sector"),
            Error::NonFiniteEntry { row, col } => {
                write!(f, "non-finite matrix entry at ({row}, {col})")
            }
            Error::EmptyOperator => write!(f, "operator has dimension zero"),
            Error::InvalidEntry { row, col, dim } => {
                write!(f, "entry ({row}, {col}) invalid for dimension {dim}")
            }
            Error::NoConvergence { dim, iterations } => write!(
                f,
                "eigensolver failed to converge (dim {dim}, {iterations} iterations)"
            ),
            Error::Unnormalized { norm } => write!(f, "vector norm {norm} differs from 1"),
            Error::VectorLength { expected, found } => {
                write!(
                    f,
                    "vector length {found} does not match basis size {expected}"
                )
            }
            Error::OracleSizeGuard { dim, max } => {
                write!(f, "oracle refuses basis of {dim} states (max {max})")
            }
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::NoBracket { lambda, scanned } => write!(
                f,
                "no sign change of M1^2 found for lambda={lambda} after {} evaluations",
                scanned.len()
            ),
            Error::InsufficientPoints { needed, found } => {
                write!(
                    f,
                    "need at least {needed} points inside the fit window, found {found}"
                )
            }
            Error::InvalidTolerance(t) => write!(f, "tolerance {t} must be > 0"),
            Error::InvalidReference(r) => write!(f, "reference value {r} must be > 0"),
        }
    }
}

impl core::error::Error for Error {}

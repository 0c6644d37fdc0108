use thiserror::Error;

use crate::clifford::Chirality;

/// Errors raised by the fiber calculus (forms, spinors, bundle maps).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("complex dimension must satisfy 1 <= n <= {max}, got {n}")]
    InvalidDimension { n: usize, max: usize },
    #[error("context mismatch: operands live over n = {left} and n = {right}")]
    ContextMismatch { left: usize, right: usize },
    #[error("bidegree ({p}, {q}) out of range for n = {n}")]
    BidegreeOutOfRange { n: usize, p: usize, q: usize },
    #[error("form is not of pure bidegree")]
    NotPure,
    #[error("form is not of pure total degree")]
    NotHomogeneous,
    #[error("form has holomorphic degree {p}; expected an antiholomorphic (0,q) form")]
    NotAntiholomorphic { p: usize },
    #[error("degree k = {k} out of range 0..={max}")]
    DegreeOutOfRange { k: i64, max: usize },
    #[error("degrees do not pair: {left} + {right} != {total}")]
    DegreeMismatch {
        left: usize,
        right: usize,
        total: usize,
    },
    #[error("covector has {got} coefficients, expected n = {n}")]
    CovectorLength { n: usize, got: usize },
    #[error("rank must be at least 1")]
    InvalidRank,
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("spinor has mixed chirality")]
    MixedChirality,
    #[error("chirality mismatch: expected {expected:?}, got {got:?}")]
    ChiralityMismatch { expected: Chirality, got: Chirality },
    #[error("a component of degree {q} contradicts the declared {declared:?} chirality")]
    ChiralityViolated { declared: Chirality, q: usize },
    #[error(
        "A_phi exchanges chirality only for odd n (real dimension 2 or 6 mod 8 and their \
         analogues); got n = {n}"
    )]
    EvenDimension { n: usize },
    #[error("phi matrix is not {class}: entry ({i}, {j}) breaks the symmetry")]
    SymmetryViolated {
        class: &'static str,
        i: usize,
        j: usize,
    },
    #[error("phi matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("frame scalar for eta must have modulus one")]
    NonUnitEta,
    #[error("invalid rank parameter for {kind}: {reason}")]
    InvalidExample { kind: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! The deformation `D_s = D + sA_φ` on the flat torus `(ℝ/2πℤ)²` for a
//! trivial line bundle, `φ = (w)`.
//!
//! With the fiber conventions of [`crate::perturbation`] in dimension one,
//! `A_φ u = −conj(w u) θ̄¹`, so on the `θ̄¹` coefficient
//!
//! ```text
//! D_s u = (∂_x + i∂_y) u − s · conj(w u).
//! ```
//!
//! The conjugation makes `D_s` only real-linear; all spectral work is done
//! for `D_sᵀ D_s` on the real vector space underlying the grid functions.

pub mod config;
pub mod eigen;
pub mod lattice;
pub mod mass;
pub mod operator;
pub mod svg;
pub mod sweep;

pub use config::{FourierMode, PhiPreset, SimConfig};
pub use eigen::{lobpcg, EigenOptions, EigenResult, FourierPreconditioner};
pub use lattice::{Grid, LatticeField};
pub use mass::{outside_mass, outside_mass_for, singular_set, SingularSet};
pub use operator::DeformedOperator;
pub use sweep::{
    dense_singular_values, run_sweep, smallest_eigenpairs, ContractCheck, SpectralReport, SweepEntry,
    SweepOutcome,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(
        "eigensolver did not converge in {iterations} iterations \
         (worst residual {residual:.3e}, threshold {threshold:.3e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        threshold: f64,
    },
    #[error("field norm {norm} is not 1 within tolerance")]
    NotNormalized { norm: f64 },
}

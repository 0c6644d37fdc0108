//! Exact fiber calculus for conjugate-linear perturbations `A_φ` of twisted
//! spin-c Dirac operators on almost hermitian manifolds, together with a
//! flat-torus simulator for the deformation `D + sA_φ` in complex
//! dimension one.
//!
//! * [`exterior`]: forms on the model fiber, wedge, contraction, inner product.
//! * [`hodge`]: the conjugate-linear Hodge star and its rescaling `τ`.
//! * [`clifford`]: Clifford multiplication, spinors and principal symbols.
//! * [`perturbation`]: `A_φ`, its adjoint and the concentrating condition.
//! * [`condition`]: randomized trials of the concentrating condition.
//! * [`identities`]: randomized exact checks of the algebraic identities.
//! * [`torus`]: the discretized deformation on the flat torus.
//! * [`cli`]: the `conjpert` command-line front end.

pub mod clifford;
pub mod cli;
pub mod condition;
pub mod error;
pub mod exterior;
pub mod hodge;
pub mod identities;
pub mod matrix;
pub mod perturbation;
pub mod scalar;
pub mod torus;

pub use error::{Error, Result};
pub use exterior::{contract, inner, wedge, Covector, FiberContext, Form, Monomial};
pub use scalar::{Complex64, Exact, Scalar, ScalarMode};

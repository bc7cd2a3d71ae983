//! Canonical duality for problems of the form `f = q_0 + V∘q`, where the
//! `q_i` are quadratic and `V` is convex.
//!
//! The crate builds the total complementary function `Ξ(x, σ) = q_0(x) + ⟨q(x), σ⟩ − V*(σ)`,
//! the dual function `D(σ) = Ξ(x, σ)` with `A(σ) x = b(σ)`, locates dual
//! critical points with a damped Newton iteration, and classifies critical
//! pairs:
//!
//! * when `A(σ̄) ⪰ 0`, `x̄` is a global minimizer of `f` and `σ̄` a global
//!   maximizer of `D` over `S_col⁺` ([`triality::verdict_psd`]);
//! * when `A(σ̄) ≺ 0` and `V` is twice differentiable with positive definite
//!   Hessian, local min/max behaviour of both `x̄` and `σ̄` is read off the
//!   spectrum of an auxiliary operator `H` ([`triality::verdict_negdef`]);
//! * for cone indicators `V = ι_{C_J}` the quadratically constrained case
//!   gets Lagrangian certificates ([`cone`]).
//!
//! Brute-force verifiers live in [`oracle`]; they are used by the tests and
//! the `cdt check` command, never by the analysis path itself.

pub mod canonical;
pub mod commands;
pub mod complementary;
pub mod cone;
pub mod document;
pub mod dual;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod quadratic;
pub mod reproduce;
pub mod spectral;
pub mod tolerance;
pub mod triality;

pub use canonical::{CanonicalFunction, Kind, SmoothnessClass};
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use quadratic::{Assembled, ProblemInstance, QuadraticForm};
pub use tolerance::Tolerances;

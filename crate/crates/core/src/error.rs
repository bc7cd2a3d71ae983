use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix {index} is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { index: usize, asymmetry: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point is on the boundary of or outside the domain: {0}")]
    BoundaryOrOutsideDomain(String),
    #[error("operation `{op}` is not supported for canonical function kind {kind}")]
    UnsupportedForKind {
        op: &'static str,
        kind: &'static str,
    },
    #[error("x is not in X0 (q(x) is not interior to dom V)")]
    NotInX0,
    #[error("b(sigma) is not in the column space of A(sigma) (residual {residual:e})")]
    NotInYcol { residual: f64 },
    #[error("dual Hessian is singular at iteration {iteration}")]
    SingularHessian { iteration: usize },
    #[error(
        "Newton step left the starting region after {halvings} halvings at iteration {iteration}"
    )]
    LeftRegion { iteration: usize, halvings: usize },
    #[error("backtracking found no decrease of the dual gradient norm at iteration {iteration}")]
    LineSearchFailed { iteration: usize },
    #[error("no convergence within {iterations} iterations (gradient norm {grad_norm:e})")]
    MaxIterations { iterations: usize, grad_norm: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("A(sigma) is not negative definite (largest eigenvalue {lambda_max:e})")]
    NotNegativeDefinite { lambda_max: f64 },
    #[error("canonical function is not twice differentiable with positive definite Hessian")]
    NotGammaSC2,
    #[error("pair is not critical (residuals {r_x:e}, {r_sigma:e})")]
    NotCritical { r_x: f64, r_sigma: f64 },
    #[error("finite difference stencil left the domain")]
    StencilLeftDomain,
    #[error("search region contains no point of dom V")]
    EmptySearchRegion,
    #[error("malformed problem document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! The primal function `f = q_0 + V∘q`, the total complementary function
//! `Ξ(x, σ) = L(x, σ) − V*(σ)`, their derivatives and stationarity residuals.

use crate::canonical::SmoothnessClass;
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, symmetrize, Matrix, Vector};
use crate::quadratic::ProblemInstance;

/// A primal point tagged with membership of `X_0 = {x : q(x) ∈ int dom V}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub x: Vector,
    pub in_x0: bool,
}

impl PrimalPoint {
    pub fn new(p: &ProblemInstance, x: Vector) -> Result<Self> {
        let in_x0 = in_x0(p, &x)?;
        Ok(Self { x, in_x0 })
    }
}

pub fn in_x0(p: &ProblemInstance, x: &Vector) -> Result<bool> {
    Ok(p.v().in_int_dom(&p.eval_q(x)?))
}

/// `Ξ(x, σ)`; `−∞` when `σ ∉ dom V*`.
pub fn xi_value(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<f64> {
    let conj = p.v().conjugate(sigma)?;
    if conj == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(p.lagrangian(x, sigma)? - conj)
}

/// `f(x) = q_0(x) + V(q(x))`; `+∞` outside `dom f`.
pub fn f_value(p: &ProblemInstance, x: &Vector) -> Result<f64> {
    let q = p.eval_q(x)?;
    Ok(p.q0().eval(x) + p.v().value(&q)?)
}

fn require_smooth(p: &ProblemInstance, op: &'static str) -> Result<()> {
    if p.v().smoothness_class() < SmoothnessClass::GammaSC {
        return Err(Error::UnsupportedForKind {
            op,
            kind: p.v().kind().name(),
        });
    }
    Ok(())
}

/// `∇f(x) = A_0 x − b_0 + Σ ∂V/∂y_i(q(x)) (A_i x − b_i)` on `X_0`.
pub fn f_grad(p: &ProblemInstance, x: &Vector) -> Result<Vector> {
    require_smooth(p, "f_grad")?;
    let q = p.eval_q(x)?;
    if !p.v().in_int_dom(&q) {
        return Err(Error::NotInX0);
    }
    let dv = p.v().grad(&q)?;
    let g = p.constraint_gradients(x)?;
    Ok(p.q0().grad(x) + g * dv)
}

/// `∇²f(x) = A_0 + Σ ∂V/∂y_i(q(x)) A_i + G ∇²V(q(x)) Gᵀ`, where the columns of
/// `G` are `A_i x − b_i` (so `Gᵀu = v_u`).
pub fn f_hess(p: &ProblemInstance, x: &Vector) -> Result<Matrix> {
    require_smooth(p, "f_hess")?;
    let q = p.eval_q(x)?;
    if !p.v().in_int_dom(&q) {
        return Err(Error::NotInX0);
    }
    let dv = p.v().grad(&q)?;
    let d2v = p.v().hess(&q)?;
    let mut h = p.q0().a().clone();
    for (i, s) in dv.iter().enumerate() {
        h += p.constraint(i + 1).a() * *s;
    }
    let g = p.constraint_gradients(x)?;
    h += &g * d2v * g.transpose();
    Ok(symmetrize(&h))
}

/// `∇_x Ξ(x, σ) = A(σ) x − b(σ)`.
pub fn xi_grad_x(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<Vector> {
    p.check_x(x)?;
    let asm = p.assemble(sigma)?;
    Ok(&asm.a * x - asm.b)
}

/// `∇²_xx Ξ(·, σ) = A(σ)`.
pub fn xi_hess_xx(p: &ProblemInstance, sigma: &Vector) -> Result<Matrix> {
    Ok(p.assemble(sigma)?.a)
}

/// `∇_σ Ξ(x, σ) = q(x) − ∇V*(σ)` on `int dom V*`.
pub fn xi_grad_sigma(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<Vector> {
    let q = p.eval_q(x)?;
    Ok(q - p.v().conj_grad(sigma)?)
}

/// ∞-norms of the two halves of `∇Ξ(x, σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResidual {
    pub r_x: f64,
    pub r_sigma: f64,
}

impl PairResidual {
    pub fn is_critical(&self, tol: f64) -> bool {
        self.r_x <= tol && self.r_sigma <= tol
    }
}

pub fn critical_pair_residual(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
) -> Result<PairResidual> {
    let r_sigma = inf_norm(&xi_grad_sigma(p, x, sigma)?);
    let r_x = inf_norm(&xi_grad_x(p, x, sigma)?);
    Ok(PairResidual { r_x, r_sigma })
}

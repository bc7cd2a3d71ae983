//! Region classification of the dual variable, the dual function
//! `D(σ) = Ξ(x, σ)` with `A(σ) x = b(σ)`, its derivatives on `int S_0`, and a
//! damped Newton solver for `∇D(σ) = 0`.

use log::{debug, trace};
use nalgebra::LU;
use serde::Serialize;

use crate::complementary::xi_value;
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, sym_eigenvalues, sym_pinv_solve, symmetrize, Matrix, Vector};
use crate::quadratic::ProblemInstance;
use crate::tolerance::Tolerances;

/// Membership of `σ` in the sets `Y_0, Y^±, Y_col, Y_col^±` and `dom V*`.
///
/// The `S`-sets are the `Y`-sets intersected with `dom V*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLabel {
    pub in_dom_vstar: bool,
    pub in_int_dom_vstar: bool,
    /// `det A(σ) ≠ 0`
    pub in_y0: bool,
    /// `A(σ) ≻ 0`
    pub in_yplus: bool,
    /// `A(σ) ≺ 0`
    pub in_yminus: bool,
    /// `b(σ) ∈ Im A(σ)`
    pub in_ycol: bool,
    pub in_ycol_plus: bool,
    pub in_ycol_minus: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Number of eigenvalues of `A(σ)` above the definiteness threshold.
    pub positive_count: usize,
    /// Number of eigenvalues below minus the threshold.
    pub negative_count: usize,
}

impl RegionLabel {
    pub fn in_s0(&self) -> bool {
        self.in_y0 && self.in_dom_vstar
    }
    pub fn in_splus(&self) -> bool {
        self.in_yplus && self.in_dom_vstar
    }
    pub fn in_sminus(&self) -> bool {
        self.in_yminus && self.in_dom_vstar
    }
    pub fn in_scol(&self) -> bool {
        self.in_ycol && self.in_dom_vstar
    }
    pub fn in_scol_plus(&self) -> bool {
        self.in_ycol_plus && self.in_dom_vstar
    }
    pub fn in_scol_minus(&self) -> bool {
        self.in_ycol_minus && self.in_dom_vstar
    }
    /// Some eigenvalue of `A(σ)` lies inside the definiteness band.
    pub fn near_singular(&self) -> bool {
        !self.in_y0
    }
    /// Short name of the most specific region.
    pub fn name(&self) -> &'static str {
        match (self.in_dom_vstar, self.in_yplus, self.in_yminus) {
            (false, _, _) => "outside dom V*",
            (true, true, _) => "S+",
            (true, _, true) => "S-",
            _ if self.in_s0() => "S0",
            _ if self.in_scol_plus() => "Scol+",
            _ if self.in_scol_minus() => "Scol-",
            _ if self.in_scol() => "Scol",
            _ => "outside Scol",
        }
    }
}

/// A dual point with its region label, `x(σ)` and `D(σ)` where defined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPoint {
    pub sigma: Vector,
    pub region: RegionLabel,
    pub x_of_sigma: Option<Vector>,
    pub d_value: Option<f64>,
}

impl DualPoint {
    pub fn at(p: &ProblemInstance, sigma: &Vector, tol: &Tolerances) -> Result<Self> {
        let (region, x) = analyze(p, sigma, tol)?;
        let d_value = match (&x, region.in_dom_vstar) {
            (Some(x), true) => Some(xi_value(p, x, sigma)?),
            _ => None,
        };
        Ok(Self {
            sigma: sigma.clone(),
            region,
            x_of_sigma: x,
            d_value,
        })
    }
}

/// Classifies `σ` and returns a solution of `A(σ) x = b(σ)` when one exists.
fn analyze(
    p: &ProblemInstance,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<(RegionLabel, Option<Vector>)> {
    let asm = p.assemble(sigma)?;
    let ev = sym_eigenvalues(&asm.a);
    let lambda_min = ev[0];
    let lambda_max = ev[ev.len() - 1];
    let scale = lambda_min.abs().max(lambda_max.abs());
    let t = tol.psd * scale;
    let positive_count = ev.iter().filter(|&&l| l > t).count();
    let negative_count = ev.iter().filter(|&&l| l < -t).count();
    let in_y0 = positive_count + negative_count == ev.len();

    let mut x = None;
    if in_y0 {
        x = LU::new(asm.a.clone()).solve(&asm.b);
    }
    let x = x.unwrap_or_else(|| sym_pinv_solve(&asm.a, &asm.b, t));
    let residual = inf_norm(&(&asm.a * &x - &asm.b));
    let in_ycol = residual.is_finite() && residual <= tol.range * (1.0 + inf_norm(&asm.b));

    let label = RegionLabel {
        in_dom_vstar: p.v().in_dom_conj(sigma),
        in_int_dom_vstar: p.v().in_int_dom_conj(sigma),
        in_y0,
        in_yplus: lambda_min > t,
        in_yminus: lambda_max < -t,
        in_ycol,
        in_ycol_plus: in_ycol && lambda_min >= -t,
        in_ycol_minus: in_ycol && lambda_max <= t,
        lambda_min,
        lambda_max,
        positive_count,
        negative_count,
    };
    Ok((label, in_ycol.then_some(x)))
}

pub fn classify_sigma(p: &ProblemInstance, sigma: &Vector) -> Result<RegionLabel> {
    classify_sigma_with(p, sigma, &Tolerances::default())
}

pub fn classify_sigma_with(
    p: &ProblemInstance,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<RegionLabel> {
    Ok(analyze(p, sigma, tol)?.0)
}

/// `x(σ) = A(σ)⁻¹ b(σ)`, or the minimum-norm solution when `A(σ)` is singular.
pub fn solve_x_of_sigma(p: &ProblemInstance, sigma: &Vector) -> Result<Vector> {
    let (_, x) = analyze(p, sigma, &Tolerances::default())?;
    match x {
        Some(x) => Ok(x),
        None => {
            let asm = p.assemble(sigma)?;
            let scale = crate::linalg::sym_norm2(&asm.a);
            let x = sym_pinv_solve(&asm.a, &asm.b, Tolerances::default().psd * scale);
            Err(Error::NotInYcol {
                residual: inf_norm(&(&asm.a * x - &asm.b)),
            })
        }
    }
}

/// `D(σ)`; `None` outside `S_col` where the dual function is undefined.
pub fn d_value(p: &ProblemInstance, sigma: &Vector) -> Result<Option<f64>> {
    Ok(DualPoint::at(p, sigma, &Tolerances::default())?.d_value)
}

fn interior_x(
    p: &ProblemInstance,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<(Vector, LU<f64, nalgebra::Dyn, nalgebra::Dyn>)> {
    let (label, _) = analyze(p, sigma, tol)?;
    if !label.in_int_dom_vstar {
        return Err(Error::BoundaryOrOutsideDomain(
            "sigma not in int dom V*".into(),
        ));
    }
    if !label.in_y0 {
        return Err(Error::BoundaryOrOutsideDomain(
            "A(sigma) is singular (sigma not in S0)".into(),
        ));
    }
    let asm = p.assemble(sigma)?;
    let lu = LU::new(asm.a);
    let x = lu
        .solve(&asm.b)
        .ok_or_else(|| Error::BoundaryOrOutsideDomain("A(sigma) is singular".into()))?;
    Ok((x, lu))
}

/// `∇D(σ) = q(x(σ)) − ∇V*(σ)` on `S_0 ∩ int dom V*`.
pub fn d_grad(p: &ProblemInstance, sigma: &Vector) -> Result<Vector> {
    d_grad_with(p, sigma, &Tolerances::default())
}

pub fn d_grad_with(p: &ProblemInstance, sigma: &Vector, tol: &Tolerances) -> Result<Vector> {
    let (x, _) = interior_x(p, sigma, tol)?;
    Ok(p.eval_q(&x)? - p.v().conj_grad(sigma)?)
}

/// `∇²D(σ)_{ik} = −⟨A_i x − b_i, A(σ)⁻¹ (A_k x − b_k)⟩ − ∂²V*/∂σ_i∂σ_k` at `x = x(σ)`.
pub fn d_hess(p: &ProblemInstance, sigma: &Vector) -> Result<Matrix> {
    d_hess_with(p, sigma, &Tolerances::default())
}

pub fn d_hess_with(p: &ProblemInstance, sigma: &Vector, tol: &Tolerances) -> Result<Matrix> {
    let (x, lu) = interior_x(p, sigma, tol)?;
    let g = p.constraint_gradients(&x)?;
    let z = lu
        .solve(&g)
        .ok_or_else(|| Error::BoundaryOrOutsideDomain("A(sigma) is singular".into()))?;
    let h = -(g.transpose() * z) - p.v().conj_hess(sigma)?;
    Ok(symmetrize(&h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on `‖∇D‖∞`.
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub tolerances: Tolerances,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iterations: 100,
            max_halvings: 40,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    pub point: DualPoint,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Damped Newton iteration for `∇D(σ) = 0` started at `sigma0 ∈ int S_0 ∩ int dom V*`.
///
/// Every accepted iterate keeps the inertia of `A(σ)` found at `sigma0` and
/// stays in `int dom V*`; steps are halved until that holds and `‖∇D‖`
/// decreases.
pub fn newton_critical_point(
    p: &ProblemInstance,
    sigma0: &Vector,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    let tol = &opts.tolerances;
    let start = classify_sigma_with(p, sigma0, tol)?;
    if !start.in_int_dom_vstar {
        return Err(Error::PreconditionFailed(
            "starting point is not in int dom V*".into(),
        ));
    }
    if !start.in_y0 {
        return Err(Error::PreconditionFailed(
            "starting point is not in S0 (A(sigma) singular)".into(),
        ));
    }
    let signature = (start.positive_count, start.negative_count);
    let same_region = |s: &Vector| -> bool {
        match classify_sigma_with(p, s, tol) {
            Ok(l) => {
                l.in_int_dom_vstar && l.in_y0 && (l.positive_count, l.negative_count) == signature
            }
            Err(_) => false,
        }
    };

    let mut sigma = sigma0.clone();
    let mut grad = d_grad_with(p, &sigma, tol)?;
    let mut norm = inf_norm(&grad);
    for iteration in 0..=opts.max_iterations {
        trace!("newton iteration {iteration}: |grad D| = {norm:e}");
        if norm <= opts.grad_tol {
            debug!("newton converged after {iteration} iterations");
            return Ok(NewtonReport {
                point: DualPoint::at(p, &sigma, tol)?,
                iterations: iteration,
                grad_norm: norm,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }
        let hess = d_hess_with(p, &sigma, tol)?;
        let step = LU::new(hess)
            .solve(&(-&grad))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularHessian { iteration })?;

        let mut t = 1.0;
        let mut saw_region = false;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &sigma + &step * t;
            if same_region(&trial) {
                saw_region = true;
                let g = d_grad_with(p, &trial, tol)?;
                let n = inf_norm(&g);
                if n < norm {
                    accepted = Some((trial, g, n));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((s, g, n)) => {
                sigma = s;
                grad = g;
                norm = n;
            }
            None if saw_region => return Err(Error::LineSearchFailed { iteration }),
            None => {
                return Err(Error::LeftRegion {
                    iteration,
                    halvings: opts.max_halvings,
                })
            }
        }
    }
    Err(Error::MaxIterations {
        iterations: opts.max_iterations,
        grad_norm: norm,
    })
}

//! Verdicts on critical pairs `(x̄, σ̄)`.
//!
//! With `A(σ̄) ⪰ 0` the pair is a global min-max saddle point: `x̄` minimizes
//! `f`, `σ̄` maximizes `D` on `S_col⁺`, and `f(x̄) = Ξ(x̄, σ̄) = D(σ̄)`.
//!
//! With `A(σ̄) ≺ 0` and a twice differentiable `V`, factor `−A(σ̄) = EᵀE`,
//! `∇²V(q(x̄)) = FᵀF` and set `d_i = E⁻ᵀ(A_i x̄ − b_i)`, `H = [d_1 … d_m] Fᵀ`.
//! Then
//!
//! ```text
//! ∇²f(x̄) = Eᵀ (H Hᵀ − I) E        ∇²D(σ̄) = F⁻¹ (Hᵀ H − I) F⁻ᵀ
//! ```
//!
//! so both local verdicts follow from where the spectra of `HHᵀ` and `HᵀH`
//! sit relative to 1.

use nalgebra::{Cholesky, SVD};
use serde::Serialize;

use crate::canonical::{Kind, SmoothnessClass, PAIR_TOL};
use crate::complementary::{critical_pair_residual, f_value, in_x0, xi_grad_x, xi_value};
use crate::dual::{classify_sigma_with, d_value, RegionLabel};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, max_abs, sym_eigenvalues, Matrix, Vector};
use crate::quadratic::ProblemInstance;
use crate::spectral::{spectral_summary, SpectralSummary};
use crate::tolerance::Tolerances;

/// Agreement required between `f(x̄)`, `Ξ(x̄, σ̄)` and `D(σ̄)`, relative to `max(1, |f(x̄)|)`.
pub const CHAIN_TOL: f64 = 1e-8;
/// `d_1, …, d_m` count as a basis when `s_min > BASIS_CUTOFF · s_max`.
pub const BASIS_CUTOFF: f64 = 1e-8;
const FACTOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    GlobalMin,
    UniqueGlobalMin,
    GlobalMax,
    LocalStrictMax,
    LocalStrictMin,
    NotLocalExtremum,
    /// A second-order necessary condition holds but the sufficient one is
    /// undecided because some eigenvalue sits inside the band around 1.
    InconclusiveNecessaryOnly,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    MinMaxPsd,
    MinMaxPd,
    SaddleNegDef,
    NotApplicable,
}

/// Which rule produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// `A(σ̄) ⪰ 0`: global min-max duality.
    MinMaxDuality,
    /// Every relevant eigenvalue is above `1 + band`.
    SpectrumAboveOne,
    /// Every relevant eigenvalue is below `1 − band`.
    SpectrumBelowOne,
    /// Eigenvalues on both sides of the band.
    SpectrumStraddlesOne,
    /// Eigenvalues on one side only, the rest inside the band.
    SpectrumTouchesOne,
    /// All eigenvalues inside the band.
    SpectrumAtOne,
    NoRule,
}

/// `f(x̄)`, `Ξ(x̄, σ̄)`, `D(σ̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueChain {
    pub f: f64,
    pub xi: f64,
    pub d: f64,
}

impl ValueChain {
    pub fn spread(&self) -> f64 {
        let hi = self.f.max(self.xi).max(self.d);
        let lo = self.f.min(self.xi).min(self.d);
        hi - lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialityReport {
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub region: RegionLabel,
    pub branch: Branch,
    pub x_verdict: Verdict,
    pub sigma_verdict: Verdict,
    pub x_rule: Rule,
    pub sigma_rule: Rule,
    pub chain: Option<ValueChain>,
    pub spectra: Option<SpectralSummary>,
    /// `A_i x̄ − b_i` (equivalently the `d_i`) form a basis of `ℝⁿ`; only
    /// meaningful when `m = n`.
    pub d_basis: Option<bool>,
    /// `∇²f(x̄)` is nonsingular (for the cone kind `f` is not smooth and this is false).
    pub nonsingular_f_hess: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialityFactorization {
    /// `EᵀE = −A(σ̄)`, upper triangular
    pub e: Matrix,
    /// `FᵀF = ∇²V(q(x̄))`, upper triangular
    pub f: Matrix,
    /// `d_i = E⁻ᵀ(A_i x̄ − b_i)`, the columns of `J`
    pub d: Vec<Vector>,
    /// `H = J Fᵀ`, `n × m`
    pub h: Matrix,
    pub spectra: SpectralSummary,
}

impl TrialityFactorization {
    pub fn j(&self) -> Matrix {
        Matrix::from_columns(&self.d)
    }
}

/// `f(x)`, except that for cone indicators a point within [`PAIR_TOL`] of
/// `X_J` counts as feasible, matching the tolerance of the criticality test.
pub fn f_value_with_slack(p: &ProblemInstance, x: &Vector) -> Result<f64> {
    let f = f_value(p, x)?;
    if f.is_finite() || p.v().kind() != Kind::IndicatorCone {
        return Ok(f);
    }
    let q = p.eval_q(x)?;
    let near = q.iter().enumerate().all(|(j, &v)| {
        if p.v().is_equality_index(j) {
            v.abs() <= PAIR_TOL
        } else {
            v <= PAIR_TOL
        }
    });
    Ok(if near { p.q0().eval(x) } else { f })
}

fn chain(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<ValueChain> {
    let d = d_value(p, sigma)?.ok_or_else(|| {
        Error::PreconditionFailed("sigma is not in S_col, D(sigma) undefined".into())
    })?;
    Ok(ValueChain {
        f: f_value_with_slack(p, x)?,
        xi: xi_value(p, x, sigma)?,
        d,
    })
}

fn is_critical(p: &ProblemInstance, x: &Vector, sigma: &Vector, tol: &Tolerances) -> Result<bool> {
    if p.v().kind() == Kind::IndicatorCone {
        let r_x = inf_norm(&xi_grad_x(p, x, sigma)?);
        let pair = p.v().subdifferential_pair_check(&p.eval_q(x)?, sigma)?;
        return Ok(r_x <= tol.critical && pair);
    }
    if !p.v().in_int_dom_conj(sigma) {
        return Ok(false);
    }
    Ok(critical_pair_residual(p, x, sigma)?.is_critical(tol.critical))
}

fn f_hess_nonsingular(p: &ProblemInstance, x: &Vector, tol: &Tolerances) -> bool {
    match crate::complementary::f_hess(p, x) {
        Ok(h) => {
            let ev = sym_eigenvalues(&h);
            let scale = ev.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            ev.iter().all(|v| v.abs() > tol.psd * scale)
        }
        Err(_) => false,
    }
}

/// Global verdict for a critical pair with `A(σ̄) ⪰ 0`.
pub fn verdict_psd(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<TrialityReport> {
    verdict_psd_with(p, x, sigma, &Tolerances::default())
}

pub fn verdict_psd_with(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<TrialityReport> {
    if !is_critical(p, x, sigma, tol)? {
        return Err(Error::PreconditionFailed(
            "(x, sigma) is not a critical pair of Xi".into(),
        ));
    }
    let region = classify_sigma_with(p, sigma, tol)?;
    if region.lambda_min < -tol.psd * region.lambda_min.abs().max(region.lambda_max.abs()) {
        return Err(Error::PreconditionFailed(format!(
            "A(sigma) is not positive semidefinite (smallest eigenvalue {:e})",
            region.lambda_min
        )));
    }
    if !region.in_scol_plus() {
        return Err(Error::PreconditionFailed("sigma is not in S_col+".into()));
    }
    let values = chain(p, x, sigma)?;
    let spread = values.spread();
    if !spread.is_finite() || spread > CHAIN_TOL * values.f.abs().max(1.0) {
        return Err(Error::PreconditionFailed(format!(
            "f, Xi and D disagree at the pair: {} / {} / {}",
            values.f, values.xi, values.d
        )));
    }
    let pd = region.in_yplus;
    Ok(TrialityReport {
        x: x.iter().copied().collect(),
        sigma: sigma.iter().copied().collect(),
        region,
        branch: if pd {
            Branch::MinMaxPd
        } else {
            Branch::MinMaxPsd
        },
        x_verdict: if pd {
            Verdict::UniqueGlobalMin
        } else {
            Verdict::GlobalMin
        },
        sigma_verdict: Verdict::GlobalMax,
        x_rule: Rule::MinMaxDuality,
        sigma_rule: Rule::MinMaxDuality,
        chain: Some(values),
        spectra: None,
        d_basis: None,
        nonsingular_f_hess: f_hess_nonsingular(p, x, tol),
    })
}

pub fn factorize(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<TrialityFactorization> {
    factorize_with(p, x, sigma, &Tolerances::default())
}

pub fn factorize_with(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<TrialityFactorization> {
    if p.v().smoothness_class() < SmoothnessClass::GammaSC2 {
        return Err(Error::NotGammaSC2);
    }
    let region = classify_sigma_with(p, sigma, tol)?;
    if !region.in_yminus {
        return Err(Error::NotNegativeDefinite {
            lambda_max: region.lambda_max,
        });
    }
    if !p.v().in_int_dom_conj(sigma) {
        return Err(Error::BoundaryOrOutsideDomain(
            "sigma is not in int dom V*".into(),
        ));
    }
    let r = critical_pair_residual(p, x, sigma)?;
    if !r.is_critical(tol.critical) {
        return Err(Error::NotCritical {
            r_x: r.r_x,
            r_sigma: r.r_sigma,
        });
    }
    if !in_x0(p, x)? {
        return Err(Error::NotInX0);
    }

    let a = p.assemble(sigma)?.a;
    let neg = -&a;
    let chol_e = Cholesky::new(neg.clone()).ok_or(Error::NotNegativeDefinite {
        lambda_max: region.lambda_max,
    })?;
    let l_e = chol_e.l();
    let hv = p.v().hess(&p.eval_q(x)?)?;
    let l_f = Cholesky::new(hv.clone()).ok_or(Error::NotGammaSC2)?.l();

    let g = p.constraint_gradients(x)?;
    let j = l_e
        .solve_lower_triangular(&g)
        .expect("Cholesky factor has a positive diagonal");
    let h = &j * &l_f;
    let e = l_e.transpose();
    let f = l_f.transpose();

    debug_assert!(max_abs(&(e.transpose() * &e - &neg)) <= FACTOR_TOL * (1.0 + max_abs(&a)) * 10.0);
    debug_assert!(max_abs(&(f.transpose() * &f - &hv)) <= FACTOR_TOL * (1.0 + max_abs(&hv)) * 10.0);

    Ok(TrialityFactorization {
        spectra: spectral_summary(&h),
        d: j.column_iter().map(|c| c.into_owned()).collect(),
        e,
        f,
        h,
    })
}

/// Second-order verdict from eigenvalues `μ` of `HHᵀ` (for `x̄`) or `HᵀH`
/// (for `σ̄`). `μ − 1` has the inertia of the corresponding Hessian.
pub fn side_verdict(mu: &[f64], band: f64) -> (Verdict, Rule) {
    let below = mu.iter().filter(|&&v| v < 1.0 - band).count();
    let above = mu.iter().filter(|&&v| v > 1.0 + band).count();
    let inside = mu.len() - below - above;
    match (below, above, inside) {
        (b, a, _) if b > 0 && a > 0 => (Verdict::NotLocalExtremum, Rule::SpectrumStraddlesOne),
        (_, 0, 0) => (Verdict::LocalStrictMax, Rule::SpectrumBelowOne),
        (0, _, 0) => (Verdict::LocalStrictMin, Rule::SpectrumAboveOne),
        (0, 0, _) => (Verdict::Indeterminate, Rule::SpectrumAtOne),
        _ => (Verdict::InconclusiveNecessaryOnly, Rule::SpectrumTouchesOne),
    }
}

/// Local verdicts for a critical pair with `A(σ̄) ≺ 0`.
pub fn verdict_negdef(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Result<TrialityReport> {
    verdict_negdef_with(p, x, sigma, &Tolerances::default())
}

pub fn verdict_negdef_with(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<TrialityReport> {
    let fac = factorize_with(p, x, sigma, tol)?;
    let region = classify_sigma_with(p, sigma, tol)?;
    let s = &fac.spectra;
    let (x_verdict, x_rule) = side_verdict(&s.q_eigenvalues, tol.band);
    let (sigma_verdict, sigma_rule) = side_verdict(&s.r_eigenvalues, tol.band);
    let d_basis = (p.m() == p.n()).then(|| {
        let sv =
            SVD::new(p.constraint_gradients(x).expect("checked"), false, false).singular_values;
        let hi = sv.max();
        hi > 0.0 && sv.min() > BASIS_CUTOFF * hi
    });
    let nonsingular = s.q_eigenvalues.iter().all(|v| (v - 1.0).abs() > tol.band);
    Ok(TrialityReport {
        x: x.iter().copied().collect(),
        sigma: sigma.iter().copied().collect(),
        region,
        branch: Branch::SaddleNegDef,
        x_verdict,
        sigma_verdict,
        x_rule,
        sigma_rule,
        chain: chain(p, x, sigma).ok(),
        spectra: Some(fac.spectra),
        d_basis,
        nonsingular_f_hess: nonsingular,
    })
}

/// Dispatches on the sign of `A(σ̄)`; pairs that fit neither branch get an
/// `Indeterminate` report with branch `NotApplicable`.
pub fn verdict(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
    tol: &Tolerances,
) -> Result<TrialityReport> {
    let region = classify_sigma_with(p, sigma, tol)?;
    if region.in_scol_plus() {
        if let Ok(r) = verdict_psd_with(p, x, sigma, tol) {
            return Ok(r);
        }
    }
    if region.in_yminus {
        match verdict_negdef_with(p, x, sigma, tol) {
            Ok(r) => return Ok(r),
            Err(Error::NotCritical { r_x, r_sigma }) => {
                return Err(Error::NotCritical { r_x, r_sigma })
            }
            Err(_) => {}
        }
    }
    Ok(TrialityReport {
        x: x.iter().copied().collect(),
        sigma: sigma.iter().copied().collect(),
        region,
        branch: Branch::NotApplicable,
        x_verdict: Verdict::Indeterminate,
        sigma_verdict: Verdict::Indeterminate,
        x_rule: Rule::NoRule,
        sigma_rule: Rule::NoRule,
        chain: chain(p, x, sigma).ok(),
        spectra: None,
        d_basis: None,
        nonsingular_f_hess: f_hess_nonsingular(p, x, tol),
    })
}

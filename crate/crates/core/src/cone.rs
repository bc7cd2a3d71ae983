//! Quadratically constrained quadratic programs: `V = ι` of the cone
//! `{y : y_j = 0 (j ∈ J), y_j ≤ 0 (j ∉ J)}`, so `f = q_0` restricted to
//!
//! ```text
//! X_J = {x : q_j(x) = 0 for j ∈ J, q_j(x) ≤ 0 for j ∉ J}.
//! ```
//!
//! Given a candidate pair the checks here verify the Lagrangian KKT
//! conditions split by `J` and, when `A(σ̄)` has the right sign, emit a global
//! certificate carrying every number needed to re-verify it by hand.

use serde::Serialize;

use crate::canonical::Kind;
use crate::dual::{classify_sigma_with, solve_x_of_sigma, RegionLabel};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, sym_eigen, Matrix, Vector};
use crate::quadratic::ProblemInstance;
use crate::tolerance::Tolerances;

/// Absolute tolerance for stationarity, signs and feasibility.
pub const LKKT_TOL: f64 = 1e-8;

/// A QCQP: a problem instance whose canonical function is a cone indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeProblem {
    base: ProblemInstance,
    equality: Vec<usize>,
}

impl ConeProblem {
    pub fn new(base: ProblemInstance) -> Result<Self> {
        let equality = base.v().equality_set().ok_or(Error::UnsupportedForKind {
            op: "ConeProblem::new",
            kind: base.v().kind().name(),
        })?;
        debug_assert_eq!(base.v().kind(), Kind::IndicatorCone);
        Ok(Self { base, equality })
    }

    pub fn base(&self) -> &ProblemInstance {
        &self.base
    }

    /// `J`, 0-based indices into `q_1 … q_m`.
    pub fn equality(&self) -> &[usize] {
        &self.equality
    }

    pub fn is_equality(&self, j: usize) -> bool {
        self.base.v().is_equality_index(j)
    }

    /// `x ∈ X_J` up to [`LKKT_TOL`].
    pub fn feasible(&self, x: &Vector) -> Result<bool> {
        let q = self.base.eval_q(x)?;
        Ok(q.iter().enumerate().all(|(j, v)| {
            if self.is_equality(j) {
                v.abs() <= LKKT_TOL
            } else {
                *v <= LKKT_TOL
            }
        }))
    }
}

/// Lagrangian dual `D_L(σ) = L(x, σ)` with `A(σ)x = b(σ)`; `None` off `Y_col`.
pub fn dl_value(p: &ProblemInstance, sigma: &Vector) -> Result<Option<f64>> {
    match solve_x_of_sigma(p, sigma) {
        Ok(x) => Ok(Some(p.lagrangian(&x, sigma)?)),
        Err(Error::NotInYcol { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `‖A(σ̄)x̄ − b(σ̄)‖∞`
    Stationarity,
    /// `σ̄_j ≥ 0` (min) or `σ̄_j ≤ 0` (max) off `J`
    MultiplierSign,
    /// `q_j(x̄) ≤ 0` off `J`
    Inequality,
    /// `q_j(x̄) = 0` on `J`
    Equality,
    /// `σ̄_j q_j(x̄) = 0` off `J`
    Complementarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    /// Constraint index (0-based); absent for stationarity.
    pub index: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    GlobalMin,
    GlobalMax,
}

/// `q_0(x̄) = L(x̄, σ̄) = D_L(σ̄)` together with the spectrum bounds of `A(σ̄)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// `A(σ̄)` definite, so the optimizer is unique.
    pub unique: bool,
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub q: Vec<f64>,
    pub q0: f64,
    pub lagrangian: f64,
    pub dl: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub stationarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LkktOutcome {
    /// All conditions hold.
    pub holds: bool,
    pub violations: Vec<Violation>,
    pub region: RegionLabel,
    /// Present when the conditions hold and `A(σ̄)` has the required sign.
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

fn certificate(
    p: &ProblemInstance,
    x: &Vector,
    sigma: &Vector,
    kind: CertificateKind,
    unique: bool,
    region: &RegionLabel,
    stationarity: f64,
) -> Result<Option<Certificate>> {
    let Some(dl) = dl_value(p, sigma)? else {
        return Ok(None);
    };
    Ok(Some(Certificate {
        kind,
        unique,
        x: x.iter().copied().collect(),
        sigma: sigma.iter().copied().collect(),
        q: p.eval_q(x)?.iter().copied().collect(),
        q0: p.q0().eval(x),
        lagrangian: p.lagrangian(x, sigma)?,
        dl,
        lambda_min: region.lambda_min,
        lambda_max: region.lambda_max,
        stationarity,
    }))
}

fn lkkt(cp: &ConeProblem, x: &Vector, sigma: &Vector, sense: Sense) -> Result<LkktOutcome> {
    let p = &cp.base;
    let tol = Tolerances::default();
    let asm = p.assemble(sigma)?;
    let stationarity = inf_norm(&(&asm.a * x - &asm.b));
    let q = p.eval_q(x)?;
    let mut violations = Vec::new();
    if stationarity > LKKT_TOL {
        violations.push(Violation {
            condition: Condition::Stationarity,
            index: None,
            value: stationarity,
        });
    }
    for j in 0..p.m() {
        let (s, qj) = (sigma[j], q[j]);
        let mut flag = |condition, value| {
            violations.push(Violation {
                condition,
                index: Some(j),
                value,
            })
        };
        if cp.is_equality(j) {
            if qj.abs() > LKKT_TOL {
                flag(Condition::Equality, qj);
            }
            continue;
        }
        let wrong_sign = match sense {
            Sense::Min => s < -LKKT_TOL,
            Sense::Max => s > LKKT_TOL,
        };
        if wrong_sign {
            flag(Condition::MultiplierSign, s);
        }
        if qj > LKKT_TOL {
            flag(Condition::Inequality, qj);
        }
        if (s * qj).abs() > LKKT_TOL * (1.0 + s.abs()) * (1.0 + qj.abs()) {
            flag(Condition::Complementarity, s * qj);
        }
    }

    let region = classify_sigma_with(p, sigma, &tol)?;
    let t = tol.psd * region.lambda_min.abs().max(region.lambda_max.abs());
    let holds = violations.is_empty();
    let cert = match sense {
        Sense::Min if holds && region.lambda_min >= -t => certificate(
            p,
            x,
            sigma,
            CertificateKind::GlobalMin,
            region.in_yplus,
            &region,
            stationarity,
        )?,
        Sense::Max if holds && region.lambda_max <= t => certificate(
            p,
            x,
            sigma,
            CertificateKind::GlobalMax,
            region.in_yminus,
            &region,
            stationarity,
        )?,
        _ => None,
    };
    Ok(LkktOutcome {
        holds,
        violations,
        region,
        certificate: cert,
    })
}

/// Checks the KKT conditions with `σ̄_j ≥ 0` off `J`. With `A(σ̄) ⪰ 0`,
/// `x̄` globally minimizes `q_0` on `X_J`.
pub fn check_j_lkkt(cp: &ConeProblem, x: &Vector, sigma: &Vector) -> Result<LkktOutcome> {
    lkkt(cp, x, sigma, Sense::Min)
}

/// Mirror image with `σ̄_j ≤ 0` off `J`. With `A(σ̄) ⪯ 0`, `x̄` globally
/// maximizes `q_0` on `X_J`.
pub fn check_j_lkkt_max(cp: &ConeProblem, x: &Vector, sigma: &Vector) -> Result<LkktOutcome> {
    lkkt(cp, x, sigma, Sense::Max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    pub q0: f64,
    pub lagrangian: f64,
    pub dl: f64,
    pub region: RegionLabel,
    pub min_certificate: Option<Certificate>,
    pub max_certificate: Option<Certificate>,
}

/// All constraints are equalities and `(x̄, σ̄)` is a critical point of `L`.
pub fn equality_duality(cp: &ConeProblem, x: &Vector, sigma: &Vector) -> Result<EqualityReport> {
    let p = &cp.base;
    if cp.equality.len() != p.m() {
        return Err(Error::PreconditionFailed(
            "every constraint must be an equality".into(),
        ));
    }
    let asm = p.assemble(sigma)?;
    let r_x = inf_norm(&(&asm.a * x - &asm.b));
    let r_sigma = inf_norm(&p.eval_q(x)?);
    if r_x > LKKT_TOL || r_sigma > LKKT_TOL {
        return Err(Error::NotCritical { r_x, r_sigma });
    }
    let min = check_j_lkkt(cp, x, sigma)?;
    let max = check_j_lkkt_max(cp, x, sigma)?;
    let dl = dl_value(p, sigma)?.expect("critical pair lies in Y_col");
    Ok(EqualityReport {
        q0: p.q0().eval(x),
        lagrangian: p.lagrangian(x, sigma)?,
        dl,
        region: min.region,
        min_certificate: min.certificate,
        max_certificate: max.certificate,
    })
}

/// Solves `min q_0` over the ball `‖x‖ ≤ radius` for `q_0 = ½xᵀA_0x − b_0ᵀx`
/// through the secular equation `‖(A_0 + σI)⁻¹b_0‖ = radius`.
///
/// Returns `(x̄, σ̄)` with `σ̄ ≥ max(0, −λ_min(A_0))`, or `None` in the
/// degenerate case where `b_0` is orthogonal to the bottom eigenspace and
/// the secular equation has no root.
pub fn ball_multiplier(a0: &Matrix, b0: &Vector, radius: f64) -> Option<(Vector, f64)> {
    let (lambda, u) = sym_eigen(a0);
    let beta = u.transpose() * b0;
    let norm_at = |s: f64| -> f64 {
        lambda
            .iter()
            .zip(beta.iter())
            .map(|(l, b)| (b / (l + s)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let x_at = |s: f64| -> Vector {
        let coef = Vector::from_iterator(
            lambda.len(),
            lambda.iter().zip(beta.iter()).map(|(l, b)| b / (l + s)),
        );
        &u * coef
    };
    let floor = (-lambda[0]).max(0.0);
    if lambda[0] > 0.0 && norm_at(0.0) <= radius {
        return Some((x_at(0.0), 0.0));
    }
    let mut lo = floor;
    let mut hi = floor + 1.0;
    while norm_at(hi) > radius {
        hi = floor + 2.0 * (hi - floor);
        if hi > 1e12 {
            return None;
        }
    }
    // hard case (or NaN): no root to the right of the floor
    let near = norm_at(lo + 1e-14 * (1.0 + floor));
    if near.is_nan() || near <= radius {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((x_at(hi), hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalFunction;
    use nalgebra::{dmatrix, dvector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example1() -> ConeProblem {
        ConeProblem::new(
            ProblemInstance::from_parts(
                vec![
                    (dmatrix![-1.0], dvector![-1.0], 0.0),
                    (dmatrix![1.0], dvector![0.0], -0.5),
                ],
                CanonicalFunction::indicator_cone(1, vec![]).unwrap(),
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn trust_region(sign: f64) -> (ConeProblem, Matrix, Vector) {
        let a0 = dmatrix![-2.0, 0.0; 0.0, 1.0] * sign;
        let b0 = dvector![1.0, 0.5] * sign;
        let cp = ConeProblem::new(
            ProblemInstance::from_parts(
                vec![
                    (a0.clone(), b0.clone(), 0.0),
                    (Matrix::identity(2, 2), dvector![0.0, 0.0], -0.5),
                ],
                CanonicalFunction::indicator_cone(1, vec![]).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        (cp, a0, b0)
    }

    /// q_0 over the unit disk: polar grid plus the boundary circle
    fn disk_extremes(a0: &Matrix, b0: &Vector) -> (f64, f64) {
        let q0 = |x: &Vector| 0.5 * x.dot(&(a0 * x)) - b0.dot(x);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=400 {
            let r = i as f64 / 400.0;
            for k in 0..2000 {
                let t = std::f64::consts::TAU * k as f64 / 2000.0;
                let v = q0(&dvector![r * t.cos(), r * t.sin()]);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    #[test]
    fn example1_dual_and_certificates() {
        let cp = example1();
        let p = cp.base();
        for s in [0.0, 0.25, 0.5, 0.9, -3.0] {
            let dl = dl_value(p, &dvector![s]).unwrap().unwrap();
            assert!((dl - 0.5 * (1.0 / (1.0 - s) - s)).abs() < 1e-14);
        }
        assert_eq!(dl_value(p, &dvector![1.0]).unwrap(), None);

        let (x, s) = (dvector![1.0], dvector![0.0]);
        let min = check_j_lkkt(&cp, &x, &s).unwrap();
        assert!(min.holds && min.certificate.is_none());
        let max = check_j_lkkt_max(&cp, &x, &s).unwrap();
        let cert = max.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::GlobalMax);
        assert!(cert.unique);
        assert_eq!((cert.q0, cert.lagrangian, cert.dl), (0.5, 0.5, 0.5));
        // brute force: x̄ = 1 maximizes q_0 on [−1, 1]
        let best = (0..=20_000)
            .map(|k| -1.0 + k as f64 * 1e-4)
            .map(|x| p.q0().eval(&dvector![x]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= cert.q0 + 1e-12 && cert.q0 - best < 1e-12);
    }

    #[test]
    fn singular_dual_point_with_zero_rhs() {
        // A(σ) = 0 and b(σ) = 0 at σ = 1: D_L = c(σ)
        let p = ProblemInstance::from_parts(
            vec![
                (dmatrix![-1.0], dvector![0.0], 0.3),
                (dmatrix![1.0], dvector![0.0], -0.5),
            ],
            CanonicalFunction::indicator_cone(1, vec![]).unwrap(),
        )
        .unwrap();
        assert_eq!(dl_value(&p, &dvector![1.0]).unwrap(), Some(0.3 - 0.5));
    }

    #[test]
    fn dl_matches_grid_extremum_of_lagrangian() {
        let (cp, _, _) = trust_region(1.0);
        let p = cp.base();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let s = dvector![rng.random_range(-4.0..6.0)];
            let a = p.assemble(&s).unwrap().a;
            let (lmin, lmax) = (a[(0, 0)].min(a[(1, 1)]), a[(0, 0)].max(a[(1, 1)]));
            if lmin.abs() < 0.1 || lmax.abs() < 0.1 || (lmin < 0.0 && lmax > 0.0) {
                continue;
            }
            let dl = dl_value(p, &s).unwrap().unwrap();
            let mut best = if lmin > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            for i in 0..=400 {
                for k in 0..=400 {
                    let x = dvector![-20.0 + 0.1 * i as f64, -20.0 + 0.1 * k as f64];
                    let l = p.lagrangian(&x, &s).unwrap();
                    best = if lmin > 0.0 { best.min(l) } else { best.max(l) };
                }
            }
            assert!(
                (best - dl).abs() < 0.05 * (1.0 + dl.abs()),
                "{best} vs {dl}"
            );
            if lmin > 0.0 {
                assert!(best >= dl - 1e-12);
            } else {
                assert!(best <= dl + 1e-12);
            }
        }
    }

    #[test]
    fn trust_region_min_certificate() {
        let (cp, a0, b0) = trust_region(1.0);
        let (x, s) = ball_multiplier(&a0, &b0, 1.0).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-12 && s >= 2.0);
        let out = check_j_lkkt(&cp, &x, &dvector![s]).unwrap();
        assert!(out.holds, "{:?}", out.violations);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::GlobalMin);
        assert!((cert.q0 - cert.dl).abs() < 1e-10 && (cert.q0 - cert.lagrangian).abs() < 1e-10);
        let (grid_min, _) = disk_extremes(&a0, &b0);
        assert!(cert.q0 <= grid_min + 1e-12);
        assert!(grid_min - cert.q0 < 1e-4);
    }

    #[test]
    fn trust_region_max_certificate() {
        let (cp, a0, b0) = trust_region(-1.0);
        // maximizing q_0 is minimizing −q_0, whose data is the unflipped instance
        let (x, s) = ball_multiplier(&(-&a0), &(-&b0), 1.0).unwrap();
        let out = check_j_lkkt_max(&cp, &x, &dvector![-s]).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::GlobalMax);
        let (_, grid_max) = disk_extremes(&a0, &b0);
        assert!(cert.q0 >= grid_max - 1e-12 && cert.q0 - grid_max < 1e-4);
    }

    #[test]
    fn violations_name_the_index() {
        let (cp, _, _) = trust_region(1.0);
        // interior point with a positive multiplier breaks complementarity;
        // stationarity fails too
        let out = check_j_lkkt(&cp, &dvector![0.1, 0.1], &dvector![3.0]).unwrap();
        assert!(!out.holds && out.certificate.is_none());
        assert!(out
            .violations
            .iter()
            .any(|v| v.condition == Condition::Complementarity && v.index == Some(0)));
        assert!(out
            .violations
            .iter()
            .any(|v| v.condition == Condition::Stationarity));
        let out = check_j_lkkt(&cp, &dvector![2.0, 0.0], &dvector![-1.0]).unwrap();
        let kinds: Vec<_> = out.violations.iter().map(|v| v.condition).collect();
        assert!(
            kinds.contains(&Condition::MultiplierSign) && kinds.contains(&Condition::Inequality)
        );
    }

    #[test]
    fn equality_only_instance() {
        // q_0 = x, q_1 = ½(x² − 1): X = {−1, 1}
        let cp = ConeProblem::new(
            ProblemInstance::from_parts(
                vec![
                    (dmatrix![0.0], dvector![-1.0], 0.0),
                    (dmatrix![1.0], dvector![0.0], -0.5),
                ],
                CanonicalFunction::indicator_cone(1, vec![0]).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let r = equality_duality(&cp, &dvector![-1.0], &dvector![1.0]).unwrap();
        let c = r.min_certificate.unwrap();
        assert!(r.max_certificate.is_none() && c.unique);
        assert_eq!((r.q0, r.lagrangian, r.dl), (-1.0, -1.0, -1.0));
        assert!(c.q0 <= 1.0);

        let r = equality_duality(&cp, &dvector![1.0], &dvector![-1.0]).unwrap();
        assert!(r.min_certificate.is_none());
        assert_eq!(r.max_certificate.unwrap().q0, 1.0);
        assert!((r.q0 - r.dl).abs() <= 1e-10);

        assert!(matches!(
            equality_duality(&cp, &dvector![0.5], &dvector![1.0]),
            Err(Error::NotCritical { .. })
        ));
    }

    #[test]
    fn weak_duality_and_curvature() {
        let (cp, a0, b0) = trust_region(1.0);
        let p = cp.base();
        let q0 = |x: &Vector| 0.5 * x.dot(&(&a0 * x)) - b0.dot(x);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let feasible: Vec<Vector> = (0..500)
            .map(|_| {
                let (r, t) = (
                    rng.random_range(0.0f64..1.0).sqrt(),
                    rng.random_range(0.0..6.3f64),
                );
                dvector![r * t.cos(), r * t.sin()]
            })
            .collect();
        let floor = feasible.iter().map(q0).fold(f64::INFINITY, f64::min);
        for _ in 0..200 {
            let s = rng.random_range(2.001..10.0);
            assert!(dl_value(p, &dvector![s]).unwrap().unwrap() <= floor + 1e-9);
        }
        // D_L is concave where A(σ) ⪰ 0 and convex where A(σ) ⪯ 0
        let d = |s: f64| dl_value(p, &dvector![s]).unwrap().unwrap();
        for _ in 0..200 {
            let (a, b) = (rng.random_range(2.01..10.0), rng.random_range(2.01..10.0));
            assert!(d(0.5 * (a + b)) >= 0.5 * (d(a) + d(b)) - 1e-10);
            let (a, b) = (
                rng.random_range(-10.0..-1.01),
                rng.random_range(-10.0..-1.01),
            );
            assert!(d(0.5 * (a + b)) <= 0.5 * (d(a) + d(b)) + 1e-10);
        }
    }

    #[test]
    fn rejects_smooth_kinds() {
        let p = ProblemInstance::from_parts(
            vec![
                (dmatrix![1.0], dvector![0.0], 0.0),
                (dmatrix![1.0], dvector![0.0], 0.0),
            ],
            CanonicalFunction::quadratic_diag(vec![1.0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            ConeProblem::new(p),
            Err(Error::UnsupportedForKind { .. })
        ));
    }
}

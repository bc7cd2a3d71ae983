//! The work behind `cdt analyze`, `cdt dual-scan` and `cdt check`.
//!
//! Each command returns plain data (or writes CSV) so the binary only has
//! to parse flags, print and pick an exit code.

use std::io::Write;

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{Kind, SmoothnessClass};
use crate::complementary::{f_grad, f_hess, f_value, in_x0};
use crate::cone::{check_j_lkkt, check_j_lkkt_max, Certificate, ConeProblem};
use crate::dual::{
    classify_sigma_with, d_grad_with, d_hess_with, newton_critical_point, DualPoint, NewtonOptions,
};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Vector};
use crate::oracle::{fd_grad, fd_hess, numeric_conjugate, rel_err, rel_err_mat};
use crate::quadratic::ProblemInstance;
use crate::tolerance::Tolerances;
use crate::triality::{f_value_with_slack, verdict, TrialityReport};

pub const REPORT_VERSION: &str = "1";
const EXTRA_SEED_RNG: u64 = 0xcd7_5eed;
/// Two converged `σ̄` closer than this (relative, ∞-norm) are the same point.
const DEDUP_TOL: f64 = 1e-6;

/// The origin followed by `±0.5·e_i`.
pub fn default_seeds(m: usize) -> Vec<Vector> {
    let mut seeds = vec![Vector::zeros(m)];
    for i in 0..m {
        for s in [0.5, -0.5] {
            let mut e = Vector::zeros(m);
            e[i] = s;
            seeds.push(e);
        }
    }
    seeds
}

/// Base seeds (from the document, else [`default_seeds`]) truncated or
/// extended with reproducible pseudo-random points in `[−2, 2]^m` to `count`.
pub fn seed_list(m: usize, base: Option<Vec<Vector>>, count: Option<usize>) -> Vec<Vector> {
    let mut seeds = base.unwrap_or_else(|| default_seeds(m));
    if let Some(k) = count {
        seeds.truncate(k);
        let mut rng = ChaCha8Rng::seed_from_u64(EXTRA_SEED_RNG);
        while seeds.len() < k {
            seeds.push(Vector::from_fn(m, |_, _| rng.random_range(-2.0..2.0)));
        }
    }
    seeds
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    pub parallel: bool,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    /// Indices of the seeds that converged here.
    pub seeds: Vec<usize>,
    pub sigma: Vec<f64>,
    pub x: Vec<f64>,
    pub region: &'static str,
    /// `null` when `x̄` lies outside `dom f`.
    pub f: Option<f64>,
    pub d: Option<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub triality: Option<TrialityReport>,
    pub verdict_error: Option<String>,
    /// Lagrangian certificate, cone indicators only.
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedFailure {
    pub seed_index: usize,
    pub seed: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub report_version: &'static str,
    pub n: usize,
    pub m: usize,
    pub kind: &'static str,
    pub tolerances: Tolerances,
    pub seeds: Vec<Vec<f64>>,
    pub critical_points: Vec<CriticalPoint>,
    pub failures: Vec<SeedFailure>,
}

impl AnalyzeReport {
    pub fn converged(&self) -> bool {
        !self.critical_points.is_empty()
    }
}

fn to_vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn cone_certificate(p: &ProblemInstance, x: &Vector, sigma: &Vector) -> Option<Certificate> {
    let cp = ConeProblem::new(p.clone()).ok()?;
    let min = check_j_lkkt(&cp, x, sigma).ok()?;
    if min.certificate.is_some() {
        return min.certificate;
    }
    check_j_lkkt_max(&cp, x, sigma).ok()?.certificate
}

/// Runs Newton from every seed, merges coincident limits and attaches verdicts.
pub fn analyze(p: &ProblemInstance, seeds: &[Vector], opts: &AnalyzeOptions) -> AnalyzeReport {
    let newton = NewtonOptions {
        tolerances: opts.tolerances,
        ..NewtonOptions::default()
    };
    let run = |(i, s): (usize, &Vector)| {
        let r = newton_critical_point(p, s, &newton);
        match &r {
            Ok(rep) => debug!("seed {i}: converged in {} iterations", rep.iterations),
            Err(e) => debug!("seed {i}: {e}"),
        }
        r
    };
    let results: Vec<_> = if opts.parallel {
        seeds.par_iter().enumerate().map(run).collect()
    } else {
        seeds.iter().enumerate().map(run).collect()
    };

    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let rep = match r {
            Ok(rep) => rep,
            Err(e) => {
                failures.push(SeedFailure {
                    seed_index: i,
                    seed: to_vec(&seeds[i]),
                    error: e.to_string(),
                });
                continue;
            }
        };
        let sigma = &rep.point.sigma;
        let scale = 1.0 + inf_norm(sigma);
        if let Some(known) = points.iter_mut().find(|c| {
            let other = Vector::from_column_slice(&c.sigma);
            inf_norm(&(&other - sigma)) <= DEDUP_TOL * scale
        }) {
            known.seeds.push(i);
            continue;
        }
        let Some(x) = rep.point.x_of_sigma.clone() else {
            failures.push(SeedFailure {
                seed_index: i,
                seed: to_vec(&seeds[i]),
                error: "converged point has no x(sigma)".into(),
            });
            continue;
        };
        let (triality, verdict_error) = match verdict(p, &x, sigma, &opts.tolerances) {
            Ok(t) => (Some(t), None),
            Err(e) => {
                warn!("no verdict at sigma = {:?}: {e}", sigma.as_slice());
                (None, Some(e.to_string()))
            }
        };
        points.push(CriticalPoint {
            seeds: vec![i],
            sigma: to_vec(sigma),
            x: to_vec(&x),
            region: rep.point.region.name(),
            f: f_value_with_slack(p, &x).ok().and_then(finite),
            certificate: cone_certificate(p, &x, sigma),
            d: rep.point.d_value,
            iterations: rep.iterations,
            grad_norm: rep.grad_norm,
            triality,
            verdict_error,
        });
    }
    info!(
        "{} distinct critical points from {} seeds ({} failed)",
        points.len(),
        seeds.len(),
        failures.len()
    );
    AnalyzeReport {
        report_version: REPORT_VERSION,
        n: p.n(),
        m: p.m(),
        kind: p.v().kind().name(),
        tolerances: opts.tolerances,
        seeds: seeds.iter().map(to_vec).collect(),
        critical_points: points,
        failures,
    }
}

/// Sampling grid for `dual-scan`: one or two coordinates of `σ` swept over
/// `[lo, hi]` with `steps` samples each (endpoints included); the remaining
/// coordinates stay at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub axes: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub base: Vector,
}

impl ScanSpec {
    /// Parses `--axis i[,j]` and `--range a:b`.
    pub fn parse(m: usize, axis: &str, range: &str, steps: usize) -> Result<Self> {
        let axes = axis
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad axis {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidParameter("give one or two axes".into()));
        }
        if let Some(bad) = axes.iter().find(|&&a| a >= m) {
            return Err(Error::InvalidParameter(format!(
                "axis {bad} out of range for m = {m}"
            )));
        }
        if axes.len() == 2 && axes[0] == axes[1] {
            return Err(Error::InvalidParameter("axes must differ".into()));
        }
        let (lo, hi) = range
            .split_once(':')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::InvalidParameter(format!("bad range {range:?}, expected a:b")))?;
        if !(f64::is_finite(lo) && f64::is_finite(hi) && lo <= hi) {
            return Err(Error::InvalidParameter(format!("bad range {range:?}")));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        Ok(Self {
            axes,
            lo,
            hi,
            steps,
            base: Vector::zeros(m),
        })
    }

    fn coordinate(&self, k: usize) -> f64 {
        if self.steps == 1 {
            return self.lo;
        }
        // convex combination so that both endpoints come out exact
        let t = k as f64 / (self.steps - 1) as f64;
        self.lo * (1.0 - t) + self.hi * t
    }

    /// Sample points, first axis outermost.
    pub fn points(&self) -> Vec<Vector> {
        let mut out = Vec::new();
        let inner = if self.axes.len() == 2 { self.steps } else { 1 };
        for i in 0..self.steps {
            for j in 0..inner {
                let mut s = self.base.clone();
                s[self.axes[0]] = self.coordinate(i);
                if self.axes.len() == 2 {
                    s[self.axes[1]] = self.coordinate(j);
                }
                out.push(s);
            }
        }
        out
    }
}

/// Writes one CSV row per sample: `σ` components, `D` (empty off `S_col`) and
/// the region flags.
pub fn dual_scan<W: Write>(
    p: &ProblemInstance,
    spec: &ScanSpec,
    tol: &Tolerances,
    out: W,
) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Document(e.to_string());
    let mut header: Vec<String> = (0..p.m()).map(|i| format!("sigma_{i}")).collect();
    header.extend(
        [
            "D",
            "region",
            "in_dom_vstar",
            "in_y0",
            "in_yplus",
            "in_yminus",
            "in_ycol",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(io)?;
    let mut rows = 0;
    for s in spec.points() {
        let pt = DualPoint::at(p, &s, tol)?;
        let r = &pt.region;
        let mut rec: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        rec.push(pt.d_value.map(|d| d.to_string()).unwrap_or_default());
        rec.push(r.name().to_string());
        for flag in [r.in_dom_vstar, r.in_y0, r.in_yplus, r.in_yminus, r.in_ycol] {
            rec.push(u8::from(flag).to_string());
        }
        w.write_record(&rec).map_err(io)?;
        rows += 1;
    }
    w.flush().map_err(|e| Error::Document(e.to_string()))?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub quantity: &'static str,
    pub point: Vec<f64>,
    /// Relative (∞-norm) discrepancy against the oracle.
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub report_version: &'static str,
    pub kind: &'static str,
    pub items: Vec<CheckItem>,
    /// Quantities not checked for this kind, with the reason.
    pub skipped: Vec<String>,
    pub pass: bool,
}

const CHECK_POINTS: usize = 10;
const CHECK_SEED: u64 = 0xc4ec;

fn item(quantity: &'static str, point: &Vector, error: f64, tolerance: f64) -> CheckItem {
    CheckItem {
        quantity,
        point: to_vec(point),
        error,
        tolerance,
        pass: error <= tolerance,
    }
}

/// Self-test of the analytic derivatives and conjugate of an instance against
/// the finite-difference and grid-search oracles at reproducible sample points.
pub fn self_check(p: &ProblemInstance, seeds: &[Vector], tol: &Tolerances) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    let v = p.v();

    if v.smoothness_class() >= SmoothnessClass::GammaSC {
        let f = |x: &Vector| f_value(p, x).unwrap_or(f64::NAN);
        let mut found = 0;
        for _ in 0..200 {
            if found == CHECK_POINTS {
                break;
            }
            let x = Vector::from_fn(p.n(), |_, _| rng.random_range(-1.0..1.0));
            if !in_x0(p, &x)? {
                continue;
            }
            found += 1;
            if let Ok(g) = fd_grad(f, &x, None) {
                items.push(item("grad f", &x, rel_err(&f_grad(p, &x)?, &g), 1e-5));
            }
            if let Ok(h) = fd_hess(f, &x, None) {
                items.push(item("hess f", &x, rel_err_mat(&f_hess(p, &x)?, &h), 1e-4));
            }
        }
    } else {
        skipped.push(format!(
            "grad f, hess f: {} is not differentiable",
            v.kind()
        ));
    }

    let mut sigmas: Vec<Vector> = seeds.to_vec();
    sigmas.extend(
        (0..CHECK_POINTS).map(|_| Vector::from_fn(p.m(), |_, _| rng.random_range(-1.5..1.5))),
    );
    let d = |s: &Vector| {
        crate::dual::d_value(p, s)
            .ok()
            .flatten()
            .unwrap_or(f64::NAN)
    };
    for s in sigmas.iter().filter(|s| v.in_int_dom_conj(s)) {
        let label = classify_sigma_with(p, s, tol)?;
        if label.in_y0 && label.lambda_min.abs().min(label.lambda_max.abs()) > 1e-3 {
            if let Ok(g) = fd_grad(d, s, None) {
                items.push(item(
                    "grad D",
                    s,
                    rel_err(&d_grad_with(p, s, tol)?, &g),
                    1e-5,
                ));
            }
            if let Ok(h) = fd_hess(d, s, None) {
                items.push(item(
                    "hess D",
                    s,
                    rel_err_mat(&d_hess_with(p, s, tol)?, &h),
                    1e-4,
                ));
            }
        }
        let exact = v.conjugate(s)?;
        let reach = if v.kind() == Kind::IndicatorCone {
            10.0
        } else {
            10.0_f64.max(2.0 * inf_norm(&v.conj_grad(s)?) + 1.0)
        };
        let steps = ((20_000f64).powf(1.0 / p.m() as f64) as usize).max(4) & !1;
        let approx = numeric_conjugate(v, s, (-reach, reach), steps)?;
        items.push(item(
            "V*",
            s,
            (exact - approx).abs() / exact.abs().max(1.0),
            1e-6,
        ));
    }

    let pass = items.iter().all(|i| i.pass);
    Ok(CheckReport {
        report_version: REPORT_VERSION,
        kind: v.kind().name(),
        items,
        skipped,
        pass,
    })
}

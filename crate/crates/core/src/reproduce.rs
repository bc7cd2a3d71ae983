//! Canned reproductions: `example1`, `doublewell`, `trustregion`.
//!
//! Each prints its claims, the numbers computed for them and PASS or FAIL.

use std::io::{self, Write};

use nalgebra::{dmatrix, dvector};

use crate::canonical::CanonicalFunction;
use crate::commands::{analyze, seed_list, AnalyzeOptions};
use crate::complementary::f_value;
use crate::cone::{
    ball_multiplier, check_j_lkkt, check_j_lkkt_max, dl_value, CertificateKind, ConeProblem,
};
use crate::dual::d_value;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::quadratic::ProblemInstance;
use crate::triality::{verdict_psd, Verdict};

pub const NAMES: [&str; 3] = ["example1", "doublewell", "trustregion"];

/// `q_0 = −½x² + x` on `[−1, 1]`, written as `q_1 = ½(x² − 1) ≤ 0` with `V = ι_{ℝ₋}`.
pub fn example1() -> ProblemInstance {
    ProblemInstance::from_parts(
        vec![
            (dmatrix![-1.0], dvector![-1.0], 0.0),
            (dmatrix![1.0], dvector![0.0], -0.5),
        ],
        CanonicalFunction::indicator_cone(1, vec![]).expect("valid"),
    )
    .expect("valid")
}

/// `f(x) = −½x² + ½(½x² − 1)²`.
pub fn double_well() -> ProblemInstance {
    ProblemInstance::from_parts(
        vec![
            (dmatrix![-1.0], dvector![0.0], 0.0),
            (dmatrix![1.0], dvector![0.0], -1.0),
        ],
        CanonicalFunction::quadratic_diag(vec![1.0]).expect("valid"),
    )
    .expect("valid")
}

pub const TRUST_RADIUS: f64 = 1.0;

/// `q_0 = ½xᵀ diag(−2, 1) x − (1, ½)ᵀx` on the unit disk.
pub fn trust_region() -> ProblemInstance {
    let r = TRUST_RADIUS;
    ProblemInstance::from_parts(
        vec![
            (dmatrix![-2.0, 0.0; 0.0, 1.0], dvector![1.0, 0.5], 0.0),
            (Matrix::identity(2, 2), dvector![0.0, 0.0], -0.5 * r * r),
        ],
        CanonicalFunction::indicator_cone(1, vec![]).expect("valid"),
    )
    .expect("valid")
}

/// Runs the named reproduction, writing its transcript to `out`.
/// Returns whether every claim held.
pub fn reproduce<W: Write>(name: &str, out: &mut W) -> Result<bool> {
    let mut log = Transcript { out, ok: true };
    match name {
        "example1" => run_example1(&mut log),
        "doublewell" => run_double_well(&mut log),
        "trustregion" => run_trust_region(&mut log),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown reproduction {other:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    }
    .map_err(|e| Error::Document(e.to_string()))?;
    writeln!(log.out, "{}", if log.ok { "PASS" } else { "FAIL" })
        .map_err(|e| Error::Document(e.to_string()))?;
    Ok(log.ok)
}

struct Transcript<'a, W: Write> {
    out: &'a mut W,
    ok: bool,
}

impl<W: Write> Transcript<'_, W> {
    fn title(&mut self, t: &str) -> io::Result<()> {
        writeln!(self.out, "== {t}")
    }

    fn claim(&mut self, claim: &str, evidence: String, holds: bool) -> io::Result<()> {
        self.ok &= holds;
        writeln!(self.out, "claim:    {claim}")?;
        writeln!(self.out, "evidence: {evidence}")?;
        writeln!(
            self.out,
            "          [{}]",
            if holds { "PASS" } else { "FAIL" }
        )
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(move |k| lo + k as f64 * step)
}

fn argbest(points: impl Iterator<Item = f64>, value: impl Fn(f64) -> f64, max: bool) -> (f64, f64) {
    let mut best = (
        f64::NAN,
        if max {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        },
    );
    for t in points {
        let v = value(t);
        if (max && v > best.1) || (!max && v < best.1) {
            best = (t, v);
        }
    }
    best
}

fn run_example1<W: Write>(log: &mut Transcript<W>) -> io::Result<()> {
    let p = example1();
    let cp = ConeProblem::new(p.clone()).expect("cone kind");
    log.title("example1: f(x) = -x^2/2 + x on [-1, 1]")?;

    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let s = 0.01 * k as f64;
        let d = d_value(&p, &dvector![s]).ok().flatten().unwrap_or(f64::NAN);
        worst = worst.max((d - 0.5 * (1.0 / (1.0 - s) - s)).abs());
    }
    log.claim(
        "D(sigma) = (1/(1-sigma) - sigma)/2 on [0, 0.99]",
        format!("max deviation over 100 points = {worst:e}"),
        worst <= 1e-12,
    )?;

    let (x_best, f_best) = argbest(
        grid(-1.0, 1.0, 1e-4),
        |x| f_value(&p, &dvector![x]).unwrap(),
        true,
    );
    log.claim(
        "x = 1 maximizes f on [-1, 1]",
        format!("grid (step 1e-4) maximum f({x_best}) = {f_best}"),
        (x_best - 1.0).abs() < 1e-9,
    )?;

    let (s_best, d_best) = argbest(
        grid(0.0, 1.0 - 1e-3, 1e-4),
        |s| d_value(&p, &dvector![s]).unwrap().unwrap_or(f64::NAN),
        false,
    );
    log.claim(
        "sigma = 0 minimizes D on S- = [0, 1)",
        format!("grid (step 1e-4) minimum D({s_best}) = {d_best}"),
        s_best == 0.0,
    )?;

    let (x, s) = (dvector![1.0], dvector![0.0]);
    let max = check_j_lkkt_max(&cp, &x, &s).expect("dimensions");
    let cert = max.certificate.as_ref();
    log.claim(
        "(1, 0) is a KKT pair with A(0) = -1 < 0, certifying x = 1 as the global maximizer",
        match cert {
            Some(c) => format!(
                "q0 = {}, L = {}, D_L = {}, lambda_max(A) = {}",
                c.q0, c.lagrangian, c.dl, c.lambda_max
            ),
            None => format!("no certificate, violations {:?}", max.violations),
        },
        cert.is_some_and(|c| c.kind == CertificateKind::GlobalMax && c.unique),
    )?;

    let min = check_j_lkkt(&cp, &x, &s).expect("dimensions");
    log.claim(
        "the same pair yields no minimum certificate",
        format!(
            "KKT holds: {}, certificate: {}",
            min.holds,
            min.certificate.is_some()
        ),
        min.holds && min.certificate.is_none(),
    )?;

    writeln!(
        log.out,
        "conclusion: x = 1 is a maximizer of f and sigma = 0 a minimizer of D on S-, \
         so the pair is neither a double-min nor a double-max"
    )
}

fn run_double_well<W: Write>(log: &mut Transcript<W>) -> io::Result<()> {
    let p = double_well();
    log.title("doublewell: f(x) = -x^2/2 + (x^2/2 - 1)^2/2")?;

    let seeds = seed_list(1, None, Some(12));
    let rep = analyze(&p, &seeds, &AnalyzeOptions::default());
    let inner = rep
        .critical_points
        .iter()
        .find(|c| c.region == "S-")
        .and_then(|c| c.triality.as_ref());
    log.claim(
        "Newton on D from 12 seeds finds sigma = -1 in S-, where x = 0 and sigma = -1 are both local maxima",
        match inner {
            Some(t) => format!(
                "sigma = {:?}, x = {:?}, verdicts {:?} / {:?}, HH^T spectrum {:?}",
                t.sigma,
                t.x,
                t.x_verdict,
                t.sigma_verdict,
                t.spectra.as_ref().map(|s| s.q_eigenvalues.clone())
            ),
            None => "no S- critical point found".into(),
        },
        inner.is_some_and(|t| {
            (t.sigma[0] + 1.0).abs() < 1e-9
                && t.x_verdict == Verdict::LocalStrictMax
                && t.sigma_verdict == Verdict::LocalStrictMax
        }),
    )?;

    // A(1) = 0 and b(1) = 0, so every x solves A(1)x = b(1); criticality
    // q_1(x) = σ = 1 picks x = ±2
    let mut values = Vec::new();
    let mut both = true;
    for x in [2.0, -2.0] {
        match verdict_psd(&p, &dvector![x], &dvector![1.0]) {
            Ok(r) => {
                both &= r.x_verdict == Verdict::GlobalMin && r.sigma_verdict == Verdict::GlobalMax;
                values.push(r.chain.map(|c| c.f).unwrap_or(f64::NAN));
            }
            Err(e) => {
                both = false;
                writeln!(log.out, "          verdict_psd({x}, 1) failed: {e}")?;
            }
        }
    }
    let (x_best, f_best) = argbest(
        grid(-4.0, 4.0, 1e-4),
        |x| f_value(&p, &dvector![x]).unwrap(),
        false,
    );
    let d1 = d_value(&p, &dvector![1.0])
        .ok()
        .flatten()
        .unwrap_or(f64::NAN);
    log.claim(
        "at the singular sigma = 1 in Scol+ the pairs (+-2, 1) are global min-max points with f = D = -1.5",
        format!(
            "chain f values {values:?}, D(1) = {d1}, grid (step 1e-4) minimum f({x_best}) = {f_best}"
        ),
        both && values.iter().all(|v| (v + 1.5).abs() < 1e-12)
            && (d1 + 1.5).abs() < 1e-12
            && f_best >= -1.5 - 1e-12,
    )?;

    let (_, d_max) = argbest(
        grid(1.0, 6.0, 1e-3),
        |s| d_value(&p, &dvector![s]).unwrap().unwrap_or(f64::NAN),
        true,
    );
    log.claim(
        "D attains its maximum over Scol+ = [1, inf) at sigma = 1",
        format!("grid maximum of D on [1, 6] = {d_max}"),
        (d_max - d1).abs() < 1e-12,
    )
}

fn disk_grid_min(q0: impl Fn(&Vector) -> f64, radius: f64, rings: usize, spokes: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=rings {
        let r = radius * i as f64 / rings as f64;
        for k in 0..spokes {
            let t = std::f64::consts::TAU * k as f64 / spokes as f64;
            best = best.min(q0(&dvector![r * t.cos(), r * t.sin()]));
        }
    }
    best
}

fn run_trust_region<W: Write>(log: &mut Transcript<W>) -> io::Result<()> {
    let p = trust_region();
    let cp = ConeProblem::new(p.clone()).expect("cone kind");
    log.title("trustregion: minimize x^T diag(-2, 1) x / 2 - (1, 0.5)^T x on the unit disk")?;

    let Some((x, s)) = ball_multiplier(p.q0().a(), p.q0().b(), TRUST_RADIUS) else {
        return log.claim(
            "the secular equation has a root",
            "none found".into(),
            false,
        );
    };
    let out = check_j_lkkt(&cp, &x, &dvector![s]).expect("dimensions");
    let cert = out.certificate.clone();
    log.claim(
        "the KKT pair with A(sigma) >= 0 certifies a global minimum",
        format!(
            "x = {:?}, sigma = {s}, violations {:?}, lambda_min(A) = {}",
            x.as_slice(),
            out.violations,
            out.region.lambda_min
        ),
        cert.as_ref()
            .is_some_and(|c| c.kind == CertificateKind::GlobalMin),
    )?;
    let Some(cert) = cert else { return Ok(()) };

    let (rings, spokes) = (400, 2000);
    let grid_min = disk_grid_min(|y| p.q0().eval(y), TRUST_RADIUS, rings, spokes);
    // a point of the disk is within h of the polar grid, and |∇q_0| ≤ 3.5 there
    let h = TRUST_RADIUS / rings as f64 + std::f64::consts::PI * TRUST_RADIUS / spokes as f64;
    let resolution = 3.5 * h;
    log.claim(
        "the certified value equals the exhaustive grid minimum within grid resolution",
        format!(
            "q0(x) = {}, D_L(sigma) = {}, grid minimum = {grid_min}, resolution = {resolution:e}",
            cert.q0, cert.dl
        ),
        cert.q0 <= grid_min + 1e-12 && grid_min - cert.q0 <= resolution,
    )?;

    let (_, dl_max) = argbest(
        grid(2.0 + 1e-3, 12.0, 1e-3),
        |t| dl_value(&p, &dvector![t]).unwrap().unwrap_or(f64::NAN),
        true,
    );
    log.claim(
        "sigma maximizes D_L over {sigma >= 0 : A(sigma) >= 0}",
        format!(
            "grid maximum of D_L on (2, 12] = {dl_max}, D_L(sigma) = {}",
            cert.dl
        ),
        dl_max <= cert.dl + 1e-12,
    )
}

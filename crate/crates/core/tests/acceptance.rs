//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines appear in `cargo test` output.

use std::process::ExitCode;
use std::time::Instant;

use canonical_duality::complementary::{f_grad, f_hess, f_value, in_x0};
use canonical_duality::cone::{
    ball_multiplier, check_j_lkkt, check_j_lkkt_max, CertificateKind, ConeProblem,
};
use canonical_duality::dual::{
    classify_sigma, d_grad, d_hess, d_value, newton_critical_point, NewtonOptions,
};
use canonical_duality::linalg::sym_eigenvalues;
use canonical_duality::oracle::{
    default_probe, fd_grad, fd_hess, hessian_sign_class, numeric_conjugate, rel_err, rel_err_mat,
    reverse_engineered_instance, ProbeClass,
};
use canonical_duality::reproduce::{example1, reproduce, trust_region, TRUST_RADIUS};
use canonical_duality::spectral::{kernel_image_flags, spectral_summary};
use canonical_duality::triality::{factorize, verdict_negdef, verdict_psd, Verdict};
use canonical_duality::{
    CanonicalFunction, Error, Kind, Matrix, ProblemInstance, SmoothnessClass, Vector,
};
use nalgebra::{dmatrix, dvector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let held: bool = $cond;
        if !held {
            return Err(format!($($fmt)+));
        }
    }};
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn uniform(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_fn(len, |_, _| rng.random_range(lo..hi))
}

fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn random_constraints(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(Matrix, Vector)> {
    (0..m)
        .map(|_| (random_sym(rng, n), uniform(rng, n, -1.0, 1.0)))
        .collect()
}

/// A random twice-differentiable canonical function of dimension `m`.
fn random_smooth(rng: &mut ChaCha8Rng, m: usize) -> CanonicalFunction {
    let weights = |rng: &mut ChaCha8Rng, k: usize| {
        (0..k)
            .map(|_| rng.random_range(0.5..2.0))
            .collect::<Vec<_>>()
    };
    match rng.random_range(0..4) {
        0 => CanonicalFunction::quadratic_diag(weights(rng, m)),
        1 => CanonicalFunction::exponential(m),
        2 => {
            let p = rng.random_range(0..=m);
            CanonicalFunction::exp_plus_quad(p, weights(rng, m - p))
        }
        _ => {
            let p = rng.random_range(1..=m);
            let scale = rng.random_range(0.5..2.0);
            CanonicalFunction::log_sum_exp_plus_quad(scale, p, weights(rng, m - p))
        }
    }
    .expect("valid parameters")
}

fn example1_dual(s: f64) -> f64 {
    0.5 * (1.0 / (1.0 - s) - s)
}

fn criterion_1() -> Outcome {
    let p = example1();
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let s = 0.99 * k as f64 / 99.0;
        let d = ok(d_value(&p, &dvector![s]), "D")?.ok_or(format!("D undefined at {s}"))?;
        worst = worst.max((d - example1_dual(s)).abs());
    }
    ensure!(worst <= 1e-12, "D formula error {worst:e}");

    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..=20_000 {
        let x = (k as f64 - 10_000.0) / 10_000.0;
        let fx = ok(f_value(&p, &dvector![x]), "f")?;
        if fx > best.0 {
            best = (fx, x);
        }
    }
    ensure!(best.1 == 1.0, "grid maximizer of f is {}", best.1);

    let mut low = (f64::INFINITY, 0.0);
    for k in 0..10_000 {
        let s = k as f64 / 10_000.0;
        let d = ok(d_value(&p, &dvector![s]), "D")?.unwrap_or(f64::INFINITY);
        if d < low.0 {
            low = (d, s);
        }
    }
    ensure!(low.1 == 0.0, "grid minimizer of D is {}", low.1);

    let mut transcript = Vec::new();
    let pass = ok(reproduce("example1", &mut transcript), "reproduce")?;
    ensure!(
        pass,
        "reproduce example1 failed:\n{}",
        String::from_utf8_lossy(&transcript)
    );
    Ok(format!(
        "max |D - formula| = {worst:.1e}, argmax f = 1, argmin D = 0, reproduce PASS"
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for trial in 0..500 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=8);
        // every fourth matrix is rank deficient by construction
        let rank = if trial % 4 == 0 {
            rng.random_range(0..=n.min(m))
        } else {
            n.min(m)
        };
        let h = if trial % 4 == 0 {
            Matrix::from_fn(n, rank, |_, _| rng.random_range(-2.0..2.0))
                * Matrix::from_fn(rank, m, |_, _| rng.random_range(-2.0..2.0))
        } else {
            Matrix::from_fn(n, m, |_, _| rng.random_range(-2.0..2.0))
        };
        let s = spectral_summary(&h);
        let da = (s.alpha - s.beta).abs();
        ensure!(
            da <= 1e-8 * s.alpha.max(1.0),
            "trial {trial}: alpha {} beta {}",
            s.alpha,
            s.beta
        );
        worst = worst.max(da / s.alpha.max(1.0));
        match (s.gamma, s.delta) {
            (Some(g), Some(d)) => {
                ensure!(
                    (g - d).abs() <= 1e-8 * g.max(1.0),
                    "trial {trial}: gamma {g} delta {d}"
                );
                worst = worst.max((g - d).abs() / g.max(1.0));
            }
            (None, None) => ensure!(
                rank == 0,
                "trial {trial}: no positive eigenvalue at rank {rank}"
            ),
            (g, d) => return Err(format!("trial {trial}: gamma {g:?} delta {d:?}")),
        }
        ensure!(
            s.rank == rank && s.ker_q_dim == n - rank && s.ker_r_dim == m - rank,
            "trial {trial}: {n}x{m} rank {rank}, got rank {} kernels {} {}",
            s.rank,
            s.ker_q_dim,
            s.ker_r_dim
        );
        ensure!(
            kernel_image_flags(&h) == (rank == n, rank == m),
            "trial {trial}: kernel flags"
        );
    }
    Ok(format!(
        "500 matrices, worst relative gap {worst:.1e}, kernel dimensions exact"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gap: f64 = 0.0;
    for trial in 0..50 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let v = random_smooth(&mut rng, m);
        let y = uniform(&mut rng, m, -1.0, 1.0);
        let s_bar = ok(v.grad(&y), "grad V")?;
        let x_bar = uniform(&mut rng, n, -1.0, 1.0);
        let b = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let target = &b * b.transpose() + Matrix::identity(n, n) * 0.5;
        let cons = random_constraints(&mut rng, n, m);
        let p = ok(
            reverse_engineered_instance(&cons, v, &x_bar, &s_bar, &target),
            "instance",
        )?;

        let report = ok(verdict_psd(&p, &x_bar, &s_bar), "verdict_psd")?;
        ensure!(
            report.x_verdict == Verdict::UniqueGlobalMin,
            "trial {trial}: {:?}",
            report.x_verdict
        );
        let fx = ok(f_value(&p, &x_bar), "f")?;
        let ds = ok(d_value(&p, &s_bar), "D")?.ok_or("D undefined at the pair")?;
        ensure!((fx - ds).abs() <= 1e-8, "trial {trial}: f = {fx}, D = {ds}");
        worst_gap = worst_gap.max((fx - ds).abs());

        for _ in 0..10_000 {
            let x = &x_bar + uniform(&mut rng, n, -3.0, 3.0);
            let f = ok(f_value(&p, &x), "f")?;
            ensure!(f >= fx - 1e-9, "trial {trial}: f({x:?}) = {f} < {fx}");
        }
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 1000 {
            attempts += 1;
            ensure!(attempts < 200_000, "trial {trial}: could not sample S_col+");
            let s = &s_bar + uniform(&mut rng, m, -2.0, 2.0);
            let label = ok(classify_sigma(&p, &s), "classify")?;
            if !label.in_scol_plus() {
                continue;
            }
            let Some(d) = ok(d_value(&p, &s), "D")? else {
                continue;
            };
            accepted += 1;
            ensure!(d <= ds + 1e-9, "trial {trial}: D({s:?}) = {d} > {ds}");
        }
    }
    Ok(format!(
        "50 instances, max |f - D| = {worst_gap:.1e}, 10^4 primal and 10^3 dual samples each"
    ))
}

fn expected_class(v: Verdict) -> Option<ProbeClass> {
    match v {
        Verdict::LocalStrictMin => Some(ProbeClass::LocalMin),
        Verdict::LocalStrictMax => Some(ProbeClass::LocalMax),
        Verdict::NotLocalExtremum => Some(ProbeClass::Neither),
        _ => None,
    }
}

fn fd_class(h: &Matrix) -> ProbeClass {
    hessian_sign_class(h, 1e-6 * h.amax().max(1.0))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let band = 1e-6;
    let mut cases = 0;
    let mut attempts = 0;
    let mut tally = std::collections::BTreeMap::new();
    while cases < 100 {
        attempts += 1;
        ensure!(
            attempts < 5_000,
            "only {cases} usable instances after {attempts} attempts"
        );
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let v = random_smooth(&mut rng, m);
        let y = uniform(&mut rng, m, -1.0, 1.0);
        let s_star = ok(v.grad(&y), "grad V")?;
        let x_star = uniform(&mut rng, n, -1.0, 1.0);
        let b = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let target = -(&b * b.transpose() + Matrix::identity(n, n) * 0.5);
        let cons = random_constraints(&mut rng, n, m);
        let p = ok(
            reverse_engineered_instance(&cons, v, &x_star, &s_star, &target),
            "instance",
        )?;

        // Newton from a perturbed start; whatever S- point it reaches is used
        let start = &s_star + uniform(&mut rng, m, -0.05, 0.05);
        let Ok(found) = newton_critical_point(&p, &start, &NewtonOptions::default()) else {
            continue;
        };
        if !found.point.region.in_sminus() {
            continue;
        }
        let sigma = found.point.sigma.clone();
        let x = found
            .point
            .x_of_sigma
            .clone()
            .ok_or("no x(sigma) at an S- point")?;
        let Ok(fac) = factorize(&p, &x, &sigma) else {
            continue;
        };
        let clears = |mu: &[f64]| mu.iter().all(|&l| (l - 1.0).abs() > band);
        if !clears(&fac.spectra.q_eigenvalues) || !clears(&fac.spectra.r_eigenvalues) {
            continue;
        }
        let report = ok(verdict_negdef(&p, &x, &sigma), "verdict_negdef")?;
        let hf = ok(
            fd_hess(|z: &Vector| f_value(&p, z).unwrap_or(f64::NAN), &x, None),
            "fd f",
        )?;
        let hd = ok(
            fd_hess(
                |t: &Vector| d_value(&p, t).ok().flatten().unwrap_or(f64::NAN),
                &sigma,
                None,
            ),
            "fd D",
        )?;
        let (cf, cd) = (fd_class(&hf), fd_class(&hd));
        ensure!(
            expected_class(report.x_verdict) == Some(cf),
            "instance {cases}: x verdict {:?} vs finite differences {cf:?} (eig {:?})",
            report.x_verdict,
            sym_eigenvalues(&hf).as_slice()
        );
        ensure!(
            expected_class(report.sigma_verdict) == Some(cd),
            "instance {cases}: sigma verdict {:?} vs finite differences {cd:?} (eig {:?})",
            report.sigma_verdict,
            sym_eigenvalues(&hd).as_slice()
        );
        *tally
            .entry(format!("{:?}/{:?}", report.x_verdict, report.sigma_verdict))
            .or_insert(0) += 1;
        cases += 1;
    }
    Ok(format!(
        "100/100 agree ({attempts} instances drawn): {tally:?}"
    ))
}

fn criterion_5() -> Outcome {
    let p = ok(
        ProblemInstance::from_parts(
            vec![
                (dmatrix![-2.0, 0.0; 0.0, -2.0], dvector![0.0, 0.0], 0.0),
                (dmatrix![1.0, 0.0; 0.0, 1.0], dvector![-1.0, 0.0], -0.5),
            ],
            CanonicalFunction::quadratic_diag(vec![1.0]).expect("valid"),
        ),
        "instance",
    )?;
    let (x, s) = (dvector![1.0, 0.0], dvector![1.0]);
    let r = ok(verdict_negdef(&p, &x, &s), "verdict_negdef")?;
    ensure!(
        r.sigma_verdict == Verdict::LocalStrictMin,
        "sigma verdict {:?}",
        r.sigma_verdict
    );
    let dprobe = default_probe(
        |t: &Vector| d_value(&p, t).ok().flatten().unwrap_or(f64::NAN),
        &s,
    );
    ensure!(
        dprobe.class == ProbeClass::LocalMin,
        "D probe {:?}",
        dprobe.class
    );
    let probe = default_probe(|z: &Vector| f_value(&p, z).unwrap_or(f64::NAN), &x);
    let (Some(up), Some(down)) = (&probe.ascent, &probe.descent) else {
        return Err(format!(
            "f probe found ascent {:?}, descent {:?}",
            probe.ascent, probe.descent
        ));
    };
    Ok(format!(
        "sigma strict local min of D; f rises by {:.1e} along {:?} and falls by {:.1e} along {:?}",
        up.delta, up.direction, -down.delta, down.direction
    ))
}

fn catalog(rng: &mut ChaCha8Rng, m: usize) -> Vec<CanonicalFunction> {
    let w = |rng: &mut ChaCha8Rng, k: usize| {
        (0..k)
            .map(|_| rng.random_range(0.5..2.0))
            .collect::<Vec<_>>()
    };
    vec![
        CanonicalFunction::quadratic_diag(w(rng, m)).expect("valid"),
        CanonicalFunction::exponential(m).expect("valid"),
        CanonicalFunction::exp_plus_quad(1, w(rng, m - 1)).expect("valid"),
        CanonicalFunction::log_sum_exp_plus_quad(1.5, m, vec![]).expect("valid"),
        CanonicalFunction::indicator_cone(m, vec![]).expect("valid"),
    ]
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (n, m) = (3, 2);
    let mut worst = [0.0f64; 4];
    for v in catalog(&mut rng, m) {
        let kind = v.kind();
        let is_cone = kind == Kind::IndicatorCone;
        let mut parts = vec![(
            random_sym(&mut rng, n),
            uniform(&mut rng, n, -1.0, 1.0),
            0.0,
        )];
        for _ in 0..m {
            let b = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = if is_cone {
                &b * b.transpose() + Matrix::identity(n, n)
            } else {
                random_sym(&mut rng, n)
            };
            parts.push((
                a,
                uniform(&mut rng, n, -0.5, 0.5),
                if is_cone { -1.0 } else { 0.0 },
            ));
        }
        let p = ok(ProblemInstance::from_parts(parts, v), "instance")?;

        // ι_C ∘ q has no smooth calculus; only D is differentiated for the cone kind
        let mut done = if is_cone { 20 } else { 0 };
        if is_cone {
            let x = Vector::zeros(n);
            ensure!(
                matches!(f_grad(&p, &x), Err(Error::UnsupportedForKind { .. }))
                    && matches!(f_hess(&p, &x), Err(Error::UnsupportedForKind { .. })),
                "cone f derivatives should be unsupported"
            );
        }
        while done < 20 {
            let x = uniform(&mut rng, n, -1.0, 1.0);
            if !ok(in_x0(&p, &x), "X0")? {
                continue;
            }
            let f = |z: &Vector| f_value(&p, z).unwrap_or(f64::NAN);
            let eg = rel_err(
                &ok(f_grad(&p, &x), "grad f")?,
                &ok(fd_grad(f, &x, None), "fd grad f")?,
            );
            let eh = rel_err_mat(
                &ok(f_hess(&p, &x), "hess f")?,
                &ok(fd_hess(f, &x, None), "fd hess f")?,
            );
            ensure!(
                eg <= 1e-5 && eh <= 1e-4,
                "{kind:?} at x = {x:?}: grad {eg:e}, hess {eh:e}"
            );
            worst[0] = worst[0].max(eg);
            worst[1] = worst[1].max(eh);
            done += 1;
        }

        let mut done = 0;
        while done < 20 {
            let s = if is_cone {
                uniform(&mut rng, m, 0.1, 2.0)
            } else {
                ok(p.v().grad(&uniform(&mut rng, m, -1.0, 1.0)), "grad V")?
            };
            let label = ok(classify_sigma(&p, &s), "classify")?;
            if !label.in_int_dom_vstar || label.lambda_min.abs().min(label.lambda_max.abs()) < 0.1 {
                continue;
            }
            let ev = sym_eigenvalues(&ok(p.assemble(&s), "assemble")?.a);
            if ev.iter().any(|l| l.abs() < 0.1) {
                continue;
            }
            let d = |t: &Vector| d_value(&p, t).ok().flatten().unwrap_or(f64::NAN);
            let eg = rel_err(
                &ok(d_grad(&p, &s), "grad D")?,
                &ok(fd_grad(d, &s, None), "fd grad D")?,
            );
            let eh = rel_err_mat(
                &ok(d_hess(&p, &s), "hess D")?,
                &ok(fd_hess(d, &s, None), "fd hess D")?,
            );
            ensure!(
                eg <= 1e-5 && eh <= 1e-4,
                "{kind:?} at sigma = {s:?}: grad {eg:e}, hess {eh:e}"
            );
            worst[2] = worst[2].max(eg);
            worst[3] = worst[3].max(eh);
            done += 1;
        }
    }
    Ok(format!(
        "5 kinds x 20 points (cone: D only); worst relative error grad f {:.1e}, hess f {:.1e}, grad D {:.1e}, hess D {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_conj: f64 = 0.0;
    let mut worst_fy: f64 = 0.0;
    let mut functions = catalog(&mut rng, 2);
    functions.push(CanonicalFunction::indicator_cone(2, vec![0]).expect("valid"));
    for v in functions {
        let smooth = v.smoothness_class() == SmoothnessClass::GammaSC2;
        for _ in 0..10 {
            let y = uniform(&mut rng, 2, -1.5, 1.5);
            let sigma = if smooth {
                ok(v.grad(&y), "grad V")?
            } else {
                let mut s = uniform(&mut rng, 2, 0.1, 2.0);
                if v.is_equality_index(0) {
                    s[0] = rng.random_range(-2.0..2.0);
                }
                s
            };
            ensure!(
                v.in_int_dom_conj(&sigma),
                "{:?}: sigma {sigma:?} not interior",
                v.kind()
            );
            let exact = ok(v.conjugate(&sigma), "conjugate")?;
            let grid = ok(
                numeric_conjugate(&v, &sigma, (-4.0, 4.0), 200),
                "numeric conjugate",
            )?;
            ensure!(
                (exact - grid).abs() <= 1e-6,
                "{:?} at {sigma:?}: {exact} vs {grid}",
                v.kind()
            );
            worst_conj = worst_conj.max((exact - grid).abs());
            if smooth {
                let gap = ok(v.value(&y), "V")? + exact - y.dot(&sigma);
                ensure!(
                    gap.abs() <= 1e-8,
                    "{:?}: Fenchel-Young gap {gap:e}",
                    v.kind()
                );
                worst_fy = worst_fy.max(gap.abs());
            }
        }
    }
    Ok(format!(
        "all kinds, max |V* - grid| = {worst_conj:.1e}, max Fenchel-Young gap = {worst_fy:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let p = trust_region();
    let (x, s) = ball_multiplier(p.q0().a(), p.q0().b(), TRUST_RADIUS).ok_or("no multiplier")?;
    let cp = ok(ConeProblem::new(p.clone()), "cone")?;
    let out = ok(check_j_lkkt(&cp, &x, &dvector![s]), "J-LKKT")?;
    let cert = out
        .certificate
        .ok_or(format!("no certificate: {:?}", out.violations))?;
    ensure!(
        cert.kind == CertificateKind::GlobalMin,
        "certificate kind {:?}",
        cert.kind
    );

    // square grid clipped to the disk; every disk point is within √2·h of it
    let h = 1e-3;
    let k = (TRUST_RADIUS / h).round() as i64;
    let mut grid_min = f64::INFINITY;
    let mut y = Vector::zeros(2);
    for i in -k..=k {
        for j in -k..=k {
            y[0] = i as f64 * h;
            y[1] = j as f64 * h;
            if y.norm_squared() <= TRUST_RADIUS * TRUST_RADIUS {
                grid_min = grid_min.min(p.q0().eval(&y));
            }
        }
    }
    // |∇q0| ≤ 3.5 on the unit disk
    let resolution = 3.5 * std::f64::consts::SQRT_2 * h;
    ensure!(
        cert.q0 <= grid_min + 1e-12 && grid_min - cert.q0 <= resolution,
        "certified {} vs grid {grid_min} (resolution {resolution:e})",
        cert.q0
    );

    let e1 = ok(ConeProblem::new(example1()), "cone")?;
    let max = ok(
        check_j_lkkt_max(&e1, &dvector![1.0], &dvector![0.0]),
        "J-LKKT max",
    )?;
    let c = max
        .certificate
        .ok_or(format!("no max certificate: {:?}", max.violations))?;
    ensure!(
        c.kind == CertificateKind::GlobalMax
            && (c.q0 - 0.5).abs() <= 1e-12
            && (c.dl - 0.5).abs() <= 1e-12,
        "example 1 certificate {c:?}"
    );
    Ok(format!(
        "trust region min {:.8} vs grid {grid_min:.8}; example 1 GlobalMax q0 = L = D_L = {}",
        cert.q0, c.q0
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("example 1 reproduction", criterion_1),
        ("spectral identities", criterion_2),
        ("min-max duality", criterion_3),
        ("negative-definite classification", criterion_4),
        ("m < n witness", criterion_5),
        ("derivative correctness", criterion_6),
        ("conjugate catalog", criterion_7),
        ("cone duality certificates", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

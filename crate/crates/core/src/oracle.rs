//! Brute-force verifiers: finite differences, sphere probes for local
//! extrema, and a grid-search Fenchel conjugate.
//!
//! Nothing here is used by the analysis path. All sampling is seeded, so
//! repeated runs give identical answers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::canonical::CanonicalFunction;
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, sym_eigenvalues, symmetrize, Matrix, Vector};
use crate::quadratic::ProblemInstance;

pub const PROBE_RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const PROBE_DIRECTIONS: usize = 200;
const PROBE_SEED: u64 = 0x5eed_0001;

fn default_step(x: &Vector, base: f64) -> f64 {
    base * inf_norm(x).max(1.0)
}

/// Central-difference gradient. Default step `1e-6 · max(1, ‖x‖∞)`.
pub fn fd_grad<F: Fn(&Vector) -> f64>(f: F, x: &Vector, h: Option<f64>) -> Result<Vector> {
    let h = h.unwrap_or_else(|| default_step(x, 1e-6));
    let mut g = Vector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::StencilLeftDomain);
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian from function values.
///
/// Default step `1e-4 · max(1, ‖x‖∞)`, which balances the `O(h²)` truncation
/// against the `ε/h²` rounding of second differences.
pub fn fd_hess<F: Fn(&Vector) -> f64>(f: F, x: &Vector, h: Option<f64>) -> Result<Matrix> {
    let h = h.unwrap_or_else(|| default_step(x, 1e-4));
    let n = x.len();
    let eval = |dx: &[(usize, f64)]| {
        let mut y = x.clone();
        for &(i, d) in dx {
            y[i] += d;
        }
        let v = f(&y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::StencilLeftDomain)
        }
    };
    let f0 = eval(&[])?;
    let mut hm = Matrix::zeros(n, n);
    for i in 0..n {
        let fp = eval(&[(i, h)])?;
        let fm = eval(&[(i, -h)])?;
        hm[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let pp = eval(&[(i, h), (j, h)])?;
            let pm = eval(&[(i, h), (j, -h)])?;
            let mp = eval(&[(i, -h), (j, h)])?;
            let mm = eval(&[(i, -h), (j, -h)])?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    Ok(hm)
}

/// `‖a − b‖∞ / max(1, ‖b‖∞)`, with `b` the reference.
pub fn rel_err(a: &Vector, b: &Vector) -> f64 {
    inf_norm(&(a - b)) / inf_norm(b).max(1.0)
}

pub fn rel_err_mat(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeClass {
    LocalMin,
    LocalMax,
    Neither,
    Inconclusive,
}

/// A sampled displacement and the resulting change `fn(c + r u) − fn(c)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub radius: f64,
    pub direction: Vec<f64>,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub class: ProbeClass,
    /// Smallest-radius direction along which the value increased.
    pub ascent: Option<Witness>,
    /// Smallest-radius direction along which the value decreased.
    pub descent: Option<Witness>,
}

/// Deterministic unit directions: `±e_i` first, then seeded Gaussian draws.
pub fn probe_directions(dim: usize, count: usize) -> Vec<Vector> {
    let mut dirs = Vec::with_capacity(count.max(2 * dim));
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = Vector::zeros(dim);
            e[i] = s;
            dirs.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    while dirs.len() < count {
        let v = Vector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        let norm = v.norm();
        if norm > 1e-3 {
            dirs.push(v / norm);
        }
    }
    dirs
}

/// Strict comparison of `fn` at `center` against sphere samples at each radius.
///
/// `LocalMin` (resp. `LocalMax`) when every sample at every radius is larger
/// (smaller); `Neither` when every radius has both an increase and a decrease;
/// `Inconclusive` otherwise, including ties and non-finite samples.
pub fn grid_extremum_probe<F: Fn(&Vector) -> f64>(
    f: F,
    center: &Vector,
    radii: &[f64],
    directions: usize,
) -> ProbeResult {
    let dirs = probe_directions(center.len(), directions);
    let f0 = f(center);
    let mut all_up = true;
    let mut all_down = true;
    let mut mixed_everywhere = true;
    let mut ascent = None;
    let mut descent = None;
    for &r in radii {
        let mut up = false;
        let mut down = false;
        let mut tie = false;
        for d in &dirs {
            let delta = f(&(center + d * r)) - f0;
            if !delta.is_finite() {
                tie = true;
            } else if delta > 0.0 {
                up = true;
                ascent = Some(Witness {
                    radius: r,
                    direction: d.iter().copied().collect(),
                    delta,
                });
            } else if delta < 0.0 {
                down = true;
                descent = Some(Witness {
                    radius: r,
                    direction: d.iter().copied().collect(),
                    delta,
                });
            } else {
                tie = true;
            }
        }
        all_up &= up && !down && !tie;
        all_down &= down && !up && !tie;
        mixed_everywhere &= up && down;
    }
    let class = if !f0.is_finite() {
        ProbeClass::Inconclusive
    } else if all_up {
        ProbeClass::LocalMin
    } else if all_down {
        ProbeClass::LocalMax
    } else if mixed_everywhere {
        ProbeClass::Neither
    } else {
        ProbeClass::Inconclusive
    };
    ProbeResult {
        class,
        ascent,
        descent,
    }
}

/// Probe with the default radii `1e-2, 1e-3, 1e-4` and 200 directions.
pub fn default_probe<F: Fn(&Vector) -> f64>(f: F, center: &Vector) -> ProbeResult {
    grid_extremum_probe(f, center, &PROBE_RADII, PROBE_DIRECTIONS)
}

/// Second-order sign class of a symmetric matrix: all eigenvalues above
/// `tol` → `LocalMin`, all below `−tol` → `LocalMax`, both signs → `Neither`.
pub fn hessian_sign_class(h: &Matrix, tol: f64) -> ProbeClass {
    let ev = sym_eigenvalues(h);
    let lo = ev[0];
    let hi = ev[ev.len() - 1];
    if lo > tol {
        ProbeClass::LocalMin
    } else if hi < -tol {
        ProbeClass::LocalMax
    } else if lo < -tol && hi > tol {
        ProbeClass::Neither
    } else {
        ProbeClass::Inconclusive
    }
}

/// `sup_y ⟨y, σ⟩ − V(y)` by grid search over `[lo, hi]^m` (`steps` intervals
/// per axis) followed by compass-search refinement from the best grid point.
///
/// With `lo = −hi` and even `steps` the grid contains 0, which the cone
/// indicators need for their equality coordinates. The result never exceeds
/// the true supremum up to rounding.
pub fn numeric_conjugate(
    v: &CanonicalFunction,
    sigma: &Vector,
    bounds: (f64, f64),
    steps: usize,
) -> Result<f64> {
    let m = v.dim();
    if sigma.len() != m {
        return Err(Error::DimensionMismatch {
            what: "sigma",
            expected: m,
            found: sigma.len(),
        });
    }
    let (lo, hi) = bounds;
    let steps = steps.max(1);
    let h = (hi - lo) / steps as f64;
    let objective = |y: &Vector| -> f64 {
        let val = v.value(y).unwrap_or(f64::INFINITY);
        if val.is_finite() {
            y.dot(sigma) - val
        } else {
            f64::NEG_INFINITY
        }
    };

    let mut best = f64::NEG_INFINITY;
    let mut best_y = Vector::zeros(m);
    let mut idx = vec![0usize; m];
    let mut y = Vector::zeros(m);
    loop {
        for k in 0..m {
            y[k] = lo + h * idx[k] as f64;
        }
        let val = objective(&y);
        if val > best {
            best = val;
            best_y.copy_from(&y);
        }
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::EmptySearchRegion);
    }

    let mut step = h;
    let mut iterations = 0usize;
    while step > 1e-13 && iterations < 200_000 {
        iterations += 1;
        let mut improved = false;
        for k in 0..m {
            for s in [step, -step] {
                let mut trial = best_y.clone();
                trial[k] += s;
                let val = objective(&trial);
                if val > best {
                    best = val;
                    best_y = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best)
}

/// Builds an instance for which `(x̄, σ̄)` is a critical pair with
/// `A(σ̄) = target`: given `(A_i, b_i)` for `i ≥ 1`, sets
/// `c_i = ∇V*(σ̄)_i − ½x̄ᵀA_i x̄ + b_iᵀx̄`, `A_0 = target − Σσ̄_i A_i` and
/// `b_0 = target·x̄ − Σσ̄_i b_i`.
///
/// `σ̄` must lie in `int dom V*`. For the cone indicators every constraint
/// ends up active at `x̄`.
pub fn reverse_engineered_instance(
    constraints: &[(Matrix, Vector)],
    v: CanonicalFunction,
    x_bar: &Vector,
    sigma_bar: &Vector,
    target: &Matrix,
) -> Result<ProblemInstance> {
    let n = x_bar.len();
    if target.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            what: "target matrix",
            expected: n,
            found: target.nrows(),
        });
    }
    if constraints.len() != v.dim() {
        return Err(Error::DimensionMismatch {
            what: "number of constraints",
            expected: v.dim(),
            found: constraints.len(),
        });
    }
    let y = v.conj_grad(sigma_bar)?;
    let mut a0 = target.clone();
    let mut b0 = target * x_bar;
    let mut parts = Vec::with_capacity(constraints.len() + 1);
    for (i, (a, b)) in constraints.iter().enumerate() {
        a0 -= a * sigma_bar[i];
        b0 -= b * sigma_bar[i];
        let c = y[i] - 0.5 * x_bar.dot(&(a * x_bar)) + b.dot(x_bar);
        parts.push((a.clone(), b.clone(), c));
    }
    parts.insert(0, (symmetrize(&a0), b0, 0.0));
    ProblemInstance::from_parts(parts, v)
}

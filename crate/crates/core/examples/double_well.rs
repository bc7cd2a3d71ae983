//! `f(x) = −½x² + ½(½x² − 1)²` and its dual `D(σ) = −½σ² − σ`, defined
//! for every `σ` because `b = 0`.
//!
//! Newton on `D` from a handful of seeds finds the `S⁻` critical point
//! `σ̄ = −1`; the primal minimizers `x = ±2` sit at the singular `σ̄ = 1`.
//!
//! ```text
//! cargo run --example double_well
//! ```

use canonical_duality::commands::{analyze, default_seeds, AnalyzeOptions};
use canonical_duality::complementary::{f_hess, f_value};
use canonical_duality::reproduce::double_well;
use canonical_duality::triality::verdict_psd;
use nalgebra::dvector;

fn main() -> canonical_duality::Result<()> {
    let p = double_well();
    let report = analyze(&p, &default_seeds(1), &AnalyzeOptions::default());
    for c in &report.critical_points {
        let t = c.triality.as_ref().unwrap();
        println!(
            "sigma = {:?} x = {:?} ({}) f = {:?} D = {:?}: x {:?}, sigma {:?}",
            c.sigma, c.x, c.region, c.f, c.d, t.x_verdict, t.sigma_verdict
        );
    }
    for f in &report.failures {
        println!("seed {:?}: {}", f.seed, f.error);
    }

    for x in [-2.0, 2.0] {
        let r = verdict_psd(&p, &dvector![x], &dvector![1.0])?;
        println!(
            "x = {x:>4}, sigma = 1: {:?} {:?}/{:?}  f = {}  f'' = {}",
            r.branch,
            r.x_verdict,
            r.sigma_verdict,
            f_value(&p, &dvector![x])?,
            f_hess(&p, &dvector![x])?[(0, 0)]
        );
    }
    Ok(())
}

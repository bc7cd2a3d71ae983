//! Trust-region subproblem: minimize `½xᵀA₀x − b₀ᵀx` over the unit disk with
//! an indefinite `A₀`, certified through the Lagrangian dual.
//!
//! ```text
//! cargo run --example trust_region
//! ```

use canonical_duality::cone::{ball_multiplier, check_j_lkkt, ConeProblem};
use canonical_duality::reproduce::{trust_region, TRUST_RADIUS};
use canonical_duality::Vector;
use nalgebra::dvector;

fn main() -> canonical_duality::Result<()> {
    let p = trust_region();
    let (x, sigma) = ball_multiplier(p.q0().a(), p.q0().b(), TRUST_RADIUS).expect("easy case");
    println!(
        "secular equation root sigma = {sigma:.12}, x = {:?}",
        x.as_slice()
    );

    let cp = ConeProblem::new(p.clone())?;
    let out = check_j_lkkt(&cp, &x, &dvector![sigma])?;
    let cert = out.certificate.expect("A(sigma) is positive semidefinite");
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());

    // polar grid over the disk
    let mut best = f64::INFINITY;
    for i in 0..=200 {
        let r = TRUST_RADIUS * i as f64 / 200.0;
        for k in 0..1000 {
            let t = std::f64::consts::TAU * k as f64 / 1000.0;
            let y: Vector = dvector![r * t.cos(), r * t.sin()];
            best = best.min(p.q0().eval(&y));
        }
    }
    println!("grid minimum {best:.8} vs certified {:.8}", cert.q0);
    Ok(())
}

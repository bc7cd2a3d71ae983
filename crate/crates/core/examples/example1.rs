//! The one-dimensional constrained problem `min −½x² + x` on `[−1, 1]`.
//!
//! Its two KKT pairs behave very differently: `(−1, 2)` has `A(σ) = 1 ≻ 0` and
//! is a global min-max point, while `(1, 0)` has `A(σ) = −1 ≺ 0` and pairs a
//! maximizer of `f` with a minimizer of `D`.
//!
//! ```text
//! cargo run --example example1
//! ```

use canonical_duality::cone::{check_j_lkkt, check_j_lkkt_max, dl_value, ConeProblem};
use canonical_duality::dual::classify_sigma;
use canonical_duality::reproduce::example1;
use canonical_duality::triality::verdict_psd;
use nalgebra::dvector;

fn main() -> canonical_duality::Result<()> {
    let p = example1();

    println!("D(sigma) = (1/(1-sigma) - sigma)/2 away from sigma = 1:");
    for s in [0.0, 0.5, 0.9, 2.0, 3.0] {
        let region = classify_sigma(&p, &dvector![s])?;
        let d = dl_value(&p, &dvector![s])?;
        println!(
            "  sigma = {s:>4}  D = {:>10.6}  region {}",
            d.unwrap(),
            region.name()
        );
    }
    println!(
        "  sigma =  1.0  D = {:?} (A(1) = 0, b(1) = -1)",
        dl_value(&p, &dvector![1.0])?
    );

    let r = verdict_psd(&p, &dvector![-1.0], &dvector![2.0])?;
    println!(
        "\n(-1, 2): {:?}, x {:?}, sigma {:?}, f = Xi = D = {}",
        r.branch,
        r.x_verdict,
        r.sigma_verdict,
        r.chain.unwrap().f
    );

    let cp = ConeProblem::new(p)?;
    let (x, s) = (dvector![1.0], dvector![0.0]);
    let min = check_j_lkkt(&cp, &x, &s)?;
    let max = check_j_lkkt_max(&cp, &x, &s)?;
    println!(
        "(1, 0): KKT holds = {}, min certificate = {}, max certificate = {:?}",
        min.holds,
        min.certificate.is_some(),
        max.certificate.map(|c| (c.kind, c.q0, c.dl))
    );
    Ok(())
}

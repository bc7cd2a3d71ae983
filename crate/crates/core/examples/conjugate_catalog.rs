//! The five canonical functions: closed-form conjugates against a grid
//! search, and the Fenchel–Young equality at `σ = ∇V(y)`.
//!
//! ```text
//! cargo run --example conjugate_catalog
//! ```

use canonical_duality::oracle::numeric_conjugate;
use canonical_duality::{CanonicalFunction, Vector};
use nalgebra::dvector;

fn main() -> canonical_duality::Result<()> {
    let catalog = [
        (
            CanonicalFunction::quadratic_diag(vec![2.0, 0.5])?,
            dvector![1.0, -0.4],
        ),
        (CanonicalFunction::exponential(2)?, dvector![0.7, 2.0]),
        (
            CanonicalFunction::exp_plus_quad(1, vec![3.0])?,
            dvector![1.5, -1.0],
        ),
        (
            CanonicalFunction::log_sum_exp_plus_quad(2.0, 1, vec![1.0])?,
            dvector![0.3, 0.8],
        ),
        (
            CanonicalFunction::indicator_cone(2, vec![1])?,
            dvector![0.4, -2.0],
        ),
    ];
    for (v, sigma) in &catalog {
        let exact = v.conjugate(sigma)?;
        let grid = numeric_conjugate(v, sigma, (-8.0, 8.0), 200)?;
        print!(
            "{:<18} {:?}  V* = {exact:>10.7}  grid = {grid:>10.7}",
            v.kind().name(),
            v.smoothness_class()
        );
        if let Ok(y) = v.conj_grad(sigma) {
            if v.in_int_dom(&y) {
                let gap: f64 = v.value(&y)? + exact - y.dot(sigma);
                let back: Vector = v.grad(&y)?;
                print!(
                    "  FY gap {gap:.1e}  |grad V(grad V*) - sigma| {:.1e}",
                    (back - sigma).amax()
                );
            }
        }
        println!();
    }
    Ok(())
}

//! Local classification when `A(σ̄) ≺ 0`: build critical pairs with a chosen
//! `A(σ̄)`, factor, and compare the verdicts read off `HHᵀ`/`HᵀH` against
//! the sign pattern of the Hessians of `f` and `D`.
//!
//! ```text
//! cargo run --example negdef_classification
//! ```

use canonical_duality::complementary::f_hess;
use canonical_duality::dual::d_hess;
use canonical_duality::linalg::sym_eigenvalues;
use canonical_duality::oracle::reverse_engineered_instance;
use canonical_duality::triality::verdict_negdef;
use canonical_duality::{CanonicalFunction, Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> canonical_duality::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, m) in [(1, 1), (2, 1), (1, 2), (3, 3), (2, 4)] {
        let cons: Vec<(Matrix, Vector)> = (0..m)
            .map(|_| {
                let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
                (
                    &a + a.transpose(),
                    Vector::from_fn(n, |_, _| rng.random_range(-2.0..2.0)),
                )
            })
            .collect();
        let v = CanonicalFunction::log_sum_exp_plus_quad(1.0, 1, vec![1.5; m - 1])?;
        let x = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let mut sigma = Vector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        sigma[0] = 0.4;
        let target = -Matrix::identity(n, n) * rng.random_range(0.2..2.0);
        let p = reverse_engineered_instance(&cons, v, &x, &sigma, &target)?;

        let r = verdict_negdef(&p, &x, &sigma)?;
        let s = r.spectra.as_ref().unwrap();
        let ef = sym_eigenvalues(&f_hess(&p, &x)?);
        let ed = sym_eigenvalues(&d_hess(&p, &sigma)?);
        println!("n = {n}, m = {m}");
        println!(
            "  HH^T {:.4?} -> x {:?}; eig hess f {:.4?}",
            s.q_eigenvalues,
            r.x_verdict,
            ef.as_slice()
        );
        println!(
            "  H^TH {:.4?} -> sigma {:?}; eig hess D {:.4?}",
            s.r_eigenvalues,
            r.sigma_verdict,
            ed.as_slice()
        );
    }
    Ok(())
}

//! For any `H`, `HHᵀ` and `HᵀH` share their largest and smallest positive
//! eigenvalues, and the kernels account for the difference in size.
//!
//! ```text
//! cargo run --example spectral_identities
//! ```

use canonical_duality::spectral::{kernel_image_flags, spectral_summary};
use canonical_duality::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, m, rank) in [(3, 2, 2), (2, 4, 2), (4, 4, 2), (5, 1, 1)] {
        let left = Matrix::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
        let right = Matrix::from_fn(rank, m, |_, _| rng.random_range(-1.0..1.0));
        let h = left * right;
        let s = spectral_summary(&h);
        let (onto, one_to_one) = kernel_image_flags(&h);
        println!(
            "{n}x{m} rank {}: alpha {:.12} beta {:.12} gamma {:.6?} delta {:.6?} \
             dim ker HH^T {} dim ker H^TH {} onto {onto} injective {one_to_one}",
            s.rank, s.alpha, s.beta, s.gamma, s.delta, s.ker_q_dim, s.ker_r_dim
        );
    }
}

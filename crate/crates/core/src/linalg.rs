//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigen(a: &Matrix) -> (Vector, Matrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vector::zeros(0), Matrix::zeros(0, 0));
    }
    let sym = symmetrize(a);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn sym_eigenvalues(a: &Matrix) -> Vector {
    sym_eigen(a).0
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

pub fn max_asymmetry(a: &Matrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn inf_norm(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Maximum absolute entry.
pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Spectral norm of a symmetric matrix.
pub fn sym_norm2(a: &Matrix) -> f64 {
    let ev = sym_eigenvalues(a);
    ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Minimum-norm least-squares solution of `a x = b` for symmetric `a`,
/// discarding eigenvalues with `|λ| <= cutoff`.
pub fn sym_pinv_solve(a: &Matrix, b: &Vector, cutoff: f64) -> Vector {
    let (values, vectors) = sym_eigen(a);
    let mut x = Vector::zeros(a.nrows());
    for k in 0..values.len() {
        if values[k].abs() > cutoff {
            let v = vectors.column(k);
            x += v * (v.dot(b) / values[k]);
        }
    }
    x
}

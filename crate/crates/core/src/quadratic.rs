//! Quadratic data `q_i(x) = ½⟨x, A_i x⟩ − ⟨b_i, x⟩ + c_i` and the σ-affine
//! assembly `A(σ) = Σ σ_k A_k`, `b(σ)`, `c(σ)` with `σ_0 = 1`.

use crate::canonical::CanonicalFunction;
use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, symmetrize, Matrix, Vector};

/// Inputs whose asymmetry exceeds this (max-abs of `A − Aᵀ`) are rejected.
pub const ASYMMETRY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    a: Matrix,
    b: Vector,
    c: f64,
}

impl QuadraticForm {
    /// Builds a form, symmetrizing `a` as `(a + aᵀ)/2`.
    pub fn new(a: Matrix, b: Vector, c: f64) -> Result<Self> {
        Self::with_index(0, a, b, c)
    }

    fn with_index(index: usize, a: Matrix, b: Vector, c: f64) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                what: "linear term",
                expected: a.nrows(),
                found: b.len(),
            });
        }
        let asymmetry = max_asymmetry(&a);
        if asymmetry > ASYMMETRY_LIMIT {
            return Err(Error::Asymmetric { index, asymmetry });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadratic {index} has non-finite coefficients"
            )));
        }
        Ok(Self {
            a: symmetrize(&a),
            b,
            c,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) - self.b.dot(x) + self.c
    }

    /// `A x − b`.
    pub fn grad(&self, x: &Vector) -> Vector {
        &self.a * x - &self.b
    }
}

/// σ-dependent data `(A(σ), b(σ), c(σ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub a: Matrix,
    pub b: Vector,
    pub c: f64,
}

impl Assembled {
    /// `½⟨x, A x⟩ − ⟨b, x⟩ + c`.
    pub fn eval(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) - self.b.dot(x) + self.c
    }
}

/// The family `(q_0, …, q_m)` together with the canonical function `V`.
///
/// Defines `f = q_0 + V∘q`, the complementary function and the dual function.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    n: usize,
    quadratics: Vec<QuadraticForm>,
    v: CanonicalFunction,
}

impl ProblemInstance {
    /// `quadratics[0]` is the objective part; the remaining `m` forms feed `V`.
    pub fn new(quadratics: Vec<QuadraticForm>, v: CanonicalFunction) -> Result<Self> {
        let Some(first) = quadratics.first() else {
            return Err(Error::InvalidParameter("at least q_0 is required".into()));
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let m = quadratics.len() - 1;
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        for q in &quadratics {
            if q.dim() != n {
                return Err(Error::DimensionMismatch {
                    what: "quadratic dimension",
                    expected: n,
                    found: q.dim(),
                });
            }
        }
        if v.dim() != m {
            return Err(Error::DimensionMismatch {
                what: "canonical function dimension",
                expected: m,
                found: v.dim(),
            });
        }
        Ok(Self { n, quadratics, v })
    }

    /// Builds from raw `(A_i, b_i, c_i)` triples.
    pub fn from_parts(parts: Vec<(Matrix, Vector, f64)>, v: CanonicalFunction) -> Result<Self> {
        let quadratics = parts
            .into_iter()
            .enumerate()
            .map(|(i, (a, b, c))| QuadraticForm::with_index(i, a, b, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(quadratics, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.quadratics.len() - 1
    }

    pub fn v(&self) -> &CanonicalFunction {
        &self.v
    }

    pub fn quadratics(&self) -> &[QuadraticForm] {
        &self.quadratics
    }

    pub fn q0(&self) -> &QuadraticForm {
        &self.quadratics[0]
    }

    /// `q_i` for `i` in `1..=m`.
    pub fn constraint(&self, i: usize) -> &QuadraticForm {
        &self.quadratics[i]
    }

    /// Same family with a different canonical function of matching dimension.
    pub fn with_v(&self, v: CanonicalFunction) -> Result<Self> {
        Self::new(self.quadratics.clone(), v)
    }

    pub(crate) fn check_x(&self, x: &Vector) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "x",
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_sigma(&self, sigma: &Vector) -> Result<()> {
        if sigma.len() != self.m() {
            return Err(Error::DimensionMismatch {
                what: "sigma",
                expected: self.m(),
                found: sigma.len(),
            });
        }
        Ok(())
    }

    /// `q(x) = (q_1(x), …, q_m(x))`.
    pub fn eval_q(&self, x: &Vector) -> Result<Vector> {
        self.check_x(x)?;
        Ok(Vector::from_iterator(
            self.m(),
            self.quadratics[1..].iter().map(|q| q.eval(x)),
        ))
    }

    pub fn assemble(&self, sigma: &Vector) -> Result<Assembled> {
        self.check_sigma(sigma)?;
        let q0 = self.q0();
        let mut a = q0.a.clone();
        let mut b = q0.b.clone();
        let mut c = q0.c;
        for (s, q) in sigma.iter().zip(&self.quadratics[1..]) {
            a += &q.a * *s;
            b += &q.b * *s;
            c += s * q.c;
        }
        Ok(Assembled {
            a: symmetrize(&a),
            b,
            c,
        })
    }

    /// `L(x, σ) = q_0(x) + ⟨q(x), σ⟩`.
    pub fn lagrangian(&self, x: &Vector, sigma: &Vector) -> Result<f64> {
        self.check_sigma(sigma)?;
        let q = self.eval_q(x)?;
        Ok(self.q0().eval(x) + q.dot(sigma))
    }

    /// Columns `A_i x − b_i`, `i = 1..=m`.
    pub fn constraint_gradients(&self, x: &Vector) -> Result<Matrix> {
        self.check_x(x)?;
        let mut g = Matrix::zeros(self.n, self.m());
        for (i, q) in self.quadratics[1..].iter().enumerate() {
            g.set_column(i, &q.grad(x));
        }
        Ok(g)
    }
}

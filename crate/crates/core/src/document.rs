//! JSON problem files.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "n": 1,
//!   "m": 1,
//!   "quadratics": [
//!     { "A": [-1.0], "b": [-1.0], "c": 0.0 },
//!     { "A": [1.0], "b": [0.0], "c": -0.5 }
//!   ],
//!   "v": { "kind": "IndicatorCone", "params": { "equality": [] } },
//!   "seeds": [[0.5]]
//! }
//! ```
//!
//! `A` is row-major with `n·n` entries. `quadratics` holds `q_0` followed by
//! `q_1 … q_m`. Equality indices are 0-based.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canonical::{CanonicalFunction, Kind};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::quadratic::ProblemInstance;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticEntry {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", deny_unknown_fields)]
pub enum VSpec {
    QuadraticDiag {
        beta: Vec<f64>,
    },
    Exponential {},
    ExpPlusQuad {
        p: usize,
        beta: Vec<f64>,
    },
    LogSumExpPlusQuad {
        scale: f64,
        p: usize,
        beta: Vec<f64>,
    },
    IndicatorCone {
        #[serde(default)]
        equality: Vec<usize>,
    },
}

impl VSpec {
    pub fn from_function(v: &CanonicalFunction) -> Self {
        let beta = v.tail_weights().to_vec();
        match v.kind() {
            Kind::QuadraticDiag => VSpec::QuadraticDiag { beta },
            Kind::Exponential => VSpec::Exponential {},
            Kind::ExpPlusQuad => VSpec::ExpPlusQuad {
                p: v.head_len(),
                beta,
            },
            Kind::LogSumExpPlusQuad => VSpec::LogSumExpPlusQuad {
                scale: v.lse_scale().expect("log-sum-exp head"),
                p: v.head_len(),
                beta,
            },
            Kind::IndicatorCone => VSpec::IndicatorCone {
                equality: v.equality_set().expect("cone kind"),
            },
        }
    }

    pub fn build(&self, m: usize) -> Result<CanonicalFunction> {
        let v = match self {
            VSpec::QuadraticDiag { beta } => CanonicalFunction::quadratic_diag(beta.clone())?,
            VSpec::Exponential {} => CanonicalFunction::exponential(m)?,
            VSpec::ExpPlusQuad { p, beta } => CanonicalFunction::exp_plus_quad(*p, beta.clone())?,
            VSpec::LogSumExpPlusQuad { scale, p, beta } => {
                CanonicalFunction::log_sum_exp_plus_quad(*scale, *p, beta.clone())?
            }
            VSpec::IndicatorCone { equality } => {
                CanonicalFunction::indicator_cone(m, equality.clone())?
            }
        };
        if v.dim() != m {
            return Err(Error::DimensionMismatch {
                what: "canonical function dimension",
                expected: m,
                found: v.dim(),
            });
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub schema_version: String,
    pub n: usize,
    pub m: usize,
    pub quadratics: Vec<QuadraticEntry>,
    pub v: VSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<Vec<f64>>>,
}

impl ProblemDocument {
    pub fn from_instance(p: &ProblemInstance, seeds: Option<Vec<Vector>>) -> Self {
        let n = p.n();
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            n,
            m: p.m(),
            quadratics: p
                .quadratics()
                .iter()
                .map(|q| QuadraticEntry {
                    a: (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| q.a()[(i, j)])
                        .collect(),
                    b: q.b().iter().copied().collect(),
                    c: q.c(),
                })
                .collect(),
            v: VSpec::from_function(p.v()),
            seeds: seeds.map(|s| s.iter().map(|v| v.iter().copied().collect()).collect()),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let (n, m) = (self.n, self.m);
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Document(format!(
                "unsupported schema_version {:?}",
                self.schema_version
            )));
        }
        if self.quadratics.len() != m + 1 {
            return Err(Error::DimensionMismatch {
                what: "number of quadratics (m + 1)",
                expected: m + 1,
                found: self.quadratics.len(),
            });
        }
        let mut parts = Vec::with_capacity(m + 1);
        for q in &self.quadratics {
            if q.a.len() != n * n {
                return Err(Error::DimensionMismatch {
                    what: "entries of A (n * n)",
                    expected: n * n,
                    found: q.a.len(),
                });
            }
            parts.push((
                Matrix::from_row_slice(n, n, &q.a),
                Vector::from_column_slice(&q.b),
                q.c,
            ));
        }
        for s in self.seeds.iter().flatten() {
            if s.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "seed length",
                    expected: m,
                    found: s.len(),
                });
            }
        }
        ProblemInstance::from_parts(parts, self.v.build(m)?)
    }

    pub fn seed_vectors(&self) -> Option<Vec<Vector>> {
        self.seeds
            .as_ref()
            .map(|s| s.iter().map(|v| Vector::from_column_slice(v)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Document(format!("{}: {e}", path.display())))
    }
}

/// Parses and validates a problem file in one step.
pub fn load_problem(path: impl AsRef<Path>) -> Result<(ProblemInstance, Option<Vec<Vector>>)> {
    let doc = ProblemDocument::load(path)?;
    Ok((doc.to_instance()?, doc.seed_vectors()))
}

//! Dense feature storage and the kernels shared by every strategy: row norms,
//! inner products, and the modified Gram-Schmidt residual update.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major `N x d` matrix of finite `f64` values, one row per example.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_examples: usize,
    n_dims: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    /// Validates shape and finiteness. Non-finite entries are reported with
    /// their row and column.
    pub fn new(n_examples: usize, n_dims: usize, data: Vec<f64>) -> Result<Self> {
        if n_examples == 0 || n_dims == 0 {
            return Err(Error::InvalidMatrix(format!(
                "shape ({n_examples}, {n_dims}) has an empty dimension"
            )));
        }
        let expected = n_examples
            .checked_mul(n_dims)
            .ok_or_else(|| Error::InvalidMatrix("shape overflows usize".into()))?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "shape ({n_examples}, {n_dims}) needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                row: pos / n_dims,
                col: pos % n_dims,
            });
        }
        Ok(Self {
            n_examples,
            n_dims,
            data,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(n, d, data)
    }

    pub fn n_examples(&self) -> usize {
        self.n_examples
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_dims..(i + 1) * self.n_dims]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_dims)
    }

    /// Multiplies every entry by `c`. Fails only if the product overflows.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.n_examples,
            self.n_dims,
            self.data.iter().map(|v| v * c).collect(),
        )
    }

    /// Copies the listed rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.n_dims);
        for &i in indices {
            if i >= self.n_examples {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n_examples,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.n_dims, data)
    }

    pub fn norms(&self, norm: NormType) -> Vec<f64> {
        compute_norms(self, norm)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormType {
    L1,
    #[default]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl NormType {
    pub const ALL: [NormType; 3] = [NormType::L1, NormType::L2, NormType::LInf];

    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            NormType::L1 => v.iter().map(|x| x.abs()).sum(),
            NormType::L2 => dot(v, v).sqrt(),
            NormType::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormType::L1 => "l1",
            NormType::L2 => "l2",
            NormType::LInf => "linf",
        }
    }
}

impl fmt::Display for NormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormType::L1),
            "l2" => Ok(NormType::L2),
            "linf" => Ok(NormType::LInf),
            other => Err(Error::ParseError(format!("unknown norm type '{other}'"))),
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-row norms of `features` under `norm`.
pub fn compute_norms(features: &FeatureMatrix, norm: NormType) -> Vec<f64> {
    features.rows().map(|r| norm.of(r)).collect()
}

/// Working residuals for Gram-Schmidt selection.
///
/// Each row starts as a copy of the corresponding feature vector. Projecting
/// out a selected example removes its current residual direction from every
/// other unselected row, so that after `k` projections the residual of row
/// `j` is `F_j` minus its orthogonal projection onto the span of the `k`
/// selected features. Selected rows are frozen and never updated again.
///
/// Single owner; not meant to be mutated from several threads.
#[derive(Clone, Debug)]
pub struct ResidualState {
    n_dims: usize,
    residuals: Vec<f64>,
    original_norms: Vec<f64>,
    residual_norms: Vec<f64>,
    exhausted: Vec<bool>,
    frozen: Vec<bool>,
    epsilon_rel: f64,
}

impl ResidualState {
    pub fn new(features: &FeatureMatrix, epsilon_rel: f64) -> Self {
        let original_norms = compute_norms(features, NormType::L2);
        let exhausted = original_norms.iter().map(|&n| n == 0.0).collect();
        Self {
            n_dims: features.n_dims(),
            residuals: features.data().to_vec(),
            residual_norms: original_norms.clone(),
            original_norms,
            exhausted,
            frozen: vec![false; features.n_examples()],
            epsilon_rel,
        }
    }

    pub fn n_examples(&self) -> usize {
        self.original_norms.len()
    }

    pub fn residual(&self, j: usize) -> &[f64] {
        &self.residuals[j * self.n_dims..(j + 1) * self.n_dims]
    }

    /// Euclidean norm of the current residual of `j`.
    pub fn residual_norm(&self, j: usize) -> f64 {
        self.residual_norms[j]
    }

    pub fn original_norm(&self, j: usize) -> f64 {
        self.original_norms[j]
    }

    pub fn is_exhausted(&self, j: usize) -> bool {
        self.exhausted[j]
    }

    /// True once `j` has been projected out.
    pub fn is_frozen(&self, j: usize) -> bool {
        self.frozen[j]
    }

    pub fn epsilon_rel(&self) -> f64 {
        self.epsilon_rel
    }

    /// Removes the direction of the residual of `selected` from every other
    /// unselected residual and freezes `selected`.
    pub fn project_out(&mut self, selected: usize) -> Result<()> {
        let n = self.n_examples();
        if selected >= n {
            return Err(Error::IndexOutOfRange {
                index: selected,
                len: n,
            });
        }
        if self.frozen[selected] {
            return Err(Error::InvalidConfig(format!(
                "example {selected} was already projected out"
            )));
        }
        let d = self.n_dims;
        let pivot = self.residual(selected).to_vec();
        let pivot_sq = dot(&pivot, &pivot);
        if self.exhausted[selected] || pivot_sq == 0.0 {
            return Err(Error::ZeroPivot(selected));
        }
        self.frozen[selected] = true;

        for (j, row) in self.residuals.chunks_exact_mut(d).enumerate() {
            if self.frozen[j] {
                continue;
            }
            let coef = dot(row, &pivot) / pivot_sq;
            for (r, p) in row.iter_mut().zip(&pivot) {
                *r -= coef * p;
            }
            let norm = dot(row, row).sqrt();
            self.residual_norms[j] = norm;
            let orig = self.original_norms[j];
            self.exhausted[j] = orig == 0.0 || norm <= self.epsilon_rel * orig;
        }
        Ok(())
    }
}

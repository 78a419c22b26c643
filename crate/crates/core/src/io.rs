//! JSON operator documents:
//! `{"lattice": {"d": 1, "n": 2}, "support": [[0], [1]], "matrix": [[[re, im], ...], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operator::{local_dim, LocalOperator};
use crate::region::{Lattice, Region};
use crate::scalar::{cplx, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub lattice: Lattice,
    pub support: Region,
    /// Row-major entries as `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorDocument {
    pub fn from_operator<T: Real>(op: &LocalOperator<T>) -> Self {
        let m = op.matrix();
        let matrix = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re.to_f64_lossy(), m[(i, j)].im.to_f64_lossy()])
                    .collect()
            })
            .collect();
        OperatorDocument {
            lattice: op.lattice(),
            support: op.support().clone(),
            matrix,
        }
    }

    /// Rejects matrices whose shape differs from `n^|support|` square.
    pub fn to_operator<T: Real>(&self) -> Result<LocalOperator<T>> {
        self.lattice.validate()?;
        let dim = local_dim(&self.lattice, self.support.len())?;
        if self.matrix.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.matrix.len(),
            });
        }
        if let Some(row) = self.matrix.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        let m = Matrix::from_fn(dim, dim, |i, j| {
            let [re, im] = self.matrix[i][j];
            cplx(T::of(re), T::of(im))
        });
        LocalOperator::new(self.lattice, self.support.clone(), m)
    }
}

pub fn parse_operator<T: Real>(text: &str) -> Result<LocalOperator<T>> {
    serde_json::from_str::<OperatorDocument>(text)?.to_operator()
}

pub fn operator_to_string<T: Real>(op: &LocalOperator<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&OperatorDocument::from_operator(op))?)
}

pub fn read_operator<T: Real>(path: impl AsRef<Path>) -> Result<LocalOperator<T>> {
    parse_operator(&fs::read_to_string(path)?)
}

pub fn write_operator<T: Real>(path: impl AsRef<Path>, op: &LocalOperator<T>) -> Result<()> {
    fs::write(path, operator_to_string(op)?)?;
    Ok(())
}

//! JSON state files and CSV tables.
//!
//! A state file is `{"dims": [dA, dB, ...], "matrix": [[[re, im], ...], ...]}`
//! with the matrix row-major. An optional `"split"` gives the number of
//! leading factors that form A (default 1). Floats are written in shortest
//! round-trip form.

use serde::{Deserialize, Serialize};

use crate::aep::AepBoundRow;
use crate::error::{Error, Result};
use crate::linops::{HermitianMatrix, Matrix};
use crate::scalar::{Scalar, C};
use crate::state::DensityOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<usize>,
}

/// Parses and validates a state; Hermiticity is checked to `1e-9` relative
/// to the largest entry.
pub fn state_from_json<T: Scalar>(text: &str) -> Result<DensityOperator<T>> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.matrix.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse(format!(
            "row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    let mut data = Vec::with_capacity(n * n);
    for row in &file.matrix {
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse("non-finite matrix entry".into()));
            }
            data.push(C::new(T::lit(re), T::lit(im)));
        }
    }
    let m = Matrix::from_vec(n, n, data)?;
    let defect = m.sub(&m.adjoint()).max_abs();
    if defect > T::tol(1e-9) * m.max_abs().max(T::one()) {
        return Err(Error::NotAState(format!(
            "matrix is not Hermitian (max |M - M^dag| = {defect:e})"
        )));
    }
    let split = file.split.unwrap_or(1.min(file.dims.len()));
    DensityOperator::with_split(HermitianMatrix::new(m)?, file.dims, split)
}

pub fn state_to_json<T: Scalar>(rho: &DensityOperator<T>) -> String {
    let n = rho.dim();
    let m = rho.matrix();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                })
                .collect()
        })
        .collect();
    let default_split = 1.min(rho.dims().len());
    let file = StateFile {
        dims: rho.dims().to_vec(),
        matrix,
        split: (rho.split() != default_split).then_some(rho.split()),
    };
    serde_json::to_string(&file).expect("finite floats serialize")
}

/// Header line plus one line per row, `\n` terminated.
pub fn rows_to_csv<T: Scalar>(rows: &[AepBoundRow<T>]) -> String {
    let mut out = String::from(AepBoundRow::<T>::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::CMatrix;
use super::{DensityMatrix, DichotomicObservable, ExtendedModel};
use crate::{Error, Result};

/// Dense complex matrix with row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixRecord { rows: m.nrows(), cols: m.ncols(), re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: self.re.len().min(self.im.len()) });
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)),
        ))
    }
}

/// Serializable form of an [`ExtendedModel`]. Observables are stored as
/// matrices with spectrum `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedModelRecord {
    pub dims: [usize; 2],
    pub state: MatrixRecord,
    pub alice: Vec<MatrixRecord>,
    pub bob: Vec<MatrixRecord>,
}

impl ExtendedModelRecord {
    pub fn from_model(m: &ExtendedModel) -> Self {
        let (da, db) = m.state.dims();
        let obs = |v: &[DichotomicObservable]| v.iter().map(|o| MatrixRecord::from_matrix(&o.matrix())).collect();
        ExtendedModelRecord {
            dims: [da, db],
            state: MatrixRecord::from_matrix(m.state.matrix()),
            alice: obs(&m.alice),
            bob: obs(&m.bob),
        }
    }

    pub fn to_model(&self) -> Result<ExtendedModel> {
        let state = DensityMatrix::new(self.state.to_matrix()?, (self.dims[0], self.dims[1]))?;
        let obs = |v: &[MatrixRecord]| -> Result<Vec<DichotomicObservable>> {
            v.iter().map(|r| DichotomicObservable::from_hermitian(&r.to_matrix()?)).collect()
        };
        ExtendedModel::new(state, obs(&self.alice)?, obs(&self.bob)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::super::linalg::{max_abs, pauli_x, pauli_y, pauli_z};
    use super::super::*;
    use super::*;

    #[test]
    fn round_trip() {
        let rho = build_state(StateFamilyPoint { family: StateFamily::Sigma, alpha: 0.6, w: 0.7 }).unwrap();
        let state = embed_state(&rho).unwrap();
        let o = |m: CMatrix| DichotomicObservable::from_hermitian(&m).unwrap();
        let model = ExtendedModel::from_virtual_parties(
            state,
            [o(pauli_z()), o(pauli_y())],
            [o(pauli_x()), o(pauli_z())],
            [o(pauli_y()), o(pauli_x())],
        )
        .unwrap();
        let json = model.to_record().to_json().unwrap();
        let back = ExtendedModelRecord::from_json(&json).unwrap().to_model().unwrap();
        assert!(max_abs(&(back.state.matrix() - model.state.matrix())) < 1e-15);
        for (a, b) in back.bob.iter().zip(&model.bob) {
            assert!(max_abs(&(a.plus() - b.plus())) < 1e-12);
        }
    }

    #[test]
    fn ragged_matrix_rejected() {
        let r = MatrixRecord { rows: 2, cols: 2, re: vec![1.0; 4], im: vec![0.0; 3] };
        assert!(r.to_matrix().is_err());
    }
}

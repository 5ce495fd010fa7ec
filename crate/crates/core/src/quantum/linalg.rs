//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn pauli_x() -> CMatrix {
    from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors.into_iter().fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Which factor of a bipartite space to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Partial trace of a matrix on `C^dA (x) C^dB` over the named factor.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), side: Side) -> Result<CMatrix> {
    let (da, db) = dims;
    let d = da * db;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: m.nrows().max(m.ncols()) });
    }
    Ok(match side {
        Side::A => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
        Side::B => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
    })
}

/// Traces out every factor except `keep` of a multipartite operator.
pub fn reduce_to(m: &CMatrix, dims: &[usize], keep: usize) -> CMatrix {
    let before: usize = dims[..keep].iter().product();
    let dk = dims[keep];
    let after: usize = dims[keep + 1..].iter().product();
    debug_assert_eq!(m.nrows(), before * dk * after);
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for p in 0..before {
                for q in 0..after {
                    acc += m[((p * dk + i) * after + q, (p * dk + j) * after + q)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in descending order; ties (within `1e-12`) are
/// broken by the lexicographic order of the phase-normalized eigenvectors so
/// that the output is a deterministic function of the input.
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

pub fn eigh(m: &CMatrix) -> Eigh {
    let h = hermitian_part(m);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut cols: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            normalize_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    cols.sort_by(|(la, _), (lb, _)| lb.total_cmp(la));
    // Within runs of numerically equal eigenvalues, order by eigenvector.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cols[end - 1].0 - cols[end].0 <= 1e-12 {
            end += 1;
        }
        cols[start..end].sort_by(|(_, va), (_, vb)| lex_cmp(va, vb));
        start = end;
    }
    let values = cols.iter().map(|(l, _)| *l).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| cols[k].1[i]);
    Eigh { values, vectors }
}

/// Rotates a vector so that its first component of non-negligible modulus is
/// real and positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Projector onto the span of the given columns of `vectors`.
pub fn projector_onto(vectors: &CMatrix, columns: impl IntoIterator<Item = usize>) -> CMatrix {
    let d = vectors.nrows();
    let mut p = CMatrix::zeros(d, d);
    for k in columns {
        let v = vectors.column(k);
        p += v * v.adjoint();
    }
    p
}

pub fn outer(v: &[Complex64]) -> CMatrix {
    let col = nalgebra::DVector::from_column_slice(v);
    &col * col.adjoint()
}

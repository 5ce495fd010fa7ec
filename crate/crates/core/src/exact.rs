use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub(crate) fn rank(rows: &[Vec<i64>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), width, "ragged matrix");
            r.iter().map(|&v| BigInt::from(v)).collect()
        })
        .collect();

    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..width {
        if rank == m.len() {
            break;
        }
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            for c in col + 1..width {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].abs();
        rank += 1;
    }
    rank
}

/// Determinant of a square integer matrix, by Bareiss elimination.
#[cfg_attr(not(feature = "facet-enum"), allow(dead_code))]
pub(crate) fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        assert_eq!(m[k].len(), n, "matrix is not square");
        let Some(pivot) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != k {
            m.swap(k, pivot);
            sign = -sign;
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let v = (&m[k][k] * &m[r][c] - &m[r][k] * &m[k][c]) / &prev;
                m[r][c] = v;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return BigInt::from(1);
    }
    prev * sign
}

/// Generalized cross product of `d - 1` vectors in `Z^d`: orthogonal to
/// every row, and zero exactly when the rows are dependent.
#[cfg_attr(not(feature = "facet-enum"), allow(dead_code))]
pub(crate) fn cross(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let d = rows.len() + 1;
    (0..d)
        .map(|k| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != k).map(|(_, &v)| BigInt::from(v)).collect())
                .collect();
            let det = determinant(&minor);
            if k % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

/// Affine dimension of a point set: rank of the differences to the first point.
pub(crate) fn affine_dimension(points: &[Vec<i64>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = rest.iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    rank(&diffs)
}

#![allow(dead_code)]

use bellext::quantum::linalg::CMatrix;
use bellext::quantum::DensityMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Ginibre-distributed full-rank density matrix.
pub fn random_state<R: Rng>(dims: (usize, usize), rng: &mut R) -> DensityMatrix {
    let d = dims.0 * dims.1;
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let m: CMatrix = &g * g.adjoint();
    let t = m.trace();
    let m = m.map(|z| z / t);
    // Exact Hermitian symmetrization so validation sees no round-off.
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityMatrix::new(m, dims).expect("Ginibre matrices are states")
}

/// Haar-random two-qubit pure state mixed with up to 25% white noise.
pub fn random_noisy_pure_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    let v: Vec<Complex64> = (0..4)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    let pure = DensityMatrix::pure(&v, (2, 2)).expect("normalized");
    let p: f64 = rng.random_range(0.0..0.25);
    let m = pure.matrix().map(|z| z * (1.0 - p)) + CMatrix::identity(4, 4).map(|z| z * (p / 4.0));
    DensityMatrix::new(m, (2, 2)).expect("convex mixture of states")
}

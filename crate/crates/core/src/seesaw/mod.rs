//! Seesaw lower bounds on quantum maxima.
//!
//! Each party's dichotomic measurements are optimized in closed form with
//! everything else fixed, and optionally the state as the top eigenvector of
//! the Bell operator. Every step is an exact maximization, so the value never
//! decreases along a run.

mod poly;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polytope::Inequality;
use crate::quantum::linalg::{eigh, hermitian_part, outer, projector_onto, reduce_to, trace_product, CMatrix};
use crate::quantum::{DensityMatrix, DichotomicObservable, ExtendedModel};
use crate::scenario::Scenario;
use crate::{Error, Result};

pub use poly::{virtual_party, BellPolynomial, Term};

/// Positive-subspace threshold: eigenvalues at or below this are excluded.
pub const POSITIVE_TOL: f64 = 1e-12;
/// Largest tolerated decrease of the value across a single update.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Seeds are processed in blocks of this size; an early stop is only checked
/// between blocks, so results do not depend on the thread count.
pub const SEED_BLOCK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub seeds: usize,
    pub max_sweeps: usize,
    pub convergence_tol: f64,
    pub optimize_state: bool,
    pub master_seed: u64,
    pub random_unitary_on_state: bool,
    /// Stop once some seed exceeds this value (checked between seed blocks
    /// and inside each seed).
    pub stop_at: Option<f64>,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            seeds: 500,
            max_sweeps: 1000,
            convergence_tol: 1e-10,
            optimize_state: true,
            master_seed: 0,
            random_unitary_on_state: true,
            stop_at: None,
        }
    }
}

impl SeesawConfig {
    pub fn fixed_state() -> Self {
        SeesawConfig { optimize_state: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::InvalidConfig("seeds must be at least 1".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidConfig("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub value: f64,
    pub sweeps: usize,
    /// Largest decrease seen across any single update (0 when monotone).
    pub max_decrease: f64,
    pub state: DensityMatrix,
    pub measurements: Vec<Vec<DichotomicObservable>>,
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best_value: f64,
    pub best_seed: usize,
    pub state: DensityMatrix,
    /// `measurements[p][j]` for party `p`, measurement `j`.
    pub measurements: Vec<Vec<DichotomicObservable>>,
    /// Values for the seeds actually run, in seed order.
    pub seed_values: Vec<f64>,
    pub sweeps_used: Vec<usize>,
    pub max_decrease: f64,
}

impl SeesawResult {
    /// Rebuilds the four-cycle model from the virtual parties.
    pub fn extended_model(&self) -> Result<ExtendedModel> {
        let m = &self.measurements;
        if m.len() != 3 || m.iter().any(|v| v.len() != 2) {
            return Err(Error::InvalidConfig("result is not a four-cycle virtual-party model".into()));
        }
        ExtendedModel::from_virtual_parties(
            self.state.clone(),
            [m[0][0].clone(), m[0][1].clone()],
            [m[1][0].clone(), m[1][1].clone()],
            [m[2][0].clone(), m[2][1].clone()],
        )
    }

    pub fn is_monotone(&self) -> bool {
        self.max_decrease <= MONOTONE_SLACK
    }

    pub fn dump(&self, cfg: &SeesawConfig) -> SeesawDump {
        SeesawDump {
            best_value: self.best_value,
            best_seed: self.best_seed,
            seed_values: self.seed_values.clone(),
            sweeps_used: self.sweeps_used.clone(),
            master_seed: cfg.master_seed,
            config: cfg.clone(),
        }
    }
}

/// Replayable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawDump {
    pub best_value: f64,
    pub best_seed: usize,
    pub seed_values: Vec<f64>,
    pub sweeps_used: Vec<usize>,
    pub master_seed: u64,
    pub config: SeesawConfig,
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for seed `index`: `ChaCha8` keyed by
/// `splitmix64(master ^ splitmix64(index))`.
pub fn seed_stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(index)))
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Rank-one projective measurement `U|0><0|U^dagger` for Haar `U`.
pub fn random_projective<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DichotomicObservable {
    let u = haar_unitary(dim, rng);
    let v: Vec<Complex64> = u.column(0).iter().copied().collect();
    DichotomicObservable::from_trusted_projector(outer(&v))
}

/// Observable whose `+1` projector spans the eigenvectors of `delta` with
/// eigenvalue above [`POSITIVE_TOL`]; it maximizes `Tr[delta O]`.
pub fn positive_subspace_update(delta: &CMatrix) -> DichotomicObservable {
    let e = eigh(delta);
    let positive = e.values.iter().enumerate().filter(|(_, &l)| l > POSITIVE_TOL).map(|(k, _)| k);
    DichotomicObservable::from_trusted_projector(hermitian_part(&projector_onto(&e.vectors, positive)))
}

/// Top eigenvector of the Bell operator and its eigenvalue.
pub fn state_update(beta: &CMatrix, dims: (usize, usize)) -> (DensityMatrix, f64) {
    let e = eigh(beta);
    let v: Vec<Complex64> = e.vectors.column(0).iter().copied().collect();
    (DensityMatrix::from_trusted(outer(&v), dims), e.values[0])
}

/// For every measurement `j` of `target`, the Hermitian operator `R_j` on the
/// target's factor such that the value equals `c + sum_j Tr[R_j O_j]`.
pub fn reduced_operators(
    state: &DensityMatrix,
    measurements: &[Vec<DichotomicObservable>],
    poly: &BellPolynomial,
    target: usize,
) -> Vec<CMatrix> {
    let obs = poly::matrices(measurements);
    let (_, per) = poly.environment(&obs, target);
    per.iter().map(|e| hermitian_part(&reduce_to(&(state.matrix() * e), poly.party_dims(), target))).collect()
}

pub fn value(poly: &BellPolynomial, state: &DensityMatrix, measurements: &[Vec<DichotomicObservable>]) -> f64 {
    trace_product(state.matrix(), &poly.operator(&poly::matrices(measurements))).re
}

fn check_state(poly: &BellPolynomial, state: &DensityMatrix) -> Result<()> {
    let dims = poly.state_dims();
    if state.dims() != dims {
        return Err(Error::DimensionMismatch { expected: dims.0 * dims.1, actual: state.dim() });
    }
    Ok(())
}

/// One seed: random measurements (and, with a fixed state, a random unitary
/// on Bob's factor) followed by sweeps until the gain drops below tolerance.
pub fn run_seed(poly: &BellPolynomial, fixed: Option<&DensityMatrix>, cfg: &SeesawConfig, index: usize) -> SeedOutcome {
    let mut rng = seed_stream(cfg.master_seed, index as u64);
    let dims = poly.state_dims();
    let mut state = match fixed {
        Some(rho) if cfg.random_unitary_on_state => {
            let u = haar_unitary(dims.1, &mut rng);
            rho.apply_bob_unitary(&u).expect("dimensions checked")
        }
        Some(rho) => rho.clone(),
        None => DensityMatrix::maximally_mixed(dims),
    };
    let mut meas: Vec<Vec<DichotomicObservable>> = poly
        .party_dims()
        .iter()
        .zip(poly.measurements())
        .map(|(&d, &m)| (0..m).map(|_| random_projective(d, &mut rng)).collect())
        .collect();

    let mut current = if fixed.is_none() {
        let beta = poly.operator(&poly::matrices(&meas));
        let (s, v) = state_update(&beta, dims);
        state = s;
        v
    } else {
        value(poly, &state, &meas)
    };
    let mut max_decrease: f64 = 0.0;
    let mut track = |before: f64, after: f64| max_decrease = max_decrease.max(before - after);

    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let start = current;
        for &p in poly.update_order() {
            let reduced = reduced_operators(&state, &meas, poly, p);
            meas[p] = reduced.iter().map(positive_subspace_update).collect();
            let v = value(poly, &state, &meas);
            track(current, v);
            current = v;
        }
        if fixed.is_none() {
            let (s, v) = state_update(&poly.operator(&poly::matrices(&meas)), dims);
            state = s;
            track(current, v);
            current = v;
        }
        if cfg.stop_at.is_some_and(|t| current > t) || current - start < cfg.convergence_tol {
            break;
        }
    }
    SeedOutcome { value: current, sweeps, max_decrease, state, measurements: meas }
}

/// Best value over seeds. `state` selects fixed-state mode, which requires
/// `optimize_state` to be off; without a state it must be on.
pub fn run_polynomial(
    poly: &BellPolynomial,
    state: Option<&DensityMatrix>,
    cfg: &SeesawConfig,
) -> Result<SeesawResult> {
    cfg.validate()?;
    match (state, cfg.optimize_state) {
        (Some(_), true) => return Err(Error::InvalidConfig("a fixed state was given but optimize_state is on".into())),
        (None, false) => return Err(Error::InvalidConfig("no state given and optimize_state is off".into())),
        _ => {}
    }
    if let Some(s) = state {
        check_state(poly, s)?;
    }

    let mut outcomes: Vec<SeedOutcome> = Vec::with_capacity(cfg.seeds);
    let mut start = 0;
    while start < cfg.seeds {
        let end = (start + SEED_BLOCK).min(cfg.seeds);
        let block: Vec<SeedOutcome> = (start..end).into_par_iter().map(|i| run_seed(poly, state, cfg, i)).collect();
        outcomes.extend(block);
        start = end;
        if let Some(t) = cfg.stop_at {
            if outcomes.iter().any(|o| o.value > t) {
                break;
            }
        }
    }

    // First seed attaining the maximum wins ties.
    let (best_seed, _) =
        outcomes
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, o)| if o.value > bv { (i, o.value) } else { (bi, bv) });
    let seed_values = outcomes.iter().map(|o| o.value).collect();
    let sweeps_used = outcomes.iter().map(|o| o.sweeps).collect();
    let max_decrease = outcomes.iter().map(|o| o.max_decrease).fold(0.0, f64::max);
    let best = outcomes.swap_remove(best_seed);
    Ok(SeesawResult {
        best_value: best.value,
        best_seed,
        state: best.state,
        measurements: best.measurements,
        seed_values,
        sweeps_used,
        max_decrease,
    })
}

/// Seesaw for a four-cycle inequality on `C^2 (x) C^4`.
pub fn run_seesaw(ineq: &Inequality, state: Option<&DensityMatrix>, cfg: &SeesawConfig) -> Result<SeesawResult> {
    let poly = BellPolynomial::from_inequality(ineq, &Scenario::square())?;
    run_polynomial(&poly, state, cfg)
}

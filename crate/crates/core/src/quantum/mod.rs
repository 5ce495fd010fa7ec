//! Quantum realizations: states on `C^dA (x) C^dB`, dichotomic projective
//! observables and extraction of behaviors through Born's rule.

pub mod linalg;
mod record;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::{CorrelatorVector, ProbabilityTable};
use crate::scenario::{Context, Scenario, ALICE_INPUTS};
use crate::{Error, Result};
use linalg::{eigh, hermiticity_error, identity, kron, max_abs, outer, trace, trace_product, CMatrix, ZERO};

pub use record::{ExtendedModelRecord, MatrixRecord};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Eigenvalues within this distance of +1 or -1 are snapped when building an
/// observable from a Hermitian matrix.
pub const SNAP_TOL: f64 = 1e-8;
pub const COMMUTATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: (usize, usize)) -> Result<Self> {
        let d = dims.0 * dims.1;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: matrix.nrows() });
        }
        let herm = hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::Domain(format!("state is not Hermitian (error {herm:e})")));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Domain(format!("state has trace {tr}")));
        }
        let min = eigh(&matrix).values.last().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::Domain(format!("state has negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix, dims })
    }

    /// `|v><v|` for a vector that is normalized here.
    pub fn pure(v: &[Complex64], dims: (usize, usize)) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let unit: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        let mut m = outer(&unit);
        m = linalg::hermitian_part(&m);
        Self::new(m, dims)
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let d = dims.0 * dims.1;
        DensityMatrix { matrix: identity(d).unscale(d as f64), dims }
    }

    pub(crate) fn from_trusted(matrix: CMatrix, dims: (usize, usize)) -> Self {
        DensityMatrix { matrix, dims }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix).values
    }

    /// `(1 (x) U) rho (1 (x) U)^dagger`.
    pub fn apply_bob_unitary(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dims.1 || u.ncols() != self.dims.1 {
            return Err(Error::DimensionMismatch { expected: self.dims.1, actual: u.nrows() });
        }
        let full = kron(&identity(self.dims.0), u);
        let m = &full * &self.matrix * full.adjoint();
        Ok(DensityMatrix { matrix: linalg::hermitian_part(&m), dims: self.dims })
    }

    /// `Tr[rho O]` for a Hermitian operator on the full space.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        trace_product(&self.matrix, op).re
    }
}

/// Observable with spectrum in `{+1, -1}`, stored through its `+1` projector.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicObservable {
    plus: CMatrix,
}

impl DichotomicObservable {
    pub fn from_projector(plus: CMatrix) -> Result<Self> {
        if !plus.is_square() {
            return Err(Error::NotDichotomic("projector is not square".into()));
        }
        let herm = hermiticity_error(&plus);
        let idem = max_abs(&(&plus * &plus - &plus));
        if herm > 1e-10 || idem > 1e-10 {
            return Err(Error::NotDichotomic(format!("not a projector (hermiticity {herm:e}, idempotence {idem:e})")));
        }
        Ok(DichotomicObservable { plus })
    }

    /// Builds the observable from a Hermitian matrix whose eigenvalues are
    /// within [`SNAP_TOL`] of +1 or -1; the spectrum is snapped exactly.
    pub fn from_hermitian(h: &CMatrix) -> Result<Self> {
        let herm = hermiticity_error(h);
        if herm > SNAP_TOL {
            return Err(Error::NotDichotomic(format!("matrix is not Hermitian (error {herm:e})")));
        }
        let e = eigh(h);
        if let Some(bad) = e.values.iter().find(|l| (l.abs() - 1.0).abs() > SNAP_TOL) {
            return Err(Error::NotDichotomic(format!("eigenvalue {bad} is not +-1")));
        }
        let positive = e.values.iter().enumerate().filter(|(_, &l)| l > 0.0).map(|(k, _)| k);
        Ok(DichotomicObservable { plus: linalg::projector_onto(&e.vectors, positive) })
    }

    pub fn identity(d: usize) -> Self {
        DichotomicObservable { plus: identity(d) }
    }

    pub fn negative_identity(d: usize) -> Self {
        DichotomicObservable { plus: CMatrix::zeros(d, d) }
    }

    pub(crate) fn from_trusted_projector(plus: CMatrix) -> Self {
        DichotomicObservable { plus }
    }

    pub fn dim(&self) -> usize {
        self.plus.nrows()
    }

    pub fn plus(&self) -> &CMatrix {
        &self.plus
    }

    pub fn minus(&self) -> CMatrix {
        identity(self.dim()) - &self.plus
    }

    /// Projector for outcome slot 0 (+1) or 1 (-1).
    pub fn projector(&self, slot: usize) -> CMatrix {
        if slot == 0 {
            self.plus.clone()
        } else {
            self.minus()
        }
    }

    /// `Q+ - Q-`.
    pub fn matrix(&self) -> CMatrix {
        self.plus.scale(2.0) - identity(self.dim())
    }

    /// `O (x) 1_d`.
    pub fn tensor_identity_right(&self, d: usize) -> Self {
        DichotomicObservable { plus: kron(&self.plus, &identity(d)) }
    }

    /// `1_d (x) O`.
    pub fn tensor_identity_left(&self, d: usize) -> Self {
        DichotomicObservable { plus: kron(&identity(d), &self.plus) }
    }
}

/// Max-entry modulus of `[O1, O2]`.
pub fn commutator_norm(o1: &DichotomicObservable, o2: &DichotomicObservable) -> f64 {
    max_abs(&linalg::commutator(&o1.matrix(), &o2.matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    /// `w |psi(a)><psi(a)| + (1 - w) |00><00|`
    Rho,
    /// `w |psi(a)><psi(a)| + (1 - w) 1/4`
    Sigma,
}

impl StateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::Rho => "rho",
            StateFamily::Sigma => "sigma",
        }
    }
}

impl std::str::FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(StateFamily::Rho),
            "sigma" => Ok(StateFamily::Sigma),
            other => Err(Error::Domain(format!("unknown state family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateFamilyPoint {
    pub family: StateFamily,
    pub alpha: f64,
    pub w: f64,
}

/// `sqrt(a) |01> + sqrt(1 - a) |10>`.
pub fn psi(alpha: f64) -> [Complex64; 4] {
    [ZERO, Complex64::new(alpha.sqrt(), 0.0), Complex64::new((1.0 - alpha).sqrt(), 0.0), ZERO]
}

pub fn build_state(fp: StateFamilyPoint) -> Result<DensityMatrix> {
    for (name, v) in [("alpha", fp.alpha), ("w", fp.w)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    let entangled = outer(&psi(fp.alpha));
    let noise = match fp.family {
        StateFamily::Rho => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            m
        }
        StateFamily::Sigma => identity(4).unscale(4.0),
    };
    let m = entangled.scale(fp.w) + noise.scale(1.0 - fp.w);
    DensityMatrix::new(m, (2, 2))
}

/// Isometry `C^2 -> C^4` sending `|0>, |1>` to the first two basis vectors.
pub fn embedding_isometry() -> CMatrix {
    let mut v = CMatrix::zeros(4, 2);
    v[(0, 0)] = Complex64::new(1.0, 0.0);
    v[(1, 1)] = Complex64::new(1.0, 0.0);
    v
}

/// Embeds a two-qubit state into `C^2 (x) C^4`.
pub fn embed_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dims() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, actual: rho.dims().1 });
    }
    let v = kron(&identity(2), &embedding_isometry());
    let m = &v * rho.matrix() * v.adjoint();
    Ok(DensityMatrix::from_trusted(m, (2, 4)))
}

/// State, two Alice observables and one observable per Bob input.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedModel {
    pub state: DensityMatrix,
    pub alice: Vec<DichotomicObservable>,
    pub bob: Vec<DichotomicObservable>,
}

impl ExtendedModel {
    pub fn new(state: DensityMatrix, alice: Vec<DichotomicObservable>, bob: Vec<DichotomicObservable>) -> Result<Self> {
        let (da, db) = state.dims();
        if alice.len() != ALICE_INPUTS {
            return Err(Error::DimensionMismatch { expected: ALICE_INPUTS, actual: alice.len() });
        }
        if let Some(o) = alice.iter().find(|o| o.dim() != da) {
            return Err(Error::DimensionMismatch { expected: da, actual: o.dim() });
        }
        if let Some(o) = bob.iter().find(|o| o.dim() != db) {
            return Err(Error::DimensionMismatch { expected: db, actual: o.dim() });
        }
        Ok(ExtendedModel { state, alice, bob })
    }

    /// Four-cycle model on `C^2 (x) (C^2 (x) C^2)` with Bob inputs 0 and 2 on
    /// the first Bob qubit and inputs 1 and 3 on the second, so that every
    /// context is a commuting pair by construction.
    pub fn from_virtual_parties(
        state: DensityMatrix,
        alice: [DichotomicObservable; 2],
        first: [DichotomicObservable; 2],
        second: [DichotomicObservable; 2],
    ) -> Result<Self> {
        let [b0, b2] = first;
        let [b1, b3] = second;
        let bob = vec![
            b0.tensor_identity_right(2),
            b1.tensor_identity_left(2),
            b2.tensor_identity_right(2),
            b3.tensor_identity_left(2),
        ];
        Self::new(state, alice.into(), bob)
    }

    /// Largest context commutator.
    pub fn max_context_commutator(&self, s: &Scenario) -> f64 {
        s.contexts().iter().map(|&Context(a, b)| commutator_norm(&self.bob[a], &self.bob[b])).fold(0.0, f64::max)
    }

    fn check(&self, s: &Scenario) -> Result<()> {
        if self.bob.len() != s.bob_inputs() {
            return Err(Error::DimensionMismatch { expected: s.bob_inputs(), actual: self.bob.len() });
        }
        for &Context(a, b) in s.contexts() {
            let c = commutator_norm(&self.bob[a], &self.bob[b]);
            if c > COMMUTATION_TOL {
                return Err(Error::Incompatible(a, b, c));
            }
        }
        Ok(())
    }

    pub fn to_record(&self) -> ExtendedModelRecord {
        ExtendedModelRecord::from_model(self)
    }
}

/// Correlators `Tr[rho A_x (x) B_y1 B_y2]` and all marginals.
pub fn extract_behavior(m: &ExtendedModel, s: &Scenario) -> Result<CorrelatorVector> {
    m.check(s)?;
    let (da, db) = m.state.dims();
    let id_a = identity(da);
    let id_b = identity(db);
    let alice: Vec<CMatrix> = m.alice.iter().map(DichotomicObservable::matrix).collect();
    let bob: Vec<CMatrix> = m.bob.iter().map(DichotomicObservable::matrix).collect();
    let pairs: Vec<CMatrix> = s.contexts().iter().map(|&Context(a, b)| &bob[a] * &bob[b]).collect();
    let ev = |a: &CMatrix, b: &CMatrix| m.state.expectation(&kron(a, b));

    let mut c = CorrelatorVector::zeros(s);
    let v = c.values_mut();
    for x in 0..ALICE_INPUTS {
        v[s.pos_a(x)] = ev(&alice[x], &id_b);
        for y in 0..s.bob_inputs() {
            v[s.pos_ab(x, y)] = ev(&alice[x], &bob[y]);
        }
        for (ci, pair) in pairs.iter().enumerate() {
            v[s.pos_abb(x, ci)] = ev(&alice[x], pair);
        }
    }
    for y in 0..s.bob_inputs() {
        v[s.pos_b(y)] = ev(&id_a, &bob[y]);
    }
    for (ci, pair) in pairs.iter().enumerate() {
        v[s.pos_bb(ci)] = ev(&id_a, pair);
    }
    Ok(c)
}

/// `p(a, b1, b2 | x, ctx) = Tr[rho P_a|x (x) Q_b1|y1 Q_b2|y2]` evaluated
/// directly from projectors.
pub fn born_probabilities(m: &ExtendedModel, s: &Scenario) -> Result<ProbabilityTable> {
    m.check(s)?;
    let mut table = ProbabilityTable::zeros(s);
    for x in 0..ALICE_INPUTS {
        for (ci, &Context(y1, y2)) in s.contexts().iter().enumerate() {
            for a in 0..2 {
                let pa = m.alice[x].projector(a);
                for b1 in 0..2 {
                    for b2 in 0..2 {
                        let effect = m.bob[y1].projector(b1) * m.bob[y2].projector(b2);
                        table.set(x, ci, a, b1, b2, born_probability(&m.state, &pa, &effect));
                    }
                }
            }
        }
    }
    Ok(table)
}

/// `Tr[rho P (x) S]`.
pub fn born_probability(state: &DensityMatrix, alice_effect: &CMatrix, bob_effect: &CMatrix) -> f64 {
    state.expectation(&kron(alice_effect, bob_effect))
}

/// Standard bipartite model with any number of dichotomic observables per side.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteModel {
    pub state: DensityMatrix,
    pub alice: Vec<DichotomicObservable>,
    pub bob: Vec<DichotomicObservable>,
}

impl BipartiteModel {
    pub fn alice_mean(&self, x: usize) -> f64 {
        self.state.expectation(&kron(&self.alice[x].matrix(), &identity(self.state.dims().1)))
    }

    pub fn bob_mean(&self, y: usize) -> f64 {
        self.state.expectation(&kron(&identity(self.state.dims().0), &self.bob[y].matrix()))
    }

    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.state.expectation(&kron(&self.alice[x].matrix(), &self.bob[y].matrix()))
    }
}

#[cfg(test)]
mod tests {
    use super::linalg::{from_real, pauli_x, pauli_z};
    use super::*;
    use crate::behavior::{check_no_disturbance, check_no_signalling, correlators_to_probabilities};

    fn obs(m: CMatrix) -> DichotomicObservable {
        DichotomicObservable::from_hermitian(&m).unwrap()
    }

    #[test]
    fn families_at_w_zero() {
        let rho = build_state(StateFamilyPoint { family: StateFamily::Rho, alpha: 0.3, w: 0.0 }).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(rho.matrix(), &expected);
        let sigma = build_state(StateFamilyPoint { family: StateFamily::Sigma, alpha: 0.3, w: 0.0 }).unwrap();
        assert!(max_abs(&(sigma.matrix() - identity(4).unscale(4.0))) < 1e-16);
    }

    #[test]
    fn pure_family_member() {
        let rho = build_state(StateFamilyPoint { family: StateFamily::Rho, alpha: 0.5, w: 1.0 }).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn family_parameters_checked() {
        let bad = StateFamilyPoint { family: StateFamily::Sigma, alpha: 1.2, w: 0.5 };
        assert!(matches!(build_state(bad), Err(Error::Domain(_))));
        let bad = StateFamilyPoint { family: StateFamily::Rho, alpha: 0.5, w: -0.1 };
        assert!(build_state(bad).is_err());
    }

    #[test]
    fn embedding_preserves_spectrum() {
        let rho = build_state(StateFamilyPoint { family: StateFamily::Rho, alpha: 0.8, w: 0.85 }).unwrap();
        let emb = embed_state(&rho).unwrap();
        assert_eq!(emb.dims(), (2, 4));
        assert!((trace(emb.matrix()).re - 1.0).abs() < 1e-14);
        let ev = emb.eigenvalues();
        let rank = ev.iter().filter(|&&l| l > 1e-12).count();
        assert_eq!(rank, 2);
        let orig = rho.eigenvalues();
        for k in 0..4 {
            assert!((ev[k] - orig[k]).abs() < 1e-12);
        }
        // Validates as a density matrix.
        DensityMatrix::new(emb.matrix().clone(), (2, 4)).unwrap();
    }

    #[test]
    fn embedded_product_reduces_to_alice_zero() {
        let rho = build_state(StateFamilyPoint { family: StateFamily::Rho, alpha: 0.5, w: 0.0 }).unwrap();
        let emb = embed_state(&rho).unwrap();
        let alice = linalg::partial_trace(emb.matrix(), (2, 4), linalg::Side::B).unwrap();
        assert!(max_abs(&(alice - from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]))) < 1e-16);
        assert!(embed_state(&emb).is_err());
    }

    #[test]
    fn commutators() {
        let x1 = obs(pauli_x()).tensor_identity_right(2);
        let z2 = obs(pauli_z()).tensor_identity_left(2);
        assert_eq!(commutator_norm(&x1, &z2), 0.0);
        assert!((commutator_norm(&obs(pauli_x()), &obs(pauli_z())) - 2.0).abs() < 1e-12);
        assert_eq!(commutator_norm(&obs(pauli_x()), &obs(pauli_x())), 0.0);
    }

    #[test]
    fn observable_snapping() {
        let nearly = pauli_z().scale(1.0 + 1e-9);
        let o = DichotomicObservable::from_hermitian(&nearly).unwrap();
        assert_eq!(o.matrix(), pauli_z());
        assert!(DichotomicObservable::from_hermitian(&pauli_z().scale(0.5)).is_err());
        let m = obs(pauli_x()).matrix();
        assert!(max_abs(&(&m * &m - identity(2))) < 1e-12);
    }

    #[test]
    fn deterministic_product_model() {
        // |0>|00> with every observable sigma_z-like: all correlators +1.
        let s = Scenario::square();
        let mut v = vec![ZERO; 8];
        v[0] = Complex64::new(1.0, 0.0);
        let state = DensityMatrix::pure(&v, (2, 4)).unwrap();
        let z = obs(pauli_z());
        let model = ExtendedModel::from_virtual_parties(
            state,
            [z.clone(), z.clone()],
            [z.clone(), z.clone()],
            [z.clone(), z.clone()],
        )
        .unwrap();
        let c = extract_behavior(&model, &s).unwrap();
        assert!(c.values().iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn incompatible_context_rejected() {
        let s = Scenario::square();
        let state = DensityMatrix::maximally_mixed((2, 4));
        let x = obs(kron(&pauli_x(), &identity(2)));
        let z = obs(kron(&pauli_z(), &identity(2)));
        let alice = vec![obs(pauli_z()), obs(pauli_x())];
        let model = ExtendedModel::new(state, alice, vec![x.clone(), z.clone(), x, z]).unwrap();
        assert!(matches!(extract_behavior(&model, &s), Err(Error::Incompatible(0, 1, _))));
    }

    #[test]
    fn born_table_matches_correlator_expansion() {
        let s = Scenario::square();
        let rho = build_state(StateFamilyPoint { family: StateFamily::Sigma, alpha: 0.7, w: 0.9 }).unwrap();
        let state = embed_state(&rho).unwrap();
        let h = (pauli_x() + pauli_z()).unscale(2f64.sqrt());
        let model = ExtendedModel::from_virtual_parties(
            state,
            [obs(pauli_z()), obs(pauli_x())],
            [obs(h.clone()), obs(pauli_x())],
            [obs(h), obs(pauli_z())],
        )
        .unwrap();
        let c = extract_behavior(&model, &s).unwrap();
        let direct = born_probabilities(&model, &s).unwrap();
        let expanded = correlators_to_probabilities(&s, &c);
        for (p, q) in direct.values().iter().zip(expanded.values()) {
            assert!((p - q).abs() < 1e-14);
        }
        assert!(check_no_disturbance(&s, &direct, 1e-12).pass);
        assert!(check_no_signalling(&s, &direct, 1e-12).pass);
    }
}

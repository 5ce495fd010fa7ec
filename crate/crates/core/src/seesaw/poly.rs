use crate::polytope::Inequality;
use crate::quantum::linalg::{identity, kron_all, CMatrix};
use crate::quantum::DichotomicObservable;
use crate::scenario::{Context, CorrelatorIndex, Scenario};
use crate::{Error, Result};

/// One monomial: a real coefficient times a tensor product with at most one
/// observable per party (`None` is the identity).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub slots: Vec<Option<usize>>,
}

/// Bell expression as a polynomial in the observables of several parties,
/// each acting on its own tensor factor. Party 0 is Alice; the remaining
/// factors together form Bob's space.
#[derive(Debug, Clone, PartialEq)]
pub struct BellPolynomial {
    party_dims: Vec<usize>,
    measurements: Vec<usize>,
    constant: f64,
    terms: Vec<Term>,
    update_order: Vec<usize>,
}

/// Bob input `y` of the four-cycle lives on virtual party `1 + y % 2` as its
/// local measurement `y / 2`.
pub fn virtual_party(y: usize) -> (usize, usize) {
    (1 + y % 2, y / 2)
}

impl BellPolynomial {
    pub fn new(party_dims: Vec<usize>, measurements: Vec<usize>, constant: f64, terms: Vec<Term>) -> Result<Self> {
        if party_dims.len() < 2 || party_dims.len() != measurements.len() {
            return Err(Error::InvalidConfig("need at least two parties with a measurement count each".into()));
        }
        for t in &terms {
            if t.slots.len() != party_dims.len() {
                return Err(Error::DimensionMismatch { expected: party_dims.len(), actual: t.slots.len() });
            }
            for (p, s) in t.slots.iter().enumerate() {
                if let Some(j) = *s {
                    if j >= measurements[p] {
                        return Err(Error::InvalidConfig(format!("party {p} has no measurement {j}")));
                    }
                }
            }
        }
        let update_order = (0..party_dims.len()).collect();
        Ok(BellPolynomial { party_dims, measurements, constant, terms, update_order })
    }

    /// Four-cycle inequality on `C^2 (x) C^2 (x) C^2`: Alice, then Bob's
    /// inputs 0 and 2 on the first Bob qubit, inputs 1 and 3 on the second.
    ///
    /// Parties are updated in the order second Bob qubit, Alice, first Bob
    /// qubit. Updating the first Bob qubit early tends to lock `B0` to the
    /// identity, a fixed point at which the other Bob qubit decouples.
    pub fn from_inequality(ineq: &Inequality, s: &Scenario) -> Result<Self> {
        if s.bob_inputs() != 4 {
            return Err(Error::InvalidScenario("the virtual-party split needs the four-cycle".into()));
        }
        if ineq.coeffs().len() != s.dimension() {
            return Err(Error::DimensionMismatch { expected: s.dimension(), actual: ineq.coeffs().len() });
        }
        let mut terms = Vec::new();
        for (pos, &c) in ineq.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut slots = vec![None; 3];
            let idx = s.index_at(pos).expect("position in range");
            if let Some(x) = idx.alice_input() {
                slots[0] = Some(x);
            }
            let bob: Vec<usize> = match idx {
                CorrelatorIndex::B { y } | CorrelatorIndex::AB { y, .. } => vec![y],
                CorrelatorIndex::BB { ctx } | CorrelatorIndex::ABB { ctx, .. } => {
                    let Context(y1, y2) = s.contexts()[ctx];
                    vec![y1, y2]
                }
                CorrelatorIndex::A { .. } => vec![],
            };
            for y in bob {
                let (p, j) = virtual_party(y);
                slots[p] = Some(j);
            }
            terms.push(Term { coeff: c as f64, slots });
        }
        Self::new(vec![2, 2, 2], vec![2, 2, 2], 0.0, terms)?.with_update_order(vec![2, 0, 1])
    }

    /// Order in which a sweep visits the parties; must be a permutation.
    pub fn with_update_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.parties()).collect::<Vec<_>>() {
            return Err(Error::InvalidConfig(format!("{order:?} is not an ordering of the parties")));
        }
        self.update_order = order;
        Ok(self)
    }

    pub fn update_order(&self) -> &[usize] {
        &self.update_order
    }

    /// Two-party expression from a table of correlator coefficients:
    /// `sum_x a[x] A_x + sum_y b[y] B_y + sum_xy c[x][y] A_x B_y`.
    pub fn bipartite(alice: &[f64], bob: &[f64], corr: &[Vec<f64>]) -> Result<Self> {
        let (ma, mb) = (alice.len(), bob.len());
        if corr.len() != ma || corr.iter().any(|r| r.len() != mb) {
            return Err(Error::InvalidConfig("correlator table shape does not match marginals".into()));
        }
        let mut terms = Vec::new();
        let mut push = |coeff: f64, a: Option<usize>, b: Option<usize>| {
            if coeff != 0.0 {
                terms.push(Term { coeff, slots: vec![a, b] });
            }
        };
        for (x, &c) in alice.iter().enumerate() {
            push(c, Some(x), None);
        }
        for (y, &c) in bob.iter().enumerate() {
            push(c, None, Some(y));
        }
        for (x, row) in corr.iter().enumerate() {
            for (y, &c) in row.iter().enumerate() {
                push(c, Some(x), Some(y));
            }
        }
        Self::new(vec![2, 2], vec![ma, mb], 0.0, terms)
    }

    /// `A0B0 + A0B1 + A1B0 - A1B1` on two qubits.
    pub fn chsh() -> Self {
        Self::bipartite(&[0.0; 2], &[0.0; 2], &[vec![1.0, 1.0], vec![1.0, -1.0]]).expect("well formed")
    }

    /// `I3322` with local bound 4 (indices shifted to start at zero).
    pub fn i3322() -> Self {
        Self::bipartite(
            &[-1.0, -1.0, 0.0],
            &[-1.0, -1.0, 0.0],
            &[vec![-1.0, -1.0, -1.0], vec![-1.0, -1.0, 1.0], vec![-1.0, 1.0, 0.0]],
        )
        .expect("well formed")
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn measurements(&self) -> &[usize] {
        &self.measurements
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn total_dim(&self) -> usize {
        self.party_dims.iter().product()
    }

    /// State dimensions as `(Alice, Bob)`.
    pub fn state_dims(&self) -> (usize, usize) {
        (self.party_dims[0], self.party_dims[1..].iter().product())
    }

    /// Maximum over deterministic `+-1` assignments.
    pub fn local_bound(&self) -> f64 {
        let total: usize = self.measurements.iter().sum();
        assert!(total < 26, "too many measurements for brute force");
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << total) {
            let mut offset = 0;
            let mut signs = Vec::with_capacity(self.parties());
            for &m in &self.measurements {
                signs.push((0..m).map(|j| if mask >> (offset + j) & 1 == 1 { -1.0 } else { 1.0 }).collect::<Vec<_>>());
                offset += m;
            }
            let v = self.constant
                + self
                    .terms
                    .iter()
                    .map(|t| {
                        t.coeff
                            * t.slots.iter().enumerate().filter_map(|(p, s)| s.map(|j| signs[p][j])).product::<f64>()
                    })
                    .sum::<f64>();
            best = best.max(v);
        }
        best
    }

    /// Bell operator `beta` for the given measurement matrices (`obs[p][j]`
    /// is `Q+ - Q-` of party `p`, measurement `j`).
    pub fn operator(&self, obs: &[Vec<CMatrix>]) -> CMatrix {
        let ids: Vec<CMatrix> = self.party_dims.iter().map(|&d| identity(d)).collect();
        let mut beta = identity(self.total_dim()).scale(self.constant);
        for t in &self.terms {
            let factors = t.slots.iter().enumerate().map(|(p, s)| match s {
                Some(j) => &obs[p][*j],
                None => &ids[p],
            });
            beta += kron_all(factors).scale(t.coeff);
        }
        beta
    }

    /// For party `target`, the operator `E_j` on the full space with the
    /// identity on `target`, such that the expression equals
    /// `const + sum_j Tr[rho E_j (O_j on target)]`.
    pub(crate) fn environment(&self, obs: &[Vec<CMatrix>], target: usize) -> (CMatrix, Vec<CMatrix>) {
        let d = self.total_dim();
        let ids: Vec<CMatrix> = self.party_dims.iter().map(|&d| identity(d)).collect();
        let mut rest = identity(d).scale(self.constant);
        let mut per = vec![CMatrix::zeros(d, d); self.measurements[target]];
        for t in &self.terms {
            let factors = t.slots.iter().enumerate().map(|(p, s)| match s {
                Some(j) if p != target => &obs[p][*j],
                _ => &ids[p],
            });
            let op = kron_all(factors).scale(t.coeff);
            match t.slots[target] {
                Some(j) => per[j] += op,
                None => rest += op,
            }
        }
        (rest, per)
    }
}

pub(crate) fn matrices(obs: &[Vec<DichotomicObservable>]) -> Vec<Vec<CMatrix>> {
    obs.iter().map(|v| v.iter().map(DichotomicObservable::matrix).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::table_row;

    #[test]
    fn local_bounds() {
        assert_eq!(BellPolynomial::chsh().local_bound(), 2.0);
        assert_eq!(BellPolynomial::i3322().local_bound(), 4.0);
        let s = Scenario::square();
        for id in [1, 15, 18, 24, 25] {
            let row = table_row(id).unwrap();
            let p = BellPolynomial::from_inequality(&row, &s).unwrap();
            assert_eq!(p.local_bound(), row.local_bound() as f64, "row {id}");
        }
    }

    #[test]
    fn each_correlator_splits_over_virtual_parties() {
        let s = Scenario::square();
        let p = BellPolynomial::from_inequality(&table_row(15).unwrap(), &s).unwrap();
        for t in p.terms() {
            assert!(t.slots.iter().any(Option::is_some));
        }
        assert_eq!(virtual_party(0), (1, 0));
        assert_eq!(virtual_party(3), (2, 1));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(BellPolynomial::new(vec![2], vec![2], 0.0, vec![]).is_err());
        let t = Term { coeff: 1.0, slots: vec![Some(3), None] };
        assert!(BellPolynomial::new(vec![2, 2], vec![2, 2], 0.0, vec![t]).is_err());
        assert!(BellPolynomial::from_inequality(&table_row(1).unwrap(), &Scenario::cycle(3).unwrap()).is_err());
        assert!(BellPolynomial::chsh().with_update_order(vec![0, 0]).is_err());
        assert_eq!(BellPolynomial::chsh().with_update_order(vec![1, 0]).unwrap().update_order(), &[1, 0]);
    }
}

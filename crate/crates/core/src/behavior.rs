//! Behaviors in correlator and probability form, and the extremal points of
//! the local, no-disturbance polytope.

use std::io::{Read, Write};

use crate::exact;
use crate::scenario::{Context, Scenario, ALICE_INPUTS};
use crate::{Error, Result};

/// Tolerance for nonnegativity and normalization of probabilities computed
/// from floating-point data.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Maps an outcome slot (0 or 1) to its value (+1 or -1).
#[inline]
pub fn outcome(slot: usize) -> f64 {
    if slot == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorVector {
    values: Vec<f64>,
}

impl CorrelatorVector {
    pub fn new(s: &Scenario, values: Vec<f64>) -> Result<Self> {
        if values.len() != s.dimension() {
            return Err(Error::DimensionMismatch { expected: s.dimension(), actual: values.len() });
        }
        Ok(CorrelatorVector { values })
    }

    pub fn zeros(s: &Scenario) -> Self {
        CorrelatorVector { values: vec![0.0; s.dimension()] }
    }

    /// Unchecked; length is validated where the vector is used.
    pub fn from_values(values: Vec<f64>) -> Self {
        CorrelatorVector { values }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        CorrelatorVector { values: coords.iter().map(|&v| v as f64).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every entry lies in `[-1, 1]` and every reconstructed
    /// probability is at least `-tol`.
    pub fn is_valid(&self, s: &Scenario, tol: f64) -> bool {
        self.values.iter().all(|v| v.abs() <= 1.0 + tol)
            && correlators_to_probabilities(s, self).values().iter().all(|&p| p >= -tol)
    }
}

/// Joint probabilities `p(a, b1, b2 | x, ctx)`.
///
/// Outcome slots are 0 for +1 and 1 for -1; `b1`/`b2` follow the order of
/// the context pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    contexts: usize,
    data: Vec<f64>,
}

impl ProbabilityTable {
    pub fn zeros(s: &Scenario) -> Self {
        let contexts = s.contexts().len();
        ProbabilityTable { contexts, data: vec![0.0; ALICE_INPUTS * contexts * 8] }
    }

    #[inline]
    fn offset(&self, x: usize, ctx: usize, a: usize, b1: usize, b2: usize) -> usize {
        debug_assert!(x < ALICE_INPUTS && ctx < self.contexts && a < 2 && b1 < 2 && b2 < 2);
        ((x * self.contexts + ctx) * 2 + a) * 4 + b1 * 2 + b2
    }

    pub fn get(&self, x: usize, ctx: usize, a: usize, b1: usize, b2: usize) -> f64 {
        self.data[self.offset(x, ctx, a, b1, b2)]
    }

    pub fn set(&mut self, x: usize, ctx: usize, a: usize, b1: usize, b2: usize, p: f64) {
        let i = self.offset(x, ctx, a, b1, b2);
        self.data[i] = p;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn contexts(&self) -> usize {
        self.contexts
    }

    /// Marginal `p(b | y)` as seen from setting `(x, ctx)`, where `y` is the
    /// member of `ctx` at `slot` (0 or 1).
    pub fn bob_single_marginal(&self, x: usize, ctx: usize, slot: usize, b: usize) -> f64 {
        let mut sum = 0.0;
        for a in 0..2 {
            for other in 0..2 {
                let (b1, b2) = if slot == 0 { (b, other) } else { (other, b) };
                sum += self.get(x, ctx, a, b1, b2);
            }
        }
        sum
    }

    /// Maximum deviation of any per-setting sum from 1.
    pub fn normalization_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..ALICE_INPUTS {
            for ctx in 0..self.contexts {
                worst = worst.max((self.setting_sum(x, ctx) - 1.0).abs());
            }
        }
        worst
    }

    fn setting_sum(&self, x: usize, ctx: usize) -> f64 {
        let start = self.offset(x, ctx, 0, 0, 0);
        self.data[start..start + 8].iter().sum()
    }
}

/// Expands a correlator vector into the `8 * 2 * |C|` joint probabilities.
/// The result is not checked for nonnegativity.
pub fn correlators_to_probabilities(s: &Scenario, c: &CorrelatorVector) -> ProbabilityTable {
    let v = c.values();
    let mut table = ProbabilityTable::zeros(s);
    for x in 0..ALICE_INPUTS {
        for (ci, &Context(y1, y2)) in s.contexts().iter().enumerate() {
            for a in 0..2 {
                for b1 in 0..2 {
                    for b2 in 0..2 {
                        let (sa, s1, s2) = (outcome(a), outcome(b1), outcome(b2));
                        let p = 1.0
                            + sa * v[s.pos_a(x)]
                            + s1 * v[s.pos_b(y1)]
                            + s2 * v[s.pos_b(y2)]
                            + s1 * s2 * v[s.pos_bb(ci)]
                            + sa * s1 * v[s.pos_ab(x, y1)]
                            + sa * s2 * v[s.pos_ab(x, y2)]
                            + sa * s1 * s2 * v[s.pos_abb(x, ci)];
                        table.set(x, ci, a, b1, b2, p / 8.0);
                    }
                }
            }
        }
    }
    table
}

/// Recovers correlators from a normalized table. Marginal correlators that
/// can be read from several settings are averaged over them, which makes
/// this the exact inverse of [`correlators_to_probabilities`] on
/// no-signalling, no-disturbing tables.
pub fn probabilities_to_correlators(s: &Scenario, p: &ProbabilityTable) -> Result<CorrelatorVector> {
    if p.contexts() != s.contexts().len() {
        return Err(Error::DimensionMismatch { expected: s.contexts().len(), actual: p.contexts() });
    }
    for x in 0..ALICE_INPUTS {
        for ctx in 0..p.contexts() {
            let sum = p.setting_sum(x, ctx);
            if (sum - 1.0).abs() > PROBABILITY_TOL {
                return Err(Error::Normalization { x, ctx, sum });
            }
        }
    }

    // Expectation of the sign product selected by (use_a, use_b1, use_b2)
    // within one setting.
    let moment = |x: usize, ctx: usize, use_a: bool, use_b1: bool, use_b2: bool| -> f64 {
        let mut e = 0.0;
        for a in 0..2 {
            for b1 in 0..2 {
                for b2 in 0..2 {
                    let mut sign = 1.0;
                    if use_a {
                        sign *= outcome(a);
                    }
                    if use_b1 {
                        sign *= outcome(b1);
                    }
                    if use_b2 {
                        sign *= outcome(b2);
                    }
                    e += sign * p.get(x, ctx, a, b1, b2);
                }
            }
        }
        e
    };

    let n_ctx = s.contexts().len() as f64;
    let mut c = CorrelatorVector::zeros(s);
    let v = c.values_mut();

    for x in 0..ALICE_INPUTS {
        v[s.pos_a(x)] = (0..s.contexts().len()).map(|ci| moment(x, ci, true, false, false)).sum::<f64>() / n_ctx;
    }
    for y in 0..s.bob_inputs() {
        let mut single = 0.0;
        let mut count = 0.0;
        let mut ab = [0.0; ALICE_INPUTS];
        for ci in s.contexts_of(y) {
            let first = s.contexts()[ci].0 == y;
            for (x, slot) in ab.iter_mut().enumerate() {
                single += moment(x, ci, false, first, !first);
                count += 1.0;
                *slot += moment(x, ci, true, first, !first);
            }
        }
        v[s.pos_b(y)] = single / count;
        let per_x = count / ALICE_INPUTS as f64;
        for (x, total) in ab.iter().enumerate() {
            v[s.pos_ab(x, y)] = total / per_x;
        }
    }
    for ci in 0..s.contexts().len() {
        v[s.pos_bb(ci)] =
            (0..ALICE_INPUTS).map(|x| moment(x, ci, false, true, true)).sum::<f64>() / ALICE_INPUTS as f64;
        for x in 0..ALICE_INPUTS {
            v[s.pos_abb(x, ci)] = moment(x, ci, true, true, true);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalReport {
    pub max_violation: f64,
    pub pass: bool,
}

/// Largest discrepancy of a single-measurement marginal `p(b|y)` between
/// the two contexts containing `y` (for every Alice input).
pub fn check_no_disturbance(s: &Scenario, p: &ProbabilityTable, tol: f64) -> MarginalReport {
    let mut worst: f64 = 0.0;
    for y in 0..s.bob_inputs() {
        let ctxs = s.contexts_of(y);
        let slot = |ci: usize| if s.contexts()[ci].0 == y { 0 } else { 1 };
        for x in 0..ALICE_INPUTS {
            for b in 0..2 {
                let first = p.bob_single_marginal(x, ctxs[0], slot(ctxs[0]), b);
                for &other in &ctxs[1..] {
                    let m = p.bob_single_marginal(x, other, slot(other), b);
                    worst = worst.max((first - m).abs());
                }
            }
        }
    }
    MarginalReport { max_violation: worst, pass: worst <= tol }
}

/// Largest violation of the no-signalling conditions: Alice's marginal must
/// not depend on the context, Bob's context marginal must not depend on `x`.
pub fn check_no_signalling(s: &Scenario, p: &ProbabilityTable, tol: f64) -> MarginalReport {
    let mut worst: f64 = 0.0;
    let n_ctx = s.contexts().len();
    for x in 0..ALICE_INPUTS {
        for a in 0..2 {
            let alice = |ci: usize| -> f64 { (0..4).map(|bb| p.get(x, ci, a, bb / 2, bb % 2)).sum() };
            let reference = alice(0);
            for ci in 1..n_ctx {
                worst = worst.max((alice(ci) - reference).abs());
            }
        }
    }
    for ci in 0..n_ctx {
        for b1 in 0..2 {
            for b2 in 0..2 {
                let bob = |x: usize| p.get(x, ci, 0, b1, b2) + p.get(x, ci, 1, b1, b2);
                for x in 1..ALICE_INPUTS {
                    worst = worst.max((bob(x) - bob(0)).abs());
                }
            }
        }
    }
    MarginalReport { max_violation: worst, pass: worst <= tol }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    AliceDeterministic,
    BobNoncontextual,
    BobContextual,
    Product,
}

/// Extremal point of Bob's no-disturbance polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BobPoint {
    pub singles: Vec<i64>,
    pub pairs: Vec<i64>,
    pub contextual: bool,
}

/// Product vertex of the local, no-disturbance polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub coords: Vec<i64>,
    /// Kind of the Bob factor.
    pub bob_kind: VertexKind,
}

impl Vertex {
    pub fn to_correlators(&self) -> CorrelatorVector {
        CorrelatorVector::from_integers(&self.coords)
    }
}

#[derive(Debug, Clone)]
pub struct VertexSet {
    scenario: Scenario,
    alice: Vec<[i64; ALICE_INPUTS]>,
    bob: Vec<BobPoint>,
    products: Vec<Vertex>,
}

impl VertexSet {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn alice_points(&self) -> &[[i64; ALICE_INPUTS]] {
        &self.alice
    }

    pub fn bob_points(&self) -> &[BobPoint] {
        &self.bob
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.products
    }

    pub fn count(&self, kind: VertexKind) -> usize {
        match kind {
            VertexKind::AliceDeterministic => self.alice.len(),
            VertexKind::BobNoncontextual => self.bob.iter().filter(|b| !b.contextual).count(),
            VertexKind::BobContextual => self.bob.iter().filter(|b| b.contextual).count(),
            VertexKind::Product => self.products.len(),
        }
    }

    pub fn coordinates(&self) -> Vec<Vec<i64>> {
        self.products.iter().map(|v| v.coords.clone()).collect()
    }

    /// Writes one row per product vertex with a header of correlator labels.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.scenario.labels())?;
        for v in &self.products {
            w.write_record(v.coords.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads integer vertex rows written by [`VertexSet::write_csv`].
pub fn read_vertex_csv<R: Read>(input: R, s: &Scenario) -> Result<Vec<Vec<i64>>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let expected = s.labels();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Table("vertex file header does not match the scenario".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<i64>().map_err(|e| Error::Table(format!("bad vertex entry {f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != s.dimension() {
            return Err(Error::DimensionMismatch { expected: s.dimension(), actual: row.len() });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// All sign vectors of length `n`, in lexicographic order with +1 first.
fn sign_patterns(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..1usize << n).map(move |bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 0 { 1 } else { -1 }).collect())
}

/// Noncontextual and contextual extremal points of Bob's cycle
/// no-disturbance polytope.
pub fn bob_extremal_points(s: &Scenario) -> Vec<BobPoint> {
    let n = s.bob_inputs();
    let m = s.contexts().len();
    let mut points = Vec::with_capacity((1 << n) + (1 << (m - 1)));
    for singles in sign_patterns(n) {
        let pairs = s.contexts().iter().map(|&Context(a, b)| singles[a] * singles[b]).collect();
        points.push(BobPoint { singles, pairs, contextual: false });
    }
    for pairs in sign_patterns(m) {
        if pairs.iter().product::<i64>() == -1 {
            points.push(BobPoint { singles: vec![0; n], pairs, contextual: true });
        }
    }
    points
}

/// Enumerates Alice's deterministic points, Bob's extremal points and every
/// product vertex of the local, no-disturbance polytope.
pub fn enumerate_vertices(s: &Scenario) -> VertexSet {
    let alice: Vec<[i64; ALICE_INPUTS]> = sign_patterns(ALICE_INPUTS).map(|v| [v[0], v[1]]).collect();
    let bob = bob_extremal_points(s);
    let mut products = Vec::with_capacity(alice.len() * bob.len());
    for a in &alice {
        for b in &bob {
            let mut coords = vec![0i64; s.dimension()];
            for x in 0..ALICE_INPUTS {
                coords[s.pos_a(x)] = a[x];
                for y in 0..s.bob_inputs() {
                    coords[s.pos_ab(x, y)] = a[x] * b.singles[y];
                }
                for ci in 0..s.contexts().len() {
                    coords[s.pos_abb(x, ci)] = a[x] * b.pairs[ci];
                }
            }
            for y in 0..s.bob_inputs() {
                coords[s.pos_b(y)] = b.singles[y];
            }
            for ci in 0..s.contexts().len() {
                coords[s.pos_bb(ci)] = b.pairs[ci];
            }
            let bob_kind = if b.contextual { VertexKind::BobContextual } else { VertexKind::BobNoncontextual };
            products.push(Vertex { coords, bob_kind });
        }
    }
    VertexSet { scenario: s.clone(), alice, bob, products }
}

/// Dimension of the affine hull of integer points, by exact rank.
pub fn affine_dimension(points: &[Vec<i64>]) -> usize {
    exact::affine_dimension(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn square() -> Scenario {
        Scenario::square()
    }

    #[test]
    fn zero_vector_is_uniform() {
        let s = square();
        let p = correlators_to_probabilities(&s, &CorrelatorVector::zeros(&s));
        assert!(p.values().iter().all(|&v| v == 0.125));
        let back = probabilities_to_correlators(&s, &p).unwrap();
        assert!(back.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_all_plus_point() {
        let s = square();
        let c = CorrelatorVector::new(&s, vec![1.0; 26]).unwrap();
        let p = correlators_to_probabilities(&s, &c);
        assert_eq!(p.get(0, 0, 0, 0, 0), 1.0);
        assert_eq!(p.values().iter().sum::<f64>(), 8.0);
    }

    #[test]
    fn contextual_vertex_probabilities() {
        // <B_ctx> = (+1, +1, +1, -1), all singles zero, Alice deterministic.
        let s = square();
        let vs = enumerate_vertices(&s);
        let v = vs
            .vertices()
            .iter()
            .find(|v| {
                v.bob_kind == VertexKind::BobContextual
                    && v.coords[s.pos_a(0)] == 1
                    && v.coords[s.pos_a(1)] == 1
                    && (0..4).map(|c| v.coords[s.pos_bb(c)]).eq([1, 1, 1, -1])
            })
            .unwrap();
        let p = correlators_to_probabilities(&s, &v.to_correlators());
        for b1 in 0..2 {
            for b2 in 0..2 {
                let expected = (1.0 + outcome(b1) * outcome(b2)) / 4.0;
                assert_eq!(p.get(0, 0, 0, b1, b2), expected);
                assert_eq!(p.get(0, 0, 1, b1, b2), 0.0);
            }
        }
    }

    #[test]
    fn unnormalized_table_is_rejected() {
        let s = square();
        let mut p = correlators_to_probabilities(&s, &CorrelatorVector::zeros(&s));
        p.set(1, 2, 0, 0, 0, 0.5);
        match probabilities_to_correlators(&s, &p) {
            Err(Error::Normalization { x: 1, ctx: 2, .. }) => {}
            other => panic!("expected normalization error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_length_vector() {
        let s = square();
        assert!(matches!(
            CorrelatorVector::new(&s, vec![0.0; 20]),
            Err(Error::DimensionMismatch { expected: 26, actual: 20 })
        ));
    }

    #[test]
    fn disturbance_is_reported() {
        // Shift 0.1 of probability inside context (0,1) so that p(b0=+1)
        // differs by 0.1 from its value in context (3,0).
        let s = square();
        let mut p = correlators_to_probabilities(&s, &CorrelatorVector::zeros(&s));
        for x in 0..2 {
            for a in 0..2 {
                p.set(x, 0, a, 0, 0, 0.125 + 0.05);
                p.set(x, 0, a, 1, 0, 0.125 - 0.05);
            }
        }
        let r = check_no_disturbance(&s, &p, 1e-12);
        assert!((r.max_violation - 0.1).abs() < 1e-15);
        assert!(!r.pass);
    }

    #[test]
    fn vertex_counts_square() {
        let vs = enumerate_vertices(&square());
        assert_eq!(vs.count(VertexKind::AliceDeterministic), 4);
        assert_eq!(vs.count(VertexKind::BobNoncontextual), 16);
        assert_eq!(vs.count(VertexKind::BobContextual), 8);
        assert_eq!(vs.count(VertexKind::Product), 96);
        let distinct: HashSet<_> = vs.vertices().iter().map(|v| v.coords.clone()).collect();
        assert_eq!(distinct.len(), 96);
    }

    #[test]
    fn vertex_counts_triangle() {
        let vs = enumerate_vertices(&Scenario::cycle(3).unwrap());
        assert_eq!(vs.count(VertexKind::BobNoncontextual), 8);
        assert_eq!(vs.count(VertexKind::BobContextual), 4);
        assert_eq!(vs.count(VertexKind::Product), 48);
    }

    #[test]
    fn contextual_points_have_odd_parity_and_zero_singles() {
        for b in bob_extremal_points(&square()).iter().filter(|b| b.contextual) {
            assert!(b.singles.iter().all(|&v| v == 0));
            assert_eq!(b.pairs.iter().product::<i64>(), -1);
        }
    }

    #[test]
    fn vertices_are_exactly_no_disturbing() {
        let s = square();
        let allowed = [0.0, 0.125, 0.25, 0.5, 1.0];
        for v in enumerate_vertices(&s).vertices() {
            assert!(v.coords.iter().all(|c| (-1..=1).contains(c)));
            let p = correlators_to_probabilities(&s, &v.to_correlators());
            assert!(p.values().iter().all(|x| allowed.contains(x)), "{:?}", p.values());
            assert_eq!(check_no_disturbance(&s, &p, 0.0).max_violation, 0.0);
            assert_eq!(check_no_signalling(&s, &p, 0.0).max_violation, 0.0);
        }
    }

    #[test]
    fn affine_dimensions() {
        let vs = enumerate_vertices(&square());
        assert_eq!(affine_dimension(&vs.coordinates()), 26);
        assert_eq!(affine_dimension(&vs.coordinates()[..1]), 0);
        let alice: Vec<Vec<i64>> = vs.alice_points().iter().map(|a| a.to_vec()).collect();
        assert_eq!(affine_dimension(&alice), 2);
    }

    #[test]
    fn csv_round_trip() {
        let s = square();
        let vs = enumerate_vertices(&s);
        let mut buf = Vec::new();
        vs.write_csv(&mut buf).unwrap();
        let rows = read_vertex_csv(buf.as_slice(), &s).unwrap();
        assert_eq!(rows, vs.coordinates());
    }
}

//! Relabelings that respect the compatibility structure: Alice input swap,
//! outcome flips on either side and the dihedral group of Bob's cycle. Each
//! acts on correlator vectors (and on coefficient vectors) as a signed
//! permutation.

use rayon::prelude::*;

use super::Inequality;
use crate::scenario::{Context, Scenario, ALICE_INPUTS};

/// `(g v)[perm[i]] = sign[i] * v[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    sign: Vec<i64>,
}

impl SignedPermutation {
    pub fn identity(dim: usize) -> Self {
        SignedPermutation { perm: (0..dim).collect(), sign: vec![1; dim] }
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] = self.sign[i] as f64 * x;
        }
        out
    }

    pub fn apply_int(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] = self.sign[i] * x;
        }
        out
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        let dim = self.perm.len();
        let mut perm = vec![0; dim];
        let mut sign = vec![0; dim];
        for i in 0..dim {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            sign[i] = other.sign[i] * self.sign[j];
        }
        SignedPermutation { perm, sign }
    }
}

/// A relabeling described by its action on inputs and outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relabeling {
    alice_perm: [usize; ALICE_INPUTS],
    alice_flip: [i64; ALICE_INPUTS],
    bob_perm: Vec<usize>,
    bob_flip: Vec<i64>,
}

impl Relabeling {
    fn to_signed_permutation(&self, s: &Scenario) -> SignedPermutation {
        let dim = s.dimension();
        let mut perm = vec![0; dim];
        let mut sign = vec![0; dim];
        let ctx_image = |ci: usize| -> usize {
            let Context(a, b) = s.contexts()[ci];
            let (pa, pb) = (self.bob_perm[a], self.bob_perm[b]);
            s.contexts()
                .iter()
                .position(|c| c.contains(pa) && c.contains(pb))
                .expect("dihedral maps contexts to contexts")
        };
        let ctx_sign = |ci: usize| -> i64 {
            let Context(a, b) = s.contexts()[ci];
            self.bob_flip[a] * self.bob_flip[b]
        };
        for x in 0..ALICE_INPUTS {
            let px = self.alice_perm[x];
            let fx = self.alice_flip[x];
            perm[s.pos_a(x)] = s.pos_a(px);
            sign[s.pos_a(x)] = fx;
            for y in 0..s.bob_inputs() {
                perm[s.pos_ab(x, y)] = s.pos_ab(px, self.bob_perm[y]);
                sign[s.pos_ab(x, y)] = fx * self.bob_flip[y];
            }
            for ci in 0..s.contexts().len() {
                perm[s.pos_abb(x, ci)] = s.pos_abb(px, ctx_image(ci));
                sign[s.pos_abb(x, ci)] = fx * ctx_sign(ci);
            }
        }
        for y in 0..s.bob_inputs() {
            perm[s.pos_b(y)] = s.pos_b(self.bob_perm[y]);
            sign[s.pos_b(y)] = self.bob_flip[y];
        }
        for ci in 0..s.contexts().len() {
            perm[s.pos_bb(ci)] = s.pos_bb(ctx_image(ci));
            sign[s.pos_bb(ci)] = ctx_sign(ci);
        }
        SignedPermutation { perm, sign }
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    generators: Vec<SignedPermutation>,
    elements: Vec<SignedPermutation>,
}

impl SymmetryGroup {
    /// Full relabeling group of a cycle scenario: `8 * 2n * 2^n` elements.
    pub fn for_scenario(s: &Scenario) -> Self {
        let n = s.bob_inputs();
        let id_alice = [0, 1];
        let no_flip_alice = [1, 1];

        let mut generators = Vec::new();
        let base = |alice_perm: [usize; 2], alice_flip: [i64; 2], bob_perm: Vec<usize>, bob_flip: Vec<i64>| {
            Relabeling { alice_perm, alice_flip, bob_perm, bob_flip }.to_signed_permutation(s)
        };
        let id_bob: Vec<usize> = (0..n).collect();
        generators.push(base([1, 0], no_flip_alice, id_bob.clone(), vec![1; n]));
        for x in 0..ALICE_INPUTS {
            let mut f = no_flip_alice;
            f[x] = -1;
            generators.push(base(id_alice, f, id_bob.clone(), vec![1; n]));
        }
        for y in 0..n {
            let mut f = vec![1; n];
            f[y] = -1;
            generators.push(base(id_alice, no_flip_alice, id_bob.clone(), f));
        }
        generators.push(base(id_alice, no_flip_alice, (0..n).map(|y| (y + 1) % n).collect(), vec![1; n]));
        generators.push(base(id_alice, no_flip_alice, (0..n).map(|y| (n - y) % n).collect(), vec![1; n]));

        let mut elements = Vec::with_capacity((8 * 2 * n) << n);
        for alice_perm in [[0, 1], [1, 0]] {
            for af in 0..4usize {
                let alice_flip = [sign_bit(af, 0), sign_bit(af, 1)];
                for reflect in [false, true] {
                    for r in 0..n {
                        let bob_perm: Vec<usize> =
                            (0..n).map(|y| if reflect { (r + n - y) % n } else { (y + r) % n }).collect();
                        for bf in 0..1usize << n {
                            let bob_flip = (0..n).map(|y| sign_bit(bf, y)).collect();
                            elements.push(base(alice_perm, alice_flip, bob_perm.clone(), bob_flip));
                        }
                    }
                }
            }
        }
        SymmetryGroup { generators, elements }
    }

    pub fn generators(&self) -> &[SignedPermutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[SignedPermutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Distinct images of an integer vector under the group.
    pub fn orbit(&self, v: &[i64]) -> Vec<Vec<i64>> {
        let mut images: Vec<Vec<i64>> = self.elements.iter().map(|g| g.apply_int(v)).collect();
        images.sort();
        images.dedup();
        images
    }
}

fn sign_bit(bits: usize, i: usize) -> i64 {
    if bits >> i & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Lexicographically smallest coefficient vector in the orbit of `ineq`.
/// The bound is unchanged since relabelings map vertices to vertices.
pub fn canonicalize(ineq: &Inequality, g: &SymmetryGroup) -> Inequality {
    let best = g.elements().par_iter().map(|e| e.apply_int(ineq.coeffs())).min().expect("group is nonempty");
    ineq.with_coeffs(best)
}

/// Same orbit and same local bound.
pub fn equivalent(a: &Inequality, b: &Inequality, g: &SymmetryGroup) -> bool {
    a.local_bound() == b.local_bound() && canonicalize(a, g).coeffs() == canonicalize(b, g).coeffs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::enumerate_vertices;
    use crate::polytope::{bundled_table, local_bound};
    use std::collections::HashSet;

    #[test]
    fn group_order() {
        let g = SymmetryGroup::for_scenario(&Scenario::square());
        assert_eq!(g.order(), 1024);
        let distinct: HashSet<_> = g.elements().iter().cloned().collect();
        assert_eq!(distinct.len(), 1024);
        assert_eq!(g.generators().len(), 1 + 2 + 4 + 2);
    }

    #[test]
    fn every_element_preserves_vertices() {
        let s = Scenario::square();
        let vs = enumerate_vertices(&s);
        let set: HashSet<Vec<i64>> = vs.coordinates().into_iter().collect();
        let g = SymmetryGroup::for_scenario(&s);
        for e in g.elements().iter().chain(g.generators()) {
            let image: HashSet<Vec<i64>> = set.iter().map(|v| e.apply_int(v)).collect();
            assert_eq!(image, set);
        }
    }

    #[test]
    fn triangle_group_preserves_vertices() {
        let s = Scenario::cycle(3).unwrap();
        let set: HashSet<Vec<i64>> = enumerate_vertices(&s).coordinates().into_iter().collect();
        let g = SymmetryGroup::for_scenario(&s);
        assert_eq!(g.order(), 8 * 6 * 8);
        for e in g.elements() {
            let image: HashSet<Vec<i64>> = set.iter().map(|v| e.apply_int(v)).collect();
            assert_eq!(image, set);
        }
    }

    #[test]
    fn rotation_image_is_equivalent() {
        let s = Scenario::square();
        let g = SymmetryGroup::for_scenario(&s);
        let row15 = &bundled_table()[14];
        let rotation = &g.generators()[7];
        let rotated = row15.with_coeffs(rotation.apply_int(row15.coeffs()));
        assert_ne!(rotated.coeffs(), row15.coeffs());
        assert_eq!(canonicalize(&rotated, &g), canonicalize(row15, &g));
        assert!(equivalent(&rotated, row15, &g));
    }

    #[test]
    fn group_action_preserves_local_bound() {
        let s = Scenario::square();
        let vs = enumerate_vertices(&s);
        let g = SymmetryGroup::for_scenario(&s);
        let row = &bundled_table()[17];
        for e in g.elements().iter().step_by(37) {
            let img = row.with_coeffs(e.apply_int(row.coeffs()));
            assert_eq!(local_bound(&img, &vs), row.local_bound());
        }
    }

    #[test]
    fn table_rows_are_pairwise_inequivalent() {
        let g = SymmetryGroup::for_scenario(&Scenario::square());
        let table = bundled_table();
        let canon: Vec<_> = table.iter().map(|r| canonicalize(r, &g)).collect();
        for (r, c) in table.iter().zip(&canon) {
            assert_eq!(&canonicalize(c, &g), c, "idempotent on row {:?}", r.id());
        }
        assert_ne!(canon[14].coeffs(), canon[17].coeffs());
        let distinct: HashSet<_> = canon.iter().map(|c| (c.coeffs().to_vec(), c.local_bound())).collect();
        assert_eq!(distinct.len(), 26);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let g = SymmetryGroup::for_scenario(&Scenario::square());
        let v: Vec<i64> = (0..26).map(|i| i as i64 - 13).collect();
        let a = &g.elements()[77];
        let b = &g.elements()[901];
        assert_eq!(a.compose(b).apply_int(&v), a.apply_int(&b.apply_int(&v)));
        assert_eq!(SignedPermutation::identity(26).apply_int(&v), v);
    }
}

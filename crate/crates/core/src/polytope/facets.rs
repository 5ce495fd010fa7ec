//! Facet enumeration of a vertex set by the double description method, in
//! exact integer arithmetic.
//!
//! Each vertex `v` gives the homogeneous constraint `x0 + <x', v> >= 0` on
//! `x = (x0, x')`; the extreme rays of that cone are the facets
//! `<-x', c> <= x0`. Constraints are added one at a time and new rays are
//! formed from adjacent pairs, with adjacency decided combinatorially from
//! zero sets.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{canonicalize, Inequality, SymmetryGroup};
use crate::behavior::VertexSet;
use crate::exact::{cross, rank};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FacetBudget {
    /// Abort once the intermediate cone has more rays than this.
    pub max_rays: usize,
    pub max_time: Duration,
}

impl Default for FacetBudget {
    fn default() -> Self {
        FacetBudget { max_rays: 2_000_000, max_time: Duration::from_secs(600) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetClass {
    /// Lexicographically smallest member of the orbit.
    pub representative: Inequality,
    pub orbit_size: usize,
}

#[derive(Debug, Clone)]
pub struct FacetEnumeration {
    /// Primitive integer facets, sorted.
    pub facets: Vec<Inequality>,
    /// Orbits under the relabeling group, sorted by representative.
    pub classes: Vec<FacetClass>,
    /// Largest intermediate ray count.
    pub peak_rays: usize,
}

#[derive(Debug, Clone)]
struct Ray {
    x: Vec<i64>,
    zeros: Vec<u64>,
}

fn contains(outer: &[u64], inner: &[u64]) -> bool {
    outer.iter().zip(inner).all(|(o, i)| i & !o == 0)
}

fn dot(h: &[i64], x: &[i64]) -> i64 {
    h.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn primitive(x: &mut [i64]) {
    let g = x.iter().fold(0i64, |g, &v| g.gcd(&v));
    if g > 1 {
        x.iter_mut().for_each(|v| *v /= g);
    }
}

fn overflow() -> Error {
    Error::Domain("facet coordinates overflow 64-bit integers".into())
}

/// All facets of `conv(vs)`. The vertex set must be full-dimensional.
pub fn enumerate_facets(vs: &VertexSet, budget: &FacetBudget) -> Result<FacetEnumeration> {
    let started = Instant::now();
    let coords = vs.coordinates();
    let d = vs.scenario().dimension() + 1;
    let rows: Vec<Vec<i64>> = coords.iter().map(|v| std::iter::once(1).chain(v.iter().copied()).collect()).collect();
    let words = rows.len().div_ceil(64);

    // Initial simplicial cone from the first d independent constraints.
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<i64>> = basis.iter().map(|&b| rows[b].clone()).collect();
        trial.push(rows[i].clone());
        if rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(Error::Domain(format!("vertex set spans only {} of {} affine dimensions", basis.len() - 1, d - 1)));
    }
    let mut rays: Vec<Ray> = (0..d)
        .into_par_iter()
        .map(|j| {
            let others: Vec<Vec<i64>> = basis.iter().filter(|&&b| b != basis[j]).map(|&b| rows[b].clone()).collect();
            let c = cross(&others);
            let g = c.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            let mut x: Vec<i64> = c.iter().map(|v| (v / &g).to_i64().ok_or_else(overflow)).collect::<Result<_>>()?;
            if dot(&rows[basis[j]], &x) < 0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            let mut zeros = vec![0u64; words];
            for &b in basis.iter().filter(|&&b| b != basis[j]) {
                zeros[b / 64] |= 1 << (b % 64);
            }
            Ok(Ray { x, zeros })
        })
        .collect::<Result<_>>()?;

    let in_basis: HashSet<usize> = basis.iter().copied().collect();
    let mut peak_rays = rays.len();
    for i in (0..rows.len()).filter(|i| !in_basis.contains(i)) {
        let h = &rows[i];
        let s: Vec<i64> = rays.par_iter().map(|r| dot(h, &r.x)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| s[k] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| s[k] < 0).collect();

        let fresh: Vec<Ray> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                let (rays, s) = (&rays, &s);
                neg.iter().filter_map(move |&n| {
                    let z: Vec<u64> = rays[p].zeros.iter().zip(&rays[n].zeros).map(|(a, b)| a & b).collect();
                    if z.iter().map(|w| w.count_ones() as usize).sum::<usize>() < d - 2 {
                        return None;
                    }
                    let blocked = rays.iter().enumerate().any(|(k, r)| k != p && k != n && contains(&r.zeros, &z));
                    if blocked {
                        return None;
                    }
                    Some((p, n, z, s[p], s[n]))
                })
            })
            .map(|(p, n, mut zeros, sp, sn)| {
                let x: Option<Vec<i64>> = rays[n]
                    .x
                    .iter()
                    .zip(&rays[p].x)
                    .map(|(&a, &b)| sp.checked_mul(a)?.checked_sub(sn.checked_mul(b)?))
                    .collect();
                zeros[i / 64] |= 1 << (i % 64);
                x.map(|mut x| {
                    primitive(&mut x);
                    Ray { x, zeros }
                })
                .ok_or_else(overflow)
            })
            .collect::<Result<_>>()?;

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() - neg.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if s[k] == 0 {
                r.zeros[i / 64] |= 1 << (i % 64);
            }
            if s[k] >= 0 {
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
        peak_rays = peak_rays.max(rays.len());
        if rays.len() > budget.max_rays || started.elapsed() > budget.max_time {
            return Err(Error::BudgetExceeded { found: rays.len() });
        }
    }

    let mut facets: Vec<Inequality> =
        rays.iter().map(|r| Inequality::new(r.x[1..].iter().map(|v| -v).collect(), r.x[0])).collect::<Result<_>>()?;
    facets.sort_by(|a, b| (a.coeffs(), a.local_bound()).cmp(&(b.coeffs(), b.local_bound())));
    let classes = classify(&facets, &SymmetryGroup::for_scenario(vs.scenario()));
    Ok(FacetEnumeration { facets, classes, peak_rays })
}

/// Splits facets into orbits of the group.
pub fn classify(facets: &[Inequality], g: &SymmetryGroup) -> Vec<FacetClass> {
    let mut seen: HashSet<(Vec<i64>, i64)> = HashSet::with_capacity(facets.len());
    let mut classes = Vec::new();
    for f in facets {
        if seen.contains(&(f.coeffs().to_vec(), f.local_bound())) {
            continue;
        }
        let orbit = g.orbit(f.coeffs());
        let orbit_size = orbit.len();
        seen.extend(orbit.into_iter().map(|c| (c, f.local_bound())));
        classes.push(FacetClass { representative: canonicalize(f, g), orbit_size });
    }
    classes.sort_by(|a, b| {
        let key = |c: &FacetClass| (c.representative.local_bound(), c.representative.coeffs().to_vec());
        key(a).cmp(&key(b))
    });
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::enumerate_vertices;
    use crate::polytope::verify_facet;
    use crate::scenario::Scenario;

    #[test]
    fn signs_of_a_small_cone() {
        let mut x = vec![4, -6, 0, 2];
        primitive(&mut x);
        assert_eq!(x, vec![2, -3, 0, 1]);
        assert!(contains(&[0b1011], &[0b0011]));
        assert!(!contains(&[0b1001], &[0b0011]));
    }

    #[test]
    fn triangle_facets_are_valid_and_tight() {
        let s = Scenario::cycle(3).unwrap();
        let vs = enumerate_vertices(&s);
        let e = enumerate_facets(&vs, &FacetBudget::default()).unwrap();
        assert!(!e.facets.is_empty());
        for f in &e.facets {
            let r = verify_facet(f, &vs);
            assert!(r.valid && r.is_facet, "{:?}", f.coeffs());
        }
        let total: usize = e.classes.iter().map(|c| c.orbit_size).sum();
        assert_eq!(total, e.facets.len());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let vs = enumerate_vertices(&Scenario::cycle(3).unwrap());
        let budget = FacetBudget { max_rays: 10, ..FacetBudget::default() };
        assert!(matches!(enumerate_facets(&vs, &budget), Err(Error::BudgetExceeded { .. })));
    }
}

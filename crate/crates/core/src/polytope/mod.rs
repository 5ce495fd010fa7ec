//! Bell-like inequalities over the correlator vector, their local bounds,
//! facet checks and equivalence under relabelings.

use rayon::prelude::*;
use serde::Serialize;

use crate::behavior::{affine_dimension, CorrelatorVector, VertexSet};
use crate::scenario::Scenario;
use crate::{Error, Result};

#[cfg(feature = "facet-enum")]
pub mod facets;
mod symmetry;
mod table;

pub use symmetry::{canonicalize, equivalent, SignedPermutation, SymmetryGroup};
pub use table::{bundled_table, load_table, table_row, BUNDLED_TABLE};

/// Reference quantum value, with the number of decimals it was printed with
/// (`None` for values known in closed form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumBound {
    pub value: f64,
    pub decimals: Option<u32>,
}

impl QuantumBound {
    pub fn exact(value: f64) -> Self {
        QuantumBound { value, decimals: None }
    }

    /// Half a unit in the last printed place, zero for exact values.
    pub fn half_ulp(&self) -> f64 {
        match self.decimals {
            Some(d) => 0.5 * 10f64.powi(-(d as i32)),
            None => 0.0,
        }
    }
}

/// `coeffs . c <= local_bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    coeffs: Vec<i64>,
    local_bound: i64,
    quantum_bound: Option<QuantumBound>,
    id: Option<u32>,
    sliwa_class: Option<u32>,
}

impl Inequality {
    pub fn new(coeffs: Vec<i64>, local_bound: i64) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::Domain("inequality coefficients are all zero".into()));
        }
        Ok(Inequality { coeffs, local_bound, quantum_bound: None, id: None, sliwa_class: None })
    }

    pub fn with_quantum_bound(mut self, qb: QuantumBound) -> Self {
        self.quantum_bound = Some(qb);
        self
    }

    pub fn with_id(mut self, id: u32, sliwa_class: Option<u32>) -> Self {
        self.id = Some(id);
        self.sliwa_class = sliwa_class;
        self
    }

    pub fn with_local_bound(mut self, bound: i64) -> Self {
        self.local_bound = bound;
        self
    }

    /// CHSH between Alice and Bob's inputs 1 and 3:
    /// `<A0B1> + <A0B3> + <A1B1> - <A1B3> <= 2`.
    pub fn chsh(s: &Scenario) -> Self {
        let mut coeffs = vec![0; s.dimension()];
        coeffs[s.pos_ab(0, 1)] = 1;
        coeffs[s.pos_ab(0, 3)] = 1;
        coeffs[s.pos_ab(1, 1)] = 1;
        coeffs[s.pos_ab(1, 3)] = -1;
        Inequality::new(coeffs, 2)
            .expect("nonzero")
            .with_quantum_bound(QuantumBound::exact(2.0 * std::f64::consts::SQRT_2))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn local_bound(&self) -> i64 {
        self.local_bound
    }

    pub fn quantum_bound(&self) -> Option<QuantumBound> {
        self.quantum_bound
    }

    pub fn id(&self) -> Option<u32> {
        self.id
    }

    pub fn sliwa_class(&self) -> Option<u32> {
        self.sliwa_class
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    pub fn name(&self) -> String {
        match self.id {
            Some(id) => format!("#{id}"),
            None => "custom".to_string(),
        }
    }

    pub(crate) fn with_coeffs(&self, coeffs: Vec<i64>) -> Self {
        Inequality { coeffs, ..self.clone() }
    }
}

pub fn evaluate(ineq: &Inequality, c: &CorrelatorVector) -> Result<f64> {
    if c.len() != ineq.dimension() {
        return Err(Error::DimensionMismatch { expected: ineq.dimension(), actual: c.len() });
    }
    Ok(ineq.coeffs.iter().zip(c.values()).map(|(&a, &b)| a as f64 * b).sum())
}

pub fn evaluate_exact(ineq: &Inequality, coords: &[i64]) -> i64 {
    debug_assert_eq!(coords.len(), ineq.dimension());
    ineq.coeffs.iter().zip(coords).map(|(a, b)| a * b).sum()
}

/// Maximum of the inequality over the vertex set.
pub fn local_bound(ineq: &Inequality, vs: &VertexSet) -> i64 {
    vs.vertices().iter().map(|v| evaluate_exact(ineq, &v.coords)).max().expect("vertex set is never empty")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacetReport {
    pub id: Option<u32>,
    pub declared_bound: i64,
    pub max_value: i64,
    /// No vertex exceeds the declared bound.
    pub valid: bool,
    pub tight_vertices: usize,
    pub tight_dimension: usize,
    pub polytope_dimension: usize,
    pub is_facet: bool,
}

/// Checks validity of `ineq` at its declared bound and whether its tight
/// vertices span a hyperplane of the polytope.
pub fn verify_facet(ineq: &Inequality, vs: &VertexSet) -> FacetReport {
    let values: Vec<i64> = vs.vertices().iter().map(|v| evaluate_exact(ineq, &v.coords)).collect();
    let max_value = *values.iter().max().expect("vertex set is never empty");
    let tight: Vec<Vec<i64>> = vs
        .vertices()
        .iter()
        .zip(&values)
        .filter(|(_, &val)| val == ineq.local_bound)
        .map(|(v, _)| v.coords.clone())
        .collect();
    let polytope_dimension = affine_dimension(&vs.coordinates());
    let tight_dimension = if tight.is_empty() { 0 } else { affine_dimension(&tight) };
    let valid = max_value <= ineq.local_bound;
    FacetReport {
        id: ineq.id,
        declared_bound: ineq.local_bound,
        max_value,
        valid,
        tight_vertices: tight.len(),
        tight_dimension,
        polytope_dimension,
        is_facet: valid && !tight.is_empty() && tight_dimension + 1 == polytope_dimension,
    }
}

/// [`verify_facet`] over many inequalities in parallel, in input order.
pub fn verify_facets(ineqs: &[Inequality], vs: &VertexSet) -> Vec<FacetReport> {
    ineqs.par_iter().map(|i| verify_facet(i, vs)).collect()
}

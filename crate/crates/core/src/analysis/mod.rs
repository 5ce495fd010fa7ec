//! Critical-w studies on the two state families, the exact CHSH threshold
//! and table-wide verification of local and quantum bounds.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::enumerate_vertices;
use crate::polytope::{local_bound, table_row, Inequality};
use crate::quantum::linalg::{from_real, kron, pauli_x, pauli_y, pauli_z};
use crate::quantum::{build_state, embed_state, BipartiteModel, DensityMatrix, StateFamily, StateFamilyPoint};
use crate::scenario::Scenario;
use crate::seesaw::{run_polynomial, run_seesaw, BellPolynomial, SeesawConfig};
use crate::{Error, Result};

/// A tested value counts as a violation only above `beta_L + VIOLATION_MARGIN`.
pub const VIOLATION_MARGIN: f64 = 1e-7;
/// Slack added to the printed precision when comparing quantum values.
pub const QUANTUM_SLACK: f64 = 5e-4;

/// Pauli correlation matrix `T_ij = Tr[rho s_i (x) s_j]`.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    if rho.dims() != (2, 2) {
        return Err(Error::Domain(format!("expected a two-qubit state, got dims {:?}", rho.dims())));
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            t[i][j] = rho.expectation(&kron(si, sj));
        }
    }
    Ok(t)
}

/// Sum of the two largest eigenvalues of `T^T T`; the largest CHSH value of
/// the state is `2 sqrt(M)`.
pub fn horodecki_m(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let mut tt = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            tt[i * 3 + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let e = crate::quantum::linalg::eigh(&from_real(3, 3, &tt));
    Ok(e.values[0] + e.values[1])
}

pub fn horodecki_chsh_max(rho: &DensityMatrix) -> Result<f64> {
    Ok(2.0 * horodecki_m(rho)?.sqrt())
}

/// Smallest `w` with `M > 1`, by bisection on `M(w) = 1` to `1e-12`.
/// Returns 1 when the family member at `w = 1` does not violate.
pub fn chsh_critical_w(family: StateFamily, alpha: f64) -> Result<f64> {
    let m = |w: f64| -> Result<f64> { horodecki_m(&build_state(StateFamilyPoint { family, alpha, w })?) };
    if m(1.0)? <= 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if m(mid)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `I3322` on a bipartite model with three observables per side (indices
/// start at zero).
pub fn evaluate_i3322(m: &BipartiteModel) -> f64 {
    let (a, b, c) = (|x| m.alice_mean(x), |y| m.bob_mean(y), |x, y| m.correlator(x, y));
    -a(0) - a(1) - b(0) - b(1) - c(0, 0) - c(1, 0) - c(2, 0) - c(0, 1) - c(1, 1) + c(2, 1) - c(0, 2) + c(1, 2)
}

/// Brute-force maximum of `I3322` over deterministic strategies.
pub fn i3322_local_bound() -> f64 {
    let sign = |mask: u32, k: u32| if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
    let mut best = f64::NEG_INFINITY;
    for ma in 0..8u32 {
        for mb in 0..8u32 {
            let a = |x| sign(ma, x);
            let b = |y| sign(mb, y);
            let c = |x, y| a(x) * b(y);
            let v = -a(0) - a(1) - b(0) - b(1) - c(0, 0) - c(1, 0) - c(2, 0) - c(0, 1) - c(1, 1) + c(2, 1) - c(0, 2)
                + c(1, 2);
            best = best.max(v);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepInequality {
    /// A row of the bundled table, on the four-cycle.
    Table(u32),
    Chsh,
    I3322,
}

impl SweepInequality {
    pub fn label(&self) -> String {
        match self {
            SweepInequality::Table(id) => id.to_string(),
            SweepInequality::Chsh => "chsh".into(),
            SweepInequality::I3322 => "i3322".into(),
        }
    }
}

impl FromStr for SweepInequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chsh" => Ok(SweepInequality::Chsh),
            "i3322" => Ok(SweepInequality::I3322),
            other => match other.trim_start_matches('#').parse::<u32>() {
                Ok(id) if table_row(id).is_some() => Ok(SweepInequality::Table(id)),
                _ => Err(Error::Domain(format!("unknown inequality {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SeesawUpperBound,
    HorodeckiExact,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::SeesawUpperBound => "seesaw-upper-bound",
            Method::HorodeckiExact => "horodecki-exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: StateFamily,
    /// Number of equally spaced values of alpha in `[1/2, 1]`.
    pub alpha_grid: usize,
    /// Explicit alpha values, replacing the grid when set.
    pub alphas: Option<Vec<f64>>,
    pub inequality: SweepInequality,
    pub w_start: f64,
    pub bisection_steps: usize,
    pub seesaw: SeesawConfig,
}

impl SweepSpec {
    pub fn new(family: StateFamily, inequality: SweepInequality) -> Self {
        SweepSpec {
            family,
            alpha_grid: 100,
            alphas: None,
            inequality,
            w_start: 0.75,
            bisection_steps: 8,
            seesaw: SeesawConfig::fixed_state(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid == 0 {
            return Err(Error::InvalidConfig("alpha_grid must be at least 1".into()));
        }
        if !(self.w_start > 0.0 && self.w_start < 1.0) {
            return Err(Error::InvalidConfig(format!("w_start = {} is outside (0, 1)", self.w_start)));
        }
        if self.bisection_steps == 0 {
            return Err(Error::InvalidConfig("bisection_steps must be at least 1".into()));
        }
        if let Some(a) = &self.alphas {
            if a.is_empty() || a.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidConfig("alpha values must lie in [0, 1]".into()));
            }
        }
        if self.seesaw.optimize_state {
            return Err(Error::InvalidConfig("sweeps run the seesaw on a fixed state".into()));
        }
        self.seesaw.validate()
    }

    pub fn alpha_values(&self) -> Vec<f64> {
        if let Some(a) = &self.alphas {
            return a.clone();
        }
        alpha_grid(self.alpha_grid)
    }
}

/// `n` equally spaced points of `[1/2, 1]` (just `1/2` when `n = 1`).
pub fn alpha_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5];
    }
    (0..n).map(|k| 0.5 + 0.5 * k as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub w_critical: f64,
    pub inequality: String,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    /// Tested `w` values and whether each was violated.
    pub trace: Vec<(f64, bool)>,
    /// Smallest violated `w`, or 1 when nothing was violated.
    pub w_critical: f64,
}

/// Fixed ladder: start at `w_start`; after step `i` (from 1) move down by
/// `2^-(i+2)` on a violation and up otherwise.
pub fn bisect(w_start: f64, steps: usize, mut violated: impl FnMut(f64) -> Result<bool>) -> Result<Bisection> {
    let mut w = w_start;
    let mut trace = Vec::with_capacity(steps);
    for i in 1..=steps {
        let v = violated(w)?;
        trace.push((w, v));
        let step = 2f64.powi(-(i as i32 + 2));
        w = if v { w - step } else { w + step };
    }
    let w_critical = trace.iter().filter(|(_, v)| *v).map(|(w, _)| *w).fold(1.0, f64::min);
    Ok(Bisection { trace, w_critical })
}

/// Seesaw value of the chosen inequality on a fixed family member, with an
/// early stop as soon as a violation is certain.
pub fn fixed_state_value(ineq: &SweepInequality, fp: StateFamilyPoint, cfg: &SeesawConfig) -> Result<(f64, f64)> {
    let rho = build_state(fp)?;
    match ineq {
        SweepInequality::Table(id) => {
            let row = table_row(*id).ok_or_else(|| Error::Domain(format!("no table row {id}")))?;
            let bound = row.local_bound() as f64;
            let cfg = SeesawConfig { stop_at: Some(bound + VIOLATION_MARGIN), ..cfg.clone() };
            Ok((run_seesaw(&row, Some(&embed_state(&rho)?), &cfg)?.best_value, bound))
        }
        SweepInequality::I3322 | SweepInequality::Chsh => {
            let poly = if *ineq == SweepInequality::Chsh { BellPolynomial::chsh() } else { BellPolynomial::i3322() };
            let bound = poly.local_bound();
            let cfg = SeesawConfig { stop_at: Some(bound + VIOLATION_MARGIN), ..cfg.clone() };
            Ok((run_polynomial(&poly, Some(&rho), &cfg)?.best_value, bound))
        }
    }
}

pub fn violates(ineq: &SweepInequality, fp: StateFamilyPoint, cfg: &SeesawConfig) -> Result<bool> {
    let (v, bound) = fixed_state_value(ineq, fp, cfg)?;
    Ok(v > bound + VIOLATION_MARGIN)
}

/// Critical `w` at one alpha.
pub fn critical_w(spec: &SweepSpec, alpha: f64) -> Result<SweepRow> {
    let (w_critical, method) = match spec.inequality {
        SweepInequality::Chsh => (chsh_critical_w(spec.family, alpha)?, Method::HorodeckiExact),
        ref ineq => {
            let b = bisect(spec.w_start, spec.bisection_steps, |w| {
                violates(ineq, StateFamilyPoint { family: spec.family, alpha, w }, &spec.seesaw)
            })?;
            (b.w_critical, Method::SeesawUpperBound)
        }
    };
    Ok(SweepRow { alpha, w_critical, inequality: spec.inequality.label(), method })
}

/// Rows sorted by alpha.
pub fn critical_w_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut alphas = spec.alpha_values();
    alphas.sort_by(f64::total_cmp);
    alphas.par_iter().map(|&a| critical_w(spec, a)).collect()
}

/// Positional decimal with 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "w_critical", "inequality", "method"])?;
    for r in rows {
        w.write_record([
            format_real(r.alpha),
            format_real(r.w_critical),
            r.inequality.clone(),
            r.method.name().into(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCheck {
    pub id: Option<u32>,
    pub local_bound_table: i64,
    pub local_bound_computed: i64,
    pub quantum_reference: Option<f64>,
    pub quantum_value: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl RowCheck {
    pub fn delta(&self) -> Option<f64> {
        Some(self.quantum_value? - self.quantum_reference?)
    }
}

/// Exact local bounds for every row; with a seesaw config, also the quantum
/// value against `beta_Q` within `5e-4` plus half a unit of the printed digit.
pub fn verify_table(rows: &[Inequality], quantum: Option<&SeesawConfig>) -> Result<Vec<RowCheck>> {
    let s = Scenario::square();
    let vs = enumerate_vertices(&s);
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if row.dimension() != s.dimension() {
            return Err(Error::DimensionMismatch { expected: s.dimension(), actual: row.dimension() });
        }
        let computed = local_bound(row, &vs);
        let mut check = RowCheck {
            id: row.id(),
            local_bound_table: row.local_bound(),
            local_bound_computed: computed,
            quantum_reference: row.quantum_bound().map(|q| q.value),
            quantum_value: None,
            tolerance: None,
            pass: computed == row.local_bound(),
        };
        if let Some(cfg) = quantum {
            let r = run_seesaw(row, None, cfg)?;
            check.quantum_value = Some(r.best_value);
            if let Some(q) = row.quantum_bound() {
                let tol = QUANTUM_SLACK + q.half_ulp();
                check.tolerance = Some(tol);
                check.pass &= (r.best_value - q.value).abs() <= tol;
            }
        }
        out.push(check);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{CMatrix, ONE, ZERO};
    use crate::quantum::DichotomicObservable;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn basis_projector(d: usize, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = ONE;
        m
    }

    #[test]
    fn horodecki_examples() {
        let prod = DensityMatrix::new(basis_projector(4, 0), (2, 2)).unwrap();
        assert!((horodecki_m(&prod).unwrap() - 1.0).abs() < 1e-14);
        let psi = build_state(StateFamilyPoint { family: StateFamily::Rho, alpha: 0.5, w: 1.0 }).unwrap();
        assert!((horodecki_m(&psi).unwrap() - 2.0).abs() < 1e-12);
        assert!((horodecki_chsh_max(&psi).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(horodecki_m(&DensityMatrix::maximally_mixed((2, 4))).is_err());
    }

    #[test]
    fn werner_correlation_matrix() {
        for w in [0.2, 0.6, 0.9] {
            let s = build_state(StateFamilyPoint { family: StateFamily::Sigma, alpha: 0.5, w }).unwrap();
            let t = correlation_matrix(&s).unwrap();
            let expected = [[w, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, -w]];
            for i in 0..3 {
                for j in 0..3 {
                    assert!((t[i][j] - expected[i][j]).abs() < 1e-14);
                }
            }
            assert!((horodecki_m(&s).unwrap() - 2.0 * w * w).abs() < 1e-13);
        }
    }

    #[test]
    fn chsh_thresholds() {
        let w = chsh_critical_w(StateFamily::Sigma, 0.5).unwrap();
        assert!((w - FRAC_1_SQRT_2).abs() < 1e-10);
        // T = diag(2sw, 2sw, 1 - 2w) for rho; at alpha = 0.8, 0.64 w^2 + (2w - 1)^2 = 1.
        let w = chsh_critical_w(StateFamily::Rho, 0.8).unwrap();
        assert!((w - 4.0 / 4.64).abs() < 1e-10);
        assert_eq!(chsh_critical_w(StateFamily::Rho, 1.0).unwrap(), 1.0);
        assert_eq!(chsh_critical_w(StateFamily::Sigma, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn violation_sets_are_upper_intervals() {
        // M itself dips below 1 on the rho family for small w, but never
        // exceeds 1 for w <= 1/2; only the violation indicator is monotone.
        for family in [StateFamily::Rho, StateFamily::Sigma] {
            for alpha in alpha_grid(11) {
                let ms: Vec<f64> = (0..=40)
                    .map(|k| {
                        let fp = StateFamilyPoint { family, alpha, w: k as f64 / 40.0 };
                        horodecki_m(&build_state(fp).unwrap()).unwrap()
                    })
                    .collect();
                let first = ms.iter().position(|&m| m > 1.0 + 1e-12).unwrap_or(ms.len());
                assert!(ms[first..].iter().all(|&m| m > 1.0), "{family:?} {alpha}");
                assert!(ms[first..].windows(2).all(|p| p[1] >= p[0] - 1e-12), "{family:?} {alpha}");
                if family == StateFamily::Sigma {
                    assert!(ms.windows(2).all(|p| p[1] >= p[0] - 1e-12), "{alpha}");
                }
            }
        }
    }

    #[test]
    fn i3322_basics() {
        assert_eq!(i3322_local_bound(), 4.0);
        assert_eq!(BellPolynomial::i3322().local_bound(), 4.0);
        let id = DichotomicObservable::identity(2);
        let m = BipartiteModel {
            state: DensityMatrix::maximally_mixed((2, 2)),
            alice: vec![id.clone(); 3],
            bob: vec![id; 3],
        };
        // Four marginals at -1 plus correlators summing to -4.
        assert_eq!(evaluate_i3322(&m), -8.0);
    }

    #[test]
    fn bisection_ladder() {
        let b = bisect(0.75, 1, |_| Ok(true)).unwrap();
        assert_eq!(b.trace, vec![(0.75, true)]);
        let b = bisect(0.75, 2, |_| Ok(true)).unwrap();
        assert_eq!(b.trace[1].0, 0.625);
        let b = bisect(0.75, 8, |w| Ok(w > 0.6)).unwrap();
        assert!(b.w_critical > 0.6 && b.w_critical - 0.6 < 2f64.powi(-9));
        assert_eq!(bisect(0.75, 8, |_| Ok(false)).unwrap().w_critical, 1.0);
    }

    #[test]
    fn grid_and_formatting() {
        let g = alpha_grid(100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[99], 1.0);
        assert_eq!(format_real(0.5), "0.50000000000000000");
        assert_eq!(format_real(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(format_real(0.0), "0");
        let x = 0.8620689655172414;
        assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn parse_inequalities() {
        assert_eq!("15".parse::<SweepInequality>().unwrap(), SweepInequality::Table(15));
        assert_eq!("CHSH".parse::<SweepInequality>().unwrap(), SweepInequality::Chsh);
        assert!("27".parse::<SweepInequality>().is_err());
        assert!("foo".parse::<SweepInequality>().is_err());
    }

    #[test]
    fn local_bound_check_only() {
        let rows = crate::polytope::bundled_table();
        let report = verify_table(&rows, None).unwrap();
        assert!(report.iter().all(|r| r.pass));
    }

    #[test]
    fn chsh_seesaw_matches_horodecki_on_a_bell_state() {
        let s = FRAC_1_SQRT_2;
        let v = [Complex64::new(s, 0.0), ZERO, ZERO, Complex64::new(s, 0.0)];
        let rho = DensityMatrix::pure(&v, (2, 2)).unwrap();
        let cfg = SeesawConfig { seeds: 4, ..SeesawConfig::fixed_state() };
        let r = run_polynomial(&BellPolynomial::chsh(), Some(&rho), &cfg).unwrap();
        assert!((r.best_value - horodecki_chsh_max(&rho).unwrap()).abs() < 1e-6);
    }
}

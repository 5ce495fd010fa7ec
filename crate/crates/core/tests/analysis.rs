mod common;

use bellext::analysis::{
    alpha_grid, critical_w, critical_w_sweep, horodecki_chsh_max, horodecki_m, i3322_local_bound, write_sweep_csv,
    SweepInequality, SweepSpec,
};
use bellext::quantum::{build_state, StateFamily, StateFamilyPoint};
use bellext::seesaw::{run_polynomial, seed_stream, BellPolynomial, SeesawConfig};

// 2 sqrt(M) is the optimum over traceless qubit observables. Trivial
// observables reach 2 on any state, so below the local bound the seesaw may
// land anywhere in [2 sqrt(M), 2].
#[test]
fn chsh_seesaw_agrees_with_horodecki_on_random_states() {
    let cfg = SeesawConfig { seeds: 16, master_seed: 3, ..SeesawConfig::fixed_state() };
    let poly = BellPolynomial::chsh();
    let mut rng = seed_stream(2024, 0);
    let mut violating = 0;
    for k in 0..50 {
        let rho = common::random_noisy_pure_state(&mut rng);
        let exact = horodecki_chsh_max(&rho).unwrap();
        violating += usize::from(exact > 2.0);
        let found = run_polynomial(&poly, Some(&rho), &cfg).unwrap().best_value;
        if exact >= 2.0 {
            assert!((found - exact).abs() < 1e-4, "state {k}: seesaw {found}, exact {exact}");
        } else {
            assert!(found > exact - 1e-4 && found < 2.0 + 1e-9, "state {k}: seesaw {found}, exact {exact}");
        }
    }
    assert!(violating >= 20, "only {violating} violating states sampled");
}

#[test]
fn sigma_m_is_monotone_in_w_on_the_grid() {
    let ws: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    for alpha in alpha_grid(100) {
        let m: Vec<f64> = ws
            .iter()
            .map(|&w| {
                horodecki_m(&build_state(StateFamilyPoint { family: StateFamily::Sigma, alpha, w }).unwrap()).unwrap()
            })
            .collect();
        assert!(m.windows(2).all(|p| p[1] >= p[0] - 1e-12), "alpha {alpha}");
    }
}

// For rho, M is not monotone at small w, but the violating set is an upper
// interval and M increases on it.
#[test]
fn rho_violation_set_is_an_upper_interval() {
    let ws: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
    for alpha in alpha_grid(100) {
        let m: Vec<f64> = ws
            .iter()
            .map(|&w| {
                horodecki_m(&build_state(StateFamilyPoint { family: StateFamily::Rho, alpha, w }).unwrap()).unwrap()
            })
            .collect();
        let first = m.iter().position(|&v| v > 1.0).unwrap_or(m.len());
        assert!(m[first..].iter().all(|&v| v > 1.0), "alpha {alpha}");
        assert!(m[first..].windows(2).all(|p| p[1] >= p[0] - 1e-12), "alpha {alpha}");
    }
}

#[test]
fn more_seeds_never_raise_the_critical_w() {
    let alphas: Vec<f64> = (1..=5).map(|k| 0.7 + 0.3 * k as f64 / 6.0).collect();
    for family in [StateFamily::Sigma, StateFamily::Rho] {
        let mut spec = SweepSpec::new(family, SweepInequality::Table(15));
        spec.seesaw.seeds = 8;
        spec.seesaw.max_sweeps = 300;
        let mut doubled = spec.clone();
        doubled.seesaw.seeds = 16;
        for &a in &alphas {
            let w1 = critical_w(&spec, a).unwrap().w_critical;
            let w2 = critical_w(&doubled, a).unwrap().w_critical;
            assert!(w2 <= w1, "{family:?} alpha {a}: {w1} -> {w2}");
        }
    }
}

#[test]
fn i3322_bound_is_four() {
    assert_eq!(i3322_local_bound(), 4.0);
    assert_eq!(BellPolynomial::i3322().local_bound(), 4.0);
}

#[test]
fn exact_chsh_sweep_csv() {
    let mut spec = SweepSpec::new(StateFamily::Rho, SweepInequality::Chsh);
    spec.alpha_grid = 5;
    let rows = critical_w_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|r| r[0].alpha < r[1].alpha));
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,w_critical,inequality,method"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.50000000000000000");
    assert_eq!(first[2], "chsh");
    assert_eq!(first[3], "horodecki-exact");
    // At alpha = 1/2, M = w^2 + max(w^2, (1 - 2w)^2), which crosses 1 at 1/sqrt(2).
    let w: f64 = first[1].parse().unwrap();
    assert!((w - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12, "{w}");
}

mod common;

use bellext::polytope::{evaluate, table_row};
use bellext::quantum::{embed_state, extract_behavior};
use bellext::scenario::Scenario;
use bellext::seesaw::{
    run_polynomial, run_seed, run_seesaw, seed_stream, BellPolynomial, SeesawConfig, MONOTONE_SLACK,
};

fn small(seeds: usize) -> SeesawConfig {
    SeesawConfig { seeds, max_sweeps: 300, ..SeesawConfig::default() }
}

#[test]
fn every_seed_is_monotone() {
    let cfg = small(8);
    for id in [2, 9, 15, 21, 26] {
        let poly = BellPolynomial::from_inequality(&table_row(id).unwrap(), &Scenario::square()).unwrap();
        for i in 0..cfg.seeds {
            let o = run_seed(&poly, None, &cfg, i);
            assert!(o.max_decrease <= MONOTONE_SLACK, "row {id} seed {i}: {}", o.max_decrease);
        }
    }

    let fixed = SeesawConfig { seeds: 8, max_sweeps: 300, ..SeesawConfig::fixed_state() };
    let mut rng = seed_stream(99, 0);
    let rho = common::random_state((2, 2), &mut rng);
    for poly in [BellPolynomial::chsh(), BellPolynomial::i3322()] {
        for i in 0..fixed.seeds {
            assert!(run_seed(&poly, Some(&rho), &fixed, i).max_decrease <= MONOTONE_SLACK);
        }
    }
    let embedded = embed_state(&common::random_state((2, 2), &mut rng)).unwrap();
    let poly = BellPolynomial::from_inequality(&table_row(15).unwrap(), &Scenario::square()).unwrap();
    for i in 0..fixed.seeds {
        assert!(run_seed(&poly, Some(&embedded), &fixed, i).max_decrease <= MONOTONE_SLACK);
    }
}

#[test]
fn best_model_reproduces_best_value() {
    let s = Scenario::square();
    for id in [3, 12, 15, 26] {
        let row = table_row(id).unwrap();
        let r = run_seesaw(&row, None, &small(8)).unwrap();
        assert!(r.is_monotone());
        let c = extract_behavior(&r.extended_model().unwrap(), &s).unwrap();
        let v = evaluate(&row, &c).unwrap();
        assert!((v - r.best_value).abs() < 1e-9, "row {id}: {v} vs {}", r.best_value);
        let qb = row.quantum_bound().unwrap();
        assert!(r.best_value <= qb.value + 5e-4 + qb.half_ulp(), "row {id}");
    }
}

#[test]
fn identical_seeds_are_bit_identical_across_thread_counts() {
    let row = table_row(15).unwrap();
    let cfg = SeesawConfig { master_seed: 1234, ..small(20) };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_seesaw(&row, None, &cfg))
    };
    let a = run(1).unwrap();
    let b = run(4).unwrap();
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    assert_eq!(a.best_seed, b.best_seed);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.seed_values), bits(&b.seed_values));
    assert_eq!(a.sweeps_used, b.sweeps_used);
    assert_eq!(a.state, b.state);

    let other = run_seesaw(&row, None, &SeesawConfig { master_seed: 1235, ..cfg }).unwrap();
    assert_ne!(bits(&a.seed_values), bits(&other.seed_values));
}

#[test]
fn seed_values_do_not_depend_on_seed_count() {
    let poly = BellPolynomial::i3322();
    let mut rng = seed_stream(5, 0);
    let rho = common::random_state((2, 2), &mut rng);
    let base = SeesawConfig { seeds: 10, max_sweeps: 200, master_seed: 7, ..SeesawConfig::fixed_state() };
    let few = run_polynomial(&poly, Some(&rho), &base).unwrap();
    let many = run_polynomial(&poly, Some(&rho), &SeesawConfig { seeds: 40, ..base }).unwrap();
    assert_eq!(few.seed_values[..], many.seed_values[..10]);
    assert!(many.best_value >= few.best_value);
}

mod common;

use bellext::behavior::{
    check_no_disturbance, check_no_signalling, correlators_to_probabilities, enumerate_vertices,
    probabilities_to_correlators, CorrelatorVector,
};
use bellext::quantum::{born_probabilities, born_probability, extract_behavior, DichotomicObservable, ExtendedModel};
use bellext::scenario::{Context, Scenario};
use bellext::seesaw::{random_projective, seed_stream};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn correlators_survive_probability_round_trip(v in prop::collection::vec(-1.0f64..=1.0, 26)) {
        let s = Scenario::square();
        let c = CorrelatorVector::new(&s, v).unwrap();
        let p = correlators_to_probabilities(&s, &c);
        let back = probabilities_to_correlators(&s, &p).unwrap();
        for (a, b) in c.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }
}

#[test]
fn vertex_tables_are_exactly_no_disturbing() {
    for n in 3..=6 {
        let s = Scenario::cycle(n).unwrap();
        let vs = enumerate_vertices(&s);
        for v in vs.vertices() {
            let p = correlators_to_probabilities(&s, &v.to_correlators());
            assert!(check_no_disturbance(&s, &p, 0.0).pass);
            assert!(check_no_signalling(&s, &p, 0.0).pass);
            for &q in p.values() {
                assert!([0.0, 0.125, 0.25, 0.5, 1.0].contains(&q), "{q}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // With the measurements of inputs 1 and 3 trivial, summing their outcome
    // out of each context leaves the plain bipartite Born rule.
    #[test]
    fn trivial_second_measurement_marginalizes_to_bipartite(seed in any::<u64>()) {
        let mut rng = seed_stream(seed, 0);
        let state = common::random_state((2, 4), &mut rng);
        let alice = vec![random_projective(2, &mut rng), random_projective(2, &mut rng)];
        let b0 = random_projective(4, &mut rng);
        let b2 = random_projective(4, &mut rng);
        let id = DichotomicObservable::identity(4);
        let bob = vec![b0, id.clone(), b2, id];
        let model = ExtendedModel::new(state.clone(), alice.clone(), bob.clone()).unwrap();

        let s = Scenario::square();
        let table = born_probabilities(&model, &s).unwrap();
        for (x, ax) in alice.iter().enumerate() {
            for (ci, &Context(y1, y2)) in s.contexts().iter().enumerate() {
                let (y, slot) = if y1 % 2 == 0 { (y1, 0) } else { (y2, 1) };
                for a in 0..2 {
                    for b in 0..2 {
                        let summed: f64 = (0..2)
                            .map(|o| if slot == 0 { table.get(x, ci, a, b, o) } else { table.get(x, ci, a, o, b) })
                            .sum();
                        let direct = born_probability(&state, &ax.projector(a), &bob[y].projector(b));
                        prop_assert!((summed - direct).abs() < 1e-12, "{summed} vs {direct}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_extended_models_give_valid_behaviors(seed in any::<u64>()) {
        let mut rng = seed_stream(seed, 1);
        let state = common::random_state((2, 4), &mut rng);
        let mut obs = |d| random_projective(d, &mut rng);
        let model = ExtendedModel::from_virtual_parties(
            state,
            [obs(2), obs(2)],
            [obs(2), obs(2)],
            [obs(2), obs(2)],
        )
        .unwrap();
        let s = Scenario::square();
        let c = extract_behavior(&model, &s).unwrap();
        prop_assert!(c.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        let p = correlators_to_probabilities(&s, &c);
        prop_assert!(p.values().iter().all(|&q| (-1e-9..=1.0 + 1e-9).contains(&q)));
        prop_assert!(check_no_disturbance(&s, &p, 1e-10).pass);
        prop_assert!(check_no_signalling(&s, &p, 1e-10).pass);

        let direct = born_probabilities(&model, &s).unwrap();
        for (a, b) in p.values().iter().zip(direct.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

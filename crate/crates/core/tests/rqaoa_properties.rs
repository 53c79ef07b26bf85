mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{colorings, random_instance};
use qudit_qaoa::rqaoa::{self, contract};
use qudit_qaoa::{generate_ensemble_graph, AutoOptimizer, EnsembleConfig, GridSearch, Hamiltonian64, IntHamiltonian};

#[test]
fn ensemble_runs_are_deterministic_and_beat_random() {
    for (n, d, seed) in [(12, 2, 1), (15, 3, 2), (18, 4, 3)] {
        let g = generate_ensemble_graph(&EnsembleConfig::new(n, d, seed)).unwrap();
        let h = Hamiltonian64::from_graph(&g, 3).unwrap();
        let a = rqaoa::run(&h, 6, &GridSearch::default()).unwrap();
        let b = rqaoa::run(&h, 6, &GridSearch::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.value >= g.num_edges() as f64 * 2.0 / 3.0);
        let exact = IntHamiltonian::from_graph(&g, 3).unwrap();
        assert_eq!(exact.classical_energy(&a.coloring).unwrap() as f64, a.value);
        for r in &a.trail {
            assert_eq!(
                a.coloring.get(r.survivor).unwrap(),
                (a.coloring.get(r.eliminated).unwrap() + r.shift) % 3
            );
        }
    }
}

#[test]
fn weighted_instances_are_self_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for k in [2, 3, 4] {
        let h = random_instance(8, k, &mut rng);
        let out = rqaoa::run(&h, 3, &AutoOptimizer::default()).unwrap();
        assert!((h.classical_energy(&out.coloring).unwrap() - out.value).abs() < 1e-12);
        assert!((out.value - out.residual_value).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_contraction_preserves_constrained_maximum(
        seed in any::<u64>(),
        n in 2usize..=6,
        pick in (0usize..6, 0usize..6, 0usize..3),
    ) {
        let (i, j, b) = (pick.0 % n, pick.1 % n, pick.2);
        prop_assume!(i != j);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_instance(n, 3, &mut rng);
        let h2 = contract(&h, i, j, b).unwrap();
        let xs = colorings(n, 3);
        let constrained = xs
            .iter()
            .filter(|x| x[j] == (x[i] + b) % 3)
            .map(|x| h.energy_of(x))
            .fold(f64::NEG_INFINITY, f64::max);
        let reduced = xs.iter().map(|x| h2.energy_of(x)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((constrained - reduced).abs() < 1e-9);
    }
}

mod common;

use rand::Rng;
use seqpatrol_core::{game_tree_oracle, solve_sequential, Game, Oracle, SolverLimits};

#[test]
fn sequential_solver_matches_game_tree() {
    common::with_big_stack(|| {
        let mut rng = common::rng(2024);
        let limits = SolverLimits::extended();
        let mut nonzero = 0;
        for case in 0..120 {
            let n = rng.gen_range(2..=7);
            let nt = rng.gen_range(1..=4usize.min(n));
            let k = rng.gen_range(1..=3);
            let inst = common::random_instance(&mut rng, n, nt, 1, 4, k);
            let game = Game::new(&inst);
            let oracle = game_tree_oracle(&game, k, &limits).unwrap();
            let seq = solve_sequential(&game, k, &limits).unwrap();
            assert_eq!(
                seq.value,
                oracle.value,
                "case {case}, k={k}:\n{}",
                inst.to_json()
            );
            nonzero += (oracle.value != 0.0) as usize;
        }
        // the sample must exercise losses, not only free games
        assert!(nonzero >= 30, "only {nonzero} instances with a loss");
    });
}

#[test]
fn weighted_edges_match_too() {
    common::with_big_stack(|| {
        let mut rng = common::rng(99);
        let limits = SolverLimits::extended();
        for case in 0..40 {
            let n = rng.gen_range(2..=5);
            let nt = rng.gen_range(1..=3usize.min(n));
            let k = rng.gen_range(1..=3);
            let inst = common::random_instance(&mut rng, n, nt, 2, 6, k);
            let game = Game::new(&inst);
            let oracle = game_tree_oracle(&game, k, &limits).unwrap();
            let seq = solve_sequential(&game, k, &limits).unwrap();
            assert_eq!(
                seq.value,
                oracle.value,
                "case {case}, k={k}:\n{}",
                inst.to_json()
            );
        }
    });
}

#[test]
fn twin_reduction_preserves_values() {
    common::with_big_stack(|| {
        let mut rng = common::rng(5);
        let limits = SolverLimits::extended();
        for case in 0..60 {
            let n = rng.gen_range(2..=6);
            let nt = rng.gen_range(1..=4usize.min(n));
            let k = rng.gen_range(1..=3);
            let inst = common::random_instance(&mut rng, n, nt, 2, 5, k);
            let game = Game::new(&inst);
            let mut plain = Oracle::new(&game, &limits).unwrap().without_symmetry();
            let mut reduced = Oracle::new(&game, &limits).unwrap();
            for v in 0..game.n() {
                assert_eq!(
                    plain.value_from(v, k).unwrap(),
                    reduced.value_from(v, k).unwrap(),
                    "case {case} from {}",
                    game.name(v)
                );
            }
        }
    });
}

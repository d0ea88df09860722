//! Solvers for zero-sum patrolling games on graphs with alarmed targets.
//!
//! A single patroller (the Defender) faces an Attacker with `k` resources
//! who may open attacks simultaneously or one after another. The crate
//! computes covering routes, equilibrium values for sequential attacks,
//! robustness of a wrong guess of `k`, and online policies that do not
//! know `k` at all.

pub mod covering;
pub mod error;
pub mod eval;
pub mod game;
pub mod limits;
pub mod model;
pub mod online;
pub mod oracle;
pub mod pathfinder;
pub mod play;
pub mod robustness;
pub mod sequential;
mod symmetry;

pub use covering::{
    best_static_placement_k1, sa_feasible, simultaneous_attack_value, solve_srg, CoveringRoute,
    DirectRoute,
};
pub use error::{ModelError, SolveError};
pub use game::Game;
pub use limits::SolverLimits;
pub use model::{
    all_pairs_shortest_paths, expand_to_unit_time, load_instance, normalize_values_topk,
    outcome_utility, AttackEvent, DistanceMatrix, GameOutcome, PatrolInstance, TargetIx, TargetSet,
    TargetSpec, VertexIx,
};
pub use online::{
    competitive_table, estimate_competitive_factor, gamma_r_closed_form, gen_lower_bound_instance,
    gen_randomized_worstcase_instance, simulate_online, Adversary, AttackStream, CompetitiveReport,
    OnlinePolicy, PolicyKind,
};
pub use oracle::{game_tree_oracle, Oracle, OracleAnswer};
pub use pathfinder::{attack_prediction, best_placement_k2, path_finder, EquilibriumAnswer};
pub use robustness::{
    gamma_prime_closed_form, gen_overestimation_instance, gen_underestimation_instance,
    value_with_guess, GuessAnalysis, OverFamily, UnderFamily,
};
pub use sequential::{path_finder_multi, solve_sequential, SequentialAnswer};

/// Absolute tolerance used when comparing utilities.
pub const EPS: f64 = 1e-9;

/// Budgets that keep the exponential solvers from running away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    /// Attack subsets enumerated by the simultaneous solver.
    pub max_subsets: u64,
    /// Vertices (after unit-time expansion) accepted by the k = 2 solver.
    pub max_vertices_k2: usize,
    /// Vertices (after expansion) accepted by the game-tree oracle.
    pub oracle_max_vertices: usize,
    /// Attacker resources accepted by the game-tree oracle.
    pub oracle_max_k: u32,
    /// Memoized states any single search may create.
    pub max_states: u64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_subsets: 1_000_000,
            max_vertices_k2: 500,
            oracle_max_vertices: 9,
            oracle_max_k: 3,
            max_states: 20_000_000,
        }
    }
}

impl SolverLimits {
    /// Limits large enough for the generated robustness and online families.
    pub fn extended() -> Self {
        SolverLimits {
            oracle_max_vertices: 64,
            oracle_max_k: 8,
            max_states: 60_000_000,
            ..SolverLimits::default()
        }
    }
}

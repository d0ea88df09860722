//! Equilibrium values for any number of sequential attacks.
//!
//! Between two Attacker decisions the patroller simply walks. Once a wave
//! of attacks is running, the walk is laid out on a matrix indexed by
//! vertex, turn and the subset of running attacks already caught; at every
//! cell the Attacker may launch a further wave, which starts a sub-problem
//! of the same shape with fewer resources. Cells keep the best worst case
//! over incoming walks. When every attack of the wave is resolved the game
//! is back to an idle state, solved by recursion over the next opening.

use rustc_hash::FxHashMap;

use crate::covering::{best_static_placement_k1, CoveringRoute};
use crate::error::SolveError;
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{TargetIx, TargetSet, VertexIx};
use crate::pathfinder::{best_placement_k2, EquilibriumAnswer};
use crate::play::{check_play_limits, State, Status};
use crate::EPS;

/// Value and placement of the sequential game.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialAnswer {
    pub value: f64,
    pub placement: VertexIx,
    /// Equilibrium response to the worst first wave, when one was computed.
    pub answer: Option<EquilibriumAnswer>,
}

#[derive(Clone)]
struct Cell {
    value: f64,
    path: Vec<VertexIx>,
}

struct Walk {
    value: f64,
    path: Vec<VertexIx>,
}

/// Memoized recursion over waves.
pub struct WaveSolver<'g> {
    game: &'g Game,
    max_states: u64,
    idle: FxHashMap<u128, f64>,
    phase: FxHashMap<u128, f64>,
}

impl<'g> WaveSolver<'g> {
    pub fn new(game: &'g Game, limits: &SolverLimits) -> Result<Self, SolveError> {
        check_play_limits(game, game.k())?;
        Ok(WaveSolver {
            game,
            max_states: limits.max_states,
            idle: FxHashMap::default(),
            phase: FxHashMap::default(),
        })
    }

    pub fn states(&self) -> usize {
        self.idle.len() + self.phase.len()
    }

    fn check_budget(&self) -> Result<(), SolveError> {
        let used = self.states() as u64;
        if used >= self.max_states {
            return Err(SolveError::budget(
                "sub-problems",
                used + 1,
                self.max_states,
            ));
        }
        Ok(())
    }

    /// Non-empty openings the Attacker can afford from `s`.
    fn openings(&self, s: &State) -> Vec<TargetSet> {
        let idle: Vec<TargetIx> = s.idle(self.game.target_count()).iter().collect();
        let r = s.remaining() as usize;
        let mut out = Vec::new();
        for mask in 1u32..1 << idle.len() {
            if mask.count_ones() as usize <= r {
                out.push(
                    (0..idle.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| idle[i])
                        .collect(),
                );
            }
        }
        out
    }

    fn open_all(&self, s: &State, wave: TargetSet) -> State {
        wave.iter().fold(*s, |acc, t| acc.open(self.game, t))
    }

    /// Value of an idle state (nothing running, Attacker to act).
    pub fn idle_value(&mut self, s: &State) -> Result<f64, SolveError> {
        debug_assert!(!s.has_active());
        let key = s.pack();
        if let Some(&v) = self.idle.get(&key) {
            return Ok(v);
        }
        let mut best = 0.0f64;
        for wave in self.openings(s) {
            best = best.min(self.after_opening(&self.open_all(s, wave))?);
        }
        self.check_budget()?;
        self.idle.insert(key, best);
        Ok(best)
    }

    fn after_opening(&mut self, s: &State) -> Result<f64, SolveError> {
        if s.has_active() {
            self.phase_value(s)
        } else {
            self.idle_value(s)
        }
    }

    /// Value of a state with running attacks where the Defender moves next.
    pub fn phase_value(&mut self, s: &State) -> Result<f64, SolveError> {
        let key = s.pack();
        if let Some(&v) = self.phase.get(&key) {
            return Ok(v);
        }
        let value = if s.remaining() == 0 {
            -s.settle_loss(self.game)
        } else {
            self.walk(s, false)?.value
        };
        self.check_budget()?;
        self.phase.insert(key, value);
        Ok(value)
    }

    /// Worst further wave at a cell, or `None` when the Attacker cannot act.
    fn prediction(&mut self, s: &State) -> Result<Option<f64>, SolveError> {
        if s.remaining() == 0 {
            return Ok(None);
        }
        let mut worst: Option<f64> = None;
        for wave in self.openings(s) {
            let v = self.after_opening(&self.open_all(s, wave))?;
            worst = Some(worst.map_or(v, |w: f64| w.min(v)));
        }
        Ok(worst)
    }

    /// Best walk from the phase state `s`.
    fn walk(&mut self, s: &State, track: bool) -> Result<Walk, SolveError> {
        let game = self.game;
        let nt = game.target_count();
        let wave: Vec<(TargetIx, u32)> = (0..nt)
            .filter_map(|t| match s.status(t) {
                Status::Active { elapsed } => Some((t, elapsed)),
                _ => None,
            })
            .collect();
        let horizon = wave
            .iter()
            .map(|&(t, e)| game.instance.deadline(t) - e)
            .max()
            .unwrap_or(0) as usize;

        // state at a cell: wave members caught in `caught` are idle again,
        // the others are running or lost depending on the turn
        let cell_state = |v: VertexIx, c: usize, caught: u32| -> (State, f64, bool) {
            let mut st = s.with_pos(v);
            let mut loss = 0.0;
            let mut resolved = true;
            for (i, &(t, e)) in wave.iter().enumerate() {
                let age = e + c as u32;
                if caught >> i & 1 == 1 {
                    st.set_code(t, 0);
                } else if age >= game.instance.deadline(t) {
                    st.set_lost(t);
                    loss += game.instance.value(t);
                } else {
                    st.set_active(t, age);
                    resolved = false;
                }
            }
            (st, loss, resolved)
        };

        let mut column: FxHashMap<(VertexIx, u32), Cell> = FxHashMap::default();
        column.insert(
            (s.pos(), 0),
            Cell {
                value: f64::INFINITY,
                path: if track { vec![s.pos()] } else { Vec::new() },
            },
        );
        let mut best: Option<Walk> = None;
        let consider = |value: f64, path: &[VertexIx], best: &mut Option<Walk>| {
            let better = match best {
                None => true,
                Some(b) => {
                    value > b.value + EPS
                        || (track
                            && value >= b.value - EPS
                            && (path.len(), path) < (b.path.len(), &b.path[..]))
                }
            };
            if better {
                *best = Some(Walk {
                    value,
                    path: path.to_vec(),
                });
            }
        };

        for c in 0..horizon {
            let mut next: FxHashMap<(VertexIx, u32), Cell> = FxHashMap::default();
            let mut keys: Vec<(VertexIx, u32)> = column.keys().copied().collect();
            keys.sort_unstable();
            for key in keys {
                let (v, caught) = key;
                let cell = column[&key].clone();
                for m in game.moves(v) {
                    let mut now = caught;
                    for (i, &(t, e)) in wave.iter().enumerate() {
                        let running =
                            caught >> i & 1 == 0 && e + (c as u32) < game.instance.deadline(t);
                        if running && game.target_vertex(t) == m {
                            now |= 1 << i;
                        }
                    }
                    let (st, loss, resolved) = cell_state(m, c + 1, now);
                    let mut path = Vec::new();
                    if track {
                        path = cell.path.clone();
                        path.push(m);
                    }
                    if resolved {
                        let terminal = self.idle_value(&st)? - loss;
                        consider(cell.value.min(terminal), &path, &mut best);
                        continue;
                    }
                    let value = match self.prediction(&st)? {
                        Some(p) => cell.value.min(p - loss),
                        None => cell.value,
                    };
                    let entry = next.entry((m, now));
                    match entry {
                        std::collections::hash_map::Entry::Vacant(slot) => {
                            slot.insert(Cell { value, path });
                        }
                        std::collections::hash_map::Entry::Occupied(mut slot) => {
                            let old = slot.get();
                            let better = value > old.value + EPS
                                || (track && value >= old.value - EPS && path < old.path);
                            if better {
                                slot.insert(Cell { value, path });
                            }
                        }
                    }
                }
            }
            column = next;
            if column.is_empty() {
                break;
            }
        }
        Ok(best.unwrap_or(Walk {
            value: -s.settle_loss(game),
            path: vec![s.pos()],
        }))
    }
}

/// Equilibrium response after the Attacker opened `first_wave` against a
/// patroller on `start`, with `k` resources in total.
pub fn path_finder_multi(
    game: &Game,
    start: VertexIx,
    first_wave: TargetSet,
    k: u32,
    limits: &SolverLimits,
) -> Result<EquilibriumAnswer, SolveError> {
    if first_wave.is_empty() || first_wave.len() > k as usize {
        return Err(SolveError::Parameter(format!(
            "first wave of {} targets does not fit {k} resources",
            first_wave.len()
        )));
    }
    let game = &game.with_k(k);
    let mut solver = WaveSolver::new(game, limits)?;
    let s = solver.open_all(&State::initial(start, k), first_wave);
    if !s.has_active() {
        let value = solver.idle_value(&s)?;
        return Ok(EquilibriumAnswer {
            placement: start,
            first_target: first_wave.iter().next(),
            path: vec![start],
            concedes: false,
            contingency: None,
            value,
        });
    }
    let walk = if s.remaining() == 0 {
        Walk {
            value: -s.settle_loss(game),
            path: s.settle_route(game).route.expand(game),
        }
    } else {
        solver.walk(&s, true)?
    };
    // a further wave launched at once, before the first move
    let value = match solver.prediction(&s)? {
        Some(p) => walk.value.min(p),
        None => walk.value,
    };
    let contingency: Option<CoveringRoute> = if s.remaining() == 0 {
        Some(s.settle_route(game))
    } else {
        None
    };
    let concedes = walk
        .path
        .last()
        .is_some_and(|&end| first_wave.iter().all(|t| game.target_vertex(t) != end));
    Ok(EquilibriumAnswer {
        placement: start,
        first_target: first_wave.iter().next(),
        path: walk.path,
        concedes,
        contingency,
        value,
    })
}

/// Value of the sequential game from a fixed placement by wave recursion.
pub fn wave_value(
    game: &Game,
    start: VertexIx,
    k: u32,
    limits: &SolverLimits,
) -> Result<f64, SolveError> {
    let game = &game.with_k(k);
    let mut solver = WaveSolver::new(game, limits)?;
    solver.idle_value(&State::initial(start, k))
}

/// Sequential game value, maximized over placements.
pub fn solve_sequential(
    game: &Game,
    k: u32,
    limits: &SolverLimits,
) -> Result<SequentialAnswer, SolveError> {
    match k {
        0 => Err(SolveError::Parameter("k must be at least 1".into())),
        1 => {
            let (placement, value) = best_static_placement_k1(game);
            Ok(SequentialAnswer {
                value,
                placement,
                answer: None,
            })
        }
        2 => {
            let ans = best_placement_k2(game, limits)?;
            Ok(SequentialAnswer {
                value: ans.best.value,
                placement: ans.best.placement,
                answer: Some(ans.best),
            })
        }
        _ => {
            let g = game.with_k(k);
            let mut solver = WaveSolver::new(&g, limits)?;
            let mut best: Option<(VertexIx, f64)> = None;
            for v in g.instance.placements() {
                let value = solver.idle_value(&State::initial(v, k))?;
                if best.is_none_or(|(_, b)| value > b + EPS) {
                    best = Some((v, value));
                }
            }
            let (placement, value) = best.expect("at least one placement");
            Ok(SequentialAnswer {
                value,
                placement,
                answer: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance;
    use crate::pathfinder::path_finder;

    fn fig2(extra: bool) -> Game {
        let doc = if extra {
            r#"{"vertices":["t1","n3","n1","n4","t2","n5","t3"],
"edges":[["t1","n3",1],["n3","n1",1],["n1","n4",1],["n4","t2",1],["n1","n5",1],["n5","t3",1]],
"targets":[{"vertex":"t1","value":1.0,"deadline":4},{"vertex":"t2","value":1.0,"deadline":4},{"vertex":"t3","value":1.0,"deadline":4}],"k":3}"#
        } else {
            r#"{"vertices":["t1","n3","n1","n4","t2"],
"edges":[["t1","n3",1],["n3","n1",1],["n1","n4",1],["n4","t2",1]],
"targets":[{"vertex":"t1","value":1.0,"deadline":4},{"vertex":"t2","value":1.0,"deadline":4}],"k":2}"#
        };
        Game::new(&load_instance(doc).unwrap())
    }

    #[test]
    fn wave_recursion_matches_fig2() {
        let g = fig2(false);
        let limits = SolverLimits::default();
        for v in 0..g.n() {
            assert_eq!(wave_value(&g, v, 2, &limits).unwrap(), -1.0);
            assert_eq!(wave_value(&g, v, 1, &limits).unwrap(), 0.0);
        }
    }

    #[test]
    fn multi_collapses_to_pathfinder() {
        let g = fig2(false);
        let limits = SolverLimits::default();
        for v in 0..g.n() {
            for t in 0..g.target_count() {
                let a = path_finder(&g, v, t);
                let b = path_finder_multi(&g, v, TargetSet::singleton(t), 2, &limits).unwrap();
                assert_eq!(a.value, b.value, "start {v} first {t}");
            }
        }
    }

    #[test]
    fn three_targets_three_resources() {
        let g = fig2(true);
        let limits = SolverLimits::default();
        let seq = solve_sequential(&g, 3, &limits).unwrap();
        let oracle = crate::oracle::game_tree_oracle(&g, 3, &limits).unwrap();
        assert!((seq.value - oracle.value).abs() < EPS);
    }

    #[test]
    fn uncoverable_wave() {
        // the wave is already hopeless; the last resource then hits the
        // best single target
        let g = Game::new(
            &load_instance(
                r#"{"vertices":["a","b","c","d"],"edges":[["a","b",1],["b","c",1],["c","d",1]],
"targets":[{"vertex":"a","value":1.0,"deadline":1},{"vertex":"d","value":0.5,"deadline":1}],"k":2}"#,
            )
            .unwrap(),
        );
        let limits = SolverLimits::default();
        let c = g.vertex("c").unwrap();
        let a = g.target("a").unwrap();
        let ans = path_finder_multi(&g, c, TargetSet::singleton(a), 2, &limits).unwrap();
        assert_eq!(ans.value, -1.0);
    }
}

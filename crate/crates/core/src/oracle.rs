//! Exact game values by backward induction over the full game tree.
//!
//! The Attacker's choice of a subset of targets to open is split into
//! single openings followed by a stop, all memoized, so a turn with `m`
//! idle targets costs `O(2^m)` states instead of `O(2^m)` branches per
//! state. With no attack running, waiting would repeat the state, so the
//! Attacker either opens something or the game ends.

use rustc_hash::FxHashMap;

use crate::error::SolveError;
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{TargetIx, VertexIx};
use crate::play::{check_play_limits, State, TurnRecord};
use crate::EPS;

/// Memoized minimax values of one game.
pub struct Oracle<'g> {
    game: &'g Game,
    max_states: u64,
    symmetry: bool,
    attacker: FxHashMap<u128, f64>,
    defender: FxHashMap<u128, f64>,
}

impl<'g> Oracle<'g> {
    pub fn new(game: &'g Game, limits: &SolverLimits) -> Result<Self, SolveError> {
        check_play_limits(game, game.k())?;
        Ok(Oracle {
            game,
            max_states: limits.max_states,
            symmetry: true,
            attacker: FxHashMap::default(),
            defender: FxHashMap::default(),
        })
    }

    /// Disables the twin-target reduction (used to cross-check it).
    pub fn without_symmetry(mut self) -> Self {
        self.symmetry = false;
        self
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    /// Memoized states so far.
    pub fn states(&self) -> usize {
        self.attacker.len() + self.defender.len()
    }

    fn key(&self, s: &State) -> u128 {
        if self.symmetry {
            self.game.symmetry.canonical(s).pack()
        } else {
            s.pack()
        }
    }

    fn check_budget(&self) -> Result<(), SolveError> {
        let used = self.states() as u64;
        if used >= self.max_states {
            return Err(SolveError::budget(
                "oracle states",
                used + 1,
                self.max_states,
            ));
        }
        Ok(())
    }

    /// Future loss (as a non-positive utility) when the Attacker is to act.
    pub fn attacker_value(&mut self, s: &State) -> Result<f64, SolveError> {
        let key = self.key(s);
        if let Some(&v) = self.attacker.get(&key) {
            return Ok(v);
        }
        let mut best = if s.has_active() {
            self.defender_value(s)?
        } else {
            0.0
        };
        if s.remaining > 0 {
            let nt = self.game.target_count();
            for t in s.idle(nt).iter() {
                let next = s.open(self.game, t);
                best = best.min(self.attacker_value(&next)?);
            }
        }
        self.check_budget()?;
        self.attacker.insert(key, best);
        Ok(best)
    }

    /// Value after the Attacker stopped opening and the Defender is to move.
    pub fn defender_value(&mut self, s: &State) -> Result<f64, SolveError> {
        let key = self.key(s);
        if let Some(&v) = self.defender.get(&key) {
            return Ok(v);
        }
        let mut best = f64::NEG_INFINITY;
        let game = self.game;
        for m in game.moves(s.pos()) {
            let (next, adv) = s.advance(game, m);
            let value = self.attacker_value(&next)? - adv.loss;
            best = best.max(value);
        }
        self.check_budget()?;
        self.defender.insert(key, best);
        Ok(best)
    }

    /// Value of the game started with the patroller on `v`.
    pub fn value_from(&mut self, v: VertexIx, k: u32) -> Result<f64, SolveError> {
        self.attacker_value(&State::initial(v, k))
    }

    /// Best Defender move: stay first, then neighbours in identifier order.
    pub fn best_move(&mut self, s: &State) -> Result<(VertexIx, f64), SolveError> {
        let mut best: Option<(VertexIx, f64)> = None;
        let game = self.game;
        for m in game.moves(s.pos()) {
            let (next, adv) = s.advance(game, m);
            let value = self.attacker_value(&next)? - adv.loss;
            if best.is_none_or(|(_, b)| value > b + EPS) {
                best = Some((m, value));
            }
        }
        Ok(best.expect("staying is always possible"))
    }

    /// Best Attacker phase: the targets to open (empty for none).
    pub fn best_opening(&mut self, s: &State) -> Result<(Vec<TargetIx>, f64), SolveError> {
        let target = self.attacker_value(s)?;
        let mut at = *s;
        let mut opened = Vec::new();
        let nt = self.game.target_count();
        loop {
            let stop = if at.has_active() {
                self.defender_value(&at)?
            } else {
                0.0
            };
            if stop <= target + EPS {
                return Ok((opened, target));
            }
            let mut next = None;
            for t in at.idle(nt).iter() {
                if at.remaining == 0 {
                    break;
                }
                let cand = at.open(self.game, t);
                if self.attacker_value(&cand)? <= target + EPS {
                    next = Some((t, cand));
                    break;
                }
            }
            let (t, cand) = next.expect("minimizing opening exists");
            opened.push(t);
            at = cand;
        }
    }

    /// Equilibrium play from `start` against `k` resources.
    pub fn principal_variation(
        &mut self,
        start: VertexIx,
        k: u32,
    ) -> Result<Vec<TurnRecord>, SolveError> {
        let game = self.game;
        let mut s = State::initial(start, k);
        let mut trace = Vec::new();
        for turn in 0.. {
            let (opened, _) = self.best_opening(&s)?;
            for &t in &opened {
                s = s.open(game, t);
            }
            if !s.has_active() {
                break;
            }
            let (m, _) = self.best_move(&s)?;
            let (next, adv) = s.advance(game, m);
            trace.push(TurnRecord {
                turn,
                opened,
                from: s.pos(),
                to: m,
                caught: adv.caught,
                lost: adv.lost,
            });
            s = next;
        }
        Ok(trace)
    }
}

/// Result of the game-tree oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAnswer {
    pub value: f64,
    pub placement: VertexIx,
    pub per_placement: Vec<(VertexIx, f64)>,
    pub trace: Vec<TurnRecord>,
    pub states: usize,
}

/// Exact value of the sequential game with `k` resources, maximized over
/// placements (the fixed start when the instance names one).
pub fn game_tree_oracle(
    game: &Game,
    k: u32,
    limits: &SolverLimits,
) -> Result<OracleAnswer, SolveError> {
    if k < 1 {
        return Err(SolveError::Parameter("k must be at least 1".into()));
    }
    if game.n() > limits.oracle_max_vertices {
        return Err(SolveError::budget(
            "oracle vertices",
            game.n() as u64,
            limits.oracle_max_vertices as u64,
        ));
    }
    if k > limits.oracle_max_k {
        return Err(SolveError::budget(
            "oracle resources",
            k as u64,
            limits.oracle_max_k as u64,
        ));
    }
    check_play_limits(game, k)?;
    let mut oracle = Oracle::new(game, limits)?;
    let mut per_placement = Vec::new();
    let mut best: Option<(VertexIx, f64)> = None;
    for v in game.instance.placements() {
        let value = oracle.value_from(v, k)?;
        per_placement.push((v, value));
        if best.is_none_or(|(_, b)| value > b + EPS) {
            best = Some((v, value));
        }
    }
    let (placement, value) = best.expect("at least one placement");
    let trace = oracle.principal_variation(placement, k)?;
    Ok(OracleAnswer {
        value,
        placement,
        per_placement,
        trace,
        states: oracle.states(),
    })
}

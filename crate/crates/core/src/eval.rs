//! Worst case of a fixed Defender policy against an adaptive Attacker.
//!
//! The Attacker sees every move and minimizes the Defender's expected
//! utility; randomized policies are integrated exactly. Unlike the oracle,
//! the Attacker may also wait while nothing is running, since a fixed
//! policy can wander into a bad spot. Waiting is only offered when it
//! changes the state.

use std::collections::hash_map::Entry;
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::covering::solve_srg;
use crate::error::SolveError;
use crate::game::Game;
use crate::model::{TargetIx, VertexIx};
use crate::play::State;

/// One possible Defender move, with the policy's memory afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<M> {
    pub probability: f64,
    pub to: VertexIx,
    pub memory: M,
}

/// A Defender strategy that may remember what it has seen.
pub trait DefenderPolicy {
    type Memory: Clone + Eq + Hash + Debug;

    fn initial_memory(&self) -> Self::Memory;

    /// Moves for the Defender phase of `state`; probabilities sum to 1.
    /// Attacks opened this turn show up as running with zero elapsed turns.
    fn decide(
        &mut self,
        game: &Game,
        state: &State,
        memory: &Self::Memory,
    ) -> Result<Vec<Decision<Self::Memory>>, SolveError>;
}

#[derive(Clone, Copy)]
enum Slot {
    Busy,
    Done(f64),
}

/// Memoized expectimin search against one policy.
pub struct PolicyEvaluator<'g, P: DefenderPolicy> {
    game: &'g Game,
    pub policy: P,
    max_states: u64,
    attacker: FxHashMap<(u128, P::Memory), Slot>,
    defender: FxHashMap<(u128, P::Memory), f64>,
}

impl<'g, P: DefenderPolicy> PolicyEvaluator<'g, P> {
    pub fn new(game: &'g Game, policy: P, max_states: u64) -> Self {
        PolicyEvaluator {
            game,
            policy,
            max_states,
            attacker: FxHashMap::default(),
            defender: FxHashMap::default(),
        }
    }

    pub fn states(&self) -> usize {
        self.attacker.len() + self.defender.len()
    }

    fn check_budget(&self) -> Result<(), SolveError> {
        let used = self.states() as u64;
        if used >= self.max_states {
            return Err(SolveError::budget(
                "policy states",
                used + 1,
                self.max_states,
            ));
        }
        Ok(())
    }

    /// Value of the game from `start` against `k` resources.
    pub fn value_from(&mut self, start: VertexIx, k: u32) -> Result<f64, SolveError> {
        let memory = self.policy.initial_memory();
        self.attacker_value(&State::initial(start, k), &memory)
    }

    /// Expected future utility with the Attacker to act.
    pub fn attacker_value(&mut self, s: &State, memory: &P::Memory) -> Result<f64, SolveError> {
        let key = (s.pack(), memory.clone());
        match self.attacker.get(&key) {
            Some(Slot::Done(v)) => return Ok(*v),
            // a cycle of waits: nothing ever happens again
            Some(Slot::Busy) => return Ok(0.0),
            None => {}
        }
        self.attacker.insert(key.clone(), Slot::Busy);
        let mut best = if s.has_active() {
            self.defender_value(s, memory)?
        } else {
            let mut v = 0.0f64;
            if s.remaining > 0 && self.wait_changes_state(s, memory)? {
                v = v.min(self.defender_value(s, memory)?);
            }
            v
        };
        if s.remaining > 0 {
            for t in s.idle(self.game.target_count()).iter() {
                let next = s.open(self.game, t);
                best = best.min(self.attacker_value(&next, memory)?);
            }
        }
        self.check_budget()?;
        self.attacker.insert(key, Slot::Done(best));
        Ok(best)
    }

    fn wait_changes_state(&mut self, s: &State, memory: &P::Memory) -> Result<bool, SolveError> {
        let decisions = self.policy.decide(self.game, s, memory)?;
        Ok(decisions
            .iter()
            .any(|d| d.to != s.pos() || &d.memory != memory))
    }

    /// Expected utility when the Defender is to move.
    pub fn defender_value(&mut self, s: &State, memory: &P::Memory) -> Result<f64, SolveError> {
        let key = (s.pack(), memory.clone());
        if let Entry::Occupied(e) = self.defender.entry(key.clone()) {
            return Ok(*e.get());
        }
        let decisions = self.policy.decide(self.game, s, memory)?;
        let mut total = 0.0;
        for d in decisions {
            if d.probability == 0.0 {
                continue;
            }
            let (next, adv) = s.advance(self.game, d.to);
            total += d.probability * (self.attacker_value(&next, &d.memory)? - adv.loss);
        }
        self.check_budget()?;
        self.defender.insert(key, total);
        Ok(total)
    }
}

/// Waypoints of the best covering route over every running attack.
pub fn plan_for(game: &Game, s: &State, only: impl Fn(TargetIx) -> bool) -> Vec<TargetIx> {
    let attacked: Vec<(TargetIx, u32)> = s
        .residuals(game)
        .into_iter()
        .filter(|&(t, _)| only(t))
        .collect();
    if attacked.is_empty() {
        return Vec::new();
    }
    let route = solve_srg(game, s.pos(), &attacked);
    let mut plan: Vec<TargetIx> = Vec::new();
    // a target on the start vertex is covered without being a waypoint
    if let Some(t) = game.instance.target_at(s.pos()) {
        if route.covered.contains(t) {
            plan.push(t);
        }
    }
    plan.extend(
        route.route.waypoints[1..]
            .iter()
            .map(|&v| game.instance.target_at(v).expect("waypoints are targets")),
    );
    plan
}

/// Drops planned targets that are no longer running.
pub fn prune_plan(game: &Game, s: &State, plan: &[TargetIx]) -> Vec<TargetIx> {
    let running = s.active(game.target_count());
    plan.iter()
        .copied()
        .filter(|&t| running.contains(t))
        .collect()
}

/// Next vertex towards the first planned target, or towards `rest`.
pub fn step_along(game: &Game, s: &State, plan: &[TargetIx], rest: VertexIx) -> VertexIx {
    let goal = plan.first().map_or(rest, |&t| game.target_vertex(t));
    game.dist.next_hop(s.pos(), goal)
}

/// Follows a fixed walk after the first attack; any later alarm makes it
/// switch to the best covering route over everything running, which it
/// then keeps until done.
#[derive(Debug, Clone)]
pub struct FixedPathPolicy {
    pub path: Vec<VertexIx>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathMemory {
    Following(usize),
    Plan(Vec<TargetIx>),
}

impl DefenderPolicy for FixedPathPolicy {
    type Memory = PathMemory;

    fn initial_memory(&self) -> PathMemory {
        PathMemory::Following(0)
    }

    fn decide(
        &mut self,
        game: &Game,
        s: &State,
        memory: &PathMemory,
    ) -> Result<Vec<Decision<PathMemory>>, SolveError> {
        let nt = game.target_count();
        let fresh = !s.fresh(nt).is_empty();
        let plan = match memory {
            PathMemory::Following(i) if !(fresh && *i > 0) => {
                let i = *i;
                if i + 1 < self.path.len() {
                    return Ok(vec![Decision {
                        probability: 1.0,
                        to: self.path[i + 1],
                        memory: PathMemory::Following(i + 1),
                    }]);
                }
                plan_for(game, s, |_| true)
            }
            PathMemory::Following(_) => plan_for(game, s, |_| true),
            PathMemory::Plan(p) => {
                let p = prune_plan(game, s, p);
                if p.is_empty() {
                    plan_for(game, s, |_| true)
                } else {
                    p
                }
            }
        };
        let to = step_along(game, s, &plan, s.pos());
        Ok(vec![Decision {
            probability: 1.0,
            to,
            memory: PathMemory::Plan(plan),
        }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance;

    struct Stay;

    impl DefenderPolicy for Stay {
        type Memory = ();
        fn initial_memory(&self) {}
        fn decide(&mut self, _: &Game, s: &State, _: &()) -> Result<Vec<Decision<()>>, SolveError> {
            Ok(vec![Decision {
                probability: 1.0,
                to: s.pos(),
                memory: (),
            }])
        }
    }

    #[test]
    fn standing_still_loses_far_targets() {
        let g = Game::new(
            &load_instance(
                r#"{"vertices":["a","b","c"],"edges":[["a","b",1],["b","c",1]],
"targets":[{"vertex":"a","value":0.5,"deadline":1},{"vertex":"c","value":1.0,"deadline":1}],"k":2}"#,
            )
            .unwrap(),
        );
        let mut e = PolicyEvaluator::new(&g, Stay, 1_000_000);
        assert_eq!(e.value_from(g.vertex("b").unwrap(), 2).unwrap(), -1.5);
        assert_eq!(e.value_from(g.vertex("a").unwrap(), 2).unwrap(), -1.0);
    }
}

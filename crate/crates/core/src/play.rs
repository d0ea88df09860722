//! Turn mechanics shared by the oracle, policy evaluation and simulation.
//!
//! A turn runs as follows. The Attacker opens any number of idle targets
//! (each costs one resource; opening the target the patroller stands on is
//! caught at once). The Defender then moves to a neighbour or stays. Every
//! running attack ages by one turn, an attack on the vertex the patroller
//! now occupies is caught, and attacks whose age reached the deadline are
//! lost for good.

use crate::covering::{solve_srg, srg_loss, CoveringRoute};
use crate::error::SolveError;
use crate::game::Game;
use crate::model::{TargetIx, TargetSet, VertexIx};

/// Targets a play state can track.
pub const MAX_PLAY_TARGETS: usize = 16;
/// Longest deadline a play state can track.
pub const MAX_PLAY_DEADLINE: u32 = 125;
/// Vertices a play state can address.
pub const MAX_PLAY_VERTICES: usize = 1024;
/// Attacker resources a play state can count.
pub const MAX_PLAY_RESOURCES: u32 = 63;

const IDLE: u8 = 0;
const LOST: u8 = 1;
const ACTIVE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Idle,
    Lost,
    Active { elapsed: u32 },
}

/// Position, remaining resources and the status of every target.
///
/// An active attack with `elapsed == 0` was opened during the current
/// Attacker phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct State {
    pub pos: u16,
    pub remaining: u8,
    codes: [u8; MAX_PLAY_TARGETS],
}

/// What happened when the Defender moved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Advance {
    pub caught: TargetSet,
    pub lost: TargetSet,
    pub loss: f64,
}

/// Fails when the game is too large for the packed state.
pub fn check_play_limits(game: &Game, k: u32) -> Result<(), SolveError> {
    let nt = game.target_count();
    if nt > MAX_PLAY_TARGETS {
        return Err(SolveError::budget(
            "targets",
            nt as u64,
            MAX_PLAY_TARGETS as u64,
        ));
    }
    if game.n() > MAX_PLAY_VERTICES {
        return Err(SolveError::budget(
            "vertices",
            game.n() as u64,
            MAX_PLAY_VERTICES as u64,
        ));
    }
    if k > MAX_PLAY_RESOURCES {
        return Err(SolveError::budget(
            "attacker resources",
            k as u64,
            MAX_PLAY_RESOURCES as u64,
        ));
    }
    if let Some(d) = (0..nt)
        .map(|t| game.instance.deadline(t))
        .find(|&d| d > MAX_PLAY_DEADLINE)
    {
        return Err(SolveError::budget(
            "deadline",
            d as u64,
            MAX_PLAY_DEADLINE as u64,
        ));
    }
    Ok(())
}

impl State {
    pub fn initial(pos: VertexIx, k: u32) -> Self {
        State {
            pos: pos as u16,
            remaining: k as u8,
            codes: [IDLE; MAX_PLAY_TARGETS],
        }
    }

    pub fn pos(&self) -> VertexIx {
        self.pos as VertexIx
    }

    pub fn remaining(&self) -> u32 {
        self.remaining as u32
    }

    pub fn with_remaining(mut self, r: u32) -> Self {
        self.remaining = r as u8;
        self
    }

    pub fn with_pos(mut self, v: VertexIx) -> Self {
        self.pos = v as u16;
        self
    }

    pub fn status(&self, t: TargetIx) -> Status {
        match self.codes[t] {
            IDLE => Status::Idle,
            LOST => Status::Lost,
            c => Status::Active {
                elapsed: (c - ACTIVE) as u32,
            },
        }
    }

    pub fn code(&self, t: TargetIx) -> u8 {
        self.codes[t]
    }

    pub fn set_code(&mut self, t: TargetIx, code: u8) {
        self.codes[t] = code;
    }

    pub fn set_active(&mut self, t: TargetIx, elapsed: u32) {
        self.codes[t] = ACTIVE + elapsed as u8;
    }

    pub fn set_lost(&mut self, t: TargetIx) {
        self.codes[t] = LOST;
    }

    fn select(&self, nt: usize, pred: impl Fn(u8) -> bool) -> TargetSet {
        (0..nt).filter(|&t| pred(self.codes[t])).collect()
    }

    pub fn active(&self, nt: usize) -> TargetSet {
        self.select(nt, |c| c >= ACTIVE)
    }

    /// Attacks opened during the current Attacker phase.
    pub fn fresh(&self, nt: usize) -> TargetSet {
        self.select(nt, |c| c == ACTIVE)
    }

    pub fn lost(&self, nt: usize) -> TargetSet {
        self.select(nt, |c| c == LOST)
    }

    pub fn idle(&self, nt: usize) -> TargetSet {
        self.select(nt, |c| c == IDLE)
    }

    pub fn has_active(&self) -> bool {
        self.codes.iter().any(|&c| c >= ACTIVE)
    }

    /// Packs the state into a single key: 10 bits of position, 6 bits of
    /// resources, then 7 bits per target.
    pub fn pack(&self) -> u128 {
        let mut key = self.pos as u128 | (self.remaining as u128) << 10;
        for (t, &c) in self.codes.iter().enumerate() {
            key |= (c as u128) << (16 + 7 * t);
        }
        key
    }

    /// Opens an attack on `t`; an attack on the patroller's vertex is
    /// caught immediately and only spends the resource.
    pub fn open(&self, game: &Game, t: TargetIx) -> State {
        debug_assert!(self.remaining > 0 && self.codes[t] == IDLE);
        let mut next = *self;
        next.remaining -= 1;
        if game.target_vertex(t) != self.pos() {
            next.codes[t] = ACTIVE;
        }
        next
    }

    /// Moves the patroller to `to` and resolves catches and losses.
    pub fn advance(&self, game: &Game, to: VertexIx) -> (State, Advance) {
        let mut next = *self;
        next.pos = to as u16;
        let mut out = Advance::default();
        for t in 0..game.target_count() {
            let c = next.codes[t];
            if c < ACTIVE {
                continue;
            }
            let elapsed = (c - ACTIVE) as u32 + 1;
            if game.target_vertex(t) == to {
                next.codes[t] = IDLE;
                out.caught = out.caught.with(t);
            } else if elapsed >= game.instance.deadline(t) {
                next.codes[t] = LOST;
                out.lost = out.lost.with(t);
                out.loss += game.instance.value(t);
            } else {
                next.codes[t] = c + 1;
            }
        }
        (next, out)
    }

    /// Active attacks with the turns left to catch each of them.
    pub fn residuals(&self, game: &Game) -> Vec<(TargetIx, u32)> {
        (0..game.target_count())
            .filter_map(|t| match self.status(t) {
                Status::Active { elapsed } => Some((t, game.instance.deadline(t) - elapsed)),
                _ => None,
            })
            .collect()
    }

    /// Loss of the best covering route if no further attack ever comes.
    pub fn settle_loss(&self, game: &Game) -> f64 {
        srg_loss(game, self.pos(), &self.residuals(game))
    }

    pub fn settle_route(&self, game: &Game) -> CoveringRoute {
        solve_srg(game, self.pos(), &self.residuals(game))
    }
}

/// One turn of a recorded game.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnRecord {
    pub turn: u32,
    pub opened: Vec<TargetIx>,
    pub from: VertexIx,
    pub to: VertexIx,
    pub caught: TargetSet,
    pub lost: TargetSet,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance;

    fn line() -> Game {
        Game::new(
            &load_instance(
                r#"{"vertices":["a","b","c"],"edges":[["a","b",1],["b","c",1]],
"targets":[{"vertex":"a","value":1.0,"deadline":1},{"vertex":"c","value":0.5,"deadline":2}],"k":2}"#,
            )
            .unwrap(),
        )
    }

    #[test]
    fn catch_before_loss() {
        let g = line();
        let s = State::initial(1, 2).open(&g, 1);
        assert_eq!(s.status(1), Status::Active { elapsed: 0 });
        let (s1, a) = s.advance(&g, 1);
        assert_eq!(s1.status(1), Status::Active { elapsed: 1 });
        assert_eq!(a.loss, 0.0);
        let (s2, a) = s1.advance(&g, 2);
        assert!(a.caught.contains(1));
        assert_eq!(s2.status(1), Status::Idle);
    }

    #[test]
    fn deadline_loss_charged_once() {
        let g = line();
        let s = State::initial(2, 2).open(&g, 0);
        let (s1, a) = s.advance(&g, 2);
        assert_eq!(a.loss, 1.0);
        assert_eq!(s1.status(0), Status::Lost);
        let (_, a) = s1.advance(&g, 1);
        assert_eq!(a.loss, 0.0);
    }

    #[test]
    fn immediate_catch_spends_resource() {
        let g = line();
        let s = State::initial(0, 2).open(&g, 0);
        assert_eq!(s.remaining(), 1);
        assert_eq!(s.status(0), Status::Idle);
        assert!(!s.has_active());
    }

    #[test]
    fn packing_is_injective_on_fields() {
        let g = line();
        let a = State::initial(1, 2).open(&g, 0);
        let b = State::initial(1, 2).open(&g, 1);
        assert_ne!(a.pack(), b.pack());
        assert_ne!(State::initial(1, 2).pack(), State::initial(1, 1).pack());
        assert_ne!(State::initial(1, 2).pack(), State::initial(2, 2).pack());
    }
}

//! Defender policies that only see alarms, never the number of resources.
//!
//! A policy keeps a plan (the targets it is heading for, in order) and
//! decides on every alarm whether to replan. Policies are evaluated either
//! against an adaptive Attacker that enumerates every attack order and
//! timing, with coin flips integrated exactly, or by Monte Carlo runs of a
//! scripted attack stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::best_static_placement_k1;
use crate::error::SolveError;
use crate::eval::{plan_for, prune_plan, step_along, Decision, DefenderPolicy, PolicyEvaluator};
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{
    top_k_value, AttackEvent, GameOutcome, PatrolInstance, TargetIx, TargetSet, TargetSpec,
    VertexIx,
};
use crate::oracle::Oracle;
use crate::play::{check_play_limits, State};
use crate::robustness::hub_family;
use crate::EPS;

/// How a policy reacts to alarms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PolicyKind {
    /// Replans the best covering route on every new alarm.
    Greedy,
    /// Commits to the route planned at the first alarm and replans only
    /// once that route is done, so it chases whatever is attacked first.
    FirstAlarm,
    /// Greedy, but ignores targets farther than the radius from home.
    Threshold(u32),
    /// On every new alarm, replans with the given probability and otherwise
    /// keeps its current plan (standing at home when it has none).
    Coin(f64),
}

/// An online policy anchored at a home vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlinePolicy {
    pub kind: PolicyKind,
    pub home: String,
}

impl OnlinePolicy {
    pub fn new(kind: PolicyKind, home: impl Into<String>) -> Self {
        OnlinePolicy {
            kind,
            home: home.into(),
        }
    }

    /// Home is the fixed start of the instance, else its best single-attack
    /// placement.
    pub fn for_instance(kind: PolicyKind, instance: &PatrolInstance) -> Self {
        let home = match instance.defender_start() {
            Some(v) => instance.vertex_name(v).to_string(),
            None => {
                let game = Game::new(instance);
                let (v, _) = best_static_placement_k1(&game);
                game.name(v).to_string()
            }
        };
        OnlinePolicy::new(kind, home)
    }

    pub fn respond_probability(&self) -> f64 {
        match self.kind {
            PolicyKind::Coin(p) => p,
            _ => 1.0,
        }
    }

    fn check(&self, game: &Game) -> Result<VertexIx, OnlineError> {
        if let PolicyKind::Coin(p) = self.kind {
            if !(0.0..=1.0).contains(&p) {
                return Err(OnlineError::Policy(format!(
                    "respond probability {p} outside [0,1]"
                )));
            }
        }
        game.original
            .vertex_index(&self.home)
            .and_then(|_| game.vertex(&self.home))
            .ok_or_else(|| OnlineError::Policy(format!("unknown home vertex {}", self.home)))
    }
}

/// Errors of online simulation and evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnlineError {
    #[error("invalid policy: {0}")]
    Policy(String),
    #[error("invalid attack stream: {0}")]
    Stream(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A scripted sequence of attacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackStream {
    pub events: Vec<AttackEvent>,
}

impl AttackStream {
    pub fn new(events: Vec<AttackEvent>) -> Self {
        AttackStream { events }
    }

    /// Reads `{"events": [{"turn": 0, "targets": ["t1"]}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Resources the stream spends.
    pub fn resources(&self) -> u32 {
        self.events.iter().map(|e| e.targets.len() as u32).sum()
    }

    fn last_turn(&self) -> u32 {
        self.events.iter().map(|e| e.turn).max().unwrap_or(0)
    }

    /// Targets opened at each turn, by index.
    fn compile(&self, game: &Game) -> Result<Vec<Vec<TargetIx>>, OnlineError> {
        let mut turns = vec![Vec::new(); self.last_turn() as usize + 1];
        for e in &self.events {
            for name in &e.targets {
                let t = game
                    .target(name)
                    .ok_or_else(|| OnlineError::Stream(format!("unknown target {name}")))?;
                if turns[e.turn as usize].contains(&t) {
                    return Err(OnlineError::Stream(format!(
                        "target {name} opened twice at turn {}",
                        e.turn
                    )));
                }
                turns[e.turn as usize].push(t);
            }
        }
        for ts in &mut turns {
            ts.sort_unstable();
        }
        Ok(turns)
    }
}

/// Opens the scripted attacks of one turn; targets that are not idle
/// (running or already lost) are skipped.
fn open_scripted(game: &Game, s: &State, opened: &[TargetIx]) -> State {
    let nt = game.target_count();
    let mut next = *s;
    for &t in opened {
        if next.remaining() > 0 && next.idle(nt).contains(t) {
            next = next.open(game, t);
        }
    }
    next
}

/// Online policy bound to a game.
struct Bound {
    kind: PolicyKind,
    home: VertexIx,
}

impl Bound {
    fn replan(&self, game: &Game, s: &State) -> Vec<TargetIx> {
        match self.kind {
            PolicyKind::Threshold(r) => plan_for(game, s, |t| game.to_target(self.home, t) <= r),
            _ => plan_for(game, s, |_| true),
        }
    }

    fn decision(
        &self,
        game: &Game,
        s: &State,
        plan: Vec<TargetIx>,
        p: f64,
    ) -> Decision<Vec<TargetIx>> {
        Decision {
            probability: p,
            to: step_along(game, s, &plan, self.home),
            memory: plan,
        }
    }
}

impl DefenderPolicy for Bound {
    type Memory = Vec<TargetIx>;

    fn initial_memory(&self) -> Vec<TargetIx> {
        Vec::new()
    }

    fn decide(
        &mut self,
        game: &Game,
        s: &State,
        plan: &Vec<TargetIx>,
    ) -> Result<Vec<Decision<Vec<TargetIx>>>, SolveError> {
        let alarm = !s.fresh(game.target_count()).is_empty();
        let kept = prune_plan(game, s, plan);
        let out = match self.kind {
            PolicyKind::Greedy | PolicyKind::Threshold(_) => {
                let plan = if alarm || kept.is_empty() {
                    self.replan(game, s)
                } else {
                    kept
                };
                vec![self.decision(game, s, plan, 1.0)]
            }
            PolicyKind::FirstAlarm => {
                let plan = if kept.is_empty() {
                    self.replan(game, s)
                } else {
                    kept
                };
                vec![self.decision(game, s, plan, 1.0)]
            }
            PolicyKind::Coin(p) => {
                if !alarm || p == 0.0 {
                    vec![self.decision(game, s, kept, 1.0)]
                } else if p == 1.0 {
                    vec![self.decision(game, s, self.replan(game, s), 1.0)]
                } else {
                    let respond = self.replan(game, s);
                    if respond == kept {
                        vec![self.decision(game, s, kept, 1.0)]
                    } else {
                        vec![
                            self.decision(game, s, respond, p),
                            self.decision(game, s, kept, 1.0 - p),
                        ]
                    }
                }
            }
        };
        Ok(out)
    }
}

fn bind(policy: &OnlinePolicy, game: &Game) -> Result<Bound, OnlineError> {
    Ok(Bound {
        kind: policy.kind,
        home: policy.check(game)?,
    })
}

fn sample(
    decisions: Vec<Decision<Vec<TargetIx>>>,
    rng: &mut ChaCha8Rng,
) -> Decision<Vec<TargetIx>> {
    if decisions.len() == 1 {
        return decisions.into_iter().next().expect("one decision");
    }
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    let last = decisions.len() - 1;
    for (i, d) in decisions.into_iter().enumerate() {
        acc += d.probability;
        if x < acc || i == last {
            return d;
        }
    }
    unreachable!("decision list is not empty")
}

fn run(
    game: &Game,
    bound: &mut Bound,
    turns: &[Vec<TargetIx>],
    k: u32,
    rng: &mut ChaCha8Rng,
) -> Result<TargetSet, SolveError> {
    let mut s = State::initial(bound.home, k);
    let mut plan = Vec::new();
    let mut lost = TargetSet::EMPTY;
    for turn in 0.. {
        if let Some(opened) = turns.get(turn) {
            s = open_scripted(game, &s, opened);
        } else if !s.has_active() {
            break;
        }
        let d = sample(bound.decide(game, &s, &plan)?, rng);
        let (next, adv) = s.advance(game, d.to);
        lost = lost.union(adv.lost);
        s = next;
        plan = d.memory;
    }
    Ok(lost)
}

/// Plays `policy` against a scripted stream. Coin flips come from a
/// generator seeded with `seed`, so the outcome is reproducible.
pub fn simulate_online(
    policy: &OnlinePolicy,
    instance: &PatrolInstance,
    stream: &AttackStream,
    seed: u64,
) -> Result<GameOutcome, OnlineError> {
    let game = Game::new(instance);
    let lost = simulate_in(&game, policy, stream, seed)?;
    Ok(GameOutcome::from_sets(
        instance.all_targets(),
        lost,
        instance,
    ))
}

fn simulate_in(
    game: &Game,
    policy: &OnlinePolicy,
    stream: &AttackStream,
    seed: u64,
) -> Result<TargetSet, OnlineError> {
    let mut bound = bind(policy, game)?;
    let k = stream.resources();
    if k > game.k() {
        return Err(OnlineError::Stream(format!(
            "stream spends {k} resources, the Attacker has {}",
            game.k()
        )));
    }
    check_play_limits(game, k)?;
    let turns = stream.compile(game)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(run(game, &mut bound, &turns, k, &mut rng)?)
}

/// Best utility of a Defender that knows the whole stream in advance.
pub fn clairvoyant_value(
    instance: &PatrolInstance,
    start: &str,
    stream: &AttackStream,
) -> Result<f64, OnlineError> {
    let game = Game::new(instance);
    let v = game
        .vertex(start)
        .ok_or_else(|| OnlineError::Policy(format!("unknown vertex {start}")))?;
    let k = stream.resources();
    check_play_limits(&game, k)?;
    let turns = stream.compile(&game)?;
    let mut memo = FxHashMap::default();
    Ok(clairvoyant(
        &game,
        &turns,
        State::initial(v, k),
        0,
        &mut memo,
    ))
}

fn clairvoyant(
    game: &Game,
    turns: &[Vec<TargetIx>],
    s: State,
    turn: usize,
    memo: &mut FxHashMap<(u128, usize), f64>,
) -> f64 {
    let s = match turns.get(turn) {
        Some(opened) => open_scripted(game, &s, opened),
        None if !s.has_active() => return 0.0,
        None => s,
    };
    let turn_key = turn.min(turns.len());
    let key = (s.pack(), turn_key);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut best = f64::NEG_INFINITY;
    for m in game.moves(s.pos()) {
        let (next, adv) = s.advance(game, m);
        best = best.max(clairvoyant(game, turns, next, turn_key + 1, memo) - adv.loss);
    }
    memo.insert(key, best);
    best
}

/// The Attacker the policy is measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum Adversary {
    /// Adaptive: sees every move and picks what to open and when.
    Exhaustive,
    /// A fixed stream, played in Monte Carlo trials.
    Scripted(AttackStream),
}

/// Policy value against the clairvoyant optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitiveReport {
    /// Policy utility (worst case, expected over coin flips).
    pub v: f64,
    /// Clairvoyant utility.
    pub v_star: f64,
    /// Sum of the `k` largest target values.
    pub scale: f64,
    /// `(scale + v) / (scale + v_star)`; `None` when the denominator is 0.
    pub gamma: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Standard error of `gamma` for Monte Carlo runs.
    pub std_error: Option<f64>,
    pub states: usize,
}

/// Seed of trial `i`, derived from the master seed.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    let mut z = master.wrapping_add((i + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ratio(scale: f64, v: f64, v_star: f64) -> Option<f64> {
    (scale + v_star > EPS).then(|| (scale + v) / (scale + v_star))
}

/// Competitive factor of `policy` on `instance` with `k` resources.
pub fn estimate_competitive_factor(
    policy: &OnlinePolicy,
    instance: &PatrolInstance,
    adversary: &Adversary,
    trials: u64,
    seed: u64,
    limits: &SolverLimits,
) -> Result<CompetitiveReport, OnlineError> {
    let game = Game::new(instance);
    let k = game.k();
    let scale = top_k_value(instance, k);
    match adversary {
        Adversary::Exhaustive => {
            if game.n() > limits.oracle_max_vertices || k > limits.oracle_max_k {
                return Err(SolveError::budget(
                    "exhaustive adversary size",
                    game.n().max(k as usize) as u64,
                    limits.oracle_max_vertices.min(limits.oracle_max_k as usize) as u64,
                )
                .into());
            }
            let bound = bind(policy, &game)?;
            let home = bound.home;
            let mut oracle = Oracle::new(&game, limits)?;
            let v_star = oracle.value_from(home, k)?;
            let states = oracle.states();
            drop(oracle);
            let mut evaluator = PolicyEvaluator::new(&game, bound, limits.max_states);
            let v = evaluator.value_from(home, k)?;
            Ok(CompetitiveReport {
                v,
                v_star,
                scale,
                gamma: ratio(scale, v, v_star),
                trials: 0,
                seed,
                std_error: None,
                states: states + evaluator.states(),
            })
        }
        Adversary::Scripted(stream) => {
            if trials == 0 {
                return Err(OnlineError::Policy("at least one trial is needed".into()));
            }
            let v_star = clairvoyant_value(instance, &policy.home, stream)?;
            let utils: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    simulate_in(&game, policy, stream, trial_seed(seed, i))
                        .map(|lost| -game.instance.value_of(lost))
                })
                .collect::<Result<_, _>>()?;
            let n = trials as f64;
            let v = utils.iter().sum::<f64>() / n;
            let var = if trials > 1 {
                utils.iter().map(|u| (u - v) * (u - v)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let gamma = ratio(scale, v, v_star);
            let std_error = gamma.map(|_| (var / n).sqrt() / (scale + v_star));
            Ok(CompetitiveReport {
                v,
                v_star,
                scale,
                gamma,
                trials,
                seed,
                std_error,
                states: 0,
            })
        }
    }
}

/// Hub `v` with unit spokes to `max(1, k-1)` targets `t1..` of deadline
/// `max(1, 2k-1)` and a spoke of weight `2k` to `tf` of deadline `2k`.
pub fn gen_lower_bound_instance(k: u32) -> Result<PatrolInstance, SolveError> {
    if k < 1 {
        return Err(SolveError::Parameter("k must be at least 1".into()));
    }
    let near = (k.max(2) - 1) as usize;
    let deadline = (2 * k).saturating_sub(1).max(1);
    let names: Vec<String> = (1..=near).map(|i| format!("t{i}")).collect();
    let mut vertices = vec!["v".to_string(), "tf".to_string()];
    vertices.extend(names.iter().cloned());
    let mut edges: Vec<(String, String, u32)> = names
        .iter()
        .map(|t| ("v".to_string(), t.clone(), 1))
        .collect();
    edges.push(("v".into(), "tf".into(), 2 * k));
    let mut targets: Vec<(String, TargetSpec)> = names
        .into_iter()
        .map(|t| {
            (
                t,
                TargetSpec {
                    value: 1.0,
                    deadline,
                },
            )
        })
        .collect();
    targets.push((
        "tf".into(),
        TargetSpec {
            value: 1.0,
            deadline: 2 * k,
        },
    ));
    Ok(PatrolInstance::new(
        vertices,
        edges,
        targets,
        k,
        Some("v".into()),
    )?)
}

/// Unit clique of hub `v` and `k-h` targets `c1..` (deadline `k-h`), with
/// `h` targets `o1..` (deadline `k`) at weight-`k` spokes from `v`.
pub fn gen_randomized_worstcase_instance(k: u32, h: u32) -> Result<PatrolInstance, SolveError> {
    if h < 1 || h >= k {
        return Err(SolveError::Parameter(format!(
            "need 1 <= h < k, got k={k}, h={h}"
        )));
    }
    let clique = vec![
        TargetSpec {
            value: 1.0,
            deadline: k - h
        };
        (k - h) as usize
    ];
    let outer = vec![
        TargetSpec {
            value: 1.0,
            deadline: k
        };
        h as usize
    ];
    Ok(hub_family(k, clique, outer, k, false))
}

/// The stream behind the randomized closed form: the spoke targets one per
/// turn, then every clique target at once.
pub fn randomized_worstcase_stream(k: u32, h: u32) -> AttackStream {
    let mut events: Vec<AttackEvent> = (1..=h)
        .map(|i| AttackEvent {
            turn: i - 1,
            targets: vec![format!("o{i}")],
        })
        .collect();
    events.push(AttackEvent {
        turn: h,
        targets: (1..=k - h).map(|i| format!("c{i}")).collect(),
    });
    AttackStream::new(events)
}

/// The stream behind the deterministic lower bound: `tf` first, then every
/// near target one turn later.
pub fn lower_bound_stream(k: u32) -> AttackStream {
    let near = k.max(2) - 1;
    let mut events = vec![AttackEvent {
        turn: 0,
        targets: vec!["tf".into()],
    }];
    if k > 1 {
        events.push(AttackEvent {
            turn: 1,
            targets: (1..=near).map(|i| format!("t{i}")).collect(),
        });
    }
    AttackStream::new(events)
}

/// `(1 - 2^-(h+1)) / (k - h) + 2^-h`.
pub fn gamma_r_closed_form(k: u32, h: u32) -> Result<f64, SolveError> {
    if h < 1 || h >= k {
        return Err(SolveError::Parameter(format!(
            "need 1 <= h < k, got k={k}, h={h}"
        )));
    }
    let half = 0.5f64;
    Ok((1.0 - half.powi(h as i32 + 1)) / (k - h) as f64 + half.powi(h as i32))
}

/// One column of the randomized versus deterministic comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub k: u32,
    /// Minimizing `h`.
    pub h: u32,
    pub gamma_r: f64,
    pub gamma_d: f64,
}

/// Worst `Γ_r` over `h` next to `Γ_d = 1/(k-1)`, for every `k >= 2`.
pub fn competitive_table(k_values: &[u32]) -> Result<Vec<TableRow>, SolveError> {
    k_values
        .iter()
        .map(|&k| {
            if k < 2 {
                return Err(SolveError::Parameter(format!(
                    "table needs k >= 2, got {k}"
                )));
            }
            let mut best = (1, f64::INFINITY);
            for h in 1..k {
                let g = gamma_r_closed_form(k, h)?;
                if g < best.1 {
                    best = (h, g);
                }
            }
            Ok(TableRow {
                k,
                h: best.0,
                gamma_r: best.1,
                gamma_d: 1.0 / (k - 1) as f64,
            })
        })
        .collect()
}

/// Two decimals, exact halves rounded toward zero.
pub fn round2(x: f64) -> String {
    let scaled = x * 100.0;
    let floor = scaled.floor();
    let cents = if (scaled - floor - 0.5).abs() < 1e-9 {
        floor
    } else {
        scaled.round()
    };
    format!("{:.2}", cents / 100.0)
}

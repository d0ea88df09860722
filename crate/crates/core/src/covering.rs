//! Covering routes against a set of simultaneously running attacks.

use rayon::prelude::*;

use crate::error::SolveError;
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{TargetIx, TargetSet, VertexIx};
use crate::EPS;

const INF: u32 = u32::MAX;

/// Largest attacked set `solve_srg` accepts.
pub const MAX_ATTACKED: usize = 20;

/// Waypoints visited along shortest paths; `waypoints[0]` is the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectRoute {
    pub waypoints: Vec<VertexIx>,
    pub arrival_times: Vec<u32>,
}

impl DirectRoute {
    /// The vertex-by-vertex walk the route stands for.
    pub fn expand(&self, game: &Game) -> Vec<VertexIx> {
        let mut walk = vec![self.waypoints[0]];
        for pair in self.waypoints.windows(2) {
            walk.extend(game.dist.path(pair[0], pair[1]).into_iter().skip(1));
        }
        walk
    }
}

/// Best response route to a simultaneous attack.
///
/// An attacked target sitting on the start vertex is caught at time 0: it
/// counts as covered but is not listed as a waypoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringRoute {
    pub route: DirectRoute,
    pub attacked: TargetSet,
    pub covered: TargetSet,
    pub utility: f64,
}

impl CoveringRoute {
    pub fn uncovered(&self) -> TargetSet {
        self.attacked.minus(self.covered)
    }
}

struct Table {
    targets: Vec<TargetIx>,
    vertices: Vec<VertexIx>,
    residual: Vec<u32>,
    values: Vec<f64>,
    n: usize,
    best: Vec<u32>,
}

impl Table {
    fn build(game: &Game, start: VertexIx, attacked: &[(TargetIx, u32)]) -> Table {
        let mut entries = attacked.to_vec();
        entries.sort_unstable();
        entries.dedup_by_key(|e| e.0);
        assert!(entries.len() <= MAX_ATTACKED, "attacked set too large");
        let n = entries.len();
        let targets: Vec<TargetIx> = entries.iter().map(|e| e.0).collect();
        let vertices: Vec<VertexIx> = targets.iter().map(|&t| game.target_vertex(t)).collect();
        let residual: Vec<u32> = entries.iter().map(|e| e.1).collect();
        let values = targets.iter().map(|&t| game.instance.value(t)).collect();
        let mut best = vec![INF; (1usize << n) * n];
        for i in 0..n {
            let a = game.dist.dist(start, vertices[i]);
            if a <= residual[i] {
                best[(1 << i) * n + i] = a;
            }
        }
        for set in 1usize..1 << n {
            for last in 0..n {
                let at = best[set * n + last];
                if at == INF {
                    continue;
                }
                for next in 0..n {
                    if set >> next & 1 == 1 {
                        continue;
                    }
                    let arrive = at + game.dist.dist(vertices[last], vertices[next]);
                    if arrive <= residual[next] {
                        let slot = &mut best[(set | 1 << next) * n + next];
                        if arrive < *slot {
                            *slot = arrive;
                        }
                    }
                }
            }
        }
        Table {
            targets,
            vertices,
            residual,
            values,
            n,
            best,
        }
    }

    fn feasible(&self, set: usize) -> bool {
        set == 0 || (0..self.n).any(|l| self.best[set * self.n + l] != INF)
    }

    fn value(&self, set: usize) -> f64 {
        (0..self.n)
            .filter(|i| set >> i & 1 == 1)
            .map(|i| self.values[i])
            .sum()
    }

    fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn best_value(&self) -> f64 {
        (0usize..1 << self.n)
            .filter(|&s| self.feasible(s))
            .map(|s| self.value(s))
            .fold(0.0, f64::max)
    }
}

/// Loss (sum of uncovered values) of the best covering route, without
/// reconstructing it.
pub fn srg_loss(game: &Game, start: VertexIx, attacked: &[(TargetIx, u32)]) -> f64 {
    match attacked.len() {
        0 => 0.0,
        1 => {
            let (t, res) = attacked[0];
            if game.to_target(start, t) <= res {
                0.0
            } else {
                game.instance.value(t)
            }
        }
        2 => {
            let [(a, ra), (b, rb)] = [attacked[0], attacked[1]];
            let (va, vb) = (game.instance.value(a), game.instance.value(b));
            let (da, db) = (game.to_target(start, a), game.to_target(start, b));
            let ab = game.dist.dist(game.target_vertex(a), game.target_vertex(b));
            let both = (da <= ra && da + ab <= rb) || (db <= rb && db + ab <= ra);
            if both {
                0.0
            } else {
                let mut loss = va + vb;
                if da <= ra {
                    loss = loss.min(vb);
                }
                if db <= rb {
                    loss = loss.min(va);
                }
                loss
            }
        }
        _ => {
            let table = Table::build(game, start, attacked);
            (table.total() - table.best_value()).max(0.0)
        }
    }
}

/// Best covering route from `start` against targets under attack with the
/// given residual deadlines.
///
/// Maximizes the covered value; ties prefer fewer waypoints, then the
/// lexicographically smallest waypoint sequence.
pub fn solve_srg(game: &Game, start: VertexIx, attacked: &[(TargetIx, u32)]) -> CoveringRoute {
    let table = Table::build(game, start, attacked);
    let n = table.n;
    let attacked_set: TargetSet = table.targets.iter().copied().collect();

    // latest[R * n + f]: latest arrival at f from which every target of R
    // (f included) can still be visited in time.
    let mut latest = vec![-1i64; (1usize << n) * n];
    for set in 1usize..1 << n {
        for f in 0..n {
            if set >> f & 1 == 0 {
                continue;
            }
            let rest = set & !(1 << f);
            let own = table.residual[f] as i64;
            latest[set * n + f] = if rest == 0 {
                own
            } else {
                let tail = (0..n)
                    .filter(|g| rest >> g & 1 == 1)
                    .map(|g| {
                        latest[rest * n + g]
                            - game.dist.dist(table.vertices[f], table.vertices[g]) as i64
                    })
                    .max()
                    .unwrap_or(-1);
                own.min(tail)
            };
        }
    }

    let here = (0..n).find(|&i| table.vertices[i] == start);
    let order = |set: usize| -> Option<(Vec<usize>, Vec<u32>)> {
        let mut remaining = set;
        if let Some(h) = here {
            remaining &= !(1 << h);
        }
        let (mut at, mut time) = (start, 0u32);
        let mut seq = Vec::new();
        let mut times = Vec::new();
        while remaining != 0 {
            let next = (0..n).filter(|g| remaining >> g & 1 == 1).find(|&g| {
                let arrive = time + game.dist.dist(at, table.vertices[g]);
                (arrive as i64) <= latest[remaining * n + g]
            })?;
            time += game.dist.dist(at, table.vertices[next]);
            at = table.vertices[next];
            remaining &= !(1 << next);
            seq.push(next);
            times.push(time);
        }
        Some((seq, times))
    };

    let top = table.best_value();
    let mut chosen: Option<(usize, Vec<usize>, Vec<u32>)> = None;
    for set in 0usize..1 << n {
        if !table.feasible(set) || table.value(set) < top - EPS {
            continue;
        }
        let Some((seq, times)) = order(set) else {
            continue;
        };
        let better = match &chosen {
            None => true,
            Some((_, best_seq, _)) => {
                let key = |s: &[usize]| {
                    (
                        s.len(),
                        s.iter().map(|&i| table.vertices[i]).collect::<Vec<_>>(),
                    )
                };
                key(&seq) < key(best_seq)
            }
        };
        if better {
            chosen = Some((set, seq, times));
        }
    }
    let (set, seq, times) = chosen.expect("the empty route is always feasible");
    let covered: TargetSet = (0..n)
        .filter(|i| set >> i & 1 == 1)
        .map(|i| table.targets[i])
        .collect();
    let mut waypoints = vec![start];
    waypoints.extend(seq.iter().map(|&i| table.vertices[i]));
    let mut arrival_times = vec![0];
    arrival_times.extend(times);
    CoveringRoute {
        route: DirectRoute {
            waypoints,
            arrival_times,
        },
        attacked: attacked_set,
        covered,
        utility: -(table.total() - table.value(set)).max(0.0),
    }
}

/// Whether every attacked target can be covered from `start`.
pub fn sa_feasible(game: &Game, start: VertexIx, attacked: &[(TargetIx, u32)]) -> bool {
    let route = solve_srg(game, start, attacked);
    route.covered == route.attacked
}

/// Utility of the best response to a single attack on `t` from `v`.
pub fn single_response(game: &Game, v: VertexIx, t: TargetIx) -> f64 {
    if game.to_target(v, t) <= game.instance.deadline(t) {
        0.0
    } else {
        -game.instance.value(t)
    }
}

/// Worst single attack against a patroller standing on `v`, among `targets`.
pub fn static_value(game: &Game, v: VertexIx, targets: TargetSet) -> f64 {
    targets
        .iter()
        .map(|t| single_response(game, v, t))
        .fold(0.0, f64::min)
}

/// Best vertex to wait on against a single attacking resource.
pub fn best_static_placement_k1(game: &Game) -> (VertexIx, f64) {
    let all = game.instance.all_targets();
    let mut best: Option<(VertexIx, f64)> = None;
    for v in game.instance.placements() {
        let value = static_value(game, v, all);
        if best.is_none_or(|(_, b)| value > b + EPS) {
            best = Some((v, value));
        }
    }
    best.expect("at least one placement")
}

/// Result of the simultaneous-attack game.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousAnswer {
    pub placement: VertexIx,
    pub value: f64,
    /// The Attacker's best opening against `placement`.
    pub attack: TargetSet,
}

fn binomial(n: u64, r: u64) -> u64 {
    let r = r.min(n - r.min(n));
    (0..r).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn subsets_of_size(n: usize, r: usize) -> Vec<TargetSet> {
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(pick.iter().copied().collect());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < n - r + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..r {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Value of the game where the Attacker opens all `k` attacks at once.
pub fn simultaneous_attack_value(
    game: &Game,
    k: u32,
    limits: &SolverLimits,
) -> Result<SimultaneousAnswer, SolveError> {
    let nt = game.target_count();
    let r = (k as usize).min(nt);
    let count = binomial(nt as u64, r as u64);
    if count > limits.max_subsets {
        return Err(SolveError::budget(
            "attack subsets",
            count,
            limits.max_subsets,
        ));
    }
    let subsets = subsets_of_size(nt, r);
    let per_placement: Vec<(VertexIx, f64, TargetSet)> = game
        .instance
        .placements()
        .into_par_iter()
        .map(|v| {
            let mut worst = (0.0, TargetSet::EMPTY);
            for &s in &subsets {
                let attacked: Vec<(TargetIx, u32)> =
                    s.iter().map(|t| (t, game.instance.deadline(t))).collect();
                let u = -srg_loss(game, v, &attacked);
                if u < worst.0 - EPS {
                    worst = (u, s);
                }
            }
            (v, worst.0, worst.1)
        })
        .collect();
    let mut best = per_placement[0];
    for &cand in &per_placement[1..] {
        if cand.1 > best.1 + EPS {
            best = cand;
        }
    }
    Ok(SimultaneousAnswer {
        placement: best.0,
        value: best.1,
        attack: best.2,
    })
}

//! Equilibrium response to two sequential attacks.
//!
//! After the first attack on `t'` the patroller follows a path; the
//! Attacker may launch the second attack at any step of it. The response
//! matrix holds, for every (vertex, turn) cell, the best worst case over
//! all paths reaching the cell. Waiting in place is never better than
//! moving on (deadlines only shrink), and a walk that gives up on `t'` can
//! hold its final vertex, which is captured by a concede option on every
//! cell.

use rayon::prelude::*;

use crate::covering::{solve_srg, srg_loss, static_value, CoveringRoute};
use crate::error::SolveError;
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{TargetIx, VertexIx};
use crate::EPS;

/// Best worst case over incoming paths at one (vertex, turn) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCell {
    pub utility: f64,
    pub prev: Option<VertexIx>,
    /// Cell where the worst second attack along the incoming path occurs.
    pub worst_at: (VertexIx, usize),
}

/// `cells[column][vertex]`, `None` for unreachable cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    pub first_target: TargetIx,
    pub cells: Vec<Vec<Option<ResponseCell>>>,
}

impl ResponseMatrix {
    pub fn cell(&self, v: VertexIx, column: usize) -> Option<&ResponseCell> {
        self.cells.get(column).and_then(|c| c[v].as_ref())
    }

    /// Incoming path of a reachable cell.
    pub fn path_to(&self, v: VertexIx, column: usize) -> Vec<VertexIx> {
        let mut path = vec![v];
        let mut at = (v, column);
        while let Some(prev) = self.cells[at.1][at.0].and_then(|c| c.prev) {
            at = (prev, at.1 - 1);
            path.push(prev);
        }
        path.reverse();
        path
    }
}

/// The Defender's answer to a first attack.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumAnswer {
    pub placement: VertexIx,
    pub first_target: Option<TargetIx>,
    /// Path followed while no second attack comes.
    pub path: Vec<VertexIx>,
    /// Whether the path gives up on the first target and holds its end.
    pub concedes: bool,
    /// Response to the worst-timed second attack along the path.
    pub contingency: Option<CoveringRoute>,
    pub value: f64,
}

/// Worst second attack against a patroller on `v` while `first` has been
/// running for `elapsed` turns.
pub fn attack_prediction(
    game: &Game,
    v: VertexIx,
    first: TargetIx,
    elapsed: u32,
) -> (CoveringRoute, f64) {
    let residual = game.instance.deadline(first).saturating_sub(elapsed);
    let mut worst: Option<(TargetIx, f64)> = None;
    for t in (0..game.target_count()).filter(|&t| t != first) {
        let u = -srg_loss(
            game,
            v,
            &[(t, game.instance.deadline(t)), (first, residual)],
        );
        if worst.is_none_or(|(_, w)| u < w - EPS) {
            worst = Some((t, u));
        }
    }
    match worst {
        Some((t, u)) => (
            solve_srg(
                game,
                v,
                &[(t, game.instance.deadline(t)), (first, residual)],
            ),
            u,
        ),
        None => {
            let route = solve_srg(game, v, &[(first, residual)]);
            let u = route.utility;
            (route, u)
        }
    }
}

fn prediction_value(game: &Game, v: VertexIx, first: TargetIx, elapsed: u32) -> f64 {
    let residual = game.instance.deadline(first) - elapsed;
    let others = (0..game.target_count()).filter(|&t| t != first);
    let mut worst = -srg_loss(game, v, &[(first, residual)]);
    for t in others {
        let u = -srg_loss(
            game,
            v,
            &[(t, game.instance.deadline(t)), (first, residual)],
        );
        worst = worst.min(u);
    }
    worst
}

/// Value when `first` is already lost and the patroller stands on `w`.
fn concede_value(game: &Game, w: VertexIx, first: TargetIx) -> f64 {
    let others = game.instance.all_targets().without(first);
    -game.instance.value(first) + static_value(game, w, others)
}

/// Fills the response matrix up to `horizon` columns.
pub fn response_matrix(
    game: &Game,
    start: VertexIx,
    first: TargetIx,
    horizon: usize,
) -> ResponseMatrix {
    let n = game.n();
    let goal = game.target_vertex(first);
    let deadline = game.instance.deadline(first) as usize;
    let horizon = horizon.min(deadline);
    let arrival_value = static_value(game, goal, game.instance.all_targets());
    let predict = |v: VertexIx, c: usize| -> f64 {
        if v == goal {
            arrival_value
        } else if c < deadline {
            prediction_value(game, v, first, c as u32)
        } else {
            concede_value(game, v, first)
        }
    };
    let mut cells = vec![vec![None; n]];
    cells[0][start] = Some(ResponseCell {
        utility: predict(start, 0),
        prev: None,
        worst_at: (start, 0),
    });
    // rank[v]: position of the path to (v, column) in lexicographic order
    let mut rank: Vec<usize> = vec![0; n];
    for c in 0..horizon {
        let mut next: Vec<Option<ResponseCell>> = vec![None; n];
        for v in 0..n {
            let Some(cell) = cells[c][v] else { continue };
            if v == goal || c >= deadline {
                continue;
            }
            for &(nb, _) in game.instance.neighbors(v) {
                let p = predict(nb, c + 1);
                let (utility, worst_at) = if p < cell.utility {
                    (p, (nb, c + 1))
                } else {
                    (cell.utility, cell.worst_at)
                };
                let cand = ResponseCell {
                    utility,
                    prev: Some(v),
                    worst_at,
                };
                next[nb] = match next[nb] {
                    None => Some(cand),
                    Some(old) => {
                        let better = utility > old.utility + EPS
                            || (utility >= old.utility - EPS && rank[v] < rank[old.prev.unwrap()]);
                        Some(if better { cand } else { old })
                    }
                };
            }
        }
        let mut order: Vec<VertexIx> = (0..n).filter(|&v| next[v].is_some()).collect();
        order.sort_by_key(|&v| (rank[next[v].unwrap().prev.unwrap()], v));
        let mut new_rank = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            new_rank[v] = i;
        }
        rank = new_rank;
        let empty = order.is_empty();
        cells.push(next);
        if empty {
            break;
        }
    }
    ResponseMatrix {
        first_target: first,
        cells,
    }
}

fn answer_from_matrix(
    game: &Game,
    start: VertexIx,
    first: TargetIx,
    matrix: &ResponseMatrix,
) -> EquilibriumAnswer {
    let goal = game.target_vertex(first);
    // (value, column, lexicographic path, vertex, concedes)
    let mut best: Option<(f64, usize, Vec<VertexIx>, VertexIx, bool)> = None;
    for (c, column) in matrix.cells.iter().enumerate() {
        for (v, cell) in column.iter().enumerate() {
            let Some(cell) = cell else { continue };
            let (value, concedes) = if v == goal {
                (cell.utility, false)
            } else {
                (cell.utility.min(concede_value(game, v, first)), true)
            };
            let path = matrix.path_to(v, c);
            let better = match &best {
                None => true,
                Some((bv, bc, bp, _, _)) => {
                    value > bv + EPS || (value >= bv - EPS && (c, &path) < (*bc, bp))
                }
            };
            if better {
                best = Some((value, c, path, v, concedes));
            }
        }
    }
    let (value, c, path, v, concedes) = best.expect("start cell is reachable");
    let cell = matrix.cells[c][v].unwrap();
    let (wv, wc) = cell.worst_at;
    let contingency = if wv == goal {
        None
    } else if (wc as u32) < game.instance.deadline(first) {
        Some(attack_prediction(game, wv, first, wc as u32).0)
    } else {
        None
    };
    EquilibriumAnswer {
        placement: start,
        first_target: Some(first),
        path,
        concedes,
        contingency,
        value,
    }
}

/// Equilibrium path from `start` after a first attack on `first`, with
/// two attacking resources in total.
pub fn path_finder(game: &Game, start: VertexIx, first: TargetIx) -> EquilibriumAnswer {
    path_finder_with_horizon(game, start, first, game.n().saturating_sub(1))
}

/// [`path_finder`] with an explicit column bound (the deadline of `first`
/// still caps it).
pub fn path_finder_with_horizon(
    game: &Game,
    start: VertexIx,
    first: TargetIx,
    horizon: usize,
) -> EquilibriumAnswer {
    if game.target_vertex(first) == start {
        // caught on the spot; one resource is left against a static patroller
        return EquilibriumAnswer {
            placement: start,
            first_target: Some(first),
            path: vec![start],
            concedes: false,
            contingency: None,
            value: static_value(game, start, game.instance.all_targets()),
        };
    }
    let matrix = response_matrix(game, start, first, horizon);
    answer_from_matrix(game, start, first, &matrix)
}

/// One entry of the per-(placement, first target) response table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRow {
    pub placement: VertexIx,
    pub first_target: TargetIx,
    pub value: f64,
    pub path: Vec<VertexIx>,
}

/// Best placement against two sequential attacks.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementAnswer {
    pub best: EquilibriumAnswer,
    /// Worst simultaneous pair from the chosen placement.
    pub pair_value: f64,
    pub table: Vec<ResponseRow>,
}

/// Maximizes over placements the worst case over first targets (and over
/// simultaneous pairs).
pub fn best_placement_k2(
    game: &Game,
    limits: &SolverLimits,
) -> Result<PlacementAnswer, SolveError> {
    if game.n() > limits.max_vertices_k2 {
        return Err(SolveError::budget(
            "vertices",
            game.n() as u64,
            limits.max_vertices_k2 as u64,
        ));
    }
    let nt = game.target_count();
    let placements = game.instance.placements();
    if nt == 0 {
        let v = placements[0];
        return Ok(PlacementAnswer {
            best: EquilibriumAnswer {
                placement: v,
                first_target: None,
                path: vec![v],
                concedes: false,
                contingency: None,
                value: 0.0,
            },
            pair_value: 0.0,
            table: Vec::new(),
        });
    }
    let grid: Vec<(VertexIx, TargetIx)> = placements
        .iter()
        .flat_map(|&v| (0..nt).map(move |t| (v, t)))
        .collect();
    let answers: Vec<EquilibriumAnswer> = grid
        .par_iter()
        .map(|&(v, t)| path_finder(game, v, t))
        .collect();
    let pair_value = |v: VertexIx| -> f64 {
        let mut worst = 0.0f64;
        for a in 0..nt {
            for b in a + 1..nt {
                let attacked = [
                    (a, game.instance.deadline(a)),
                    (b, game.instance.deadline(b)),
                ];
                worst = worst.min(-srg_loss(game, v, &attacked));
            }
        }
        worst
    };
    let mut best: Option<(f64, EquilibriumAnswer, f64)> = None;
    for (i, &v) in placements.iter().enumerate() {
        let row = &answers[i * nt..(i + 1) * nt];
        let worst = row
            .iter()
            .fold(None::<&EquilibriumAnswer>, |acc, a| match acc {
                Some(w) if w.value <= a.value + EPS => Some(w),
                _ => Some(a),
            })
            .unwrap();
        let pairs = pair_value(v);
        let value = worst.value.min(pairs);
        if best.as_ref().is_none_or(|(b, _, _)| value > b + EPS) {
            let mut chosen = worst.clone();
            chosen.value = value;
            best = Some((value, chosen, pairs));
        }
    }
    let (_, best, pair_value) = best.unwrap();
    let table = grid
        .iter()
        .zip(&answers)
        .map(|(&(v, t), a)| ResponseRow {
            placement: v,
            first_target: t,
            value: a.value,
            path: a.path.clone(),
        })
        .collect();
    Ok(PlacementAnswer {
        best,
        pair_value,
        table,
    })
}

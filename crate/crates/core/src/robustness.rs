//! Cost of guessing the Attacker's resources wrong.
//!
//! The Defender commits to the equilibrium policy for a guess `k'` while the
//! Attacker, knowing the guess, plays `k` resources. Ratio factor
//! `Γ = (S + v_guess) / (S + v*)` uses the sum `S` of the `k` largest target
//! values, i.e. the utilities rescaled so that 1 means nothing lost and 0
//! means the top-`k` targets lost. The additive factor is `v_guess - v*`.

use crate::error::SolveError;
use crate::eval::{Decision, DefenderPolicy, PolicyEvaluator};
use crate::game::Game;
use crate::limits::SolverLimits;
use crate::model::{top_k_value, PatrolInstance, TargetSpec, VertexIx};
use crate::oracle::Oracle;
use crate::play::{check_play_limits, State};
use crate::EPS;

/// Result of playing the guess `k_prime` against `k` resources.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessAnalysis {
    pub k: u32,
    pub k_prime: u32,
    pub placement: VertexIx,
    pub v_star: f64,
    pub v_guess: f64,
    /// Sum of the `k` largest target values.
    pub scale: f64,
    /// `None` when the correct guess already loses the top-`k` targets.
    pub gamma: Option<f64>,
    pub gamma_prime: f64,
}

/// Plays the equilibrium moves of the game with `k_prime` resources.
///
/// Having seen `k - r` attacks, the Defender believes `k_prime - (k - r)`
/// remain. Past its guess it believes none remain and just covers what is
/// running.
pub struct CommittedPolicy<'g> {
    oracle: Oracle<'g>,
    k: u32,
    k_prime: u32,
}

impl<'g> CommittedPolicy<'g> {
    pub fn new(
        game: &'g Game,
        k: u32,
        k_prime: u32,
        limits: &SolverLimits,
    ) -> Result<Self, SolveError> {
        Ok(CommittedPolicy {
            oracle: Oracle::new(game, limits)?,
            k,
            k_prime,
        })
    }

    fn believed(&self, s: &State) -> State {
        let g = (s.remaining() + self.k_prime).saturating_sub(self.k);
        s.with_remaining(g)
    }
}

impl DefenderPolicy for CommittedPolicy<'_> {
    type Memory = ();

    fn initial_memory(&self) {}

    fn decide(&mut self, game: &Game, s: &State, _: &()) -> Result<Vec<Decision<()>>, SolveError> {
        let belief = self.believed(s);
        let mut best: Option<(VertexIx, f64)> = None;
        for m in game.moves(s.pos()) {
            let (next, adv) = belief.advance(game, m);
            let value = self.oracle.attacker_value(&next)? - adv.loss;
            if best.is_none_or(|(_, b)| value > b + EPS) {
                best = Some((m, value));
            }
        }
        Ok(vec![Decision {
            probability: 1.0,
            to: best.expect("staying is always possible").0,
            memory: (),
        }])
    }
}

fn guard(game: &Game, k: u32, limits: &SolverLimits) -> Result<(), SolveError> {
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
    check_play_limits(game, k)
}

/// Evaluates the `k_prime`-optimal policy against `k` resources.
pub fn value_with_guess(
    instance: &PatrolInstance,
    k: u32,
    k_prime: u32,
    limits: &SolverLimits,
) -> Result<GuessAnalysis, SolveError> {
    if k < 1 || k_prime < 1 {
        return Err(SolveError::Parameter("k and k' must be at least 1".into()));
    }
    let game = Game::new(instance);
    guard(&game, k.max(k_prime), limits)?;

    let mut truth = Oracle::new(&game, limits)?;
    let mut v_star = f64::NEG_INFINITY;
    for v in game.instance.placements() {
        v_star = v_star.max(truth.value_from(v, k)?);
    }
    drop(truth);

    let mut policy = CommittedPolicy::new(&game, k, k_prime, limits)?;
    let mut placement: Option<(VertexIx, f64)> = None;
    for v in game.instance.placements() {
        let value = policy.oracle.value_from(v, k_prime)?;
        if placement.is_none_or(|(_, b)| value > b + EPS) {
            placement = Some((v, value));
        }
    }
    let placement = placement.expect("at least one placement").0;
    let mut evaluator = PolicyEvaluator::new(&game, policy, limits.max_states);
    let v_guess = evaluator.value_from(placement, k)?;

    let scale = top_k_value(instance, k);
    let gamma = if scale + v_star > EPS {
        Some((scale + v_guess) / (scale + v_star))
    } else {
        None
    };
    Ok(GuessAnalysis {
        k,
        k_prime,
        placement,
        v_star,
        v_guess,
        scale,
        gamma,
        gamma_prime: v_guess - v_star,
    })
}

/// Deadline of the clique targets in the underestimation construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnderFamily {
    /// `d(t_c) = k - k'`, used for the ratio factor.
    Ratio,
    /// `d(t_c) = k`, used for the additive factor.
    Additive,
}

/// Overestimation constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverFamily {
    /// Star of `k` unit spokes, one target of value 1, the rest `1 - ε`.
    RatioStar,
    /// `k < k' < 2k`: deadlines `k' - k`.
    AdditiveMid,
    /// `k' >= 2k`: deadlines `k + 1`.
    AdditiveHigh,
}

/// Deadline given to the targets of the ratio star, whose penetration
/// time the construction leaves open.
pub const STAR_DEADLINE: u32 = 1;

fn check_epsilon(epsilon: f64) -> Result<(), SolveError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(SolveError::Parameter(format!(
            "epsilon {epsilon} outside (0,1)"
        )))
    }
}

/// Hub `v` in a unit clique with `clique` targets `c1..`, joined by edges
/// of weight `spoke` to outer targets `o1..`.
pub(crate) fn hub_family(
    k: u32,
    clique: Vec<TargetSpec>,
    outer: Vec<TargetSpec>,
    spoke: u32,
    outer_clique: bool,
) -> PatrolInstance {
    let cn: Vec<String> = (1..=clique.len()).map(|i| format!("c{i}")).collect();
    let on: Vec<String> = (1..=outer.len()).map(|i| format!("o{i}")).collect();
    let mut vertices = vec!["v".to_string()];
    vertices.extend(cn.iter().cloned());
    vertices.extend(on.iter().cloned());
    let mut edges = Vec::new();
    let members: Vec<&String> = std::iter::once(&vertices[0]).chain(cn.iter()).collect();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            edges.push((members[i].clone(), members[j].clone(), 1));
        }
    }
    for o in &on {
        edges.push(("v".to_string(), o.clone(), spoke));
    }
    if outer_clique {
        for i in 0..on.len() {
            for j in i + 1..on.len() {
                edges.push((on[i].clone(), on[j].clone(), 1));
            }
        }
    }
    let targets = cn
        .into_iter()
        .zip(clique)
        .chain(on.into_iter().zip(outer))
        .collect();
    PatrolInstance::new(vertices, edges, targets, k, Some("v".into()))
        .expect("generated families are valid")
}

/// Instance on which underestimating `k` by `k - k_prime` is costly.
pub fn gen_underestimation_instance(
    k: u32,
    k_prime: u32,
    epsilon: f64,
    family: UnderFamily,
) -> Result<PatrolInstance, SolveError> {
    if k_prime < 1 || k_prime >= k {
        return Err(SolveError::Parameter(format!(
            "need 1 <= k' < k, got k={k}, k'={k_prime}"
        )));
    }
    check_epsilon(epsilon)?;
    let clique_deadline = match family {
        UnderFamily::Ratio => k - k_prime,
        UnderFamily::Additive => k,
    };
    let clique = vec![
        TargetSpec {
            value: 1.0,
            deadline: clique_deadline
        };
        (k - k_prime) as usize
    ];
    let outer = vec![
        TargetSpec {
            value: epsilon,
            deadline: k
        };
        k_prime as usize
    ];
    Ok(hub_family(k, clique, outer, k, false))
}

/// Instance on which overestimating `k` is costly.
pub fn gen_overestimation_instance(
    k: u32,
    k_prime: u32,
    epsilon: f64,
    family: OverFamily,
) -> Result<PatrolInstance, SolveError> {
    if k < 1 || k_prime <= k {
        return Err(SolveError::Parameter(format!(
            "need k' > k >= 1, got k={k}, k'={k_prime}"
        )));
    }
    check_epsilon(epsilon)?;
    match family {
        OverFamily::RatioStar => {
            let names: Vec<String> = std::iter::once("tmax".to_string())
                .chain((2..=k).map(|i| format!("t{i}")))
                .collect();
            let mut vertices = vec!["v".to_string()];
            vertices.extend(names.iter().cloned());
            let edges = names
                .iter()
                .map(|t| ("v".to_string(), t.clone(), 1))
                .collect();
            let targets = names
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let value = if i == 0 { 1.0 } else { 1.0 - epsilon };
                    (
                        t.clone(),
                        TargetSpec {
                            value,
                            deadline: STAR_DEADLINE,
                        },
                    )
                })
                .collect();
            Ok(
                PatrolInstance::new(vertices, edges, targets, k, Some("v".into()))
                    .expect("generated families are valid"),
            )
        }
        OverFamily::AdditiveMid | OverFamily::AdditiveHigh => {
            let deadline = if family == OverFamily::AdditiveMid {
                if k_prime >= 2 * k {
                    return Err(SolveError::Parameter(format!(
                        "additive-mid needs k < k' < 2k, got k={k}, k'={k_prime}"
                    )));
                }
                k_prime - k
            } else {
                if k_prime < 2 * k {
                    return Err(SolveError::Parameter(format!(
                        "additive-high needs k' >= 2k, got k={k}, k'={k_prime}"
                    )));
                }
                k + 1
            };
            let clique = vec![
                TargetSpec {
                    value: 1.0,
                    deadline
                };
                (k_prime - k) as usize
            ];
            let outer = vec![
                TargetSpec {
                    value: 1.0 - epsilon,
                    deadline
                };
                k as usize
            ];
            Ok(hub_family(k, clique, outer, k, true))
        }
    }
}

/// The three-case additive factor for a wrong guess.
pub fn gamma_prime_closed_form(k: u32, k_prime: u32, epsilon: f64) -> Result<f64, SolveError> {
    let (k, kp) = (k as f64, k_prime as f64);
    if k_prime as f64 == k {
        Err(SolveError::Parameter(
            "a correct guess has no additive loss case".into(),
        ))
    } else if kp < k {
        Ok(-(k - kp) + epsilon)
    } else if kp < 2.0 * k {
        Ok(-(kp - k) * (1.0 - epsilon))
    } else {
        Ok(-k * (1.0 - epsilon))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_cases() {
        assert!((gamma_prime_closed_form(5, 3, 0.1).unwrap() + 1.9).abs() < 1e-12);
        assert_eq!(gamma_prime_closed_form(3, 5, 0.0).unwrap(), -2.0);
        assert_eq!(gamma_prime_closed_form(3, 6, 0.0).unwrap(), -3.0);
        assert!(gamma_prime_closed_form(3, 3, 0.1).is_err());
    }

    #[test]
    fn underestimation_shape() {
        let inst = gen_underestimation_instance(3, 2, 0.01, UnderFamily::Ratio).unwrap();
        assert_eq!(inst.vertex_count(), 4);
        assert_eq!(inst.target_count(), 3);
        let c1 = inst.target_index("c1").unwrap();
        assert_eq!(inst.deadline(c1), 1);
        let o1 = inst.target_index("o1").unwrap();
        assert_eq!(inst.deadline(o1), 3);
        let game = Game::new(&inst);
        assert_eq!(game.n(), 4 + 2 * 2);
        let v = game.vertex("v").unwrap();
        assert_eq!(game.to_target(v, o1), 3);

        let small = gen_underestimation_instance(2, 1, 0.1, UnderFamily::Ratio).unwrap();
        assert_eq!(small.target_count(), 2);
        assert!(gen_underestimation_instance(2, 2, 0.1, UnderFamily::Ratio).is_err());
    }

    #[test]
    fn correct_guess_is_free() {
        let inst = gen_underestimation_instance(2, 1, 0.1, UnderFamily::Ratio).unwrap();
        let a = value_with_guess(&inst, 2, 2, &SolverLimits::extended()).unwrap();
        assert_eq!(a.gamma_prime, 0.0);
        assert_eq!(a.gamma, Some(1.0));
    }
}

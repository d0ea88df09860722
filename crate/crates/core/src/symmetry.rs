//! Interchangeable targets.
//!
//! Two targets are twins when they share value and deadline and are joined
//! to every other vertex by the same edge weights. Swapping twins, together
//! with the chain vertices of their subdivided edges, is an automorphism of
//! the game, so game values only depend on the orbit of a state.

use std::collections::BTreeMap;

use crate::model::{ChainVertex, PatrolInstance, TargetIx, VertexIx};
use crate::play::State;

#[derive(Debug, Clone)]
struct Class {
    members: Vec<TargetIx>,
    /// `roles[slot][r]`: the vertex playing role `r` for member `slot`.
    roles: Vec<Vec<VertexIx>>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Symmetry {
    classes: Vec<Class>,
    /// For every vertex owned by some class member: (class, slot, role).
    owner: Vec<Option<(usize, usize, usize)>>,
}

impl Symmetry {
    pub(crate) fn build(
        original: &PatrolInstance,
        expanded: &PatrolInstance,
        chains: &[ChainVertex],
    ) -> Symmetry {
        let n = original.vertex_count();
        let nt = original.target_count();
        let mut weight = vec![0u32; n * n];
        for e in original.edges() {
            weight[e.u * n + e.v] = e.weight;
            weight[e.v * n + e.u] = e.weight;
        }
        let twins = |a: TargetIx, b: TargetIx| {
            let (ta, tb) = (original.target(a), original.target(b));
            ta.spec == tb.spec
                && (0..n)
                    .filter(|&x| x != ta.vertex && x != tb.vertex)
                    .all(|x| weight[ta.vertex * n + x] == weight[tb.vertex * n + x])
        };
        let heavy_to_target = |t: TargetIx| {
            let v = original.target(t).vertex;
            original
                .neighbors(v)
                .iter()
                .any(|&(w, wt)| wt > 1 && original.target_at(w).is_some())
        };

        let mut assigned = vec![false; nt];
        let mut classes = Vec::new();
        for a in 0..nt {
            if assigned[a] {
                continue;
            }
            let members: Vec<TargetIx> = (a..nt).filter(|&b| !assigned[b] && twins(a, b)).collect();
            for &m in &members {
                assigned[m] = true;
            }
            if members.len() < 2 || members.iter().any(|&m| heavy_to_target(m)) {
                continue;
            }
            let roles = members
                .iter()
                .map(|&m| {
                    let name = original.target_name(m);
                    let mut keyed: BTreeMap<(String, u32), VertexIx> = BTreeMap::new();
                    for c in chains {
                        let key = if c.from == name {
                            (c.to.clone(), c.step)
                        } else if c.to == name {
                            let w = original.vertex_index(&c.from).unwrap();
                            let total = weight[original.target(m).vertex * n + w];
                            (c.from.clone(), total - c.step)
                        } else {
                            continue;
                        };
                        keyed.insert(key, expanded.vertex_index(&c.name).unwrap());
                    }
                    let mut list = vec![expanded.vertex_index(name).unwrap()];
                    list.extend(keyed.into_values());
                    list
                })
                .collect();
            classes.push(Class { members, roles });
        }

        let mut owner = vec![None; expanded.vertex_count()];
        for (ci, class) in classes.iter().enumerate() {
            for (slot, roles) in class.roles.iter().enumerate() {
                for (r, &v) in roles.iter().enumerate() {
                    owner[v] = Some((ci, slot, r));
                }
            }
        }
        Symmetry { classes, owner }
    }

    /// Number of twin classes with at least two members.
    #[cfg(test)]
    pub(crate) fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Canonical representative of the orbit of `s`.
    pub(crate) fn canonical(&self, s: &State) -> State {
        if self.classes.is_empty() {
            return *s;
        }
        let mut out = *s;
        let owner = self.owner[s.pos()];
        for (ci, class) in self.classes.iter().enumerate() {
            let j = class.members.len();
            let mut order: Vec<usize> = (0..j).collect();
            let pinned = match owner {
                Some((c, slot, role)) if c == ci => Some((slot, role)),
                _ => None,
            };
            let code = |slot: usize| s.code(class.members[slot]);
            match pinned {
                Some((slot, role)) => {
                    order.retain(|&x| x != slot);
                    order.sort_by_key(|&x| code(x));
                    order.insert(0, slot);
                    out = out.with_pos(class.roles[0][role]);
                }
                None => order.sort_by_key(|&x| code(x)),
            }
            for (new_slot, &old_slot) in order.iter().enumerate() {
                out.set_code(class.members[new_slot], code(old_slot));
            }
        }
        out
    }
}

//! Game instances, shortest-path distances and utility accounting.
//!
//! Vertices are kept in lexicographic order of their identifiers, so every
//! tie-break that prefers "the smallest vertex" can compare indices.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Index of a vertex inside a [`PatrolInstance`].
pub type VertexIx = usize;
/// Index of a target inside a [`PatrolInstance`] (targets sorted by vertex).
pub type TargetIx = usize;

/// Maximum number of targets an instance may carry.
pub const MAX_TARGETS: usize = 64;

/// Value and penetration time of a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub value: f64,
    pub deadline: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub vertex: VertexIx,
    pub spec: TargetSpec,
}

/// A set of targets stored as a bitmask over target indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct TargetSet(pub u64);

impl TargetSet {
    pub const EMPTY: TargetSet = TargetSet(0);

    pub fn singleton(t: TargetIx) -> Self {
        TargetSet(1 << t)
    }

    pub fn all(n: usize) -> Self {
        if n >= 64 {
            TargetSet(u64::MAX)
        } else {
            TargetSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, t: TargetIx) -> bool {
        self.0 >> t & 1 == 1
    }

    pub fn with(self, t: TargetIx) -> Self {
        TargetSet(self.0 | 1 << t)
    }

    pub fn without(self, t: TargetIx) -> Self {
        TargetSet(self.0 & !(1 << t))
    }

    pub fn union(self, other: TargetSet) -> Self {
        TargetSet(self.0 | other.0)
    }

    pub fn minus(self, other: TargetSet) -> Self {
        TargetSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: TargetSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = TargetIx> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(t)
            }
        })
    }
}

impl FromIterator<TargetIx> for TargetSet {
    fn from_iter<I: IntoIterator<Item = TargetIx>>(iter: I) -> Self {
        iter.into_iter().fold(TargetSet::EMPTY, TargetSet::with)
    }
}

/// An undirected edge with a traversal cost in turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexIx,
    pub v: VertexIx,
    pub weight: u32,
}

/// Immutable description of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct PatrolInstance {
    vertices: Vec<String>,
    index: HashMap<String, VertexIx>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexIx, u32)>>,
    targets: Vec<Target>,
    target_at: Vec<Option<TargetIx>>,
    attacker_resources: u32,
    defender_start: Option<VertexIx>,
}

impl PatrolInstance {
    /// Builds and validates an instance from identifiers.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, u32)>,
        targets: Vec<(String, TargetSpec)>,
        attacker_resources: u32,
        defender_start: Option<String>,
    ) -> Result<Self, ModelError> {
        if vertices.is_empty() {
            return Err(ModelError::invalid("non-empty vertex set", "no vertices"));
        }
        let mut sorted = vertices;
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(ModelError::invalid(
                    "unique vertex identifiers",
                    format!("vertex {:?} listed twice", pair[0]),
                ));
            }
        }
        let index: HashMap<String, VertexIx> = sorted
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i))
            .collect();
        let lookup = |name: &str, role: &str| -> Result<VertexIx, ModelError> {
            index.get(name).copied().ok_or_else(|| {
                ModelError::invalid(
                    "known vertex",
                    format!("{role} refers to unknown vertex {name:?}"),
                )
            })
        };

        let mut edge_map: BTreeMap<(VertexIx, VertexIx), u32> = BTreeMap::new();
        for (a, b, weight) in &edges {
            let a = lookup(a, "edge")?;
            let b = lookup(b, "edge")?;
            if a == b {
                return Err(ModelError::invalid(
                    "no self-loops",
                    format!("edge loops on {:?}", sorted[a]),
                ));
            }
            if *weight < 1 {
                return Err(ModelError::invalid(
                    "edge weight >= 1",
                    format!("edge {:?}-{:?} has weight {weight}", sorted[a], sorted[b]),
                ));
            }
            let key = (a.min(b), a.max(b));
            if edge_map.insert(key, *weight).is_some() {
                return Err(ModelError::invalid(
                    "no duplicate edges",
                    format!("edge {:?}-{:?} listed twice", sorted[key.0], sorted[key.1]),
                ));
            }
        }
        let edges: Vec<Edge> = edge_map
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        let mut adjacency = vec![Vec::new(); sorted.len()];
        for e in &edges {
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let mut target_list = Vec::with_capacity(targets.len());
        for (name, spec) in &targets {
            let vertex = lookup(name, "target")?;
            if !(spec.value > 0.0 && spec.value <= 1.0) {
                return Err(ModelError::invalid(
                    "value in (0,1]",
                    format!("target {name:?} has value {}", spec.value),
                ));
            }
            if spec.deadline < 1 {
                return Err(ModelError::invalid(
                    "deadline >= 1",
                    format!("target {name:?} has deadline {}", spec.deadline),
                ));
            }
            target_list.push(Target {
                vertex,
                spec: *spec,
            });
        }
        target_list.sort_by_key(|t| t.vertex);
        for pair in target_list.windows(2) {
            if pair[0].vertex == pair[1].vertex {
                return Err(ModelError::invalid(
                    "one target per vertex",
                    format!(
                        "vertex {:?} declared as target twice",
                        sorted[pair[0].vertex]
                    ),
                ));
            }
        }
        if target_list.len() > MAX_TARGETS {
            return Err(ModelError::invalid(
                "at most 64 targets",
                format!("{} targets declared", target_list.len()),
            ));
        }
        let mut target_at = vec![None; sorted.len()];
        for (ti, t) in target_list.iter().enumerate() {
            target_at[t.vertex] = Some(ti);
        }

        if attacker_resources < 1 {
            return Err(ModelError::invalid("k >= 1", "attacker has no resources"));
        }
        let defender_start = match defender_start {
            Some(name) => Some(lookup(&name, "defender_start")?),
            None => None,
        };

        let instance = PatrolInstance {
            vertices: sorted,
            index,
            edges,
            adjacency,
            targets: target_list,
            target_at,
            attacker_resources,
            defender_start,
        };
        if !instance.is_connected() {
            return Err(ModelError::invalid(
                "connected graph",
                "some vertices cannot reach each other",
            ));
        }
        Ok(instance)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.vertices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: VertexIx) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexIx> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` with edge weights, sorted by neighbour index.
    pub fn neighbors(&self, v: VertexIx) -> &[(VertexIx, u32)] {
        &self.adjacency[v]
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    pub fn target(&self, t: TargetIx) -> &Target {
        &self.targets[t]
    }

    pub fn target_at(&self, v: VertexIx) -> Option<TargetIx> {
        self.target_at[v]
    }

    pub fn target_name(&self, t: TargetIx) -> &str {
        self.vertex_name(self.targets[t].vertex)
    }

    pub fn target_index(&self, name: &str) -> Option<TargetIx> {
        self.vertex_index(name).and_then(|v| self.target_at[v])
    }

    pub fn value(&self, t: TargetIx) -> f64 {
        self.targets[t].spec.value
    }

    pub fn deadline(&self, t: TargetIx) -> u32 {
        self.targets[t].spec.deadline
    }

    pub fn all_targets(&self) -> TargetSet {
        TargetSet::all(self.targets.len())
    }

    pub fn attacker_resources(&self) -> u32 {
        self.attacker_resources
    }

    pub fn defender_start(&self) -> Option<VertexIx> {
        self.defender_start
    }

    /// Candidate placements: the fixed start if one is given, otherwise every vertex.
    pub fn placements(&self) -> Vec<VertexIx> {
        match self.defender_start {
            Some(v) => vec![v],
            None => (0..self.vertices.len()).collect(),
        }
    }

    pub fn is_unit_time(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    pub fn total_value(&self) -> f64 {
        self.targets.iter().map(|t| t.spec.value).sum()
    }

    pub fn value_of(&self, set: TargetSet) -> f64 {
        set.iter().map(|t| self.value(t)).sum()
    }

    pub fn with_attacker_resources(&self, k: u32) -> Result<Self, ModelError> {
        if k < 1 {
            return Err(ModelError::invalid("k >= 1", "attacker has no resources"));
        }
        let mut copy = self.clone();
        copy.attacker_resources = k;
        Ok(copy)
    }

    pub fn with_defender_start(&self, start: Option<VertexIx>) -> Self {
        let mut copy = self.clone();
        copy.defender_start = start;
        copy
    }

    /// Serializable form of the instance.
    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        self.vertices[e.u].clone(),
                        self.vertices[e.v].clone(),
                        e.weight,
                    )
                })
                .collect(),
            targets: self
                .targets
                .iter()
                .map(|t| TargetEntry {
                    vertex: self.vertices[t.vertex].clone(),
                    value: t.spec.value,
                    deadline: t.spec.deadline,
                })
                .collect(),
            k: self.attacker_resources,
            defender_start: self.defender_start.map(|v| self.vertices[v].clone()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_document())
            .expect("instance documents always serialize");
        text.push('\n');
        text
    }
}

impl fmt::Display for PatrolInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|V|={} |E|={} |T|={} k={}",
            self.vertices.len(),
            self.edges.len(),
            self.targets.len(),
            self.attacker_resources
        )?;
        if let Some(s) = self.defender_start {
            write!(f, " start={}", self.vertices[s])?;
        }
        Ok(())
    }
}

/// One entry of the `targets` list of an instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub vertex: String,
    pub value: f64,
    pub deadline: u32,
}

/// On-disk instance document (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, u32)>,
    pub targets: Vec<TargetEntry>,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defender_start: Option<String>,
}

impl InstanceDocument {
    pub fn into_instance(self) -> Result<PatrolInstance, ModelError> {
        PatrolInstance::new(
            self.vertices,
            self.edges,
            self.targets
                .into_iter()
                .map(|t| {
                    (
                        t.vertex,
                        TargetSpec {
                            value: t.value,
                            deadline: t.deadline,
                        },
                    )
                })
                .collect(),
            self.k,
            self.defender_start,
        )
    }
}

/// Parses and validates an instance document.
pub fn load_instance(source: &str) -> Result<PatrolInstance, ModelError> {
    let doc: InstanceDocument = serde_json::from_str(source).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.into_instance()
}

/// Shortest travel costs between every pair of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
    next_hop: Vec<VertexIx>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: VertexIx, j: VertexIx) -> u32 {
        self.dist[i * self.n + j]
    }

    /// First vertex after `i` on the canonical shortest path to `j` (`j` itself when `i == j`).
    pub fn next_hop(&self, i: VertexIx, j: VertexIx) -> VertexIx {
        self.next_hop[i * self.n + j]
    }

    /// Canonical shortest path from `i` to `j`, both endpoints included.
    pub fn path(&self, i: VertexIx, j: VertexIx) -> Vec<VertexIx> {
        let mut path = vec![i];
        let mut at = i;
        while at != j {
            at = self.next_hop(at, j);
            path.push(at);
        }
        path
    }
}

const UNREACHABLE: u32 = u32::MAX / 4;

/// Floyd–Warshall over the weighted graph. The next hop is the smallest
/// neighbour that starts some shortest path.
pub fn all_pairs_shortest_paths(instance: &PatrolInstance) -> DistanceMatrix {
    let n = instance.vertex_count();
    let mut dist = vec![UNREACHABLE; n * n];
    for i in 0..n {
        dist[i * n + i] = 0;
    }
    for e in instance.edges() {
        dist[e.u * n + e.v] = e.weight;
        dist[e.v * n + e.u] = e.weight;
    }
    for m in 0..n {
        for i in 0..n {
            let dim = dist[i * n + m];
            if dim >= UNREACHABLE {
                continue;
            }
            for j in 0..n {
                let through = dim + dist[m * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                }
            }
        }
    }
    let mut next_hop = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            next_hop[i * n + j] = if i == j {
                j
            } else {
                instance
                    .neighbors(i)
                    .iter()
                    .find(|&&(nb, w)| w + dist[nb * n + j] == dist[i * n + j])
                    .map(|&(nb, _)| nb)
                    .expect("connected graph has a first hop")
            };
        }
    }
    DistanceMatrix { n, dist, next_hop }
}

/// A vertex inserted by [`expand_to_unit_time`]: it lies `step` turns from
/// `from` on the subdivided edge `from`-`to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVertex {
    pub name: String,
    pub from: String,
    pub to: String,
    pub step: u32,
}

/// Replaces every edge of weight `w > 1` with a chain of `w` unit edges
/// through fresh non-target vertices named `u~v#i` (`i` counted from `u`).
pub fn expand_to_unit_time(instance: &PatrolInstance) -> PatrolInstance {
    expand_with_chains(instance).0
}

/// [`expand_to_unit_time`], also reporting where each fresh vertex sits.
pub fn expand_with_chains(instance: &PatrolInstance) -> (PatrolInstance, Vec<ChainVertex>) {
    if instance.is_unit_time() {
        return (instance.clone(), Vec::new());
    }
    let mut names: Vec<String> = instance.vertex_names().to_vec();
    let mut taken: std::collections::HashSet<String> = names.iter().cloned().collect();
    let mut edges = Vec::new();
    let mut chains = Vec::new();
    for e in instance.edges() {
        let (a, b) = (instance.vertex_name(e.u), instance.vertex_name(e.v));
        if e.weight == 1 {
            edges.push((a.to_string(), b.to_string(), 1));
            continue;
        }
        let mut prev = a.to_string();
        for i in 1..e.weight {
            let mut fresh = format!("{a}~{b}#{i}");
            while taken.contains(&fresh) {
                fresh.push('\'');
            }
            taken.insert(fresh.clone());
            names.push(fresh.clone());
            chains.push(ChainVertex {
                name: fresh.clone(),
                from: a.to_string(),
                to: b.to_string(),
                step: i,
            });
            edges.push((prev, fresh.clone(), 1));
            prev = fresh;
        }
        edges.push((prev, b.to_string(), 1));
    }
    let targets = instance
        .targets()
        .iter()
        .map(|t| (instance.vertex_name(t.vertex).to_string(), t.spec))
        .collect();
    let expanded = PatrolInstance::new(
        names,
        edges,
        targets,
        instance.attacker_resources(),
        instance
            .defender_start()
            .map(|v| instance.vertex_name(v).to_string()),
    )
    .expect("subdivision preserves validity");
    (expanded, chains)
}

/// Targets sorted by decreasing value; ties by vertex identifier.
pub fn targets_by_value(instance: &PatrolInstance) -> Vec<TargetIx> {
    let mut order: Vec<TargetIx> = (0..instance.target_count()).collect();
    order.sort_by(|&a, &b| {
        instance
            .value(b)
            .total_cmp(&instance.value(a))
            .then(a.cmp(&b))
    });
    order
}

/// Sum of the `k` largest target values.
pub fn top_k_value(instance: &PatrolInstance, k: u32) -> f64 {
    targets_by_value(instance)
        .into_iter()
        .take(k as usize)
        .map(|t| instance.value(t))
        .sum()
}

/// Divides every value by the sum of the `k` largest ones, so losing those
/// `k` targets costs exactly 1.
pub fn normalize_values_topk(instance: &PatrolInstance, k: u32) -> PatrolInstance {
    let scale = top_k_value(instance, k);
    let mut copy = instance.clone();
    for t in &mut copy.targets {
        t.spec.value /= scale;
    }
    copy
}

/// Defender utility when the targets in `lost` are compromised.
pub fn outcome_utility(lost: TargetSet, instance: &PatrolInstance) -> f64 {
    if lost.is_empty() {
        return 0.0;
    }
    -instance.value_of(lost)
}

/// An attack started at `turn` on a set of targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackEvent {
    pub turn: u32,
    pub targets: Vec<String>,
}

/// Resolution of a played game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub saved: Vec<String>,
    pub lost: Vec<String>,
    pub defender_utility: f64,
}

impl GameOutcome {
    pub fn from_sets(saved: TargetSet, lost: TargetSet, instance: &PatrolInstance) -> Self {
        let names = |s: TargetSet| -> Vec<String> {
            s.iter()
                .map(|t| instance.target_name(t).to_string())
                .collect()
        };
        GameOutcome {
            saved: names(saved.minus(lost)),
            lost: names(lost),
            defender_utility: outcome_utility(lost, instance),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig2_text() -> &'static str {
        r#"{
  "vertices": ["t1", "n3", "n1", "n4", "t2"],
  "edges": [["t1","n3",1],["n3","n1",1],["n1","n4",1],["n4","t2",1]],
  "targets": [{"vertex":"t1","value":1.0,"deadline":4},{"vertex":"t2","value":1.0,"deadline":4}],
  "k": 2
}"#
    }

    #[test]
    fn minimal_document() {
        let inst = load_instance(
            r#"{"vertices":["a","b"],"edges":[["a","b",1]],"targets":[{"vertex":"b","value":1.0,"deadline":1}],"k":1}"#,
        )
        .unwrap();
        assert_eq!(inst.vertex_count(), 2);
        assert_eq!(inst.target_count(), 1);
    }

    #[test]
    fn fig2_document() {
        let inst = load_instance(fig2_text()).unwrap();
        assert_eq!(inst.vertex_count(), 5);
        assert_eq!(inst.attacker_resources(), 2);
        let d = all_pairs_shortest_paths(&inst);
        let t1 = inst.vertex_index("t1").unwrap();
        let t2 = inst.vertex_index("t2").unwrap();
        assert_eq!(d.dist(t1, t2), 4);
        assert_eq!(d.path(t1, t2).len(), 5);
    }

    #[test]
    fn zero_deadline_rejected() {
        let err = load_instance(
            r#"{"vertices":["a","b"],"edges":[["a","b",1]],"targets":[{"vertex":"b","value":1.0,"deadline":0}],"k":1}"#,
        )
        .unwrap_err();
        assert_eq!(err.invariant(), Some("deadline >= 1"));
    }

    #[test]
    fn other_validation_errors() {
        let cases = [
            (
                r#"{"vertices":["a","b","c"],"edges":[["a","b",1]],"targets":[],"k":1}"#,
                "connected graph",
            ),
            (
                r#"{"vertices":["a","b"],"edges":[["a","b",1]],"targets":[{"vertex":"b","value":1.5,"deadline":1}],"k":1}"#,
                "value in (0,1]",
            ),
            (
                r#"{"vertices":["a","b"],"edges":[["a","x",1]],"targets":[],"k":1}"#,
                "known vertex",
            ),
            (
                r#"{"vertices":["a","b"],"edges":[["a","b",0]],"targets":[],"k":1}"#,
                "edge weight >= 1",
            ),
            (
                r#"{"vertices":["a","b"],"edges":[["a","b",1]],"targets":[],"k":0}"#,
                "k >= 1",
            ),
        ];
        for (doc, invariant) in cases {
            assert_eq!(
                load_instance(doc).unwrap_err().invariant(),
                Some(invariant),
                "{doc}"
            );
        }
    }

    #[test]
    fn unknown_field_is_a_parse_error() {
        let err = load_instance(
            r#"{"vertices":["a"],"edges":[],"targets":[],"k":1,
"colour":"red"}"#,
        )
        .unwrap_err();
        match err {
            ModelError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn expansion_subdivides_heavy_edges() {
        let inst = PatrolInstance::new(
            vec!["u".into(), "v".into()],
            vec![("u".into(), "v".into(), 3)],
            vec![(
                "v".into(),
                TargetSpec {
                    value: 1.0,
                    deadline: 3,
                },
            )],
            1,
            None,
        )
        .unwrap();
        let unit = expand_to_unit_time(&inst);
        assert_eq!(unit.vertex_count(), 4);
        assert!(unit.is_unit_time());
        assert!(unit.vertex_index("u~v#1").is_some());
        assert!(unit.vertex_index("u~v#2").is_some());
        assert_eq!(unit.target_count(), 1);
        let d = all_pairs_shortest_paths(&unit);
        assert_eq!(
            d.dist(
                unit.vertex_index("u").unwrap(),
                unit.vertex_index("v").unwrap()
            ),
            3
        );
    }

    #[test]
    fn expansion_of_unit_graph_is_identity() {
        let inst = load_instance(fig2_text()).unwrap();
        assert_eq!(expand_to_unit_time(&inst), inst);
    }

    #[test]
    fn normalization_examples() {
        let eps = 0.01;
        let inst = PatrolInstance::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![("a".into(), "b".into(), 1), ("b".into(), "c".into(), 1)],
            vec![
                (
                    "a".into(),
                    TargetSpec {
                        value: 1.0,
                        deadline: 1,
                    },
                ),
                (
                    "b".into(),
                    TargetSpec {
                        value: 1.0,
                        deadline: 1,
                    },
                ),
                (
                    "c".into(),
                    TargetSpec {
                        value: eps,
                        deadline: 1,
                    },
                ),
            ],
            2,
            None,
        )
        .unwrap();
        let norm = normalize_values_topk(&inst, 2);
        assert_eq!(norm.value(0), 0.5);
        assert_eq!(norm.value(1), 0.5);
        assert!((norm.value(2) - eps / 2.0).abs() < 1e-15);

        let single = PatrolInstance::new(
            vec!["a".into()],
            vec![],
            vec![(
                "a".into(),
                TargetSpec {
                    value: 0.8,
                    deadline: 1,
                },
            )],
            1,
            None,
        )
        .unwrap();
        assert_eq!(normalize_values_topk(&single, 1).value(0), 1.0);
    }

    #[test]
    fn utility_of_losses() {
        let inst = load_instance(fig2_text()).unwrap();
        assert_eq!(outcome_utility(TargetSet::EMPTY, &inst), 0.0);
        assert_eq!(outcome_utility(inst.all_targets(), &inst), -2.0);
        let single = PatrolInstance::new(
            vec!["a".into()],
            vec![],
            vec![(
                "a".into(),
                TargetSpec {
                    value: 0.7,
                    deadline: 1,
                },
            )],
            1,
            None,
        )
        .unwrap();
        assert_eq!(outcome_utility(TargetSet::singleton(0), &single), -0.7);
    }

    #[test]
    fn document_roundtrip() {
        let inst = load_instance(fig2_text()).unwrap();
        assert_eq!(load_instance(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn target_set_operations() {
        let s: TargetSet = [0, 3, 5].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(s.contains(3) && !s.contains(4));
        assert!(TargetSet::singleton(3).is_subset(s));
        assert_eq!(s.without(3).with(1), [0, 1, 5].into_iter().collect());
    }
}

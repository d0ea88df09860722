use crate::model::{
    all_pairs_shortest_paths, expand_with_chains, ChainVertex, DistanceMatrix, PatrolInstance,
    TargetIx, VertexIx,
};
use crate::symmetry::Symmetry;

/// A unit-time instance together with its distance matrix.
///
/// Every solver works on this form: weighted edges are subdivided once
/// here and never seen again.
#[derive(Debug, Clone)]
pub struct Game {
    pub instance: PatrolInstance,
    pub dist: DistanceMatrix,
    pub original: PatrolInstance,
    pub chains: Vec<ChainVertex>,
    pub(crate) symmetry: Symmetry,
}

impl Game {
    pub fn new(instance: &PatrolInstance) -> Self {
        let (expanded, chains) = expand_with_chains(instance);
        let dist = all_pairs_shortest_paths(&expanded);
        let symmetry = Symmetry::build(instance, &expanded, &chains);
        Game {
            instance: expanded,
            dist,
            original: instance.clone(),
            chains,
            symmetry,
        }
    }

    /// Same game with a different number of Attacker resources.
    pub fn with_k(&self, k: u32) -> Self {
        let mut copy = self.clone();
        copy.instance = self
            .instance
            .with_attacker_resources(k)
            .expect("k >= 1 checked by caller");
        copy.original = self
            .original
            .with_attacker_resources(k)
            .expect("k >= 1 checked by caller");
        copy
    }

    pub fn n(&self) -> usize {
        self.instance.vertex_count()
    }

    pub fn k(&self) -> u32 {
        self.instance.attacker_resources()
    }

    pub fn target_count(&self) -> usize {
        self.instance.target_count()
    }

    pub fn target_vertex(&self, t: TargetIx) -> VertexIx {
        self.instance.target(t).vertex
    }

    /// Turns needed to reach target `t` from `v`.
    pub fn to_target(&self, v: VertexIx, t: TargetIx) -> u32 {
        self.dist.dist(v, self.target_vertex(t))
    }

    /// Stay first, then neighbours in identifier order.
    pub fn moves(&self, v: VertexIx) -> impl Iterator<Item = VertexIx> + '_ {
        std::iter::once(v).chain(self.instance.neighbors(v).iter().map(|&(u, _)| u))
    }

    pub fn name(&self, v: VertexIx) -> &str {
        self.instance.vertex_name(v)
    }

    pub fn names(&self, path: &[VertexIx]) -> Vec<String> {
        path.iter().map(|&v| self.name(v).to_string()).collect()
    }

    pub fn target_names(&self, set: crate::model::TargetSet) -> Vec<String> {
        set.iter()
            .map(|t| self.instance.target_name(t).to_string())
            .collect()
    }

    pub fn vertex(&self, name: &str) -> Option<VertexIx> {
        self.instance.vertex_index(name)
    }

    pub fn target(&self, name: &str) -> Option<TargetIx> {
        self.instance.target_index(name)
    }
}

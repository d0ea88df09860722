#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqpatrol_core::{PatrolInstance, TargetSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random instance: a random spanning tree plus extra edges.
/// Values are multiples of 1/4 so sums compare exactly.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    vertices: usize,
    targets: usize,
    max_weight: u32,
    max_deadline: u32,
    k: u32,
) -> PatrolInstance {
    let names: Vec<String> = (0..vertices).map(|i| format!("x{i}")).collect();
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for i in 1..vertices {
        let j = rng.gen_range(0..i);
        seen.insert((j, i));
        edges.push((
            names[j].clone(),
            names[i].clone(),
            rng.gen_range(1..=max_weight),
        ));
    }
    for _ in 0..rng.gen_range(0..=vertices) {
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            edges.push((
                names[key.0].clone(),
                names[key.1].clone(),
                rng.gen_range(1..=max_weight),
            ));
        }
    }
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let targets = order[..targets.min(vertices)]
        .iter()
        .map(|&i| {
            (
                names[i].clone(),
                TargetSpec {
                    value: rng.gen_range(1..=4) as f64 / 4.0,
                    deadline: rng.gen_range(1..=max_deadline),
                },
            )
        })
        .collect();
    PatrolInstance::new(names, edges, targets, k, None).expect("random instance is valid")
}

/// Runs `f` on a thread with a large stack, for deep memoized recursions.
pub fn with_big_stack<F: FnOnce() + Send + 'static>(f: F) {
    std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(f)
        .unwrap()
        .join()
        .unwrap();
}

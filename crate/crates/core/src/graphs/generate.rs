use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GraphError, PlantedGraph};
use crate::seed::{self, tags};

/// Tuning of the matcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorOptions {
    /// Bound on repair sweeps over the defective edges.
    pub repair_sweeps: usize,
    /// Double-edge-swap attempts per edge after repair.
    pub mixing_sweeps: usize,
    /// Lower bound on the total number of mixing attempts.
    pub min_mixing_attempts: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self { repair_sweeps: 1000, mixing_sweeps: 5, min_mixing_attempts: 2000 }
    }
}

#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u64 keys are hashed")
    }
    fn write_u64(&mut self, k: u64) {
        self.0 = (k ^ (k >> 29)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    }
}

type EdgeCounts = HashMap<u64, u32, BuildHasherDefault<KeyHasher>>;

#[inline]
fn key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

struct Multigraph {
    edges: Vec<(u32, u32)>,
    counts: EdgeCounts,
}

impl Multigraph {
    fn new(edges: Vec<(u32, u32)>) -> Self {
        let mut counts = EdgeCounts::default();
        counts.reserve(edges.len());
        for &(u, v) in &edges {
            *counts.entry(key(u, v)).or_insert(0) += 1;
        }
        Self { edges, counts }
    }

    fn is_bad(&self, i: usize) -> bool {
        let (u, v) = self.edges[i];
        u == v || self.counts[&key(u, v)] > 1
    }

    fn remove(&mut self, u: u32, v: u32) {
        let k = key(u, v);
        let c = self.counts.get_mut(&k).expect("edge present");
        *c -= 1;
        if *c == 0 {
            self.counts.remove(&k);
        }
    }

    fn add(&mut self, u: u32, v: u32) {
        *self.counts.entry(key(u, v)).or_insert(0) += 1;
    }

    fn present(&self, u: u32, v: u32) -> bool {
        self.counts.contains_key(&key(u, v))
    }

    /// Replaces edges `i`, `j` by `(a, c), (b, d)` if both are new, distinct
    /// and loop-free.
    fn try_swap(&mut self, i: usize, j: usize, flip: bool) -> bool {
        let (a, b) = self.edges[i];
        let (c, d) = if flip { (self.edges[j].1, self.edges[j].0) } else { self.edges[j] };
        if a == c || b == d {
            return false;
        }
        self.remove(a, b);
        self.remove(c, d);
        if key(a, c) != key(b, d) && !self.present(a, c) && !self.present(b, d) {
            self.add(a, c);
            self.add(b, d);
            self.edges[i] = (a, c);
            self.edges[j] = (b, d);
            true
        } else {
            self.add(a, b);
            self.add(c, d);
            false
        }
    }
}

pub fn generate_two_block_graph(
    degrees: &[u32],
    labels: &[u8],
    gamma: f64,
    seed: u64,
) -> Result<PlantedGraph, GraphError> {
    generate_two_block_graph_with(degrees, labels, gamma, seed, &GeneratorOptions::default())
}

/// Stub matching with exactly `round(γn)` cross pairs, followed by
/// double-edge swaps that keep the cross count, remove loops and repeats and
/// then randomize the realization. A matching that cannot be repaired is
/// redrawn.
pub fn generate_two_block_graph_with(
    degrees: &[u32],
    labels: &[u8],
    gamma: f64,
    seed: u64,
    opts: &GeneratorOptions,
) -> Result<PlantedGraph, GraphError> {
    let n = degrees.len();
    if labels.len() != n {
        return Err(GraphError::InvalidParams(format!(
            "{} labels for {n} degrees",
            labels.len()
        )));
    }
    if labels.iter().any(|&l| l != 1 && l != 2) {
        return Err(GraphError::InvalidParams("labels must be 1 or 2".into()));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(GraphError::InvalidParams(format!("gamma = {gamma}")));
    }
    let x = (gamma * n as f64).round() as usize;
    let mut stubs: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for (i, (&d, &l)) in degrees.iter().zip(labels).enumerate() {
        stubs[(l - 1) as usize].extend(std::iter::repeat(i as u32).take(d as usize));
    }
    for (r, s) in stubs.iter().enumerate() {
        if s.len() < x {
            return Err(GraphError::StubImbalance(format!(
                "module {} has {} stubs for {x} cross edges",
                r + 1,
                s.len()
            )));
        }
        if (s.len() - x) % 2 != 0 {
            return Err(GraphError::StubImbalance(format!(
                "module {} leaves an odd number of stubs after {x} cross edges",
                r + 1
            )));
        }
    }

    // A matching whose defects cannot be swapped away is discarded whole.
    let mut last_err = None;
    for attempt in 0..MATCHING_ATTEMPTS {
        let mut rng = seed::stream(seed::mix(seed, &[attempt]), tags::MATCHING);
        let mut g = match_stubs(&stubs, x, &mut rng);
        match repair(&mut g, labels, opts.repair_sweeps, &mut rng) {
            Ok(()) => {
                mix(&mut g, labels, opts, &mut rng);
                return PlantedGraph::from_edges(n, &g.edges, labels.to_vec(), gamma, seed);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

const MATCHING_ATTEMPTS: u64 = 20;

/// Random pairing: `x` cross pairs, then the remaining stubs of each module
/// among themselves.
fn match_stubs(stubs: &[Vec<u32>; 2], x: usize, rng: &mut ChaCha8Rng) -> Multigraph {
    let mut stubs = stubs.clone();
    for s in stubs.iter_mut() {
        s.shuffle(rng);
    }
    let mut edges: Vec<(u32, u32)> = (0..x).map(|k| (stubs[0][k], stubs[1][k])).collect();
    for s in &stubs {
        edges.extend(s[x..].chunks_exact(2).map(|p| (p[0], p[1])));
    }
    Multigraph::new(edges)
}


fn preserves_cross_count(g: &Multigraph, labels: &[u8], i: usize, j: usize, flip: bool) -> bool {
    let cross = |u: u32, v: u32| (labels[u as usize] != labels[v as usize]) as u8;
    let (a, b) = g.edges[i];
    let (c, d) = if flip { (g.edges[j].1, g.edges[j].0) } else { g.edges[j] };
    cross(a, b) + cross(c, d) == cross(a, c) + cross(b, d)
}

fn repair(g: &mut Multigraph, labels: &[u8], sweeps: usize, rng: &mut ChaCha8Rng) -> Result<(), GraphError> {
    let m = g.edges.len();
    let mut bad: Vec<usize> = (0..m).filter(|&i| g.is_bad(i)).collect();
    let mut sweep = 0;
    while !bad.is_empty() {
        if sweep == sweeps {
            return Err(GraphError::RepairFailed { bad: bad.len(), sweeps });
        }
        for &i in &bad {
            if !g.is_bad(i) {
                continue;
            }
            let j = rng.gen_range(0..m);
            if j == i {
                continue;
            }
            let flip = rng.gen::<bool>();
            if preserves_cross_count(g, labels, i, j, flip) {
                g.try_swap(i, j, flip);
            }
        }
        bad.retain(|&i| g.is_bad(i));
        // A swap can turn a partner edge into a repeat.
        if bad.is_empty() {
            bad = (0..m).filter(|&i| g.is_bad(i)).collect();
        }
        sweep += 1;
    }
    Ok(())
}

/// Uniform double-edge swaps that keep the simple-graph property and the
/// number of cross edges.
fn mix(g: &mut Multigraph, labels: &[u8], opts: &GeneratorOptions, rng: &mut ChaCha8Rng) {
    let m = g.edges.len();
    if m < 2 {
        return;
    }
    let attempts = (opts.mixing_sweeps * m).max(opts.min_mixing_attempts);
    for _ in 0..attempts {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        let flip = rng.gen::<bool>();
        if i != j && preserves_cross_count(g, labels, i, j, flip) {
            g.try_swap(i, j, flip);
        }
    }
}

//! Microcanonical two-block random graphs.

mod count;
mod degree;
mod generate;
mod io;

pub use count::{log_count_graphs, EnsembleCount};
pub use degree::{sample_degree_sequence, DegreeDistribution, DegreeSpec};
pub use generate::{generate_two_block_graph, generate_two_block_graph_with, GeneratorOptions};
pub use io::{read_edge_list, read_labels, write_edge_list, write_labels, EdgeList};

pub(crate) use degree::{cumulative, draw};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid degree spec: {0}")]
    InvalidSpec(String),
    #[error("invalid block parameters: {0}")]
    InvalidParams(String),
    #[error("stub parity of module {module} could not be repaired after {attempts} attempts")]
    ParityUnrepairable { module: usize, attempts: usize },
    #[error("{bad} self-loops or multi-edges remain after {sweeps} repair sweeps")]
    RepairFailed { bad: usize, sweeps: usize },
    #[error("stub imbalance: {0}")]
    StubImbalance(String),
    #[error("ensemble count undefined: {0}")]
    InvalidRegion(String),
    #[error("malformed graph file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Size, module fractions and cross-edge density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockParams {
    pub n: usize,
    pub p1: f64,
    pub gamma: f64,
}

impl BlockParams {
    pub fn new(n: usize, p1: f64, gamma: f64) -> Self {
        Self { n, p1, gamma }
    }

    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }

    /// `[N1, N2]` by largest remainder.
    pub fn module_sizes(&self) -> [usize; 2] {
        let c = degree::largest_remainder(self.n, &[self.p1, self.p2()]);
        [c[0], c[1]]
    }

    /// `round(γ n)`.
    pub fn cross_edges(&self) -> usize {
        (self.gamma * self.n as f64).round() as usize
    }

    pub fn validate(&self, spec: &DegreeSpec) -> Result<(), GraphError> {
        if !(self.p1 > 0.0 && self.p1 < 1.0) {
            return Err(GraphError::InvalidParams(format!("p1 = {} outside (0, 1)", self.p1)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(GraphError::InvalidParams(format!("gamma = {} negative", self.gamma)));
        }
        if self.n < 2 {
            return Err(GraphError::InvalidParams("n < 2".into()));
        }
        let limit = spec.mean_degree() * self.p1.min(self.p2());
        if self.gamma > limit + 1e-12 {
            return Err(GraphError::InvalidParams(format!(
                "gamma = {} exceeds cbar*min(p1,p2) = {limit}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Module labels in `{1, 2}`: the first `N1` vertices form module 1.
pub fn planted_labels(params: &BlockParams) -> Vec<u8> {
    let [n1, n2] = params.module_sizes();
    let mut labels = vec![1u8; n1];
    labels.resize(n1 + n2, 2);
    labels
}

/// Simple undirected graph with planted labels, stored in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraph {
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub labels: Vec<u8>,
    pub degrees: Vec<u32>,
    pub gamma: f64,
    pub seed: u64,
}

impl PlantedGraph {
    /// Builds the compressed rows from an edge list; duplicates and loops
    /// are rejected.
    pub fn from_edges(
        n: usize,
        edges: &[(u32, u32)],
        labels: Vec<u8>,
        gamma: f64,
        seed: u64,
    ) -> Result<Self, GraphError> {
        if labels.len() != n {
            return Err(GraphError::Parse(format!("{} labels for {n} vertices", labels.len())));
        }
        let mut deg = vec![0u32; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::Parse(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(GraphError::Parse(format!("self-loop at {u}")));
            }
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + deg[i] as usize;
        }
        let mut fill = row_ptr.clone();
        let mut col_idx = vec![0u32; row_ptr[n]];
        for &(u, v) in edges {
            col_idx[fill[u as usize]] = v;
            fill[u as usize] += 1;
            col_idx[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for i in 0..n {
            let row = &mut col_idx[row_ptr[i]..row_ptr[i + 1]];
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::Parse(format!("multi-edge at vertex {i}")));
            }
        }
        Ok(Self { row_ptr, col_idx, labels, degrees: deg, gamma, seed })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.col_idx.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Edges `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for &v in self.neighbors(u) {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn cross_edge_count(&self) -> usize {
        self.edges()
            .iter()
            .filter(|&&(u, v)| self.labels[u as usize] != self.labels[v as usize])
            .count()
    }

    pub fn module_size(&self, r: u8) -> usize {
        self.labels.iter().filter(|&&l| l == r).count()
    }

    /// Symmetry, no loops or repeats, degrees equal row lengths.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n();
        if self.row_ptr.len() != n + 1 || self.degrees.len() != n {
            return Err("inconsistent dimensions".into());
        }
        for i in 0..n {
            let row = self.neighbors(i);
            if row.len() != self.degrees[i] as usize {
                return Err(format!("degree mismatch at {i}"));
            }
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("unsorted or repeated neighbour at {i}"));
                }
            }
            for &j in row {
                if j as usize == i {
                    return Err(format!("self-loop at {i}"));
                }
                if self.neighbors(j as usize).binary_search(&(i as u32)).is_err() {
                    return Err(format!("asymmetric entry ({i}, {j})"));
                }
            }
        }
        Ok(())
    }

    /// Component index per vertex, numbered in order of first appearance.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if comp[v as usize] == usize::MAX {
                        comp[v as usize] = count;
                        stack.push(v as usize);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    /// Induced subgraph on the largest component, with the original index of
    /// each retained vertex.
    pub fn largest_component(&self) -> (PlantedGraph, Vec<usize>) {
        let (count, comp) = self.components();
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
        let keep: Vec<usize> = (0..self.n()).filter(|&i| comp[i] == best).collect();
        let mut index = vec![u32::MAX; self.n()];
        for (k, &i) in keep.iter().enumerate() {
            index[i] = k as u32;
        }
        let edges: Vec<(u32, u32)> = self
            .edges()
            .into_iter()
            .filter(|&(u, _)| comp[u as usize] == best)
            .map(|(u, v)| (index[u as usize], index[v as usize]))
            .collect();
        let labels = keep.iter().map(|&i| self.labels[i]).collect();
        let sub = PlantedGraph::from_edges(keep.len(), &edges, labels, self.gamma, self.seed)
            .expect("subgraph of a simple graph is simple");
        (sub, keep)
    }
}

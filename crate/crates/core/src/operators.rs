//! Sparse Laplacians.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graphs::PlantedGraph;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("vertex {0} has degree zero; the normalized Laplacian is undefined")]
    ZeroDegreeVertex(usize),
    #[error("dimension mismatch: matrix is {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `L = D − A` or `𝓛 = I − D^{-1/2} A D^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianKind {
    Unnormalized,
    Normalized,
}

impl std::fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LaplacianKind::Unnormalized => "L",
            LaplacianKind::Normalized => "ncut",
        })
    }
}

impl std::str::FromStr for LaplacianKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "l" | "unnormalized" | "ratiocut" => Ok(LaplacianKind::Unnormalized),
            "ncut" | "normalized" => Ok(LaplacianKind::Normalized),
            _ => Err(format!("unknown Laplacian '{s}'")),
        }
    }
}

/// Symmetric matrix in compressed rows, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl SparseSymMatrix {
    /// From per-row `(column, value)` lists. The caller guarantees symmetry.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col = Vec::new();
        let mut val = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                col.push(c);
                val.push(v);
            }
            row_ptr.push(col.len());
        }
        Self { n, row_ptr, col, val }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col[s..e].iter().map(|&c| c as usize).zip(self.val[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col[s..e].binary_search(&(j as u32)) {
            Ok(k) => self.val[s + k],
            Err(_) => 0.0,
        }
    }

    /// `y = M x`, rows accumulated left to right.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in s..e {
                acc += self.val[k] * x[self.col[k] as usize];
            }
            *yi = acc;
        }
    }

    /// Largest absolute row sum; bounds the spectrum from above.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.val[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|M_ij − M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

pub fn matvec(m: &SparseSymMatrix, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
    if x.len() != m.dim() {
        return Err(OperatorError::DimensionMismatch { expected: m.dim(), got: x.len() });
    }
    let mut y = vec![0.0; m.dim()];
    m.apply(x, &mut y);
    Ok(y)
}

pub fn build_laplacian(g: &PlantedGraph, kind: LaplacianKind) -> Result<SparseSymMatrix, OperatorError> {
    let n = g.n();
    if kind == LaplacianKind::Normalized {
        if let Some(i) = g.degrees.iter().position(|&d| d == 0) {
            return Err(OperatorError::ZeroDegreeVertex(i));
        }
    }
    let inv_sqrt: Vec<f64> = g.degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col = Vec::with_capacity(g.col_idx.len() + n);
    let mut val = Vec::with_capacity(g.col_idx.len() + n);
    for i in 0..n {
        let diag = match kind {
            LaplacianKind::Unnormalized => g.degrees[i] as f64,
            LaplacianKind::Normalized => 1.0,
        };
        let mut placed = false;
        for &j in g.neighbors(i) {
            if !placed && j as usize > i {
                col.push(i as u32);
                val.push(diag);
                placed = true;
            }
            col.push(j);
            val.push(match kind {
                LaplacianKind::Unnormalized => -1.0,
                LaplacianKind::Normalized => -inv_sqrt[i] * inv_sqrt[j as usize],
            });
        }
        if !placed {
            col.push(i as u32);
            val.push(diag);
        }
        row_ptr.push(col.len());
    }
    Ok(SparseSymMatrix { n, row_ptr, col, val })
}

/// Null vector of the Laplacian: `1` for `L`, `D^{1/2} 1` for `𝓛`.
pub fn zero_mode(g: &PlantedGraph, kind: LaplacianKind) -> Vec<f64> {
    match kind {
        LaplacianKind::Unnormalized => vec![1.0; g.n()],
        LaplacianKind::Normalized => g.degrees.iter().map(|&d| (d as f64).sqrt()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> PlantedGraph {
        PlantedGraph::from_edges(2, &[(0, 1)], vec![1, 2], 0.5, 0).unwrap()
    }

    #[test]
    fn single_edge_laplacians() {
        for kind in [LaplacianKind::Unnormalized, LaplacianKind::Normalized] {
            let m = build_laplacian(&single_edge(), kind).unwrap();
            let d = m.to_dense();
            assert_eq!(d, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        }
    }

    #[test]
    fn zero_degree_rejected() {
        let g = PlantedGraph::from_edges(3, &[(0, 1)], vec![1, 1, 2], 0.0, 0).unwrap();
        assert_eq!(
            build_laplacian(&g, LaplacianKind::Normalized),
            Err(OperatorError::ZeroDegreeVertex(2))
        );
        assert!(build_laplacian(&g, LaplacianKind::Unnormalized).is_ok());
    }

    #[test]
    fn diagonal_pattern() {
        let m = SparseSymMatrix::from_rows(vec![vec![(0, 2.0)], vec![(1, -3.0)], vec![(2, 0.5)]]);
        assert_eq!(matvec(&m, &[1.0, 2.0, 4.0]).unwrap(), vec![2.0, -6.0, 2.0]);
        assert_eq!(
            matvec(&m, &[1.0]),
            Err(OperatorError::DimensionMismatch { expected: 3, got: 1 })
        );
    }
}

//! Fiedler pair, dense oracle and eigenvector diagnostics.

mod lanczos;

pub use lanczos::{second_smallest_eigenpair, second_smallest_eigenpair_with, LanczosOptions};

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::operators::SparseSymMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum EigenError {
    #[error("no convergence after {matvecs} products (residual {residual:e})")]
    NoConvergence { matvecs: usize, residual: f64 },
    #[error("supplied zero mode is not a null vector (|Mz|/|z| = {0:e})")]
    BadZeroMode(f64),
    #[error("dense oracle limited to n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda2: f64,
    /// Unit norm, orthogonal to the zero mode.
    pub vector: Vec<f64>,
    /// Operator applications.
    pub iterations: usize,
    /// `|M v − λ2 v|`.
    pub residual: f64,
}

/// Full spectrum, ascending; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub const DENSE_LIMIT: usize = 2000;

pub fn dense_spectrum_oracle(m: &SparseSymMatrix) -> Result<DenseSpectrum, EigenError> {
    let n = m.dim();
    if n > DENSE_LIMIT {
        return Err(EigenError::TooLarge { n, limit: DENSE_LIMIT });
    }
    let eig = SymmetricEigen::new(m.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(DenseSpectrum { values, vectors })
}

/// `Σ x⁴ / (Σ x²)²`.
pub fn ipr(x: &[f64]) -> Result<f64, EigenError> {
    let s2: f64 = x.iter().map(|v| v * v).sum();
    if s2 == 0.0 {
        return Err(EigenError::ZeroVector);
    }
    let s4: f64 = x.iter().map(|v| (v * v) * (v * v)).sum();
    Ok(s4 / (s2 * s2))
}

/// Fraction of vertices whose sign class matches the planted module, best of
/// the two sign assignments. `x_i = 0` counts as module 1.
pub fn overlap(x: &[f64], labels: &[u8]) -> Result<f64, EigenError> {
    if x.len() != labels.len() {
        return Err(EigenError::LengthMismatch(x.len(), labels.len()));
    }
    if x.is_empty() {
        return Err(EigenError::ZeroVector);
    }
    let agree = x
        .iter()
        .zip(labels)
        .filter(|&(&v, &l)| (if v >= 0.0 { 1 } else { 2 }) == l)
        .count();
    let f = agree as f64 / x.len() as f64;
    Ok(f.max(1.0 - f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ipr_limits() {
        assert!((ipr(&[1.0; 10]).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(ipr(&[0.0, 3.0, 0.0]).unwrap(), 1.0);
        assert_eq!(ipr(&[1.0, 1.0, 0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(ipr(&[0.0, 0.0]), Err(EigenError::ZeroVector));
    }

    #[test]
    fn overlap_perfect_and_flipped() {
        let labels = [1, 1, 2, 2];
        assert_eq!(overlap(&[1.0, 1.0, -1.0, -1.0], &labels).unwrap(), 1.0);
        assert_eq!(overlap(&[-1.0, -1.0, 1.0, 1.0], &labels).unwrap(), 1.0);
        assert_eq!(overlap(&[0.0, 0.0, -1.0, 1.0], &labels).unwrap(), 0.75);
        assert!(matches!(overlap(&[1.0], &labels), Err(EigenError::LengthMismatch(1, 4))));
    }
}

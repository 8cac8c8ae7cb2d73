use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::{EigenError, EigenResult};
use crate::operators::SparseSymMatrix;
use crate::seed::{self, tags};

/// Thick-restart Lanczos settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Bound on `|M v − λ v|` for a unit vector.
    pub tol: f64,
    /// Operator applications before giving up; `None` means `10 n`.
    pub max_matvecs: Option<usize>,
    /// Krylov basis size per cycle.
    pub basis: usize,
    /// Ritz vectors retained on restart.
    pub keep: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_matvecs: None, basis: 32, keep: 12 }
    }
}

const NULL_TOL: f64 = 1e-8;

pub fn second_smallest_eigenpair(
    m: &SparseSymMatrix,
    zero_mode: &[f64],
    seed: u64,
) -> Result<EigenResult, EigenError> {
    second_smallest_eigenpair_with(m, zero_mode, seed, &LanczosOptions::default())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Classical Gram-Schmidt against `z` and the first `count` basis vectors,
/// repeated once when the first pass cancels more than half the norm.
/// Returns the accumulated coefficients on the basis.
fn orthogonalize(w: &mut [f64], z: &[f64], basis: &[f64], count: usize, n: usize) -> Vec<f64> {
    let mut h = vec![0.0; count];
    let mut c = vec![0.0; count];
    let mut before = norm(w);
    for _ in 0..2 {
        let cz = dot(z, w);
        axpy(-cz, z, w);
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = dot(&basis[i * n..(i + 1) * n], w);
        }
        for (i, &ci) in c.iter().enumerate() {
            axpy(-ci, &basis[i * n..(i + 1) * n], w);
            h[i] += ci;
        }
        let after = norm(w);
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            break;
        }
        before = after;
    }
    h
}

/// Smallest eigenpair of `m` on the orthogonal complement of `zero_mode`.
///
/// Runs Lanczos on `σI − M` with `σ` the Gershgorin bound, so the wanted pair
/// is the largest one of a positive semidefinite operator. Every new Krylov
/// vector is orthogonalized against the zero mode and the whole basis.
pub fn second_smallest_eigenpair_with(
    m: &SparseSymMatrix,
    zero_mode: &[f64],
    seed: u64,
    opts: &LanczosOptions,
) -> Result<EigenResult, EigenError> {
    let n = m.dim();
    if zero_mode.len() != n {
        return Err(EigenError::LengthMismatch(zero_mode.len(), n));
    }
    let zn = norm(zero_mode);
    if zn == 0.0 {
        return Err(EigenError::BadZeroMode(f64::INFINITY));
    }
    let mut mz = vec![0.0; n];
    m.apply(zero_mode, &mut mz);
    let null_res = norm(&mz) / zn;
    if null_res >= NULL_TOL {
        return Err(EigenError::BadZeroMode(null_res));
    }
    if n < 2 {
        return Err(EigenError::LengthMismatch(n, 2));
    }
    let z: Vec<f64> = zero_mode.iter().map(|v| v / zn).collect();
    let max_mv = opts.max_matvecs.unwrap_or(10 * n);
    let mut rng = seed::stream(seed, tags::LANCZOS);

    let random_unit = |rng: &mut rand_chacha::ChaCha8Rng, basis: &[f64], count: usize| {
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            orthogonalize(&mut v, &z, basis, count, n);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return v;
            }
        }
    };

    if n == 2 {
        let v = vec![z[1], -z[0]];
        return finish(m, v, 1);
    }

    let dim = opts.basis.max(2).min(n - 1);
    let keep = opts.keep.max(1).min(dim - 1);
    let sigma = m.gershgorin_bound();
    let mut basis = vec![0.0; (dim + 1) * n];
    let v0 = random_unit(&mut rng, &basis, 0);
    basis[..n].copy_from_slice(&v0);

    let mut t = DMatrix::<f64>::zeros(dim, dim);
    let mut w = vec![0.0; n];
    let mut start = 0;
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;

    loop {
        let mut beta_last = 0.0;
        let mut tail = vec![0.0; n];
        for j in start..dim {
            {
                let vj = &basis[j * n..(j + 1) * n];
                m.apply(vj, &mut w);
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi = sigma * vi - *wi;
                }
            }
            matvecs += 1;
            let h = orthogonalize(&mut w, &z, &basis, j + 1, n);
            for (i, &hi) in h.iter().enumerate() {
                t[(i, j)] = hi;
                t[(j, i)] = hi;
            }
            let beta = norm(&w);
            let invariant = beta <= 1e-12 * sigma.max(1.0);
            if j + 1 < dim {
                let next = if invariant {
                    random_unit(&mut rng, &basis, j + 1)
                } else {
                    w.iter().map(|x| x / beta).collect()
                };
                basis[(j + 1) * n..(j + 2) * n].copy_from_slice(&next);
            } else {
                beta_last = if invariant { 0.0 } else { beta };
                if !invariant {
                    tail.iter_mut().zip(&w).for_each(|(d, x)| *d = x / beta);
                }
            }
        }

        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let y0 = eig.eigenvectors.column(order[0]);
        let estimate = beta_last * y0[dim - 1].abs();

        if estimate <= 0.5 * opts.tol || matvecs >= max_mv || dim == n - 1 {
            let mut u = vec![0.0; n];
            for l in 0..dim {
                axpy(y0[l], &basis[l * n..(l + 1) * n], &mut u);
            }
            let nu = norm(&u);
            u.iter_mut().for_each(|x| *x /= nu);
            let out = finish(m, u, matvecs)?;
            last_residual = out.residual;
            if out.residual <= opts.tol {
                return Ok(out);
            }
        }
        if matvecs >= max_mv {
            return Err(EigenError::NoConvergence { matvecs, residual: last_residual.min(estimate) });
        }

        // Thick restart on the leading Ritz vectors plus the residual direction.
        let mut ritz = vec![0.0; (keep + 1) * n];
        for (i, &k) in order.iter().take(keep).enumerate() {
            let y = eig.eigenvectors.column(k);
            let dst = &mut ritz[i * n..(i + 1) * n];
            for l in 0..dim {
                axpy(y[l], &basis[l * n..(l + 1) * n], dst);
            }
        }
        basis[..keep * n].copy_from_slice(&ritz[..keep * n]);
        let next = if beta_last > 0.0 {
            let mut r = tail;
            orthogonalize(&mut r, &z, &basis, keep, n);
            let nr = norm(&r);
            if nr > 1e-8 {
                r.iter_mut().for_each(|x| *x /= nr);
                r
            } else {
                random_unit(&mut rng, &basis, keep)
            }
        } else {
            random_unit(&mut rng, &basis, keep)
        };
        basis[keep * n..(keep + 1) * n].copy_from_slice(&next);
        t.fill(0.0);
        for (i, &k) in order.iter().take(keep).enumerate() {
            t[(i, i)] = eig.eigenvalues[k];
        }
        start = keep;
    }
}

fn finish(m: &SparseSymMatrix, mut u: Vec<f64>, matvecs: usize) -> Result<EigenResult, EigenError> {
    let n = u.len();
    let mut mu = vec![0.0; n];
    m.apply(&u, &mut mu);
    let lambda = dot(&u, &mu);
    let residual = mu.iter().zip(&u).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    // Fix the global sign: the entry of largest magnitude is positive.
    let (imax, _) = u
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
    if u[imax] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(EigenResult { lambda2: lambda, vector: u, iterations: matvecs, residual })
}

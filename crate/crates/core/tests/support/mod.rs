//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use gloss_core::dataset::LabeledDataset;
use gloss_core::linalg::Matrix;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Labels covering every class at least twice, the rest uniform.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| if i < 2 * k { i % k } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    labels
}

/// Gaussian classes whose means differ on every feature by `signal`-scaled draws.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize, signal: f64) -> LabeledDataset {
    let labels = random_labels(rng, n, k);
    let means = random_matrix(rng, k, p);
    let x = Matrix::from_fn(n, p, |i, j| {
        let z: f64 = rng.sample(StandardNormal);
        z + signal * means[(labels[i], j)]
    });
    LabeledDataset::from_raw(x, labels, k, false).unwrap()
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn row_norms(b: &Matrix) -> Vec<f64> {
    (0..b.nrows()).map(|i| b.row(i).iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
}

pub fn support(b: &Matrix, threshold: f64) -> Vec<usize> {
    row_norms(b)
        .iter()
        .enumerate()
        .filter(|(_, n)| **n > threshold)
        .map(|(j, _)| j)
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn group_lasso_value(x: &DMatrix<f64>, t: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64, w: &[f64]) -> f64 {
    let r = t - x * b;
    let pen: f64 = (0..b.nrows()).map(|j| w[j] * b.row(j).norm()).sum();
    0.5 * r.norm_squared() + lambda * pen
}

fn block_prox(v: &[f64], m: usize, thresh: &[f64], out: &mut [f64]) {
    for (j, t) in thresh.iter().enumerate() {
        let row = &v[j * m..(j + 1) * m];
        let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = if n > *t { 1.0 - t / n } else { 0.0 };
        for a in 0..m {
            out[j * m + a] = s * row[a];
        }
    }
}

/// Accelerated proximal gradient with gradient-based restart on
/// `½‖T − XB‖²_F + λ Σ w_j ‖β^j‖`, run until the gradient map norm at the
/// extrapolated point is below `tol`. Returns the solution and its objective.
pub fn prox_grad_group_lasso(x: &Matrix, t: &Matrix, lambda: f64, w: &[f64], tol: f64) -> (Matrix, f64) {
    let (p, m) = (x.ncols(), t.ncols());
    let xn = to_na(x);
    let tn = to_na(t);
    let gn = xn.transpose() * &xn;
    let ctn = xn.transpose() * &tn;
    let l = SymmetricEigen::new(gn.clone()).eigenvalues.max().max(1e-12);
    let g: Vec<f64> = (0..p * p).map(|i| gn[(i / p, i % p)]).collect();
    let c: Vec<f64> = (0..p * m).map(|i| ctn[(i / m, i % m)]).collect();
    let thresh: Vec<f64> = w.iter().map(|wj| lambda * wj / l).collect();
    let mut b = vec![0.0; p * m];
    let mut y = b.clone();
    let mut next = b.clone();
    let mut step = b.clone();
    let mut tk = 1.0f64;
    for _ in 0..50_000_000u64 {
        // step = y − (G y − C)/L
        for j in 0..p {
            for a in 0..m {
                let mut gy = -c[j * m + a];
                for k in 0..p {
                    gy += g[j * p + k] * y[k * m + a];
                }
                step[j * m + a] = y[j * m + a] - gy / l;
            }
        }
        block_prox(&step, m, &thresh, &mut next);
        let gm: f64 = y.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() * l;
        if gm <= tol {
            b.copy_from_slice(&next);
            break;
        }
        // restart when the momentum points uphill
        let uphill: f64 = (0..p * m).map(|i| (y[i] - next[i]) * (next[i] - b[i])).sum();
        let tn1 = if uphill > 0.0 { 1.0 } else { (1.0 + (1.0 + 4.0 * tk * tk).sqrt()) / 2.0 };
        let mom = if uphill > 0.0 { 0.0 } else { (tk - 1.0) / tn1 };
        for i in 0..p * m {
            y[i] = next[i] + mom * (next[i] - b[i]);
        }
        b.copy_from_slice(&next);
        tk = tn1;
    }
    let bm = DMatrix::from_fn(p, m, |j, a| b[j * m + a]);
    let obj = group_lasso_value(&xn, &tn, &bm, lambda, w);
    (from_na(&bm), obj)
}

/// Cyclic coordinate descent for `½‖t − Xβ‖² + λ Σ w_j |β_j|`.
pub fn lasso_cd(x: &Matrix, t: &[f64], lambda: f64, w: &[f64]) -> Vec<f64> {
    let (n, p) = (x.nrows(), x.ncols());
    let col_sq: Vec<f64> = (0..p).map(|j| (0..n).map(|i| x[(i, j)] * x[(i, j)]).sum()).collect();
    let mut beta = vec![0.0; p];
    let mut r = t.to_vec();
    for _ in 0..1_000_000 {
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let rho: f64 = (0..n).map(|i| x[(i, j)] * r[i]).sum::<f64>() + col_sq[j] * beta[j];
            let thr = lambda * w[j];
            let new = if rho > thr {
                (rho - thr) / col_sq[j]
            } else if rho < -thr {
                (rho + thr) / col_sq[j]
            } else {
                0.0
            };
            let d = new - beta[j];
            if d != 0.0 {
                for i in 0..n {
                    r[i] -= x[(i, j)] * d;
                }
                beta[j] = new;
            }
            max_change = max_change.max(d.abs());
        }
        if max_change < 1e-15 {
            break;
        }
    }
    beta
}

/// Generalized eigenvalues of `(A, B)` with `B` positive definite, descending.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let l = b.clone().cholesky().expect("positive definite").l();
    let li = l.clone().try_inverse().unwrap();
    let c = &li * a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Leading generalized eigenvectors of `(A, B)` as columns.
pub fn generalized_eigenvectors(a: &DMatrix<f64>, b: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let l = b.clone().cholesky().expect("positive definite").l();
    let li = l.clone().try_inverse().unwrap();
    let c = &li * a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let u = DMatrix::from_fn(a.nrows(), m, |r, c| eig.eigenvectors[(r, order[c])]);
    li.transpose() * u
}

/// Sine of the largest principal angle between two column spaces.
pub fn max_principal_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let s = (qa.transpose() * qb).singular_values();
    let min_cos = s.iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
    (1.0 - min_cos * min_cos).max(0.0).sqrt()
}

/// `Y (YᵀY)⁻¹ Yᵀ`, materialized.
pub fn class_projector(y: &Matrix) -> DMatrix<f64> {
    let yn = to_na(y);
    let yty = yn.transpose() * &yn;
    &yn * yty.try_inverse().unwrap() * yn.transpose()
}

/// Central finite-difference gradient of `f` at `b`.
pub fn finite_difference(b: &Matrix, h: f64, f: impl Fn(&Matrix) -> f64) -> Matrix {
    let mut g = Matrix::zeros(b.nrows(), b.ncols());
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            let mut bp = b.clone();
            bp[(i, j)] += h;
            let mut bm = b.clone();
            bm[(i, j)] -= h;
            g[(i, j)] = (f(&bp) - f(&bm)) / (2.0 * h);
        }
    }
    g
}

//! Quadratic variational group-Lasso.
//!
//! The group-Lasso penalty `λ Σ_j w_j ‖β^j‖₂` on the rows of a `p × M` coefficient
//! matrix equals the minimum over `τ` of the adaptive quadratic penalty
//! `λ Σ_j w_j² ‖β^j‖₂² / τ_j` subject to `Σ τ_j ≤ Σ w_j ‖β^j‖₂`. On a fixed active
//! set the problem is then solved by alternating `Ω = diag(w_j / ‖β^j‖₂)` with the
//! ridge-like systems `(G_SS + λΩ) B_S = C_S`, which share one Cholesky factor
//! across all `M` right-hand sides.
//!
//! The loss is the quadratic `J(B) = c₀ − ⟨C, B⟩ + ½ tr(Bᵀ G B)`. For least squares
//! `½‖T − XB‖²_F` this is `G = XᵀX`, `C = XᵀT`, `c₀ = ½‖T‖²_F`; other Gram
//! operators (the diagonal within-class variant) plug in through [`Gram`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GlossError, Result};
use crate::linalg::{dot, norm2, Cholesky, Matrix};

/// Row norms below this are treated as zero during reweighting.
pub const NORM_FLOOR: f64 = 1e-10;

/// Ordered set of variable indices with nonzero coefficient rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActiveSet(Vec<usize>);

impl ActiveSet {
    pub fn empty() -> Self {
        ActiveSet(Vec::new())
    }

    /// Validates that `indices` are distinct and below `p`; the result is sorted.
    pub fn from_indices(mut indices: Vec<usize>, p: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&j| j >= p) {
            return Err(GlossError::DimensionMismatch {
                context: "active set index",
                expected: p,
                found: bad,
            });
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(GlossError::InvalidConfig("duplicate index in active set".into()));
        }
        Ok(ActiveSet(indices))
    }

    /// Rows of `b` whose norm is strictly positive.
    pub fn support_of(b: &Matrix) -> Self {
        ActiveSet(
            group_norms(b)
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0.0)
                .map(|(j, _)| j)
                .collect(),
        )
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// Position of `j` inside the set.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.0.binary_search(&j).ok()
    }

    /// Inserts `j`, returning its position.
    pub fn insert(&mut self, j: usize) -> usize {
        match self.0.binary_search(&j) {
            Ok(pos) => pos,
            Err(pos) => {
                self.0.insert(pos, j);
                pos
            }
        }
    }

    pub fn remove(&mut self, j: usize) -> Option<usize> {
        let pos = self.0.binary_search(&j).ok()?;
        self.0.remove(pos);
        Some(pos)
    }

    pub fn complement(&self, p: usize) -> Vec<usize> {
        (0..p).filter(|j| !self.contains(*j)).collect()
    }
}

/// Euclidean norm of every row `β^j`.
pub fn group_norms(b: &Matrix) -> Vec<f64> {
    b.row_norms()
}

/// Scatters the `|S| × M` rows of `b_s` into a `p × M` matrix.
pub fn expand_rows(active: &ActiveSet, b_s: &Matrix, p: usize) -> Matrix {
    let mut b = Matrix::zeros(p, b_s.ncols());
    for (r, &j) in active.indices().iter().enumerate() {
        b.row_mut(j).copy_from_slice(b_s.row(r));
    }
    b
}

/// Auxiliary variables of the variational penalty at a given coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyState {
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub tau: Vec<f64>,
    pub omega: Vec<f64>,
}

impl PenaltyState {
    /// The minimizing `τ_j = w_j ‖β^j‖₂` and `ω_j = w_j² / τ_j`; zero rows get the
    /// floored weight `w_j / NORM_FLOOR`.
    pub fn optimal_for(b: &Matrix, lambda: f64, weights: &[f64]) -> Self {
        let norms = group_norms(b);
        let tau: Vec<f64> = norms.iter().zip(weights).map(|(n, w)| w * n).collect();
        let omega = norms
            .iter()
            .zip(weights)
            .map(|(&n, &w)| w / n.max(NORM_FLOOR))
            .collect();
        PenaltyState {
            lambda,
            weights: weights.to_vec(),
            tau,
            omega,
        }
    }
}

/// Column access to a symmetric positive semidefinite `p × p` Gram operator.
pub trait Gram {
    fn dim(&self) -> usize;
    fn column(&self, j: usize) -> Vec<f64>;
}

/// `XᵀX` computed one column at a time from the design matrix.
#[derive(Debug, Clone, Copy)]
pub struct DesignGram<'a> {
    x: &'a Matrix,
}

impl<'a> DesignGram<'a> {
    pub fn new(x: &'a Matrix) -> Self {
        DesignGram { x }
    }
}

impl Gram for DesignGram<'_> {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.x.ncols()];
        for row in self.x.rows_iter() {
            let xj = row[j];
            if xj == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(row) {
                *o += xj * v;
            }
        }
        out
    }
}

/// An explicit Gram matrix.
#[derive(Debug, Clone)]
pub struct DenseGram(pub Matrix);

impl Gram for DenseGram {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j)
    }
}

/// Convergence controls of the reweighting loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    /// Stop when every active KKT residual is at most `tol · λ` ...
    pub tol: f64,
    /// ... and every row norm changed by at most this relative amount.
    pub norm_change_tol: f64,
    pub max_iter: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            tol: 1e-6,
            norm_change_tol: 1e-8,
            max_iter: 1000,
        }
    }
}

/// Result of [`QuadraticLoss::reweighted_fit`].
#[derive(Debug, Clone)]
pub struct InnerFit {
    /// Coefficients on the active set, `|S| × M`.
    pub b: Matrix,
    pub iterations: usize,
    pub converged: bool,
    /// Rows whose norm fell below [`NORM_FLOOR`]; candidates for removal.
    pub flagged: Vec<bool>,
    /// Group-Lasso objective at the initial point and after every iteration.
    pub objectives: Vec<f64>,
}

/// Optimality residuals: `(index, value)` pairs.
#[derive(Debug, Clone, Default)]
pub struct KktResiduals {
    /// `‖∂J/∂β^j + λ w_j β^j/‖β^j‖‖` on rows with nonzero norm.
    pub active: Vec<(usize, f64)>,
    /// `‖∂J/∂β^j‖ / w_j` on zero rows; optimal when at most `λ`.
    pub inactive: Vec<(usize, f64)>,
}

impl KktResiduals {
    pub fn max_active(&self) -> f64 {
        self.active.iter().fold(0.0, |m, (_, v)| m.max(*v))
    }

    pub fn max_inactive(&self) -> f64 {
        self.inactive.iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

/// The quadratic loss `c₀ − ⟨C, B⟩ + ½ tr(Bᵀ G B)` with lazily cached Gram columns.
#[derive(Debug, Clone)]
pub struct QuadraticLoss<G> {
    gram: G,
    cross: Matrix,
    offset: f64,
    cache: Vec<Option<Vec<f64>>>,
}

impl<'a> QuadraticLoss<DesignGram<'a>> {
    /// `J(B) = ½‖T − XB‖²_F`.
    pub fn least_squares(x: &'a Matrix, t: &Matrix) -> Result<Self> {
        if x.nrows() != t.nrows() {
            return Err(GlossError::DimensionMismatch {
                context: "least squares targets",
                expected: x.nrows(),
                found: t.nrows(),
            });
        }
        let cross = x.t_matmul(t)?;
        let offset = 0.5 * dot(t.as_slice(), t.as_slice());
        QuadraticLoss::new(DesignGram::new(x), cross, offset)
    }
}

impl<G: Gram> QuadraticLoss<G> {
    pub fn new(gram: G, cross: Matrix, offset: f64) -> Result<Self> {
        let p = gram.dim();
        if cross.nrows() != p {
            return Err(GlossError::DimensionMismatch {
                context: "QuadraticLoss cross term",
                expected: p,
                found: cross.nrows(),
            });
        }
        Ok(QuadraticLoss {
            gram,
            cross,
            offset,
            cache: vec![None; p],
        })
    }

    pub fn n_features(&self) -> usize {
        self.cross.nrows()
    }

    pub fn n_responses(&self) -> usize {
        self.cross.ncols()
    }

    /// `C`, the `p × M` linear term (`XᵀT` for least squares).
    pub fn cross(&self) -> &Matrix {
        &self.cross
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn gram(&self) -> &G {
        &self.gram
    }

    pub fn gram_column(&mut self, j: usize) -> &[f64] {
        if self.cache[j].is_none() {
            self.cache[j] = Some(self.gram.column(j));
        }
        self.cache[j].as_deref().unwrap_or(&[])
    }

    fn ensure_columns(&mut self, active: &ActiveSet) {
        for &j in active.indices() {
            if self.cache[j].is_none() {
                self.cache[j] = Some(self.gram.column(j));
            }
        }
    }

    fn cached(&self, j: usize) -> &[f64] {
        self.cache[j].as_deref().expect("gram column cached")
    }

    /// `G_SS`.
    pub fn gram_block(&mut self, active: &ActiveSet) -> Matrix {
        self.ensure_columns(active);
        let s = active.indices();
        Matrix::from_fn(s.len(), s.len(), |a, b| self.cached(s[b])[s[a]])
    }

    fn check_rows(&self, active: &ActiveSet, b_s: &Matrix) -> Result<()> {
        if b_s.nrows() != active.len() {
            return Err(GlossError::DimensionMismatch {
                context: "coefficient rows vs active set",
                expected: active.len(),
                found: b_s.nrows(),
            });
        }
        if b_s.ncols() != self.n_responses() {
            return Err(GlossError::DimensionMismatch {
                context: "coefficient columns",
                expected: self.n_responses(),
                found: b_s.ncols(),
            });
        }
        Ok(())
    }

    /// `J(B)` for `B` supported on `active`.
    pub fn loss(&mut self, active: &ActiveSet, b_s: &Matrix) -> Result<f64> {
        self.check_rows(active, b_s)?;
        self.ensure_columns(active);
        let s = active.indices();
        let mut lin = 0.0;
        let mut quad = 0.0;
        for (a, &ja) in s.iter().enumerate() {
            lin += dot(self.cross.row(ja), b_s.row(a));
            let col = self.cached(ja);
            for (b, &jb) in s.iter().enumerate() {
                quad += col[jb] * dot(b_s.row(a), b_s.row(b));
            }
        }
        Ok(self.offset - lin + 0.5 * quad)
    }

    /// `J(B) + λ Σ w_j ‖β^j‖₂`.
    pub fn objective(
        &mut self,
        active: &ActiveSet,
        b_s: &Matrix,
        lambda: f64,
        weights: &[f64],
    ) -> Result<f64> {
        let j = self.loss(active, b_s)?;
        let pen: f64 = active
            .indices()
            .iter()
            .zip(b_s.rows_iter())
            .map(|(&idx, row)| weights[idx] * norm2(row))
            .sum();
        Ok(j + lambda * pen)
    }

    /// Gradient rows `∂J/∂β^j = Σ_{k∈S} G_jk β^k − c_j` for each `j` in `rows`.
    pub fn gradient_rows(
        &mut self,
        active: &ActiveSet,
        b_s: &Matrix,
        rows: &[usize],
    ) -> Result<Matrix> {
        self.check_rows(active, b_s)?;
        self.ensure_columns(active);
        let m = self.n_responses();
        let mut out = Matrix::zeros(rows.len(), m);
        for (r, &j) in rows.iter().enumerate() {
            let o = out.row_mut(r);
            for (v, c) in o.iter_mut().zip(self.cross.row(j)) {
                *v = -c;
            }
            for (a, &ja) in active.indices().iter().enumerate() {
                let g = self.cached(ja)[j];
                if g == 0.0 {
                    continue;
                }
                for (v, bv) in o.iter_mut().zip(b_s.row(a)) {
                    *v += g * bv;
                }
            }
        }
        Ok(out)
    }

    /// Solves `(G_SS + λ diag(ω_S)) B_S = C_S` for all responses with one factorization.
    pub fn penalized_solve(
        &mut self,
        active: &ActiveSet,
        omega_s: &[f64],
        lambda: f64,
    ) -> Result<Matrix> {
        if omega_s.len() != active.len() {
            return Err(GlossError::DimensionMismatch {
                context: "penalty weights vs active set",
                expected: active.len(),
                found: omega_s.len(),
            });
        }
        let mut a = self.gram_block(active);
        for (i, w) in omega_s.iter().enumerate() {
            a[(i, i)] += lambda * w;
        }
        let rhs = self.cross.select_rows(active.indices());
        Cholesky::factor(&a)?.solve(&rhs)
    }

    /// KKT residuals of the group-Lasso problem at `B` supported on `active`.
    /// Rows of `active` with zero norm are reported with the inactive ones.
    pub fn kkt(
        &mut self,
        active: &ActiveSet,
        b_s: &Matrix,
        lambda: f64,
        weights: &[f64],
    ) -> Result<KktResiduals> {
        let p = self.n_features();
        let all: Vec<usize> = (0..p).collect();
        let grad = self.gradient_rows(active, b_s, &all)?;
        let b = expand_rows(active, b_s, p);
        Ok(kkt_from_gradient(&grad, &b, lambda, weights))
    }

    /// Iteratively reweighted solves on a fixed active set, starting from `b_init`.
    ///
    /// Each iteration sets `ω_j = w_j / ‖β^j‖` and solves the shared system for all
    /// responses. A row is flagged and frozen at exactly zero once its norm drops
    /// below [`NORM_FLOOR`] or zero is optimal for it with the other rows held
    /// fixed (`‖∇_j J‖ ≤ λ w_j` with `β^j = 0`); flagged rows are left to the caller's
    /// removal test. Every step is a descent step for the group-Lasso objective.
    pub fn reweighted_fit(
        &mut self,
        active: &ActiveSet,
        lambda: f64,
        weights: &[f64],
        b_init: &Matrix,
        opts: &InnerOptions,
    ) -> Result<InnerFit> {
        if !(lambda > 0.0) {
            return Err(GlossError::InvalidConfig("lambda must be positive".into()));
        }
        self.check_rows(active, b_init)?;
        let s = active.indices();
        let w_s: Vec<f64> = s.iter().map(|&j| weights[j]).collect();
        let gram = self.gram_block(active);
        let rhs = self.cross.select_rows(s);
        let m = rhs.ncols();

        let mut b = b_init.clone();
        let mut norms = b.row_norms();
        let mut flagged: Vec<bool> = norms.iter().map(|&n| n < NORM_FLOOR).collect();
        for (i, &f) in flagged.iter().enumerate() {
            if f {
                b.row_mut(i).fill(0.0);
            }
        }
        let mut objectives = vec![self.objective(active, &b, lambda, weights)?];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < opts.max_iter {
            let free: Vec<usize> = (0..s.len()).filter(|&i| !flagged[i]).collect();
            if free.is_empty() {
                converged = true;
                break;
            }
            iterations += 1;
            let mut a = gram.select_rows(&free).select_columns(&free);
            for (r, &i) in free.iter().enumerate() {
                a[(r, r)] += lambda * w_s[i] / norms[i];
            }
            let sol = Cholesky::factor(&a)?.solve(&rhs.select_rows(&free))?;
            if !sol.is_finite() {
                return Err(GlossError::NonFinite { iteration: iterations });
            }
            let mut next = Matrix::zeros(s.len(), m);
            for (r, &i) in free.iter().enumerate() {
                next.row_mut(i).copy_from_slice(sol.row(r));
            }
            let mut grad = gram.matmul(&next)?.sub(&rhs);
            let next_norms = next.row_norms();

            // freeze rows for which zero is optimal given the others, one block
            // at a time so that each freeze is an exact block minimization
            let mut frozen_now = false;
            for &i in &free {
                let n = next_norms[i];
                let gii = gram[(i, i)];
                let own: f64 = grad
                    .row(i)
                    .iter()
                    .zip(next.row(i))
                    .map(|(g, bv)| {
                        let v = g - gii * bv;
                        v * v
                    })
                    .sum();
                if n < NORM_FLOOR || libm::sqrt(own) <= lambda * w_s[i] {
                    flagged[i] = true;
                    let removed = next.row(i).to_vec();
                    next.row_mut(i).fill(0.0);
                    for k in 0..s.len() {
                        let gki = gram[(k, i)];
                        for (g, v) in grad.row_mut(k).iter_mut().zip(&removed) {
                            *g -= gki * v;
                        }
                    }
                    frozen_now = true;
                }
            }
            if !frozen_now && iterations >= NEWTON_AFTER {
                if let Some(nb) = newton_step(&gram, &rhs, &free, &next, lambda, &w_s) {
                    next = nb;
                    grad = gram.matmul(&next)?.sub(&rhs);
                }
            }
            let next_norms = next.row_norms();

            let mut worst_residual: f64 = 0.0;
            let mut worst_change: f64 = 0.0;
            for &i in &free {
                if flagged[i] {
                    continue;
                }
                let n = next_norms[i];
                let scale = lambda * w_s[i] / n;
                let r: f64 = grad
                    .row(i)
                    .iter()
                    .zip(next.row(i))
                    .map(|(g, bv)| {
                        let v = g + scale * bv;
                        v * v
                    })
                    .sum();
                worst_residual = worst_residual.max(libm::sqrt(r));
                worst_change = worst_change.max((n - norms[i]).abs() / norms[i]);
            }
            b = next;
            norms = next_norms;
            objectives.push(self.objective(active, &b, lambda, weights)?);
            if !frozen_now
                && worst_residual <= opts.tol * lambda
                && worst_change <= opts.norm_change_tol
            {
                converged = true;
                break;
            }
        }
        Ok(InnerFit {
            b,
            iterations,
            converged,
            flagged,
            objectives,
        })
    }
}

/// Reweighting iterations before Newton steps are attempted.
const NEWTON_AFTER: usize = 3;

/// `−⟨C, B⟩ + ½ tr(BᵀGB) + λ Σ w_j ‖β^j‖` on the free rows (constant dropped).
fn block_objective(gram: &Matrix, rhs: &Matrix, b: &Matrix, free: &[usize], lambda: f64, w_s: &[f64]) -> f64 {
    let m = b.ncols();
    let mut val = 0.0;
    for &i in free {
        let bi = b.row(i);
        val -= dot(rhs.row(i), bi);
        for &k in free {
            let g = gram[(i, k)];
            if g != 0.0 {
                val += 0.5 * g * (0..m).map(|a| bi[a] * b[(k, a)]).sum::<f64>();
            }
        }
        val += lambda * w_s[i] * norm2(bi);
    }
    val
}

/// Damped Newton step on the free rows, where the objective is smooth. Returns
/// the new point when the Armijo condition holds and no row approaches zero.
fn newton_step(
    gram: &Matrix,
    rhs: &Matrix,
    free: &[usize],
    b: &Matrix,
    lambda: f64,
    w_s: &[f64],
) -> Option<Matrix> {
    let m = b.ncols();
    let d = free.len() * m;
    let mut h = Matrix::zeros(d, d);
    let mut f = vec![0.0; d];
    for (r, &i) in free.iter().enumerate() {
        let bi = b.row(i);
        let n = norm2(bi);
        if n < NORM_FLOOR {
            return None;
        }
        let c = lambda * w_s[i] / n;
        for a in 0..m {
            let mut g = -rhs[(i, a)];
            for &k in free {
                g += gram[(i, k)] * b[(k, a)];
            }
            f[r * m + a] = g + c * bi[a];
        }
        for (q, &k) in free.iter().enumerate() {
            let g = gram[(i, k)];
            for a in 0..m {
                h[(r * m + a, q * m + a)] += g;
            }
        }
        for a in 0..m {
            for e in 0..m {
                let u = bi[a] * bi[e] / (n * n);
                let id = if a == e { 1.0 } else { 0.0 };
                h[(r * m + a, r * m + e)] += c * (id - u);
            }
        }
    }
    let neg_f = Matrix::from_vec(d, 1, f.iter().map(|v| -v).collect()).ok()?;
    let step = Cholesky::factor(&h).ok()?.solve(&neg_f).ok()?;
    let slope: f64 = f.iter().zip(step.as_slice()).map(|(a, b)| a * b).sum();
    if !(slope < 0.0) {
        return None;
    }
    let base = block_objective(gram, rhs, b, free, lambda, w_s);
    let mut t = 1.0;
    for _ in 0..30 {
        let mut cand = b.clone();
        for (r, &i) in free.iter().enumerate() {
            for a in 0..m {
                cand[(i, a)] += t * step[(r * m + a, 0)];
            }
        }
        let ok_norms = free.iter().all(|&i| norm2(cand.row(i)) >= NORM_FLOOR);
        if ok_norms && cand.is_finite() {
            let val = block_objective(gram, rhs, &cand, free, lambda, w_s);
            if val <= base + 1e-4 * t * slope {
                return Some(cand);
            }
        }
        t *= 0.5;
    }
    None
}

fn kkt_from_gradient(grad: &Matrix, b: &Matrix, lambda: f64, weights: &[f64]) -> KktResiduals {
    let mut out = KktResiduals::default();
    for j in 0..b.nrows() {
        let n = norm2(b.row(j));
        let g = grad.row(j);
        if n > 0.0 {
            let scale = lambda * weights[j] / n;
            let r: f64 = g
                .iter()
                .zip(b.row(j))
                .map(|(gv, bv)| {
                    let v = gv + scale * bv;
                    v * v
                })
                .sum();
            out.active.push((j, libm::sqrt(r)));
        } else {
            out.inactive.push((j, norm2(g) / weights[j]));
        }
    }
    out
}

/// `X_Sᵀ (X_S B − T)`, the gradient of `½‖T − X_S B‖²_F`.
pub fn os_gradient(b_s: &Matrix, x_s: &Matrix, t: &Matrix) -> Result<Matrix> {
    if x_s.ncols() != b_s.nrows() {
        return Err(GlossError::DimensionMismatch {
            context: "os_gradient",
            expected: x_s.ncols(),
            found: b_s.nrows(),
        });
    }
    let resid = x_s.matmul(b_s)?;
    if resid.nrows() != t.nrows() || resid.ncols() != t.ncols() {
        return Err(GlossError::DimensionMismatch {
            context: "os_gradient targets",
            expected: resid.nrows() * resid.ncols(),
            found: t.nrows() * t.ncols(),
        });
    }
    x_s.t_matmul(&resid.sub(t))
}

/// Solves `(X_SᵀX_S + λΩ) B = X_SᵀT` for every column of `T` with a single Cholesky factor.
pub fn penalized_ls_solve(x_s: &Matrix, t: &Matrix, omega_s: &[f64], lambda: f64) -> Result<Matrix> {
    let mut loss = QuadraticLoss::least_squares(x_s, t)?;
    let all = ActiveSet((0..x_s.ncols()).collect());
    loss.penalized_solve(&all, omega_s, lambda)
}

/// KKT residuals computed directly from the design matrix; `b` is `p × M` and its
/// support is the set of rows with nonzero norm.
pub fn kkt_residuals(
    b: &Matrix,
    x: &Matrix,
    t: &Matrix,
    lambda: f64,
    weights: &[f64],
) -> Result<KktResiduals> {
    let grad = os_gradient(b, x, t)?;
    Ok(kkt_from_gradient(&grad, b, lambda, weights))
}

/// `½‖T − XB‖²_F`.
pub fn least_squares_loss(b: &Matrix, x: &Matrix, t: &Matrix) -> Result<f64> {
    let r = x.matmul(b)?.sub(t);
    Ok(0.5 * dot(r.as_slice(), r.as_slice()))
}

/// `½‖T − XB‖²_F + λ Σ w_j ‖β^j‖₂`.
pub fn group_lasso_objective(
    b: &Matrix,
    x: &Matrix,
    t: &Matrix,
    lambda: f64,
    weights: &[f64],
) -> Result<f64> {
    let pen: f64 = group_norms(b).iter().zip(weights).map(|(n, w)| n * w).sum();
    Ok(least_squares_loss(b, x, t)? + lambda * pen)
}

/// `J(B) + λ Σ w_j² ‖β^j‖² / τ_j` with `b/0 = ∞` for `b ≠ 0` and `0/0 = 0`.
pub fn variational_objective(
    b: &Matrix,
    tau: &[f64],
    lambda: f64,
    weights: &[f64],
    x: &Matrix,
    t: &Matrix,
) -> Result<f64> {
    let mut pen = 0.0;
    for (j, row) in b.rows_iter().enumerate() {
        let sq = dot(row, row);
        if sq == 0.0 {
            continue;
        }
        if tau[j] == 0.0 {
            return Ok(f64::INFINITY);
        }
        pen += weights[j] * weights[j] * sq / tau[j];
    }
    Ok(least_squares_loss(b, x, t)? + lambda * pen)
}

/// [`QuadraticLoss::reweighted_fit`] on the least-squares loss `½‖T − XB‖²_F`.
pub fn reweighted_fit(
    active: &ActiveSet,
    x: &Matrix,
    t: &Matrix,
    lambda: f64,
    weights: &[f64],
    b_init: &Matrix,
    opts: &InnerOptions,
) -> Result<InnerFit> {
    QuadraticLoss::least_squares(x, t)?.reweighted_fit(active, lambda, weights, b_init, opts)
}

//! Active-set optimal scoring with a group-Lasso penalty.
//!
//! A fit works in a fixed score basis `Θ⁰` (`Θ⁰ᵀYᵀYΘ⁰ = I`, orthogonal to the
//! constant score). With targets `T = YΘ⁰` the coefficients solve the group-Lasso
//! least-squares problem; the outer loop grows and prunes the active set one
//! variable at a time and the inner loop is the reweighted solve of
//! [`crate::grouplasso`]. The optimal scores and coefficients are then recovered
//! from a `(K-1) × (K-1)` eigenproblem.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::LabeledDataset;
use crate::error::{GlossError, Result};
use crate::grouplasso::{
    expand_rows, ActiveSet, DesignGram, Gram, InnerOptions, QuadraticLoss,
};
use crate::linalg::{norm2, sqrt, symmetric_eigen, Matrix};

/// Rows are removed from, or added to, the active set only when their gradient
/// norm is on the right side of `λ` by this relative margin.
const ACTIVATION_MARGIN: f64 = 1e-9;
/// Largest admissible `α`; `(1 − α²)^{-1/2}` diverges at 1.
pub const ALPHA_MAX: f64 = 1.0 - 1e-8;

/// Which quadratic form the optimal scoring regression uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GramMode {
    /// `XᵀX = n S`.
    #[default]
    Standard,
    /// `n (S_b + diag(S_w))`: LDA with a diagonal within-class covariance.
    Diagonal,
}

impl GramMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GramMode::Standard => "standard",
            GramMode::Diagonal => "diagonal",
        }
    }
}

impl core::str::FromStr for GramMode {
    type Err = GlossError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(GramMode::Standard),
            "diagonal" => Ok(GramMode::Diagonal),
            other => Err(GlossError::InvalidConfig(alloc::format!(
                "unknown gram mode '{other}' (expected standard or diagonal)"
            ))),
        }
    }
}

/// `n S_b + n diag(S_w)`, column by column, from class means and counts.
#[derive(Debug, Clone)]
pub struct DiagonalGram {
    means: Matrix,
    counts: Vec<f64>,
    within: Vec<f64>,
}

impl DiagonalGram {
    pub fn new(data: &LabeledDataset) -> Self {
        let means = data.class_means();
        let counts: Vec<f64> = data.class_counts().iter().map(|&c| c as f64).collect();
        let p = data.n_features();
        let mut within = vec![0.0; p];
        for row in data.x().rows_iter() {
            for (w, v) in within.iter_mut().zip(row) {
                *w += v * v;
            }
        }
        for (k, nk) in counts.iter().enumerate() {
            for (w, m) in within.iter_mut().zip(means.row(k)) {
                *w -= nk * m * m;
            }
        }
        within.iter_mut().for_each(|w| *w = w.max(0.0));
        DiagonalGram {
            means,
            counts,
            within,
        }
    }
}

impl Gram for DiagonalGram {
    fn dim(&self) -> usize {
        self.within.len()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (k, nk) in self.counts.iter().enumerate() {
            let mu = self.means.row(k);
            let a = nk * mu[j];
            if a == 0.0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(mu) {
                *o += a * m;
            }
        }
        out[j] += self.within[j];
        out
    }
}

/// Gram operator selected by [`GramMode`].
#[derive(Debug, Clone)]
pub enum OsGram<'a> {
    Standard(DesignGram<'a>),
    Diagonal(DiagonalGram),
}

impl<'a> OsGram<'a> {
    pub fn new(data: &'a LabeledDataset, mode: GramMode) -> Self {
        match mode {
            GramMode::Standard => OsGram::Standard(DesignGram::new(data.x())),
            GramMode::Diagonal => OsGram::Diagonal(DiagonalGram::new(data)),
        }
    }
}

impl Gram for OsGram<'_> {
    fn dim(&self) -> usize {
        match self {
            OsGram::Standard(g) => g.dim(),
            OsGram::Diagonal(g) => g.dim(),
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        match self {
            OsGram::Standard(g) => g.column(j),
            OsGram::Diagonal(g) => g.column(j),
        }
    }
}

/// The dense `p × p` Gram matrix used by the inner solves.
pub fn effective_gram(data: &LabeledDataset, mode: GramMode) -> Matrix {
    let g = OsGram::new(data, mode);
    let p = g.dim();
    let mut out = Matrix::zeros(p, p);
    for j in 0..p {
        for (i, v) in g.column(j).into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// Deterministic initial scores from class counts: weighted Helmert contrasts.
///
/// Column `k` is constant on classes `0..=k`, negative on class `k+1` and zero
/// afterwards, scaled so that `Θ⁰ᵀ diag(n) Θ⁰ = I`.
pub fn theta0_from_counts(counts: &[usize]) -> Result<Matrix> {
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(GlossError::EmptyClass { class: k });
    }
    let k = counts.len();
    if k < 2 {
        return Err(GlossError::TooFewClasses { found: k });
    }
    let mut theta = Matrix::zeros(k, k - 1);
    let mut cum = 0.0;
    for col in 0..k - 1 {
        cum += counts[col] as f64;
        let next = counts[col + 1] as f64;
        let c = sqrt(next / (cum * (cum + next)));
        for i in 0..=col {
            theta[(i, col)] = c;
        }
        theta[(col + 1, col)] = -c * cum / next;
    }
    Ok(theta)
}

/// [`theta0_from_counts`] from an indicator matrix.
pub fn init_theta0(y: &Matrix) -> Result<Matrix> {
    let counts: Vec<usize> = (0..y.ncols())
        .map(|k| y.rows_iter().filter(|r| r[k] != 0.0).count())
        .collect();
    theta0_from_counts(&counts)
}

/// `XᵀYΘ⁰` from class means: `(XᵀY)_{jk} = n_k μ_kj`.
pub fn score_cross(data: &LabeledDataset, theta0: &Matrix) -> Result<Matrix> {
    let k = data.n_classes();
    if theta0.nrows() != k {
        return Err(GlossError::DimensionMismatch {
            context: "theta0 rows",
            expected: k,
            found: theta0.nrows(),
        });
    }
    let means = data.class_means();
    let xty = Matrix::from_fn(data.n_features(), k, |j, c| {
        data.class_counts()[c] as f64 * means[(c, j)]
    });
    xty.matmul(theta0)
}

fn default_weights(p: usize, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match weights {
        None => Ok(vec![1.0; p]),
        Some(w) if w.len() != p => Err(GlossError::DimensionMismatch {
            context: "penalty weights",
            expected: p,
            found: w.len(),
        }),
        Some(w) if w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) => Err(
            GlossError::InvalidConfig("penalty weights must be positive and finite".to_string()),
        ),
        Some(w) => Ok(w.to_vec()),
    }
}

/// `max_j ‖X_jᵀYΘ⁰‖₂ / w_j`: the smallest penalty with an all-zero solution.
pub fn lambda_max(data: &LabeledDataset, theta0: &Matrix, weights: Option<&[f64]>) -> Result<f64> {
    let cross = score_cross(data, theta0)?;
    let w = default_weights(data.n_features(), weights)?;
    Ok(max_scaled_norm(&cross, &w))
}

fn max_scaled_norm(m: &Matrix, w: &[f64]) -> f64 {
    m.rows_iter()
        .zip(w)
        .map(|(r, w)| norm2(r) / w)
        .fold(0.0, f64::max)
}

/// Settings of a single fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub gram_mode: GramMode,
    /// Relative KKT tolerance of the inner loop (`tol · λ`).
    pub tol: f64,
    pub max_inner_iter: usize,
    pub max_outer_iter: usize,
    /// Per-variable penalty weights `w_j`; all ones when absent.
    pub weights: Option<Vec<f64>>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            gram_mode: GramMode::Standard,
            tol: 1e-6,
            max_inner_iter: 1000,
            max_outer_iter: 1000,
            weights: None,
        }
    }
}

impl FitConfig {
    fn inner(&self) -> InnerOptions {
        InnerOptions {
            tol: self.tol,
            max_iter: self.max_inner_iter,
            ..InnerOptions::default()
        }
    }
}

/// A solved optimal scoring problem at one penalty level.
#[derive(Debug, Clone)]
pub struct OsFit {
    /// Optimal scores `Θ*`, `K × (K−1)`.
    pub theta_star: Matrix,
    /// Optimal coefficients `B*`, `p × (K−1)`, zero outside the active set.
    pub b_star: Matrix,
    /// `α_k` in descending order.
    pub alpha: Vec<f64>,
    /// Eigenvalues `s_k` of the score matrix (`α_k² = s_k`).
    pub scores: Vec<f64>,
    /// Coefficients in the `Θ⁰` basis (`B* = B V`); used for warm starts.
    pub coefficients: Matrix,
    /// Eigenvectors `V` with `Θ* = Θ⁰ V`.
    pub rotation: Matrix,
    pub active_set: ActiveSet,
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub gram_mode: GramMode,
    pub converged: bool,
    pub n_inner_iters: usize,
    pub n_outer_iters: usize,
    /// Group-Lasso objective `J(B) + λ Σ w_j ‖β^j‖₂`.
    pub objective: f64,
    /// Set when some `α_k` had to be clamped below 1.
    pub alpha_clamped: bool,
}

impl OsFit {
    pub fn n_active(&self) -> usize {
        self.active_set.len()
    }

    pub fn n_directions(&self) -> usize {
        self.alpha.len()
    }
}

/// Output of [`eigen_postprocess`].
#[derive(Debug, Clone)]
pub struct ScoreRotation {
    pub theta_star: Matrix,
    /// `B_S V`, rows on the active set only.
    pub b_star: Matrix,
    pub alpha: Vec<f64>,
    pub scores: Vec<f64>,
    pub rotation: Matrix,
    pub alpha_clamped: bool,
}

/// Eigen post-processing from `Θ⁰ᵀ Yᵀ X_S B_S`.
pub fn eigen_postprocess(
    theta0: &Matrix,
    y: &Matrix,
    x_s: &Matrix,
    b_s: &Matrix,
) -> Result<ScoreRotation> {
    let cross_s = x_s.t_matmul(y)?.matmul(theta0)?;
    rotate_scores(theta0, &cross_s, b_s)
}

/// Same as [`eigen_postprocess`] with `C_S = X_SᵀYΘ⁰` precomputed: `A = C_Sᵀ B_S`.
pub fn rotate_scores(theta0: &Matrix, cross_s: &Matrix, b_s: &Matrix) -> Result<ScoreRotation> {
    let a = cross_s.t_matmul(b_s)?;
    let norm = a.frobenius_norm();
    let asym = a.sub(&a.transpose()).frobenius_norm();
    if asym > 1e-6 * norm {
        return Err(GlossError::AsymmetricScoreMatrix {
            asymmetry: asym / norm,
        });
    }
    let eig = symmetric_eigen(&a.symmetrized())?;
    let mut v = eig.vectors;
    let m = v.ncols();
    for k in 0..m {
        let col = v.column(k);
        if let Some(first) = col.iter().find(|c| c.abs() > 1e-10) {
            if *first < 0.0 {
                for i in 0..v.nrows() {
                    v[(i, k)] = -v[(i, k)];
                }
            }
        }
    }
    let floor = -1e-10 * norm.max(1.0);
    let mut scores = Vec::with_capacity(m);
    for &s in &eig.values {
        if s < floor {
            return Err(GlossError::InvalidConfig(alloc::format!(
                "score matrix has a negative eigenvalue {s:e}"
            )));
        }
        scores.push(s.max(0.0));
    }
    let mut alpha_clamped = false;
    let alpha = scores
        .iter()
        .map(|&s| {
            let a = sqrt(s);
            if a > ALPHA_MAX {
                alpha_clamped = true;
                ALPHA_MAX
            } else {
                a
            }
        })
        .collect();
    Ok(ScoreRotation {
        theta_star: theta0.matmul(&v)?,
        b_star: b_s.matmul(&v)?,
        alpha,
        scores,
        rotation: v,
        alpha_clamped,
    })
}

/// Reusable solver for one dataset: keeps `Θ⁰`, the cross term and cached Gram
/// columns so that consecutive fits along a path share work.
pub struct GlossSolver<'a> {
    data: &'a LabeledDataset,
    theta0: Matrix,
    loss: QuadraticLoss<OsGram<'a>>,
    weights: Vec<f64>,
    config: FitConfig,
}

impl<'a> GlossSolver<'a> {
    pub fn new(data: &'a LabeledDataset, theta0: Matrix, config: FitConfig) -> Result<Self> {
        let weights = default_weights(data.n_features(), config.weights.as_deref())?;
        let cross = score_cross(data, &theta0)?;
        let offset: f64 = 0.5
            * (0..theta0.nrows())
                .map(|k| data.class_counts()[k] as f64 * crate::linalg::dot(theta0.row(k), theta0.row(k)))
                .sum::<f64>();
        let loss = QuadraticLoss::new(OsGram::new(data, config.gram_mode), cross, offset)?;
        Ok(GlossSolver {
            data,
            theta0,
            loss,
            weights,
            config,
        })
    }

    /// Solver with the default initial scores [`init_theta0`].
    pub fn with_default_scores(data: &'a LabeledDataset, config: FitConfig) -> Result<Self> {
        let theta0 = theta0_from_counts(data.class_counts())?;
        Self::new(data, theta0, config)
    }

    pub fn theta0(&self) -> &Matrix {
        &self.theta0
    }

    pub fn data(&self) -> &LabeledDataset {
        self.data
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn loss(&mut self) -> &mut QuadraticLoss<OsGram<'a>> {
        &mut self.loss
    }

    pub fn lambda_max(&self) -> f64 {
        max_scaled_norm(self.loss.cross(), &self.weights)
    }

    /// Group-Lasso objective of a `p × M` coefficient matrix (in the `Θ⁰` basis).
    pub fn objective(&mut self, b: &Matrix, lambda: f64) -> Result<f64> {
        let active = ActiveSet::support_of(b);
        let b_s = b.select_rows(active.indices());
        self.loss.objective(&active, &b_s, lambda, &self.weights)
    }

    /// Block soft-threshold of row `j` given the other active rows: the exact
    /// minimizer over `β^j` alone. Used to seed newly activated rows.
    fn block_update(&mut self, j: usize, grad: &[f64], lambda: f64) -> Vec<f64> {
        let gjj = self.loss.gram_column(j)[j];
        let gnorm = norm2(grad);
        let shrink = 1.0 - lambda * self.weights[j] / gnorm;
        if !(gjj > 0.0) || !(shrink > 0.0) {
            return vec![0.0; grad.len()];
        }
        grad.iter().map(|g| -shrink * g / gjj).collect()
    }

    /// Solves at `lambda`, optionally warm-started from a `p × (K−1)` coefficient
    /// matrix in the `Θ⁰` basis (its nonzero rows seed the active set).
    pub fn fit(&mut self, lambda: f64, warm: Option<&Matrix>) -> Result<OsFit> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(GlossError::InvalidConfig("lambda must be positive".into()));
        }
        let p = self.data.n_features();
        let m = self.theta0.ncols();
        let (mut active, mut b_s) = match warm {
            Some(b) => {
                if b.nrows() != p || b.ncols() != m {
                    return Err(GlossError::DimensionMismatch {
                        context: "warm start",
                        expected: p * m,
                        found: b.nrows() * b.ncols(),
                    });
                }
                let s = ActiveSet::support_of(b);
                let rows = b.select_rows(s.indices());
                (s, rows)
            }
            None => (ActiveSet::empty(), Matrix::zeros(0, m)),
        };
        let inner_opts = self.config.inner();
        let upper = lambda * (1.0 + ACTIVATION_MARGIN);

        let mut n_outer = 0;
        let mut n_inner = 0;
        let mut inner_ok = true;
        let converged;
        loop {
            n_outer += 1;

            // Step 1: solve on the current active set.
            let mut reseeded = false;
            if !active.is_empty() {
                let inner =
                    self.loss
                        .reweighted_fit(&active, lambda, &self.weights, &b_s, &inner_opts)?;
                n_inner += inner.iterations;
                inner_ok = inner.converged;
                b_s = inner.b;

                // Step 2: drop rows that went to zero and satisfy the inactive condition.
                let flagged: Vec<usize> = inner
                    .flagged
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| f)
                    .map(|(i, _)| active.indices()[i])
                    .collect();
                if !flagged.is_empty() {
                    for &j in &flagged {
                        let pos = active.position(j).expect("flagged row is active");
                        b_s.row_mut(pos).iter_mut().for_each(|v| *v = 0.0);
                    }
                    let grads = self.loss.gradient_rows(&active, &b_s, &flagged)?;
                    let previous = active.clone();
                    let mut reseed = Vec::new();
                    for (r, &j) in flagged.iter().enumerate() {
                        let g = grads.row(r);
                        if norm2(g) / self.weights[j] <= upper {
                            active.remove(j);
                        } else {
                            reseed.push((j, self.block_update(j, g, lambda)));
                        }
                    }
                    let mut next = Matrix::zeros(active.len(), m);
                    for (r, &j) in active.indices().iter().enumerate() {
                        match reseed.iter().find(|(k, _)| *k == j) {
                            Some((_, row)) => {
                                next.row_mut(r).copy_from_slice(row);
                                reseeded = true;
                            }
                            None => {
                                let pos = previous.position(j).expect("row was active");
                                next.row_mut(r).copy_from_slice(b_s.row(pos));
                            }
                        }
                    }
                    b_s = next;
                }
            }

            if n_outer >= self.config.max_outer_iter {
                converged = false;
                break;
            }
            if reseeded {
                continue;
            }

            // Step 3: most violating inactive variable.
            let inactive = active.complement(p);
            let grads = self.loss.gradient_rows(&active, &b_s, &inactive)?;
            let mut best: Option<(usize, usize, f64)> = None;
            for (r, &j) in inactive.iter().enumerate() {
                let v = norm2(grads.row(r)) / self.weights[j];
                if best.is_none_or(|(_, _, bv)| v > bv) {
                    best = Some((r, j, v));
                }
            }
            match best {
                Some((r, j, v)) if v > upper => {
                    let row = self.block_update(j, grads.row(r), lambda);
                    let pos = active.insert(j);
                    b_s = insert_row(&b_s, pos, &row);
                }
                _ => {
                    converged = inner_ok;
                    break;
                }
            }
        }

        let objective = self
            .loss
            .objective(&active, &b_s, lambda, &self.weights)?;
        let cross_s = self.loss.cross().select_rows(active.indices());
        let rot = rotate_scores(&self.theta0, &cross_s, &b_s)?;
        Ok(OsFit {
            theta_star: rot.theta_star,
            b_star: expand_rows(&active, &rot.b_star, p),
            alpha: rot.alpha,
            scores: rot.scores,
            coefficients: expand_rows(&active, &b_s, p),
            rotation: rot.rotation,
            active_set: active,
            lambda,
            weights: self.weights.clone(),
            gram_mode: self.config.gram_mode,
            converged,
            n_inner_iters: n_inner,
            n_outer_iters: n_outer,
            objective,
            alpha_clamped: rot.alpha_clamped,
        })
    }
}

fn insert_row(b: &Matrix, pos: usize, row: &[f64]) -> Matrix {
    let mut out = Matrix::zeros(b.nrows() + 1, b.ncols());
    for r in 0..b.nrows() {
        let dst = if r < pos { r } else { r + 1 };
        out.row_mut(dst).copy_from_slice(b.row(r));
    }
    out.row_mut(pos).copy_from_slice(row);
    out
}

/// A cold-started fit at `lambda`.
pub fn fit(
    data: &LabeledDataset,
    lambda: f64,
    theta0: &Matrix,
    config: &FitConfig,
) -> Result<OsFit> {
    GlossSolver::new(data, theta0.clone(), config.clone())?.fit(lambda, None)
}

/// Settings of a regularization path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    /// Ratio between consecutive penalties, in `(0, 1)`.
    pub halving_factor: f64,
    /// Stop once this many variables are active; `min(n, p)` when absent.
    pub max_active: Option<usize>,
    /// Stop once the penalty reaches this level.
    pub lambda_min: Option<f64>,
    /// Hard cap on the number of penalty levels.
    pub max_steps: usize,
    pub fit: FitConfig,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            halving_factor: 0.5,
            max_active: None,
            lambda_min: None,
            max_steps: 60,
            fit: FitConfig::default(),
        }
    }
}

impl PathConfig {
    fn validate(&self) -> Result<()> {
        if !(self.halving_factor > 0.0 && self.halving_factor < 1.0) {
            return Err(GlossError::InvalidConfig(
                "halving factor must lie in (0, 1)".to_string(),
            ));
        }
        if self.max_active == Some(0) {
            return Err(GlossError::InvalidConfig("max_active must be at least 1".to_string()));
        }
        if self.max_steps == 0 {
            return Err(GlossError::InvalidConfig("max_steps must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Fits at decreasing penalties, each warm-started from the previous one.
#[derive(Debug, Clone)]
pub struct RegularizationPath {
    pub lambdas: Vec<f64>,
    pub fits: Vec<OsFit>,
    pub lambda_max: f64,
    pub theta0: Matrix,
}

impl RegularizationPath {
    pub fn len(&self) -> usize {
        self.fits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fits.is_empty()
    }
}

fn annotate(index: usize, lambda: f64) -> impl FnOnce(GlossError) -> GlossError {
    move |e| GlossError::PathFit {
        index,
        lambda,
        source: alloc::boxed::Box::new(e),
    }
}

/// Geometric path from `lambda_max`: stops when the active set reaches
/// `max_active`, the penalty reaches `lambda_min`, or after `max_steps` levels.
pub fn solution_path(data: &LabeledDataset, config: &PathConfig) -> Result<RegularizationPath> {
    config.validate()?;
    let mut solver = GlossSolver::with_default_scores(data, config.fit.clone())?;
    let lmax = solver.lambda_max();
    if !(lmax > 0.0) {
        return Err(GlossError::InvalidConfig(
            "lambda_max is zero: no feature is correlated with the class scores".to_string(),
        ));
    }
    let max_active = config
        .max_active
        .unwrap_or_else(|| data.n_samples().min(data.n_features()));
    let lambda_min = config.lambda_min.unwrap_or(0.0);

    let mut lambdas = Vec::new();
    let mut fits: Vec<OsFit> = Vec::new();
    let mut lambda = lmax;
    loop {
        let index = fits.len();
        let warm = fits.last().map(|f| &f.coefficients);
        let fit = solver.fit(lambda, warm).map_err(annotate(index, lambda))?;
        let n_active = fit.n_active();
        lambdas.push(lambda);
        fits.push(fit);
        if n_active >= max_active
            || lambda <= lambda_min * (1.0 + 1e-12)
            || fits.len() >= config.max_steps
        {
            break;
        }
        lambda *= config.halving_factor;
    }
    Ok(RegularizationPath {
        lambdas,
        fits,
        lambda_max: lmax,
        theta0: solver.theta0().clone(),
    })
}

/// Warm-started fits on a caller-supplied grid (sorted into decreasing order).
pub fn path_on_grid(
    data: &LabeledDataset,
    grid: &[f64],
    config: &FitConfig,
) -> Result<RegularizationPath> {
    let mut lambdas = grid.to_vec();
    if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(GlossError::InvalidConfig("penalties must be positive".to_string()));
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.dedup();
    let mut solver = GlossSolver::with_default_scores(data, config.clone())?;
    let lmax = solver.lambda_max();
    let mut fits: Vec<OsFit> = Vec::with_capacity(lambdas.len());
    for (index, &lambda) in lambdas.iter().enumerate() {
        let warm = fits.last().map(|f| &f.coefficients);
        fits.push(solver.fit(lambda, warm).map_err(annotate(index, lambda))?);
    }
    Ok(RegularizationPath {
        lambdas,
        fits,
        lambda_max: lmax,
        theta0: solver.theta0().clone(),
    })
}

//! Penalized LDA directions from an optimal scoring fit, projection and classification.
//!
//! With `Θ⁰ᵀYᵀYΘ⁰ = I` the score eigenvalues satisfy `s_k = α_k²` and the rotated
//! coefficients obey `B*ᵀ(n Σ̂_w)B* = diag(α²(1−α²))` with
//! `Σ̂_w = S_w + n⁻¹λΩ`, `Ω = diag(w_j / ‖β^{j*}‖)`. Scaling column `k` by
//! `√n / (α_k √(1 − α_k²))` therefore yields directions that are orthonormal in
//! the shrunk within-class metric and maximize `tr(Bᵀ S_b B)` there.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{CenteringStats, LabeledDataset};
use crate::error::{GlossError, Result};
use crate::glossfit::{OsFit, ALPHA_MAX};
use crate::grouplasso::{group_norms, ActiveSet};
use crate::linalg::{sqrt, Matrix};

/// Directions with `α` at or below this are dropped.
pub const ALPHA_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LdaModel {
    /// Discriminant directions `p × M_eff`, zero rows off the active set.
    pub directions: Matrix,
    /// Class means projected on the directions, `K × M_eff`.
    pub centroids: Matrix,
    pub log_priors: Vec<f64>,
    /// `w_j / ‖β^{j*}‖` on the active set, 0 elsewhere.
    pub omega_star: Vec<f64>,
    /// The retained `α_k`, descending.
    pub alpha: Vec<f64>,
    pub active_set: ActiveSet,
    pub lambda: f64,
    pub n_train: usize,
}

/// Maps a fit to LDA directions using the training data it was fitted on.
pub fn os_to_lda(fit: &OsFit, data: &LabeledDataset) -> Result<LdaModel> {
    LdaModel::from_coefficients(
        &fit.b_star,
        &fit.alpha,
        &fit.weights,
        fit.lambda,
        &data.class_means(),
        data.class_counts(),
    )
}

impl LdaModel {
    /// Builds the model from rotated coefficients `B*` (`p × (K−1)`), their `α`,
    /// and centered training class means (`K × p`).
    pub fn from_coefficients(
        b_star: &Matrix,
        alpha: &[f64],
        weights: &[f64],
        lambda: f64,
        class_means: &Matrix,
        class_counts: &[usize],
    ) -> Result<Self> {
        let p = b_star.nrows();
        if alpha.len() != b_star.ncols() {
            return Err(GlossError::DimensionMismatch {
                context: "alpha vs coefficient columns",
                expected: b_star.ncols(),
                found: alpha.len(),
            });
        }
        if class_means.ncols() != p || class_means.nrows() != class_counts.len() {
            return Err(GlossError::DimensionMismatch {
                context: "class means",
                expected: p,
                found: class_means.ncols(),
            });
        }
        let kept: Vec<usize> = (0..alpha.len()).filter(|&k| alpha[k] > ALPHA_TOL).collect();
        if kept.is_empty() {
            return Err(GlossError::NoDiscriminativeDirection { tol: ALPHA_TOL });
        }
        let n: usize = class_counts.iter().sum();
        let factors: Vec<f64> = kept
            .iter()
            .map(|&k| {
                let a = alpha[k].min(ALPHA_MAX);
                sqrt(n as f64) / (a * sqrt(1.0 - a * a))
            })
            .collect();
        let directions = b_star.select_columns(&kept).scale_columns(&factors);
        let norms = group_norms(b_star);
        let active = ActiveSet::support_of(b_star);
        let omega_star = norms
            .iter()
            .zip(weights)
            .map(|(&nrm, &w)| if nrm > 0.0 { w / nrm } else { 0.0 })
            .collect();
        let centroids = project_rows(class_means, &directions, &active);
        let log_priors = class_counts
            .iter()
            .map(|&c| libm::log(c as f64 / n as f64))
            .collect();
        Ok(LdaModel {
            directions,
            centroids,
            log_priors,
            omega_star,
            alpha: kept.iter().map(|&k| alpha[k]).collect(),
            active_set: active,
            lambda,
            n_train: n,
        })
    }

    /// A model without directions: always predicts the most probable class.
    pub fn prior_only(n_features: usize, class_counts: &[usize], lambda: f64) -> Self {
        let n: usize = class_counts.iter().sum();
        LdaModel {
            directions: Matrix::zeros(n_features, 0),
            centroids: Matrix::zeros(class_counts.len(), 0),
            log_priors: class_counts
                .iter()
                .map(|&c| libm::log(c as f64 / n as f64))
                .collect(),
            omega_star: vec![0.0; n_features],
            alpha: Vec::new(),
            active_set: ActiveSet::empty(),
            lambda,
            n_train: n,
        }
    }

    pub fn n_directions(&self) -> usize {
        self.directions.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.centroids.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.directions.nrows()
    }

    /// Replaces the class priors (must be positive; they are renormalized).
    pub fn with_priors(mut self, priors: &[f64]) -> Result<Self> {
        if priors.len() != self.n_classes() {
            return Err(GlossError::DimensionMismatch {
                context: "class priors",
                expected: self.n_classes(),
                found: priors.len(),
            });
        }
        if priors.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(GlossError::InvalidConfig("priors must be positive".into()));
        }
        let total: f64 = priors.iter().sum();
        self.log_priors = priors.iter().map(|p| libm::log(p / total)).collect();
        Ok(self)
    }

    /// Equal priors: plain nearest-centroid classification.
    pub fn with_uniform_priors(mut self) -> Self {
        let k = self.n_classes() as f64;
        self.log_priors = vec![-libm::log(k); self.n_classes()];
        self
    }

    /// Projects already centered rows.
    pub fn project_centered(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.n_features() {
            return Err(GlossError::DimensionMismatch {
                context: "projection features",
                expected: self.n_features(),
                found: x.ncols(),
            });
        }
        Ok(project_rows(x, &self.directions, &self.active_set))
    }

    /// Projects raw rows after applying the training centering.
    pub fn project(&self, raw: &Matrix, centering: &CenteringStats) -> Result<Matrix> {
        self.project_centered(&centering.apply(raw)?)
    }

    /// Gaussian plug-in rule in the whitened space using the first `dims` coordinates.
    pub fn classify_projected(&self, z: &Matrix, dims: usize) -> Vec<usize> {
        let dims = dims.min(z.ncols()).min(self.n_directions());
        z.rows_iter()
            .map(|row| {
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for k in 0..self.n_classes() {
                    let c = self.centroids.row(k);
                    let d2: f64 = (0..dims).map(|m| (row[m] - c[m]) * (row[m] - c[m])).sum();
                    let score = -0.5 * d2 + self.log_priors[k];
                    if score > best_score {
                        best = k;
                        best_score = score;
                    }
                }
                best
            })
            .collect()
    }

    pub fn classify(&self, raw: &Matrix, centering: &CenteringStats) -> Result<Vec<usize>> {
        let z = self.project(raw, centering)?;
        Ok(self.classify_projected(&z, self.n_directions()))
    }

    /// Validation error for `m = 1..=M_eff` leading directions; selects the
    /// smallest `m` attaining the minimum.
    pub fn select_dimension(
        &self,
        raw: &Matrix,
        labels: &[usize],
        centering: &CenteringStats,
    ) -> Result<DimensionSelection> {
        let z = self.project(raw, centering)?;
        if labels.len() != z.nrows() {
            return Err(GlossError::DimensionMismatch {
                context: "validation labels",
                expected: z.nrows(),
                found: labels.len(),
            });
        }
        let errors: Vec<f64> = (1..=self.n_directions())
            .map(|m| error_rate(&self.classify_projected(&z, m), labels))
            .collect();
        Ok(DimensionSelection {
            selected: select_smallest_minimizer(&errors) + 1,
            errors,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSelection {
    /// Number of leading directions to use.
    pub selected: usize,
    /// `errors[m-1]` is the error with `m` directions.
    pub errors: Vec<f64>,
}

impl DimensionSelection {
    pub fn error(&self) -> f64 {
        self.errors.get(self.selected.wrapping_sub(1)).copied().unwrap_or(f64::NAN)
    }
}

/// Index of the first minimum.
pub fn select_smallest_minimizer(errors: &[f64]) -> usize {
    let mut best = 0;
    for (i, e) in errors.iter().enumerate() {
        if *e < errors[best] {
            best = i;
        }
    }
    best
}

/// Fraction of mismatched labels.
pub fn error_rate(predicted: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let wrong = predicted.iter().zip(truth).filter(|(a, b)| a != b).count();
    wrong as f64 / truth.len() as f64
}

fn project_rows(x: &Matrix, directions: &Matrix, active: &ActiveSet) -> Matrix {
    let m = directions.ncols();
    let mut z = Matrix::zeros(x.nrows(), m);
    for (i, row) in x.rows_iter().enumerate() {
        let out = z.row_mut(i);
        for &j in active.indices() {
            let v = row[j];
            if v == 0.0 {
                continue;
            }
            for (o, d) in out.iter_mut().zip(directions.row(j)) {
                *o += v * d;
            }
        }
    }
    z
}

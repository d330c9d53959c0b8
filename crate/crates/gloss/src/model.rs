//! The `gloss-model/1` JSON model file.
//!
//! Only the active rows of `B*` are stored. Doubles are written in shortest
//! round-trip form and parsed exactly, so save then load is value-exact.

use std::fs;
use std::path::{Path, PathBuf};

use gloss_core::eval::lda_or_prior;
use gloss_core::grouplasso::expand_rows;
use gloss_core::lda::ALPHA_TOL;
use gloss_core::{
    ActiveSet, CenteringStats, GlossError, GramMode, LabeledDataset, LdaModel, Matrix, OsFit,
};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "gloss-model/1";

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read model {path}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write model {path}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("model {path} is not valid JSON")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("unsupported model format {0:?}, expected {FORMAT:?}")]
    Format(String),

    #[error("inconsistent model: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Core(#[from] GlossError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub lambda: f64,
    pub gram_mode: String,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    /// The label column as given when fitting.
    pub label_column: Option<String>,
    pub class_labels: Vec<String>,
    pub class_counts: Vec<usize>,
    pub class_priors: Vec<f64>,
    pub n_train: usize,
    pub centering_mean: Vec<f64>,
    pub centering_scale: Option<Vec<f64>>,
    pub active_indices: Vec<usize>,
    /// Rows of `B*` for `active_indices`, each of length `K − 1`.
    pub b_star: Vec<Vec<f64>>,
    pub theta_star: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub weights: Vec<f64>,
    /// Centered class means on the active features, `K × |active|`.
    pub class_means_active: Vec<Vec<f64>>,
    pub converged: bool,
    pub objective: f64,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.rows_iter().map(<[f64]>::to_vec).collect()
}

fn matrix_of(rows: &[Vec<f64>], ncols: usize, what: &str) -> Result<Matrix, ModelError> {
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(ModelError::Inconsistent(format!("{what} rows must have {ncols} entries")));
    }
    Ok(Matrix::from_vec(rows.len(), ncols, rows.concat())?)
}

impl ModelFile {
    pub fn from_fit(fit: &OsFit, data: &LabeledDataset, label_column: Option<String>) -> Self {
        let active = fit.active_set.indices();
        let n = data.n_samples() as f64;
        let means = data.class_means();
        let feature_names = data
            .feature_names()
            .map(<[String]>::to_vec)
            .unwrap_or_else(|| (1..=data.n_features()).map(|j| format!("x{j}")).collect());
        ModelFile {
            format: FORMAT.to_string(),
            lambda: fit.lambda,
            gram_mode: fit.gram_mode.as_str().to_string(),
            n_features: data.n_features(),
            feature_names,
            label_column,
            class_labels: data.class_names().to_vec(),
            class_counts: data.class_counts().to_vec(),
            class_priors: data.class_counts().iter().map(|&c| c as f64 / n).collect(),
            n_train: data.n_samples(),
            centering_mean: data.centering().mean.clone(),
            centering_scale: data.centering().scale.clone(),
            active_indices: active.to_vec(),
            b_star: rows_of(&fit.b_star.select_rows(active)),
            theta_star: rows_of(&fit.theta_star),
            alpha: fit.alpha.clone(),
            weights: fit.weights.clone(),
            class_means_active: rows_of(&means.select_columns(active)),
            converged: fit.converged,
            objective: fit.objective,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn n_active(&self) -> usize {
        self.active_indices.len()
    }

    pub fn gram_mode(&self) -> Result<GramMode, ModelError> {
        self.gram_mode
            .parse()
            .map_err(|_| ModelError::Inconsistent(format!("unknown gram mode {:?}", self.gram_mode)))
    }

    pub fn centering(&self) -> CenteringStats {
        CenteringStats {
            mean: self.centering_mean.clone(),
            scale: self.centering_scale.clone(),
        }
    }

    /// Number of directions the model keeps after dropping negligible `α`.
    pub fn n_directions(&self) -> usize {
        if self.active_indices.is_empty() {
            return 0;
        }
        self.alpha.iter().filter(|a| **a > ALPHA_TOL).count()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.format != FORMAT {
            return Err(ModelError::Format(self.format.clone()));
        }
        let (p, k) = (self.n_features, self.n_classes());
        let bad = |msg: &str| Err(ModelError::Inconsistent(msg.to_string()));
        if k < 2 || self.class_counts.len() != k || self.class_priors.len() != k {
            return bad("class labels, counts and priors must agree and name at least two classes");
        }
        if self.class_counts.iter().sum::<usize>() != self.n_train {
            return bad("class counts do not sum to n_train");
        }
        if self.centering_mean.len() != p
            || self.weights.len() != p
            || self.feature_names.len() != p
            || self.centering_scale.as_ref().is_some_and(|s| s.len() != p)
        {
            return bad("per-feature fields must have n_features entries");
        }
        if self.alpha.len() != k - 1 || self.b_star.len() != self.active_indices.len() {
            return bad("alpha and b_star sizes disagree with the class count and active set");
        }
        if self.class_means_active.len() != k {
            return bad("class_means_active must have one row per class");
        }
        if self.active_indices.windows(2).any(|w| w[0] >= w[1])
            || self.active_indices.last().is_some_and(|&j| j >= p)
        {
            return bad("active indices must be increasing and below n_features");
        }
        self.gram_mode()?;
        Ok(())
    }

    /// The classifier stored in the file (prior-only when no direction survives).
    pub fn to_lda(&self) -> Result<LdaModel, ModelError> {
        self.validate()?;
        let (p, k) = (self.n_features, self.n_classes());
        if self.n_directions() == 0 {
            return Ok(LdaModel::prior_only(p, &self.class_counts, self.lambda));
        }
        let active = ActiveSet::from_indices(self.active_indices.clone(), p)?;
        let b_s = matrix_of(&self.b_star, k - 1, "b_star")?;
        let b_star = expand_rows(&active, &b_s, p);
        let means_s = matrix_of(&self.class_means_active, self.n_active(), "class_means_active")?;
        let means = expand_rows(&active, &means_s.transpose(), p).transpose();
        Ok(LdaModel::from_coefficients(
            &b_star,
            &self.alpha,
            &self.weights,
            self.lambda,
            &means,
            &self.class_counts,
        )?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        fs::write(path, text).map_err(|source| ModelError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = fs::read_to_string(path).map_err(|source| ModelError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let m: ModelFile = serde_json::from_str(&text).map_err(|source| ModelError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        m.validate()?;
        Ok(m)
    }
}

/// In-memory classifier for a fit, matching what `ModelFile::to_lda` rebuilds.
pub fn fitted_lda(fit: &OsFit, data: &LabeledDataset) -> Result<LdaModel, GlossError> {
    if fit.active_set.is_empty() {
        return Ok(LdaModel::prior_only(data.n_features(), data.class_counts(), fit.lambda));
    }
    lda_or_prior(fit, data)
}


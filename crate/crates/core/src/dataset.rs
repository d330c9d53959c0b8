//! Labeled data, centering and the sample scatter matrices.
//!
//! Classes are 0-based internally (`0..K`); the class order is whatever order the
//! caller assigned, which for CSV input is order of first appearance.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GlossError, Result};
use crate::linalg::{sqrt, Matrix};

/// Column statistics removed from the raw features.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringStats {
    /// Original column means, in feature units.
    pub mean: Vec<f64>,
    /// Column standard deviations when features were standardized.
    pub scale: Option<Vec<f64>>,
}

impl CenteringStats {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    /// Maps raw rows into the centered (and possibly standardized) feature space.
    pub fn apply(&self, raw: &Matrix) -> Result<Matrix> {
        let p = self.mean.len();
        if raw.ncols() != p {
            return Err(GlossError::DimensionMismatch {
                context: "CenteringStats::apply",
                expected: p,
                found: raw.ncols(),
            });
        }
        Ok(Matrix::from_fn(raw.nrows(), p, |i, j| {
            let c = raw[(i, j)] - self.mean[j];
            match &self.scale {
                Some(s) => c / s[j],
                None => c,
            }
        }))
    }

    /// Inverse of [`CenteringStats::apply`].
    pub fn restore(&self, centered: &Matrix) -> Matrix {
        Matrix::from_fn(centered.nrows(), centered.ncols(), |i, j| {
            let v = match &self.scale {
                Some(s) => centered[(i, j)] * s[j],
                None => centered[(i, j)],
            };
            v + self.mean[j]
        })
    }
}

/// Centered features with exclusive class assignments.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    x: Matrix,
    y: Matrix,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Option<Vec<String>>,
    centering: CenteringStats,
}

impl LabeledDataset {
    /// Centers `raw` (and optionally standardizes it) and encodes `labels`, which must lie in `0..n_classes`.
    pub fn from_raw(
        raw: Matrix,
        labels: Vec<usize>,
        n_classes: usize,
        standardize: bool,
    ) -> Result<Self> {
        let (n, p) = (raw.nrows(), raw.ncols());
        if n == 0 {
            return Err(GlossError::InvalidConfig("dataset has no rows".into()));
        }
        if p == 0 {
            return Err(GlossError::InvalidConfig("no feature columns".into()));
        }
        if labels.len() != n {
            return Err(GlossError::DimensionMismatch {
                context: "LabeledDataset labels",
                expected: n,
                found: labels.len(),
            });
        }
        if n_classes < 2 {
            return Err(GlossError::TooFewClasses { found: n_classes });
        }
        if !raw.is_finite() {
            return Err(GlossError::InvalidConfig("features must be finite".into()));
        }
        let y = encode_indicators(&labels, n_classes)?;
        let mut class_counts = vec![0usize; n_classes];
        for &l in &labels {
            class_counts[l] += 1;
        }
        if let Some(k) = class_counts.iter().position(|&c| c == 0) {
            return Err(GlossError::EmptyClass { class: k });
        }

        let mut mean = vec![0.0; p];
        for row in raw.rows_iter() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let scale = if standardize {
            let mut ss = vec![0.0; p];
            for row in raw.rows_iter() {
                for j in 0..p {
                    let d = row[j] - mean[j];
                    ss[j] += d * d;
                }
            }
            let denom = (n.max(2) - 1) as f64;
            let mut sd = Vec::with_capacity(p);
            for (j, s) in ss.into_iter().enumerate() {
                let v = sqrt(s / denom);
                if !(v > 0.0) {
                    return Err(GlossError::ZeroVariance { feature: j });
                }
                sd.push(v);
            }
            Some(sd)
        } else {
            None
        };
        let centering = CenteringStats { mean, scale };
        let x = centering.apply(&raw)?;
        let class_names = (0..n_classes).map(|k| alloc::format!("{}", k + 1)).collect();
        Ok(LabeledDataset {
            x,
            y,
            labels,
            class_counts,
            class_names,
            feature_names: None,
            centering,
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_classes() {
            return Err(GlossError::DimensionMismatch {
                context: "class names",
                expected: self.n_classes(),
                found: names.len(),
            });
        }
        self.class_names = names;
        Ok(self)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(GlossError::DimensionMismatch {
                context: "feature names",
                expected: self.n_features(),
                found: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    /// Rows `idx` of the raw data, re-centered with their own statistics.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let raw = self.raw_features().select_rows(idx);
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        let mut out = LabeledDataset::from_raw(
            raw,
            labels,
            self.n_classes(),
            self.centering.scale.is_some(),
        )?;
        out.class_names = self.class_names.clone();
        out.feature_names = self.feature_names.clone();
        Ok(out)
    }

    /// The features in their original units.
    pub fn raw_features(&self) -> Matrix {
        self.centering.restore(&self.x)
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn centering(&self) -> &CenteringStats {
        &self.centering
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    /// Class means of the centered features, one row per class.
    pub fn class_means(&self) -> Matrix {
        class_means(&self.x, &self.labels, &self.class_counts)
    }
}

/// Binary indicator matrix: row `i` has a single 1 in column `labels[i]`.
pub fn encode_indicators(labels: &[usize], n_classes: usize) -> Result<Matrix> {
    if labels.is_empty() {
        return Err(GlossError::InvalidConfig("no labels to encode".into()));
    }
    let mut y = Matrix::zeros(labels.len(), n_classes);
    for (i, &l) in labels.iter().enumerate() {
        if l >= n_classes {
            return Err(GlossError::LabelOutOfRange {
                label: l,
                classes: n_classes,
            });
        }
        y[(i, l)] = 1.0;
    }
    Ok(y)
}

/// Inverse of [`encode_indicators`].
pub fn decode_indicators(y: &Matrix) -> Result<Vec<usize>> {
    y.rows_iter()
        .enumerate()
        .map(|(i, row)| {
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            let zeros = row.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != row.len() {
                return Err(GlossError::InvalidIndicator { row: i });
            }
            Ok(row.iter().position(|&v| v == 1.0).unwrap_or(0))
        })
        .collect()
}

pub fn class_means(x: &Matrix, labels: &[usize], counts: &[usize]) -> Matrix {
    let mut means = Matrix::zeros(counts.len(), x.ncols());
    for (row, &l) in x.rows_iter().zip(labels) {
        for (m, v) in means.row_mut(l).iter_mut().zip(row) {
            *m += v;
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        let inv = 1.0 / c as f64;
        means.row_mut(k).iter_mut().for_each(|m| *m *= inv);
    }
    means
}

/// Total, between-class and within-class sample covariances.
#[derive(Debug, Clone)]
pub struct ScatterMatrices {
    pub total: Matrix,
    pub between: Matrix,
    pub within: Matrix,
    pub class_means: Matrix,
}

/// `S = XᵀX/n`, `S_b = Σ n_k μ_k μ_kᵀ / n`, `S_w = S − S_b`.
pub fn scatter_matrices(data: &LabeledDataset) -> ScatterMatrices {
    let n = data.n_samples() as f64;
    let p = data.n_features();
    let x = data.x();
    let total = x.t_matmul(x).expect("square by construction").scale(1.0 / n);
    let class_means = data.class_means();
    let mut between = Matrix::zeros(p, p);
    for (k, &nk) in data.class_counts().iter().enumerate() {
        let mu = class_means.row(k);
        let w = nk as f64 / n;
        for i in 0..p {
            let a = w * mu[i];
            if a == 0.0 {
                continue;
            }
            for (b, m) in between.row_mut(i).iter_mut().zip(mu) {
                *b += a * m;
            }
        }
    }
    let within = total.sub(&between);
    ScatterMatrices {
        total,
        between,
        within,
        class_means,
    }
}

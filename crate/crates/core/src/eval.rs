//! Simulation scenarios, Bayes-rule oracle, cross-validation and study metrics.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::LabeledDataset;
use crate::error::{GlossError, Result};
use crate::glossfit::{lambda_max, init_theta0, path_on_grid, solution_path, FitConfig, GramMode, PathConfig};
use crate::lda::{error_rate, os_to_lda, LdaModel};
use crate::linalg::{sqrt, Matrix};

/// Mean-shift amplitude for the block scenario with a 1.7% Bayes error.
pub const SIM1_SHIFT: f64 = 0.7058;
/// Mean-shift amplitude for the correlated two-class scenario (6.7%).
pub const SIM2_SHIFT: f64 = 0.5843;
/// AR(1) coefficient of the correlated scenario.
pub const SIM2_CORRELATION: f64 = 0.6;
/// Spacing of the collinear class means (7.3%).
pub const SIM3_SHIFT: f64 = 0.3316;
/// Mean-shift amplitude of the hard block scenario (30%).
pub const SIM4_SHIFT: f64 = 0.2987;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Four classes, one block of shifted features per class, independent features.
    Sim1,
    /// Two classes, one shifted block, AR(1)-correlated features.
    Sim2,
    /// Four classes with collinear means along one shifted block.
    Sim3,
    /// Same structure as `Sim1` with a much smaller shift.
    Sim4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Sim1, Scenario::Sim2, Scenario::Sim3, Scenario::Sim4];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Sim1 => "sim1",
            Scenario::Sim2 => "sim2",
            Scenario::Sim3 => "sim3",
            Scenario::Sim4 => "sim4",
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Scenario::Sim2 => 2,
            _ => 4,
        }
    }

    /// Bayes error the default amplitudes are calibrated to.
    pub fn target_bayes_error(&self) -> f64 {
        match self {
            Scenario::Sim1 => 0.017,
            Scenario::Sim2 => 0.067,
            Scenario::Sim3 => 0.073,
            Scenario::Sim4 => 0.30,
        }
    }

    /// Rank of the class-mean configuration.
    pub fn true_directions(&self) -> usize {
        match self {
            Scenario::Sim1 | Scenario::Sim4 => 3,
            Scenario::Sim2 | Scenario::Sim3 => 1,
        }
    }
}

impl core::str::FromStr for Scenario {
    type Err = GlossError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sim1" => Ok(Scenario::Sim1),
            "sim2" => Ok(Scenario::Sim2),
            "sim3" => Ok(Scenario::Sim3),
            "sim4" => Ok(Scenario::Sim4),
            other => Err(GlossError::InvalidConfig(alloc::format!("unknown scenario '{other}'"))),
        }
    }
}

/// Calibrated generator amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub sim1_shift: f64,
    pub sim2_shift: f64,
    pub sim2_correlation: f64,
    pub sim3_shift: f64,
    pub sim4_shift: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            sim1_shift: SIM1_SHIFT,
            sim2_shift: SIM2_SHIFT,
            sim2_correlation: SIM2_CORRELATION,
            sim3_shift: SIM3_SHIFT,
            sim4_shift: SIM4_SHIFT,
        }
    }
}

impl Calibration {
    pub fn shift(&self, scenario: Scenario) -> f64 {
        match scenario {
            Scenario::Sim1 => self.sim1_shift,
            Scenario::Sim2 => self.sim2_shift,
            Scenario::Sim3 => self.sim3_shift,
            Scenario::Sim4 => self.sim4_shift,
        }
    }

    /// Solves for the amplitudes that hit each scenario's target Bayes error
    /// with the default sizes and the given AR(1) coefficient.
    pub fn solve(sim2_correlation: f64) -> Result<Self> {
        let mut out = Calibration {
            sim2_correlation,
            ..Calibration::default()
        };
        for s in Scenario::ALL {
            let mut spec = SimulationSpec::new(s, 0);
            spec.correlation = if s == Scenario::Sim2 { sim2_correlation } else { 0.0 };
            let shift = calibrate_shift(&spec, s.target_bayes_error())?;
            match s {
                Scenario::Sim1 => out.sim1_shift = shift,
                Scenario::Sim2 => out.sim2_shift = shift,
                Scenario::Sim3 => out.sim3_shift = shift,
                Scenario::Sim4 => out.sim4_shift = shift,
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub scenario: Scenario,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub p: usize,
    pub n_relevant: usize,
    pub mean_shift: f64,
    /// AR(1) coefficient between neighbouring features (used by `Sim2`).
    pub correlation: f64,
    pub seed: u64,
}

impl SimulationSpec {
    /// Default sizes with the built-in calibrated amplitudes.
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self::with_calibration(scenario, &Calibration::default(), seed)
    }

    pub fn with_calibration(scenario: Scenario, cal: &Calibration, seed: u64) -> Self {
        SimulationSpec {
            scenario,
            n_train: 100,
            n_val: 100,
            n_test: 1000,
            p: 500,
            n_relevant: 100,
            mean_shift: cal.shift(scenario),
            correlation: if scenario == Scenario::Sim2 { cal.sim2_correlation } else { 0.0 },
            seed,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.scenario.n_classes()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_classes();
        if self.n_relevant == 0 || self.n_relevant > self.p {
            return Err(GlossError::InvalidConfig(
                "n_relevant must lie in 1..=p".to_string(),
            ));
        }
        if !(self.mean_shift > 0.0) || !self.mean_shift.is_finite() {
            return Err(GlossError::InvalidConfig("mean shift must be positive".to_string()));
        }
        if !(0.0..1.0).contains(&self.correlation) {
            return Err(GlossError::InvalidConfig("correlation must lie in [0, 1)".to_string()));
        }
        if matches!(self.scenario, Scenario::Sim1 | Scenario::Sim4) && !self.n_relevant.is_multiple_of(k) {
            return Err(GlossError::InvalidConfig(
                "n_relevant must be a multiple of the number of classes".to_string(),
            ));
        }
        for (name, n) in [("n_train", self.n_train), ("n_val", self.n_val), ("n_test", self.n_test)] {
            if n < k {
                return Err(GlossError::InvalidConfig(alloc::format!(
                    "{name} must be at least the number of classes"
                )));
            }
        }
        Ok(())
    }

    /// Class means, `K × p`.
    pub fn class_means(&self) -> Matrix {
        let k = self.n_classes();
        let mut mu = Matrix::zeros(k, self.p);
        match self.scenario {
            Scenario::Sim1 | Scenario::Sim4 => {
                let block = self.n_relevant / k;
                for c in 0..k {
                    for j in c * block..(c + 1) * block {
                        mu[(c, j)] = self.mean_shift;
                    }
                }
            }
            Scenario::Sim2 | Scenario::Sim3 => {
                for c in 0..k {
                    for j in 0..self.n_relevant {
                        mu[(c, j)] = c as f64 * self.mean_shift;
                    }
                }
            }
        }
        mu
    }

    /// Indices of the features whose mean depends on the class.
    pub fn true_support(&self) -> Vec<usize> {
        (0..self.n_relevant).collect()
    }

    /// Draws `n` rows with balanced labels `i mod K`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (Matrix, Vec<usize>) {
        let k = self.n_classes();
        let mu = self.class_means();
        let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        let rho = self.correlation;
        let innov = sqrt(1.0 - rho * rho);
        let mut x = Matrix::zeros(n, self.p);
        for (i, &c) in labels.iter().enumerate() {
            let row = x.row_mut(i);
            let mut prev = 0.0;
            for (j, v) in row.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                let e = if j == 0 || rho == 0.0 { z } else { rho * prev + innov * z };
                prev = e;
                *v = e + mu[(c, j)];
            }
        }
        (x, labels)
    }
}

/// Train/validation/test splits of one simulated repetition.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub test: LabeledDataset,
    pub true_support: Vec<usize>,
}

/// Deterministic in `spec.seed`; the three splits come from one random stream.
pub fn simulate(spec: &SimulationSpec) -> Result<SimulatedData> {
    spec.validate()?;
    let k = spec.n_classes();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut split = |n: usize| -> Result<LabeledDataset> {
        let (x, labels) = spec.sample(n, &mut rng);
        let names = (1..=k).map(|c| alloc::format!("class{c}")).collect();
        LabeledDataset::from_raw(x, labels, k, false)?.with_class_names(names)
    };
    let train = split(spec.n_train)?;
    let val = split(spec.n_val)?;
    let test = split(spec.n_test)?;
    Ok(SimulatedData {
        train,
        val,
        test,
        true_support: spec.true_support(),
    })
}

/// Seed of repetition `r` derived from a base seed on an independent stream.
pub fn repetition_seed(base: u64, r: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(r as u64 + 1);
    rng.next_u64()
}

/// `Σ⁻¹ v` for the unit-variance AR(1) covariance with coefficient `rho`.
fn ar1_precision_apply(v: &[f64], rho: f64) -> Vec<f64> {
    let p = v.len();
    let s = 1.0 - rho * rho;
    (0..p)
        .map(|j| {
            let interior = j > 0 && j + 1 < p;
            let diag = if interior { 1.0 + rho * rho } else { 1.0 };
            let mut out = diag * v[j];
            if j > 0 {
                out -= rho * v[j - 1];
            }
            if j + 1 < p {
                out -= rho * v[j + 1];
            }
            if p == 1 {
                out = v[0] * s;
            }
            out / s
        })
        .collect()
}

/// Optimal classifier of the generating model (equal priors).
#[derive(Debug, Clone)]
pub struct BayesRule {
    /// `Σ⁻¹ μ_k`, `K × p`.
    weights: Matrix,
    offsets: Vec<f64>,
}

impl BayesRule {
    pub fn for_spec(spec: &SimulationSpec) -> Self {
        let mu = spec.class_means();
        let k = mu.nrows();
        let mut weights = Matrix::zeros(k, spec.p);
        let mut offsets = vec![0.0; k];
        for c in 0..k {
            let w = ar1_precision_apply(mu.row(c), spec.correlation);
            offsets[c] = -0.5 * crate::linalg::dot(&w, mu.row(c));
            weights.row_mut(c).copy_from_slice(&w);
        }
        BayesRule { weights, offsets }
    }

    pub fn classify(&self, raw: &Matrix) -> Vec<usize> {
        raw.rows_iter()
            .map(|x| {
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for c in 0..self.offsets.len() {
                    let s = crate::linalg::dot(self.weights.row(c), x) + self.offsets[c];
                    if s > best_score {
                        best = c;
                        best_score = s;
                    }
                }
                best
            })
            .collect()
    }
}

/// Bayes error of the generating model estimated on `n` fresh draws.
pub fn monte_carlo_bayes_error(spec: &SimulationSpec, n: usize, seed: u64) -> f64 {
    let rule = BayesRule::for_spec(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wrong = 0usize;
    let chunk = 2000;
    let mut done = 0;
    while done < n {
        let m = chunk.min(n - done);
        let (x, labels) = spec.sample(m, &mut rng);
        wrong += rule
            .classify(&x)
            .iter()
            .zip(&labels)
            .filter(|(a, b)| a != b)
            .count();
        done += m;
    }
    wrong as f64 / n as f64
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / sqrt(2.0 * core::f64::consts::PI)
}

/// Exact Bayes error of the generating model (numerical quadrature for the
/// block scenarios, closed forms otherwise).
pub fn bayes_error(spec: &SimulationSpec) -> f64 {
    let k = spec.n_classes();
    match spec.scenario {
        Scenario::Sim1 | Scenario::Sim4 => {
            // class-block sums, scaled to unit variance, separate by d
            let d = spec.mean_shift * sqrt((spec.n_relevant / k) as f64);
            let (lo, hi, steps) = (d - 12.0, d + 12.0, 4000usize);
            let h = (hi - lo) / steps as f64;
            let f = |t: f64| normal_pdf(t - d) * libm::pow(normal_cdf(t), (k - 1) as f64);
            let mut acc = f(lo) + f(hi);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(lo + i as f64 * h);
            }
            1.0 - acc * h / 3.0
        }
        Scenario::Sim2 | Scenario::Sim3 => {
            let mu = spec.class_means();
            let diff: Vec<f64> = mu.row(1).iter().zip(mu.row(0)).map(|(a, b)| a - b).collect();
            let w = ar1_precision_apply(&diff, spec.correlation);
            let delta = sqrt(crate::linalg::dot(&w, &diff));
            // collinear, equally spaced means: interior classes err on both sides
            2.0 * (k as f64 - 1.0) / k as f64 * normal_cdf(-delta / 2.0)
        }
    }
}

/// Mean shift giving the requested Bayes error, by bisection.
pub fn calibrate_shift(spec: &SimulationSpec, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0 - 1.0 / spec.n_classes() as f64) {
        return Err(GlossError::InvalidConfig("target Bayes error out of range".to_string()));
    }
    let mut s = spec.clone();
    let (mut lo, mut hi) = (1e-6, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        s.mean_shift = mid;
        if bayes_error(&s) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// True and false positive rates of an estimated support.
pub fn support_metrics(estimated: &[usize], truth: &[usize], p: usize) -> Result<(f64, f64)> {
    if truth.is_empty() {
        return Err(GlossError::EmptyTruth);
    }
    let mut in_truth = vec![false; p];
    for &j in truth {
        if j >= p {
            return Err(GlossError::InvalidConfig(alloc::format!("index {j} out of range")));
        }
        in_truth[j] = true;
    }
    let mut seen = vec![false; p];
    let (mut tp, mut fp) = (0usize, 0usize);
    for &j in estimated {
        if j >= p {
            return Err(GlossError::InvalidConfig(alloc::format!("index {j} out of range")));
        }
        if core::mem::replace(&mut seen[j], true) {
            continue;
        }
        if in_truth[j] {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    let n_true = in_truth.iter().filter(|t| **t).count();
    let n_false = p - n_true;
    let fpr = if n_false == 0 { 0.0 } else { fp as f64 / n_false as f64 };
    Ok((tp as f64 / n_true as f64, fpr))
}

/// Fold index of every example: classes are shuffled separately and dealt
/// round-robin, so each fold receives every class.
pub fn stratified_folds(labels: &[usize], n_classes: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(GlossError::InvalidConfig("at least 2 folds are required".to_string()));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        if c >= n_classes {
            return Err(GlossError::LabelOutOfRange { label: c, classes: n_classes });
        }
        by_class[c].push(i);
    }
    for (c, members) in by_class.iter().enumerate() {
        if members.len() < folds {
            return Err(GlossError::ClassTooSmall { class: c, count: members.len(), folds });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    Ok(fold_of)
}

/// `λ_max · factor^i` for `i = 0..len`.
pub fn lambda_grid(data: &LabeledDataset, factor: f64, len: usize, config: &FitConfig) -> Result<Vec<f64>> {
    if !(factor > 0.0 && factor < 1.0) || len == 0 {
        return Err(GlossError::InvalidConfig("grid needs a factor in (0, 1) and length ≥ 1".to_string()));
    }
    let theta0 = init_theta0(data.y())?;
    let lmax = lambda_max(data, &theta0, config.weights.as_deref())?;
    if !(lmax > 0.0) {
        return Err(GlossError::InvalidConfig("lambda_max is zero".to_string()));
    }
    Ok((0..len).map(|i| lmax * libm::pow(factor, i as f64)).collect())
}

/// Model for `fit`, falling back to the prior-only rule when no direction survives.
pub fn lda_or_prior(fit: &crate::glossfit::OsFit, data: &LabeledDataset) -> Result<LdaModel> {
    match os_to_lda(fit, data) {
        Ok(m) => Ok(m),
        Err(GlossError::NoDiscriminativeDirection { .. }) => Ok(LdaModel::prior_only(
            data.n_features(),
            data.class_counts(),
            fit.lambda,
        )),
        Err(e) => Err(e),
    }
}

/// Held-out error of every grid penalty when fold `fold` is left out.
pub fn cv_fold_errors(
    data: &LabeledDataset,
    fold_of: &[usize],
    fold: usize,
    grid: &[f64],
    config: &FitConfig,
) -> Result<Vec<f64>> {
    let train_idx: Vec<usize> = (0..fold_of.len()).filter(|&i| fold_of[i] != fold).collect();
    let test_idx: Vec<usize> = (0..fold_of.len()).filter(|&i| fold_of[i] == fold).collect();
    let train = data.subset(&train_idx)?;
    let raw = data.raw_features();
    let test_x = raw.select_rows(&test_idx);
    let test_y: Vec<usize> = test_idx.iter().map(|&i| data.labels()[i]).collect();
    let path = path_on_grid(&train, grid, config)?;
    // path_on_grid sorts decreasingly; report in the caller's order
    let mut errors = vec![0.0; grid.len()];
    for (g, &lambda) in grid.iter().enumerate() {
        let t = path
            .lambdas
            .iter()
            .position(|&l| l == lambda)
            .expect("grid penalty present on the path");
        let model = lda_or_prior(&path.fits[t], &train)?;
        let pred = model.classify(&test_x, train.centering())?;
        errors[g] = error_rate(&pred, &test_y);
    }
    Ok(errors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub best_lambda: f64,
    pub lambdas: Vec<f64>,
    /// `fold_errors[f][g]`: error of penalty `g` on fold `f`.
    pub fold_errors: Vec<Vec<f64>>,
    pub mean_errors: Vec<f64>,
}

/// Mean error per penalty; the largest penalty attaining the minimum wins.
pub fn summarize_cv(lambdas: &[f64], fold_errors: Vec<Vec<f64>>) -> Result<CvResult> {
    if lambdas.is_empty() || fold_errors.is_empty() {
        return Err(GlossError::InvalidConfig("empty cross-validation table".to_string()));
    }
    let nf = fold_errors.len() as f64;
    let mean_errors: Vec<f64> = (0..lambdas.len())
        .map(|g| fold_errors.iter().map(|f| f[g]).sum::<f64>() / nf)
        .collect();
    let min = mean_errors.iter().copied().fold(f64::INFINITY, f64::min);
    let best_lambda = lambdas
        .iter()
        .zip(&mean_errors)
        .filter(|(_, e)| **e <= min)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CvResult {
        best_lambda,
        lambdas: lambdas.to_vec(),
        fold_errors,
        mean_errors,
    })
}

/// Stratified k-fold cross-validation over a penalty grid (sequential).
pub fn cross_validate(
    data: &LabeledDataset,
    folds: usize,
    grid: &[f64],
    config: &FitConfig,
    seed: u64,
) -> Result<CvResult> {
    let fold_of = stratified_folds(data.labels(), data.n_classes(), folds, seed)?;
    let table = (0..folds)
        .map(|f| cv_fold_errors(data, &fold_of, f, grid, config))
        .collect::<Result<Vec<_>>>()?;
    summarize_cv(grid, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gloss(GramMode),
    /// The generating model's optimal rule; a harness check.
    BayesOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Gloss(GramMode::Standard) => "gloss",
            Method::Gloss(GramMode::Diagonal) => "gloss-d",
            Method::BayesOracle => "bayes",
        }
    }
}

/// Test-set metrics of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub err_pct: f64,
    pub n_vars: usize,
    pub n_dirs: usize,
    pub tpr: f64,
    pub fpr: f64,
    /// Selected penalty (absent for the oracle).
    pub lambda: Option<f64>,
}

/// Penalty and dimension chosen on validation data.
#[derive(Debug, Clone)]
pub struct Selection {
    pub model: LdaModel,
    pub dims: usize,
    pub val_error: f64,
}

/// Picks the path model and direction count with the lowest validation error;
/// ties go to the larger penalty, then to fewer directions.
pub fn select_on_validation(
    path: &crate::glossfit::RegularizationPath,
    train: &LabeledDataset,
    val: &LabeledDataset,
) -> Result<Selection> {
    let val_x = val.raw_features();
    let mut best: Option<Selection> = None;
    for fit in &path.fits {
        let model = lda_or_prior(fit, train)?;
        let (dims, err) = if model.n_directions() == 0 {
            let pred = model.classify(&val_x, train.centering())?;
            (0, error_rate(&pred, val.labels()))
        } else {
            let sel = model.select_dimension(&val_x, val.labels(), train.centering())?;
            (sel.selected, sel.error())
        };
        if best.as_ref().is_none_or(|b| err < b.val_error) {
            best = Some(Selection { model, dims, val_error: err });
        }
    }
    best.ok_or_else(|| GlossError::InvalidConfig("empty path".to_string()))
}

/// Runs one repetition of the simulation protocol on already generated data.
pub fn evaluate_repetition(
    spec: &SimulationSpec,
    sim: &SimulatedData,
    method: Method,
    path_config: &PathConfig,
) -> Result<MetricsRow> {
    let test_x = sim.test.raw_features();
    match method {
        Method::BayesOracle => {
            let pred = BayesRule::for_spec(spec).classify(&test_x);
            Ok(MetricsRow {
                err_pct: 100.0 * error_rate(&pred, sim.test.labels()),
                n_vars: sim.true_support.len(),
                n_dirs: spec.scenario.true_directions(),
                tpr: 1.0,
                fpr: 0.0,
                lambda: None,
            })
        }
        Method::Gloss(mode) => {
            let mut config = path_config.clone();
            config.fit.gram_mode = mode;
            let path = solution_path(&sim.train, &config)?;
            let sel = select_on_validation(&path, &sim.train, &sim.val)?;
            let z = sel.model.project(&test_x, sim.train.centering())?;
            let pred = sel.model.classify_projected(&z, sel.dims);
            let support = sel.model.active_set.indices();
            let (tpr, fpr) = support_metrics(support, &sim.true_support, spec.p)?;
            Ok(MetricsRow {
                err_pct: 100.0 * error_rate(&pred, sim.test.labels()),
                n_vars: support.len(),
                n_dirs: sel.dims,
                tpr,
                fpr,
                lambda: Some(sel.model.lambda),
            })
        }
    }
}

/// Repetition `r` of a study: fresh data from the derived seed, then evaluation.
pub fn study_repetition(
    spec: &SimulationSpec,
    r: usize,
    method: Method,
    path_config: &PathConfig,
) -> Result<MetricsRow> {
    let mut s = spec.clone();
    s.seed = repetition_seed(spec.seed, r);
    let sim = simulate(&s)?;
    evaluate_repetition(&s, &sim, method, path_config)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    /// Standard error of the mean; 0 for a single value.
    pub se: f64,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanSe { mean: f64::NAN, se: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return MeanSe { mean, se: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        MeanSe { mean, se: sqrt(var / n as f64) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySummary {
    pub scenario: Scenario,
    pub method: Method,
    pub n_repeats: usize,
    pub err: MeanSe,
    pub nvars: MeanSe,
    pub ndirs: MeanSe,
    pub tpr_mean: f64,
    pub fpr_mean: f64,
}

impl StudySummary {
    pub fn method_name(&self) -> String {
        self.method.as_str().to_string()
    }
}

/// Aggregates repetitions in the order given.
pub fn summarize_study(scenario: Scenario, method: Method, rows: &[MetricsRow]) -> StudySummary {
    let col = |f: fn(&MetricsRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    StudySummary {
        scenario,
        method,
        n_repeats: rows.len(),
        err: MeanSe::of(&col(|r| r.err_pct)),
        nvars: MeanSe::of(&col(|r| r.n_vars as f64)),
        ndirs: MeanSe::of(&col(|r| r.n_dirs as f64)),
        tpr_mean: MeanSe::of(&col(|r| r.tpr)).mean,
        fpr_mean: MeanSe::of(&col(|r| r.fpr)).mean,
    }
}

/// Sequential study; repetitions use seeds derived from `spec.seed`.
pub fn run_study(
    spec: &SimulationSpec,
    n_repeats: usize,
    method: Method,
    path_config: &PathConfig,
) -> Result<(Vec<MetricsRow>, StudySummary)> {
    if n_repeats == 0 {
        return Err(GlossError::InvalidConfig("at least one repetition is required".to_string()));
    }
    spec.validate()?;
    let rows = (0..n_repeats)
        .map(|r| study_repetition(spec, r, method, path_config))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize_study(spec.scenario, method, &rows);
    Ok((rows, summary))
}

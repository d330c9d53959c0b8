//! Thread-parallel cross-validation folds and study repetitions.
//!
//! Work items are independent and collected in index order, so results do not
//! depend on the number of threads.

use std::time::Instant;

use gloss_core::eval::{
    cv_fold_errors, stratified_folds, study_repetition, summarize_cv, summarize_study, CvResult,
    Method, MetricsRow, SimulationSpec, StudySummary,
};
use gloss_core::{FitConfig, GlossError, LabeledDataset, PathConfig};
use rayon::prelude::*;

/// A pool with `threads` workers; 0 means one per CPU.
pub fn pool(threads: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

pub fn cross_validate(
    data: &LabeledDataset,
    folds: usize,
    grid: &[f64],
    config: &FitConfig,
    seed: u64,
    threads: usize,
) -> anyhow::Result<CvResult> {
    let fold_of = stratified_folds(data.labels(), data.n_classes(), folds, seed)?;
    let table = pool(threads)?.install(|| {
        (0..folds)
            .into_par_iter()
            .map(|f| {
                let e = cv_fold_errors(data, &fold_of, f, grid, config);
                log::debug!("fold {f} done");
                e
            })
            .collect::<Result<Vec<_>, GlossError>>()
    })?;
    Ok(summarize_cv(grid, table)?)
}

#[derive(Debug, Clone)]
pub struct StudyRun {
    pub rows: Vec<MetricsRow>,
    pub seconds: Vec<f64>,
    pub summary: StudySummary,
}

impl StudyRun {
    pub fn seconds_mean(&self) -> f64 {
        self.seconds.iter().sum::<f64>() / self.seconds.len().max(1) as f64
    }
}

pub fn run_study(
    spec: &SimulationSpec,
    n_repeats: usize,
    method: Method,
    path_config: &PathConfig,
    threads: usize,
) -> anyhow::Result<StudyRun> {
    anyhow::ensure!(n_repeats >= 1, "at least one repetition is required");
    spec.validate()?;
    let timed = pool(threads)?.install(|| {
        (0..n_repeats)
            .into_par_iter()
            .map(|r| {
                let t0 = Instant::now();
                let row = study_repetition(spec, r, method, path_config)?;
                let secs = t0.elapsed().as_secs_f64();
                log::info!(
                    "{} {} rep {r}: err {:.2}% vars {} dirs {} ({secs:.2}s)",
                    spec.scenario.as_str(),
                    method.as_str(),
                    row.err_pct,
                    row.n_vars,
                    row.n_dirs
                );
                Ok((row, secs))
            })
            .collect::<Result<Vec<_>, GlossError>>()
    })?;
    let (rows, seconds): (Vec<_>, Vec<_>) = timed.into_iter().unzip();
    let summary = summarize_study(spec.scenario, method, &rows);
    Ok(StudyRun { rows, seconds, summary })
}

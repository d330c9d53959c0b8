//! The `gloss` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gloss_core::eval::{
    lambda_grid, simulate, Method, Scenario, SimulationSpec, StudySummary,
};
use gloss_core::glossfit::{fit, init_theta0, lambda_max, solution_path};
use gloss_core::lda::error_rate;
use gloss_core::{FitConfig, GlossError, GramMode, LdaModel, PathConfig};

use crate::io::{csv_writer, encode_known, load_csv, write_dataset, LabelColumn, LoadedData, Table};
use crate::model::{fitted_lda, ModelFile};
use crate::{calibration, parallel};

#[derive(Debug, Parser)]
#[command(name = "gloss", version, about = "Sparse LDA by group-Lasso penalized optimal scoring")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for folds and simulations.
    #[arg(long, global = true, env = "GLOSS_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for folds and study repetitions (0 = one per CPU).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Within-class covariance used by the fit.
    #[arg(long, global = true, value_enum, default_value_t = Gram::Standard)]
    pub gram: Gram,

    /// Relative KKT tolerance of the solver.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,

    /// Divide features by their standard deviation after centering.
    #[arg(long, global = true)]
    pub standardize: bool,

    /// Omit the timestamp comment from CSV outputs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Gram {
    Standard,
    Diagonal,
}

impl From<Gram> for GramMode {
    fn from(g: Gram) -> Self {
        match g {
            Gram::Standard => GramMode::Standard,
            Gram::Diagonal => GramMode::Diagonal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Sim1,
    Sim2,
    Sim3,
    Sim4,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Sim1 => Scenario::Sim1,
            ScenarioArg::Sim2 => Scenario::Sim2,
            ScenarioArg::Sim3 => Scenario::Sim3,
            ScenarioArg::Sim4 => Scenario::Sim4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gloss,
    #[value(name = "gloss-d")]
    GlossD,
    Bayes,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gloss => Method::Gloss(GramMode::Standard),
            MethodArg::GlossD => Method::Gloss(GramMode::Diagonal),
            MethodArg::Bayes => Method::BayesOracle,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Training CSV file.
    #[arg(long)]
    pub data: PathBuf,

    /// Label column, by header name or 0-based index.
    #[arg(long)]
    pub label: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit at one penalty level.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Warm-started path from lambda_max; one model per level plus summary.csv.
    Path {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.5)]
        factor: f64,
        /// Stop once this many variables are active (default min(n, p)).
        #[arg(long)]
        max_active: Option<usize>,
        #[arg(long, default_value_t = 60)]
        max_steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose lambda by stratified k-fold cross-validation and refit on all data.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0.9)]
        factor: f64,
        #[arg(long, default_value_t = 40)]
        grid_size: usize,
        /// Also write the per-lambda error table here.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify the rows of a CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Label column of the file, if any (defaults to the one used for fitting).
        #[arg(long)]
        label: Option<String>,
        /// Pure nearest-centroid rule, ignoring class priors.
        #[arg(long, conflicts_with = "priors")]
        no_priors: bool,
        /// Comma-separated class priors in model class order.
        #[arg(long, value_delimiter = ',')]
        priors: Option<Vec<f64>>,
        /// Use only the leading directions.
        #[arg(long)]
        dims: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Coordinates of the rows in the discriminant space.
    Project {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        label: Option<String>,
        #[arg(long, conflicts_with = "priors")]
        no_priors: bool,
        #[arg(long, value_delimiter = ',')]
        priors: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one simulated repetition (train, val, test).
    Simulate {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        /// Generator amplitudes (key = value file); built-in values otherwise.
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated simulation study; one table row per method.
    Study {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long, default_value_t = 25)]
        repeats: usize,
        /// Methods to run (default: gloss with the --gram setting).
        #[arg(long, value_enum)]
        method: Vec<MethodArg>,
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        factor: f64,
        /// Also write per-repetition metrics here.
        #[arg(long)]
        details: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve for the generator amplitudes hitting the target Bayes errors.
    Calibrate {
        #[arg(long, default_value_t = gloss_core::eval::SIM2_CORRELATION)]
        correlation: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.global.verbose);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
}

/// 2 for numerical failures of the solver, 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    let numerical = e
        .chain()
        .any(|c| c.downcast_ref::<GlossError>().is_some_and(GlossError::is_numerical));
    if numerical {
        2
    } else {
        1
    }
}

fn fit_config(g: &Global) -> anyhow::Result<FitConfig> {
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        bail!("--tol must be positive");
    }
    Ok(FitConfig {
        gram_mode: g.gram.into(),
        tol: g.tol,
        ..FitConfig::default()
    })
}

fn load(args: &DataArgs, g: &Global) -> anyhow::Result<LoadedData> {
    let data = load_csv(&args.data, &LabelColumn::parse(&args.label), g.standardize)?;
    log::info!(
        "{}: n = {}, p = {}, K = {}",
        args.data.display(),
        data.dataset.n_samples(),
        data.dataset.n_features(),
        data.dataset.n_classes()
    );
    Ok(data)
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Fit { data, lambda, out } => cmd_fit(g, data, *lambda, out),
        Command::Path {
            data,
            factor,
            max_active,
            max_steps,
            out,
        } => cmd_path(g, data, *factor, *max_active, *max_steps, out),
        Command::Cv {
            data,
            folds,
            factor,
            grid_size,
            table,
            out,
        } => cmd_cv(g, data, *folds, *factor, *grid_size, table.as_deref(), out),
        Command::Predict {
            model,
            data,
            label,
            no_priors,
            priors,
            dims,
            out,
        } => {
            let p = Prediction::run(model, data, label.as_deref(), *no_priors, priors.as_deref(), *dims)?;
            p.write_predictions(out, !g.no_timestamp)?;
            p.report();
            Ok(())
        }
        Command::Project {
            model,
            data,
            label,
            no_priors,
            priors,
            out,
        } => {
            let p = Prediction::run(model, data, label.as_deref(), *no_priors, priors.as_deref(), None)?;
            p.write_projection(out, !g.no_timestamp)?;
            p.report();
            Ok(())
        }
        Command::Simulate {
            scenario,
            calibration,
            out,
        } => cmd_simulate(g, (*scenario).into(), calibration.as_deref(), out),
        Command::Study {
            scenario,
            repeats,
            method,
            calibration,
            factor,
            details,
            out,
        } => cmd_study(g, (*scenario).into(), *repeats, method, calibration.as_deref(), *factor, details.as_deref(), out),
        Command::Calibrate { correlation, out } => {
            if !(0.0..1.0).contains(correlation) {
                bail!("--correlation must lie in [0, 1)");
            }
            let cal = gloss_core::eval::Calibration::solve(*correlation)?;
            fs::write(out, calibration::render(&cal)).with_context(|| format!("cannot write {}", out.display()))?;
            print!("{}", calibration::render(&cal));
            Ok(())
        }
    }
}

fn cmd_fit(g: &Global, args: &DataArgs, lambda: f64, out: &Path) -> anyhow::Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        bail!("--lambda must be a non-negative number");
    }
    let loaded = load(args, g)?;
    let data = &loaded.dataset;
    let config = fit_config(g)?;
    let theta0 = init_theta0(data.y())?;
    let lmax = lambda_max(data, &theta0, None)?;
    let f = fit(data, lambda, &theta0, &config)?;
    if !f.converged {
        log::warn!("fit did not converge within the iteration limits");
    }
    let model = fitted_lda(&f, data)?;
    let train_err = error_rate(&model.classify(&data.raw_features(), data.centering())?, data.labels());
    ModelFile::from_fit(&f, data, Some(args.label.clone())).save(out)?;
    println!("lambda = {lambda} (lambda_max = {lmax})");
    println!("{} active variables", f.n_active());
    println!("{} discriminant directions", model.n_directions());
    println!("training error {:.4}", train_err);
    Ok(())
}

fn cmd_path(
    g: &Global,
    args: &DataArgs,
    factor: f64,
    max_active: Option<usize>,
    max_steps: usize,
    out: &Path,
) -> anyhow::Result<()> {
    let loaded = load(args, g)?;
    let data = &loaded.dataset;
    let config = PathConfig {
        halving_factor: factor,
        max_active,
        max_steps,
        fit: fit_config(g)?,
        ..PathConfig::default()
    };
    let path = solution_path(data, &config)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut w = csv_writer(&out.join("summary.csv"), !g.no_timestamp)?;
    w.write_record([
        "step",
        "lambda",
        "n_active",
        "n_directions",
        "objective",
        "converged",
        "train_error",
        "model",
    ])?;
    let raw = data.raw_features();
    for (t, f) in path.fits.iter().enumerate() {
        let name = format!("model_{t:03}.json");
        ModelFile::from_fit(f, data, Some(args.label.clone())).save(&out.join(&name))?;
        let model = fitted_lda(f, data)?;
        let err = error_rate(&model.classify(&raw, data.centering())?, data.labels());
        w.write_record([
            t.to_string(),
            f.lambda.to_string(),
            f.n_active().to_string(),
            model.n_directions().to_string(),
            f.objective.to_string(),
            f.converged.to_string(),
            err.to_string(),
            name,
        ])?;
    }
    w.flush()?;
    println!(
        "{} penalty levels from lambda_max = {} down to {}; {} active variables at the end",
        path.len(),
        path.lambda_max,
        path.lambdas.last().copied().unwrap_or(f64::NAN),
        path.fits.last().map_or(0, |f| f.n_active())
    );
    Ok(())
}

fn cmd_cv(
    g: &Global,
    args: &DataArgs,
    folds: usize,
    factor: f64,
    grid_size: usize,
    table: Option<&Path>,
    out: &Path,
) -> anyhow::Result<()> {
    if folds < 2 {
        bail!("--folds must be at least 2");
    }
    let loaded = load(args, g)?;
    let data = &loaded.dataset;
    let config = fit_config(g)?;
    let grid = lambda_grid(data, factor, grid_size, &config)?;
    let cv = parallel::cross_validate(data, folds, &grid, &config, g.seed, g.threads)?;
    if let Some(t) = table {
        let mut w = csv_writer(t, !g.no_timestamp)?;
        let mut header = vec!["lambda".to_string(), "mean_error".to_string()];
        header.extend((1..=folds).map(|f| format!("fold_{f}")));
        w.write_record(&header)?;
        for (gi, l) in cv.lambdas.iter().enumerate() {
            let mut rec = vec![l.to_string(), cv.mean_errors[gi].to_string()];
            rec.extend(cv.fold_errors.iter().map(|f| f[gi].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    let theta0 = init_theta0(data.y())?;
    let f = fit(data, cv.best_lambda, &theta0, &config)?;
    ModelFile::from_fit(&f, data, Some(args.label.clone())).save(out)?;
    let best = cv.lambdas.iter().position(|l| *l == cv.best_lambda).unwrap_or(0);
    println!("best lambda = {} (cv error {:.4})", cv.best_lambda, cv.mean_errors[best]);
    println!("{} active variables", f.n_active());
    Ok(())
}

/// A model applied to a file, shared by `predict` and `project`.
struct Prediction {
    model_file: ModelFile,
    lda: LdaModel,
    z: gloss_core::Matrix,
    dims: usize,
    predicted: Vec<usize>,
    truth: Option<Vec<usize>>,
}

impl Prediction {
    fn run(
        model_path: &Path,
        data_path: &Path,
        label: Option<&str>,
        no_priors: bool,
        priors: Option<&[f64]>,
        dims: Option<usize>,
    ) -> anyhow::Result<Self> {
        let mf = ModelFile::load(model_path)?;
        let mut lda = mf.to_lda()?;
        if no_priors {
            lda = lda.with_uniform_priors();
        } else if let Some(p) = priors {
            lda = lda.with_priors(p)?;
        }
        let table = Table::read(data_path)?;
        let width = table.rows[0].len();
        let label_col = match (label, &mf.label_column) {
            (Some(l), _) => Some(LabelColumn::parse(l)),
            (None, Some(l)) if width == mf.n_features + 1 => Some(LabelColumn::parse(l)),
            _ => None,
        };
        let features = table.split(label_col.as_ref())?;
        if features.x.ncols() != mf.n_features {
            return Err(crate::io::DataError::FeatureCount {
                path: data_path.to_path_buf(),
                expected: mf.n_features,
                found: features.x.ncols(),
            }
            .into());
        }
        let truth = features
            .labels
            .as_ref()
            .map(|l| encode_known(data_path, l, &features.lines, &mf.class_labels))
            .transpose()?;
        let z = lda.project(&features.x, &mf.centering())?;
        let dims = dims.unwrap_or(lda.n_directions()).min(lda.n_directions());
        let predicted = lda.classify_projected(&z, dims);
        Ok(Prediction {
            model_file: mf,
            lda,
            z,
            dims,
            predicted,
            truth,
        })
    }

    fn class(&self, k: usize) -> &str {
        &self.model_file.class_labels[k]
    }

    fn write_predictions(&self, out: &Path, stamp: bool) -> anyhow::Result<()> {
        let mut w = csv_writer(out, stamp)?;
        let mut header = vec!["id", "predicted_label"];
        if self.truth.is_some() {
            header.push("true_label");
        }
        w.write_record(&header)?;
        for (i, &p) in self.predicted.iter().enumerate() {
            let mut rec = vec![(i + 1).to_string(), self.class(p).to_string()];
            if let Some(t) = &self.truth {
                rec.push(self.class(t[i]).to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_projection(&self, out: &Path, stamp: bool) -> anyhow::Result<()> {
        let mut w = csv_writer(out, stamp)?;
        let m = self.lda.n_directions();
        let mut header = vec!["id".to_string()];
        header.extend((1..=m).map(|a| format!("z_{a}")));
        header.push("true_label".to_string());
        header.push("predicted_label".to_string());
        w.write_record(&header)?;
        for (i, &p) in self.predicted.iter().enumerate() {
            let mut rec = vec![(i + 1).to_string()];
            rec.extend(self.z.row(i).iter().map(|v| v.to_string()));
            rec.push(self.truth.as_ref().map_or(String::new(), |t| self.class(t[i]).to_string()));
            rec.push(self.class(p).to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn report(&self) {
        println!(
            "{} rows, {} of {} directions used",
            self.predicted.len(),
            self.dims,
            self.lda.n_directions()
        );
        if let Some(t) = &self.truth {
            let wrong = self.predicted.iter().zip(t).filter(|(a, b)| a != b).count();
            println!(
                "error rate {:.4} ({wrong}/{})",
                error_rate(&self.predicted, t),
                t.len()
            );
        }
    }
}

fn spec_for(scenario: Scenario, cal: Option<&Path>, seed: u64) -> anyhow::Result<SimulationSpec> {
    let cal = match cal {
        Some(p) => calibration::load(p)?,
        None => gloss_core::eval::Calibration::default(),
    };
    Ok(SimulationSpec::with_calibration(scenario, &cal, seed))
}

fn cmd_simulate(g: &Global, scenario: Scenario, cal: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let spec = spec_for(scenario, cal, g.seed)?;
    let sim = simulate(&spec)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let stamp = !g.no_timestamp;
    for (name, d) in [("train.csv", &sim.train), ("val.csv", &sim.val), ("test.csv", &sim.test)] {
        let labels: Vec<String> = d.labels().iter().map(|&l| d.class_names()[l].clone()).collect();
        write_dataset(&out.join(name), &d.raw_features(), &labels, stamp)?;
    }
    let support: String = sim.true_support.iter().map(|j| format!("{}\n", j + 1)).collect();
    fs::write(out.join("support.txt"), support)?;
    let desc = format!(
        "scenario = {}\nseed = {}\nn_train = {}\nn_val = {}\nn_test = {}\np = {}\nn_relevant = {}\nmean_shift = {}\ncorrelation = {}\nbayes_error = {}\n",
        scenario.as_str(),
        spec.seed,
        spec.n_train,
        spec.n_val,
        spec.n_test,
        spec.p,
        spec.n_relevant,
        spec.mean_shift,
        spec.correlation,
        gloss_core::eval::bayes_error(&spec)
    );
    fs::write(out.join("spec.txt"), desc)?;
    println!(
        "wrote {} train / {} val / {} test rows with {} features to {}",
        spec.n_train,
        spec.n_val,
        spec.n_test,
        spec.p,
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_study(
    g: &Global,
    scenario: Scenario,
    repeats: usize,
    methods: &[MethodArg],
    cal: Option<&Path>,
    factor: f64,
    details: Option<&Path>,
    out: &Path,
) -> anyhow::Result<()> {
    if repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let spec = spec_for(scenario, cal, g.seed)?;
    let path_config = PathConfig {
        halving_factor: factor,
        fit: fit_config(g)?,
        ..PathConfig::default()
    };
    let methods: Vec<Method> = if methods.is_empty() {
        vec![Method::Gloss(g.gram.into())]
    } else {
        methods.iter().map(|&m| m.into()).collect()
    };
    let mut runs = Vec::new();
    for &m in &methods {
        let run = parallel::run_study(&spec, repeats, m, &path_config, g.threads)?;
        println!("{}", summary_line(&run.summary));
        runs.push(run);
    }
    let mut w = csv_writer(out, !g.no_timestamp)?;
    w.write_record([
        "scenario",
        "method",
        "err_mean",
        "err_se",
        "nvars_mean",
        "nvars_se",
        "ndirs_mean",
        "ndirs_se",
        "tpr_mean",
        "fpr_mean",
        "seconds_mean",
    ])?;
    for run in &runs {
        let s = &run.summary;
        w.write_record([
            s.scenario.as_str().to_string(),
            s.method_name(),
            s.err.mean.to_string(),
            s.err.se.to_string(),
            s.nvars.mean.to_string(),
            s.nvars.se.to_string(),
            s.ndirs.mean.to_string(),
            s.ndirs.se.to_string(),
            s.tpr_mean.to_string(),
            s.fpr_mean.to_string(),
            run.seconds_mean().to_string(),
        ])?;
    }
    w.flush()?;
    if let Some(d) = details {
        let mut w = csv_writer(d, !g.no_timestamp)?;
        w.write_record(["method", "repetition", "err_pct", "n_vars", "n_dirs", "tpr", "fpr", "lambda", "seconds"])?;
        for run in &runs {
            for (r, (row, secs)) in run.rows.iter().zip(&run.seconds).enumerate() {
                w.write_record([
                    run.summary.method_name(),
                    r.to_string(),
                    row.err_pct.to_string(),
                    row.n_vars.to_string(),
                    row.n_dirs.to_string(),
                    row.tpr.to_string(),
                    row.fpr.to_string(),
                    row.lambda.map_or(String::new(), |l| l.to_string()),
                    secs.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn summary_line(s: &StudySummary) -> String {
    format!(
        "{} {}: err {:.1} ({:.1})  vars {:.1} ({:.1})  dirs {:.1} ({:.1})  tpr {:.2}  fpr {:.2}  [{} repetitions]",
        s.scenario.as_str(),
        s.method_name(),
        s.err.mean,
        s.err.se,
        s.nvars.mean,
        s.nvars.se,
        s.ndirs.mean,
        s.ndirs.se,
        s.tpr_mean,
        s.fpr_mean,
        s.n_repeats
    )
}

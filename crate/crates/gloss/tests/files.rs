use std::fs;
use std::path::Path;

use gloss::calibration;
use gloss::io::{load_csv, DataError, LabelColumn, Table};
use gloss::model::{fitted_lda, ModelError, ModelFile};
use gloss_core::eval::{simulate, Calibration, Scenario, SimulationSpec};
use gloss_core::glossfit::{fit, init_theta0, lambda_max};
use gloss_core::{FitConfig, GramMode, Matrix};

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn four_row_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.csv", "# comment\nx,y,class\n1,2,a\n2,1,a\n0,0,b\n5,1,b\n");
    let d = load_csv(&f, &LabelColumn::parse("class"), false).unwrap();
    assert!(d.header);
    let ds = &d.dataset;
    assert_eq!((ds.n_samples(), ds.n_features(), ds.n_classes()), (4, 2, 2));
    assert_eq!(ds.class_counts(), &[2, 2]);
    assert_eq!(ds.class_names(), &["a".to_string(), "b".to_string()]);
    assert_eq!(ds.feature_names().unwrap(), &["x".to_string(), "y".to_string()]);
}

#[test]
fn header_detection_and_label_by_index() {
    let dir = tempfile::tempdir().unwrap();
    // no header: every cell of the first row parses
    let f = write(dir.path(), "b.csv", "2,1.5,-3\n1,0.5,2e1\n2,7,0\n");
    let d = load_csv(&f, &LabelColumn::Index(0), false).unwrap();
    assert!(!d.header);
    assert_eq!(d.dataset.n_samples(), 3);
    assert_eq!(d.dataset.class_names(), &["2".to_string(), "1".to_string()]);
    assert_eq!(d.dataset.labels(), &[0, 1, 0]);
    assert_eq!(d.dataset.raw_features()[(1, 1)], 20.0);
    assert!(matches!(
        load_csv(&f, &LabelColumn::parse("label"), false),
        Err(DataError::LabelNotFound { .. })
    ));
}

#[test]
fn centered_file_is_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.csv", "1,-2,u\n-1,2,v\n3,0.5,u\n-3,-0.5,v\n");
    let d = load_csv(&f, &LabelColumn::Index(2), false).unwrap();
    assert_eq!(d.dataset.centering().mean, vec![0.0, 0.0]);
    assert_eq!(d.dataset.x(), &d.dataset.raw_features());
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let err = |text: &str, label: &str| {
        let f = write(dir.path(), "e.csv", text);
        load_csv(&f, &LabelColumn::parse(label), false).unwrap_err()
    };
    assert!(matches!(err("label\na\nb\n", "label"), DataError::NoFeatures { .. }));
    assert!(matches!(err("x,label\n1,a\n2,a\n", "label"), DataError::SingleClass { .. }));
    assert!(matches!(err("# nothing\n", "0"), DataError::Empty { .. }));
    assert!(matches!(err("x,label\n", "label"), DataError::Empty { .. }));
    assert!(matches!(err("x,y,label\n1,2,a\n3,b\n", "label"), DataError::Ragged { line: 3, .. }));
    assert!(matches!(err("x,label\n1,a\n2,\n", "label"), DataError::EmptyLabel { line: 3, .. }));
    assert!(matches!(err("x,y,label\n1,2,a\n3,nan,b\n", "label"), DataError::NonNumeric { .. }));
    match err("x,y,label\n1,2,a\n3,oops,b\n", "label") {
        DataError::NonNumeric { line, column, name, value, .. } => {
            assert_eq!((line, column, name.as_str(), value.as_str()), (3, 1, "y", "oops"));
        }
        e => panic!("{e}"),
    }
    assert!(matches!(err("x,label\n1,a\n2,b\n", "7"), DataError::LabelNotFound { .. }));
    let missing = dir.path().join("none.csv");
    assert!(matches!(
        load_csv(&missing, &LabelColumn::Index(0), false),
        Err(DataError::Open { .. })
    ));
    let f = write(dir.path(), "z.csv", "x,y,label\n1,5,a\n2,5,b\n");
    assert!(matches!(load_csv(&f, &LabelColumn::parse("label"), true), Err(DataError::Core { .. })));
}

#[test]
fn table_without_label() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.csv", "a,b\n1,2\n3,4\n");
    let t = Table::read(&f).unwrap();
    let feats = t.split(None).unwrap();
    assert!(feats.header && feats.labels.is_none());
    assert_eq!(feats.x, Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap());
    assert_eq!(feats.lines, vec![2, 3]);
}

fn sim_model(seed: u64, mode: GramMode, frac: f64) -> (gloss_core::LabeledDataset, gloss_core::OsFit) {
    let spec = SimulationSpec {
        p: 60,
        n_relevant: 12,
        ..SimulationSpec::new(Scenario::Sim1, seed)
    };
    let sim = simulate(&spec).unwrap();
    let config = FitConfig {
        gram_mode: mode,
        ..FitConfig::default()
    };
    let theta0 = init_theta0(sim.train.y()).unwrap();
    let lmax = lambda_max(&sim.train, &theta0, None).unwrap();
    let f = fit(&sim.train, frac * lmax, &theta0, &config).unwrap();
    (sim.train, f)
}

#[test]
fn model_save_load_is_value_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, mode) in [(1, GramMode::Standard), (2, GramMode::Diagonal)] {
        let (data, f) = sim_model(seed, mode, 0.4);
        let m = ModelFile::from_fit(&f, &data, Some("label".into()));
        let path = dir.path().join(format!("m{seed}.json"));
        m.save(&path).unwrap();
        let back = ModelFile::load(&path).unwrap();
        assert_eq!(back, m);
        for (a, b) in back.b_star.iter().flatten().zip(m.b_star.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.gram_mode().unwrap(), mode);

        let direct = fitted_lda(&f, &data).unwrap();
        let loaded = back.to_lda().unwrap();
        assert_eq!(loaded.directions, direct.directions);
        assert_eq!(loaded.centroids, direct.centroids);
        assert_eq!(loaded.log_priors, direct.log_priors);
        assert_eq!(loaded.active_set, direct.active_set);
    }
}

#[test]
fn corrupt_models_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (data, f) = sim_model(3, GramMode::Standard, 0.5);
    let m = ModelFile::from_fit(&f, &data, None);
    let mut wrong = m.clone();
    wrong.format = "gloss-model/0".into();
    let path = dir.path().join("w.json");
    wrong.save(&path).unwrap();
    assert!(matches!(ModelFile::load(&path), Err(ModelError::Format(_))));
    let mut short = m.clone();
    short.alpha.pop();
    assert!(matches!(short.to_lda(), Err(ModelError::Inconsistent(_))));
    let mut unsorted = m;
    unsorted.active_indices.reverse();
    if unsorted.active_indices.len() > 1 {
        assert!(unsorted.validate().is_err());
    }
    let junk = write(dir.path(), "j.json", "{not json");
    assert!(matches!(ModelFile::load(&junk), Err(ModelError::Json { .. })));
}

#[test]
fn shipped_calibration_matches_built_in_amplitudes() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/calibration.txt");
    let cal = calibration::load(&path).unwrap();
    assert_eq!(cal, Calibration::default());
    assert_eq!(calibration::parse(&calibration::render(&cal)).unwrap(), cal);
}

#[test]
fn calibration_parsing() {
    let cal = calibration::parse("sim1_shift = 1.5 # note\n\n# all else default\n").unwrap();
    assert_eq!(cal.sim1_shift, 1.5);
    assert_eq!(cal.sim3_shift, Calibration::default().sim3_shift);
    assert!(calibration::parse("sim5_shift = 1").is_err());
    assert!(calibration::parse("sim1_shift 1").is_err());
    assert!(calibration::parse("sim2_correlation = 1.0").is_err());
    assert!(calibration::parse("sim1_shift = abc").is_err());
}

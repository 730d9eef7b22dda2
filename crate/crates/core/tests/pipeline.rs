use std::io::Write;

use paratm::data::{apply_binarizer, fit_binarizer, load_csv, synth_staircase, LabelKind};
use paratm::fit::{fit_classifier, fit_regressor, FitOptions, Mode};
use paratm::model_io::{Model, ModelFile};
use paratm::{EvalMode, MultiClassTM, RegressionHead, TMConfig};

fn csv_file(rows: usize) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "when,temp,windy,label").unwrap();
    for i in 0..rows {
        let temp = (i * 7919 % 400) as f64 / 10.0;
        let windy = i % 3 == 0;
        let label = u8::from(temp > 20.0 && !windy);
        writeln!(
            f,
            "2024-01-{:02},{temp},{},{label}",
            i % 28 + 1,
            windy as u8
        )
        .unwrap();
    }
    f
}

#[test]
fn csv_to_saved_classifier_and_back() {
    let f = csv_file(600);
    let raw = load_csv(f.path(), Some("label"), &["when"]).unwrap();
    let (train_raw, test_raw) = raw.split(0.75, 3);
    let spec = fit_binarizer(&train_raw, 4).unwrap();
    let train = apply_binarizer(&spec, &train_raw, LabelKind::Class).unwrap();
    let test = apply_binarizer(&spec, &test_raw, LabelKind::Class).unwrap();
    assert_eq!(train.n_features(), 5);

    let config = TMConfig {
        clauses: 20,
        margin: 10,
        specificity: 3.0,
        seed: 5,
        ..TMConfig::default()
    };
    let mut tm = MultiClassTM::new(config, train.n_features(), 2).unwrap();
    let opts = FitOptions::new(Mode::Parallel { workers: 3 }, 30);
    let reports = fit_classifier(&mut tm, &train, Some(&test), &opts, |_| {}).unwrap();
    let acc = reports.last().unwrap().test_metric.unwrap();
    assert!(acc > 0.9, "{acc}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    ModelFile::with_binarizer(Model::Classifier(tm.clone()), Some(spec.clone()))
        .save(&path)
        .unwrap();
    let loaded = ModelFile::load(&path).unwrap();
    assert_eq!(loaded.binarizer.as_ref(), Some(&spec));
    let Model::Classifier(back) = loaded.model else {
        panic!("wrong task")
    };
    assert_eq!(back.predict(&test).unwrap(), tm.predict(&test).unwrap());
}

#[test]
fn parallel_regression_tallies_settle_after_delta_pass() {
    let data = synth_staircase(300, 5, 4).unwrap();
    let config = TMConfig {
        clauses: 9,
        margin: 10,
        specificity: 2.0,
        seed: 2,
        ..TMConfig::default()
    };
    let mut head = RegressionHead::new(config, 5, 0.0, 5.0).unwrap();
    let mut pool = head.pool(&data).unwrap();
    for e in 0..3 {
        head.train_epoch_parallel(&mut pool, 4, e).unwrap();
    }
    pool.delta_pass(std::slice::from_mut(head.bank_mut()))
        .unwrap();
    for i in 0..pool.len() {
        assert_eq!(
            pool.tally(i, 0),
            head.bank().vote_sum(pool.literals(i), EvalMode::Train)
        );
    }
    // a second pass over frozen clauses writes nothing
    assert_eq!(
        pool.delta_pass(std::slice::from_mut(head.bank_mut()))
            .unwrap(),
        0
    );
}

#[test]
fn regression_training_is_reproducible() {
    let data = synth_staircase(400, 6, 8).unwrap();
    let run = |mode| {
        let config = TMConfig {
            clauses: 6,
            margin: 6,
            specificity: 2.0,
            seed: 3,
            workers: 1,
            ..TMConfig::default()
        };
        let mut head = RegressionHead::new(config, 6, 0.0, 6.0).unwrap();
        fit_regressor(&mut head, &data, None, &FitOptions::new(mode, 5), |_| {}).unwrap();
        ModelFile::new(Model::Regressor(head)).to_json().unwrap()
    };
    for mode in [Mode::Sequential, Mode::Parallel { workers: 1 }] {
        assert_eq!(run(mode), run(mode));
    }
}

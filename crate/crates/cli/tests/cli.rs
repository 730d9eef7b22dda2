use std::path::Path;
use std::process::{Command, Output};

use paratm::bench::read_bench_csv;

fn paratm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paratm"))
        .args(args)
        .env_remove("TM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_xor_reaches_full_accuracy_and_eval_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = paratm(&[
        "train",
        "--task",
        "classify",
        "--clauses",
        "10",
        "--margin",
        "5",
        "--specificity",
        "3",
        "--epochs",
        "50",
        "--seed",
        "1",
        "--synth",
        "xor",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("final train accuracy 1.0000"),
        "{}",
        stdout(&o)
    );
    let reports = std::fs::read_to_string(out.join("epochs.jsonl")).unwrap();
    assert_eq!(reports.lines().count(), 50);

    let model = out.join("model.json");
    let e = paratm(&["eval", "--model", path(&model), "--synth", "xor"]);
    assert!(e.status.success(), "{}", stderr(&e));
    assert!(stdout(&e).contains("accuracy 1.0000"));
    assert!(stdout(&e).contains("macro_f1 1.0000"));
}

#[test]
fn bench_emits_one_row_per_clause_count() {
    let o = paratm(&[
        "bench",
        "--clauses",
        "20,80,320,1280",
        "--mode",
        "par",
        "--epochs",
        "3",
        "--synth",
        "xor",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let records = read_bench_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(
        records.iter().map(|r| r.clauses).collect::<Vec<_>>(),
        vec![20, 80, 320, 1280]
    );
    assert!(records
        .iter()
        .all(|r| r.mode == "parallel" && r.seconds > 0.0));
}

#[test]
fn tm_threads_overrides_workers_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_paratm"))
        .args([
            "bench",
            "--clauses",
            "8",
            "--mode",
            "par",
            "--workers",
            "2",
            "--epochs",
            "3",
            "--synth",
            "xor",
        ])
        .env("TM_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let records = read_bench_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(records[0].workers, 3);
}

#[test]
fn missing_dataset_exits_2_naming_the_path() {
    let o = paratm(&["train", "--data", "/definitely/not/here.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.txt"));
    let e = paratm(&["eval", "--model", "/no/model.json", "--synth", "xor"]);
    assert_eq!(e.status.code(), Some(2));
    assert!(stderr(&e).contains("/no/model.json"));
}

#[test]
fn invalid_hyperparameters_fail_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    for bad in [
        ["--clauses", "7"],
        ["--specificity", "0.5"],
        ["--margin", "0"],
    ] {
        let mut args = vec!["train", "--synth", "xor", "--out", path(&out)];
        args.extend(bad);
        let o = paratm(&args);
        assert!(!o.status.success());
        assert!(
            stderr(&o).contains("invalid configuration"),
            "{}",
            stderr(&o)
        );
        assert!(!out.exists());
    }
}

#[test]
fn unknown_flag_is_rejected() {
    let o = paratm(&["train", "--synth", "xor", "--frobnicate"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--frobnicate"));
}

#[test]
fn synth_file_trains_and_models_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("xor.txt");
    let s = paratm(&[
        "synth",
        "xor",
        "--rows",
        "400",
        "--noise",
        "0.05",
        "--seed",
        "4",
        "--out",
        path(&data),
    ]);
    assert!(s.status.success(), "{}", stderr(&s));
    for mode in ["seq", "par"] {
        let run = |name: &str| {
            let out = dir.path().join(format!("{mode}-{name}"));
            let o = paratm(&[
                "train",
                "--data",
                path(&data),
                "--clauses",
                "10",
                "--margin",
                "5",
                "--epochs",
                "5",
                "--seed",
                "9",
                "--mode",
                mode,
                "--workers",
                "1",
                "--out",
                path(&out),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            std::fs::read(out.join("model.json")).unwrap()
        };
        assert_eq!(run("a"), run("b"), "{mode} model files differ");
    }
}

#[test]
fn csv_input_is_binarized_and_binarizer_stored_with_model() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("data.csv");
    let mut text = String::from("id,a,b,flag,y\n");
    for i in 0..200 {
        let a = (i * 37 % 100) as f64 / 10.0;
        let b = (i * 53 % 100) as f64;
        let flag = i % 2;
        let y = if a > 5.0 { 1 } else { 0 };
        text.push_str(&format!("{i},{a},{b},{flag},{y}\n"));
    }
    std::fs::write(&csv, text).unwrap();
    let out = dir.path().join("run");
    let o = paratm(&[
        "train",
        "--data",
        path(&csv),
        "--drop",
        "id",
        "--label",
        "y",
        "--binarize-bits",
        "4",
        "--holdout",
        "0.25",
        "--clauses",
        "20",
        "--margin",
        "10",
        "--epochs",
        "20",
        "--seed",
        "2",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let model = std::fs::read_to_string(out.join("model.json")).unwrap();
    assert!(model.contains("\"binarizer\""));
    let e = paratm(&[
        "eval",
        "--model",
        path(&out.join("model.json")),
        "--data",
        path(&csv),
        "--drop",
        "id",
        "--label",
        "y",
    ]);
    assert!(e.status.success(), "{}", stderr(&e));
    let acc: f64 = stdout(&e)
        .lines()
        .find_map(|l| l.strip_prefix("accuracy "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(acc > 0.9, "{acc}");
}

#[test]
fn regression_task_reports_mae() {
    let o = paratm(&[
        "train",
        "--task",
        "regress",
        "--synth",
        "staircase",
        "--synth-rows",
        "500",
        "--clauses",
        "6",
        "--margin",
        "6",
        "--specificity",
        "2",
        "--epochs",
        "30",
        "--seed",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("final test mae"));
}

mod common;

use std::fs;
use std::process::{Command, Output};

fn unselect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unselect"))
        .args(args)
        .env(unselect::dataset::DATA_DIR_ENV, common::data_dir())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn diabetes_path() -> String {
    common::data_dir()
        .join("diabetes.arff")
        .to_string_lossy()
        .into_owned()
}

#[test]
fn select_usqr_prints_subset_and_fingerprint() {
    let o = unselect(&[
        "select",
        "--data",
        &diabetes_path(),
        "--label",
        "class",
        "--method",
        "usqr",
        "--bins",
        "3",
        "--strategy",
        "eqfreq",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("subset ")).count(), 1);
    assert!(out
        .lines()
        .any(|l| l.starts_with("config ") && l.len() == "config ".len() + 16));
}

#[test]
fn select_edr_by_registry_name() {
    let o = unselect(&[
        "select", "--data", "diabetes", "--method", "edr", "--k", "4", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["subset"], serde_json::json!([3, 4, 6, 2]));
}

#[test]
fn unknown_method_is_a_config_error() {
    let o = unselect(&["select", "--data", "diabetes", "--method", "lda"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pca, roughpca, edr, usqr"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn ranking_methods_require_k() {
    let o = unselect(&[
        "select",
        "--data",
        &diabetes_path(),
        "--label",
        "class",
        "--method",
        "pca",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreadable_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b\n1,2\n3,4,5\n").unwrap();
    let o = unselect(&[
        "select",
        "--data",
        bad.to_str().unwrap(),
        "--method",
        "usqr",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
    let o = unselect(&["select", "--data", "no-such-dataset", "--method", "usqr"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_is_table_shaped_and_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        let o = unselect(&[
            "bench",
            "--datasets",
            "diabetes",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("CLASSIFICATION ACCURACY FOR DIABETES"));
    assert!(text.contains("Naive Bayes"));
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(
        fs::read(a.with_extension("json")).unwrap(),
        fs::read(b.with_extension("json")).unwrap()
    );

    let o = unselect(&[
        "report",
        "--input",
        a.with_extension("json").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), text);
}

#[test]
fn bench_with_missing_dataset_exits_4() {
    let o = unselect(&["bench", "--datasets", "nonexistent", "--format", "json"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["errors"][0]["dataset"], "nonexistent");
}

#[test]
fn evaluate_a_fixed_subset() {
    let o = unselect(&[
        "evaluate",
        "--data",
        "heart",
        "--subset",
        "2,8,11,1",
        "--classifiers",
        "nb",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.starts_with("dataset,classifier,edr\nheart,nb,"),
        "{out}"
    );
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "method = \"edr\"\nk = 2\n").unwrap();
    let o = unselect(&[
        "select",
        "--data",
        "diabetes",
        "--config",
        cfg.to_str().unwrap(),
        "--k",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("subset 3,4,6,2\n"));
}

#[test]
fn help_lists_defaults() {
    for cmd in ["select", "evaluate", "bench"] {
        let o = unselect(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let h = stdout(&o);
        for flag in ["--bins", "--strategy", "--pc-policy", "--format"] {
            let line = h
                .lines()
                .skip_while(|l| !l.contains(flag))
                .take(3)
                .collect::<String>();
            assert!(line.contains("[default:"), "{cmd} {flag}: {line}");
        }
    }
    let o = unselect(&["bench", "--help"]);
    for flag in [
        "--datasets",
        "--classifiers",
        "--folds",
        "--seed",
        "--global-prep",
        "--out",
        "--k",
    ] {
        assert!(stdout(&o).contains(flag), "{flag}");
    }
}

#[test]
fn dump_model_writes_loadings() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let o = unselect(&[
        "select",
        "--data",
        "ecoli",
        "--method",
        "roughpca",
        "--dump-model",
        model.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(v["loadings"].as_array().unwrap().len(), 7);
}

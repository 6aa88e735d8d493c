use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn polymer(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polymer"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("POLYMER_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn list(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polymer")).arg("list").args(args).output().expect("binary runs")
}

fn only_file(dir: &Path) -> PathBuf {
    let files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1, "{files:?}");
    files[0].clone()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn constant_disorder_gives_twelve() {
    let d = tempfile::tempdir().unwrap();
    let o = polymer(&["simulate", "--model", "r01", "--N", "3", "--M", "3", "--seed", "1", "--degenerate-x", "2.0"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&only_file(d.path()));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["summary"]["z_corner"], 12.0);
}

#[test]
fn identity_case_passes_at_machine_precision() {
    let d = tempfile::tempdir().unwrap();
    let o = polymer(&["identity", "--case", "p31a", "--n", "10000"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&only_file(d.path()));
    assert_eq!(doc["verdict"], "pass");
    for c in doc["entries"][0]["report"]["components"].as_array().unwrap() {
        assert!(c["statistic"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn unknown_key_exits_two_with_suggestions() {
    let d = tempfile::tempdir().unwrap();
    let o = polymer(&["db", "--case", "t42-x"], d.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("did you mean") && err.contains("t42-a"), "{err}");
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 0);
}

#[test]
fn validation_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["db", "--case", "t42-a", "--model", "r01"][..],
        &["limit", "--case", "ztl-R01", "--schedule", "0.1,0.01"],
        &["db", "--case", "t42-a", "--n", "10"],
        &["simulate", "--model", "rm11", "--temperature", "zero"],
        &["simulate", "--model", "r02"],
        &["zlimit", "--case", "ptptrem-a", "--n", "5"],
    ] {
        let o = polymer(args, d.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_polymer")).args(["db", "--format", "xml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_test_exits_one_and_names_the_report() {
    let d = tempfile::tempdir().unwrap();
    // Distances grow along a reversed schedule.
    let o = polymer(&["zlimit", "--case", "ptptrem-a", "--schedule", "0.001,0.01,0.1", "--n", "5000"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let path = only_file(d.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains(&*path.to_string_lossy()));
    assert_eq!(read_json(&path)["verdict"], "fail");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for args in [
        &["db", "--case", "t42-a", "--n", "20000", "--seed", "7"][..],
        &["burke", "--case", "t45-d-disc", "--N", "80", "--M", "80", "--n", "500"],
        &["zlimit", "--case", "ptptrem-c", "--n", "500"],
        &["simulate", "--case", "t42-a", "--N", "20", "--M", "20", "--format", "csv"],
    ] {
        assert_eq!(polymer(args, a.path()).status.code(), Some(0), "{args:?}");
        assert_eq!(polymer(args, b.path()).status.code(), Some(0), "{args:?}");
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn config_file_and_flags_agree() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = configs().join("db-t42-a.json");
    let o = polymer(&["run", cfg.to_str().unwrap(), "--n", "20000"], a.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = polymer(&["db", "--case", "t42-a", "--seed", "7", "--n", "20000"], b.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(only_file(a.path())).unwrap(), std::fs::read(only_file(b.path())).unwrap());
}

#[test]
fn config_for_another_subcommand_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("db-t42-a.json");
    let o = polymer(&["stationary", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_checked_in_config_is_valid() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let doc = read_json(&p);
        let sub = doc["subcommand"].as_str().unwrap().to_string();
        let d = tempfile::tempdir().unwrap();
        // Shrink the expensive parts; validation still covers every field.
        let mut args = vec!["run".to_string(), p.to_string_lossy().into_owned()];
        match sub.as_str() {
            "db" | "stationary" | "dist-limit" => args.extend(["--n".into(), "20000".into(), "--seeds".into(), "1".into()]),
            "burke" => args.extend(["--N".into(), "80".into(), "--M".into(), "80".into(), "--n".into(), "1000".into()]),
            "zlimit" => args.extend(["--n".into(), "200".into()]),
            _ => {}
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = polymer(&refs, d.path());
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{}: {}", p.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn env_var_sets_the_default_directory() {
    let (env_dir, flag_dir) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_polymer"))
            .args(["identity", "--case", "p31b", "--n", "1000"])
            .args(extra)
            .env("POLYMER_OUT_DIR", env_dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run(&[]).status.code(), Some(0));
    only_file(env_dir.path());
    assert_eq!(run(&["--out", flag_dir.path().to_str().unwrap()]).status.code(), Some(0));
    only_file(flag_dir.path());
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);
}

#[test]
fn csv_reports_use_seventeen_significant_digits() {
    let d = tempfile::tempdir().unwrap();
    let o = polymer(&["db", "--case", "gb-a", "--n", "20000", "--format", "csv"], d.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(only_file(d.path())).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("case,seed,kind,component,statistic"));
    let stat = lines.next().unwrap().split(',').nth(4).unwrap().to_string();
    let mantissa = stat.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{stat}");
}

#[test]
fn list_covers_the_acceptance_keys() {
    let o = list(&["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&str> = doc["keys"].as_array().unwrap().iter().map(|k| k["key"].as_str().unwrap()).collect();
    for k in ["p31a", "c54b", "ztl-R01", "gb-a", "t42-d", "t45-d-cont", "t45-d-disc", "ppp2-c", "ptptrem-a", "ztrem-a", "t42-a-misscaled"] {
        assert!(keys.contains(&k), "{k}");
    }
    let text = String::from_utf8(list(&[]).stdout).unwrap();
    assert!(text.lines().count() == keys.len());
}

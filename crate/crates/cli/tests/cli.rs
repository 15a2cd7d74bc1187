use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn housing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_housing"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixtures() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    let out = housing(&["fixtures", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    (dir, path)
}

fn file(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn run_static_sd_delta_on_fig1() {
    let (_keep, dir) = fixtures();
    let out = housing(&["run", "--mechanism", "static-sd", "--ordering", "delta", "--instance", &file(&dir, "fig1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1:e3 2:e1 3:e2\n");
}

#[test]
fn run_ttc_gamma_and_zeta_agree_on_fig5() {
    let (_keep, dir) = fixtures();
    let fig5 = file(&dir, "fig5.json");
    let gamma = housing(&["run", "--mechanism", "online-ttc", "--partition", "gamma", "--instance", &fig5]);
    let zeta = housing(&["run", "--mechanism", "online-ttc", "--partition", "zeta", "--tau", "0", "--instance", &fig5]);
    assert_eq!(stdout(&gamma), "1:e1 2:e3 3:e2 4:e4 5:e5\n");
    assert_eq!(stdout(&gamma), stdout(&zeta));
    let tau = housing(&["run", "--mechanism", "online-ttc", "--partition", "zeta", "--tau", "11/2", "--instance", &fig5]);
    assert_eq!(stdout(&tau), "1:e1 2:e2 3:e4 4:e3 5:e5\n");
}

#[test]
fn trace_in_both_formats() {
    let (_keep, dir) = fixtures();
    let args = ["run", "--mechanism", "online-ttc", "--partition", "theta", "--scheduling"];
    let sched = file(&dir, "fig5_scheduling.json");
    let fig5 = file(&dir, "fig5.json");
    let text = housing(&[&args[..], &[sched.as_str(), "--instance", &fig5, "--trace"]].concat());
    let text = stdout(&text);
    assert!(text.starts_with("1:e1 2:e2 3:e4 4:e3 5:e5\n"), "{text}");
    assert!(text.contains("t=7 dep=3 block={3,4} assign=[(3,e4),(4,e3)]"), "{text}");

    let json = housing(&[&args[..], &[sched.as_str(), "--instance", &fig5, "--trace", "--format", "json"]].concat());
    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["mechanism"], "online-ttc+theta");
    assert_eq!(doc["allocation"]["4"], "e3");
    assert_eq!(doc["trace"]["phases"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_exit_codes() {
    let (_keep, dir) = fixtures();
    let ok = housing(&[
        "verify", "--mechanism", "safe-sd", "--ordering", "delta", "--property", "ir,spo", "--instance",
        &file(&dir, "fig3.json"),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "IR: holds\ns-PO: holds\n");

    let bad = housing(&[
        "verify", "--mechanism", "static-sd", "--ordering", "delta", "--property", "a-ic", "--instance",
        &file(&dir, "ce_aic_sd.json"), "--format", "json",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(
        stdout(&bad).trim(),
        r#"{"property":"a-IC","verdict":"violated","witness":{"agent":1,"reported_arrival":"7/2","truthful_item":"e2","improved_item":"e3"}}"#
    );
}

#[test]
fn caps_and_sampling() {
    let (_keep, dir) = fixtures();
    let fig5 = file(&dir, "fig5.json");
    let base = ["verify", "--mechanism", "online-ttc", "--partition", "zeta", "--tau", "0", "--property", "sic", "--instance"];
    let capped = housing(&[&base[..], &[fig5.as_str()]].concat());
    assert_eq!(capped.status.code(), Some(1));
    assert!(stdout(&capped).starts_with("SIC: too-large"), "{}", stdout(&capped));

    let sampled = housing(&[&base[..], &[fig5.as_str(), "--sample", "50"]].concat());
    assert_eq!(sampled.status.code(), Some(0));
    assert_eq!(stdout(&sampled), "SIC: holds (sampled)\n");
}

#[test]
fn verify_small_sweep() {
    let out = housing(&[
        "verify", "--mechanism", "online-ttc", "--partition", "zeta", "--tau", "0", "--property", "sic", "--sweep", "n=2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 24);
    assert!(text.lines().all(|l| l.ends_with("SIC: holds")), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    let (_keep, dir) = fixtures();
    let fig1 = file(&dir, "fig1.json");
    for args in [
        vec!["run", "--mechanism", "static-sd", "--instance", fig1.as_str()],
        vec!["run", "--mechanism", "static-sd", "--ordering", "delta", "--partition", "gamma", "--instance", &fig1],
        vec!["run", "--mechanism", "online-ttc", "--partition", "theta", "--instance", &fig1],
        vec!["run", "--mechanism", "online-ttc", "--partition", "zeta", "--instance", &fig1],
        vec!["run", "--mechanism", "online-ttc", "--partition", "gamma", "--ordering", "alpha", "--instance", &fig1],
        vec!["run", "--mechanism", "bogus", "--instance", &fig1],
        vec!["run", "--mechanism", "static-sd", "--ordering", "delta", "--instance", "/nonexistent.json"],
        vec!["verify", "--mechanism", "static-sd", "--ordering", "delta", "--property", "xyz", "--instance", &fig1],
        vec!["verify", "--mechanism", "static-sd", "--ordering", "delta", "--property", "ir", "--sweep", "n=9"],
        vec!["gen", "--agents", "0"],
    ] {
        let out = housing(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {out:?}");
    }
}

#[test]
fn malformed_instance_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    std::fs::write(
        &path,
        r#"{"marketOpen":"0","marketClose":"9","agents":[
        {"id":1,"endowment":"e1","arrival":"1","departure":"4","preferences":["e1","e2"]},
        {"id":2,"endowment":"e2","arrival":"1","departure":"5","preferences":["e1","e2"]}]}"#,
    )
    .unwrap();
    let out = housing(&["run", "--mechanism", "static-sd", "--ordering", "delta", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dup.json"));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let a = housing(&["gen", "--agents", "5", "--seed", "42"]);
    let b = housing(&["gen", "--agents", "5", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let sparse = housing(&["gen", "--agents", "5", "--seed", "42", "--profile", "sparse"]);
    assert_ne!(a.stdout, sparse.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = housing(&["gen", "--agents", "4", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let run = housing(&["run", "--mechanism", "dynamic-sd", "--ordering", "alpha", "--instance", path.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(stdout(&run).split_whitespace().count(), 4);
}

#[test]
fn fixtures_match_shipped_copies() {
    let (_keep, dir) = fixtures();
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let entry = entry.unwrap();
        let fresh = std::fs::read_to_string(entry.path()).unwrap();
        let old = std::fs::read_to_string(shipped.join(entry.file_name())).unwrap();
        assert_eq!(fresh, old, "{:?}", entry.file_name());
    }
}

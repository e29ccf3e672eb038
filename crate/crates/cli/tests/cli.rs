use std::path::Path;
use std::process::{Command, Output};

fn gapscale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapscale"))
        .args(args)
        .env("GAPSCALE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(at).unwrap().to_string()).collect()
}

#[test]
fn diffid_suite_passes() {
    let out = gapscale(&["verify", "diffid"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(column(&text, "pass").iter().all(|p| p == "true"));
}

#[test]
fn transition_preset() {
    let out = gapscale(&[
        "asym",
        "transition",
        "--s",
        "8",
        "--alpha",
        "-1",
        "--beta",
        "1",
        "--nu",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(column(&text, "k"), vec!["1"]);
    let x: f64 = column(&text, "x")[0].parse().unwrap();
    assert!((x + 0.0354).abs() < 1e-4);
}

#[test]
fn one_gap_residual_decreases_along_sweep() {
    let out = gapscale(&["sweep", "verify-one-gap", "--axis", "s", "--values", "4,8,12"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Vec<f64> = column(&stdout(&out), "residual")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(r.len(), 3);
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn sweep_output_is_bit_identical_across_runs_and_thread_counts() {
    let args = ["sweep", "fredholm", "--axis", "s", "--values", "1,2,3,4,5,6"];
    let a = gapscale(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_gapscale"))
        .args(args)
        .env("GAPSCALE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = column(&stdout(&a), "s");
    assert_eq!(s[0], "1.0000000000000000e0");
    assert_eq!(s[5], "6.0000000000000000e0");
}

#[test]
fn empty_sweep_writes_header_only() {
    let out = gapscale(&["sweep", "fredholm", "--axis", "s", "--values", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "s,alpha,beta,nu,nodes,log_p,p\n");
}

#[test]
fn config_with_flag_override_and_dictionary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    let out_path = dir.path().join("result.csv");
    std::fs::write(
        &cfg,
        format!(
            "kind = \"fredholm\"\n[parameters]\ns = 2.0\nnu = 0.0\n[output]\npath = {:?}\nformat = \"csv\"\n\
             [sweep]\naxis = \"s\"\nvalues = [1.0, 2.0]\n",
            out_path.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = gapscale(&["fredholm", "--config", cfg.to_str().unwrap(), "--s", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(column(&text, "s"), vec!["3.0000000000000000e0"]);
    assert_eq!(column(&text, "nu"), vec!["0.0000000000000000e0"]);
    assert!(!text.contains('\r'));

    let dict = std::fs::read_to_string(dir.path().join("result.dictionary.csv")).unwrap();
    assert!(dict.starts_with("column,description\n"));
    assert_eq!(dict.lines().count(), 1 + 7);

    // the sweep picks up kind, axis and values from the file
    let out = gapscale(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert!(Path::new(&dir.path().join("result.dictionary.csv")).exists());
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[parameters]\nsigma = 1.0\n").unwrap();
    assert_eq!(
        gapscale(&["fredholm", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(gapscale(&["asym", "three-gap"]).status.code(), Some(1));
    assert_eq!(gapscale(&["fredholm", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        gapscale(&["fredholm", "--alpha", "2", "--beta", "1"]).status.code(),
        Some(1)
    );
}

#[test]
fn breach_exits_with_two() {
    // far outside the asymptotic regime the one-gap formula misses by more than the limit
    let out = gapscale(&["verify", "one-gap", "--s", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(column(&stdout(&out), "pass"), vec!["false"]);
}

use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mubwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubwit")).args(args).env_remove("EW_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Rows of the CSV block whose header line is `header`.
fn block(text: &str, header: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines().skip_while(|l| *l != header);
    assert_eq!(lines.next(), Some(header), "header {header} missing");
    lines
        .take_while(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn ppt_uniform_state() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "u.csv", &vec!["0.0625"; 16].join(","));
    let o = mubwit(&["ppt", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["is_ppt"], true);
    assert_eq!(v["min_eigenvalue"], 0.0625);
    assert_eq!(v["violated"].as_array().unwrap().len(), 0);
}

#[test]
fn ppt_ghz_state() {
    let dir = TempDir::new().unwrap();
    let mut p = vec!["0"; 16];
    p[0] = "1";
    let f = write(&dir, "ghz.json", &format!("[{}]", p.join(", ")));
    let o = mubwit(&["ppt", &f]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["min_eigenvalue"], -0.5);

    let o = mubwit(&["ppt", &f, "--format", "csv"]);
    assert_eq!(stdout(&o), "is_ppt,min_eigenvalue,worst_bipartition,violated\nfalse,-0.5,A,7\n");
}

#[test]
fn ppt_input_errors() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "short.csv", &vec!["0.0625"; 15].join(","));
    let o = mubwit(&["ppt", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("found 15"));

    let f = write(&dir, "bad.json", "[0.5,\n0.5,]");
    let o = mubwit(&["ppt", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = mubwit(&["ppt", "/nonexistent/probs.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn envelope_default_grid() {
    let o = mubwit(&["envelope"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = block(&text, "p1,p2_lower,p2_upper,trace_on_curve");
    assert_eq!(rows.len(), 400);
    for r in &rows {
        assert!(num(&r[3]).abs() <= 1e-9);
    }
    let last = rows.last().unwrap();
    assert!((num(&last[0]) - 7.0 / 9.0).abs() < 1e-12);
    assert!((num(&last[1]) - 2.0 / 9.0).abs() < 1e-12);
    assert!(last[2].is_empty());

    let lines = block(&text, "psi2,p1,p2");
    let mut angles: Vec<f64> = lines.iter().map(|r| num(&r[0])).collect();
    angles.dedup();
    assert_eq!(angles.len(), 50);
    for w in angles.windows(2) {
        assert!((w[1] - w[0] - std::f64::consts::PI / 50.0).abs() < 1e-10);
    }
}

#[test]
fn envelope_range_errors() {
    let o = mubwit(&["envelope", "--p1-min", "0.01", "--p1-max", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside both envelope branch intervals"));
    let o = mubwit(&["envelope", "--a0", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thermal_table_values() {
    let o = mubwit(&["thermal", "--j", "-1", "--j", "-50", "--steps", "11", "--t-max", "50", "--with-limit"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let summary = block(&text, "J,T_th");
    assert_eq!(summary.len(), 3);
    assert!((num(&summary[0][1]) - 2.6135).abs() < 1e-3);
    assert!((num(&summary[1][1]) - 7.8305).abs() < 5e-3);
    assert_eq!(summary[2][0], "-inf");
    assert!((num(&summary[2][1]) - 7.8305).abs() < 5e-3);

    let rows = block(&text, "T,trace,fidelity,detected_by_witness,detected_by_fidelity");
    assert_eq!(rows.len(), 11);
    let hot = rows.last().unwrap();
    assert_eq!(num(&hot[0]), 50.0);
    assert!((num(&hot[1]) - 1.0).abs() < 0.1);
    assert_eq!(hot[3], "false");
}

#[test]
fn thermal_without_threshold() {
    let o = mubwit(&["thermal", "--j", "-40", "--h", "40", "--steps", "2"]);
    let summary = block(&stdout(&o), "J,T_th");
    assert_eq!(summary[0], vec!["-40", "none"]);
}

#[test]
fn thermal_rejects_nonpositive_temperatures() {
    let o = mubwit(&["thermal", "--t-min", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mubwit(&["fidelity", "--t-min", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fidelity_sweeps() {
    let o = mubwit(&["fidelity", "--j", "-1", "--t-min", "1000000", "--t-max", "1000000", "--steps", "1"]);
    let rows = block(&stdout(&o), "T,F,detects");
    assert!((num(&rows[0][1]) - 1.0 / 16.0).abs() < 1e-5);

    let o = mubwit(&["fidelity", "--j", "-3"]);
    let rows = block(&stdout(&o), "T,F,detects");
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r[2] == "false"));
}

#[test]
fn hamiltonian_files() {
    let dir = TempDir::new().unwrap();
    let text = "# J = -1, h = 1\n1 ZZII\n1 IZZI\n1 IIZZ\n1 ZIIZ\n1 ZIZI\n1 IZIZ\n1 XXXX\n1 YYYY\n1 ZZZZ\n";
    let o = mubwit(&["hamiltonian", &write(&dir, "h.txt", text)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# bell_diagonal: true"));
    let rows = block(&out, "index,energy");
    let e: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert_eq!(e, vec![9.0, 5.0, -1.0, -1.0, -1.0, -1.0, 1.0, -3.0, -1.0, -1.0, 1.0, -3.0, 1.0, -3.0, -1.0, -1.0]);

    let o = mubwit(&["hamiltonian", &write(&dir, "x.txt", "1.0 XIII\n")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("bell_diagonal: false"));

    let o = mubwit(&["hamiltonian", &write(&dir, "empty.txt", ""), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["energies"].as_array().unwrap().iter().all(|x| x.as_f64() == Some(0.0)));

    let o = mubwit(&["hamiltonian", &write(&dir, "bad.txt", "1 ZZII\n1 ZZIQ\n")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn family_verify_is_reproducible() {
    let args = ["family-verify", "--reading", "literal", "--draws", "1", "--starts", "2", "--seed", "5"];
    let a = mubwit(&args);
    assert_eq!(a.status.code(), Some(0));
    let rows = block(&stdout(&a), "id,min_trace,p,psi1,psi2,positive");
    assert_eq!(rows.len(), 320);
    assert!(rows.iter().all(|r| r[5] == "true"));
    let b = mubwit(&args);
    assert_eq!(a.stdout, b.stdout);

    let with_env = Command::new(env!("CARGO_BIN_EXE_mubwit"))
        .args(&args[..args.len() - 2])
        .env("EW_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, a.stdout);
}

#[test]
fn config_file_and_output_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", "format = \"json\"\n[fidelity]\nj = [-2.0]\nsteps = 3\n");
    let out = dir.path().join("out.json");
    let o = mubwit(&["fidelity", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["sweeps"][0]["J"], -2.0);
    assert_eq!(v["sweeps"][0]["rows"].as_array().unwrap().len(), 3);

    let bad = write(&dir, "bad.toml", "[fidelity]\nsteps = 3\ncolour = 1\n");
    let o = mubwit(&["fidelity", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mubwit(&[]).status.code(), Some(2));
    assert_eq!(mubwit(&["no-such-command"]).status.code(), Some(2));
    let help = mubwit(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("Exit codes"));
}

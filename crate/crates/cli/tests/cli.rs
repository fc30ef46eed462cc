use std::process::{Command, Output};

fn collisim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collisim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_preset() {
    let o = collisim(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["w-chain", "gibbs-chain", "ghz-qutrit", "ghz-controlled", "aklt-projective", "aklt-heisenberg"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn run_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = collisim(&["run", "--scenario", "aklt-projective", "--steps", "20", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,t,sx,sy,sz");
    assert_eq!(lines.len(), 22);
}

#[test]
fn partial_inversion_and_frozen_state() {
    use std::f64::consts::PI;
    let rows = |gt: f64| -> Vec<Vec<f64>> {
        let o = collisim(&["run", "-s", "aklt-heisenberg", "--gtau", &gt.to_string(), "--steps", "4"]);
        assert!(o.status.success());
        stdout(&o).lines().skip(1).map(|l| l.split(',').skip(2).map(|x| x.parse().unwrap()).collect()).collect()
    };
    let inv = rows(2.0 * PI / 3.0);
    for k in 1..inv.len() {
        for j in 0..3 {
            assert!((inv[k][j] - (-5.0 / 27.0) * inv[k - 1][j]).abs() < 1e-12);
        }
    }
    let frozen = rows(4.0 * PI / 3.0);
    for r in &frozen {
        for j in 0..3 {
            assert!((r[j] - frozen[0][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn export_then_run_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ghz.toml");
    assert!(collisim(&["export", "ghz-qutrit", "--out", file.to_str().unwrap()]).status.success());
    let from_file = collisim(&["run", "-s", file.to_str().unwrap(), "--steps", "6"]);
    let from_preset = collisim(&["run", "-s", "ghz-qutrit", "--steps", "6"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_preset));
}

#[test]
fn spectrum_of_aklt() {
    let o = collisim(&["spectrum", "-s", "aklt-heisenberg"]);
    assert!(o.status.success());
    let vals: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 4);
    assert!((vals[0] - 1.0).abs() < 1e-10);
    assert!(vals[1..].iter().all(|v| (v + 1.0 / 3.0).abs() < 1e-10));
}

#[test]
fn strobo_rates_and_infinite_correlation_error() {
    let o = collisim(&["strobo", "-s", "aklt-projective"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("rate 3.33333333333333"));
    assert!(text.contains("rate -3.33333333333333"));

    let o = collisim(&["strobo", "-s", "ghz-qutrit"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infinite correlation length"));
}

#[test]
fn kernel_table() {
    let o = collisim(&["kernel", "-s", "ghz-controlled", "--k", "3", "--m", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# "));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(collisim(&["run", "-s", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(collisim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(collisim(&["validate", "nonsense"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\nsystem_dim = [\n").unwrap();
    let o = collisim(&["run", "-s", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn bad_trace_names_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.toml");
    let text = r#"
name = "short-trace"
system_dim = 2
ancilla_dim = 2
g_tau = 0.3
steps = 2

[interaction]
type = "hamiltonian"
generator = "energy-exchange"

[environment]
type = "factorized"
state = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]

[initial_state]
matrix = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]]
"#;
    std::fs::write(&file, text).unwrap();
    let o = collisim(&["run", "-s", file.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("tol_trace"), "{err}");

    // A loose global tolerance admits it.
    let o = Command::new(env!("CARGO_BIN_EXE_collisim"))
        .args(["run", "-s", file.to_str().unwrap()])
        .env("COLLISIM_TOL", "0.2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_group_passes() {
    let o = collisim(&["validate", "example3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS\t")));
}

use std::path::Path;
use std::process::{Command, Output};

fn lapsmooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapsmooth"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn cells(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn beta_table_defaults_and_edges() {
    let t = stdout(&lapsmooth(&["beta-table"]));
    assert!(t.starts_with("m,sigma=1,sigma=2,sigma=3,sigma=4,sigma=5\n1000,"));
    let rows = cells(&t);
    assert_eq!(rows.len(), 3);
    assert!((rows[0][0] - 0.447).abs() < 5e-4);
    assert!((rows[2][4] - 0.218).abs() < 5e-4);

    let zero = cells(&stdout(&lapsmooth(&["beta-table", "--sigmas", "0"])));
    assert!(zero.iter().all(|r| r == &vec![1.0]));
    let two = cells(&stdout(&lapsmooth(&[
        "beta-table",
        "--sigmas",
        "1",
        "--ms",
        "2",
    ])));
    assert!((two[0][0] - 0.6).abs() < 1e-12);
}

#[test]
fn var_bound_table_values() {
    let rows = cells(&stdout(&lapsmooth(&["var-bound-table"])));
    assert!((rows[0][0] - 0.268).abs() < 1e-3);
    assert!((rows[2][4] - 0.218).abs() < 1e-3);
}

#[test]
fn smooth_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.csv");
    std::fs::write(&input, "1\n0\n0\n0\n").unwrap();
    let out = lapsmooth(&["smooth", "--input", input.to_str().unwrap(), "--sigma", "1"]);
    let values: Vec<f64> = stdout(&out).lines().map(|l| l.parse().unwrap()).collect();
    let expect = [7.0 / 15.0, 0.2, 2.0 / 15.0, 0.2];
    assert!(values
        .iter()
        .zip(expect)
        .all(|(a, b)| (a - b).abs() < 1e-15));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum in 1"));

    std::fs::write(&input, "0.25\n-3\n7.5\n").unwrap();
    let same = stdout(&lapsmooth(&[
        "smooth",
        "--input",
        input.to_str().unwrap(),
        "--sigma",
        "0",
    ]));
    assert_eq!(same, "0.25\n-3\n7.5\n");

    std::fs::write(&input, "1\nnope\n").unwrap();
    let err = error_json(&lapsmooth(&[
        "smooth",
        "--input",
        input.to_str().unwrap(),
        "--sigma",
        "1",
    ]));
    assert_eq!(err["error"], "csv");
    assert!(err["message"].as_str().unwrap().contains("line 2"));
}

const CONFIG: &str = r#"
experiment = "cli_check"
iterations = 30
seeds = [0, 1]

[problem]
kind = "find-center"
num_points = 50
dim = 8
data_seed = 5

[[methods]]
method = "SGD"
batch_size = 5
eta = { initial = 0.5, kind = "constant" }

[[methods]]
method = "LSSGD"
batch_size = 5
eta = { initial = 0.5, kind = "constant" }
sigma = { initial = 1.0, kind = "constant" }
"#;

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn run_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let printed = stdout(&lapsmooth(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ]));
        assert!(printed.trim_end().ends_with("cli_check_summary.csv"));
    }
    let files = read_all(&a);
    assert_eq!(files.len(), 5);
    assert_eq!(files, read_all(&b));

    let summary = stdout(&lapsmooth(&[
        "--seed",
        "7",
        "run",
        "--config",
        cfg.to_str().unwrap(),
    ]));
    assert_eq!(summary.lines().count(), 3);
    assert!(summary
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(3) == Some("7")));
}

#[test]
fn run_errors_are_machine_readable() {
    let err = error_json(&lapsmooth(&["run"]));
    assert_eq!(err["error"], "config");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, CONFIG.split("[[methods]]").next().unwrap()).unwrap();
    let err = error_json(&lapsmooth(&["run", "--config", cfg.to_str().unwrap()]));
    assert_eq!(err["error"], "config");
    assert!(err["message"]
        .as_str()
        .unwrap()
        .contains("method list is empty"));

    std::fs::write(&cfg, "experiment = \"x\"\niterations = [\n").unwrap();
    let err = error_json(&lapsmooth(&["run", "--config", cfg.to_str().unwrap()]));
    assert!(err["message"].as_str().unwrap().contains("line"));

    let out = lapsmooth(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "usage");
}

#[test]
fn envelope_slice_and_var_measure() {
    let dir = tempfile::tempdir().unwrap();
    let printed = stdout(&lapsmooth(&[
        "envelope-slice",
        "--points",
        "3",
        "--t-values",
        "0.000001,1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(printed.trim()).unwrap();
    assert!(csv.starts_with("radius,t,u,converged\n0,0.000001,0,true"));
    assert_eq!(csv.lines().count(), 7);

    let report = stdout(&lapsmooth(&[
        "var-measure",
        "--replicas",
        "10",
        "--path-length",
        "2",
        "--batch-sizes",
        "5,50",
        "--sigmas",
        "0,3",
    ]));
    let rows = cells(&report);
    assert_eq!(rows.len(), 2);
    assert!(rows[0].iter().zip(&rows[1]).all(|(a, b)| b < a));

    let err = error_json(&lapsmooth(&[
        "var-measure",
        "--images",
        "/nonexistent/images",
        "--labels",
        "/nonexistent/labels",
    ]));
    assert_eq!(err["error"], "data");
}

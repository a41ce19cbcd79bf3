use std::path::Path;
use std::process::{Command, Output};

use halfspace_berry::sweep::from_jsonl;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_halfspace-berry"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_SWEEP: &str = r#"
time = 2.0
[[axis]]
name = "omega0"
min = 0.9
max = 1.2
count = 4
[[axis]]
name = "time"
min = 0.0
max = 2.0
count = 3
"#;

#[test]
fn permittivity_table_marks_the_gap() {
    let out = run(&["permittivity", "--min", "0.9", "--max", "1.2", "--count", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "omega,eps_re,eps_im,in_gap");
    assert_eq!(body.len(), 5);
    assert!(body[1].ends_with("false"));
    assert!(body[3].ends_with("true"));
}

#[test]
fn sweep_writes_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SMALL_SWEEP);
    let csv_path = dir.path().join("out.csv");
    let out = run(&["--config", &cfg, "--out", csv_path.to_str().unwrap(), "sweep"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3 + 1 + 12);
    assert!(lines[3].starts_with("omega0,time,eps_re"));

    let out = run(&["--config", &cfg, "--format", "jsonl", "sweep"]);
    assert!(out.status.success());
    let table = from_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 12);
    assert_eq!(table.config["time"], 2.0);
    let p2 = table.column("P2").unwrap();
    assert!(p2.iter().all(|p| (0.0..=1.0).contains(p)));
}

#[test]
fn csv_and_jsonl_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SMALL_SWEEP);
    let csv = String::from_utf8(run(&["--config", &cfg, "sweep"]).stdout).unwrap();
    let jsonl = String::from_utf8(run(&["--config", &cfg, "--format", "jsonl", "sweep"]).stdout).unwrap();
    let table = from_jsonl(&jsonl).unwrap();
    let i = table.column_index("phi_arcsin").unwrap();
    for (line, row) in csv.lines().skip(4).zip(&table.rows) {
        let v: f64 = line.split(',').nth(i).unwrap().parse().unwrap();
        assert_eq!(v.to_bits(), row[i].as_f64().unwrap().to_bits());
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SMALL_SWEEP);
    let one = run(&["--config", &cfg, "--workers", "1", "sweep"]);
    let four = run(&["--config", &cfg, "--workers", "4", "sweep"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["sweep"]).status.code(), Some(1), "sweep without axes");

    let out = run(&["--preset", "fig99", "sweep"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig9"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "typo.toml", "[atom]\nomgea0 = 1.0\n");
    let out = run(&["--config", &cfg, "evolve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atom.omega0"));

    let cfg = write(dir.path(), "neg.toml", "[atom]\nzA = -0.1\n");
    let out = run(&["--config", &cfg, "evolve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atom.zA"));

    let cfg = write(dir.path(), "syntax.toml", "time = = 3\n");
    assert_eq!(run(&["--config", &cfg, "evolve"]).status.code(), Some(1));
}

#[test]
fn computation_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "log.toml",
        "solver = \"volterra\"\n[[axis]]\nname = \"time\"\nmin = 0.1\nmax = 2.0\ncount = 5\nspacing = \"log\"\n",
    );
    assert_eq!(run(&["--config", &cfg, "sweep"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = run(&["--out", target.to_str().unwrap(), "permittivity", "--count", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_subcommand_passes() {
    let out = run(&["check"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7, "{text}");
}

#[test]
fn berry_trace_with_empty_upper_level_has_zero_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "vac.toml",
        "environment = \"free_space\"\n[initial]\nc1 = [1.0, 0.0]\nc2 = [0.0, 0.0]\n",
    );
    let out = run(&["--config", &cfg, "--format", "jsonl", "berry", "--steps", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = from_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 51);
    assert!(table.column("phi_t").unwrap().iter().all(|p| p.abs() < 1e-12));
}

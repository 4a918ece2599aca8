use std::fs;
use std::process::{Command, Output};

use betazeta::figures::{real_axis_scan, write_real_axis_csv, FigureId, CSV_HEADER};
use betazeta::{EvalConfig, Evaluator, ZeroCandidate};

const BIN: &str = env!("CARGO_BIN_EXE_betazeta");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BETAZETA_PRIME_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn eval_prints_value_estimate_terms_and_config() {
    let o = run(&["eval", "zeta", "2+0i"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let value: f64 = field(&out, "value")
        .split('+')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
    // the order-64 binomial average touches 65 series terms
    assert_eq!(field(&out, "terms_used"), "65");
    assert!(field(&out, "truncation_estimate").parse::<f64>().is_ok());
    assert_eq!(field(&out, "prime_count"), "1000");
    assert_eq!(field(&out, "acceleration"), "euler_transform");
}

#[test]
fn eval_every_function() {
    for f in [
        "zeta",
        "prime-zeta",
        "alt-prime-zeta",
        "euler-product",
        "remainder",
        "meta",
        "b-zeta",
        "b-m",
    ] {
        let o = run(&["eval", f, "0.7 - 3i"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{f}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(field(&stdout(&o), "function"), f);
    }
}

#[test]
fn eval_single_prime_b_m() {
    let o = run(&["eval", "b-m", "2+0i", "--primes", "1"]);
    let out = stdout(&o);
    assert!(field(&out, "value").starts_with("1.26491106"), "{out}");
}

#[test]
fn exit_codes() {
    let pole = run(&["eval", "zeta", "1+0i"]);
    assert_eq!(pole.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&pole.stderr).contains("singularity"));
    assert_eq!(run(&["eval", "zeta", "two"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "zeta", "-0.5+1i"]).status.code(), Some(2));
    assert_eq!(run(&["figure", "bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["find-zeros", "10", "20", "--step", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--primes", "0", "eval", "zeta", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn verification_failure_exit_code() {
    // a table whose only zero in range is wrong
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("zeros.txt");
    fs::write(&table, "14.5\n").unwrap();
    let o = run(&["--table", table.to_str().unwrap(), "find-zeros", "10", "15"]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("1 misses") && err.contains("1 false negatives"),
        "{err}"
    );
}

#[test]
fn find_zeros_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--output-dir",
        dir.path().to_str().unwrap(),
        "find-zeros",
        "10",
        "15",
        "--report",
        "zeros.jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 matched"));
    let text = fs::read_to_string(dir.path().join("zeros.jsonl")).unwrap();
    let found: Vec<ZeroCandidate> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(found.len(), 1);
    assert!((found[0].t - 14.134725).abs() < 1e-3);
    assert!(found[0].matched_reference.is_some());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# test config\nprime_count = 50\neta_terms = 80\n").unwrap();
    let path = cfg.to_str().unwrap();
    let out = stdout(&run(&["--config", path, "eval", "zeta", "2"]));
    assert_eq!(field(&out, "prime_count"), "50");
    assert_eq!(field(&out, "eta_terms"), "80");
    let out = stdout(&run(&[
        "--config", path, "--primes", "7", "eval", "zeta", "2",
    ]));
    assert_eq!(field(&out, "prime_count"), "7");
    assert_eq!(field(&out, "eta_terms"), "80");

    fs::write(&cfg, "nonsense = 1\n").unwrap();
    assert_eq!(
        run(&["--config", path, "eval", "zeta", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn prime_cache_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("primes.txt");
    let o = Command::new(BIN)
        .args(["--primes", "25", "eval", "prime-zeta", "2"])
        .env("BETAZETA_PRIME_CACHE", &cache)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&cache).unwrap();
    assert_eq!(text.lines().count(), 25);
    assert_eq!(text.lines().last(), Some("97"));

    let flag_cache = dir.path().join("flag.txt");
    let o = run(&[
        "--prime-cache",
        flag_cache.to_str().unwrap(),
        "--primes",
        "10",
        "eval",
        "zeta",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&flag_cache).unwrap().lines().last(),
        Some("29")
    );
}

#[test]
fn appendix_b_four_panels() {
    let o = run(&["figure", "appendixB", "--zeros", "1..4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == CSV_HEADER));
    let panels: Vec<&str> = out.lines().filter(|l| l.starts_with("# panel")).collect();
    assert_eq!(panels.len(), 4);
    for p in panels {
        assert!(p.contains("argmin_alpha = 5.00000000000e-1"), "{p}");
    }
    let rows = out
        .lines()
        .filter(|l| !l.starts_with('#') && *l != CSV_HEADER)
        .count();
    assert_eq!(rows, 4 * 17);
}

#[test]
fn appendix_with_missing_table_is_an_error() {
    let o = run(&["--table", "/does/not/exist", "figure", "appendixA"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reference zero table"));
}

#[test]
fn figure_output_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let name = format!("fig2_{workers}.csv");
        let o = run(&[
            "--workers",
            workers,
            "--output-dir",
            dir.path().to_str().unwrap(),
            "figure",
            "fig2",
            "--out",
            &name,
        ]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn library_csv_matches_cli() {
    let e = Evaluator::new(EvalConfig::default()).unwrap();
    let (lo, hi, step) = FigureId::Fig1.default_alpha_grid();
    let scan = real_axis_scan(&e, lo, hi, step, 1e-10).unwrap();
    let mut buf = Vec::new();
    write_real_axis_csv(&mut buf, FigureId::Fig1, &e, &scan).unwrap();
    assert_eq!(buf, run(&["figure", "fig1"]).stdout);
}

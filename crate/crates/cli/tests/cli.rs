use std::process::{Command as Process, Output};

use spectral_lab::analysis::{CoefficientTable, Term};
use spectral_lab::counting::{Convention, CountingTable, IndexBase};
use spectral_lab_cli::{parse_config, run, Command, Format, Lambdas, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_spectral-lab");

fn argv(line: &[&str]) -> Vec<String> {
    std::iter::once("spectral-lab")
        .chain(line.iter().copied())
        .map(String::from)
        .collect()
}

fn config(line: &[&str]) -> RunConfig {
    parse_config(argv(line)).unwrap()
}

fn exec(line: &[&str], threads: Option<&str>) -> Output {
    let mut p = Process::new(BIN);
    p.args(line).env_remove("SPECTRAL_LAB_THREADS");
    if let Some(t) = threads {
        p.env("SPECTRAL_LAB_THREADS", t);
    }
    p.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parses_examples() {
    let c = config(&["table2", "--lambda", "1e7"]);
    assert_eq!(c.format, Format::Csv);
    assert_eq!(
        c.command,
        Command::Table {
            term: Term::Second,
            lambda: 1e7,
            base: IndexBase::FromZero,
            both_bases: false
        }
    );

    let c = config(&["gamma-c", "--c", "2", "--tol", "1e-10"]);
    assert_eq!(
        c.command,
        Command::GammaC {
            c: 2.0,
            tol: 1e-10,
            tau: None
        }
    );

    let c = config(&["count", "--op", "circle(c=2)⊗circle(c=2)", "--lambda", "12"]);
    let Command::Count { op, lambdas, .. } = c.command else {
        panic!("wrong command")
    };
    assert_eq!(op.to_string(), "circle(c=2,k=1)⊗circle(c=2,k=1)");
    assert_eq!(lambdas, Lambdas::Single(12.0));

    let ascii = config(&["count", "--op", "circle(c=2) x circle(c=2)", "--lambda", "12"]);
    assert!(matches!(ascii.command, Command::Count { .. }));
}

#[test]
fn usage_errors() {
    assert!(parse_config(argv(&["frobnicate"])).is_err());
    assert!(parse_config(argv(&["gamma-c"])).is_err());
    assert!(parse_config(argv(&["count", "--op", "circle(c=2)", "--lambda", "3"])).is_err());
    assert!(parse_config(argv(&["count", "--op", "circle(c=2)xcircle(q=1)", "--lambda", "3"])).is_err());
    for line in [
        &["frobnicate"][..],
        &["count", "--op", "sphere(c=1)xcircle(c=1)", "--lambda", "3"],
        &["table1", "--index-base", "two"],
    ] {
        let o = exec(line, None);
        assert_eq!(o.status.code(), Some(2), "{line:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn domain_errors_exit_one_with_module_name() {
    let o = exec(&["gamma-c", "--c", "0"], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("spectral-lab: constants:"), "{err}");

    let o = exec(&["zeta", "--op", "circle(c=1)", "--s", "0.5"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("zeta:"));
}

#[test]
fn count_example() {
    let o = exec(&["count", "--op", "circle(c=2)⊗circle(c=2)", "--lambda", "12"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "12,13\n");
}

#[test]
fn table2_layout() {
    let out = run(&config(&["table2", "--lambda", "1e7"])).unwrap().body;
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "c,estimate,closed_form,error");
    assert_eq!(lines.len(), 20);
    assert!(lines[1].starts_with("2,0.4004"));
    assert!(lines[19].starts_with("20,-2.385"));
    let back = CoefficientTable::from_csv(&out, Term::Second, 1e7, IndexBase::FromZero).unwrap();
    assert_eq!(back.to_csv(), out);
}

#[test]
fn weyl_coeffs_json() {
    let text = run(&config(&["weyl-coeffs", "--op", "folded(c=2)⊗folded(c=2)"])).unwrap().body;
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["z0"], 0.5);
    assert_eq!(v["coeff_log"], 2.0);
    let plain = v["coeff_plain"].as_f64().unwrap();
    assert!((plain - (8.0 * 0.700_241_781_967_704_8 - 4.0)).abs() < 1e-10);
    assert_eq!(v["method"], "closed-form-laurent");

    let text = run(&config(&["weyl-coeffs", "--op", "circle(c=2)⊗circle(c=2)"])).unwrap().body;
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let torus = 8.0 * 0.700_241_781_967_704_8 - 4.0 - 4.0 / 2f64.sqrt();
    assert!((v["coeff_plain"].as_f64().unwrap() - torus).abs() < 1e-10);

    let text = run(&config(&["weyl-coeffs", "--op", "circle(c=1)⊗circle(c=1,k=2)"])).unwrap().body;
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["method"], "trace");
    assert!((v["coeff_plain"].as_f64().unwrap() - 6.306_696_1).abs() < 1e-7);
}

#[test]
fn laurent_json_fields() {
    let text = run(&config(&["laurent", "--op", "circle(c=0)xcircle(c=0)", "--z0", "0.5", "--order", "2"]))
        .unwrap()
        .body;
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["z0", "order", "A2", "A1", "finite_part", "err"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!((v["A1"].as_f64().unwrap() - 2.308_862_6).abs() < 1e-6);
}

#[test]
fn aramaki_and_wres() {
    let text = run(&config(&["aramaki", "--order", "2", "--a2", "1", "--a1", "0", "--z0", "1"]))
        .unwrap()
        .body;
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!((v["coeff_log"].as_f64(), v["coeff_plain"].as_f64()), (Some(1.0), Some(-1.0)));

    let out = run(&config(&["wres", "--op", "folded(c=3)xfolded(c=3)"])).unwrap().body;
    assert_eq!(out, "m1,m2,A2,wres\n2,2,1,4\n");
}

#[test]
fn count_grid_round_trips() {
    let line = ["count", "--op", "circle(c=0)xcircle(c=0)", "--min", "1e3", "--max", "1e9", "--points", "25"];
    let out = run(&config(&line)).unwrap().body;
    let table = CountingTable::from_csv(&out, Convention::Multiplicity, "torus").unwrap();
    assert_eq!(table.rows.len(), 25);
    assert!(table.is_consistent());
    assert_eq!(table.to_csv(), out);
}

#[test]
fn remainder_emits_table_and_fit() {
    let o = exec(&["remainder", "--min", "1e4", "--max", "1e8", "--points", "50"], None);
    assert!(o.status.success());
    let table = CountingTable::from_csv(&stdout(&o), Convention::PairCount, "divisor").unwrap();
    assert_eq!(table.rows.len(), 50);
    let note = String::from_utf8(o.stderr).unwrap();
    assert!(note.contains("fitted exponent"), "{note}");

    let json = run(&config(&["remainder", "--min", "1e4", "--max", "1e8", "--format", "json"])).unwrap().body;
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let e = v["fitted_exponent"].as_f64().unwrap();
    assert!((0.2..=0.35).contains(&e));
    assert_eq!(v["references"]["hardy"], 0.25);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("spectral-lab-{}.csv", std::process::id()));
    let o = exec(&["gamma-c", "--c", "2", "--out", path.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("c,value,error_bound,terms_used\n2,0.7002417819"));
}

#[test]
fn thread_count_does_not_change_output() {
    let lines: [&[&str]; 3] = [
        &["table1", "--lambda", "1e6", "--both-bases"],
        &["count", "--op", "circle(c=3)xcircle(c=5,k=2)", "--min", "10", "--max", "1e10", "--points", "40"],
        &["remainder", "--min", "1e3", "--max", "1e7", "--points", "30", "--c", "2"],
    ];
    for line in lines {
        let one = exec(line, Some("1"));
        let three = exec(line, Some("3"));
        assert!(one.status.success());
        assert_eq!(one.stdout, three.stdout, "{line:?}");
        assert_eq!(exec(line, Some("1")).stdout, one.stdout);
    }
}

#[test]
fn environment_overrides_threads_flag() {
    let o = exec(&["--threads", "2", "gamma-c", "--c", "2"], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("SPECTRAL_LAB_THREADS"));
    let o = exec(&["--threads", "0", "gamma-c", "--c", "2"], Some("2"));
    assert!(o.status.success());
}

#[test]
fn help_exits_zero() {
    let o = exec(&["--help"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("weyl-coeffs"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subcons_bench::results::{read_rows, without_timing};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_subcons"));
    c.env_remove("SUBCONS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["gen"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", s(&out)]);
    ok(&args);
    out
}

#[test]
fn gen_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--kind", "speech-like", "--n", "50", "--seed", "7"];
    let a = gen(dir.path(), "a.json", &args);
    let b = gen(dir.path(), "b.json", &args);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    let stdout = ok(&["gen", "--kind", "speech-like", "--n", "50", "--seed", "7"]).stdout;
    assert_eq!(stdout, std::fs::read(path(dir.path(), "a.json")).unwrap());
}

#[test]
fn gen_records_hardness_sizes_and_saturation() {
    let dir = tempfile::tempdir().unwrap();
    let h = gen(
        dir.path(),
        "h.json",
        &["--kind", "hardness-pair", "--n", "12", "--x2", "5"],
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(h).unwrap()).unwrap();
    // x = √5: α = ⌊√5·√12/5⌋ = ⌊1.549⌋ = 1, β = ⌊5/5⌋ = 1
    assert_eq!(v["meta"]["params"]["alpha"], 1);
    assert_eq!(v["meta"]["params"]["beta"], 1);
    assert_eq!(v["f"]["hidden"].as_array().unwrap().len(), 1);

    let sat = gen(
        dir.path(),
        "s.json",
        &["--kind", "speech-sat", "--n", "8", "--saturation", "0.5"],
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(sat).unwrap()).unwrap();
    assert_eq!(v["g"]["kind"], "saturated_sum");
    assert_eq!(v["g"]["alpha"], 0.5);
}

#[test]
fn solve_reports_optimum_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "i.json",
        &["--kind", "speech-like", "--n", "10", "--seed", "1"],
    );
    let res = path(dir.path(), "r.json");
    ok(&[
        "solve",
        "--instance",
        s(&inst),
        "--algo",
        "brute-force,gr",
        "--budget-frac",
        "0.3,0.6",
        "--out",
        s(&res),
    ]);
    let rows = read_rows(&res).unwrap();
    // two solver rows and two baselines per budget
    assert_eq!(rows.len(), 8);
    for r in rows.iter().filter(|r| !r.is_baseline()) {
        let opt = r.brute_force_opt.expect("optimum attached");
        let ratio = r.ratio.expect("ratio attached");
        assert!((ratio - r.g_value.unwrap() / opt).abs() < 1e-12);
        if r.algorithm == "brute-force" {
            assert_eq!(ratio, 1.0);
        } else {
            assert!(ratio <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn solve_is_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "i.json",
        &["--kind", "speech-sat", "--n", "14", "--seed", "2"],
    );
    for ext in ["json", "csv"] {
        let mut rows = Vec::new();
        for (i, threads) in ["1", "4"].into_iter().enumerate() {
            let res = path(dir.path(), &format!("r{i}.{ext}"));
            ok(&[
                "solve",
                "--instance",
                s(&inst),
                "--algo",
                "issc,eassc,eassc-c",
                "--cover-frac",
                "0.5,0.9",
                "--seed",
                "3,4",
                "--threads",
                threads,
                "--out",
                s(&res),
            ]);
            rows.push(without_timing(&read_rows(&res).unwrap()));
        }
        assert_eq!(rows[0], rows[1]);
        assert_eq!(rows[0].len(), 2 * 2 * 3 * 2);
    }
}

#[test]
fn results_validate_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "i.json",
        &["--kind", "modular-pair", "--n", "9", "--seed", "5"],
    );
    let res = path(dir.path(), "r.json");
    ok(&[
        "solve",
        "--instance",
        s(&inst),
        "--algo",
        "ssc-greedy,ssc-dual,issc,eassc,brute-force",
        "--cover-frac",
        "0.25,0.75",
        "--out",
        s(&res),
    ]);
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/result.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&res).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    // eassc refuses a modular cost; the error is recorded in its row
    let rows = read_rows(&res).unwrap();
    assert!(rows
        .iter()
        .any(|r| r.algorithm == "eassc" && r.error.is_some()));

    let mut broken = doc.clone();
    broken["rows"][0]["extra"] = serde_json::json!(1);
    assert!(!validator.is_valid(&broken));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "m.json",
        &["--kind", "modular-pair", "--n", "8", "--seed", "3"],
    );
    let report = path(dir.path(), "v.json");
    ok(&[
        "verify",
        "--instance",
        s(&inst),
        "--trials",
        "10",
        "--out",
        s(&report),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert!(v["failures"].as_array().unwrap().is_empty());

    let big = gen(
        dir.path(),
        "b.json",
        &["--kind", "modular-pair", "--n", "20"],
    );
    assert_eq!(
        run(&["verify", "--instance", s(&big)]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_and_infeasible_exit_codes() {
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(
        run(&["gen", "--kind", "nope", "--n", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "m.json",
        &["--kind", "modular-pair", "--n", "6"],
    );
    let out = run(&[
        "solve",
        "--instance",
        s(&inst),
        "--algo",
        "ssc-greedy",
        "--cover",
        "1e6",
        "--out",
        s(&path(dir.path(), "r.json")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn report_merges_and_sorts() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(
        dir.path(),
        "i.json",
        &["--kind", "modular-pair", "--n", "8", "--seed", "9"],
    );
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.csv");
    ok(&[
        "solve",
        "--instance",
        s(&inst),
        "--algo",
        "sk-greedy,gr",
        "--budget-frac",
        "0.8,0.2",
        "--out",
        s(&a),
    ]);
    ok(&[
        "solve",
        "--instance",
        s(&inst),
        "--algo",
        "isk",
        "--budget-frac",
        "0.5",
        "--out",
        s(&b),
    ]);

    let single = path(dir.path(), "single.csv");
    ok(&["report", s(&a), "--out", s(&single)]);
    let n_single = csv::Reader::from_path(&single).unwrap().records().count();
    assert_eq!(n_single, read_rows(&a).unwrap().len());

    let merged = path(dir.path(), "merged.csv");
    let plot = path(dir.path(), "plot.json");
    ok(&[
        "report",
        s(&a),
        s(&b),
        "--out",
        s(&merged),
        "--plot-data",
        s(&plot),
    ]);
    let rows = read_rows(&merged).unwrap();
    assert_eq!(rows.len(), n_single + read_rows(&b).unwrap().len());
    for w in rows.windows(2) {
        let ka = (&w[0].instance, &w[0].algorithm);
        let kb = (&w[1].instance, &w[1].algorithm);
        assert!(ka < kb || (ka == kb && w[0].bound <= w[1].bound));
    }
    let plot: serde_json::Value = serde_json::from_slice(&std::fs::read(plot).unwrap()).unwrap();
    let series = plot["series"].as_array().unwrap();
    // sk-greedy, gr, isk and their baselines
    assert_eq!(series.len(), 6);
    let xs: Vec<f64> = series[0]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["x"].as_f64().unwrap())
        .collect();
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));

    std::fs::write(
        path(dir.path(), "bad.json"),
        r#"{"format": "other", "version": 1, "rows": []}"#,
    )
    .unwrap();
    let out = run(&[
        "report",
        s(&path(dir.path(), "bad.json")),
        "--out",
        s(&merged),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

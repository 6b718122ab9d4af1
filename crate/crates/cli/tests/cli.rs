use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hajlasz_cli::spacefile::{parse_space, space_to_string};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hajlasz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hajlasz")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn reports(o: &Output) -> Vec<Value> {
    match serde_json::from_slice(&o.stdout).unwrap() {
        Value::Array(a) => a,
        v => panic!("expected array, got {v}"),
    }
}

const TWO_POINT: &str = r#"{
  "name": "two",
  "space": {"inline": {"n": 2, "metric": {"type": "matrix", "values": [[0, 1], [1, 0]]}, "weights": [1, 1]}},
  "exponents": {"s": 1, "p": 1},
  "function": {"type": "values", "values": [0, 1]}
}"#;

#[test]
fn space_gen_round_trips_byte_identically() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["grid1d", "--n", "8", "--h", "0.125"],
        vec!["cantor", "--level", "3"],
        vec!["grid2d", "--nx", "3", "--ny", "4", "--h", "0.1"],
        vec!["ball-grid-with-atom", "--dim", "2", "--m", "3", "--atom", "5"],
        vec!["two-zone-glued", "--m", "3", "--k", "2"],
    ] {
        let out = dir.path().join("s.json");
        let mut full = vec!["space-gen"];
        full.extend(&args);
        full.extend(["-o", out.to_str().unwrap()]);
        let o = run(&full);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&out).unwrap();
        let space = parse_space(&text).unwrap();
        assert_eq!(space_to_string(&space).unwrap(), text, "{args:?}");
    }
}

#[test]
fn space_gen_shapes() {
    let o = run(&["space-gen", "grid1d", "--n", "8", "--h", "0.125"]);
    let sp = parse_space(&stdout(&o)).unwrap();
    assert_eq!(sp.len(), 8);
    for i in 0..8 {
        assert_eq!(sp.weight(i), 0.125);
    }
    let o = run(&["space-gen", "cantor", "--level", "3"]);
    assert_eq!(parse_space(&stdout(&o)).unwrap().len(), 8);
}

#[test]
fn space_file_is_usable_from_scenario() {
    let dir = TempDir::new().unwrap();
    let o = run(&["space-gen", "grid1d", "--n", "5", "--h", "0.2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let sc = write(
        dir.path(),
        "n.json",
        r#"{"space": {"file": "space.json"}, "exponents": {"p": 2}, "function": {"type": "constant", "value": 2}}"#,
    );
    let o = run(&["norm", sc.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &reports(&o)[0];
    assert!((r["details"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        dir.path(),
        "r.json",
        r#"[
          {"space": {"generator": {"kind": "grid1d", "n": 10, "h": 0.1}}, "exponents": {"s": 0.5, "p": 2},
           "function": {"type": "random"}},
          {"space": {"generator": {"kind": "cantor", "level": 3}}, "exponents": {"s": 0.4, "p": 1.5},
           "function": {"type": "random", "seed": 9}}
        ]"#,
    );
    let path = sc.to_str().unwrap();
    let a = run(&["gradient", path, "--seed", "4"]);
    let b = run(&["gradient", path, "--seed", "4"]);
    let c = run(&["gradient", path, "--seed", "4", "--jobs", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let d = run(&["gradient", path, "--seed", "5"]);
    assert_ne!(a.stdout, d.stdout);
    let r = reports(&a);
    assert_eq!(r[0]["scenario"], "r#0");
    assert_eq!(r[0]["details"]["setting_seed"], 4.0);
    // An explicit seed in the scenario wins over the flag.
    assert_eq!(r[1]["details"]["setting_seed"], 9.0);
}

#[test]
fn two_point_gradient_is_one() {
    let dir = TempDir::new().unwrap();
    let sc = write(dir.path(), "two.json", TWO_POINT);
    let o = run(&["gradient", sc.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &reports(&o)[0];
    assert_eq!(r["theorem"], "minimal_gradient_m");
    assert_eq!(r["verdict"], "pass");
    let obj = r["details"]["objective"].as_f64().unwrap();
    assert!((obj - 1.0).abs() < 1e-6, "{obj}");
    let g: Vec<f64> = r["solution"]["g"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(g.len(), 2);
    // |u(0) - u(1)| <= d(0,1) (g(0) + g(1))
    assert!(g[0] + g[1] >= 1.0 - 1e-8);
}

#[test]
fn norm_of_constant_is_its_absolute_value() {
    let dir = TempDir::new().unwrap();
    for (c, p) in [(-3.0, 2.0), (0.5, 1.0), (7.0, 4.5)] {
        let sc = write(
            dir.path(),
            "c.json",
            &format!(
                r#"{{"space": {{"generator": {{"kind": "grid1d", "n": 6, "h": {h}}}}}, "exponents": {{"p": {p}}},
                    "function": {{"type": "constant", "value": {c}}}}}"#,
                h = 1.0 / 6.0
            ),
        );
        let o = run(&["norm", sc.to_str().unwrap(), "--tol", "1e-10"]);
        assert!(o.status.success());
        let v = reports(&o)[0]["details"]["value"].as_f64().unwrap();
        // total mass 1, so the norm is |c|
        assert!((v - f64::abs(c)).abs() <= 1e-8 * f64::abs(c), "c={c} p={p}: {v}");
    }
}

#[test]
fn counterexample_passes() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        dir.path(),
        "ce.json",
        r#"{"verify": {"theorem": "counterexample", "n_dim": 1, "beta": 0.5, "p": 2, "theta": 0.6, "refinements": [10, 100, 1000]}}"#,
    );
    let o = run(&["verify", sc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(reports(&o)[0]["verdict"], "pass");
}

#[test]
fn failing_check_exits_one() {
    let dir = TempDir::new().unwrap();
    // An absurdly small candidate constant cannot satisfy the inequality.
    let sc = write(
        dir.path(),
        "f.json",
        r#"{"space": {"generator": {"kind": "grid1d", "n": 10, "h": 0.1}}, "exponents": {"s": 0.5, "p": 1.5, "Q": 1},
            "function": {"type": "distance", "center": 0}, "verify": {"theorem": "bounded", "candidate": 1e-6}}"#,
    );
    let o = run(&["verify", sc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(reports(&o)[0]["verdict"], "fail");
}

#[test]
fn not_applicable_does_not_fail() {
    let dir = TempDir::new().unwrap();
    // sp > Q: the bounded-space theorem does not apply.
    let sc = write(
        dir.path(),
        "na.json",
        r#"{"space": {"generator": {"kind": "grid1d", "n": 6, "h": 0.2}}, "exponents": {"s": 1, "p": 2, "Q": 1},
            "function": {"type": "distance", "center": 0}, "verify": {"theorem": "bounded"}}"#,
    );
    let o = run(&["verify", sc.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains(",false,") && row.ends_with(",false"), "{row}");
}

#[test]
fn malformed_scenarios_exit_two_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.json", "{not json", "not valid JSON"),
        ("field.json", r#"{"spcae": {}}"#, "spcae"),
        ("missing.json", r#"{"exponents": {"p": 2}, "function": {"type": "constant", "value": 1}}"#, "space"),
        (
            "triangle.json",
            r#"{"space": {"inline": {"n": 3, "metric": {"type": "matrix", "values": [[0,1,5],[1,0,1],[5,1,0]]}, "weights": [1,1,1]}},
                "exponents": {"p": 2}, "function": {"type": "constant", "value": 1}}"#,
            "triangle",
        ),
        (
            "length.json",
            r#"{"space": {"generator": {"kind": "grid1d", "n": 3, "h": 1}}, "exponents": {"p": {"values": [2, 2]}},
                "function": {"type": "constant", "value": 1}}"#,
            "exponent",
        ),
        (
            "exponent.json",
            r#"{"space": {"generator": {"kind": "grid1d", "n": 3, "h": 1}}, "exponents": {"p": 0},
                "function": {"type": "constant", "value": 1}}"#,
            "exponent",
        ),
    ];
    for (name, text, needle) in cases {
        let sc = write(dir.path(), name, text);
        let o = run(&["norm", sc.to_str().unwrap()]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{name}: {err}");
        assert!(err.contains(needle), "{name}: {err}");
        assert!(o.stdout.is_empty(), "{name}");
    }
    let o = run(&["norm", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["norm", dir.path().join("field.json").to_str().unwrap(), "--tol", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_has_fixed_columns() {
    let dir = TempDir::new().unwrap();
    let sc = write(dir.path(), "two.json", TWO_POINT);
    let o = run(&["gradient", sc.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["scenario", "theorem", "hypotheses_ok", "lhs", "rhs", "constant", "pass"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "two");
    assert_eq!(&rows[0][1], "minimal_gradient_m");
    assert_eq!(&rows[0][2], "true");
    assert_eq!(&rows[0][6], "true");
    for field in rows[0].iter().skip(3).take(3) {
        field.parse::<f64>().unwrap();
    }
}

#[test]
fn out_dir_receives_complete_file() {
    let dir = TempDir::new().unwrap();
    let sc = write(dir.path(), "two.json", TWO_POINT);
    let out = dir.path().join("results/nested");
    let o = run(&["gradient", sc.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let entries: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries, ["gradient.csv"], "no temporary files left behind");
    let direct = run(&["gradient", sc.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(fs::read(out.join("gradient.csv")).unwrap(), direct.stdout);
    // overwriting keeps the same bytes
    run(&["gradient", sc.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(fs::read(out.join("gradient.csv")).unwrap(), direct.stdout);
}

#[test]
fn infinite_exponent_round_trips() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        dir.path(),
        "inf.json",
        r#"{"space": {"generator": {"kind": "grid1d", "n": 4, "h": 0.25}}, "exponents": {"s": 0.5, "p": 2, "q": "inf"},
            "function": {"type": "coordinate", "axis": 0}, "gradient": {"norm": "besov"}}"#,
    );
    let o = run(&["gradient", sc.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(hajlasz_cli::canonical::value_to_string(&v), text);
}

#[test]
fn flags_fill_unset_values_only() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        dir.path(),
        "t.json",
        r#"[{"name": "own", "tol": 1e-7, "space": {"generator": {"kind": "grid1d", "n": 4, "h": 0.25}}, "exponents": {"p": 2},
             "function": {"type": "constant", "value": 1}},
            {"name": "flag", "space": {"generator": {"kind": "grid1d", "n": 4, "h": 0.25}}, "exponents": {"p": 2},
             "function": {"type": "constant", "value": 1}}]"#,
    );
    let o = run(&["norm", sc.to_str().unwrap(), "--tol", "1e-6"]);
    let r = reports(&o);
    assert_eq!(r[0]["details"]["setting_tol"], 1e-7);
    assert_eq!(r[1]["details"]["setting_tol"], 1e-6);
}

#[test]
fn shipped_scenarios_pass() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for cmd in ["norm", "gradient", "verify", "necessity"] {
        let path = root.join(format!("{cmd}.json"));
        let o = run(&[cmd, path.to_str().unwrap(), "--jobs", "2"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

use branch_lab::report::{emit_csv, Report};
use branch_lab::run;
use serde_json::Value;

fn ok(args: &[&str]) -> Report {
    let out = run(args.iter().copied());
    assert_eq!(out.code, 0, "{args:?}");
    out.report.unwrap()
}

fn stage<'a>(r: &'a Report, name: &str) -> &'a Value {
    &r.stages.iter().find(|s| s.name == name).unwrap_or_else(|| panic!("no stage {name}")).verdict
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["limit", "--seq", "cos(nu*x)"], 0),
        (&["classify", "--seq", "cos(nu*x)^2"], 0),
        (&["ideal", "check", "--generators", "1+sin(nu*x)"], 0),
        (&["ideal", "check", "--generators", "2+sin(nu*x)"], 0),
        // single zero at the boundary: no certificate, no unit
        (&["ideal", "check", "--generators", "x"], 2),
        (&["ideal", "check", "--eventually-zero", "--member", "{ tail = \"0\", exceptions = { \"2\" = \"x\" } }"], 0),
        (&["ideal", "check", "--eventually-zero", "--member", "cos(nu*x)"], 0),
        (&["span", "independence", "--first", "cos(nu*x)", "--second", "sin(nu*x),1"], 0),
        (&["span", "independence", "--first", "cos(nu*x)", "--second", "2*cos(nu*x)"], 2),
        (&["gf", "mul", "--lhs", "delta", "--rhs", "delta"], 0),
        (&["gf", "derive", "--lhs", "heaviside"], 0),
        (&["gf", "equal", "--lhs", "delta", "--rhs", "heaviside"], 0),
        (&["gf", "equal", "--lhs", "delta:1", "--rhs", "delta:1"], 0),
        (&["demo", "no-largest-ideal", "--second", "1+sin(nu*x)"], 2),
        (&["limit", "--seq", "(x"], 1),
        (&["limit"], 1),
        (&["frobnicate"], 1),
        (&["limit", "--seq", "x", "--tol=-1"], 1),
        (&["limit", "--seq", "x", "--domain", "1,0"], 1),
        (&["gf", "mul", "--algebra", "1", "--lhs", "x", "--rhs", "x"], 1),
        (&["gf", "mul", "--lhs", "1/x", "--rhs", "x"], 1),
        (&["demo", "branching", "--rep", "cos(nu*x)"], 1),
        (&["--help"], 0),
        (&["--version"], 0),
    ];
    for (args, code) in cases {
        assert_eq!(run(args.iter().copied()).code, *code, "{args:?}");
    }
}

#[test]
fn reports_carry_schema_and_config() {
    let r = ok(&["limit", "--seq", "cos(nu*x)^2", "--nu-max", "256"]);
    let v: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["schema"], "branch-lab/1");
    assert_eq!(v["config"]["nu_max"], 256);
    assert_eq!(v["command"][0], "limit");
    assert!(v["timing"]["elapsed_ms"].is_u64());
    let members = stage(&r, "classify")["members"].as_array().unwrap();
    assert_eq!(members.len(), 8);
    for m in members {
        assert_eq!(m["limit"]["verdict"], "ConvergesTo");
    }
}

#[test]
fn csv_cardinality() {
    let r = ok(&["demo", "nosquare"]);
    let schedule = r.config.schedule().unwrap().indices().len();
    let csv = emit_csv(&r).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * schedule * 8);
    // the row count does not depend on the verdict
    let r = run(["demo", "nosquare", "--nu-max", "64", "--panel", &panel_file(3)]).report.unwrap();
    assert_eq!(emit_csv(&r).unwrap().lines().count(), 1 + 2 * 7 * 3);
}

fn panel_file(count: usize) -> String {
    let dir = tempfile::tempdir().unwrap().keep();
    let path = dir.join("panel.json");
    std::fs::write(&path, format!("{{\"count\": {count}, \"normalized\": true}}")).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn output_files() {
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let args = ["demo", "delta-square", "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()];
    let r = ok(&args);
    let written: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();

    assert_eq!(written.deterministic_json().unwrap(), r.deterministic_json().unwrap());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("series,nu,center,width,value,error_estimate\n"));
    assert_eq!(table.lines().count(), 1 + r.pairings().count());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"nu_max": 128, "tol": 0.01, "domain": [-1.0, 1.0], "panel": {"count": 4, "normalized": false}}"#)
        .unwrap();
    let cfg = path.to_str().unwrap();
    let r = ok(&["limit", "--seq", "cos(nu*x)", "--config", cfg]);
    assert_eq!((r.config.nu_max, r.config.tol), (128, 0.01));
    assert_eq!(r.config.domain.map(|d| (d.lower(), d.upper())), Some((-1.0, 1.0)));
    assert_eq!(r.pairings().count(), 8 * 4);
    let r = ok(&["limit", "--seq", "cos(nu*x)", "--config", cfg, "--nu-max", "64", "--domain", "0,pi"]);
    assert_eq!((r.config.nu_max, r.config.tol), (64, 0.01));
    assert_eq!(r.config.domain.map(|d| d.upper()), Some(std::f64::consts::PI));

    std::fs::write(&path, r#"{"nu_maximum": 3}"#).unwrap();
    assert_eq!(run(["limit", "--seq", "x", "--config", cfg]).code, 1);
    assert_eq!(run(["limit", "--seq", "x", "--config", "/nonexistent/config.json"]).code, 1);
}

#[test]
fn certificate_flags_reach_the_search() {
    let r = ok(&["ideal", "check", "--generators", "1+cos(nu*x)", "--cell", "0.1", "--nu-max", "100"]);
    assert_eq!((r.config.cell_width, r.config.certificate_nu_max), (0.1, 100));
    let cert = &stage(&r, "off_diagonality")["result"]["certificate"];
    assert_eq!(cert["cell_width"], 0.1);
    for cell in cert["cells"].as_array().unwrap() {
        assert!(cell["nu"].as_u64().unwrap() <= 100);
    }
    // too coarse a search leaves cells uncovered
    let out = run(["ideal", "check", "--generators", "1+cos(nu*x)", "--cell", "0.01", "--nu-max", "5"]);
    assert_eq!(out.code, 2);
}

#[test]
fn sequence_inputs_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let reps = dir.path().join("reps.txt");
    std::fs::write(&reps, "# representatives of zero\ncos(nu*x)\n\n{ tail = \"0\", exceptions = { \"1\" = \"x\" } }\n").unwrap();
    let r = ok(&["demo", "branching", "--reps", reps.to_str().unwrap(), "--nu-max", "1024"]);
    assert_eq!(stage(&r, "branching")["distinct_pairs"], serde_json::json!([[0, 1]]));
    let generator = dir.path().join("g.expr");
    std::fs::write(&generator, "1+sin(nu*x)\n").unwrap();
    let r = ok(&["ideal", "check", "--generators", &format!("{},1+cos(nu*x)", generator.display())]);
    assert_eq!(stage(&r, "off_diagonality")["result"]["verdict"], "ContainsUnit");
}

#[test]
fn gf_algebra_from_generators() {
    // the ideal generated by cos(nu*x) is off-diagonal; cos(nu*x) represents zero
    let r = ok(&["gf", "equal", "--algebra", "cos(nu*x)", "--lhs", "x + x*cos(nu*x)", "--rhs", "x"]);
    assert_eq!(stage(&r, "equal")["result"]["verdict"], "Equal");
    // an ideal containing a unit is rejected
    assert_eq!(run(["gf", "equal", "--algebra", "2+sin(nu*x)", "--lhs", "x", "--rhs", "x"]).code, 1);
}

#[test]
fn determinism_of_limit_reports() {
    let a = ok(&["limit", "--seq", "sin(nu*x)*x"]);
    let b = ok(&["limit", "--seq", "sin(nu*x)*x"]);
    assert_eq!(a.deterministic_json().unwrap(), b.deterministic_json().unwrap());
}

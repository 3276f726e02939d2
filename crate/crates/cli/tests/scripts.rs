use serde_json::{json, Value};
use sgmod::verify::verify_witness;
use sgmod::{Caps, Witness};
use sgmod_cli::dsl::{Decl, Pos};
use sgmod_cli::fuzz::{self, FuzzConfig};
use sgmod_cli::report::{exit_code, to_json};
use sgmod_cli::{parse_script, run_source, CliError, Config, Report};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn run(src: &str) -> Vec<Report> {
    run_source(src, &Config::default()).unwrap()
}

fn status(r: &Report, verdict: &str) -> String {
    r.body["verdicts"][verdict]["status"].as_str().unwrap().to_string()
}

#[test]
fn parse_examples() {
    let s = parse_script("ring R = GF(2)[x]/(x^2); module M over R = coker [[x]]; classify M;").unwrap();
    assert_eq!(s.decls.len(), 3);
    let s = parse_script("ring R = Z/4;").unwrap();
    assert!(matches!(s.decls[0], Decl::Ring { .. }));
    let err = parse_script("ring R = Z/4;\nmodule M over S = free 1;").unwrap_err();
    match &err {
        CliError::Undefined { name, pos } => {
            assert_eq!(name, "S");
            assert_eq!(*pos, Pos { line: 2, col: 15 });
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_errors_have_positions() {
    let cases = [
        ("ring R = Z/4;\nclassify M;", "2:10"),
        ("ring R = Z/4;\nring R = Z/2;", "2:6"),
        ("ring R = Z/4;\nmodule M over R = coker [[1 2]];", "2:29"),
        ("ring R = Z/4;\n  classify R", "2:13"),
        ("ring R = Z/4 $", "1:14"),
    ];
    for (src, at) in cases {
        let err = parse_script(src).unwrap_err();
        assert!(err.to_string().contains(at), "{src:?}: {err}");
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn dual_numbers_fixture() {
    let reports = run(&fixture("dual_numbers.sg"));
    let c = &reports[0];
    assert_eq!(c.command, "classify X");
    assert_eq!(c.body["module"], json!("X"));
    let expected = [
        ("projective", "no"),
        ("injective", "no"),
        ("flat", "no"),
        ("free", "no"),
        ("sg_projective", "yes"),
        ("sg_injective", "yes"),
        ("sg_flat", "yes"),
        ("g_projective_certified", "yes"),
    ];
    for (v, s) in expected {
        assert_eq!(status(c, v), s, "{v}");
    }
    let ext = &reports[1];
    assert_eq!((ext.body["order"].clone(), ext.body["vanishes"].clone()), (json!("1"), json!(true)));
    let res = &reports[3];
    assert_eq!(res.body["ranks"], json!([1, 1, 1, 1]));
    assert_eq!(res.body["differentials"][0], json!([["x"]]));
    assert_eq!(reports[4].body["verified"], json!(true));
    assert_eq!(exit_code(&reports), 0);
}

#[test]
fn ext_of_two_over_z4_vanishes() {
    let r = run("ring R = Z/4; module M over R = ideal(2); ext M R 1;");
    assert_eq!(r[0].body["order"], json!("1"));
    assert_eq!(r[0].body["vanishes"], json!(true));
    assert_eq!(r[0].body["generators"], json!(0));
}

#[test]
fn quasi_frobenius_table() {
    let reports = run(&fixture("rings.sg"));
    let qf: Vec<bool> = reports[..5].iter().map(|r| r.body["quasi_frobenius"].as_bool().unwrap()).collect();
    assert_eq!(qf, vec![true, true, true, true, false]);
    let d = &reports[5];
    assert_eq!(d.body["factors"].as_array().unwrap().len(), 2);
    assert_eq!(status(&reports[6], "projective"), "no");
}

#[test]
fn strict_chain_fixture() {
    let reports = run(&fixture("strict_chain.sg"));
    let cert = |r: &Report| r.body["certificate"]["status"].as_str().unwrap().to_string();
    assert_eq!(cert(&reports[0]), "no");
    assert_eq!(reports[0].body["certificate"]["disproof"]["kind"], json!("exhausted_classes"));
    assert_eq!(cert(&reports[1]), "yes");
    assert_eq!(reports[1].body["period"], json!(2));
    assert_eq!(reports[1].body["summand_verified"], json!(true));
    assert_eq!(cert(&reports[2]), "yes");
}

#[test]
fn report_witnesses_reverify_from_json() {
    let caps = Caps::default();
    let mut reports = run(&fixture("dual_numbers.sg"));
    reports.extend(run(&fixture("strict_chain.sg")));
    let text = to_json(&reports);
    let parsed: Vec<Report> = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, reports);
    let mut found = 0;
    fn walk(v: &Value, caps: &Caps, found: &mut usize) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    if (k == "witness" || k == "summand") && !x.is_null() {
                        let w: Witness = serde_json::from_value(x.clone()).unwrap();
                        verify_witness(&w, caps).unwrap();
                        *found += 1;
                    } else {
                        walk(x, caps, found);
                    }
                }
            }
            Value::Array(a) => a.iter().for_each(|x| walk(x, caps, found)),
            _ => {}
        }
    }
    walk(&serde_json::from_str(&text).unwrap(), &caps, &mut found);
    assert!(found >= 8, "{found}");
}

#[test]
fn runs_are_deterministic() {
    let src = fixture("dual_numbers.sg") + "fuzz count 20;";
    let a = to_json(&run(&src));
    let b = to_json(&run(&src));
    assert_eq!(a, b);
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config { cache_dir: Some(dir.path().to_path_buf()), ..Config::default() };
    let src = fixture("dual_numbers.sg") + &fixture("rings.sg");
    let uncached = to_json(&run(&src));
    let cold = to_json(&run_source(&src, &config).unwrap());
    let entries = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(entries >= 10, "{entries}");
    let warm = to_json(&run_source(&src, &config).unwrap());
    assert_eq!(cold, warm);
    assert_eq!(cold, uncached);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), entries);
}

#[test]
fn cache_is_keyed_by_content() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config { cache_dir: Some(dir.path().to_path_buf()), ..Config::default() };
    // the same module under two names and two spellings shares one entry
    run_source("ring R = Z/4; module A over R = ideal(2); module B over R = ideal(2 + 4); classify A; classify B;", &config).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let mut other = config.clone();
    other.caps.ext_classes = 7;
    run_source("ring R = Z/4; module A over R = ideal(2); classify A;", &other).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn caps_surface_as_unknown() {
    let mut config = Config::default();
    config.caps.ring_elements = 2;
    let reports = run_source("ring R = GF(2)[x]/(x^4); module M over R = ideal(x); classify M; qf R;", &config).unwrap();
    assert!(reports.iter().all(Report::has_unknown));
    assert_eq!(exit_code(&reports), 2);
}

#[test]
fn timing_only_when_requested() {
    let src = "ring R = Z/4; qf R;";
    assert!(run(src)[0].timing_ms.is_none());
    let config = Config { timing: true, ..Config::default() };
    assert!(run_source(src, &config).unwrap()[0].timing_ms.is_some());
}

#[test]
fn evaluation_errors_are_input_errors() {
    for src in [
        "ring R = GF(4)[x]/(x^2);",
        "ring R = GF(2)[x]/(0);",
        "ring A = Z/4; ring B = Z/3; ring P = A * B;",
        "ring A = Z/4; ring B = Z/4; module M over A = free 1; module N over B = free 1; ext M N 1;",
        "ring R = Z/4; module M over R = coker [[x]];",
    ] {
        let err = run_source(src, &Config::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{src}: {err}");
    }
}

#[test]
fn fuzz_small_corpus_over_z4() {
    let caps = Caps::default();
    let config = FuzzConfig { count: 10, catalog: vec!["Z/4".into()], ..FuzzConfig::default() };
    let a = fuzz::run(&config, &caps).unwrap();
    assert!(a.failures.is_empty());
    assert!(a.tally().values().all(|t| t.failed == 0));
    let b = fuzz::run(&config, &caps).unwrap();
    assert_eq!(serde_json::to_string(&a.to_body()).unwrap(), serde_json::to_string(&b.to_body()).unwrap());
}

#[test]
fn fuzz_reaches_the_separator() {
    let caps = Caps::default();
    let out = fuzz::run(&FuzzConfig::default(), &caps).unwrap();
    let census = out.census();
    assert!(census.get("g_projective_not_sg_projective").copied().unwrap_or(0) >= 1, "{census:?}");
}

use qprim::classgroup::enumerate_classes;
use qprim::cli::{parse_classgroup_json, run, run_with, EXIT_CONTRADICTION, EXIT_OK, EXIT_USAGE};
use qprim::pprim::{classify, Route, Verdict};
use qprim::{ProperClass, Result};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qprim").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn classgroup_json_round_trips() {
    let (code, out, _) = call(&["classgroup", "-56"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        parse_classgroup_json(&out).unwrap(),
        enumerate_classes(-56).unwrap()
    );

    let (_, tsv, _) = call(&["classgroup", "-56", "--format", "tsv"]);
    assert_eq!(tsv.lines().count(), 5);
    assert!(tsv.contains("[3,-2,5]\t4\tfalse"));
}

#[test]
fn classify_end_to_end() {
    let (code, out, _) = call(&["classify", "-56", "3", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let got: Vec<(String, bool)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["form"].to_string(), e["cpp"].as_bool().unwrap()))
        .collect();
    let expected = [
        ("[1,0,14]", false),
        ("[2,0,7]", false),
        ("[3,-2,5]", true),
        ("[3,2,5]", true),
    ];
    assert_eq!(got, expected.map(|(f, c)| (f.to_string(), c)));
    // keys come out sorted
    let first = out.find("\"cpp\"").unwrap();
    assert!(first < out.find("\"evidence\"").unwrap());
    assert!(out.find("\"form\"").unwrap() < out.find("\"route\"").unwrap());
}

#[test]
fn precondition_errors_exit_two() {
    let (code, out, err) = call(&["classify", "-56", "7"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("p divides discriminant"), "{err}");

    assert_eq!(call(&["classgroup", "-57"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(
        call(&["spectrum", "-56", "--form", "1,0,1", "--bound", "10", "--p", "3"]).0,
        EXIT_USAGE
    );
    assert_eq!(call(&["ternary-demo", "--bound", "50"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn other_subcommands_run() {
    let (code, out, _) = call(&[
        "spectrum", "-56", "--form", "1,0,14", "--bound", "15", "--p", "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["spectrum"]["Q"], serde_json::json!([1, 4, 9, 14, 15]));

    let (code, out, _) = call(&["represent", "-4", "5", "--p", "5"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["record"]["r"], 8);

    let (code, out, _) = call(&["isometry", "-4", "5"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["maps"][0]["verified"], true);

    let (code, out, _) = call(&["ternary-demo", "--bound", "300"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["symmetric_difference"], serde_json::json!([1]));
}

#[test]
fn verify_exit_code_tracks_contradictions() {
    let args = [
        "qprim", "verify", "--dmin", "-60", "--dmax", "-3", "--pmax", "7", "--bound", "1000",
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run(args, &mut out, &mut err), EXIT_OK);

    // Claims every class is completely p-primitive.
    let corrupted = |x: &ProperClass, p: i64| -> Result<Verdict> {
        let mut v = classify(x, p)?;
        if !v.completely_p_primitive && v.route != Route::SymbolMinusOne {
            v.completely_p_primitive = true;
        }
        Ok(v)
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(
        run_with(args, &mut out, &mut err, &corrupted),
        EXIT_CONTRADICTION
    );
    let err = String::from_utf8(err).unwrap();
    assert!(err.contains("contradiction"), "{err}");
}

#[test]
fn verify_writes_full_report() {
    let path = std::env::temp_dir().join(format!("qprim-report-{}.json", std::process::id()));
    let path_s = path.to_str().unwrap();
    let (code, _, _) = call(&[
        "verify", "--dmin", "-60", "--dmax", "-50", "--pmax", "5", "--bound", "500", "--json",
        path_s,
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["cells"].as_array().unwrap().len() > 5);
    std::fs::remove_file(path).ok();
}

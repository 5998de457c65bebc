use prequant_cli::{prepare, run_checks, LoadError};

fn manifest(checks: &str) -> String {
    format!(
        r#"{{
  "charts": [{{ "name": "bind_r2", "coords": [{{ "name": "x" }}, {{ "name": "y" }}] }}],
  "forms": {{ "omega": {{ "chart": "bind_r2", "degree": 2, "terms": {{ "dx^dy": "1" }} }} }},
  "scalars": {{ "xy": {{ "chart": "bind_r2", "expr": "x*y" }} }},
  "structures": [{{ "kind": "graph_two_form", "id": "L", "form": "omega" }}],
  "checks": [{checks}]
}}"#
    )
}

fn load_err(checks: &str) -> LoadError {
    match prepare(&manifest(checks), None) {
        Err(e) => e,
        Ok(_) => panic!("expected a load error"),
    }
}

#[test]
fn named_scalar_resolves() {
    let (ws, c) = prepare(&manifest(r#"{ "id": "b", "op": "bracket", "structure": "L", "f": "$xy", "g": "x", "expect": "-x" }"#), None).unwrap();
    let r = run_checks(&ws, &c, None, false);
    assert!(r.all_passed(), "{:?}", r.checks[0]);
}

#[test]
fn unknown_argument_rejected() {
    let e = load_err(r#"{ "id": "b", "op": "integrable", "structure": "L", "extra": 1 }"#);
    assert!(e.to_string().contains("unexpected argument `extra`"), "{e}");
}

#[test]
fn unknown_op_rejected() {
    let e = load_err(r#"{ "id": "b", "op": "frobnicate" }"#);
    assert!(e.to_string().contains("unknown op"), "{e}");
}

#[test]
fn unknown_structure_rejected() {
    let e = load_err(r#"{ "id": "b", "op": "integrable", "structure": "M" }"#);
    assert!(matches!(e, LoadError::UnknownReference { .. }), "{e}");
}

#[test]
fn duplicate_check_ids_rejected() {
    let e = load_err(r#"{ "id": "b", "op": "integrable", "structure": "L" }, { "id": "b", "op": "integrable", "structure": "L" }"#);
    assert!(e.to_string().contains("duplicate"), "{e}");
}

#[test]
fn wrong_expectation_fails_not_errors() {
    let (ws, c) = prepare(&manifest(r#"{ "id": "b", "op": "bracket", "structure": "L", "f": "x", "g": "y", "expect": "2" }"#), None).unwrap();
    let r = run_checks(&ws, &c, None, false);
    assert!(!r.all_passed());
    assert_eq!(r.summary.failed, 1);
}

mod common;

use std::path::PathBuf;

use common::*;
use courant::fixtures::*;
use courant::modelfile::*;
use courant::{CourantError, CourantModel, UniPoly};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn same(a: &CourantModel, b: &CourantModel) {
    assert_eq!(a.metric(), b.metric());
    assert_eq!(a.anchor(), b.anchor());
    assert_eq!(a.structure_entries(), b.structure_entries());
    assert_eq!(a.ring(), b.ring());
    assert_eq!(a.transverse_count(), b.transverse_count());
    assert_eq!(a.genexact(), b.genexact());
}

#[test]
fn bundled_fixtures_load() {
    let t = UniPoly::t();
    let cases = [
        ("so3.model", so3()),
        ("exact-t2.model", exact_t2()),
        ("exact-t3.model", exact_t3(q(0))),
        ("exact-t3-c.model", exact_t3(q(2))),
        ("su2xR.model", su2_line(t.clone())),
        ("su2xR-const.model", su2_line(UniPoly::one())),
        ("su2xR-double.model", su2_line(poly(&[2]))),
        ("su2xR-quadratic.model", su2_line(&t * &t)),
        ("broken-jacobi.model", broken_jacobi()),
        ("trivial.model", trivial_line()),
    ];
    for (file, expected) in cases {
        let loaded = load_model(fixture(file)).unwrap();
        same(&loaded, &expected);
        assert_eq!(model_to_json(&loaded), std::fs::read_to_string(fixture(file)).unwrap(), "{file}");
    }
}

const SO3: &str = r#"{
  "name": "so3", "coefficient_ring": "Q", "fiber_rank": 3, "anchor_rank": 0, "transverse_count": 0,
  "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "anchor": [],
  "structure": [{ "indices": [1, 2, 3], "value": "1" }]
}"#;

fn err(text: &str) -> CourantError {
    parse_model(text).unwrap_err()
}

fn schema_path(e: CourantError) -> String {
    match e {
        CourantError::Schema { path, .. } => path,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn values_may_be_numbers_or_strings() {
    let m = parse_model(&SO3.replace(r#""value": "1""#, r#""value": 1"#)).unwrap();
    same(&m, &so3());
    let half = parse_model(&SO3.replace(r#""value": "1""#, r#""value": "1/2""#)).unwrap();
    assert_eq!(half.structure(0, 1, 2), UniPoly::constant(courant::linalg::rat(1, 2)));
    let e = err(&SO3.replace(r#""value": "1""#, r#""value": 0.5"#));
    assert_eq!(schema_path(e), "structure[0].value");
}

#[test]
fn repeated_indices_are_an_antisymmetry_error() {
    assert!(matches!(err(&SO3.replace("[1, 2, 3]", "[1, 1, 2]")), CourantError::Antisymmetry(_)));
    assert!(matches!(err(&SO3.replace("[1, 2, 3]", "[2, 1, 3]")), CourantError::Antisymmetry(_)));
}

#[test]
fn schema_errors_carry_a_path() {
    assert_eq!(schema_path(err(&SO3.replace(r#""name": "so3", "#, ""))), "name");
    assert_eq!(schema_path(err(&SO3.replace(r#""Q""#, r#""Z""#))), "coefficient_ring");
    assert_eq!(schema_path(err(&SO3.replace("[0, 1, 0]", "[0, 1]"))), "metric[1]");
    assert_eq!(schema_path(err(&SO3.replace("[1, 2, 3]", "[1, 2, 4]"))), "structure[0].indices");
    assert_eq!(schema_path(err(&SO3.replace(r#""value": "1""#, r#""value": "t^^2""#))), "structure[0].value");
    assert!(matches!(err("{ not json"), CourantError::Parse(_)));
}

#[test]
fn invariants_are_checked_at_load() {
    assert_eq!(err(&SO3.replace("[0, 0, 1]]", "[0, 0, 0]]")), CourantError::SingularMetric);
    assert!(matches!(err(&SO3.replace(r#""value": "1""#, r#""value": "t""#)), CourantError::RingMismatch(_)));
    let text = std::fs::read_to_string(fixture("su2xR.model")).unwrap();
    let tampered = text.replacen(r#""value": "t" }"#, r#""value": "2*t" }"#, 1);
    assert_eq!(schema_path(err(&tampered)), "genexact");
    assert!(matches!(err(&text.replace(r#"[1, 3, 2], "value": "-1""#, r#"[1, 3, 3], "value": "1""#)), CourantError::JacobiViolation(_)));
    assert!(matches!(load_model(fixture("missing.model")), Err(CourantError::Io(_))));
}

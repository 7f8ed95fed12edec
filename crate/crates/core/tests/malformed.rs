//! The malformed fixture corpus must fail with precise, located errors —
//! not panics, and not silent acceptance.

use usdkg::compose::{compose_source, ComposeError, MemLoader};
use usdkg::usda::{parse_source, ParseError};

fn fixture(name: &str) -> String {
    let path = format!(
        "{}/tests/fixtures/malformed/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
}

#[test]
fn unclosed_prim_reports_end_of_input() {
    let err = parse_source(&fixture("unclosed_prim.usda"), "unclosed_prim.usda").unwrap_err();
    match err {
        ParseError::UnexpectedToken { ref found, .. } => {
            assert!(found.contains("end of input"), "got {found:?}")
        }
        other => panic!("expected an unexpected-token error, got {other:?}"),
    }
}

#[test]
fn wrong_literal_type_is_pinned_to_its_line() {
    let err = parse_source(&fixture("bad_value.usda"), "bad_value.usda").unwrap_err();
    let message = err.to_string();
    assert!(message.starts_with("5:"), "line 5 missing from: {message}");
    assert!(message.contains("expected number"), "{message}");
}

#[test]
fn duplicate_sibling_names_are_rejected() {
    let err =
        parse_source(&fixture("duplicate_sibling.usda"), "duplicate_sibling.usda").unwrap_err();
    match err {
        ParseError::DuplicatePrimName { line, ref path, .. } => {
            assert_eq!(line, 6);
            assert_eq!(path, "/pallet/slat");
        }
        other => panic!("expected duplicate prim error, got {other:?}"),
    }
}

#[test]
fn missing_sublayer_names_the_reference() {
    let loader = MemLoader::new([]);
    let err = compose_source(
        &fixture("missing_sublayer.usda"),
        "missing_sublayer.usda",
        &loader,
    )
    .unwrap_err();
    match err {
        ComposeError::SublayerNotFound { ref id, .. } => assert_eq!(id, "nowhere.usda"),
        other => panic!("expected missing sublayer error, got {other:?}"),
    }
}

#[test]
fn inheriting_a_non_class_prim_is_rejected() {
    let loader = MemLoader::new([]);
    let err = compose_source(
        &fixture("inherit_non_class.usda"),
        "inherit_non_class.usda",
        &loader,
    )
    .unwrap_err();
    match err {
        ComposeError::InheritTargetNotClass { ref path, ref target } => {
            assert_eq!(path.to_string(), "/copy");
            assert_eq!(target.to_string(), "/base");
        }
        other => panic!("expected inherit-target error, got {other:?}"),
    }
}

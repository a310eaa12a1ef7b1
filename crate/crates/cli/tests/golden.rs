mod common;

#[test]
fn pinned_outputs_are_byte_identical() {
    let bad = common::golden_mismatches();
    assert!(bad.is_empty(), "output differs from tests/golden for {bad:?}");
}

#[test]
fn output_is_deterministic() {
    for (_, args) in common::GOLDEN_CASES {
        assert_eq!(common::run(args).stdout, common::run(args).stdout, "{args:?}");
    }
}

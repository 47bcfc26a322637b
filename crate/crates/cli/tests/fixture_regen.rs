use std::fs;
use std::path::Path;

use bearguard_cli::fixture;

#[test]
fn committed_fixture_matches_generator() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/eval");
    let (preds, gts) = fixture::build();
    assert_eq!(
        fs::read(dir.join(fixture::PREDICTIONS_FILE)).unwrap(),
        fixture::to_csv(&preds),
        "run `cargo run -p bearguard-cli --example gen_eval_fixture`"
    );
    assert_eq!(
        fs::read(dir.join(fixture::GROUND_TRUTH_FILE)).unwrap(),
        fixture::to_csv(&gts)
    );
}

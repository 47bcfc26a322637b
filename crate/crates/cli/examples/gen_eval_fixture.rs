//! Regenerates the evaluation fixture.
//!
//! cargo run -p bearguard-cli --example gen_eval_fixture [-- DIR]

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/eval"))
        });
    bearguard_cli::fixture::write_to(&dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}

//! Runs a TOML config (default: the bundled disk config) and prints the report table.

use std::path::PathBuf;

use spectral_gaps::cli::run_config;

fn main() -> spectral_gaps::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/disk.toml")
    });
    let report = run_config(&path)?;
    print!("{}", report.table());
    Ok(())
}

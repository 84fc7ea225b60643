//! Regenerate `golden/reference_calibration.json` from the default settings.
//!
//! ```text
//! cargo run --release --example calibrate [-- <output path>]
//! ```

use std::path::PathBuf;

use greedy_server::experiments::{calibrate, CalibrationSettings};

fn main() -> greedy_server::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden/reference_calibration.json"));
    let calibration = calibrate(&CalibrationSettings::default())?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, calibration.to_json()?)?;
    println!("wrote {}", path.display());
    Ok(())
}

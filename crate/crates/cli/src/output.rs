use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Creates `dir` if needed and returns the paths of `names` inside it,
/// refusing if any already exists and `force` is off.
pub fn prepare(dir: &Path, names: &[&str], force: bool) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(CliError::Input(format!(
                "{} exists; pass --force to overwrite",
                p.display()
            )));
        }
    }
    Ok(paths)
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn pretty_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

//! Level directories, population files and plain-text outputs.

use std::fs;
use std::path::{Path, PathBuf};

use popgrid::{EnvKind, Level, Population};

use crate::error::{CliError, CliResult};

pub const LEVEL_EXTENSION: &str = "level";

/// File name of level `index` (1-based) in a generated set.
pub fn level_file_name(index: usize) -> String {
    format!("{index:05}.{LEVEL_EXTENSION}")
}

/// Writes `levels` as `00001.level`, `00002.level`, … into `dir`.
pub fn write_level_dir(dir: &Path, levels: &[Level]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    levels
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let path = dir.join(level_file_name(i + 1));
            fs::write(&path, level.to_text()).map_err(|e| CliError::output(&path, e))?;
            Ok(path)
        })
        .collect()
}

pub fn read_level_file(path: &Path) -> CliResult<Level> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    Level::from_text(&text).map_err(|e| CliError::input(path, e))
}

/// Reads every `*.level` file in `dir`, in file-name order.
pub fn read_level_dir(dir: &Path) -> CliResult<Vec<Level>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::input(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::input(dir, e))?.path();
        if path.extension().is_some_and(|x| x == LEVEL_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::input(dir, "no .level files found"));
    }
    paths.iter().map(|p| read_level_file(p)).collect()
}

/// A single level file or a directory of them.
pub fn read_levels(path: &Path) -> CliResult<Vec<Level>> {
    if path.is_dir() {
        read_level_dir(path)
    } else {
        Ok(vec![read_level_file(path)?])
    }
}

pub fn check_level_env(levels: &[Level], env: EnvKind) -> CliResult<()> {
    match levels.iter().find(|l| l.kind() != env) {
        Some(l) => Err(CliError::config(format!("level {} is for {}, expected {env}", l.id(), l.kind()))),
        None => Ok(()),
    }
}

pub fn read_population(path: &Path) -> CliResult<Population> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let pop: Population = serde_json::from_str(&text)
        .map_err(|e| CliError::input(path, format!("line {}, column {}: {e}", e.line(), e.column())))?;
    pop.validate().map_err(|e| CliError::input(path, e))?;
    Ok(pop)
}

pub fn write_population(path: &Path, pop: &Population) -> CliResult<()> {
    let text = serde_json::to_string_pretty(pop).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::output(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::output(path, e))
}

//! CSV assembly and atomic output. Every file starts with `#`-prefixed
//! metadata (artifact version, content-affecting parameters, the full
//! resolved configuration between `# config-begin` and `# config-end`),
//! followed by one header row and the data rows. Nothing non-deterministic
//! (timestamps, absolute paths) is ever written, so identical inputs yield
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest representation that parses back to the same float; scientific
/// notation outside a plain-decimal-friendly range.
pub fn num(x: f64) -> String {
    let mag = x.abs();
    if x == 0.0 || (1e-4..1e7).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Empty field for absent values.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn assemble(
    config_toml: &str,
    params: &[(&str, String)],
    header: &str,
    rows: &[String],
) -> String {
    let mut out = format!("# csltrap {VERSION}\n");
    for (key, value) in params {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out.push_str("# config-begin\n");
    for line in config_toml.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str("# config-end\n");
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// Writes via a temp file in the same directory plus a rename, so a crash
/// never leaves a truncated CSV behind.
pub fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, &e))?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, content).map_err(|e| CliError::io(&tmp, &e))?;
    fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, &e))?;
    Ok(path)
}

pub fn emit(
    dir: &Path,
    name: &str,
    config_toml: &str,
    params: &[(&str, String)],
    header: &str,
    rows: &[String],
) -> Result<(), CliError> {
    let path = write_atomic(dir, name, &assemble(config_toml, params, header, rows))?;
    println!("wrote {}", path.display());
    Ok(())
}

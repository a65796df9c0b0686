//! `--config` files: one `key = value` per line, `#` starts a comment.
//! Each entry becomes the flag `--key value`, inserted right after the
//! subcommand. Keys given on the command line are not injected, so flags
//! always win over the file.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::CliError;

/// Returns `argv` with the entries of the config file spliced in, or `argv`
/// unchanged when no `--config` flag is present.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", Path::new(&path).display())))?;
    let entries = parse(&text)?;

    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut out: Vec<OsString> = argv[..2].to_vec();
    for (key, value) in entries {
        if !given.contains(&key) {
            out.push(format!("--{key}").into());
            out.push(value.into());
        }
    }
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut args = argv.iter().skip(2);
    while let Some(a) = args.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return args.next().cloned();
        }
        if let Some(path) = a.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

/// Parses `key = value` lines. Underscores in keys become hyphens; matching
/// single or double quotes around a value are removed.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`, found `{line}`",
                number + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key", number + 1)));
        }
        let value = value.trim();
        let value = ['"', '\'']
            .iter()
            .find_map(|q| value.strip_prefix(*q).and_then(|v| v.strip_suffix(*q)))
            .unwrap_or(value);
        entries.push((key, value.to_string()));
    }
    Ok(entries)
}

//! `key=value` config files whose keys are the long flag names.

use std::path::Path;

use crate::CliError;

/// Flags that take no value; `key=true` enables them.
const SWITCHES: [&str; 1] = ["check-ordering"];

/// Parses a config file into a subcommand (from `command=`) and flag list.
pub fn read_config(path: &Path) -> Result<(Option<String>, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<(Option<String>, Vec<String>), CliError> {
    let mut command = None;
    let mut args = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", k + 1)))?;
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", k + 1)));
        }
        if key == "command" {
            command = Some(value.to_string());
        } else if SWITCHES.contains(&key) {
            match value {
                "true" | "1" | "yes" => args.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(CliError::Usage(format!("config line {}: {key} expects true or false", k + 1))),
            }
        } else {
            args.push(format!("--{key}"));
            args.push(value.to_string());
        }
    }
    Ok((command, args))
}

/// Splices config flags in front of the command-line flags so the latter win.
pub fn merge_args(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    let prog = it.next().unwrap_or_else(|| "saddle".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it.next().ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
            config = Some(path);
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(std::iter::once(prog).chain(rest).collect());
    };
    let (command, flags) = read_config(Path::new(&path))?;
    let known = ["verify", "spectrum", "biot", "export"];
    let (sub, tail) = match rest.first() {
        Some(first) if known.contains(&first.as_str()) => (first.clone(), rest[1..].to_vec()),
        _ => {
            let sub = command.ok_or_else(|| CliError::Usage("no subcommand given on the command line or in the config".into()))?;
            (sub, rest)
        }
    };
    Ok(std::iter::once(prog)
        .chain(std::iter::once(sub))
        .chain(flags)
        .chain(tail)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_switches() {
        let (cmd, args) = parse_config("# sweep\ncommand = biot\nN=16,32\ncheck-ordering=true\n\ntau=1e-3\n").unwrap();
        assert_eq!(cmd.as_deref(), Some("biot"));
        assert_eq!(args, vec!["--N", "16,32", "--check-ordering", "--tau", "1e-3"]);
        assert!(parse_config("novalue\n").is_err());
        assert!(parse_config("check-ordering=maybe\n").is_err());
    }

    #[test]
    fn command_line_comes_last() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "command=verify\nseed=3\n").unwrap();
        let argv = ["saddle", "--config", path.to_str().unwrap(), "--seed", "9"]
            .map(String::from)
            .to_vec();
        let merged = merge_args(argv).unwrap();
        assert_eq!(merged, vec!["saddle", "verify", "--seed", "3", "--seed", "9"]);
    }
}

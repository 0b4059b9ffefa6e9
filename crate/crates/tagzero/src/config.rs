//! Layered command configuration: built-in defaults, then the command's section
//! of a JSON config file, then flags given on the command line.

use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::files::read_json;

pub const CONFIG_ENV: &str = "TAGZERO_CONFIG";

fn section(path: &Path, name: &str) -> Result<Map<String, Value>> {
    let root: Value = read_json(path)?;
    let Value::Object(mut root) = root else {
        return Err(CliError::Usage(format!("{}: config must be a JSON object keyed by command", path.display())));
    };
    match root.remove(name) {
        None => Ok(Map::new()),
        Some(Value::Object(m)) => Ok(m),
        Some(_) => Err(CliError::Usage(format!("{}: section {name:?} must be an object", path.display()))),
    }
}

fn given_on_command_line(matches: &ArgMatches, id: &str) -> bool {
    matches.ids().any(|i| i.as_str() == id)
        && matches!(
            matches.value_source(id),
            Some(ValueSource::CommandLine | ValueSource::EnvVariable)
        )
}

/// Merges `parsed` (the flags as clap produced them, defaults included) over
/// the `command` section of `config_file`. A flag wins over the file only if it
/// was actually typed; otherwise the file's value replaces clap's default.
/// Keys in the file that the command does not know are rejected.
pub fn resolve<T: Serialize + DeserializeOwned>(
    parsed: &T,
    matches: &ArgMatches,
    command: &str,
    config_file: Option<&Path>,
) -> Result<T> {
    let Some(path) = config_file else {
        return Ok(serde_json::from_value(serde_json::to_value(parsed).expect("serializable")).expect("round trip"));
    };
    let Value::Object(flags) = serde_json::to_value(parsed).expect("serializable arguments") else {
        unreachable!("argument structs serialize to objects");
    };
    let mut merged = section(path, command)?;
    if let Some(unknown) = merged.keys().find(|k| !flags.contains_key(*k)) {
        return Err(CliError::Usage(format!(
            "{}: unknown key {unknown:?} in section {command:?}",
            path.display()
        )));
    }
    for (key, value) in flags {
        if given_on_command_line(matches, &key) || !merged.contains_key(&key) {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("{}: section {command:?}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{Args, Command, FromArgMatches};
    use serde::Deserialize;

    #[derive(Debug, Args, Serialize, Deserialize, PartialEq)]
    struct Demo {
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    }

    fn parse(args: &[&str]) -> (Demo, ArgMatches) {
        let cmd = Demo::augment_args(Command::new("demo"));
        let m = cmd.try_get_matches_from(args).unwrap();
        (Demo::from_arg_matches(&m).unwrap(), m)
    }

    #[test]
    fn flags_beat_file_beats_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, r#"{"demo": {"k": 9, "seed": 4}, "other": {"zzz": 1}}"#).unwrap();
        let (d, m) = parse(&["demo", "--seed", "7"]);
        let r = resolve(&d, &m, "demo", Some(&cfg)).unwrap();
        assert_eq!(r, Demo { k: 9, seed: 7, out: None });

        let (d, m) = parse(&["demo"]);
        assert_eq!(resolve(&d, &m, "absent", Some(&cfg)).unwrap(), d);
        assert_eq!(resolve(&d, &m, "demo", None).unwrap(), d);
    }

    #[test]
    fn bad_files_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        let (d, m) = parse(&["demo"]);
        for body in [r#"{"demo": {"nope": 1}}"#, r#"{"demo": {"k": "x"}}"#, "[1]", r#"{"demo": 3}"#] {
            std::fs::write(&cfg, body).unwrap();
            let err = resolve(&d, &m, "demo", Some(&cfg)).unwrap_err();
            assert_eq!(err.exit_code(), crate::error::EXIT_USAGE, "{body}: {err}");
        }
    }
}

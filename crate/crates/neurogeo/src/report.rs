//! Report envelope shared by every CLI command.
//!
//! Reports are deterministic JSON: a versioned schema tag, the library
//! version, the command and its effective options, the raw configuration
//! the command ran with, and the command-specific result. No timestamps or
//! environment data — re-running a command with the seed and configuration
//! embedded in a report reproduces the report byte for byte.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::NgError;

/// Schema tag of every emitted report.
pub const SCHEMA: &str = "neurogeo/1";

/// Effective option values echoed into the report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportOptions {
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<u32>,
}

/// The envelope wrapping one command's result.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub options: ReportOptions,
    /// The configuration document the command ran with (object keys are
    /// sorted, so the echo is deterministic).
    pub config: serde_json::Value,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(
        command: &str,
        seed: u64,
        options: ReportOptions,
        config: serde_json::Value,
        result: T,
    ) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            options,
            config,
            result,
        }
    }

    /// Renders the report as JSON with a trailing newline.
    pub fn render(&self, pretty: bool) -> Result<String, NgError> {
        let mut text = if pretty {
            serde_json::to_string_pretty(self)?
        } else {
            serde_json::to_string(self)?
        };
        text.push('\n');
        Ok(text)
    }
}

/// Writes rendered output to a file, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), NgError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fields_and_determinism() {
        let opts = ReportOptions { trials: 3, prime: None, degree_cap: None };
        let config = serde_json::json!({"b": 1, "a": 2});
        let report = Report::new("dim", 7, opts.clone(), config.clone(), 42u32);
        let one = report.render(false).unwrap();
        let two = Report::new("dim", 7, opts, config, 42u32).render(false).unwrap();
        assert_eq!(one, two);
        assert!(one.ends_with('\n'));
        let value: serde_json::Value = serde_json::from_str(&one).unwrap();
        assert_eq!(value["schema"], "neurogeo/1");
        assert_eq!(value["command"], "dim");
        assert_eq!(value["seed"], 7);
        assert_eq!(value["result"], 42);
        assert!(value["options"].get("prime").is_none());
        // Object keys in the config echo are sorted.
        let keys: Vec<&String> = value["config"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b"]);
    }

    #[test]
    fn pretty_rendering_is_multiline() {
        let opts = ReportOptions { trials: 1, prime: Some(97), degree_cap: Some(3) };
        let report = Report::new("fibers", 0, opts, serde_json::Value::Null, ());
        let text = report.render(true).unwrap();
        assert!(text.lines().count() > 3);
        assert!(text.contains("\"prime\": 97"));
    }
}

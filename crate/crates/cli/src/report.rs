use std::io::Write;
use std::path::Path;

use divseq::verify::Check;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Everything a run produced, in a form `divseq verify` can re-ingest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub args: Value,
    pub input: Value,
    pub input_digest: String,
    pub outputs: Value,
    pub verification: Vec<Check>,
    pub passed: bool,
    pub approximate: bool,
    pub timing_ms: u64,
}

impl RunReport {
    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        match out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
        }
    }
}

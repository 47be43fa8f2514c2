use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{json_error, shape_error, CliError};

pub struct Input {
    pub source: String,
    pub value: Value,
    pub digest: String,
}

pub fn load(file: Option<&Path>, inline: Option<&str>) -> Result<Input, CliError> {
    let (source, text) = match (file, inline) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
            (p.display().to_string(), text)
        }
        (None, Some(t)) => ("--json".to_string(), t.to_string()),
        (Some(_), Some(_)) => return Err(CliError::Input("give either --in or --json, not both".into())),
        (None, None) => return Err(CliError::Input("no input: pass --in FILE or --json TEXT".into())),
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| json_error(&source, &e))?;
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    Ok(Input { source, value, digest })
}

/// Deserializes `value`, reporting failures against `source`.
pub fn typed<T: DeserializeOwned>(source: &str, what: &str, value: &Value) -> Result<T, CliError> {
    serde_json::from_value(value.clone()).map_err(|e| shape_error(source, what, &e))
}

/// `value[key]` if `value` is an object holding it, else `value` itself.
pub fn field_or_self<'a>(value: &'a Value, key: &str) -> &'a Value {
    value.get(key).unwrap_or(value)
}

pub fn field<'a>(source: &str, value: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    value
        .get(key)
        .ok_or_else(|| CliError::Input(format!("{source}: missing field `{key}`")))
}

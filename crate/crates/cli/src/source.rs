//! Locating model text and reading values given on the command line.

use std::collections::BTreeMap;
use std::path::Path;

use itree_core::Value;
use itree_dsl::builtin::builtin;
use itree_dsl::parse_binding;

use crate::animation::ApiError;

/// Reads `reference` as a file when `allow_files` is set and the path
/// exists, and otherwise as the name of a built-in model.
pub fn model_text(reference: &str, allow_files: bool) -> Result<String, ApiError> {
    if allow_files && Path::new(reference).is_file() {
        return std::fs::read_to_string(reference)
            .map_err(|e| ApiError::new("unknown_model", format!("cannot read {reference}: {e}")));
    }
    let name = reference.strip_prefix("builtin:").unwrap_or(reference);
    builtin(name)
        .map(|b| b.source.to_string())
        .ok_or_else(|| ApiError::new("unknown_model", format!("no model file or built-in model named `{reference}`")))
}

/// Splits `NAME=EXPR` pairs and evaluates each expression.
pub fn const_bindings<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, Value>, ApiError> {
    pairs
        .into_iter()
        .map(|pair| {
            let (name, text) = pair
                .split_once('=')
                .ok_or_else(|| ApiError::new("bad_request", format!("expected NAME=VALUE, got `{pair}`")))?;
            let name = name.trim();
            Ok((name.to_string(), binding(name, text)?))
        })
        .collect()
}

pub fn binding(name: &str, text: &str) -> Result<Value, ApiError> {
    parse_binding(name, text).map_err(|e| ApiError::new("bad_request", e.to_string()))
}

pub fn arguments<'a>(args: impl IntoIterator<Item = &'a str>) -> Result<Vec<Value>, ApiError> {
    args.into_iter()
        .enumerate()
        .map(|(i, a)| binding(&format!("argument {}", i + 1), a))
        .collect()
}

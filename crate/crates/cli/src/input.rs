//! JSON arguments given inline, as a file path, or as `-` for stdin.

use std::io::Read;

use serde_json::Value;
use tnnball_core::io::{matrix_from_json, network_from_json, parse_json};
use tnnball_core::{Matrix, Scalar};

use crate::CliError;

/// The text behind an argument: inline JSON when it starts with `{` or `[`,
/// stdin for `-`, otherwise the contents of the named file.
pub fn read_source(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))
}

pub fn read_json(arg: &str) -> Result<Value, CliError> {
    Ok(parse_json(&read_source(arg)?)?)
}

/// A matrix as a codec object or a bare array of rows.
pub fn matrix_value<T: Scalar>(v: &Value) -> Result<Matrix<T>, CliError> {
    match v {
        Value::Array(rows) => {
            let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
            let wrapped = serde_json::json!({"rows": rows.len(), "cols": cols, "data": v});
            Ok(matrix_from_json(&wrapped)?)
        }
        _ => Ok(matrix_from_json(v)?),
    }
}

pub fn read_matrix<T: Scalar>(arg: &str) -> Result<Matrix<T>, CliError> {
    matrix_value(&read_json(arg)?)
}

/// A flat list of floats, or a matrix read row by row.
pub fn read_floats(arg: &str) -> Result<Vec<f64>, CliError> {
    let v = read_json(arg)?;
    match &v {
        Value::Array(items) if items.iter().all(|x| !x.is_array()) => items
            .iter()
            .enumerate()
            .map(|(i, x)| Ok(tnnball_core::io::scalar_from_value::<f64>(x, &format!("point[{i}]"))?))
            .collect(),
        _ => Ok(matrix_value::<f64>(&v)?.data().to_vec()),
    }
}

pub fn read_network<T: Scalar>(arg: &str) -> Result<tnnball_core::electrical::ResistorNetwork<T>, CliError> {
    Ok(network_from_json(&read_json(arg)?)?)
}

/// A comma-separated list of floats such as `-1,0,0.5`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number {x:?} in {s:?}")))
        })
        .collect()
}

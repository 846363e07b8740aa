//! `--config` files: a JSON object keyed by long flag names, overriding the command line.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{input, read_file, CliResult};

pub fn apply<T: Serialize + DeserializeOwned>(args: T, config: Option<&str>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(args);
    };
    let text = read_file(path)?;
    let over: Value = serde_json::from_str(&text)
        .map_err(|e| input(format!("{path}: line {} column {}: {e}", e.line(), e.column())))?;
    let Value::Object(over) = over else {
        return Err(input(format!("{path}: config must be a JSON object")));
    };
    let Value::Object(mut map) = serde_json::to_value(&args).map_err(|e| input(e.to_string()))? else {
        unreachable!("argument structs serialize to objects")
    };
    for (key, value) in over {
        if !map.contains_key(&key) {
            let mut known: Vec<&String> = map.keys().collect();
            known.sort();
            let known: Vec<&str> = known.iter().map(|s| s.as_str()).collect();
            return Err(input(format!(
                "{path}: unknown key '{key}', expected one of {}",
                known.join(", ")
            )));
        }
        map.insert(key, value);
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| input(format!("{path}: {e}")))
}

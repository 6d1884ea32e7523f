use serde_json::Value;

use crate::error::{Error, Result};

/// The published report schema.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Checks `doc` against the subset of JSON Schema the report schema uses:
/// `type`, `enum`, `required`, `properties`, `additionalProperties: false`
/// and `items`.
pub fn validate(schema: &Value, doc: &Value) -> Result<()> {
    check(schema, doc, "$")
}

pub fn validate_report(doc: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA)?;
    validate(&schema, doc)
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

fn fail(path: &str, msg: String) -> Error {
    Error::Format(format!("{path}: {msg}"))
}

fn check(schema: &Value, doc: &Value, path: &str) -> Result<()> {
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_matches(s, doc),
            Value::Array(list) => list.iter().filter_map(Value::as_str).any(|s| type_matches(s, doc)),
            _ => return Err(fail(path, "malformed type keyword".into())),
        };
        if !ok {
            return Err(fail(path, format!("expected type {t}, found {doc}")));
        }
    }
    if let Some(Value::Array(allowed)) = schema.get("enum") {
        if !allowed.contains(doc) {
            return Err(fail(path, format!("{doc} is not one of {allowed:?}")));
        }
    }
    if let Value::Object(map) = doc {
        if let Some(Value::Array(req)) = schema.get("required") {
            for key in req.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    return Err(fail(path, format!("missing required key {key:?}")));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, v) in map {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => check(sub, v, &format!("{path}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(fail(path, format!("unexpected key {key:?}")));
                }
                None => {}
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (doc, schema.get("items")) {
        for (i, v) in items.iter().enumerate() {
            check(sub, v, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn schema_parses_and_rejects() {
        let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        let s = json!({"type": "object", "required": ["a"], "additionalProperties": false,
            "properties": {"a": {"type": ["number", "null"]}, "b": {"type": "array", "items": {"enum": [1, 2]}}}});
        assert!(validate(&s, &json!({"a": 1.5, "b": [1, 2, 1]})).is_ok());
        assert!(validate(&s, &json!({"a": null})).is_ok());
        assert!(validate(&s, &json!({"b": []})).is_err());
        assert!(validate(&s, &json!({"a": "x"})).is_err());
        assert!(validate(&s, &json!({"a": 1, "c": 0})).is_err());
        let err = validate(&s, &json!({"a": 1, "b": [3]})).unwrap_err().to_string();
        assert!(err.contains("$.b[0]"), "{err}");
        assert!(validate(&schema, &json!({})).is_err());
    }
}

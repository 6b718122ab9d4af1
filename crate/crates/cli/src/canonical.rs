//! Canonical JSON: keys sorted, two-space indent, shortest round-trip floats,
//! trailing newline.

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(value_to_string(&v))
}

pub fn value_to_string(v: &Value) -> String {
    // serde_json's map is a BTreeMap unless `preserve_order` is enabled, so
    // sorting is re-done here to be independent of that feature.
    let mut out = serde_json::to_string_pretty(&sorted(v)).expect("a Value always serializes");
    out.push('\n');
    out
}

fn sorted(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = serde_json::Map::new();
            for k in keys {
                out.insert(k.clone(), sorted(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(sorted).collect()),
        other => other.clone(),
    }
}

/// Shortest round-trip text for a float; non-finite values as `inf`, `-inf`, `nan`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        serde_json::Number::from_f64(x).expect("finite").to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_short() {
        let v = json!({"b": 0.1, "a": [1e-300, 2.0], "c": {"z": 1, "y": 2}});
        let s = value_to_string(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"y\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(s.contains("1e-300") && s.contains("0.1") && s.ends_with("}\n"));
    }

    #[test]
    fn float_text() {
        assert_eq!(float(0.1), "0.1");
        assert_eq!(float(f64::INFINITY), "inf");
        assert_eq!(float(2.0), "2.0");
        assert_eq!(float(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}

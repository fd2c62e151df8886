use serde_json::{Map, Value};

pub const SCHEMA: u64 = 1;
const SIG_DIGITS: usize = 9;

/// Rounds to nine significant digits.
pub fn sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in the tree, except under the keys in `exact`.
pub fn round_floats(v: &mut Value, exact: &[&str]) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|i| round_floats(i, exact)),
        Value::Object(map) => {
            for (k, item) in map.iter_mut() {
                if !exact.contains(&k.as_str()) {
                    round_floats(item, exact);
                }
            }
        }
        _ => {}
    }
}

/// A JSON report: `{"schema": 1, "task": …}` followed by the body fields.
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(task: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), SCHEMA.into());
        fields.insert("task".into(), task.into());
        Report { fields }
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.insert(key.into(), v);
        self
    }

    pub fn merge(&mut self, value: impl serde::Serialize) -> &mut Self {
        if let Value::Object(map) = serde_json::to_value(value).expect("report values serialize") {
            self.fields.extend(map);
        }
        self
    }

    /// Pretty JSON. Channel parameters keep full precision so that they
    /// re-parse to the same channel.
    pub fn to_json(&self) -> String {
        let mut v = Value::Object(self.fields.clone());
        round_floats(&mut v, &["channel"]);
        let mut s = serde_json::to_string_pretty(&v).expect("json");
        s.push('\n');
        s
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// CSV rendering of a float: nine significant digits, exponent form for
/// very small or large magnitudes.
pub fn num(x: f64) -> String {
    let r = sig(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig(0.32192809488736235), 0.321928095);
        assert_eq!(sig(-1234.567891234), -1234.56789);
        assert_eq!(sig(0.0), 0.0);
        assert_eq!(num(1.0), "1");
        assert_eq!(num(6.123233995736766e-17), "6.123234e-17");
        assert_eq!(num(-0.25), "-0.25");
    }

    #[test]
    fn channel_is_exempt_from_rounding() {
        let mut r = Report::new("t");
        let x = 2f64.sqrt().recip() + 1e-12;
        r.set("channel", serde_json::json!({"lambda": [x]}));
        r.set("value", x);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["channel"]["lambda"][0].as_f64().unwrap(), x);
        assert_eq!(v["value"].as_f64().unwrap(), sig(x));
        assert_eq!(v["value"].to_string(), "0.707106781");
        assert_eq!(v["schema"], 1);
    }
}

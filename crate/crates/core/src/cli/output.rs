//! Output envelope shared by all commands.
//!
//! JSON is the full record. CSV is the projection of `rows` onto
//! `columns`, always with a header line. Floats carry 17 significant
//! digits in both.

use num_complex::Complex64;
use serde_json::{Map, Value};

use super::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format!("{x:.16e}").parse().expect("formatted float is a JSON number"))
    } else {
        Value::String(x.to_string())
    }
}

pub fn cnum(z: Complex64) -> Value {
    obj([("re", num(z.re)), ("im", num(z.im))])
}

pub fn obj<K: Into<String>, I: IntoIterator<Item = (K, Value)>>(items: I) -> Value {
    Value::Object(items.into_iter().map(|(k, v)| (k.into(), v)).collect())
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Map<String, Value>>,
    pub summary: Option<Value>,
}

impl Envelope {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Envelope {
            command: command.into(),
            parameters: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: None,
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.parameters.insert(key.into(), value);
    }

    /// Appends a row; its keys must be exactly `columns`, in order.
    pub fn row<I: IntoIterator<Item = (String, Value)>>(&mut self, items: I) {
        let row: Map<String, Value> = items.into_iter().collect();
        debug_assert!(row.keys().eq(self.columns.iter()), "row keys {:?} vs {:?}", row.keys().collect::<Vec<_>>(), self.columns);
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("command".into(), Value::String(self.command.clone()));
                top.insert("version".into(), Value::String(VERSION.into()));
                top.insert("format".into(), Value::String("json".into()));
                top.insert("parameters".into(), Value::Object(self.parameters.clone()));
                top.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
                if let Some(s) = &self.summary {
                    top.insert("summary".into(), s.clone());
                }
                serde_json::to_string_pretty(&Value::Object(top)).expect("envelope serializes") + "\n"
            }
            Format::Csv => {
                let mut out = self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
                out.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = self.columns.iter().map(|c| csv_value(row.get(c).unwrap_or(&Value::Null))).collect();
                    out.push_str(&line.join(","));
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => csv_field(s),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => csv_field(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(-2.0).to_string(), "-2.0000000000000000e+0");
        assert_eq!(num(f64::NAN), Value::String("NaN".into()));
        let back: f64 = num(std::f64::consts::PI).to_string().parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_projection() {
        let mut e = Envelope::new("t", &["a", "b"]);
        e.row([("a".to_string(), num(1.0)), ("b".to_string(), Value::String("x,y".into()))]);
        assert_eq!(e.render(Format::Csv), "a,b\n1.0000000000000000e+0,\"x,y\"\n");
        let empty = Envelope::new("t", &["a"]);
        assert_eq!(empty.render(Format::Csv), "a\n");
        let json: Value = serde_json::from_str(&e.render(Format::Json)).unwrap();
        assert_eq!(json["command"], "t");
        assert_eq!(json["rows"][0]["b"], "x,y");
    }
}

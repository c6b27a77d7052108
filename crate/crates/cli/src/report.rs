//! Key-sorted JSON run reports.
//!
//! Floats are rounded to 12 significant digits so reports diff cleanly and
//! reruns with the same seed are byte-identical. Wall-clock timings live in
//! their own `timing` object, outside `metrics`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub subcommand: String,
    pub seed: u64,
    pub config: Value,
    pub metrics: BTreeMap<String, Value>,
    /// Structured output that is not a single number (sweeps, probe curves).
    pub details: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    pub timing: BTreeMap<String, f64>,
}

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn round12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    Number::from_f64(r).map_or(Value::Null, Value::Number)
}

/// Applies [`round12`] to every float in a JSON tree and sorts object keys.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round12(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(obj) => {
            let sorted: BTreeMap<String, Value> = obj.into_iter().map(|(k, v)| (k, normalize(v))).collect();
            Value::Object(sorted.into_iter().collect::<Map<String, Value>>())
        }
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    normalize(serde_json::to_value(v).expect("report values serialize"))
}

impl RunReport {
    pub fn new(subcommand: &str, seed: u64, config: &impl Serialize) -> Self {
        Self { subcommand: subcommand.to_string(), seed, config: to_value(config), ..Default::default() }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), round12(value));
    }

    pub fn count(&mut self, name: &str, value: usize) {
        self.metrics.insert(name.to_string(), Value::from(value as u64));
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.metrics.insert(name.to_string(), Value::Bool(value));
    }

    pub fn detail(&mut self, name: &str, value: &impl Serialize) {
        self.details.insert(name.to_string(), to_value(value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn time(&mut self, name: &str, ms: f64) {
        self.timing.insert(name.to_string(), ms);
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("subcommand".into(), Value::from(self.subcommand.clone()));
        obj.insert("seed".into(), Value::from(self.seed));
        obj.insert("config".into(), self.config.clone());
        obj.insert("metrics".into(), Value::Object(self.metrics.clone().into_iter().collect()));
        if !self.details.is_empty() {
            obj.insert("details".into(), Value::Object(self.details.clone().into_iter().collect()));
        }
        if !self.notes.is_empty() {
            obj.insert("notes".into(), Value::from(self.notes.clone()));
        }
        let timing: Map<String, Value> = self.timing.iter().map(|(k, v)| (k.clone(), round12(*v))).collect();
        obj.insert("timing".into(), Value::Object(timing));
        normalize(Value::Object(obj))
    }

    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Just the `metrics` object, as written in the full report.
    pub fn metrics_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()["metrics"]).expect("metrics serialize")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_string_pretty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), Value::from(0.3));
        assert_eq!(round12(f64::NAN), Value::Null);
        assert_eq!(round12(123456789.123456789).as_f64(), Some(123456789.123));
    }

    #[test]
    fn keys_sorted() {
        let mut r = RunReport::new("x", 1, &serde_json::json!({"zeta": 1.0, "alpha": 2}));
        r.metric("b", 1.0);
        r.metric("a", 2.0);
        let s = r.to_string_pretty();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"config\"").unwrap() < s.find("\"metrics\"").unwrap());
    }
}

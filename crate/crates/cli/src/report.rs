//! Deterministic JSON reports.
//!
//! Keys are sorted, floats are rounded to 12 significant digits and node
//! indices are 1-based.

use herdkit::{HerdabilityVerdict, RealMatrix, Status};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "herdkit/1";
pub const CONVENTION: &str = "A[i][j] != 0 is an arc from node j to node i; edge (i, j, w) sets A[j][i] = w; node indices are 1-based";

pub fn round(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn num(x: f64) -> Value {
    Value::from(round(x))
}

pub fn vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn matrix(m: &RealMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

pub fn nodes(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|&i| json!(i + 1)).collect())
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub certificate: Option<Vec<f64>>,
    pub witness: Option<Vec<f64>>,
    pub details: Map<String, Value>,
}

impl Report {
    pub fn from_verdict(v: HerdabilityVerdict) -> Self {
        Report { status: v.status, certificate: v.certificate, witness: v.witness, details: Map::new() }
    }

    pub fn detail(mut self, key: &str, value: Value) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    pub fn to_value(&self, command: &str) -> Value {
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(SCHEMA));
        obj.insert("convention".into(), json!(CONVENTION));
        obj.insert("command".into(), json!(command));
        obj.insert("status".into(), json!(self.status.as_str()));
        if let Some(c) = &self.certificate {
            obj.insert("certificate".into(), vector(c));
        }
        if let Some(w) = &self.witness {
            obj.insert("witness".into(), vector(w));
        }
        obj.insert("details".into(), Value::Object(self.details.clone()));
        Value::Object(obj)
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Herdable => 0,
        Status::NotHerdable => 1,
        Status::Unknown => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round(1.0 / 3.0), 0.333333333333);
        assert_eq!(round(-0.0).to_bits(), 0.0f64.to_bits());
        assert_eq!(round(123456789012345.0), 123456789012000.0);
        assert_eq!(round(2.5), 2.5);
    }

    #[test]
    fn keys_are_sorted() {
        let r = Report::from_verdict(HerdabilityVerdict::herdable(vec![1.0]))
            .detail("zeta", json!(1))
            .detail("alpha", json!(2));
        let text = serde_json::to_string(&r.to_value("check")).unwrap();
        let keys = ["certificate", "command", "convention", "details", "schema", "status"];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
    }
}

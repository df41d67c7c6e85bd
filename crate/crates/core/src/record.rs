//! Flat key-value output records.
//!
//! Every estimator result can be rendered as `key = value` lines or as a
//! single-level JSON object.

use crate::changepoint::LrdTestOutcome;
use crate::scalar::Scalar;
use crate::spectral::SpectralEstimate;
use crate::whittle::WhittleFit;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.push(key, Value::Int(v as i64))
    }

    pub fn float<T: Scalar>(&mut self, key: &str, v: T) -> &mut Self {
        self.push(key, Value::Float(v.to_f64().unwrap_or(f64::NAN)))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn fields(&self) -> &[(String, Value)] {
        &self.fields
    }

    pub fn to_kv(&self) -> String {
        self.fields.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::Float(x) if !x.is_finite() => "null".to_string(),
                    Value::Text(s) => json_string(s),
                    other => other.to_string(),
                };
                format!("{}: {}", json_string(k), v)
            })
            .collect();
        format!("{{{}}}", body.join(", "))
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl<T: Scalar> From<&SpectralEstimate<T>> for Record {
    fn from(e: &SpectralEstimate<T>) -> Self {
        let mut r = Record::new();
        r.int("n", e.n)
            .int("m", e.m)
            .float("q_n", e.q_n)
            .float("f0_hat", e.f0_hat)
            .float("lrv_hat", e.lrv_hat)
            .push("path", Value::Text(e.path.as_str().into()));
        r
    }
}

impl<T: Scalar> From<&WhittleFit<T>> for Record {
    fn from(f: &WhittleFit<T>) -> Self {
        let mut r = Record::new();
        r.float("h_hat", f.h_hat)
            .float("objective", f.objective)
            .int("m", f.m)
            .float("lower", f.bounds.0)
            .float("upper", f.bounds.1)
            .float("normalized", f.normalized)
            .int("grid_points", f.grid_points)
            .float("refine_tol", f.refine_tol)
            .push("degenerate", Value::Bool(f.degenerate));
        r
    }
}

impl<T: Scalar> From<&LrdTestOutcome<T>> for Record {
    fn from(o: &LrdTestOutcome<T>) -> Self {
        let mut r = Record::new();
        r.int("n_hat", o.n_hat)
            .float("h_hat_residual", o.h_hat_residual)
            .float("statistic", o.statistic)
            .float("p_value", o.p_value)
            .push("reject", Value::Bool(o.reject))
            .float("alpha", o.alpha)
            .int("m", o.m);
        r
    }
}

//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

/// `{operation, parameters, residuals, verdict, seed, timing_ms, details}`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub operation: String,
    pub parameters: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub seed: Option<u64>,
    pub timing_ms: f64,
    pub details: Value,
}

impl Report {
    pub fn new(operation: &str) -> Self {
        Self {
            operation: operation.to_string(),
            parameters: BTreeMap::new(),
            residuals: BTreeMap::new(),
            verdict: Verdict::Pass,
            seed: None,
            timing_ms: 0.0,
            details: Value::Null,
        }
    }

    pub fn parameter(mut self, name: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("serializable parameter");
        self.parameters.insert(name.to_string(), v);
        self
    }

    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn verdict(mut self, ok: bool) -> Self {
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).expect("serializable details");
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.timing_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// JSON with non-finite residuals written as `"inf"`, `"-inf"` or `"NaN"`.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable report");
        let residuals: serde_json::Map<String, Value> = self
            .residuals
            .iter()
            .map(|(k, &r)| {
                let rv = serde_json::Number::from_f64(r)
                    .map(Value::Number)
                    .unwrap_or_else(|| Value::String(r.to_string()));
                (k.clone(), rv)
            })
            .collect();
        v["residuals"] = Value::Object(residuals);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_shape() {
        let r = Report::new("curl")
            .parameter("g", 2)
            .residual("maxResidual", 1e-3)
            .residual("bad", f64::INFINITY)
            .seed(7)
            .verdict(false);
        let v = r.to_json();
        assert_eq!(v["operation"], "curl");
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["parameters"]["g"], 2);
        assert_eq!(v["residuals"]["bad"], "inf");
        assert!(v["timing_ms"].is_number());
    }
}

//! Machine-readable run reports.

use crate::estimate::{serialize_real, NormEstimate};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indecisive,
}

impl Verdict {
    /// Fail dominates indecisive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Indecisive, _) | (_, Indecisive) => Indecisive,
            _ => Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Indecisive => 2,
        }
    }
}

/// A real number that serializes infinities as strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_real(&self.0, s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub schema: u32,
    pub command: String,
    /// SHA-256 of the canonical JSON of the inputs.
    pub inputs_digest: String,
    pub seed: u64,
    pub estimates: BTreeMap<String, NormEstimate>,
    pub residuals: BTreeMap<String, Real>,
    pub verdict: Verdict,
    pub wall_time: f64,
}

impl ReportRecord {
    pub fn new(command: &str, inputs: &serde_json::Value, seed: u64) -> Self {
        let canonical = serde_json::to_string(inputs).unwrap_or_default();
        let digest = hex::encode(Sha256::digest(canonical.as_bytes()));
        Self {
            schema: 1,
            command: command.to_string(),
            inputs_digest: digest,
            seed,
            estimates: BTreeMap::new(),
            residuals: BTreeMap::new(),
            verdict: Verdict::Pass,
            wall_time: 0.0,
        }
    }

    pub fn estimate(&mut self, name: impl Into<String>, e: NormEstimate) {
        self.estimates.insert(name.into(), e);
    }

    pub fn residual(&mut self, name: impl Into<String>, v: f64) {
        self.residuals.insert(name.into(), Real(v));
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdict = self.verdict.combine(v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per estimate: name, lower, upper, certificate, method.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,lower,upper,certificate,method\n");
        for (name, e) in &self.estimates {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(name),
                fmt_real(e.lower),
                fmt_real(e.upper),
                e.upper_certificate.as_str(),
                csv_field(&e.method)
            ));
        }
        out
    }
}

fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

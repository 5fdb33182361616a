use hyperlevel::check::CheckReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Display;

/// How a [`CheckReport`] margin is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// `value >= -tolerance`.
    Inequality,
    /// `|value| <= tolerance`.
    Equality,
}

/// One line of the report. `margin` is signed so that
/// `pass ⇔ margin >= -tolerance` for both readings: equalities store
/// `-|value|`. A check that could not be evaluated has no margin and fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub id: String,
    pub tag: String,
    pub inputs_digest: String,
    pub margin: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// SHA-256 of the canonical JSON encoding (object keys sorted).
pub fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl VerificationRecord {
    pub fn from_check(id: String, tag: &str, reading: Reading, report: &CheckReport, inputs: &Value) -> Self {
        let m = report.margin;
        let signed = match reading {
            Reading::Inequality => m.value,
            Reading::Equality => -m.value.abs(),
        };
        let tolerance = m.tolerance();
        let pass = signed.is_finite() && signed >= -tolerance;
        debug_assert_eq!(pass, report.pass, "reading disagrees with the checker for {id}");
        Self {
            id,
            tag: tag.to_string(),
            inputs_digest: digest(inputs),
            margin: signed.is_finite().then_some(signed),
            tolerance,
            pass,
            notes: report.notes.clone(),
        }
    }

    pub fn from_error(id: String, tag: &str, inputs: &Value, err: &dyn Display) -> Self {
        Self {
            id,
            tag: tag.to_string(),
            inputs_digest: digest(inputs),
            margin: None,
            tolerance: 0.0,
            pass: false,
            notes: vec![format!("error: {err}")],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperlevel::check::Margin;
    use serde_json::json;

    #[test]
    fn digest_ignores_key_order() {
        let a = json!({"a": 1, "b": [1.5, 2.0]});
        let b: Value = serde_json::from_str(r#"{"b": [1.5, 2.0], "a": 1}"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
        assert_ne!(digest(&a), digest(&json!({"a": 2, "b": [1.5, 2.0]})));
    }

    #[test]
    fn pass_iff_margin_within_tolerance() {
        let inputs = json!({});
        let eq = CheckReport::equality("e", Margin::new(-0.02, 0.01, 1.0));
        let r = VerificationRecord::from_check("e".into(), "t", Reading::Equality, &eq, &inputs);
        assert_eq!(r.margin, Some(-0.02));
        assert!(r.pass);
        let ineq = CheckReport::inequality("i", Margin::new(-0.05, 0.01, 1.0));
        let r = VerificationRecord::from_check("i".into(), "t", Reading::Inequality, &ineq, &inputs);
        assert!(!r.pass && r.margin.unwrap() < -r.tolerance);
        let nan = CheckReport::inequality("n", Margin::exact(f64::NAN, 1.0));
        let r = VerificationRecord::from_check("n".into(), "t", Reading::Inequality, &nan, &inputs);
        assert!(!r.pass && r.margin.is_none());
    }
}

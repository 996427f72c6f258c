//! Per-check verdicts with re-checkable counterexamples.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotCheckable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl PropertyReport {
    pub fn holds(property: impl Into<String>, cases: usize) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::Holds,
            cases,
            counterexample: None,
            note: None,
        }
    }

    pub fn fails(property: impl Into<String>, cases: usize, counterexample: Value) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::Fails,
            cases,
            counterexample: Some(counterexample),
            note: None,
        }
    }

    pub fn not_checkable(property: impl Into<String>, note: impl Into<String>) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::NotCheckable,
            cases: 0,
            counterexample: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Accumulates cases for one property and keeps the first counterexample.
#[derive(Debug, Clone)]
pub struct Tally {
    property: String,
    cases: usize,
    counterexample: Option<Value>,
    unknown: usize,
}

impl Tally {
    pub fn new(property: impl Into<String>) -> Self {
        Tally {
            property: property.into(),
            cases: 0,
            counterexample: None,
            unknown: 0,
        }
    }

    pub fn pass(&mut self) {
        self.cases += 1;
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    pub fn unknown(&mut self) {
        self.cases += 1;
        self.unknown += 1;
    }

    pub fn failed(&self) -> bool {
        self.counterexample.is_some()
    }

    pub fn finish(self) -> PropertyReport {
        match self.counterexample {
            Some(c) => PropertyReport::fails(self.property, self.cases, c),
            None if self.unknown > 0 => PropertyReport {
                property: self.property,
                verdict: Verdict::Unknown,
                cases: self.cases,
                counterexample: None,
                note: Some(format!("{} cases inconclusive at bound", self.unknown)),
            },
            None => PropertyReport::holds(self.property, self.cases),
        }
    }
}

/// Hex SHA-256 of the JSON serialization; used to compare payloads across runs.
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable payload");
    hex::encode(Sha256::digest(&bytes))
}

pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable payload")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_first_counterexample() {
        let mut t = Tally::new("p");
        t.record(true, || Value::Null);
        t.record(false, || Value::from(1));
        t.record(false, || Value::from(2));
        let r = t.finish();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.cases, 3);
        assert_eq!(r.counterexample, Some(Value::from(1)));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&vec![1, 2]), digest(&vec![1, 2]));
        assert_ne!(digest(&vec![1, 2]), digest(&vec![2, 1]));
    }
}

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named check. A failing check always carries a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Self { name: name.into(), pass: true, witness: None, counts: BTreeMap::new(), note: None }
    }

    pub fn fail(name: impl Into<String>, witness: Value) -> Self {
        Self { name: name.into(), pass: false, witness: Some(witness), counts: BTreeMap::new(), note: None }
    }

    /// Passes when `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, witness: Option<Value>) -> Self {
        match witness {
            None => Self::pass(name),
            Some(w) => Self::fail(name, w),
        }
    }

    pub fn expect_eq<T: PartialEq + Serialize>(name: impl Into<String>, got: T, want: T) -> Self {
        if got == want {
            Self::pass(name)
        } else {
            Self::fail(name, serde_json::json!({ "got": got, "expected": want }))
        }
    }

    pub fn count(mut self, key: &str, value: impl TryInto<u64>) -> Self {
        self.counts.insert(key.to_string(), value.try_into().unwrap_or(u64::MAX));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub facts: BTreeMap<String, Value>,
    /// Wall-clock time; never serialized so reports stay byte-identical.
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self { subject: subject.into(), ..Self::default() }
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn fact(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.facts.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.facts {
            self.facts.insert(format!("{prefix}.{k}"), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_checks_carry_witnesses() {
        let c = Check::expect_eq("size", 3, 4);
        assert!(!c.pass);
        assert!(c.witness.is_some());
        let mut r = VerificationReport::new("x");
        r.push(Check::pass("a").count("n", 5usize));
        assert!(r.passed());
        r.push(c);
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn timing_is_not_serialized() {
        let mut a = VerificationReport::new("s");
        a.push(Check::pass("p"));
        let mut b = a.clone();
        a.elapsed = Some(Duration::from_millis(3));
        b.elapsed = Some(Duration::from_millis(90));
        assert_eq!(a.to_json(), b.to_json());
        let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back.checks, a.checks);
    }
}

//! Named weight-sequence families.
//!
//! Every family implements [`WeightFamily`] and is registered under a name in a
//! [`FamilyRegistry`]. The CLI and the sequence-spec documents select a family
//! by that name at runtime; downstream code only ever sees `dyn WeightFamily`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LogSequence, SequenceError};

/// A weight sequence `M_n` with `M_0 = 1`, queried by index in log domain.
pub trait WeightFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// `ln M_n`, or `None` when the family cannot answer at `n`.
    fn log_weight(&self, n: usize) -> Option<f64>;

    /// Whether the class is quasi-analytic, when that is known in closed form.
    fn quasianalytic(&self) -> Option<bool> {
        None
    }

    /// The prefix `ln M_0, ..., ln M_{n_max}`.
    fn prefix(&self, n_max: usize) -> Result<LogSequence, SequenceError> {
        let logs = (0..=n_max)
            .map(|n| {
                self.log_weight(n).ok_or_else(|| SequenceError::OutOfDomain {
                    family: self.name().to_string(),
                    index: n,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut seq = LogSequence::new(logs)?;
        seq.closed_form_verdict = self.quasianalytic();
        Ok(seq)
    }
}

/// `M_n = n^{ns}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gevrey {
    s: f64,
}

impl Gevrey {
    pub fn new(s: f64) -> Result<Self, SequenceError> {
        if !s.is_finite() || s < 1.0 {
            return Err(SequenceError::InvalidParameter(format!(
                "gevrey order s must be a finite number >= 1, got {s}"
            )));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl WeightFamily for Gevrey {
    fn name(&self) -> &str {
        "gevrey"
    }

    fn log_weight(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return Some(0.0);
        }
        let n = n as f64;
        Some(n * self.s * n.ln())
    }

    fn quasianalytic(&self) -> Option<bool> {
        // sum of 1/m_n behaves like sum n^{-s}
        Some(self.s == 1.0)
    }
}

/// `M_0 = M_1 = 1`, `M_n = (n ln n)^n` for `n >= 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NLogN;

impl WeightFamily for NLogN {
    fn name(&self) -> &str {
        "nlogn"
    }

    fn log_weight(&self, n: usize) -> Option<f64> {
        if n < 2 {
            return Some(0.0);
        }
        let n = n as f64;
        Some(n * (n * n.ln()).ln())
    }

    fn quasianalytic(&self) -> Option<bool> {
        Some(true)
    }
}

/// `M_n = base^n`. Bounded `M_n^{1/n}`: no counterexample construction can
/// succeed on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    log_base: f64,
}

impl Geometric {
    pub fn new(base: f64) -> Result<Self, SequenceError> {
        if !base.is_finite() || base <= 0.0 {
            return Err(SequenceError::InvalidParameter(format!(
                "geometric base must be a positive finite number, got {base}"
            )));
        }
        Ok(Self { log_base: base.ln() })
    }
}

impl WeightFamily for Geometric {
    fn name(&self) -> &str {
        "geometric"
    }

    fn log_weight(&self, n: usize) -> Option<f64> {
        Some(n as f64 * self.log_base)
    }

    fn quasianalytic(&self) -> Option<bool> {
        Some(true)
    }
}

/// `M_n = exp(lambda (2^n - 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublyExponential {
    lambda: f64,
}

impl DoublyExponential {
    pub fn new(lambda: f64) -> Result<Self, SequenceError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(SequenceError::InvalidParameter(format!(
                "doubly-exponential lambda must be a positive finite number, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }
}

impl WeightFamily for DoublyExponential {
    fn name(&self) -> &str {
        "doubly-exponential"
    }

    fn log_weight(&self, n: usize) -> Option<f64> {
        let v = self.lambda * ((n as f64).exp2() - 1.0);
        v.is_finite().then_some(v)
    }

    fn quasianalytic(&self) -> Option<bool> {
        Some(false)
    }
}

/// A finite table of logs, normalized so that the first entry is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Explicit {
    logs: Vec<f64>,
}

impl Explicit {
    pub fn new(logs: Vec<f64>) -> Result<Self, SequenceError> {
        if logs.is_empty() {
            return Err(SequenceError::TooShort { n_max: 0 });
        }
        if let Some(index) = logs.iter().position(|v| !v.is_finite()) {
            return Err(SequenceError::NonFinite { index });
        }
        let shift = logs[0];
        Ok(Self {
            logs: logs.into_iter().map(|v| v - shift).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }
}

impl WeightFamily for Explicit {
    fn name(&self) -> &str {
        "explicit"
    }

    fn log_weight(&self, n: usize) -> Option<f64> {
        self.logs.get(n).copied()
    }
}

/// The structured description of a family: its registered name plus whatever
/// parameters that family reads.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logs: Option<Vec<f64>>,
}

impl FamilySpec {
    pub fn named(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            ..Self::default()
        }
    }

    pub fn gevrey(s: f64) -> Self {
        Self {
            s: Some(s),
            ..Self::named("gevrey")
        }
    }

    pub fn explicit(logs: Vec<f64>) -> Self {
        Self {
            logs: Some(logs),
            ..Self::named("explicit")
        }
    }
}

/// A sequence-spec document: a family plus the prefix length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    /// Optional for explicit sequences, where it defaults to the table length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

impl SequenceSpec {
    pub fn build(&self, registry: &FamilyRegistry) -> Result<LogSequence, SequenceError> {
        let family = registry.resolve(&self.family)?;
        let n_max = match (self.n_max, &self.family.logs) {
            (Some(n), _) => n,
            (None, Some(logs)) => logs.len().saturating_sub(1),
            (None, None) => {
                return Err(SequenceError::InvalidParameter(format!(
                    "family '{}' needs n_max",
                    self.family.kind
                )))
            }
        };
        family.prefix(n_max)
    }
}

type Constructor = fn(&FamilySpec) -> Result<Box<dyn WeightFamily>, SequenceError>;

/// Name → constructor table for weight families.
#[derive(Clone, Default)]
pub struct FamilyRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl fmt::Debug for FamilyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.keys()).finish()
    }
}

fn require(spec: &FamilySpec, value: Option<f64>, field: &str) -> Result<f64, SequenceError> {
    value.ok_or_else(|| {
        SequenceError::InvalidParameter(format!("family '{}' requires '{field}'", spec.kind))
    })
}

impl FamilyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// gevrey, power-n, nlogn, geometric, doubly-exponential, explicit.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register("gevrey", |spec| {
            Ok(Box::new(Gevrey::new(require(spec, spec.s, "s")?)?))
        });
        r.register("power-n", |_| Ok(Box::new(Gevrey::new(1.0)?)));
        r.register("nlogn", |_| Ok(Box::new(NLogN)));
        r.register("geometric", |spec| {
            Ok(Box::new(Geometric::new(require(spec, spec.base, "base")?)?))
        });
        r.register("doubly-exponential", |spec| {
            Ok(Box::new(DoublyExponential::new(require(
                spec,
                spec.lambda,
                "lambda",
            )?)?))
        });
        r.register("explicit", |spec| {
            let logs = spec.logs.clone().ok_or_else(|| {
                SequenceError::InvalidParameter("family 'explicit' requires 'logs'".into())
            })?;
            Ok(Box::new(Explicit::new(logs)?))
        });
        r
    }

    pub fn register(&mut self, name: &str, constructor: Constructor) {
        self.entries.insert(name.to_string(), constructor);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn resolve(&self, spec: &FamilySpec) -> Result<Box<dyn WeightFamily>, SequenceError> {
        let ctor = self
            .entries
            .get(&spec.kind)
            .ok_or_else(|| SequenceError::UnknownFamily(spec.kind.clone()))?;
        ctor(spec)
    }
}

/// Build the prefix `0..=n_max` of the family described by `spec`, resolved
/// through the standard registry.
pub fn build_sequence(spec: &FamilySpec, n_max: usize) -> Result<LogSequence, SequenceError> {
    FamilyRegistry::standard().resolve(spec)?.prefix(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_one_values() {
        let seq = build_sequence(&FamilySpec::gevrey(1.0), 3).unwrap();
        assert_eq!(seq.logs()[0], 0.0);
        assert!((seq.logs()[3] - 27f64.ln()).abs() < 1e-14);
        assert!((seq.logs()[3] - 3.29584).abs() < 1e-5);
    }

    #[test]
    fn nlogn_values() {
        let seq = build_sequence(&FamilySpec::named("nlogn"), 2).unwrap();
        assert_eq!(&seq.logs()[..2], &[0.0, 0.0]);
        // 2 ln(2 ln 2)
        assert!((seq.logs()[2] - 0.653_268_519_956_561_9).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_gevrey_order() {
        let err = build_sequence(&FamilySpec::gevrey(0.5), 4).unwrap_err();
        assert!(matches!(err, SequenceError::InvalidParameter(_)));
    }

    #[test]
    fn rejects_non_finite_explicit_entries() {
        let err = build_sequence(&FamilySpec::explicit(vec![0.0, f64::NAN, 1.0]), 2).unwrap_err();
        assert_eq!(err, SequenceError::NonFinite { index: 1 });
    }

    #[test]
    fn explicit_is_normalized_and_truncated() {
        let seq = build_sequence(&FamilySpec::explicit(vec![1.0, 2.0, 4.0, 7.0]), 2).unwrap();
        assert_eq!(seq.logs(), &[0.0, 1.0, 3.0]);
        let err = build_sequence(&FamilySpec::explicit(vec![0.0, 1.0, 3.0]), 5).unwrap_err();
        assert!(matches!(err, SequenceError::OutOfDomain { index: 3, .. }));
    }

    #[test]
    fn unknown_family_is_reported() {
        let err = build_sequence(&FamilySpec::named("nope"), 4).unwrap_err();
        assert_eq!(err, SequenceError::UnknownFamily("nope".into()));
    }

    #[test]
    fn power_n_is_gevrey_one() {
        let a = build_sequence(&FamilySpec::named("power-n"), 10).unwrap();
        let b = build_sequence(&FamilySpec::gevrey(1.0), 10).unwrap();
        assert_eq!(a.logs(), b.logs());
    }

    #[test]
    fn spec_document_defaults_n_max_for_explicit() {
        let spec = SequenceSpec {
            family: FamilySpec::explicit(vec![0.0, 0.5, 1.5, 3.0]),
            n_max: None,
        };
        let seq = spec.build(&FamilyRegistry::standard()).unwrap();
        assert_eq!(seq.n_max(), 3);
        let spec = SequenceSpec {
            family: FamilySpec::named("nlogn"),
            n_max: None,
        };
        assert!(spec.build(&FamilyRegistry::standard()).is_err());
    }

    #[test]
    fn custom_family_can_be_registered() {
        let mut registry = FamilyRegistry::new();
        registry.register("quadratic", |_| {
            Ok(Box::new(Explicit::new((0..50).map(|n| (n * n) as f64).collect())?))
        });
        let family = registry.resolve(&FamilySpec::named("quadratic")).unwrap();
        assert_eq!(family.log_weight(7), Some(49.0));
        assert_eq!(registry.names().collect::<Vec<_>>(), vec!["quadratic"]);
    }
}

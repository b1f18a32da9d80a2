use denjoy_core::certify::CertifyError;
use denjoy_core::counterexample::CounterexampleError;
use denjoy_core::extremal::ExtremalError;
use denjoy_core::gorny::GornyError;
use denjoy_core::quasianalytic::PropagationError;
use denjoy_core::sequences::SequenceError;
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable input, invalid parameters.
    Usage(String),
    /// A hypothesis or verification did not hold. Carries the failing report.
    Failed { message: String, report: Value },
    /// Numeric range or search budget exhausted.
    Range(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Failed { .. } => 2,
            Self::Range(_) => 3,
        }
    }

    pub fn to_diagnostic(&self) -> String {
        let v = match self {
            Self::Usage(m) => json!({ "error": "usage", "message": m }),
            Self::Failed { message, report } => {
                json!({ "error": "verification", "message": message, "report": report })
            }
            Self::Range(m) => json!({ "error": "range", "message": m }),
        };
        v.to_string()
    }

    pub fn failed(message: impl Into<String>, report: Value) -> Self {
        Self::Failed {
            message: message.into(),
            report,
        }
    }
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        match e {
            SequenceError::OutOfDomain { .. } => Self::Range(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Hypothesis(ref report) => {
                let value = serde_json::to_value(report).unwrap_or(Value::Null);
                Self::failed(e.to_string(), value)
            }
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<CounterexampleError> for CliError {
    fn from(e: CounterexampleError) -> Self {
        match e {
            CounterexampleError::InvalidParameter(_) => Self::Usage(e.to_string()),
            CounterexampleError::Sequence(inner) => inner.into(),
            _ => Self::Range(e.to_string()),
        }
    }
}

impl From<ExtremalError> for CliError {
    fn from(e: ExtremalError) -> Self {
        match e {
            ExtremalError::NotLogConvex(_) => Self::failed(e.to_string(), Value::Null),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<GornyError> for CliError {
    fn from(e: GornyError) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<PropagationError> for CliError {
    fn from(e: PropagationError) -> Self {
        Self::Usage(e.to_string())
    }
}

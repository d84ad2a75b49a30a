//! Exit codes and machine-readable failure diagnostics.

use serde::Serialize;
use serde_json::{json, Value};

use shapeinv_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitCode {
    Ok = 0,
    Usage = 1,
    Pole = 2,
    Tolerance = 3,
    Normalizability = 4,
    VerifyFail = 5,
    Truncation = 6,
}

impl ExitCode {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit: ExitCode,
    pub kind: &'static str,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn new(exit: ExitCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self { exit, kind, message: message.into(), details: Value::Null }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Usage, "usage", message)
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self::new(ExitCode::Usage, "io", format!("{}: {e}", path.display()))
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = message.into();
        self
    }

    pub fn from_core(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Pole { x } => Self::new(ExitCode::Pole, "pole", message).with_details(json!({ "poles": [x] })),
            Error::NonFinite(_) => Self::new(ExitCode::Pole, "non_finite", message),
            Error::NotNormalizable { m, end } => Self::new(ExitCode::Normalizability, "not_normalizable", message)
                .with_details(json!({ "m": m, "divergent_end": end })),
            Error::OrbitViolation { step, m, .. } => {
                Self::new(ExitCode::Truncation, "truncation", message).with_details(json!({ "step": step, "m": m }))
            }
            Error::GridTooCoarse { ratio, limit } => {
                Self::new(ExitCode::Usage, "grid_too_coarse", message).with_details(json!({ "ratio": ratio, "limit": limit }))
            }
            Error::Hypothesis(_) => Self::new(ExitCode::VerifyFail, "hypothesis", message),
            Error::Verification(_) => Self::new(ExitCode::VerifyFail, "verification", message),
            Error::InvalidParameter(_) | Error::ZeroParameter => {
                Self::new(ExitCode::Usage, "invalid_parameter", message)
            }
            Error::NoConvergence => Self::new(ExitCode::Usage, "no_convergence", message),
        }
    }

    /// The JSON document written to standard error.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": self.kind,
            "exit_code": self.exit.code(),
            "message": self.message,
        });
        if !self.details.is_null() {
            v["details"] = self.details.clone();
        }
        v
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shapeinv_core::DivergentEnd;

    #[test]
    fn core_errors_map_to_stable_codes() {
        let cases = [
            (Error::Pole { x: 0.0 }, 2),
            (Error::NotNormalizable { m: 2.0, end: DivergentEnd::Both }, 4),
            (Error::OrbitViolation { step: 1, m: 0.0, reason: "r".into() }, 6),
            (Error::Verification("v".into()), 5),
            (Error::InvalidParameter("p".into()), 1),
        ];
        for (e, code) in cases {
            assert_eq!(CliError::from_core(e).exit.code(), code);
        }
    }

    #[test]
    fn diagnostics_are_json() {
        let e = CliError::from_core(Error::Pole { x: 0.5 });
        let v = e.to_json();
        assert_eq!(v["exit_code"], 2);
        assert_eq!(v["details"]["poles"][0], 0.5);
    }
}

//! Uniform pass/fail/not-applicable records for theorem and lemma checkers.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of one checker run. A `Fail` always carries a complete
/// counterexample in `witness`; a `NotApplicable` names the failed
/// hypothesis in `message`.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub statement_id: &'static str,
    pub witness: serde_json::Value,
    pub message: String,
}

impl Verdict {
    pub fn pass(id: &'static str, witness: serde_json::Value, message: impl Into<String>) -> Self {
        Verdict { status: Status::Pass, statement_id: id, witness, message: message.into() }
    }

    pub fn fail(id: &'static str, witness: serde_json::Value, message: impl Into<String>) -> Self {
        Verdict { status: Status::Fail, statement_id: id, witness, message: message.into() }
    }

    pub fn not_applicable(
        id: &'static str,
        witness: serde_json::Value,
        message: impl Into<String>,
    ) -> Self {
        Verdict {
            status: Status::NotApplicable,
            statement_id: id,
            witness,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::NotApplicable => 3,
        }
    }
}

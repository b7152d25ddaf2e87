use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::TOOLKIT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        })
    }
}

/// Machine-readable cause of an `inapplicable` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonCode {
    MessageCorrelatedWithRetainedKey,
    SecurityPreconditionFailed,
    CompletenessPreconditionFailed,
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReasonCode::MessageCorrelatedWithRetainedKey => "message-correlated-with-retained-key",
            ReasonCode::SecurityPreconditionFailed => "security-precondition-failed",
            ReasonCode::CompletenessPreconditionFailed => "completeness-precondition-failed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Security,
    Completeness,
    Theorem1,
    NoProgramming,
}

impl ReportKind {
    /// What the check establishes, for human-readable output.
    pub fn title(self) -> &'static str {
        match self {
            ReportKind::Security => "security: Bob's share at t1 is independent of the plaintext",
            ReportKind::Completeness => "completeness: decryption yields W_c applied to the plaintext",
            ReportKind::Theorem1 => "orthogonality: messages for distinct circuits have orthogonal support",
            ReportKind::NoProgramming => "no-programming: distinct programmed unitaries need orthogonal programs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub metric: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    pub fn new(id: impl Into<String>, metric: f64) -> Self {
        Self {
            id: id.into(),
            metric,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub verdict: Verdict,
    pub worst_metric: f64,
    pub cases: Vec<Case>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<ReasonCode>,
    pub toolkit_version: String,
}

pub type SecurityReport = Report;
pub type CompletenessReport = Report;
pub type OrthogonalityReport = Report;

impl Report {
    /// Cases are sorted by id so output does not depend on evaluation order.
    pub fn new(kind: ReportKind, verdict: Verdict, worst_metric: f64, mut cases: Vec<Case>, tol: f64) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            kind,
            verdict,
            worst_metric,
            cases,
            tolerances: [("tol".to_string(), tol)].into(),
            reason: None,
            toolkit_version: TOOLKIT_VERSION.to_string(),
        }
    }

    /// Pass iff every metric is within `tol`; the worst metric is the max.
    pub fn thresholded(kind: ReportKind, cases: Vec<Case>, tol: f64) -> Self {
        let worst = worst_of(&cases);
        let verdict = if worst <= tol { Verdict::Pass } else { Verdict::Fail };
        Self::new(kind, verdict, worst, cases, tol)
    }

    pub fn inapplicable(kind: ReportKind, reason: ReasonCode, worst_metric: f64, cases: Vec<Case>, tol: f64) -> Self {
        let mut r = Self::new(kind, Verdict::Inapplicable, worst_metric, cases, tol);
        r.reason = Some(reason);
        r
    }
}

pub(crate) fn worst_of(cases: &[Case]) -> f64 {
    cases.iter().map(|c| c.metric).fold(0.0, |a: f64, m| if m.is_nan() { f64::NAN } else { a.max(m) })
}

/// `probe-07` style ids that sort numerically.
pub(crate) fn numbered(prefix: &str, i: usize, total: usize) -> String {
    let width = total.saturating_sub(1).to_string().len().max(2);
    format!("{prefix}-{i:0width$}")
}

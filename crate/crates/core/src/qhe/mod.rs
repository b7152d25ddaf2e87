//! Scheme model, pipeline simulator and the verdict engines.

pub mod audit;
mod checks;
mod pipeline;
pub mod programming;
mod report;
mod scheme;

pub use audit::{audit_dimension, audit_reversible_classical, DimensionAudit};
pub use checks::{
    check_completeness, check_security, check_security_in_basis, check_theorem1, COMPLETENESS_HAAR_SAMPLES,
    DISTINCT_TOL,
};
pub use pipeline::{bob_share_t1, encrypt, run_pipeline, t1_localisation_problem, PipelineTrace};
pub use programming::{check_no_programming, NoProgrammingOutcome, ProgramAnalysis};
pub use report::{
    Case, CompletenessReport, OrthogonalityReport, ReasonCode, Report, ReportKind, SecurityReport, Verdict,
};
pub use scheme::{Evaluation, LocalOp, Ownership, QheScheme, RawScheme, Role};

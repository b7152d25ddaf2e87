//! Numerical toolkit for information localisation and the limits of
//! perfectly secure quantum homomorphic encryption.
//!
//! The crate is layered bottom-up:
//!
//! - [`tensor`]: dense complex matrices, kets, register layouts, Hermitian
//!   eigendecomposition, Schmidt decomposition and Haar sampling.
//! - [`qinfo`]: density operators, entropy, mutual information, supports and
//!   product-state tests.
//! - [`localiser`]: the constructive localisation procedure that turns a
//!   zero-leakage unitary into the local unitary `V` and residual `sigma`.
//! - [`qhe`]: the four-component scheme model, the two-party pipeline and
//!   the verdict engines (security, completeness, orthogonal support,
//!   no-programming, dimension audit).
//! - [`schemes`]: concrete schemes, localisation problems and the catalog.

pub mod config;
pub mod error;
pub mod localiser;
pub mod qhe;
pub mod qinfo;
pub mod schemes;
pub mod tensor;

pub use config::Tolerances;
pub use error::{Error, Result};

/// Version string stamped into every report.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

//! Dense complex linear algebra over small multi-register Hilbert spaces.

mod ket;
mod layout;
mod linalg;
mod matrix;
pub mod random;

pub use ket::{fidelity_pure, Ket};
pub use layout::{partial_trace, Layout, Register};
pub use linalg::{
    column_space, eig_hermitian, is_unitary, orthonormalize, schmidt, trace_distance,
    trace_distance_factored, unitaries_equal_up_to_phase, unitarity_deviation, HermitianEigen,
    Schmidt, COLUMN_SPACE_TOL,
};
pub use matrix::{gates, CMatrix, C64};
pub use random::{derive_seed, random_ket, random_unitary};
pub(crate) use linalg::orthogonal_residual;

#[cfg(test)]
mod props;

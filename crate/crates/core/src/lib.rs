//! Exact solutions of time-dependent decoherence models built on a
//! three-generator Lie algebra, via Lewis–Riesenfeld invariants and the
//! invariant-related unitary transformation.
//!
//! The pipeline for one branch `i` of the measured system:
//!
//! 1. [`protocol`]: coefficients `ω_i(t)`, `θ_i(t)`, `φ_i(t)` of `H_i(t)`.
//! 2. [`auxiliary`]: integrate the invariant parameters `a_i(t)`, `b_i(t)`.
//! 3. [`invariant`]: build `I_i(t)`, the unitary `V_i(t)`, the phases and the
//!    exact solution `e^{−iφ_i} V_i |λ⟩`.
//! 4. [`decoherence`]: `F_{i,j}(t) = ⟨λ|V_i† V_j|λ⟩` for branch pairs.
//!
//! [`oracle`] propagates the Schrödinger equation directly so every
//! invariant-derived quantity can be checked against brute force, and
//! [`cini`] maps the two-mode Cini measurement model onto branches.
//!
//! Everything is generic over [`Real`] (`f32`/`f64`); the aliases below fix
//! the scalar to `f64`.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod auxiliary;
pub mod cini;
pub mod decoherence;
pub mod error;
pub mod grid;
pub mod invariant;
pub mod linalg;
pub mod oracle;
pub mod protocol;
pub mod scalar;

pub use algebra::{build_representation, commutator_residual, expm_skew, Spin};
pub use error::{Error, Result};
pub use scalar::Real;

pub type AlgebraSpec = algebra::AlgebraSpec<f64>;
pub type Representation = algebra::Representation<f64>;
pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type StateVector = linalg::StateVector<f64>;
pub type ScalarFunction = protocol::ScalarFunction<f64>;
pub type Protocol = protocol::Protocol<f64>;
pub type AuxiliaryState = auxiliary::AuxiliaryState<f64>;
pub type AuxiliarySolution = auxiliary::AuxiliarySolution<f64>;
pub type PhaseDecomposition = invariant::PhaseDecomposition<f64>;
pub type DecoherenceSeries = decoherence::DecoherenceSeries<f64>;
pub type Trajectory = oracle::Trajectory<f64>;
pub type CiniModel = cini::CiniModel<f64>;

pub type AlgebraSpec32 = algebra::AlgebraSpec<f32>;
pub type Representation32 = algebra::Representation<f32>;
pub type Protocol32 = protocol::Protocol<f32>;

// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation toolkit for a four-qubit NMR quantum homogeniser.
//!
//! The crate covers the full pipeline:
//!
//! - [`linalg`]: dense complex matrices, a Hermitian eigensolver and the
//!   skew-Hermitian matrix exponential;
//! - [`qstate`]: density matrices, unitaries and Bloch-z readout;
//! - [`homogeniser`]: the partial-swap circuit on a linear chain, its
//!   closed-form marginals and N-reservoir contact chains;
//! - [`spin`]: the four-carbon crotonic-acid spin system, its internal
//!   Hamiltonian and the proton-environment Hamiltonian ensemble;
//! - [`grape`]: phase-only GRAPE pulse design with exact analytic gradients
//!   and robustness averaging;
//! - [`experiment`]: coupling-strength sweeps, normalisation schemes and
//!   plot-ready record emission.
//!
//! Sweeps and robustness grids are embarrassingly parallel; they fan out
//! over rayon when the default `parallel` feature is on and reduce in fixed
//! order either way, so results do not depend on thread count.

pub mod error;
pub mod exec;
pub mod experiment;
pub mod grape;
pub mod homogeniser;
pub mod linalg;
pub mod qstate;
pub mod spin;

pub use error::{Error, Result};

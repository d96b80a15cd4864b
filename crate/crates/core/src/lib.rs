//! Caputo fractional ODEs and integro-differential DAEs solved by
//! sum-of-exponentials kernel compression, the linear chain trick and an
//! adaptive Radau IIA integrator with structured linear algebra.
//!
//! Typical pipeline:
//! 1. build a [`problem::FractionalIvp`] (directly or with a Caputo builder),
//! 2. [`augment::augment`] it for a kernel accuracy and horizon,
//! 3. [`radau::integrate`] with a [`structured::StructuredSolver`].

pub mod augment;
pub mod benchmarks;
pub mod error;
pub mod linalg;
pub mod problem;
pub mod radau;
pub mod soe;
pub mod structured;

pub use augment::{augment, AugmentedSystem, BlockSpec, StructuredJacobian};
pub use error::{Error, Result};
pub use problem::{CaputoRhs, FnRhs, FractionalIvp, IntegroDifferential};
pub use radau::{integrate, IntegratorConfig, SolveReport, Status, Tolerance};
pub use soe::{choose_parameters, KernelParams, SumOfExponentials};
pub use structured::{LinalgMode, StructuredSolver};

//! Inference of reduced-order models for nonlinear second-order structural
//! dynamics from snapshot data, with global stability enforced through
//! sum-of-squares certificates embedded in a convex conic program.
//!
//! The pipeline is:
//!
//! 1. [`pod`] — compress displacement snapshots onto a POD basis and estimate
//!    reduced velocities and accelerations.
//! 2. [`clustering`] — pick a sparse monomial basis for the polynomial
//!    stiffness potential via greedy variable clustering.
//! 3. [`inference`] — fit mass, damping, input and stiffness operators by
//!    solving a conic program whose constraints certify stability
//!    ([`sos`], [`conic`]).
//! 4. [`rom`] — simulate the inferred model, evaluate Lyapunov diagnostics
//!    and reconstruction errors.
//!
//! [`fom`] provides built-in nonlinear mass-spring chains used to generate
//! test data, and [`monomials`] holds the multi-index algebra everything
//! else is built on.

// Force the system BLAS/LAPACK to be linked for the SDP backend.
extern crate openblas_src;

pub mod clustering;
pub mod conic;
pub mod error;
pub mod fom;
pub mod inference;
pub mod monomials;
pub mod pod;
pub mod rom;
pub mod sos;

pub use clustering::{Cluster, ClusterSelection};
pub use conic::{ConeBlock, ConicProblem, ConicSolution, SolveStatus, SolverSettings};
pub use error::{Error, Result};
pub use fom::{ChainModel, InputProfile, SpringLaw};
pub use inference::{Hyperparams, InferenceMode, InferenceReport, RomModel};
pub use monomials::{MonomialBasis, MultiIndex};
pub use pod::{PodBasis, ReducedDataset, SnapshotSet};
pub use rom::{ErrorReport, Integrator, Trajectory};
pub use sos::{CertificateReport, GramCertificate};

//! Local quantum randomness and the correlations that hide it.
//!
//! For a state `rho` measured in a reference basis this crate computes the
//! relative entropy of coherence `R^Q`, the coherence of formation `R^C`
//! (a convex roof, found numerically), and the quantum discord of the
//! post-measurement classical-quantum state, and checks that the discord is
//! exactly the gap `R^C - R^Q`.

pub mod cli;
pub mod discord;
pub mod entropy;
pub mod error;
pub mod locking;
pub mod optim;
pub mod qstate;
pub mod randomness;
pub mod tolerance;

pub use error::{Error, Result};
pub use optim::{OptimizerConfig, OptimizerInfo};
pub use qstate::{Basis, BlochVector, DensityMatrix, Ensemble, ProbDist, PureState, Subsystem};
pub use tolerance::Tolerances;

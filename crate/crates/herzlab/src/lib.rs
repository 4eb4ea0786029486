//! Certified norm brackets for p-operator spaces, nuclear and projective
//! tensor norms, and Figà-Talamanca–Herz algebras of finite groups.
//!
//! Every quantity that lacks a closed form is reported as a [`NormEstimate`]:
//! a lower bound realized by an explicit witness and an upper bound backed by
//! an explicit certificate.

pub mod cli;
pub mod error;
pub mod group;
pub mod herz;
pub mod nuclear;
pub mod opspace;
pub mod report;
pub mod estimate;
pub mod linalg;
pub mod multipliers;
pub mod optim;
pub mod pexp;
pub mod pnorm;
pub mod projective;

pub use error::{Error, Result};
pub use estimate::{Certificate, NormEstimate, OptimConfig, Witness};
pub use linalg::{DenseMatrix, PVec, C64};
pub use pexp::PExponent;

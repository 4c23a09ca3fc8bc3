//! Geodesic and horocycle flows on compact quotients `Γ\PSL(2,ℝ)`, the
//! left-invariant metric they live in, and seeded experiments that test
//! expansiveness properties of these flows.

pub mod cli;
pub mod config;
pub mod error;
pub mod flows;
pub mod fuchsian;
pub mod lab;
pub mod metric;
pub mod sampling;
pub mod sl2;

pub use config::Config;
pub use error::{Error, Result};
pub use flows::{FlowKind, TimeChange};
pub use fuchsian::{FuchsianGroup, QuotientPoint, Word};
pub use lab::{Outcome, Reparametrization, TestVerdict};
pub use metric::{AlgebraVector, GroupMetric, MetricConfig};
pub use sl2::{Classification, GroupElement, HalfPlanePoint, Matrix2, OneParameter, Tolerances};

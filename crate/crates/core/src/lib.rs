//! Scaling-rotation geometry for symmetric positive-definite matrices.

pub mod certificate;
pub mod distance;
pub mod error;
pub mod fiber;
pub mod group;
pub mod inference;
pub mod linalg;
pub mod manifold;
pub mod mean;
pub mod optimize;
pub mod spd;

pub use certificate::{Certificate, CertificateKind};
pub use distance::{d_psr, d_sr, MinimalPair};
pub use error::{Error, Result};
pub use fiber::{classify_stratum, delta, fiber_of, Fiber, Stratum, StratumTag};
pub use group::{enumerate_group, SignedPerm};
pub use manifold::{EigenDecomp, MetricWeight, PosDiag, Rotation, TangentVec};
pub use mean::{psr_mean, MeanOptions, MeanResult};
pub use spd::SpdMatrix;

/// Library version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Tangent coordinates, comparison means, synthetic samplers, bootstrap
//! covariances and two-group comparison.

pub mod bootstrap;
pub mod coords;
pub mod sampling;

pub use bootstrap::{bootstrap_cov, bootstrap_cov_at, closest_in_orbit, BootstrapCov};
pub use coords::{
    ai_mean, le_coordinates, le_mean, psr_coordinates, unvecd, vecd, AiMean, CoordinateCloud, Frame, Reference,
};
pub use group_test::{
    chi2_quantile, chi2_sf, confidence_region, two_group_report, ConfidenceRegion, FrameReport, GroupTestReport,
};
pub use sampling::{sample_model, sample_model_2d, sample_spd_lognormal};

//! Checkable sufficient conditions about a sample and its PSR mean.
//!
//! A certificate never fails on a negative outcome: it reports `holds = false`
//! together with the numbers that decided it.

use crate::error::{Error, Result};
use crate::fiber::{delta, fiber_of, StratumTag, EPS_STRAT};
use crate::group::r_cx;
use crate::manifold::MetricWeight;
use crate::mean::{f_sr_fibers, fibers_of, minimize_fsr_lower_fibers, sr_diameter, MeanResult};
use crate::spd::SpdMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// The eigen-composition of the PSR mean is a sample SR mean.
    SrEqualsPsr,
    /// Some lower-stratum matrix does at least as well as the PSR mean.
    SrInLower,
    /// The PSR mean orbit is unique.
    Uniqueness,
    /// The sample stays away from the lower strata.
    StratumAvoidance,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub holds: bool,
    pub witnesses: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Compares `f_SR` at the composed PSR mean with its minimum over the lower
/// strata.
pub fn certify_sr_vs_psr(xs: &[SpdMatrix], mean: &MeanResult, k: MetricWeight) -> Result<Certificate> {
    let fibers = fibers_of(xs, EPS_STRAT)?;
    let at_mean = f_sr_fibers(&fibers, &mean.mean.compose(), k)?;
    let lower = minimize_fsr_lower_fibers(&fibers, k)?;
    let holds = at_mean <= lower.value;
    let witnesses = BTreeMap::from([
        ("f_sr_at_mean".to_string(), at_mean),
        ("f_sr_lower_min".to_string(), lower.value),
        ("f_psr_at_mean".to_string(), mean.objective),
    ]);
    Ok(Certificate {
        kind: if holds { CertificateKind::SrEqualsPsr } else { CertificateKind::SrInLower },
        holds,
        witnesses,
        note: (!lower.exact).then(|| "numeric lower-stratum bound from restarted local search".to_string()),
    })
}

/// Holds when the sample's `d_SR` diameter is below the uniqueness radius.
pub fn certify_uniqueness(xs: &[SpdMatrix], k: MetricWeight) -> Result<Certificate> {
    let first = xs.first().ok_or(Error::EmptyInput)?;
    let fibers = fibers_of(xs, EPS_STRAT)?;
    if let Some(i) = fibers.iter().position(|f| !f.is_top()) {
        return Err(Error::UnsupportedStratum(format!(
            "observation {i} has a repeated eigenvalue; uniqueness needs distinct eigenvalues"
        )));
    }
    let diameter = sr_diameter(&fibers, k)?;
    let radius = r_cx(first.dim(), k)?;
    Ok(Certificate {
        kind: CertificateKind::Uniqueness,
        holds: diameter < radius,
        witnesses: BTreeMap::from([("diameter".to_string(), diameter), ("r_cx".to_string(), radius)]),
        note: None,
    })
}

/// Holds when every observation is within `δ(S0)/3` of `S0`.
pub fn certify_stratum_avoidance(xs: &[SpdMatrix], s0: &SpdMatrix, k: MetricWeight) -> Result<Certificate> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let center = fiber_of(s0, EPS_STRAT)?;
    if !center.is_top() {
        return Err(Error::UnsupportedStratum("reference matrix must have distinct eigenvalues".into()));
    }
    let rep = center.representative();
    let fibers = fibers_of(xs, EPS_STRAT)?;
    let dists: Vec<f64> = fibers
        .par_iter()
        .map(|f| f.nearest(&rep, k).map(|h| h.dist))
        .collect::<Result<_>>()?;
    let max_distance = dists.into_iter().fold(0.0, f64::max);
    let d = delta(s0);
    Ok(Certificate {
        kind: CertificateKind::StratumAvoidance,
        holds: max_distance < d / 3.0,
        witnesses: BTreeMap::from([
            ("max_distance".to_string(), max_distance),
            ("delta".to_string(), d),
            ("radius_bound".to_string(), d / 3.0),
        ]),
        note: None,
    })
}

/// Whether an SPD matrix has distinct eigenvalues at the default tolerance.
pub fn is_top(x: &SpdMatrix) -> bool {
    crate::fiber::classify_stratum(x, EPS_STRAT).tag == StratumTag::Top
}

//! Scaling-rotation distance `d_SR` between SPD matrices and the partial
//! scaling-rotation distance `d_PSR` from an SPD matrix to a point of `M(p)`.
//!
//! `d_PSR(X, m)` is the distance from `m` to the nearest element of the fiber
//! of `X`. `d_SR(X, Y)` minimizes over both fibers; when one side has distinct
//! eigenvalues the group isometry lets that side stay fixed.

use crate::error::{Error, Result};
use crate::fiber::{best_plane_angle, fiber_of, plane_rotation, Fiber, FiberMatch, StratumTag, EPS_STRAT};
use crate::group::enumerate_group;
use crate::manifold::{dist_m, dist_m_sq, so_dist, EigenDecomp, MetricWeight, PosDiag, Rotation};
use crate::optimize::bracketed_min;
use crate::spd::SpdMatrix;
use nalgebra::DVector;
use std::f64::consts::TAU;

/// Angular tolerance of the circle-subgroup searches.
pub const TOL_OPT: f64 = 1e-10;
const BRACKETS: usize = 8;

/// Eigen-decompositions of `X` and `Y` realizing `d_SR(X, Y)`.
#[derive(Debug, Clone)]
pub struct MinimalPair {
    pub mx: EigenDecomp,
    pub my: EigenDecomp,
    pub dist: f64,
}

/// `d_PSR(X, m)` with the achieving element of the fiber of `X`.
pub fn d_psr(x: &SpdMatrix, m: &EigenDecomp, k: MetricWeight) -> Result<FiberMatch> {
    fiber_of(x, EPS_STRAT)?.nearest(m, k)
}

/// `d_SR(X, Y)` and a minimal pair.
pub fn d_sr(x: &SpdMatrix, y: &SpdMatrix, k: MetricWeight) -> Result<MinimalPair> {
    d_sr_with(x, y, k, EPS_STRAT)
}

pub fn d_sr_with(x: &SpdMatrix, y: &SpdMatrix, k: MetricWeight, eps_strat: f64) -> Result<MinimalPair> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    // A scaled identity needs no fiber search on either side, which keeps the
    // closed form available for unsupported lower strata.
    let cx = x.canonical_decomposition();
    let cy = y.canonical_decomposition();
    let bottom = |m: &EigenDecomp| {
        crate::fiber::stratum_of_logs(m.diag().log(), eps_strat).tag == StratumTag::Bottom
    };
    if bottom(&cy) {
        return Ok(to_bottom(cx, cy.diag().log().mean()));
    }
    if bottom(&cx) {
        return Ok(swap(to_bottom(cy, cx.diag().log().mean())));
    }
    d_sr_fibers(&fiber_of(x, eps_strat)?, &fiber_of(y, eps_strat)?, k)
}

fn swap(pair: MinimalPair) -> MinimalPair {
    MinimalPair {
        mx: pair.my,
        my: pair.mx,
        dist: pair.dist,
    }
}

fn to_bottom(mx: EigenDecomp, log_c: f64) -> MinimalPair {
    let p = mx.dim();
    let log = DVector::from_element(p, log_c);
    let dist = (mx.diag().log() - &log).norm();
    let my = EigenDecomp::from_parts_unchecked(mx.rotation().clone(), PosDiag::from_log_unchecked(log));
    MinimalPair { mx, my, dist }
}

/// `d_SR` between two precomputed fibers.
pub fn d_sr_fibers(fx: &Fiber, fy: &Fiber, k: MetricWeight) -> Result<MinimalPair> {
    if fx.dim() != fy.dim() {
        return Err(Error::DimensionMismatch {
            expected: fx.dim(),
            found: fy.dim(),
        });
    }
    match (fx, fy) {
        (_, Fiber::Bottom { log_c, .. }) => Ok(to_bottom(fx.representative(), *log_c)),
        (Fiber::Bottom { log_c, .. }, _) => Ok(swap(to_bottom(fy.representative(), *log_c))),
        (_, Fiber::Finite(_)) => {
            let my = fy.representative();
            let hit = fx.nearest(&my, k)?;
            Ok(MinimalPair {
                mx: hit.element,
                my,
                dist: hit.dist,
            })
        }
        (Fiber::Finite(_), _) => {
            let mx = fx.representative();
            let hit = fy.nearest(&mx, k)?;
            Ok(MinimalPair {
                mx,
                my: hit.element,
                dist: hit.dist,
            })
        }
        (Fiber::Circle { base: bx, plane: px }, Fiber::Circle { base: by, plane: py }) => {
            Ok(circle_pair(bx, *px, by, *py, k))
        }
    }
}

/// Both matrices have one repeated eigenvalue pair (`p = 3`). For each group
/// element the inner angle is solved exactly and the outer angle is searched
/// numerically.
fn circle_pair(
    bx: &EigenDecomp,
    px: (usize, usize),
    by: &EigenDecomp,
    py: (usize, usize),
    k: MetricWeight,
) -> MinimalPair {
    let group = enumerate_group(3).expect("p = 3 group");
    let ux = bx.rotation().matrix();
    let uy = by.rotation().matrix();
    let mut best: Option<(f64, usize, f64)> = None;
    for (gi, g) in group.iter().enumerate() {
        let gy = g.act(by);
        let diag2 = (bx.diag().log() - gy.diag().log()).norm_squared();
        if let Some((b2, _, _)) = best {
            if diag2 >= b2 {
                continue;
            }
        }
        let gt = g.matrix().transpose();
        let objective = |phi2: f64| {
            let target = uy * plane_rotation(3, py, phi2) * &gt;
            let phi1 = best_plane_angle(&(ux.transpose() * &target), px);
            let theta = so_dist(&(ux * plane_rotation(3, px, phi1)), &target);
            k.value() * theta * theta + diag2
        };
        let (phi2, d2) = bracketed_min(objective, 0.0, TAU, BRACKETS, TOL_OPT);
        if best.is_none_or(|(b2, _, _)| d2 < b2) {
            best = Some((d2, gi, phi2));
        }
    }
    let (_, gi, phi2) = best.expect("non-empty group");
    let g = &group[gi];
    let turned_y = EigenDecomp::from_parts_unchecked(
        Rotation::from_matrix_unchecked(uy * plane_rotation(3, py, phi2)),
        by.diag().clone(),
    );
    let my = g.act(&turned_y);
    let phi1 = best_plane_angle(&(ux.transpose() * my.rotation().matrix()), px);
    let mx = EigenDecomp::from_parts_unchecked(
        Rotation::from_matrix_unchecked(ux * plane_rotation(3, px, phi1)),
        bx.diag().clone(),
    );
    let dist = dist_m(&mx, &my, k);
    MinimalPair { mx, my, dist }
}

/// Average of `d_SR(X_i, S)²` over precomputed fibers.
pub(crate) fn mean_sq_sr(fibers: &[Fiber], s: &Fiber, k: MetricWeight) -> Result<f64> {
    let mut total = 0.0;
    for f in fibers {
        total += d_sr_fibers(f, s, k)?.dist.powi(2);
    }
    Ok(total / fibers.len() as f64)
}

/// `d_M` between the two members of a pair, for checking.
pub fn pair_distance(pair: &MinimalPair, k: MetricWeight) -> f64 {
    dist_m_sq(&pair.mx, &pair.my, k).sqrt()
}

//! Eigenvalue-multiplicity strata and fibers of the eigen-composition map
//! `F(U, D) = U D Uᵀ`.
//!
//! In the top stratum (distinct eigenvalues) the fiber of `X` is a single
//! group orbit. At the bottom (`X = cI`) it is all of `SO(p) × {cI}`. For
//! `p = 3` with one repeated pair the fiber is a union of circles, one per
//! group element. Other lower strata are not supported.

use crate::error::{Error, Result};
use crate::group::{enumerate_group, orbit};
use crate::manifold::{dist_m_sq, so_dist, EigenDecomp, MetricWeight, PosDiag, Rotation};
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Default log-gap at or below which eigenvalues count as repeated.
pub const EPS_STRAT: f64 = 1e-8;

/// Squared distances closer than this (relative) are treated as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumTag {
    Top,
    Lower,
    Bottom,
}

/// Partition of eigenvalue positions (descending order) into groups of
/// numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub blocks: Vec<Vec<usize>>,
    pub tag: StratumTag,
}

impl Stratum {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Groups a descending log-eigenvalue vector by adjacent gaps `≤ eps`.
pub fn stratum_of_logs(logs: &DVector<f64>, eps: f64) -> Stratum {
    let p = logs.len();
    let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..p {
        if logs[i - 1] - logs[i] <= eps {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    let tag = if blocks.len() == p {
        StratumTag::Top
    } else if blocks.len() == 1 {
        StratumTag::Bottom
    } else {
        StratumTag::Lower
    };
    Stratum { blocks, tag }
}

pub fn classify_stratum(x: &SpdMatrix, eps_strat: f64) -> Stratum {
    stratum_of_logs(&x.log_eigenvalues(), eps_strat)
}

/// Distance from `S` to the union of lower strata: the smallest gap between
/// log-eigenvalues divided by √2.
pub fn delta(s: &SpdMatrix) -> f64 {
    let logs = s.log_eigenvalues();
    (1..logs.len())
        .map(|i| logs[i - 1] - logs[i])
        .fold(f64::INFINITY, f64::min)
        / std::f64::consts::SQRT_2
}

/// The set of eigen-decompositions of one SPD matrix.
#[derive(Debug, Clone)]
pub enum Fiber {
    /// Top stratum: the full group orbit of the canonical decomposition.
    Finite(Vec<EigenDecomp>),
    /// `cI`: every rotation paired with `cI`.
    Bottom { dim: usize, log_c: f64 },
    /// `p = 3`, one repeated pair at positions `plane` of `base`'s diagonal:
    /// `{h·(U R, D) : R rotates the plane, h in the group}`.
    Circle { base: EigenDecomp, plane: (usize, usize) },
}

/// Nearest fiber element to a given point.
#[derive(Debug, Clone)]
pub struct FiberMatch {
    pub dist: f64,
    pub element: EigenDecomp,
    /// Position in the element list for finite fibers.
    pub index: Option<usize>,
}

/// Rotation by `phi` in the coordinate plane `(i, j)`.
pub(crate) fn plane_rotation(p: usize, (i, j): (usize, usize), phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    let mut r = DMatrix::identity(p, p);
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(j, i)] = s;
    r[(i, j)] = -s;
    r
}

/// Angle maximizing `tr(R_φᵀ M)` for a plane rotation `R_φ`.
pub(crate) fn best_plane_angle(m: &DMatrix<f64>, (i, j): (usize, usize)) -> f64 {
    (m[(j, i)] - m[(i, j)]).atan2(m[(i, i)] + m[(j, j)])
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Whether candidate `(d2, m)` beats the incumbent, breaking near-ties by the
/// lexicographically smaller flattened representative.
pub(crate) fn improves(d2: f64, m: &EigenDecomp, best: Option<(f64, &EigenDecomp)>) -> bool {
    match best {
        None => true,
        Some((b2, bm)) => {
            if d2 < b2 - TIE_TOL * (1.0 + b2) {
                true
            } else if d2 <= b2 + TIE_TOL * (1.0 + b2) {
                lex_cmp(&m.sort_key(), &bm.sort_key()) == Ordering::Less
            } else {
                false
            }
        }
    }
}

/// Best match between a circle fiber and a fixed point: for each group
/// element `g`, the plane angle is solved in closed form (the rotation
/// distance in SO(3) is monotone in the trace).
pub(crate) struct CircleMatch {
    pub d2: f64,
    pub group_index: usize,
    pub phi: f64,
}

pub(crate) fn circle_match(base: &EigenDecomp, plane: (usize, usize), m: &EigenDecomp, k: MetricWeight) -> CircleMatch {
    let group = enumerate_group(3).expect("p = 3 group");
    let bu = base.rotation().matrix();
    let blog = base.diag().log();
    let mut best = CircleMatch {
        d2: f64::INFINITY,
        group_index: 0,
        phi: 0.0,
    };
    for (gi, g) in group.iter().enumerate() {
        let gm = g.act(m);
        let diag2 = (blog - gm.diag().log()).norm_squared();
        if diag2 > best.d2 {
            continue;
        }
        let target = gm.rotation().matrix();
        let phi = best_plane_angle(&(bu.transpose() * target), plane);
        let u = bu * plane_rotation(3, plane, phi);
        let theta = so_dist(&u, target);
        let d2 = k.value() * theta * theta + diag2;
        if d2 + TIE_TOL * (1.0 + d2) < best.d2 {
            best = CircleMatch {
                d2,
                group_index: gi,
                phi,
            };
        }
    }
    best
}

impl Fiber {
    pub fn dim(&self) -> usize {
        match self {
            Fiber::Finite(list) => list[0].dim(),
            Fiber::Bottom { dim, .. } => *dim,
            Fiber::Circle { base, .. } => base.dim(),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Fiber::Finite(_))
    }

    /// One element of the fiber: the canonical decomposition for finite
    /// fibers, `(I, cI)` at the bottom, the base point of a circle fiber.
    pub fn representative(&self) -> EigenDecomp {
        match self {
            Fiber::Finite(list) => list[0].clone(),
            Fiber::Bottom { dim, log_c } => EigenDecomp::from_parts_unchecked(
                Rotation::identity(*dim),
                PosDiag::from_log_unchecked(DVector::from_element(*dim, *log_c)),
            ),
            Fiber::Circle { base, .. } => base.clone(),
        }
    }

    /// Log-eigenvalues in the order carried by the representative.
    pub fn log_eigenvalues(&self) -> DVector<f64> {
        self.representative().diag().log().clone()
    }

    /// Fiber element closest to `m`, i.e. the partial scaling-rotation
    /// distance and its minimizer.
    pub fn nearest(&self, m: &EigenDecomp, k: MetricWeight) -> Result<FiberMatch> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        Ok(match self {
            Fiber::Finite(list) => {
                let mut best: Option<(f64, usize)> = None;
                for (i, e) in list.iter().enumerate() {
                    let d2 = dist_m_sq(e, m, k);
                    if improves(d2, e, best.map(|(b, j)| (b, &list[j]))) {
                        best = Some((d2, i));
                    }
                }
                let (d2, i) = best.expect("non-empty fiber");
                FiberMatch {
                    dist: d2.sqrt(),
                    element: list[i].clone(),
                    index: Some(i),
                }
            }
            Fiber::Bottom { dim, log_c } => {
                let log = DVector::from_element(*dim, *log_c);
                FiberMatch {
                    dist: (m.diag().log() - &log).norm(),
                    element: EigenDecomp::from_parts_unchecked(
                        m.rotation().clone(),
                        PosDiag::from_log_unchecked(log),
                    ),
                    index: None,
                }
            }
            Fiber::Circle { base, plane } => {
                let c = circle_match(base, *plane, m, k);
                let g = &enumerate_group(3)?[c.group_index];
                let turned = EigenDecomp::from_parts_unchecked(
                    Rotation::from_matrix_unchecked(base.rotation().matrix() * plane_rotation(3, *plane, c.phi)),
                    base.diag().clone(),
                );
                FiberMatch {
                    dist: c.d2.sqrt(),
                    element: g.inverse().act(&turned),
                    index: None,
                }
            }
        })
    }

    /// Every element of a finite fiber within `tol` of the minimal distance to
    /// `m`. Continuous fibers return the single element from [`Fiber::nearest`].
    pub fn nearest_all(&self, m: &EigenDecomp, k: MetricWeight, tol: f64) -> Result<Vec<EigenDecomp>> {
        let best = self.nearest(m, k)?;
        Ok(match self {
            Fiber::Finite(list) => list
                .iter()
                .filter(|e| dist_m_sq(e, m, k).sqrt() <= best.dist + tol)
                .cloned()
                .collect(),
            _ => vec![best.element],
        })
    }
}

/// Fiber of `X`, with eigenvalues whose log-gap is `≤ eps_strat` treated as
/// equal (and averaged, so that the fiber lies exactly in the lower stratum).
pub fn fiber_of(x: &SpdMatrix, eps_strat: f64) -> Result<Fiber> {
    let canon = x.canonical_decomposition();
    let p = canon.dim();
    let logs = canon.diag().log().clone();
    let stratum = stratum_of_logs(&logs, eps_strat);
    match stratum.tag {
        StratumTag::Top => Ok(Fiber::Finite(orbit(&canon)?)),
        StratumTag::Bottom => Ok(Fiber::Bottom {
            dim: p,
            log_c: logs.mean(),
        }),
        StratumTag::Lower if p == 3 => {
            let pair = stratum.blocks.iter().find(|b| b.len() == 2).expect("one repeated pair");
            let (i, j) = (pair[0], pair[1]);
            let mut logs = logs;
            let avg = 0.5 * (logs[i] + logs[j]);
            logs[i] = avg;
            logs[j] = avg;
            Ok(Fiber::Circle {
                base: EigenDecomp::from_parts_unchecked(
                    canon.rotation().clone(),
                    PosDiag::from_log_unchecked(logs),
                ),
                plane: (i, j),
            })
        }
        StratumTag::Lower => Err(Error::UnsupportedStratum(format!(
            "p = {p} with eigenvalue multiplicities {:?}",
            stratum.multiplicities()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::dist_m;

    fn diag_spd(v: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(v).unwrap()
    }

    #[test]
    fn classifies_strata() {
        assert_eq!(classify_stratum(&diag_spd(&[8.0, 3.0]), EPS_STRAT).tag, StratumTag::Top);
        assert_eq!(classify_stratum(&diag_spd(&[5.0, 5.0, 5.0]), EPS_STRAT).tag, StratumTag::Bottom);
        let s = classify_stratum(&diag_spd(&[2.0, 2.0, 7.0]), EPS_STRAT);
        assert_eq!(s.tag, StratumTag::Lower);
        // descending order: 7 first, then the repeated pair
        assert_eq!(s.blocks, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn top_fiber_has_four_decompositions() {
        let fiber = fiber_of(&diag_spd(&[8.0, 3.0]), EPS_STRAT).unwrap();
        match fiber {
            Fiber::Finite(list) => assert_eq!(list.len(), 4),
            _ => panic!("expected a finite fiber"),
        }
    }

    #[test]
    fn scaled_identity_fiber_is_parametric() {
        let fiber = fiber_of(&diag_spd(&[2.0, 2.0, 2.0]), EPS_STRAT).unwrap();
        assert!(matches!(fiber, Fiber::Bottom { dim: 3, .. }));
        let m = EigenDecomp::new(Rotation::planar(0.3), PosDiag::identity(2)).unwrap();
        let f2 = fiber_of(&diag_spd(&[2.0, 2.0]), EPS_STRAT).unwrap();
        let hit = f2.nearest(&m, MetricWeight::default()).unwrap();
        assert_eq!(hit.element.rotation(), m.rotation());
        assert!((hit.dist - 2f64.ln() * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn p4_lower_stratum_is_rejected() {
        let err = fiber_of(&diag_spd(&[2.0, 2.0, 3.0, 4.0]), EPS_STRAT).unwrap_err();
        assert!(matches!(err, Error::UnsupportedStratum(_)));
        assert!(fiber_of(&diag_spd(&[1.0, 2.0, 3.0, 4.0]), EPS_STRAT).is_ok());
    }

    #[test]
    fn top_fiber_recomposes() {
        let x = SpdMatrix::from_upper(3, &[4.0, 1.0, 0.5, 3.0, 0.2, 2.0]).unwrap();
        let Fiber::Finite(list) = fiber_of(&x, EPS_STRAT).unwrap() else { panic!() };
        assert_eq!(list.len(), 24);
        for e in &list {
            assert!((e.compose().matrix() - x.matrix()).amax() < 1e-12);
        }
        let beta = crate::group::beta_g(3).unwrap();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                assert!(dist_m(a, b, MetricWeight::default()) >= beta - 1e-9);
            }
        }
    }

    #[test]
    fn circle_fiber_elements_recompose() {
        let u = crate::manifold::rot_exp(&DMatrix::from_row_slice(3, 3, &[0.0, -0.4, 0.1, 0.4, 0.0, -0.7, -0.1, 0.7, 0.0]));
        let x = EigenDecomp::new(u, PosDiag::new(&[5.0, 2.0, 2.0]).unwrap()).unwrap().compose();
        let fiber = fiber_of(&x, EPS_STRAT).unwrap();
        assert!(matches!(fiber, Fiber::Circle { plane: (1, 2), .. }));
        let m = EigenDecomp::new(Rotation::identity(3), PosDiag::new(&[1.0, 3.0, 4.0]).unwrap()).unwrap();
        let hit = fiber.nearest(&m, MetricWeight::default()).unwrap();
        assert!((hit.element.compose().matrix() - x.matrix()).amax() < 1e-12);
        assert!((dist_m(&hit.element, &m, MetricWeight::default()) - hit.dist).abs() < 1e-12);
    }

    #[test]
    fn delta_values() {
        let e = std::f64::consts::E;
        assert!((delta(&diag_spd(&[e, 1.0 / e])) - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(delta(&diag_spd(&[3.0, 3.0])), 0.0);
    }

    #[test]
    fn plane_angle_maximizes_trace() {
        let m = crate::manifold::rot_exp(&DMatrix::from_row_slice(3, 3, &[0.0, -0.4, 0.9, 0.4, 0.0, -0.7, -0.9, 0.7, 0.0]));
        let m = m.matrix();
        let phi = best_plane_angle(m, (0, 2));
        let tr = |a: f64| (plane_rotation(3, (0, 2), a).transpose() * m).trace();
        for i in 0..360 {
            let a = i as f64 * std::f64::consts::PI / 180.0;
            assert!(tr(a) <= tr(phi) + 1e-12);
        }
    }
}

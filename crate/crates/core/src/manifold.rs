//! The eigen-decomposition manifold `M(p) = SO(p) × Diag⁺(p)`.
//!
//! Points are pairs `(U, D)` of a rotation and a positive diagonal matrix.
//! The manifold carries the product metric
//!
//! ```text
//! d²((U1,D1),(U2,D2)) = k · d_SO(U1,U2)² + d_D(D1,D2)²
//! d_SO(U1,U2) = ‖Log(U2 U1ᵀ)‖_F / √2
//! d_D(D1,D2)  = ‖Log D1 − Log D2‖_F
//! ```
//!
//! with rotation weight `k > 0`. Tangent vectors are stored right-translated to
//! the identity, as a pair `(A, L)` of an antisymmetric and a diagonal matrix.
//! All functions here are pure.

use crate::error::{Error, Result};
use crate::linalg::{self, orthogonality_defect, polar_orthogonal, rotation_log, skew_exp};
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Accepted deviation from orthogonality without repair.
pub const TOL_ORTH: f64 = 1e-10;
/// Inputs within this deviation are re-orthonormalized by polar projection.
pub const TOL_REPAIR: f64 = 1e-6;

/// Weight `k` of the rotation part of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeight(f64);

impl MetricWeight {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.0 && k.is_finite() {
            Ok(Self(k))
        } else {
            Err(Error::BadParameter(format!("metric weight must be > 0, got {k}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for MetricWeight {
    fn default() -> Self {
        Self(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rotation(DMatrix<f64>);

impl Rotation {
    /// Validates `UᵀU = I` and `det U = +1`. Matrices within [`TOL_REPAIR`] of
    /// SO(p) are projected back onto it; anything further away is rejected.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let defect = orthogonality_defect(&m);
        let det = m.determinant();
        if defect <= TOL_ORTH && (det - 1.0).abs() <= TOL_ORTH {
            return Ok(Self(m));
        }
        if defect <= TOL_REPAIR && det > 0.0 {
            return Ok(Self(polar_orthogonal(&m)));
        }
        Err(Error::NonOrthogonalInput { deviation: defect, det })
    }

    pub fn identity(p: usize) -> Self {
        Self(DMatrix::identity(p, p))
    }

    /// Planar rotation by `theta` (counterclockwise).
    pub fn planar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(&self.0 * &other.0)
    }
}

/// Positive diagonal matrix, stored by the logarithms of its entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDiag {
    log: DVector<f64>,
}

impl PosDiag {
    pub fn new(values: &[f64]) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveEntry { index, value });
            }
        }
        Ok(Self {
            log: DVector::from_iterator(values.len(), values.iter().map(|v| v.ln())),
        })
    }

    pub fn from_log(log: DVector<f64>) -> Result<Self> {
        if log.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter("non-finite log-eigenvalue".into()));
        }
        Ok(Self { log })
    }

    pub(crate) fn from_log_unchecked(log: DVector<f64>) -> Self {
        Self { log }
    }

    pub fn identity(p: usize) -> Self {
        Self {
            log: DVector::zeros(p),
        }
    }

    pub fn log(&self) -> &DVector<f64> {
        &self.log
    }

    pub fn values(&self) -> DVector<f64> {
        self.log.map(f64::exp)
    }

    pub fn dim(&self) -> usize {
        self.log.len()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.values())
    }
}

/// A point `(U, D)` of `M(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomp {
    u: Rotation,
    d: PosDiag,
}

impl EigenDecomp {
    pub fn new(u: Rotation, d: PosDiag) -> Result<Self> {
        if u.dim() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: d.dim(),
            });
        }
        Ok(Self { u, d })
    }

    pub(crate) fn from_parts_unchecked(u: Rotation, d: PosDiag) -> Self {
        Self { u, d }
    }

    pub fn identity(p: usize) -> Self {
        Self {
            u: Rotation::identity(p),
            d: PosDiag::identity(p),
        }
    }

    pub fn rotation(&self) -> &Rotation {
        &self.u
    }

    pub fn diag(&self) -> &PosDiag {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Eigen-composition `U D Uᵀ`.
    pub fn compose(&self) -> SpdMatrix {
        let u = self.u.matrix();
        SpdMatrix::from_matrix_unchecked(u * self.d.matrix() * u.transpose())
    }

    /// Flattened `(U row-major, log D)`, used as a deterministic tie-break key.
    pub(crate) fn sort_key(&self) -> Vec<f64> {
        let u = self.u.matrix();
        let p = self.dim();
        let mut key = Vec::with_capacity(p * p + p);
        for i in 0..p {
            for j in 0..p {
                key.push(u[(i, j)]);
            }
        }
        key.extend(self.d.log().iter());
        key
    }
}

/// Tangent vector `(A, L)` at a point of `M(p)`, right-translated to the identity.
///
/// `A` is held by its generator coefficients: for each index pair `i < j` in
/// lexicographic order, `rot[k] = A[j][i]`, the rate of rotation from axis `i`
/// towards axis `j`. For `p = 2` the single coefficient is the rotation angle.
/// This keeps `A + Aᵀ = 0` exact.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVec {
    rot: Vec<f64>,
    diag: DVector<f64>,
}

pub fn so_dim(p: usize) -> usize {
    p * (p - 1) / 2
}

/// Dimension `p(p−1)/2 + p` of `M(p)`.
pub fn tangent_dim(p: usize) -> usize {
    so_dim(p) + p
}

impl TangentVec {
    pub fn zeros(p: usize) -> Self {
        Self {
            rot: vec![0.0; so_dim(p)],
            diag: DVector::zeros(p),
        }
    }

    /// From an antisymmetric matrix and a diagonal vector. Tiny asymmetric
    /// noise (≤ 1e-12 relative) is averaged out.
    pub fn from_parts(a: &DMatrix<f64>, l: DVector<f64>) -> Result<Self> {
        let p = l.len();
        if a.nrows() != p || a.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: a.nrows(),
            });
        }
        let sym = (a + a.transpose()).amax();
        if sym > 1e-12 * a.amax().max(1.0) {
            return Err(Error::BadParameter(format!(
                "rotation part is not antisymmetric (|A + Aᵀ| = {sym:.3e})"
            )));
        }
        Ok(Self::from_skew(a, l))
    }

    pub(crate) fn from_skew(a: &DMatrix<f64>, l: DVector<f64>) -> Self {
        let p = l.len();
        let mut rot = Vec::with_capacity(so_dim(p));
        for i in 0..p {
            for j in (i + 1)..p {
                rot.push(0.5 * (a[(j, i)] - a[(i, j)]));
            }
        }
        Self { rot, diag: l }
    }

    pub fn skew(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut a = DMatrix::zeros(p, p);
        let mut k = 0;
        for i in 0..p {
            for j in (i + 1)..p {
                a[(j, i)] = self.rot[k];
                a[(i, j)] = -self.rot[k];
                k += 1;
            }
        }
        a
    }

    pub fn rotation_coefficients(&self) -> &[f64] {
        &self.rot
    }

    pub fn diag(&self) -> &DVector<f64> {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Squared norm under the metric with weight `k`.
    pub fn norm_squared(&self, k: MetricWeight) -> f64 {
        k.value() * self.rot.iter().map(|v| v * v).sum::<f64>() + self.diag.norm_squared()
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

/// `Log(U2 U1ᵀ)`: the minimal-norm antisymmetric `A` with `Exp(A) U1 = U2`.
pub fn rot_log(u1: &Rotation, u2: &Rotation) -> Result<DMatrix<f64>> {
    check_dims(u1.dim(), u2.dim())?;
    Ok(rotation_log(&(u2.matrix() * u1.matrix().transpose())).0)
}

/// Whether `U2 U1ᵀ` is an involution, where the rotation log is not unique.
pub fn is_antipodal(u1: &Rotation, u2: &Rotation) -> Result<bool> {
    check_dims(u1.dim(), u2.dim())?;
    Ok(rotation_log(&(u2.matrix() * u1.matrix().transpose())).1)
}

pub fn rot_exp(a: &DMatrix<f64>) -> Rotation {
    Rotation(skew_exp(a))
}

pub(crate) fn so_dist(u1: &DMatrix<f64>, u2: &DMatrix<f64>) -> f64 {
    let r = u2 * u1.transpose();
    so_angle_norm(&r)
}

/// `‖Log(R)‖_F / √2` without materializing the log when `p ≤ 3`.
pub(crate) fn so_angle_norm(r: &DMatrix<f64>) -> f64 {
    match r.nrows() {
        2 => {
            let y = 0.5 * (r[(1, 0)] - r[(0, 1)]);
            let x = 0.5 * (r[(0, 0)] + r[(1, 1)]);
            y.atan2(x).abs()
        }
        3 => {
            let w0 = 0.5 * (r[(2, 1)] - r[(1, 2)]);
            let w1 = 0.5 * (r[(0, 2)] - r[(2, 0)]);
            let w2 = 0.5 * (r[(1, 0)] - r[(0, 1)]);
            let s = (w0 * w0 + w1 * w1 + w2 * w2).sqrt();
            let c = 0.5 * (r[(0, 0)] + r[(1, 1)] + r[(2, 2)] - 1.0);
            s.atan2(c)
        }
        _ => linalg::frob(&rotation_log(r).0) / std::f64::consts::SQRT_2,
    }
}

/// Rotation distance `‖Log(U2U1ᵀ)‖_F / √2`.
pub fn d_so(u1: &Rotation, u2: &Rotation) -> Result<f64> {
    check_dims(u1.dim(), u2.dim())?;
    Ok(so_dist(u1.matrix(), u2.matrix()))
}

/// Euclidean distance between log-eigenvalue vectors.
pub fn d_diag(d1: &PosDiag, d2: &PosDiag) -> Result<f64> {
    check_dims(d1.dim(), d2.dim())?;
    Ok((d1.log() - d2.log()).norm())
}

pub(crate) fn dist_m(m1: &EigenDecomp, m2: &EigenDecomp, k: MetricWeight) -> f64 {
    dist_m_sq(m1, m2, k).sqrt()
}

pub(crate) fn dist_m_sq(m1: &EigenDecomp, m2: &EigenDecomp, k: MetricWeight) -> f64 {
    let r = so_dist(m1.u.matrix(), m2.u.matrix());
    k.value() * r * r + (m1.d.log() - m2.d.log()).norm_squared()
}

/// Geodesic distance on `M(p)`.
pub fn d_m(m1: &EigenDecomp, m2: &EigenDecomp, k: MetricWeight) -> Result<f64> {
    check_dims(m1.dim(), m2.dim())?;
    Ok(dist_m(m1, m2, k))
}

/// A point on a geodesic, with a flag recording whether the geodesic is unique.
#[derive(Debug, Clone)]
pub struct GeodesicPoint {
    pub point: EigenDecomp,
    /// False when the relative rotation is an involution; the point then lies
    /// on the deterministic branch chosen by [`rot_log`].
    pub unique: bool,
}

/// `γ(t) = (Exp(t Log(U2U1ᵀ)) U1, Exp(t Log(D2D1⁻¹)) D1)`.
pub fn geodesic(m1: &EigenDecomp, m2: &EigenDecomp, t: f64) -> Result<GeodesicPoint> {
    check_dims(m1.dim(), m2.dim())?;
    let (a, involution) = rotation_log(&(m2.u.matrix() * m1.u.matrix().transpose()));
    let u = skew_exp(&(a * t)) * m1.u.matrix();
    let log = m1.d.log() + (m2.d.log() - m1.d.log()) * t;
    Ok(GeodesicPoint {
        point: EigenDecomp {
            u: Rotation(u),
            d: PosDiag::from_log_unchecked(log),
        },
        unique: !involution,
    })
}

/// `Exp_(U,D)(AU, LD) = (Exp(A) U, Exp(L) D)`.
pub fn exp_map(base: &EigenDecomp, v: &TangentVec) -> Result<EigenDecomp> {
    check_dims(base.dim(), v.dim())?;
    let u = skew_exp(&v.skew()) * base.u.matrix();
    Ok(EigenDecomp {
        u: Rotation(u),
        d: PosDiag::from_log_unchecked(base.d.log() + v.diag()),
    })
}

/// Inverse of [`exp_map`] on `{‖Log(VUᵀ)‖_F < π}`.
pub fn log_map(base: &EigenDecomp, target: &EigenDecomp) -> Result<TangentVec> {
    check_dims(base.dim(), target.dim())?;
    let (v, inside) = log_map_flagged(base, target);
    if inside {
        Ok(v)
    } else {
        let norm = linalg::frob(&v.skew());
        Err(Error::OutsideInjectivityRadius { norm })
    }
}

/// Log map that always returns the minimal-norm branch, with a flag telling
/// whether the target is inside the chart domain `‖Log(VUᵀ)‖_F < π`.
pub(crate) fn log_map_flagged(base: &EigenDecomp, target: &EigenDecomp) -> (TangentVec, bool) {
    let (a, _) = rotation_log(&(target.u.matrix() * base.u.matrix().transpose()));
    let inside = linalg::frob(&a) < PI;
    let l = target.d.log() - base.d.log();
    (TangentVec::from_skew(&a, l), inside)
}

/// `vec(A, L) = (√k x_SO(A), x_D(L))`; the Euclidean inner product of the
/// result equals the metric inner product of the tangent vectors.
pub fn vectorize(v: &TangentVec, k: MetricWeight) -> DVector<f64> {
    let sk = k.value().sqrt();
    let p = v.dim();
    let mut out = DVector::zeros(tangent_dim(p));
    for (i, r) in v.rot.iter().enumerate() {
        out[i] = sk * r;
    }
    for i in 0..p {
        out[so_dim(p) + i] = v.diag[i];
    }
    out
}

/// Inverse of [`vectorize`].
pub fn devectorize(x: &DVector<f64>, p: usize, k: MetricWeight) -> Result<TangentVec> {
    check_dims(tangent_dim(p), x.len())?;
    let sk = k.value().sqrt();
    let q = so_dim(p);
    Ok(TangentVec {
        rot: (0..q).map(|i| x[i] / sk).collect(),
        diag: DVector::from_iterator(p, (0..p).map(|i| x[q + i])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn diag(v: &[f64]) -> PosDiag {
        PosDiag::new(v).unwrap()
    }

    fn point(u: Rotation, d: &[f64]) -> EigenDecomp {
        EigenDecomp::new(u, diag(d)).unwrap()
    }

    fn so3(w: [f64; 3]) -> Rotation {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0]);
        rot_exp(&a)
    }

    #[test]
    fn rotation_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(Rotation::new(bad), Err(Error::NonOrthogonalInput { .. })));
        let reflection = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Rotation::new(reflection).is_err());
        let mut near = Rotation::planar(0.4).matrix().clone();
        near[(0, 0)] += 1e-8;
        let fixed = Rotation::new(near).unwrap();
        assert!(orthogonality_defect(fixed.matrix()) < 1e-14);
    }

    #[test]
    fn quarter_turn_distance() {
        let a = rot_log(&Rotation::identity(2), &Rotation::planar(FRAC_PI_2)).unwrap();
        assert!((linalg::frob(&a) / SQRT_2 - FRAC_PI_2).abs() < 1e-14);
        let u = Rotation::planar(0.7);
        assert_eq!(rot_log(&u, &u).unwrap().amax(), 0.0);
    }

    #[test]
    fn planar_distance_is_angle() {
        for &t in &[0.1, -0.5, 2.0, -3.0] {
            let d = d_so(&Rotation::identity(2), &Rotation::planar(t)).unwrap();
            assert!((d - t.abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn diag_distances() {
        let e = std::f64::consts::E;
        let d = d_diag(&diag(&[e, 1.0 / e]), &PosDiag::identity(2)).unwrap();
        assert!((d - SQRT_2).abs() < 1e-14);
        let d = d_diag(&diag(&[8.0, 3.0]), &diag(&[3.0, 8.0])).unwrap();
        assert!((d - SQRT_2 * (8f64.ln() - 3f64.ln())).abs() < 1e-14);
        assert!(PosDiag::new(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn product_distance() {
        let e = std::f64::consts::E;
        let k = MetricWeight::default();
        let m1 = point(Rotation::identity(2), &[e, 1.0 / e]);
        let m2 = point(Rotation::planar(FRAC_PI_4), &[1.0, 1.0]);
        let expected = (PI * PI / 16.0 + 2.0).sqrt();
        assert!((d_m(&m1, &m2, k).unwrap() - expected).abs() < 1e-14);
        let m3 = point(Rotation::planar(0.3), &[1.0, 1.0]);
        let m0 = EigenDecomp::identity(2);
        assert!((d_m(&m0, &m3, k).unwrap() - 0.3).abs() < 1e-14);
        assert!(d_m(&m0, &EigenDecomp::identity(3), k).is_err());
    }

    #[test]
    fn geodesic_endpoints_and_midpoint() {
        let (a, b) = (5.0f64, 2.0f64);
        let m1 = point(Rotation::identity(2), &[a, b]);
        let m2 = point(Rotation::identity(2), &[b, a]);
        let mid = geodesic(&m1, &m2, 0.5).unwrap();
        assert!(mid.unique);
        let g = (a * b).sqrt();
        assert!((mid.point.diag().values() - DVector::from_vec(vec![g, g])).amax() < 1e-12);
        let m3 = point(Rotation::planar(1.0), &[3.0, 0.5]);
        let start = geodesic(&m1, &m3, 0.0).unwrap().point;
        let end = geodesic(&m1, &m3, 1.0).unwrap().point;
        assert!(dist_m(&start, &m1, MetricWeight::default()) < 1e-12);
        assert!(dist_m(&end, &m3, MetricWeight::default()) < 1e-12);
    }

    #[test]
    fn antipodal_geodesic_is_flagged() {
        let m1 = EigenDecomp::identity(2);
        let m2 = point(Rotation::planar(PI), &[1.0, 1.0]);
        let g = geodesic(&m1, &m2, 0.5).unwrap();
        assert!(!g.unique);
        assert!(is_antipodal(m1.rotation(), m2.rotation()).unwrap());
    }

    #[test]
    fn log_map_planar_vector() {
        let k = MetricWeight::new(4.0).unwrap();
        let (theta, a, b) = (0.4, 0.3f64, -1.2f64);
        let target = point(Rotation::planar(theta), &[a.exp(), b.exp()]);
        let v = log_map(&EigenDecomp::identity(2), &target).unwrap();
        let x = vectorize(&v, k);
        assert!((x[0] - 2.0 * theta).abs() < 1e-14);
        assert!((x[1] - a).abs() < 1e-14 && (x[2] - b).abs() < 1e-14);
        let zero = log_map(&target, &target).unwrap();
        assert!(vectorize(&zero, k).amax() < 1e-15);
    }

    #[test]
    fn log_map_rejects_outside_chart() {
        let target = point(Rotation::planar(3.0), &[1.0, 1.0]);
        assert!(matches!(
            log_map(&EigenDecomp::identity(2), &target),
            Err(Error::OutsideInjectivityRadius { .. })
        ));
    }

    #[test]
    fn vectorize_scales_rotation_coordinate() {
        let theta = 0.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let v = TangentVec::from_parts(&a, DVector::zeros(2)).unwrap();
        let x = vectorize(&v, MetricWeight::new(4.0).unwrap());
        assert_eq!(x[0], 2.0 * a[(1, 0)]);
        assert_eq!(vectorize(&TangentVec::zeros(3), MetricWeight::default()).amax(), 0.0);
    }

    fn arb_so3() -> impl Strategy<Value = Rotation> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..3.0f64).prop_filter_map("axis", |(x, y, z, t)| {
            let n = (x * x + y * y + z * z).sqrt();
            (n > 1e-3).then(|| so3([x / n * t, y / n * t, z / n * t]))
        })
    }

    fn arb_point3() -> impl Strategy<Value = EigenDecomp> {
        (arb_so3(), proptest::collection::vec(-2.0..2.0f64, 3)).prop_map(|(u, l)| {
            EigenDecomp::new(u, PosDiag::from_log(DVector::from_vec(l)).unwrap()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn so3_log_round_trip(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64, t in 0.0..(PI - 1e-6)) {
            let n = (x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let w = [x / n * t, y / n * t, z / n * t];
            let a0 = DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0]);
            let u = rot_exp(&a0);
            let a = rot_log(&Rotation::identity(3), &u).unwrap();
            prop_assert!((a - &a0).amax() < 1e-8);
        }

        #[test]
        fn so3_triangle_inequality(u1 in arb_so3(), u2 in arb_so3(), u3 in arb_so3()) {
            let d12 = d_so(&u1, &u2).unwrap();
            let d23 = d_so(&u2, &u3).unwrap();
            let d13 = d_so(&u1, &u3).unwrap();
            prop_assert!(d13 <= d12 + d23 + 1e-12);
            prop_assert!((d12 - d_so(&u2, &u1).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn constant_speed_geodesic(m1 in arb_point3(), m2 in arb_point3(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
            let k = MetricWeight::new(2.0).unwrap();
            let total = dist_m(&m1, &m2, k);
            let gs = geodesic(&m1, &m2, s).unwrap().point;
            let gt = geodesic(&m1, &m2, t).unwrap().point;
            prop_assert!((dist_m(&gs, &gt, k) - (s - t).abs() * total).abs() < 1e-8);
        }

        #[test]
        fn log_exp_round_trip_and_norm(m1 in arb_point3(), m2 in arb_point3()) {
            let k = MetricWeight::new(0.5).unwrap();
            let (v, inside) = log_map_flagged(&m1, &m2);
            let back = exp_map(&m1, &v).unwrap();
            prop_assert!(dist_m(&back, &m2, k) < 1e-9);
            prop_assert!((vectorize(&v, k).norm() - dist_m(&m1, &m2, k)).abs() < 1e-10);
            prop_assert_eq!(inside, linalg::frob(&v.skew()) < PI);
        }

        #[test]
        fn vectorize_is_isometry(r1 in proptest::collection::vec(-2.0..2.0f64, 6), r2 in proptest::collection::vec(-2.0..2.0f64, 6), kv in 0.1..5.0f64) {
            let k = MetricWeight::new(kv).unwrap();
            let v1 = devectorize(&DVector::from_vec(r1), 3, k).unwrap();
            let v2 = devectorize(&DVector::from_vec(r2), 3, k).unwrap();
            let lhs = vectorize(&v1, k).dot(&vectorize(&v2, k));
            let a1 = v1.skew();
            let a2 = v2.skew();
            let rhs = kv / 2.0 * (&a1 * a2.transpose()).trace() + v1.diag().dot(v2.diag());
            prop_assert!((lhs - rhs).abs() < 1e-10);
            let x = vectorize(&v1, k);
            prop_assert!((vectorize(&devectorize(&x, 3, k).unwrap(), k) - x).amax() < 1e-14);
        }
    }
}

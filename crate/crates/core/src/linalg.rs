//! Dense linear-algebra helpers shared by the geometric modules: symmetric
//! eigen-decompositions, spectral functions of symmetric matrices, and the
//! exponential / principal logarithm on SO(p).

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Rotation angles this close to π are treated as involutions.
pub(crate) const INVOLUTION_TOL: f64 = 1e-9;

/// Symmetric eigen-decomposition with eigenvalues sorted in descending order.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let p = m.nrows();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_iterator(p, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Applies `f` to the spectrum of a symmetric matrix.
pub fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen_desc(m);
    let mapped = DMatrix::from_diagonal(&vals.map(f));
    let out = &vecs * mapped * vecs.transpose();
    (&out + out.transpose()) * 0.5
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Max-abs deviation of `UᵀU` from the identity.
pub fn orthogonality_defect(u: &DMatrix<f64>) -> f64 {
    let p = u.nrows();
    let g = u.transpose() * u - DMatrix::<f64>::identity(p, p);
    g.amax()
}

/// Nearest orthogonal matrix in Frobenius norm (polar factor).
pub fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

fn hat3(w: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0])
}

/// Matrix exponential of an antisymmetric matrix.
pub fn skew_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    match a.nrows() {
        1 => DMatrix::identity(1, 1),
        2 => {
            let t = 0.5 * (a[(1, 0)] - a[(0, 1)]);
            let (s, c) = t.sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
        }
        3 => {
            let a = antisymmetrize(a);
            let w = [a[(2, 1)], a[(0, 2)], a[(1, 0)]];
            let theta2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            let theta = theta2.sqrt();
            let (c1, c2) = if theta < 1e-6 {
                (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
            } else {
                (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
            };
            let a2 = &a * &a;
            DMatrix::<f64>::identity(3, 3) + a * c1 + a2 * c2
        }
        _ => {
            let e = antisymmetrize(a).exp();
            // one polar step removes the Padé drift from orthogonality
            polar_orthogonal(&e)
        }
    }
}

/// Principal logarithm of a rotation matrix.
///
/// Returns the antisymmetric log together with a flag that is set when the
/// rotation is (numerically) an involution, i.e. one of its rotation angles
/// is π. In that case the log is not unique and a deterministic minimal-norm
/// branch is returned: the rotation axis (p = 3) or plane orientation is
/// chosen so that its first nonzero component is positive.
pub fn rotation_log(r: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    match r.nrows() {
        1 => (DMatrix::zeros(1, 1), false),
        2 => {
            let y = 0.5 * (r[(1, 0)] - r[(0, 1)]);
            let x = 0.5 * (r[(0, 0)] + r[(1, 1)]);
            let mut t = y.atan2(x);
            let involution = t.abs() > PI - INVOLUTION_TOL;
            if involution && y.abs() < 1e-13 {
                t = PI;
            }
            (DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]), involution)
        }
        3 => log_so3(r),
        _ => log_spectral(r),
    }
}

fn log_so3(r: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let w = [
        0.5 * (r[(2, 1)] - r[(1, 2)]),
        0.5 * (r[(0, 2)] - r[(2, 0)]),
        0.5 * (r[(1, 0)] - r[(0, 1)]),
    ];
    let s = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let c = 0.5 * (r[(0, 0)] + r[(1, 1)] + r[(2, 2)] - 1.0);
    let theta = s.atan2(c);
    let involution = theta > PI - INVOLUTION_TOL;

    if theta < PI - 1e-3 {
        let factor = if s < 1e-12 { 1.0 } else { theta / s };
        return (hat3([w[0] * factor, w[1] * factor, w[2] * factor]), involution);
    }

    // Near π: recover the axis from the symmetric part, (R + Rᵀ)/2 - cosθ I = (1 - cosθ) a aᵀ.
    let one_minus_c = 1.0 - theta.cos();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = 0.5 * (r[(i, j)] + r[(j, i)]) / one_minus_c;
        }
        b[i][i] -= theta.cos() / one_minus_c;
    }
    let k = (0..3)
        .max_by(|&i, &j| b[i][i].partial_cmp(&b[j][j]).unwrap())
        .unwrap();
    let mut a = [b[0][k], b[1][k], b[2][k]];
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    for v in a.iter_mut() {
        *v /= norm;
    }
    let dot = a[0] * w[0] + a[1] * w[1] + a[2] * w[2];
    let flip = if s > 1e-13 {
        dot < 0.0
    } else {
        a.iter()
            .find(|v| v.abs() > 1e-12)
            .map(|v| *v < 0.0)
            .unwrap_or(false)
    };
    if flip {
        for v in a.iter_mut() {
            *v = -*v;
        }
    }
    (hat3([a[0] * theta, a[1] * theta, a[2] * theta]), involution)
}

/// Log of a rotation for `p ≥ 4` from the spectral decomposition of its
/// symmetric part. Each eigenspace of `(R + Rᵀ)/2` with eigenvalue `cos θ` is
/// an invariant subspace on which the skew part equals `sin θ · J`.
fn log_spectral(r: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let p = r.nrows();
    let (vals, vecs) = sym_eigen_desc(r);
    let skew = antisymmetrize(r);
    let mut a = DMatrix::<f64>::zeros(p, p);
    let mut involution = false;
    let mut start = 0;
    while start < p {
        let mut end = start + 1;
        while end < p && vals[end - 1] - vals[end] <= 1e-10 {
            end += 1;
        }
        let m = end - start;
        let basis = vecs.columns(start, m).into_owned();
        let c = vals.rows(start, m).mean().clamp(-1.0, 1.0);
        let k = basis.transpose() * &skew * &basis;
        let s = k.norm() / (m as f64).sqrt();
        let theta = s.atan2(c);
        let block = if s > 1e-7 {
            k * (theta / s)
        } else if c < 0.0 {
            // half-turns: pair up the basis vectors of the −1 eigenspace
            let mut j = DMatrix::<f64>::zeros(m, m);
            for i in (0..m.saturating_sub(1)).step_by(2) {
                j[(i + 1, i)] = PI;
                j[(i, i + 1)] = -PI;
            }
            j
        } else {
            k
        };
        if theta > PI - INVOLUTION_TOL {
            involution = true;
        }
        a += &basis * block * basis.transpose();
        start = end;
    }
    (antisymmetrize(&a), involution)
}

/// Frobenius norm.
pub fn frob(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

//! Tangent coordinates of SPD samples and the comparison means used with them.

use crate::error::{Error, Result};
use crate::fiber::EPS_STRAT;
use crate::linalg::{frob, sym_apply, symmetrize};
use crate::manifold::{log_map_flagged, tangent_dim, vectorize, EigenDecomp, MetricWeight};
use crate::mean::fibers_of;
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Psr,
    LogEuclidean,
}

#[derive(Debug, Clone)]
pub enum Reference {
    Decomposition(EigenDecomp),
    Matrix(SpdMatrix),
}

#[derive(Debug, Clone)]
pub struct CoordinateCloud {
    pub reference: Reference,
    pub frame: Frame,
    /// One row per observation.
    pub coords: DMatrix<f64>,
    /// Rows whose rotation part lies outside the log-map chart.
    pub outside_chart: Vec<bool>,
}

impl CoordinateCloud {
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.coords.row(i).transpose()
    }

    pub fn mean(&self) -> DVector<f64> {
        self.coords.row_mean().transpose()
    }
}

fn check_same_dim(xs: &[SpdMatrix]) -> Result<usize> {
    let p = xs.first().ok_or(Error::EmptyInput)?.dim();
    match xs.iter().find(|x| x.dim() != p) {
        Some(x) => Err(Error::DimensionMismatch {
            expected: p,
            found: x.dim(),
        }),
        None => Ok(p),
    }
}

/// Diagonal entries first, then the upper off-diagonal entries scaled by
/// `√2` in lexicographic order. Isometric for the Frobenius inner product.
pub fn vecd(y: &DMatrix<f64>) -> DVector<f64> {
    let p = y.nrows();
    let mut out = Vec::with_capacity(tangent_dim(p));
    out.extend((0..p).map(|i| y[(i, i)]));
    for i in 0..p {
        for j in i + 1..p {
            out.push(SQRT_2 * 0.5 * (y[(i, j)] + y[(j, i)]));
        }
    }
    DVector::from_vec(out)
}

/// Inverse of [`vecd`].
pub fn unvecd(v: &DVector<f64>, p: usize) -> Result<DMatrix<f64>> {
    if v.len() != tangent_dim(p) {
        return Err(Error::DimensionMismatch {
            expected: tangent_dim(p),
            found: v.len(),
        });
    }
    let mut y = DMatrix::zeros(p, p);
    for i in 0..p {
        y[(i, i)] = v[i];
    }
    let mut idx = p;
    for i in 0..p {
        for j in i + 1..p {
            y[(i, j)] = v[idx] / SQRT_2;
            y[(j, i)] = y[(i, j)];
            idx += 1;
        }
    }
    Ok(y)
}

/// Rows are `vecd(Log X_i)`; the reference is the identity.
pub fn le_coordinates(xs: &[SpdMatrix]) -> Result<CoordinateCloud> {
    let p = check_same_dim(xs)?;
    let rows: Vec<DVector<f64>> = xs.par_iter().map(|x| vecd(&x.log())).collect();
    Ok(CoordinateCloud {
        reference: Reference::Matrix(SpdMatrix::identity(p)),
        frame: Frame::LogEuclidean,
        coords: stack_rows(&rows, tangent_dim(p)),
        outside_chart: vec![false; xs.len()],
    })
}

/// `Exp((1/n) Σ Log X_i)`.
pub fn le_mean(xs: &[SpdMatrix]) -> Result<SpdMatrix> {
    let p = check_same_dim(xs)?;
    let sum = xs
        .par_iter()
        .map(|x| x.log())
        .reduce(|| DMatrix::zeros(p, p), |a, b| a + b);
    SpdMatrix::exp_of(&(sum / xs.len() as f64))
}

#[derive(Debug, Clone)]
pub struct AiMean {
    pub matrix: SpdMatrix,
    pub converged: bool,
    pub iterations: usize,
    /// Frobenius norm of `(1/n) Σ Log(M^{-1/2} X_i M^{-1/2})` at the output.
    pub gradient_norm: f64,
}

fn ai_gradient(xs: &[SpdMatrix], m: &SpdMatrix) -> DMatrix<f64> {
    let p = m.dim();
    let w = m.inv_sqrt();
    let sum = xs
        .par_iter()
        .map(|x| sym_apply(&symmetrize(&(&w * x.matrix() * &w)), f64::ln))
        .reduce(|| DMatrix::zeros(p, p), |a, b| a + b);
    sum / xs.len() as f64
}

/// Affine-invariant Fréchet mean by the fixed-point iteration
/// `M ← M^{1/2} Exp(G) M^{1/2}`, started at the log-Euclidean mean.
pub fn ai_mean(xs: &[SpdMatrix], tol: f64, max_iter: usize) -> Result<AiMean> {
    let mut m = le_mean(xs)?;
    let mut g = ai_gradient(xs, &m);
    let mut iterations = 0;
    while frob(&g) >= tol && iterations < max_iter {
        let s = m.sqrt();
        let step = sym_apply(&g, f64::exp);
        m = SpdMatrix::new(symmetrize(&(&s * step * &s)))?;
        g = ai_gradient(xs, &m);
        iterations += 1;
    }
    let gradient_norm = frob(&g);
    Ok(AiMean {
        matrix: m,
        converged: gradient_norm < tol,
        iterations,
        gradient_norm,
    })
}

/// Row `i` is `vec(Log_ref(m_i))` where `m_i` is the element of the fiber of
/// `X_i` nearest to `reference`.
pub fn psr_coordinates(xs: &[SpdMatrix], reference: &EigenDecomp, k: MetricWeight) -> Result<CoordinateCloud> {
    let p = check_same_dim(xs)?;
    if p != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: p,
        });
    }
    let fibers = fibers_of(xs, EPS_STRAT)?;
    let rows: Vec<(DVector<f64>, bool)> = fibers
        .par_iter()
        .map(|f| {
            let hit = f.nearest(reference, k)?;
            let (v, inside) = log_map_flagged(reference, &hit.element);
            Ok((vectorize(&v, k), !inside))
        })
        .collect::<Result<_>>()?;
    let (vecs, outside): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(CoordinateCloud {
        reference: Reference::Decomposition(reference.clone()),
        frame: Frame::Psr,
        coords: stack_rows(&vecs, tangent_dim(p)),
        outside_chart: outside,
    })
}

pub(crate) fn stack_rows(rows: &[DVector<f64>], d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j])
}

//! Symmetric positive-definite matrices, the data objects of the library.

use crate::error::{Error, Result};
use crate::linalg::{sym_apply, sym_eigen_desc, symmetrize};
use crate::manifold::{EigenDecomp, PosDiag, Rotation};
use nalgebra::{DMatrix, DVector};

/// Relative asymmetry accepted (and removed) on construction.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix(DMatrix<f64>);

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter("non-finite matrix entry".into()));
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let m = if asym == 0.0 { m } else { symmetrize(&m) };
        let (vals, _) = sym_eigen_desc(&m);
        let min = vals[vals.len() - 1];
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(Self(m))
    }

    /// Builds from the upper triangle in row-major order, diagonal included.
    pub fn from_upper(p: usize, upper: &[f64]) -> Result<Self> {
        let expected = p * (p + 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut m = DMatrix::zeros(p, p);
        let mut k = 0;
        for i in 0..p {
            for j in i..p {
                m[(i, j)] = upper[k];
                m[(j, i)] = upper[k];
                k += 1;
            }
        }
        Self::new(m)
    }

    pub fn identity(p: usize) -> Self {
        Self(DMatrix::identity(p, p))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    /// `exp(Y)` of a symmetric matrix.
    pub fn exp_of(sym: &DMatrix<f64>) -> Result<Self> {
        Self::new(sym_apply(&symmetrize(sym), f64::exp))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self(symmetrize(&m))
    }

    pub fn upper(&self) -> Vec<f64> {
        let p = self.dim();
        let mut out = Vec::with_capacity(p * (p + 1) / 2);
        for i in 0..p {
            for j in i..p {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        sym_eigen_desc(&self.0).0
    }

    pub fn log_eigenvalues(&self) -> DVector<f64> {
        self.eigenvalues().map(f64::ln)
    }

    /// Canonical eigen-decomposition: eigenvalues descending, eigenvector
    /// matrix with determinant +1 (last column negated if needed).
    pub fn canonical_decomposition(&self) -> EigenDecomp {
        let (vals, mut vecs) = sym_eigen_desc(&self.0);
        let p = self.dim();
        if vecs.determinant() < 0.0 {
            let last = -vecs.column(p - 1);
            vecs.set_column(p - 1, &last);
        }
        EigenDecomp::from_parts_unchecked(
            Rotation::from_matrix_unchecked(vecs),
            PosDiag::from_log_unchecked(vals.map(f64::ln)),
        )
    }

    /// Principal matrix logarithm (symmetric).
    pub fn log(&self) -> DMatrix<f64> {
        sym_apply(&self.0, f64::ln)
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        sym_apply(&self.0, f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        sym_apply(&self.0, |v| 1.0 / v.sqrt())
    }

    pub fn inverse(&self) -> SpdMatrix {
        Self::from_matrix_unchecked(sym_apply(&self.0, |v| 1.0 / v))
    }

    pub fn scaled(&self, c: f64) -> SpdMatrix {
        Self::from_matrix_unchecked(&self.0 * c)
    }

    /// `R X Rᵀ`.
    pub fn conjugated(&self, r: &DMatrix<f64>) -> SpdMatrix {
        Self::from_matrix_unchecked(r * &self.0 * r.transpose())
    }

    /// `G X Gᵀ` for an arbitrary invertible `G`.
    pub fn congruence(&self, g: &DMatrix<f64>) -> Result<SpdMatrix> {
        SpdMatrix::new(symmetrize(&(g * &self.0 * g.transpose())))
    }
}

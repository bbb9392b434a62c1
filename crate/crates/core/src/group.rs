//! The group of even signed-permutation matrices and its action on `M(p)`.
//!
//! An element `h` acts by `h·(U, D) = (U hᵀ, h D hᵀ)`: columns of `U` are
//! permuted and sign-flipped, and the diagonal of `D` is permuted alongside.
//! The action preserves `U D Uᵀ` and is an isometry of `M(p)`.

use crate::error::{Error, Result};
use crate::manifold::{so_dist, EigenDecomp, MetricWeight, PosDiag, Rotation};
use nalgebra::{DMatrix, DVector};
use itertools::Itertools;
use std::sync::OnceLock;

/// Largest dimension for which the group is enumerated (1920 elements).
pub const MAX_GROUP_DIM: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPerm {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

fn perm_parity(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut parity = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            parity = -parity;
        }
    }
    parity
}

impl SignedPerm {
    /// Builds the element sending `e_j` to `signs[j] · e_{perm[j]}`.
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let p = perm.len();
        if signs.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: signs.len(),
            });
        }
        let mut hit = vec![false; p];
        for &i in &perm {
            if i >= p || hit[i] {
                return Err(Error::BadParameter(format!("{perm:?} is not a permutation")));
            }
            hit[i] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::BadParameter("signs must be ±1".into()));
        }
        let h = Self { perm, signs };
        if h.det() != 1 {
            return Err(Error::BadParameter("signed permutation has determinant −1".into()));
        }
        Ok(h)
    }

    pub fn identity(p: usize) -> Self {
        Self {
            perm: (0..p).collect(),
            signs: vec![1; p],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn det(&self) -> i8 {
        perm_parity(&self.perm) * self.signs.iter().product::<i8>()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut m = DMatrix::zeros(p, p);
        for j in 0..p {
            m[(self.perm[j], j)] = f64::from(self.signs[j]);
        }
        m
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let p = self.dim();
        let mut perm = vec![0; p];
        let mut signs = vec![1; p];
        for j in 0..p {
            let mid = other.perm[j];
            perm[j] = self.perm[mid];
            signs[j] = other.signs[j] * self.signs[mid];
        }
        SignedPerm { perm, signs }
    }

    pub fn inverse(&self) -> SignedPerm {
        let p = self.dim();
        let mut perm = vec![0; p];
        let mut signs = vec![1; p];
        for j in 0..p {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        SignedPerm { perm, signs }
    }

    /// `h·(U, D) = (U hᵀ, h D hᵀ)`.
    pub fn act(&self, m: &EigenDecomp) -> EigenDecomp {
        let u = m.rotation().matrix();
        let log = m.diag().log();
        let p = self.dim();
        let mut new_u = DMatrix::zeros(p, p);
        let mut new_log = DVector::zeros(p);
        for j in 0..p {
            let dst = self.perm[j];
            let col = u.column(j) * f64::from(self.signs[j]);
            new_u.set_column(dst, &col);
            new_log[dst] = log[j];
        }
        EigenDecomp::from_parts_unchecked(
            Rotation::from_matrix_unchecked(new_u),
            PosDiag::from_log_unchecked(new_log),
        )
    }
}

/// Applies `h` to `m`; see [`SignedPerm::act`].
pub fn act(h: &SignedPerm, m: &EigenDecomp) -> EigenDecomp {
    h.act(m)
}

fn build_group(p: usize) -> Vec<SignedPerm> {
    let mut out = Vec::with_capacity((1 << (p - 1)) * (1..=p).product::<usize>());
    for perm in (0..p).permutations(p) {
        let parity = perm_parity(&perm);
        for mask in 0u32..(1 << p) {
            let signs: Vec<i8> = (0..p).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
            if parity * signs.iter().product::<i8>() == 1 {
                out.push(SignedPerm {
                    perm: perm.clone(),
                    signs,
                });
            }
        }
    }
    out
}

static GROUPS: [OnceLock<Vec<SignedPerm>>; MAX_GROUP_DIM + 1] =
    [const { OnceLock::new() }; MAX_GROUP_DIM + 1];

/// All `2^{p−1} p!` elements, identity first. Cached per `p`.
pub fn enumerate_group(p: usize) -> Result<&'static [SignedPerm]> {
    if p > MAX_GROUP_DIM {
        return Err(Error::DimensionTooLarge { p });
    }
    if p < 2 {
        return Err(Error::UnsupportedDimension { p, what: "the signed-permutation group" });
    }
    Ok(GROUPS[p].get_or_init(|| build_group(p)))
}

pub fn group_order(p: usize) -> usize {
    (1 << (p - 1)) * (1..=p).product::<usize>()
}

/// `𝒢(p)·m`, in group enumeration order.
pub fn orbit(m: &EigenDecomp) -> Result<Vec<EigenDecomp>> {
    Ok(enumerate_group(m.dim())?.iter().map(|h| h.act(m)).collect())
}

/// Smallest rotation distance from the identity to a non-identity element.
pub fn beta_g(p: usize) -> Result<f64> {
    let id = DMatrix::identity(p, p);
    Ok(enumerate_group(p)?
        .iter()
        .filter(|h| !h.is_identity())
        .map(|h| so_dist(&id, &h.matrix()))
        .fold(f64::INFINITY, f64::min))
}

/// Uniqueness radius `√k · β / 4` for the sample mean orbit.
pub fn r_cx(p: usize, k: MetricWeight) -> Result<f64> {
    Ok(k.value().sqrt() * beta_g(p)? / 4.0)
}

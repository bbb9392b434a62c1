//! Synthetic samplers. Every sampler is deterministic given its seed.

use super::coords::unvecd;
use crate::error::{Error, Result};
use crate::linalg::{skew_exp, sym_eigen_desc};
use crate::manifold::{devectorize, so_dim, tangent_dim, EigenDecomp, MetricWeight, PosDiag, Rotation};
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use std::f64::consts::PI;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("{name} must be positive, got {v}")))
    }
}

fn nonzero(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::BadParameter("sample size must be positive".into()))
    } else {
        Ok(())
    }
}

/// Draws `R(θ) diag(e^{D1}, e^{D2}) R(θ)ᵀ` with `θ ~ N(0, σ_θ²)` truncated to
/// `(−π, π)` and `D ~ N((μ1, μ2), σ_D² I)`.
pub fn sample_model_2d(
    n: usize,
    sigma_theta: f64,
    mu: (f64, f64),
    sigma_d: f64,
    seed: u64,
) -> Result<Vec<SpdMatrix>> {
    nonzero(n)?;
    positive("sigma_theta", sigma_theta)?;
    positive("sigma_d", sigma_d)?;
    let angle = Normal::new(0.0, sigma_theta).map_err(|e| Error::BadParameter(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let theta: f64 = angle.sample(&mut rng);
        let d1 = mu.0 + sigma_d * rng.sample::<f64, _>(StandardNormal);
        let d2 = mu.1 + sigma_d * rng.sample::<f64, _>(StandardNormal);
        if theta.abs() >= PI {
            continue;
        }
        let m = EigenDecomp::new(Rotation::planar(theta), PosDiag::from_log(DVector::from_vec(vec![d1, d2]))?)?;
        out.push(m.compose());
    }
    Ok(out)
}

/// General-`p` analogue of [`sample_model_2d`]: `U = Exp(A) U0` with the
/// rotation coefficients of `A` i.i.d. `N(0, σ_rot²)`, rejected unless the
/// rotation distance `‖A‖_F/√2` is below `π`, and `log D ~ N(log D0, σ_D² I)`.
pub fn sample_model(center: &EigenDecomp, sigma_rot: f64, sigma_d: f64, n: usize, seed: u64) -> Result<Vec<SpdMatrix>> {
    nonzero(n)?;
    positive("sigma_rot", sigma_rot)?;
    positive("sigma_d", sigma_d)?;
    let p = center.dim();
    let q = so_dim(p);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut v = DVector::from_fn(tangent_dim(p), |_, _| rng.sample::<f64, _>(StandardNormal));
        v.rows_mut(0, q).scale_mut(sigma_rot);
        v.rows_mut(q, p).scale_mut(sigma_d);
        if v.rows(0, q).norm() >= PI {
            continue;
        }
        let t = devectorize(&v, p, MetricWeight::default())?;
        let a = t.skew();
        let l = t.diag().clone();
        let u = Rotation::new(skew_exp(&a) * center.rotation().matrix())?;
        let d = PosDiag::from_log(center.diag().log() + l)?;
        out.push(EigenDecomp::new(u, d)?.compose());
    }
    Ok(out)
}

/// Log-normal SPD draws: `vecd(Log X) ~ N(vecd(mean_log), cov)`.
pub fn sample_spd_lognormal(n: usize, mean_log: &DMatrix<f64>, cov: &DMatrix<f64>, seed: u64) -> Result<Vec<SpdMatrix>> {
    nonzero(n)?;
    let p = mean_log.nrows();
    let d = tangent_dim(p);
    if mean_log.ncols() != p || cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: cov.nrows(),
        });
    }
    if (cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
        return Err(Error::BadParameter("covariance is not symmetric".into()));
    }
    let (vals, vecs) = sym_eigen_desc(cov);
    let floor = -1e-12 * vals.amax().max(1.0);
    if vals.iter().any(|&v| v < floor) {
        return Err(Error::BadParameter("covariance is not positive semidefinite".into()));
    }
    let root = &vecs * DMatrix::from_diagonal(&vals.map(|v| v.max(0.0).sqrt()));
    let center = super::coords::vecd(mean_log);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            SpdMatrix::exp_of(&unvecd(&(&center + &root * z), p)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::coords::le_coordinates;

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_model_2d(0, 0.1, (0.0, 0.0), 0.1, 1).is_err());
        assert!(sample_model_2d(5, 0.0, (0.0, 0.0), 0.1, 1).is_err());
        assert!(sample_model_2d(5, 0.1, (0.0, 0.0), -1.0, 1).is_err());
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -0.5, 1.0]));
        assert!(sample_spd_lognormal(5, &DMatrix::zeros(2, 2), &cov, 1).is_err());
    }

    #[test]
    fn tiny_noise_concentrates_at_center() {
        let xs = sample_model_2d(50, 1e-9, (2.0, 0.0), 1e-9, 7).unwrap();
        let center = DMatrix::from_diagonal(&DVector::from_vec(vec![2f64.exp(), 1.0]));
        for x in &xs {
            assert!((x.matrix() - &center).amax() < 1e-6);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = sample_model_2d(20, 0.3, (1.0, 0.0), 0.2, 42).unwrap();
        let b = sample_model_2d(20, 0.3, (1.0, 0.0), 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_model_2d(20, 0.3, (1.0, 0.0), 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn angle_spread_matches_sigma() {
        let sigma = 0.1;
        let xs = sample_model_2d(10_000, sigma, (2.0, 0.0), 0.05, 1).unwrap();
        // The leading eigenvector of R(θ)diag(e², 1)R(θ)ᵀ is (cos θ, sin θ).
        let thetas: Vec<f64> = xs
            .iter()
            .map(|x| {
                let v = x.canonical_decomposition().rotation().matrix().column(0).into_owned();
                (v[1] / v[0]).atan()
            })
            .collect();
        let n = thetas.len() as f64;
        let mean = thetas.iter().sum::<f64>() / n;
        let sd = (thetas.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd / sigma - 1.0).abs() < 0.05, "sd = {sd}");
    }

    #[test]
    fn zero_covariance_gives_constant_draws() {
        let mean_log = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, -0.5]);
        let xs = sample_spd_lognormal(4, &mean_log, &DMatrix::zeros(3, 3), 3).unwrap();
        let target = SpdMatrix::exp_of(&mean_log).unwrap();
        for x in &xs {
            assert!((x.matrix() - target.matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn lognormal_centers_at_mean_log() {
        let mean_log = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -0.5]);
        let cov = DMatrix::from_row_slice(3, 3, &[0.2, 0.05, 0.0, 0.05, 0.1, 0.0, 0.0, 0.0, 0.3]);
        let n = 10_000;
        let xs = sample_spd_lognormal(n, &mean_log, &cov, 8).unwrap();
        let m = le_coordinates(&xs).unwrap().mean();
        let target = crate::inference::coords::vecd(&mean_log);
        for i in 0..3 {
            let band = 3.0 * (cov[(i, i)] / n as f64).sqrt();
            assert!((m[i] - target[i]).abs() < band, "coordinate {i}");
        }
    }

    #[test]
    fn general_model_draws_requested_count() {
        let center = EigenDecomp::new(Rotation::identity(3), PosDiag::new(&[4.0, 2.0, 1.0]).unwrap()).unwrap();
        let xs = sample_model(&center, 0.05, 0.05, 30, 2).unwrap();
        assert_eq!(xs.len(), 30);
        assert!(xs.iter().all(|x| x.dim() == 3));
    }
}

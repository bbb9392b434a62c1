//! Bootstrap estimate of the sampling covariance of the PSR mean, expressed
//! in tangent coordinates at the sample mean.

use super::coords::stack_rows;
use crate::error::{Error, Result};
use crate::fiber::Fiber;
use crate::group::orbit;
use crate::manifold::{dist_m_sq, log_map_flagged, tangent_dim, vectorize, EigenDecomp};
use crate::mean::{fibers_of, psr_mean_fibers, MeanOptions};
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct BootstrapCov {
    /// The sample PSR mean the replicates are centred at.
    pub center: EigenDecomp,
    /// `(1/B') Σ φ(m_b*) φ(m_b*)ᵀ` over the `B'` successful replicates.
    pub cov: DMatrix<f64>,
    /// One row `φ(m_b*)` per successful replicate.
    pub replicates: DMatrix<f64>,
    pub used: usize,
    pub failed: usize,
}

/// Runs the PSR mean on `xs`, then bootstraps around it.
pub fn bootstrap_cov(xs: &[SpdMatrix], b: usize, seed: u64, opts: &MeanOptions) -> Result<BootstrapCov> {
    let fibers = fibers_of(xs, opts.eps_strat)?;
    let center = psr_mean_fibers(&fibers, None, opts)?.mean;
    bootstrap_cov_at(&fibers, &center, b, seed, opts)
}

/// Replicate `r` draws its resample from stream `r` of a ChaCha generator
/// seeded with `seed`, so the result does not depend on scheduling.
pub fn bootstrap_cov_at(
    fibers: &[Fiber],
    center: &EigenDecomp,
    b: usize,
    seed: u64,
    opts: &MeanOptions,
) -> Result<BootstrapCov> {
    if b == 0 {
        return Err(Error::BadParameter("number of bootstrap replicates must be positive".into()));
    }
    if fibers.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = tangent_dim(center.dim());
    let outcomes: Vec<Result<DVector<f64>>> = (0..b as u64)
        .into_par_iter()
        .map(|r| replicate(fibers, center, seed, r, opts))
        .collect();
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    let rows: Vec<DVector<f64>> = outcomes.into_iter().filter_map(|o| o.ok()).collect();
    if rows.is_empty() {
        return Err(outcome_error(fibers, center, seed, opts));
    }
    let replicates = stack_rows(&rows, d);
    let mut cov = replicates.transpose() * &replicates / rows.len() as f64;
    cov = (&cov + cov.transpose()) * 0.5;
    Ok(BootstrapCov {
        center: center.clone(),
        cov,
        replicates,
        used: rows.len(),
        failed,
    })
}

fn outcome_error(fibers: &[Fiber], center: &EigenDecomp, seed: u64, opts: &MeanOptions) -> Error {
    match replicate(fibers, center, seed, 0, opts) {
        Err(e) => e,
        Ok(_) => Error::BadParameter("all bootstrap replicates failed".into()),
    }
}

fn replicate(fibers: &[Fiber], center: &EigenDecomp, seed: u64, r: u64, opts: &MeanOptions) -> Result<DVector<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(r);
    let n = fibers.len();
    let sample: Vec<Fiber> = (0..n).map(|_| fibers[rng.random_range(0..n)].clone()).collect();
    let mean = psr_mean_fibers(&sample, Some(center), opts)?.mean;
    let closest = closest_in_orbit(&mean, center, opts)?;
    Ok(vectorize(&log_map_flagged(center, &closest).0, opts.k))
}

/// Orbit member of `m` nearest to `target`; the first one on ties.
pub fn closest_in_orbit(m: &EigenDecomp, target: &EigenDecomp, opts: &MeanOptions) -> Result<EigenDecomp> {
    let members = orbit(m)?;
    let mut best = (f64::INFINITY, 0);
    for (i, g) in members.iter().enumerate() {
        let d2 = dist_m_sq(g, target, opts.k);
        if d2 < best.0 {
            best = (d2, i);
        }
    }
    Ok(members[best.1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::sampling::sample_model_2d;
    use crate::manifold::{MetricWeight, PosDiag, Rotation};

    fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
        m.clone().symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn constant_data_has_zero_covariance() {
        let x = EigenDecomp::new(Rotation::planar(0.3), PosDiag::new(&[3.0, 1.0]).unwrap()).unwrap().compose();
        let xs = vec![x; 10];
        let bc = bootstrap_cov(&xs, 20, 1, &MeanOptions::default()).unwrap();
        assert_eq!(bc.used, 20);
        assert!(bc.cov.amax() < 1e-20);
    }

    #[test]
    fn zero_replicates_rejected() {
        let xs = sample_model_2d(5, 0.1, (1.0, 0.0), 0.1, 1).unwrap();
        assert!(matches!(bootstrap_cov(&xs, 0, 1, &MeanOptions::default()), Err(Error::BadParameter(_))));
    }

    #[test]
    fn covariance_is_symmetric_psd_and_reproducible() {
        let xs = sample_model_2d(40, 0.3, (1.0, 0.0), 0.2, 4).unwrap();
        let opts = MeanOptions {
            k: MetricWeight::new(2.0).unwrap(),
            ..MeanOptions::default()
        };
        let a = bootstrap_cov(&xs, 30, 77, &opts).unwrap();
        let b = bootstrap_cov(&xs, 30, 77, &opts).unwrap();
        assert_eq!(a.cov, b.cov);
        assert_eq!(a.cov, a.cov.transpose());
        assert!(min_eigenvalue(&a.cov) >= -1e-12);
        assert_eq!(a.failed, 0);
    }

    #[test]
    fn trace_shrinks_with_sample_size() {
        // Averaged over independent datasets so the ratio is not dominated by
        // the spread of a single estimate.
        let opts = MeanOptions::default();
        let mean_trace = |n: usize, base: u64| {
            (0..8)
                .map(|s| {
                    let xs = sample_model_2d(n, 0.2, (2.0, 0.0), 0.2, base + s).unwrap();
                    bootstrap_cov(&xs, 200, s, &opts).unwrap().cov.trace()
                })
                .sum::<f64>()
        };
        let ratio = mean_trace(100, 100) / mean_trace(200, 200);
        assert!((1.6..=2.5).contains(&ratio), "ratio {ratio}");
    }
}

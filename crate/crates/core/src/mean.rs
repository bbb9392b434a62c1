//! Fréchet means on `SO(p)` and `Diag⁺(p)`, the sample partial
//! scaling-rotation (PSR) mean, and minimization of the scaling-rotation
//! objective over the lower strata.
//!
//! The PSR mean alternates two steps:
//!
//! 1. for every observation pick the element of its fiber nearest to the
//!    current estimate;
//! 2. replace the estimate by the product of the Fréchet means of the picked
//!    rotations and diagonals.
//!
//! Neither step increases `f_PSR(m) = (1/n) Σ d_PSR(X_i, m)²`.

use crate::distance::{d_sr_fibers, mean_sq_sr};
use crate::error::{Error, Result};
use crate::fiber::{circle_match, fiber_of, Fiber, FiberMatch, EPS_STRAT};
use crate::group::{enumerate_group, group_order, orbit};
use crate::linalg::{frob, rotation_log, skew_exp};
use crate::manifold::{EigenDecomp, MetricWeight, PosDiag, Rotation};
use crate::spd::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct MeanOptions {
    pub k: MetricWeight,
    /// Stop once an outer pass lowers the objective by no more than this.
    pub eps: f64,
    pub max_outer: usize,
    pub so_tol: f64,
    pub so_max_iter: usize,
    pub eps_strat: f64,
}

impl Default for MeanOptions {
    fn default() -> Self {
        Self {
            k: MetricWeight::default(),
            eps: 1e-12,
            max_outer: 100,
            so_tol: 1e-10,
            so_max_iter: 1000,
            eps_strat: EPS_STRAT,
        }
    }
}

/// Iterations without halving the best gradient norm before giving up.
const STALL_WINDOW: usize = 50;

#[derive(Debug, Clone)]
pub struct SoMean {
    pub rotation: Rotation,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Number of relative rotations met at angle π, where the log branch is
    /// fixed by convention.
    pub involution_hits: usize,
}

pub fn frechet_mean_diag(ds: &[PosDiag]) -> Result<PosDiag> {
    let first = ds.first().ok_or(Error::EmptyInput)?;
    let mut sum = DVector::zeros(first.dim());
    for d in ds {
        if d.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: d.dim(),
            });
        }
        sum += d.log();
    }
    Ok(PosDiag::from_log_unchecked(sum / ds.len() as f64))
}

/// `(1/n) Σ ‖Log(U_i Uᵀ)‖²_F`.
pub fn so_objective(us: &[Rotation], u: &Rotation) -> f64 {
    us.iter()
        .map(|ui| frob(&rotation_log(&(ui.matrix() * u.matrix().transpose())).0).powi(2))
        .sum::<f64>()
        / us.len() as f64
}

/// `G = (1/n) Σ Log(U_i Uᵀ)`. Along `t ↦ Exp(tE) U` the objective has
/// derivative `−2⟨G, E⟩_F` at `t = 0`, so `G` is the descent direction.
pub fn so_gradient(us: &[Rotation], u: &Rotation) -> DMatrix<f64> {
    gradient_with_hits(us, u).0
}

fn gradient_with_hits(us: &[Rotation], u: &Rotation) -> (DMatrix<f64>, usize) {
    let p = u.dim();
    let mut g = DMatrix::zeros(p, p);
    let mut hits = 0;
    for ui in us {
        let (a, involution) = rotation_log(&(ui.matrix() * u.matrix().transpose()));
        hits += usize::from(involution);
        g += a;
    }
    (g / us.len() as f64, hits)
}

/// Karcher mean by Riemannian gradient descent `U ← Exp(s G) U` with unit
/// step, halved while the objective would increase.
pub fn frechet_mean_so(us: &[Rotation], init: &Rotation, tol: f64, max_iter: usize) -> Result<SoMean> {
    if us.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = us.iter().find(|u| u.dim() != init.dim()) {
        return Err(Error::DimensionMismatch {
            expected: init.dim(),
            found: bad.dim(),
        });
    }
    let mut u = init.clone();
    let mut f = so_objective(us, &u);
    let mut involution_hits = 0;
    let mut best_norm = f64::INFINITY;
    let mut since_best = 0;
    for iteration in 0..max_iter {
        let (g, hits) = gradient_with_hits(us, &u);
        involution_hits += hits;
        let gradient_norm = frob(&g);
        if gradient_norm < 0.5 * best_norm {
            best_norm = gradient_norm;
            since_best = 0;
        } else {
            since_best += 1;
        }
        // Rounding in the logs of near-half-turn rotations puts a floor under
        // the attainable gradient norm; stop once progress stalls there.
        if gradient_norm < tol || since_best >= STALL_WINDOW {
            return Ok(SoMean {
                rotation: u,
                converged: gradient_norm < tol,
                iterations: iteration,
                gradient_norm,
                involution_hits,
            });
        }
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let candidate = Rotation::from_matrix_unchecked(skew_exp(&(&g * step)) * u.matrix());
            let fc = so_objective(us, &candidate);
            if fc <= f {
                u = candidate;
                f = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return Ok(SoMean {
                rotation: u,
                converged: false,
                iterations: iteration,
                gradient_norm,
                involution_hits,
            });
        }
    }
    let gradient_norm = frob(&so_gradient(us, &u));
    Ok(SoMean {
        rotation: u,
        converged: gradient_norm < tol,
        iterations: max_iter,
        gradient_norm,
        involution_hits,
    })
}

#[derive(Debug, Clone)]
pub struct MeanResult {
    /// One representative of the mean orbit.
    pub mean: EigenDecomp,
    pub orbit_size: usize,
    /// Final value of `f_PSR`.
    pub objective: f64,
    /// `f_PSR` at the initial point and after every accepted pass.
    pub objective_trace: Vec<f64>,
    /// Passes that lowered the objective by more than `eps`.
    pub iterations: usize,
    /// All passes run, including a final one that confirmed convergence.
    pub passes: usize,
    pub converged: bool,
    /// Step-1 selections at the returned mean.
    pub matched_fibers: Vec<EigenDecomp>,
    /// Per accepted pass, the number of finite-fiber observations whose
    /// selected decomposition changed.
    pub selection_changes: Vec<usize>,
    /// Passes whose objective rose through rounding and were discarded.
    pub rejected_steps: usize,
    pub involution_hits: usize,
}

fn select(fibers: &[Fiber], m: &EigenDecomp, k: MetricWeight) -> Result<Vec<FiberMatch>> {
    fibers.par_iter().map(|f| f.nearest(m, k)).collect()
}

fn mean_sq(matches: &[FiberMatch]) -> f64 {
    matches.iter().map(|h| h.dist * h.dist).sum::<f64>() / matches.len() as f64
}

pub fn fibers_of(xs: &[SpdMatrix], eps_strat: f64) -> Result<Vec<Fiber>> {
    xs.par_iter().map(|x| fiber_of(x, eps_strat)).collect()
}

/// Sample PSR mean. `init` defaults to the canonical decomposition of the
/// first observation.
pub fn psr_mean(xs: &[SpdMatrix], init: Option<&EigenDecomp>, opts: &MeanOptions) -> Result<MeanResult> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fibers = fibers_of(xs, opts.eps_strat)?;
    psr_mean_fibers(&fibers, init, opts)
}

/// [`psr_mean`] on precomputed fibers.
pub fn psr_mean_fibers(fibers: &[Fiber], init: Option<&EigenDecomp>, opts: &MeanOptions) -> Result<MeanResult> {
    let first = fibers.first().ok_or(Error::EmptyInput)?;
    let p = first.dim();
    if let Some(bad) = fibers.iter().find(|f| f.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.dim(),
        });
    }
    let k = opts.k;
    let mut m = match init {
        Some(m) if m.dim() != p => {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: m.dim(),
            })
        }
        Some(m) => m.clone(),
        None => first.representative(),
    };
    let mut selection = select(fibers, &m, k)?;
    let mut f = mean_sq(&selection);
    let mut trace = vec![f];
    let mut iterations = 0;
    let mut passes = 0;
    let mut converged = false;
    let mut selection_changes = Vec::new();
    let mut rejected_steps = 0;
    let mut involution_hits = 0;

    while passes < opts.max_outer {
        passes += 1;
        let rotations: Vec<Rotation> = selection.iter().map(|s| s.element.rotation().clone()).collect();
        let diags: Vec<PosDiag> = selection.iter().map(|s| s.element.diag().clone()).collect();
        let so = frechet_mean_so(&rotations, m.rotation(), opts.so_tol, opts.so_max_iter)?;
        involution_hits += so.involution_hits;
        let candidate = EigenDecomp::from_parts_unchecked(so.rotation, frechet_mean_diag(&diags)?);
        let next = select(fibers, &candidate, k)?;
        let f_next = mean_sq(&next);
        if f_next > f {
            rejected_steps += 1;
            converged = f_next - f <= 1e-9 * (1.0 + f);
            break;
        }
        selection_changes.push(
            selection
                .iter()
                .zip(&next)
                .filter(|(a, b)| a.index.is_some() && a.index != b.index)
                .count(),
        );
        let decrease = f - f_next;
        m = candidate;
        selection = next;
        f = f_next;
        trace.push(f);
        if decrease <= opts.eps {
            converged = true;
            break;
        }
        iterations += 1;
    }

    Ok(MeanResult {
        mean: m,
        orbit_size: group_order(p),
        objective: f,
        objective_trace: trace,
        iterations,
        passes,
        converged,
        matched_fibers: selection.into_iter().map(|s| s.element).collect(),
        selection_changes,
        rejected_steps,
        involution_hits,
    })
}

/// Runs [`psr_mean`] from every observation's canonical decomposition and
/// keeps the lowest objective (earliest start on ties).
pub fn psr_mean_multistart(xs: &[SpdMatrix], opts: &MeanOptions) -> Result<MeanResult> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fibers = fibers_of(xs, opts.eps_strat)?;
    let runs: Vec<MeanResult> = fibers
        .par_iter()
        .map(|f| psr_mean_fibers(&fibers, Some(&f.representative()), opts))
        .collect::<Result<_>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.objective < best.objective { r } else { best })
        .expect("non-empty"))
}

/// `f_PSR(m) = (1/n) Σ d_PSR(X_i, m)²`.
pub fn f_psr(xs: &[SpdMatrix], m: &EigenDecomp, k: MetricWeight) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(mean_sq(&select(&fibers_of(xs, EPS_STRAT)?, m, k)?))
}

/// `f_SR(S) = (1/n) Σ d_SR(X_i, S)²`.
pub fn f_sr(xs: &[SpdMatrix], s: &SpdMatrix, k: MetricWeight) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fibers = fibers_of(xs, EPS_STRAT)?;
    f_sr_fibers(&fibers, s, k)
}

pub(crate) fn f_sr_fibers(fibers: &[Fiber], s: &SpdMatrix, k: MetricWeight) -> Result<f64> {
    let p = s.dim();
    let logs = s.log_eigenvalues();
    if crate::fiber::stratum_of_logs(&logs, EPS_STRAT).tag == crate::fiber::StratumTag::Bottom {
        let c = DVector::from_element(p, logs.mean());
        return Ok(fibers.iter().map(|f| (f.log_eigenvalues() - &c).norm_squared()).sum::<f64>() / fibers.len() as f64);
    }
    mean_sq_sr(fibers, &fiber_of(s, EPS_STRAT)?, k)
}

/// The orbit `𝒢(p)·m`; every member has the same `f_PSR`.
pub fn mean_orbit(m: &EigenDecomp) -> Result<Vec<EigenDecomp>> {
    orbit(m)
}

/// Minimum of `f_SR` over the lower strata.
#[derive(Debug, Clone)]
pub struct LowerMinimum {
    pub matrix: SpdMatrix,
    pub value: f64,
    /// True when the value is a closed form; false for a restarted local
    /// search, which may overshoot the true minimum.
    pub exact: bool,
}

const LOWER_RESTARTS: usize = 20;
const LOWER_OBS_STARTS: usize = 5;
const LOWER_MAX_ITER: usize = 200;
const LOWER_SEED: u64 = 0x5eed_10;

pub fn minimize_fsr_lower(xs: &[SpdMatrix], k: MetricWeight) -> Result<LowerMinimum> {
    let fibers = fibers_of(xs, EPS_STRAT)?;
    minimize_fsr_lower_fibers(&fibers, k)
}

pub(crate) fn minimize_fsr_lower_fibers(fibers: &[Fiber], k: MetricWeight) -> Result<LowerMinimum> {
    let first = fibers.first().ok_or(Error::EmptyInput)?;
    let p = first.dim();
    if !(2..=3).contains(&p) {
        return Err(Error::UnsupportedDimension {
            p,
            what: "lower-stratum minimization",
        });
    }
    let logs: Vec<DVector<f64>> = fibers.iter().map(Fiber::log_eigenvalues).collect();
    let n = logs.len() as f64;
    let grand = logs.iter().map(|l| l.sum()).sum::<f64>() / (n * p as f64);
    let c = DVector::from_element(p, grand);
    let bottom_value = logs.iter().map(|l| (l - &c).norm_squared()).sum::<f64>() / n;
    let bottom = LowerMinimum {
        matrix: SpdMatrix::identity(p).scaled(grand.exp()),
        value: bottom_value,
        exact: true,
    };
    if p == 2 {
        return Ok(bottom);
    }
    let pair = minimize_pair_stratum(fibers, &logs, k)?;
    Ok(if pair.value < bottom.value { pair } else { LowerMinimum { exact: false, ..bottom } })
}

/// Local search over `{U diag(e^a, e^a, e^b) Uᵀ}` by alternating between
/// matching each observation to the current candidate and refitting `(U, a, b)`.
fn minimize_pair_stratum(fibers: &[Fiber], logs: &[DVector<f64>], k: MetricWeight) -> Result<LowerMinimum> {
    let mut starts: Vec<(Rotation, f64, f64)> = Vec::new();
    for f in fibers.iter().take(LOWER_OBS_STARTS) {
        let m = f.representative();
        let u = m.rotation().matrix();
        let l = m.diag().log();
        starts.push((m.rotation().clone(), 0.5 * (l[0] + l[1]), l[2]));
        // move the largest eigenvalue to the simple slot (cyclic, det +1)
        let cyc = DMatrix::from_columns(&[u.column(1), u.column(2), u.column(0)]);
        starts.push((Rotation::from_matrix_unchecked(cyc), 0.5 * (l[1] + l[2]), l[0]));
    }
    let all: Vec<f64> = logs.iter().flat_map(|l| l.iter().copied()).collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let spread = (all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / all.len() as f64).sqrt().max(1e-3);
    let mut rng = ChaCha20Rng::seed_from_u64(LOWER_SEED);
    for _ in 0..LOWER_RESTARTS {
        let g = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut q = crate::linalg::polar_orthogonal(&g);
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        let a = mean + spread * rng.sample::<f64, _>(StandardNormal);
        let b = mean + spread * rng.sample::<f64, _>(StandardNormal);
        starts.push((Rotation::from_matrix_unchecked(q), a, b));
    }

    let group = enumerate_group(3)?;
    let plane = (0, 1);
    let point = |u: &Rotation, a: f64, b: f64| {
        EigenDecomp::from_parts_unchecked(u.clone(), PosDiag::from_log_unchecked(DVector::from_vec(vec![a, a, b])))
    };
    let reps: Vec<EigenDecomp> = fibers.iter().map(Fiber::representative).collect();

    let mut best: Option<(f64, EigenDecomp)> = None;
    for (u0, a0, b0) in starts {
        let (mut u, mut a, mut b) = (u0, a0, b0);
        let mut f_prev = f64::INFINITY;
        for _ in 0..LOWER_MAX_ITER {
            let base = point(&u, a, b);
            let fits: Vec<(f64, Rotation, DVector<f64>)> = reps
                .par_iter()
                .map(|r| {
                    let c = circle_match(&base, plane, r, k);
                    let gm = group[c.group_index].act(r);
                    let turn = crate::fiber::plane_rotation(3, plane, c.phi);
                    let w = Rotation::from_matrix_unchecked(gm.rotation().matrix() * turn.transpose());
                    (c.d2, w, gm.diag().log().clone())
                })
                .collect();
            let f = fits.iter().map(|t| t.0).sum::<f64>() / fits.len() as f64;
            if f_prev - f <= 1e-12 * (1.0 + f) {
                break;
            }
            f_prev = f;
            let ws: Vec<Rotation> = fits.iter().map(|t| t.1.clone()).collect();
            u = frechet_mean_so(&ws, &u, 1e-10, 200)?.rotation;
            a = fits.iter().map(|t| 0.5 * (t.2[0] + t.2[1])).sum::<f64>() / fits.len() as f64;
            b = fits.iter().map(|t| t.2[2]).sum::<f64>() / fits.len() as f64;
        }
        let candidate = point(&u, a, b);
        let value = mean_sq_sr(fibers, &Fiber::Circle { base: candidate.clone(), plane }, k)?;
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, candidate));
        }
    }
    let (value, m) = best.expect("at least one start");
    Ok(LowerMinimum {
        matrix: m.compose(),
        value,
        exact: false,
    })
}

/// Pairwise `d_SR` diameter of a sample.
pub(crate) fn sr_diameter(fibers: &[Fiber], k: MetricWeight) -> Result<f64> {
    let rows: Vec<f64> = (0..fibers.len())
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for j in (i + 1)..fibers.len() {
                worst = worst.max(d_sr_fibers(&fibers[i], &fibers[j], k)?.dist);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::d_sr;
    use crate::manifold::{dist_m, rot_exp};
    use std::f64::consts::FRAC_PI_8;

    fn planar_spd(theta: f64, l1: f64, l2: f64) -> SpdMatrix {
        EigenDecomp::new(Rotation::planar(theta), PosDiag::new(&[l1.exp(), l2.exp()]).unwrap())
            .unwrap()
            .compose()
    }

    fn so3(w: [f64; 3]) -> Rotation {
        rot_exp(&DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0]))
    }

    #[test]
    fn diag_mean() {
        let a = PosDiag::new(&[2.0, 8.0]).unwrap();
        let b = PosDiag::new(&[8.0, 2.0]).unwrap();
        let m = frechet_mean_diag(&[a.clone(), b]).unwrap();
        assert!((m.values() - DVector::from_vec(vec![4.0, 4.0])).amax() < 1e-12);
        assert_eq!(frechet_mean_diag(&[a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(frechet_mean_diag(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn so_mean_of_symmetric_pair() {
        let us = [Rotation::planar(-0.4), Rotation::planar(0.4)];
        let m = frechet_mean_so(&us, &Rotation::planar(0.4), 1e-10, 1000).unwrap();
        assert!(m.converged);
        assert!((m.rotation.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-10);
        let u = so3([0.3, -0.2, 0.5]);
        let same = frechet_mean_so(&[u.clone(), u.clone(), u.clone()], &Rotation::identity(3), 1e-10, 1000).unwrap();
        assert!((same.rotation.matrix() - u.matrix()).amax() < 1e-10);
    }

    #[test]
    fn so_mean_descends_and_gradient_vanishes() {
        let us: Vec<Rotation> = [[0.3, 0.1, -0.2], [0.0, 0.4, 0.1], [-0.2, 0.2, 0.3], [0.1, -0.3, 0.0]]
            .iter()
            .map(|w| so3(*w))
            .collect();
        let m = frechet_mean_so(&us, &us[0], 1e-10, 1000).unwrap();
        assert!(m.converged && m.gradient_norm < 1e-9);
        let f = so_objective(&us, &m.rotation);
        for u in &us {
            assert!(f <= so_objective(&us, u));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let us: Vec<Rotation> = [[0.9, 0.1, -0.2], [0.0, 0.4, 1.1], [-0.6, 0.2, 0.3]]
            .iter()
            .map(|w| so3(*w))
            .collect();
        let u = so3([0.2, 0.2, 0.2]);
        let g = so_gradient(&us, &u);
        let h = 1e-5;
        for (i, j) in [(1, 0), (2, 0), (2, 1)] {
            let mut e = DMatrix::zeros(3, 3);
            e[(i, j)] = 1.0;
            e[(j, i)] = -1.0;
            let plus = Rotation::from_matrix_unchecked(skew_exp(&(&e * h)) * u.matrix());
            let minus = Rotation::from_matrix_unchecked(skew_exp(&(&e * -h)) * u.matrix());
            let fd = (so_objective(&us, &plus) - so_objective(&us, &minus)) / (2.0 * h);
            let analytic = -2.0 * g.dot(&e);
            assert!((fd - analytic).abs() < 1e-6, "{fd} {analytic}");
        }
    }

    #[test]
    fn single_observation_mean() {
        let x = planar_spd(0.4, 1.0, -0.5);
        let r = psr_mean(&[x.clone()], None, &MeanOptions::default()).unwrap();
        assert!(r.objective < 1e-20);
        assert!((r.mean.compose().matrix() - x.matrix()).amax() < 1e-12);
        assert_eq!(r.orbit_size, 4);
    }

    #[test]
    fn rotation_pair_mean_is_bisector() {
        let theta = 0.3;
        let xs = [planar_spd(-theta, 1.0, 0.0), planar_spd(theta, 1.0, 0.0)];
        let r = psr_mean(&xs, None, &MeanOptions::default()).unwrap();
        let target = EigenDecomp::new(Rotation::identity(2), PosDiag::new(&[1f64.exp(), 1.0]).unwrap()).unwrap();
        let best = mean_orbit(&r.mean)
            .unwrap()
            .iter()
            .map(|m| dist_m(m, &target, MetricWeight::default()))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9);
        assert!((r.objective - theta * theta).abs() < 1e-12);
    }

    #[test]
    fn tight_cluster_converges_in_one_iteration() {
        let xs: Vec<SpdMatrix> = [(0.0, 1.0, 0.2), (0.1, 1.1, 0.1), (-0.05, 0.9, 0.3), (0.08, 1.05, 0.25)]
            .iter()
            .map(|&(t, a, b)| planar_spd(t, a, b))
            .collect();
        let fibers = fibers_of(&xs, EPS_STRAT).unwrap();
        assert!(sr_diameter(&fibers, MetricWeight::default()).unwrap() < FRAC_PI_8);
        let r = psr_mean(&xs, None, &MeanOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.selection_changes.iter().all(|&c| c == 0));
    }

    #[test]
    fn orbit_members_share_objective() {
        let xs: Vec<SpdMatrix> = [(0.5, 1.0, 0.2), (1.1, 0.1, 1.1), (-0.7, 0.9, -0.3)]
            .iter()
            .map(|&(t, a, b)| planar_spd(t, a, b))
            .collect();
        let r = psr_mean(&xs, None, &MeanOptions::default()).unwrap();
        for m in mean_orbit(&r.mean).unwrap() {
            assert!((f_psr(&xs, &m, MetricWeight::default()).unwrap() - r.objective).abs() < 1e-12);
        }
        let s = r.mean.compose();
        assert!(f_sr(&xs, &s, MetricWeight::default()).unwrap() <= r.objective + 1e-12);
        for w in r.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-14);
        }
    }

    #[test]
    fn lower_minimum_p2_closed_form() {
        let xs = [SpdMatrix::from_diagonal(&[2.0, 8.0]).unwrap(), SpdMatrix::from_diagonal(&[3.0, 5.0]).unwrap()];
        let lower = minimize_fsr_lower(&xs, MetricWeight::default()).unwrap();
        let grand = (2f64.ln() + 8f64.ln() + 3f64.ln() + 5f64.ln()) / 4.0;
        assert!((lower.matrix.matrix()[(0, 0)] - grand.exp()).abs() < 1e-12);
        assert!(lower.exact);
        // golden section on log c
        let f = |lc: f64| {
            let c = SpdMatrix::identity(2).scaled(lc.exp());
            xs.iter().map(|x| d_sr(x, &c, MetricWeight::default()).unwrap().dist.powi(2)).sum::<f64>() / 2.0
        };
        let (_, fmin) = crate::optimize::golden_section(f, -10.0, 10.0, 1e-10);
        assert!((fmin - lower.value).abs() < 1e-9);
        let same = vec![SpdMatrix::identity(2).scaled(3.0); 3];
        let lower = minimize_fsr_lower(&same, MetricWeight::default()).unwrap();
        assert!(lower.value < 1e-24);
    }

    #[test]
    fn lower_minimum_p3_finds_repeated_pair() {
        // data near diag(4, 4, 1) up to rotation within the repeated plane
        let xs: Vec<SpdMatrix> = [0.0, 0.7, 1.9, 2.6]
            .iter()
            .map(|&t| {
                let r = so3([0.0, 0.0, t]);
                EigenDecomp::new(r, PosDiag::new(&[4.2, 3.8, 1.0]).unwrap()).unwrap().compose()
            })
            .collect();
        let lower = minimize_fsr_lower(&xs, MetricWeight::default()).unwrap();
        let g = (4.2f64 * 3.8).sqrt();
        let target = SpdMatrix::from_diagonal(&[g, g, 1.0]).unwrap();
        let at_target = f_sr(&xs, &target, MetricWeight::default()).unwrap();
        assert!(lower.value <= at_target + 1e-8, "{} {}", lower.value, at_target);
        assert!(!lower.exact);
        assert!(lower.value < 0.01);
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(psr_mean(&[], None, &MeanOptions::default()).unwrap_err(), Error::EmptyInput);
    }
}

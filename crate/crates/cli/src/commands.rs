use crate::config::RunConfig;
use crate::dataset;
use crate::error::{CliError, CliResult};
use crate::report::{self, envelope};
use clap::{Args, ValueEnum};
use scarot_core::certificate::{certify_sr_vs_psr, certify_uniqueness};
use scarot_core::inference::{ai_mean, le_mean, psr_coordinates, sample_model_2d, two_group_report, vecd};
use scarot_core::mean::mean_orbit;
use scarot_core::{d_psr, d_sr, psr_mean, SpdMatrix};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

fn emit(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn with_output(path: &Option<PathBuf>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = std::io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Start from this observation's canonical decomposition (default 0).
    #[arg(long, default_value_t = 0)]
    pub init: usize,
    /// Leave the wall-clock time out of the report.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn mean(args: &MeanArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = cfg.mean_options()?;
    let xs = dataset::read(&args.input)?;
    let start = xs
        .get(args.init)
        .ok_or_else(|| CliError::Parse(format!("--init {} is out of range for {} observations", args.init, xs.len())))?
        .canonical_decomposition();
    let clock = Instant::now();
    let result = psr_mean(&xs, Some(&start), &opts)?;
    let orbit = mean_orbit(&result.mean)?;
    let certificates = vec![
        report::certificate("uniqueness", certify_uniqueness(&xs, opts.k)),
        report::certificate("sr_vs_psr", certify_sr_vs_psr(&xs, &result, opts.k)),
    ];
    let mut body = json!({
        "p": xs[0].dim(),
        "n": xs.len(),
        "mean": report::decomposition(&result.mean),
        "orbit": orbit.iter().map(report::decomposition).collect::<Vec<_>>(),
        "objective": result.objective,
        "objective_trace": result.objective_trace,
        "iterations": result.iterations,
        "passes": result.passes,
        "converged": result.converged,
        "rejected_steps": result.rejected_steps,
        "involution_hits": result.involution_hits,
        "certificates": certificates,
    });
    if !args.no_timing {
        body["runtime_seconds"] = json!(clock.elapsed().as_secs_f64());
    }
    with_output(&args.output, stdout, |w| emit(w, &envelope("mean", cfg, body)))?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::NoConvergence(format!("PSR mean stopped after {} passes", result.passes)))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistMode {
    Sr,
    Psr,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Dataset of first arguments.
    #[arg(long)]
    pub x: PathBuf,
    /// Dataset of second arguments; a single row is paired with every row of
    /// `--x`. In psr mode its canonical decompositions are used.
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, value_enum, default_value_t = DistMode::Sr)]
    pub mode: DistMode,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn dist(args: &DistArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let k = cfg.weight()?;
    let xs = dataset::read(&args.x)?;
    let ys = dataset::read(&args.y)?;
    if ys.len() != 1 && ys.len() != xs.len() {
        return Err(CliError::Parse(format!("--y has {} rows; expected 1 or {}", ys.len(), xs.len())));
    }
    let pairs = xs.iter().enumerate().map(|(i, x)| (i, x, &ys[i.min(ys.len() - 1)]));
    let results = pairs
        .map(|(i, x, y)| -> CliResult<Value> {
            Ok(match args.mode {
                DistMode::Sr => {
                    let pair = d_sr(x, y, k)?;
                    json!({
                        "index": i,
                        "distance": pair.dist,
                        "mx": report::decomposition(&pair.mx),
                        "my": report::decomposition(&pair.my),
                    })
                }
                DistMode::Psr => {
                    let m = y.canonical_decomposition();
                    let hit = d_psr(x, &m, k)?;
                    json!({
                        "index": i,
                        "distance": hit.dist,
                        "m": report::decomposition(&m),
                        "nearest": report::decomposition(&hit.element),
                        "group_index": hit.index,
                    })
                }
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mode = match args.mode {
        DistMode::Sr => "sr",
        DistMode::Psr => "psr",
    };
    let body = json!({ "mode": mode, "results": results });
    with_output(&args.output, stdout, |w| emit(w, &envelope("dist", cfg, body)))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset model parameters: 1 or 2.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub case: Option<u8>,
    #[arg(long)]
    pub sigma_theta: Option<f64>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
    #[arg(long)]
    pub sigma_d: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Where the dataset is written.
    #[arg(long)]
    pub output: PathBuf,
    /// Where the JSON summary is written (default: standard output).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelParams {
    pub sigma_theta: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma_d: f64,
}

pub fn case_params(case: u8) -> ModelParams {
    match case {
        1 => ModelParams {
            sigma_theta: PI / 12.0,
            mu1: 2.0,
            mu2: 0.0,
            sigma_d: 0.2,
        },
        _ => ModelParams {
            sigma_theta: PI / 3.0,
            mu1: 1.0,
            mu2: 0.0,
            sigma_d: 0.2,
        },
    }
}

fn resolve_params(args: &SimulateArgs) -> CliResult<ModelParams> {
    let base = args.case.map(case_params);
    let pick = |explicit: Option<f64>, preset: Option<f64>, name: &str| {
        explicit
            .or(preset)
            .ok_or_else(|| CliError::Parse(format!("--{name} is required without --case")))
    };
    Ok(ModelParams {
        sigma_theta: pick(args.sigma_theta, base.map(|b| b.sigma_theta), "sigma-theta")?,
        mu1: pick(args.mu1, base.map(|b| b.mu1), "mu1")?,
        mu2: pick(args.mu2, base.map(|b| b.mu2), "mu2")?,
        sigma_d: pick(args.sigma_d, base.map(|b| b.sigma_d), "sigma-d")?,
    })
}

pub fn simulate(args: &SimulateArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = cfg.mean_options()?;
    let params = resolve_params(args)?;
    if args.n == 0 {
        return Err(CliError::Parse("--n must be positive".into()));
    }
    let xs = sample_model_2d(args.n, params.sigma_theta, (params.mu1, params.mu2), params.sigma_d, cfg.seed)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    dataset::write(&args.output, &xs)?;
    let result = psr_mean(&xs, None, &opts)?;
    let cert = certify_sr_vs_psr(&xs, &result, opts.k)?;
    let body = json!({
        "case": args.case,
        "params": params,
        "n": args.n,
        "dataset": args.output.display().to_string(),
        "psr_mean": report::decomposition(&result.mean),
        "converged": result.converged,
        "certificate": cert,
    });
    with_output(&args.summary, stdout, |w| emit(w, &envelope("simulate", cfg, body)))
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// CSV destination (default: standard output).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Rows: one `obs` row per observation, then `le_mean`, `ai_mean` and
/// `psr_mean`. Columns: tag, index, LE coordinates, PSR coordinates about the
/// sample PSR mean.
pub fn compare(args: &CompareArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = cfg.mean_options()?;
    let xs = dataset::read(&args.input)?;
    let reference = psr_mean(&xs, None, &opts)?.mean;
    let ai = ai_mean(&xs, cfg.tol, 10 * cfg.max_iter.max(100))?;
    if !ai.converged {
        return Err(CliError::NoConvergence(format!(
            "affine-invariant mean gradient norm {:.3e}",
            ai.gradient_norm
        )));
    }
    let means: [(&str, SpdMatrix); 3] = [
        ("le_mean", le_mean(&xs)?),
        ("ai_mean", ai.matrix),
        ("psr_mean", reference.compose()),
    ];
    let mut rows: Vec<(&str, usize, &SpdMatrix)> = xs.iter().enumerate().map(|(i, x)| ("obs", i, x)).collect();
    rows.extend(means.iter().map(|(tag, m)| (*tag, 0, m)));
    let all: Vec<SpdMatrix> = rows.iter().map(|r| r.2.clone()).collect();
    let psr = psr_coordinates(&all, &reference, opts.k)?;
    let d = psr.coords.ncols();
    with_output(&args.output, stdout, |w| {
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec!["tag".to_string(), "index".to_string()];
        header.extend((1..=d).map(|j| format!("le_{j}")));
        header.extend((1..=d).map(|j| format!("psr_{j}")));
        csv.write_record(&header).map_err(std::io::Error::from)?;
        for (r, (tag, i, x)) in rows.iter().enumerate() {
            let mut rec = vec![tag.to_string(), i.to_string()];
            rec.extend(vecd(&x.log()).iter().map(|v| format!("{v:.16e}")));
            rec.extend(psr.coords.row(r).iter().map(|v| format!("{v:.16e}")));
            csv.write_record(&rec).map_err(std::io::Error::from)?;
        }
        csv.flush()?;
        Ok(())
    })
}

#[derive(Debug, Args)]
pub struct GroupTestArgs {
    #[arg(long)]
    pub input1: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn group_test(args: &GroupTestArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = cfg.mean_options()?;
    cfg.check_bootstrap()?;
    let xs1 = dataset::read(&args.input1)?;
    let xs2 = dataset::read(&args.input2)?;
    let r = two_group_report(&xs1, &xs2, cfg.bootstrap, cfg.level, cfg.seed, &opts)?;
    let body = json!({
        "label": r.label,
        "level": r.level,
        "threshold": r.threshold,
        "reference": report::decomposition(&r.reference),
        "group_means": [report::decomposition(&r.group_means[0]), report::decomposition(&r.group_means[1])],
        "group_sizes": r.group_sizes,
        "bootstrap_used": r.bootstrap_used,
        "bootstrap_failed": r.bootstrap_failed,
        "psr": report::frame(&r.psr),
        "log_euclidean": report::frame(&r.log_euclidean),
    });
    with_output(&args.output, stdout, |w| emit(w, &envelope("group-test", cfg, body)))
}

//! Subcommand arguments and their execution.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use airy_edge::densities::{rho_hat, EdgeDensity};
use airy_edge::drift::{self, CompensatorMode, DriftSpec, TailView};
use airy_edge::kernels::{correlation, fredholm_gap_for, Beta, CorrelationRequest, KernelHandle, KernelValue, Regime, DEFAULT_GAP_ORDER};
use airy_edge::sampler::{self, DppSampler, PointConfiguration, DEFAULT_GRID_PER_UNIT};
use airy_edge::sde::{self, SdeConfig};
use airy_edge::verify::{self, BoundReport, Ceilings, ExponentSet, Grid};

use crate::output::{num, Artifact, Destination};
use crate::UsageError;

/// Comma-separated numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FloatList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CountList(pub Vec<usize>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn parse_floats(s: &str) -> Result<FloatList, String> {
    parse_list(s).map(FloatList)
}

fn parse_counts(s: &str) -> Result<CountList, String> {
    parse_list(s).map(CountList)
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    let b: u8 = s.parse().map_err(|_| format!("β must be 1, 2 or 4, got {s:?}"))?;
    Beta::try_from(b).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutArgs {
    /// Artifact path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Manifest path (default `<out>.manifest.json`; none for stdout runs).
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

impl OutArgs {
    pub fn destination(&self) -> Destination {
        Destination { out: self.out.clone(), manifest: self.manifest.clone() }
    }
}

fn regime(n: Option<usize>) -> Regime {
    n.map_or(Regime::Limit, Regime::Finite)
}

fn handle(beta: Beta, n: Option<usize>, anchor: Option<f64>) -> KernelHandle {
    let h = KernelHandle::new(beta, regime(n));
    match anchor {
        Some(x) => h.with_anchor(x),
        None => h,
    }
}

fn label(n: Option<usize>) -> String {
    n.map_or("limit".into(), |n| n.to_string())
}

fn need_n(n: Option<usize>, what: &str) -> Result<usize> {
    n.ok_or_else(|| UsageError(format!("{what} needs --n")).into())
}

/// lo, lo + step, ... up to hi.
fn range(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && step > 0.0) {
        return Err(UsageError(format!("bad grid lo = {lo}, hi = {hi}, step = {step}")).into());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(UsageError(format!("grid of {count} points is too large")).into());
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

#[derive(Args, Debug, Serialize)]
pub struct KernelArgs {
    /// Symmetry class: 1, 2 or 4.
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    /// Ensemble size; omit for the edge limit.
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluate the Palm-reduced kernel anchored here.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    /// First arguments (default: the lo/hi/step grid).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_floats)]
    pub x: Option<FloatList>,
    /// Second arguments (default: the first ones).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_floats)]
    pub y: Option<FloatList>,
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn kernel(a: &KernelArgs) -> Result<Artifact> {
    let k = handle(a.beta, a.n, a.anchor).resolve()?;
    let xs = match &a.x {
        Some(l) => l.0.clone(),
        None => range(a.lo, a.hi, a.step)?,
    };
    let ys = a.y.as_ref().map_or_else(|| xs.clone(), |l| l.0.clone());
    let rows: Vec<Vec<KernelValue>> = xs.par_iter().map(|&x| ys.iter().map(|&y| k.value(x, y)).collect()).collect();
    let mut s = String::new();
    let anchor = a.anchor.map_or("none".into(), num);
    writeln!(s, "# beta={} n={} anchor={anchor}", a.beta, label(a.n))?;
    s.push_str(if k.is_scalar() { "x,y,value\n" } else { "x,y,k11,k12,k21,k22\n" });
    for (x, row) in xs.iter().zip(&rows) {
        for (y, v) in ys.iter().zip(row) {
            match v {
                KernelValue::Scalar(v) => writeln!(s, "{},{},{}", num(*x), num(*y), num(*v))?,
                KernelValue::Quaternion(q) => {
                    let [[a, b], [c, d]] = q.to_matrix();
                    writeln!(s, "{},{},{},{},{},{}", num(*x), num(*y), num(a.re), num(b.re), num(c.re), num(d.re))?
                }
            }
        }
    }
    Ok(Artifact::new(s.into_bytes()))
}

#[derive(Args, Debug, Serialize)]
pub struct CorrArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    /// Distinct points of the correlation function.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_floats)]
    pub points: Option<FloatList>,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn corr(a: &CorrArgs) -> Result<Artifact> {
    let points = a.points.clone().expect("required").0;
    let value = correlation(&CorrelationRequest { handle: handle(a.beta, a.n, a.anchor), points: points.clone() })?;
    Artifact::json(&json!({ "beta": a.beta, "n": a.n, "anchor": a.anchor, "points": points, "value": value }))
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long)]
    pub n: Option<usize>,
    /// One-point density of the Palm-reduced field anchored here.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn density(a: &DensityArgs) -> Result<Artifact> {
    let k = handle(a.beta, a.n, a.anchor).resolve()?;
    let reference = match a.n {
        Some(n) => EdgeDensity::finite(n),
        None => EdgeDensity::limit(),
    };
    let xs = range(a.lo, a.hi, a.step)?;
    let values: Vec<f64> = xs.par_iter().map(|&x| k.density(x)).collect();
    let mut s = String::new();
    let anchor = a.anchor.map_or("none".into(), num);
    writeln!(s, "# beta={} n={} anchor={anchor}", a.beta, label(a.n))?;
    s.push_str("x,density,rho_hat\n");
    for (x, v) in xs.iter().zip(values) {
        writeln!(s, "{},{},{}", num(*x), num(v), num(rho_hat(&reference, *x)))?;
    }
    Ok(Artifact::new(s.into_bytes()))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftQuantity {
    /// Deterministic shell constant u_β(x).
    UBeta,
    /// Free potential Φ(x).
    FreePotential,
    /// Finite-n logarithmic derivative on a sampled configuration.
    Finite,
    /// Truncated ISDE drift on a sampled configuration.
    Truncated,
    /// Limit logarithmic derivative with Palm compensation.
    LogDerivative,
    /// Derivative of the truncated drift in x.
    Gradient,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compensator {
    Semicircle,
    FiniteN,
}

#[derive(Args, Debug, Serialize)]
pub struct DriftArgs {
    #[arg(long, value_enum)]
    pub quantity: DriftQuantity,
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    /// Ensemble size: regime of u-beta, size of the sampled configuration.
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluation points.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_floats)]
    pub x: Option<FloatList>,
    /// Evaluate at these particles (1 = top) of the sample, with the
    /// particle itself removed. Default for sampled quantities: 1.
    #[arg(long, value_parser = parse_counts)]
    pub rank: Option<CountList>,
    /// Shell parameter of u-beta and log-derivative.
    #[arg(long, default_value_t = 200.0)]
    pub s: f64,
    /// Truncation radius of truncated and gradient.
    #[arg(long, default_value_t = 30.0)]
    pub r: f64,
    #[arg(long, value_enum, default_value = "semicircle")]
    pub compensator: Compensator,
    /// Seed of the sampled configuration.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn drift(a: &DriftArgs) -> Result<Artifact> {
    let sampled = !matches!(a.quantity, DriftQuantity::UBeta | DriftQuantity::FreePotential);
    let mut rows = Vec::new();
    if sampled {
        let n = need_n(a.n, "a sampled drift")?;
        let config = sampler::sample_many(a.beta, n, 1, a.seed, true)?.remove(0);
        let mut targets: Vec<(f64, PointConfiguration)> = Vec::new();
        if let Some(xs) = &a.x {
            targets.extend(xs.0.iter().map(|&x| (x, config.clone())));
        }
        let ranks = match (&a.rank, &a.x) {
            (Some(r), _) => r.0.clone(),
            (None, Some(_)) => vec![],
            (None, None) => vec![1],
        };
        for r in ranks {
            if r == 0 || r > config.len() {
                return Err(UsageError(format!("rank {r} outside 1..={}", config.len())).into());
            }
            targets.push((config.points()[r - 1], config.without(r - 1)));
        }
        for (x, others) in targets {
            let v = match a.quantity {
                DriftQuantity::Finite => drift::finite_log_derivative(a.beta, n, x, &others)?,
                DriftQuantity::Truncated => {
                    let mode = match a.compensator {
                        Compensator::Semicircle => CompensatorMode::Semicircle,
                        Compensator::FiniteN => CompensatorMode::FiniteN { n },
                    };
                    drift::truncated_isde_drift(&DriftSpec::new(a.beta, a.r, mode)?, x, &others)?
                }
                DriftQuantity::LogDerivative => {
                    drift::log_derivative(&DriftSpec::new(a.beta, a.s, CompensatorMode::Palm)?, x, &others)?
                }
                DriftQuantity::Gradient => drift::drift_gradient(a.beta, x, &others, a.r)?,
                DriftQuantity::UBeta | DriftQuantity::FreePotential => unreachable!(),
            };
            rows.push((x, v));
        }
    } else {
        let Some(xs) = &a.x else {
            return Err(UsageError("this quantity needs --x".into()).into());
        };
        for &x in &xs.0 {
            let v = match a.quantity {
                DriftQuantity::UBeta => drift::u_beta(a.beta, x, a.s, regime(a.n))?,
                _ => drift::free_potential(a.beta, x)?,
            };
            rows.push((x, v));
        }
    }
    let mut s = String::new();
    writeln!(s, "# quantity={} beta={} n={} seed={}", a.quantity.to_possible_value().unwrap().get_name(), a.beta, label(a.n), a.seed)?;
    s.push_str("x,value\n");
    for (x, v) in rows {
        writeln!(s, "{},{}", num(x), num(v))?;
    }
    let artifact = Artifact::new(s.into_bytes());
    Ok(if sampled { artifact.seeded(a.seed) } else { artifact })
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rescale to soft-edge coordinates n^{1/6}(λ − 2√n).
    #[arg(long)]
    pub soft_edge: bool,
    #[command(flatten)]
    pub dest: OutArgs,
}

fn samples_csv(samples: &[PointConfiguration], seed: u64) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    sampler::write_csv(&mut bytes, samples, seed)?;
    Ok(bytes)
}

pub fn sample(a: &SampleArgs) -> Result<Artifact> {
    let samples = sampler::sample_many(a.beta, a.n, a.count, a.seed, a.soft_edge)?;
    Ok(Artifact::new(samples_csv(&samples, a.seed)?).seeded(a.seed))
}

#[derive(Args, Debug, Serialize)]
pub struct DppArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long)]
    pub n: usize,
    /// Sample the Palm-reduced field anchored here.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    /// Window start (default: lower end of the kernel support).
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub hi: f64,
    /// Grid cells per unit length.
    #[arg(long, default_value_t = DEFAULT_GRID_PER_UNIT)]
    pub grid: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn dpp(a: &DppArgs) -> Result<Artifact> {
    let h = handle(a.beta, Some(a.n), a.anchor);
    let lo = match a.lo {
        Some(lo) => lo,
        None => h.resolve()?.support().0,
    };
    let sampler = DppSampler::new(&h, (lo, a.hi), a.grid)?;
    let samples = sampler.sample_many(a.count, a.seed)?;
    Ok(Artifact::new(samples_csv(&samples, a.seed)?)
        .seeded(a.seed)
        .with_summary(json!({ "window": [lo, a.hi], "expected_count": sampler.expected_count() })))
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long)]
    pub n: usize,
    /// Move only the top m particles against the frozen rest.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    /// Collision guard (default 2√dt).
    #[arg(long)]
    pub guard: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub record_stride: usize,
    /// Semicircle truncation radius of the frozen-tail drift.
    #[arg(long, default_value_t = 30.0)]
    pub radius: f64,
    /// Initial configurations use this seed, the noise uses seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn simulate(a: &SimulateArgs) -> Result<Artifact> {
    let inits = sampler::sample_many(a.beta, a.n, a.paths, a.seed, true)?;
    let (mode, m) = match a.m {
        Some(m) => (CompensatorMode::Semicircle, m),
        None => (CompensatorMode::FiniteN { n: a.n }, a.n),
    };
    let mut cfg = SdeConfig::new(a.dt, a.t_final, DriftSpec::new(a.beta, a.radius, mode)?, a.seed.wrapping_add(1));
    if let Some(g) = a.guard {
        cfg.guard = g;
    }
    cfg.record_stride = a.record_stride;
    let paths = match a.m {
        None => sde::simulate_finite_many(a.beta, a.n, &inits, &cfg)?,
        Some(m) => inits
            .par_iter()
            .enumerate()
            .map(|(i, init)| {
                let (head, tail) = init.split_at(m);
                let mut c = cfg;
                c.stream = i as u64;
                sde::simulate_truncated_isde(a.beta, m, &head, &TailView::new(tail), &c)
            })
            .collect::<airy_edge::Result<Vec<_>>>()?,
    };
    let mut s = String::new();
    writeln!(s, "# beta={} n={} m={m} dt={} t_final={} seed={}", a.beta, a.n, num(a.dt), num(a.t_final), a.seed)?;
    s.push_str("path,time,rank,position\n");
    for (i, p) in paths.iter().enumerate() {
        for (t, xs) in p.times.iter().zip(&p.positions) {
            for (rank, x) in xs.iter().enumerate() {
                writeln!(s, "{i},{},{},{}", num(*t), rank + 1, num(*x))?;
            }
        }
    }
    let total = |f: fn(&sde::PathEnsemble) -> usize| paths.iter().map(f).sum::<usize>();
    let summary = json!({
        "paths": paths.len(),
        "accepted": total(|p| p.accepted),
        "rejected": total(|p| p.rejected),
        "order_violations": total(|p| p.order_violations),
    });
    Ok(Artifact::new(s.into_bytes()).seeded(a.seed).with_summary(summary))
}

#[derive(Args, Debug, Serialize)]
pub struct GirsanovArgs {
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    /// Size of the ensemble the frozen tail is drawn from.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.1)]
    pub t_final: f64,
    /// Thresholds h of the stopping time τ_h.
    #[arg(long, default_value = "1", value_parser = parse_floats)]
    pub h: FloatList,
    #[arg(long, default_value_t = 20.0)]
    pub radius: f64,
    /// The configuration uses this seed, the Brownian paths seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn girsanov(a: &GirsanovArgs) -> Result<Artifact> {
    let config = sampler::sample_many(a.beta, a.n, 1, a.seed, true)?.remove(0);
    if a.m == 0 || a.m >= config.len() {
        return Err(UsageError(format!("m must lie in 1..{}", config.len())).into());
    }
    let (head, tail) = config.split_at(a.m);
    let tail = TailView::new(tail);
    let spec = DriftSpec::new(a.beta, a.radius, CompensatorMode::Semicircle)?;
    let mut cfg = SdeConfig::new(a.dt, a.t_final, spec, a.seed.wrapping_add(1));
    cfg.record_stride = 1_000_000;
    let per_path: Vec<Vec<sde::GirsanovAccumulator>> = (0..a.paths)
        .into_par_iter()
        .map(|i| {
            let mut c = cfg;
            c.stream = i as u64;
            let path = sde::simulate_brownian(&head, &c)?;
            a.h.0.iter().map(|&h| sde::girsanov_log_density(&path, a.m, &tail, h, &spec)).collect()
        })
        .collect::<airy_edge::Result<_>>()?;
    let count = a.paths as f64;
    let thresholds: Vec<_> = a
        .h
        .0
        .iter()
        .enumerate()
        .map(|(j, &h)| {
            let d: Vec<f64> = per_path.iter().map(|p| p[j].density()).collect();
            let mean = d.iter().sum::<f64>() / count;
            let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0).max(1.0);
            let se = (var / count).sqrt();
            let tau = per_path.iter().map(|p| p[j].stopping_time()).sum::<f64>() / count;
            let stopped = per_path.iter().filter(|p| p[j].tau.is_some()).count();
            json!({
                "h": h,
                "mean_density": mean,
                "std_error": se,
                "z": (mean - 1.0) / se,
                "mean_stopping_time": tau,
                "stopped_fraction": stopped as f64 / count,
            })
        })
        .collect();
    let report = json!({
        "beta": a.beta, "n": a.n, "m": a.m, "paths": a.paths, "dt": a.dt, "t_final": a.t_final,
        "radius": a.radius, "seed": a.seed, "thresholds": thresholds,
    });
    Ok(Artifact::json(&report)?.seeded(a.seed))
}

#[derive(Args, Debug, Serialize)]
pub struct GapArgs {
    /// Threshold s of P(no particle in (s, ∞)).
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// Nyström quadrature order.
    #[arg(long, default_value_t = DEFAULT_GAP_ORDER)]
    pub order: usize,
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    #[command(flatten)]
    pub dest: OutArgs,
}

pub fn gap(a: &GapArgs) -> Result<Artifact> {
    let value = fredholm_gap_for(a.beta.as_u8(), a.s, a.order)?;
    Artifact::json(&json!({ "s": a.s, "order": a.order, "value": value }))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    #[value(name = "density-bound")]
    #[serde(rename = "density-bound")]
    DensityBound,
    #[value(name = "palm-difference")]
    #[serde(rename = "palm-difference")]
    PalmDifference,
    #[value(name = "I-integrals")]
    #[serde(rename = "I-integrals")]
    IIntegrals,
    #[value(name = "variance")]
    #[serde(rename = "variance")]
    Variance,
    #[value(name = "G-decay")]
    #[serde(rename = "G-decay")]
    GDecay,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value = "2", value_parser = parse_beta)]
    pub beta: Beta,
    /// Ensemble sizes (density-bound takes a list, the others the first entry).
    #[arg(long, value_parser = parse_counts)]
    pub n: Option<CountList>,
    /// density-bound: add the edge limit to the compared regimes.
    #[arg(long)]
    pub limit: bool,
    /// Anchor point x.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// I-integral indices (default 1..6).
    #[arg(long, value_parser = parse_counts)]
    pub k: Option<CountList>,
    /// Exclusion radii s (variance takes the first entry).
    #[arg(long, value_parser = parse_floats)]
    pub s: Option<FloatList>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Monte Carlo draws of the variance suite.
    #[arg(long, default_value_t = 10_000)]
    pub mc_count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling grid cells per unit length (variance).
    #[arg(long, default_value_t = DEFAULT_GRID_PER_UNIT)]
    pub grid: usize,
    /// JSON array of exponent sets {a, b, c, nu, gamma, kappa} (G-decay).
    #[arg(long)]
    pub sets: Option<String>,
    /// JSON file replacing the golden ceilings.
    #[arg(long, value_name = "FILE")]
    pub ceilings: Option<PathBuf>,
    /// Report values without ceiling checks.
    #[arg(long, conflicts_with = "ceilings")]
    pub no_ceilings: bool,
    #[command(flatten)]
    pub dest: OutArgs,
}

fn default_sets() -> Vec<ExponentSet> {
    vec![ExponentSet::new(-0.25, 0.5, 1.0, 0.0, 0.5, 0.5), ExponentSet::new(0.0, 0.0, 2.0, 0.0, 0.5, 0.0)]
}

pub fn verify_suite(a: &VerifyArgs) -> Result<(Artifact, bool)> {
    let ceilings = if a.no_ceilings {
        Ceilings::none()
    } else if let Some(path) = &a.ceilings {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Ceilings::from_json(&text)?
    } else {
        Ceilings::default()
    };
    let ns = a.n.as_ref().map(|l| l.0.clone());
    let first_n = |default: usize| ns.as_ref().map_or(default, |v| v[0]);
    let s_list = |default: &[f64]| a.s.as_ref().map_or_else(|| default.to_vec(), |l| l.0.clone());
    let mut seeded = false;
    let report: BoundReport = match a.suite {
        Suite::DensityBound => {
            let mut regimes: Vec<Regime> = ns.unwrap_or_else(|| vec![20, 50, 100]).into_iter().map(Regime::Finite).collect();
            if a.limit {
                regimes.push(Regime::Limit);
            }
            let lo = a.lo.unwrap_or(if a.limit { -100.0 } else { -1e9 });
            let grid = Grid::new(lo, a.hi.unwrap_or(10.0), a.step.unwrap_or(0.05));
            verify::check_density_bound(a.beta, &regimes, &grid, &ceilings)?
        }
        Suite::PalmDifference => {
            let gap = a.x.abs() + 2.0;
            let grid = Grid::union(vec![(a.lo.unwrap_or(-40.0), -gap), (gap, a.hi.unwrap_or(10.0))], a.step.unwrap_or(0.1));
            verify::check_palm_difference(a.beta, Regime::Finite(first_n(50)), a.x, &grid, &ceilings)?
        }
        Suite::IIntegrals => {
            let n = first_n(50);
            let ks = a.k.as_ref().map_or_else(|| (1..=6).collect(), |l| l.0.clone());
            let s = s_list(&[4.0, 16.0, 64.0, 256.0]);
            let parts = ks
                .iter()
                .map(|&k| Ok((format!("k{k}"), verify::evaluate_i_integrals(a.beta, n, k, a.x, &s, &ceilings)?)))
                .collect::<airy_edge::Result<Vec<_>>>()?;
            if parts.len() == 1 {
                parts.into_iter().next().unwrap().1
            } else {
                let params = json!({ "beta": a.beta, "n": n, "x": a.x, "k": ks, "s": s });
                BoundReport::merge("I-integrals", params, parts)
            }
        }
        Suite::Variance => {
            if a.beta != Beta::Two {
                bail!(airy_edge::Error::Capability("the variance suite is implemented for β = 2 only".into()));
            }
            seeded = true;
            verify::variance_check(first_n(20), a.x, s_list(&[2.0])[0], a.mc_count, a.seed, a.grid)?
        }
        Suite::GDecay => {
            let sets = match &a.sets {
                Some(text) => serde_json::from_str(text).map_err(|e| UsageError(format!("--sets: {e}")))?,
                None => default_sets(),
            };
            verify::check_g_decay(&sets, &s_list(&[4.0, 16.0, 64.0]), &ceilings)?
        }
    };
    let passed = report.passed();
    let artifact = Artifact::json(&report)?.with_summary(json!({ "status": report.verdict.status }));
    Ok((if seeded { artifact.seeded(a.seed) } else { artifact }, passed))
}

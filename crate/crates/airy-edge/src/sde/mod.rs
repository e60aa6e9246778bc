//! Euler–Maruyama integration of the finite-n soft-edge dynamics and of the
//! frozen-tail m-particle approximation, with Girsanov weights.
//!
//! dXⁱ = dBⁱ + ½ d(Xⁱ, X^{◇i}) dt, where d is the logarithmic derivative of
//! the drift module. A step is rejected and retried with a Brownian-bridge
//! split of its increment when it breaks the order or collapses a gap below
//! the guard δ.

mod girsanov;

use std::borrow::Cow;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::{compensator, EdgeDensity};
use crate::drift::{finite_compensator, outward_sum, CompensatorMode, DriftSpec, TailView};
use crate::error::{Error, Result};
use crate::kernels::Beta;
use crate::sampler::{stream_rng, Frame, PointConfiguration};

pub use girsanov::{girsanov_log_density, girsanov_with, GirsanovAccumulator};

/// Maximum number of successive halvings of one step.
pub const MAX_HALVINGS: u32 = 20;

/// Integration parameters of one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Collision guard δ; dt ≤ δ²/4 is required.
    pub guard: f64,
    pub drift: DriftSpec,
    pub seed: u64,
    pub stream: u64,
    /// Record the state every this many nominal steps (and at the end).
    pub record_stride: usize,
    /// Multiplier of the Brownian increments (1 in normal use, 0 for the
    /// deterministic skeleton).
    pub noise_scale: f64,
    /// Keep every accepted increment and the state it started from.
    pub store_noise: bool,
}

impl SdeConfig {
    /// Guard 2√dt, record stride 1, unit noise, increments not stored.
    pub fn new(dt: f64, t_final: f64, drift: DriftSpec, seed: u64) -> Self {
        Self {
            dt,
            t_final,
            guard: 2.0 * dt.sqrt(),
            drift,
            seed,
            stream: 0,
            record_stride: 1,
            noise_scale: 1.0,
            store_noise: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.drift.validate()?;
        if !(self.dt > 0.0 && self.t_final > 0.0 && self.guard > 0.0) {
            return Err(Error::Domain("dt, t_final and guard must be positive".into()));
        }
        if self.dt > 0.25 * self.guard * self.guard * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "dt = {} exceeds δ²/4 = {} for guard δ = {}",
                self.dt,
                0.25 * self.guard * self.guard,
                self.guard
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::Domain("record stride must be at least 1".into()));
        }
        if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
            return Err(Error::Domain("noise scale must be a non-negative number".into()));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// Accepted increments of a path: `states[k]` at `times[k]`, then `dw[k]` over `dts[k]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseTrace {
    pub times: Vec<f64>,
    pub dts: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dw: Vec<Vec<f64>>,
}

/// One simulated path of the moving particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub beta: Beta,
    /// Ensemble size fixing the soft-edge scaling.
    pub n: usize,
    /// Number of moving particles.
    pub m: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
    /// Accepted states that were not strictly decreasing.
    pub order_violations: usize,
    pub config: SdeConfig,
    pub noise: Option<NoiseTrace>,
}

impl PathEnsemble {
    pub fn final_state(&self) -> &[f64] {
        self.positions.last().expect("a path records its initial state")
    }

    /// Recorded state at index `k` as a configuration.
    pub fn configuration(&self, k: usize) -> Result<PointConfiguration> {
        PointConfiguration::new(self.positions[k].clone(), self.beta, self.n, Frame::SoftEdge)
    }

    /// `time,rank,position` rows after a `#` header.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "# beta={} n={} m={} dt={} seed={} stream={}",
            self.beta, self.n, self.m, self.config.dt, self.config.seed, self.config.stream
        )?;
        writeln!(out, "time,rank,position")?;
        for (t, xs) in self.times.iter().zip(&self.positions) {
            for (rank, x) in xs.iter().enumerate() {
                writeln!(out, "{t},{},{x}", rank + 1)?;
            }
        }
        Ok(())
    }

    /// Sidecar description of the run.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "beta": self.beta.as_u8(),
            "n": self.n,
            "m": self.m,
            "dt": self.config.dt,
            "t_final": self.config.t_final,
            "seed": self.config.seed,
            "stream": self.config.stream,
            "guard": self.config.guard,
            "compensator": self.config.drift.mode,
            "radius": self.config.drift.radius,
            "accepted": self.accepted,
            "rejected": self.rejected,
        })
    }
}

/// Drift ½d(xᵢ, ·) of each moving particle given a frozen tail (sorted, below the head).
pub(crate) struct DriftField<'a> {
    beta: f64,
    n: usize,
    mode: CompensatorMode,
    radius: f64,
    compensator: f64,
    tail: Cow<'a, [f64]>,
    scratch: Vec<f64>,
}

impl<'a> DriftField<'a> {
    pub(crate) fn new(spec: &DriftSpec, n: usize, tail: &'a [f64]) -> Result<Self> {
        let compensator = match spec.mode {
            CompensatorMode::Semicircle => compensator(&EdgeDensity::limit(), spec.radius)?,
            CompensatorMode::FiniteN { .. } => 0.0,
            CompensatorMode::Palm => {
                return Err(Error::Capability(
                    "the Palm compensator is too costly per step; use semicircle or finite_n".into(),
                ))
            }
        };
        let n = match spec.mode {
            CompensatorMode::FiniteN { n } => n,
            _ => n,
        };
        // Only tail points inside the truncation ball ever contribute.
        let tail = match spec.mode {
            CompensatorMode::Semicircle => Cow::Owned(tail.iter().copied().filter(|y| y.abs() < spec.radius).collect()),
            _ => Cow::Borrowed(tail),
        };
        Ok(Self { beta: spec.beta.value(), n, mode: spec.mode, radius: spec.radius, compensator, tail, scratch: Vec::new() })
    }

    pub(crate) fn eval(&mut self, head: &[f64], out: &mut [f64]) -> Result<()> {
        self.scratch.clear();
        self.scratch.extend_from_slice(head);
        self.scratch.extend_from_slice(&self.tail);
        // Driftless paths (Girsanov weights) need not stay ordered.
        let sorted = self.scratch.windows(2).all(|w| w[0] > w[1]);
        if !sorted {
            self.scratch.sort_by(|a, b| b.partial_cmp(a).unwrap());
        }
        let all = &self.scratch;
        let lowest = head.iter().copied().fold(f64::INFINITY, f64::min);
        for (i, o) in out.iter_mut().enumerate() {
            let x = head[i];
            let i = if sorted { i } else { all.iter().position(|y| *y == x).expect("head point present") };
            let d = match self.mode {
                CompensatorMode::FiniteN { .. } => outward_sum(x, all, Some(i), |_| true)? - finite_compensator(self.n, x),
                _ => {
                    // Head interactions are kept whole; the tail is cut at |y| < r.
                    let r = self.radius;
                    outward_sum(x, all, Some(i), |y| y >= lowest || y.abs() < r)? - self.compensator
                }
            };
            *o = 0.5 * self.beta * d;
        }
        Ok(())
    }
}

/// Accepts `next` unless it is out of order or some gap fell below the
/// guard while more than halving in this step. `floor` is the frozen tail top.
fn admissible(prev: &[f64], next: &[f64], floor: Option<f64>, guard: f64) -> bool {
    if next.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let gap = |xs: &[f64], i: usize| -> f64 {
        if i + 1 < xs.len() {
            xs[i] - xs[i + 1]
        } else {
            floor.map_or(f64::INFINITY, |f| xs[i] - f)
        }
    };
    (0..next.len()).all(|i| {
        let (g0, g1) = (gap(prev, i), gap(next, i));
        g1 > 0.0 && !(g1 < guard && g1 < 0.5 * g0)
    })
}

struct Integrator<'a, R: Rng> {
    field: DriftField<'a>,
    floor: Option<f64>,
    cfg: SdeConfig,
    rng: R,
    state: Vec<f64>,
    drift: Vec<f64>,
    trial: Vec<f64>,
    t: f64,
    accepted: usize,
    rejected: usize,
    violations: usize,
    noise: Option<NoiseTrace>,
}

impl<R: Rng> Integrator<'_, R> {
    fn advance(&mut self, h: f64, dw: Vec<f64>, depth: u32) -> Result<()> {
        self.field.eval(&self.state, &mut self.drift)?;
        for i in 0..self.state.len() {
            self.trial[i] = self.state[i] + self.drift[i] * h + self.cfg.noise_scale * dw[i];
        }
        if admissible(&self.state, &self.trial, self.floor, self.cfg.guard) {
            if let Some(trace) = self.noise.as_mut() {
                trace.times.push(self.t);
                trace.dts.push(h);
                trace.states.push(self.state.clone());
                trace.dw.push(dw);
            }
            std::mem::swap(&mut self.state, &mut self.trial);
            self.t += h;
            self.accepted += 1;
            if self.state.windows(2).any(|w| w[0] <= w[1]) {
                self.violations += 1;
            }
            return Ok(());
        }
        self.rejected += 1;
        if depth >= MAX_HALVINGS {
            return Err(Error::Stiffness {
                time: self.t,
                reason: format!("step rejected after {MAX_HALVINGS} halvings"),
                state: self.state.clone(),
            });
        }
        // Brownian bridge: W(h/2) | W(h) = dw is N(dw/2, h/4).
        let sd = (0.25 * h).sqrt();
        let first: Vec<f64> = dw
            .iter()
            .map(|w| {
                let z: f64 = self.rng.sample(StandardNormal);
                0.5 * w + sd * z
            })
            .collect();
        let second: Vec<f64> = dw.iter().zip(&first).map(|(w, f)| w - f).collect();
        self.advance(0.5 * h, first, depth + 1)?;
        self.advance(0.5 * h, second, depth + 1)
    }
}

/// Core loop shared by all integrators. `increments`, when given, supplies
/// the Brownian increment of each nominal step.
fn integrate(
    beta: Beta,
    n: usize,
    head: &PointConfiguration,
    tail: &[f64],
    cfg: &SdeConfig,
    increments: Option<&[Vec<f64>]>,
) -> Result<PathEnsemble> {
    cfg.validate()?;
    if head.frame != Frame::SoftEdge {
        return Err(Error::Frame { expected: Frame::SoftEdge.to_string(), found: head.frame.to_string() });
    }
    if head.is_empty() {
        return Err(Error::Precondition("nothing to integrate: empty initial configuration".into()));
    }
    let floor = tail.first().copied();
    if let Some(f) = floor {
        if head.points()[head.len() - 1] <= f {
            return Err(Error::Precondition("the head must lie strictly above the tail".into()));
        }
    }
    let m = head.len();
    let steps = cfg.steps();
    if let Some(inc) = increments {
        if inc.len() < steps || inc.iter().any(|w| w.len() != m) {
            return Err(Error::Input(format!("need {steps} increments of length {m}")));
        }
    }
    let mut it = Integrator {
        field: DriftField::new(&cfg.drift, n, tail)?,
        floor,
        cfg: *cfg,
        rng: stream_rng(cfg.seed, cfg.stream),
        state: head.points().to_vec(),
        drift: vec![0.0; m],
        trial: vec![0.0; m],
        t: 0.0,
        accepted: 0,
        rejected: 0,
        violations: 0,
        noise: cfg.store_noise.then(NoiseTrace::default),
    };
    let mut times = vec![0.0];
    let mut positions = vec![it.state.clone()];
    for k in 0..steps {
        let h = if k + 1 == steps { cfg.t_final - k as f64 * cfg.dt } else { cfg.dt };
        let dw = match increments {
            Some(inc) => inc[k].clone(),
            None => {
                let sd = h.sqrt();
                (0..m)
                    .map(|_| {
                        let z: f64 = it.rng.sample(StandardNormal);
                        sd * z
                    })
                    .collect()
            }
        };
        it.advance(h, dw, 0)?;
        if (k + 1) % cfg.record_stride == 0 || k + 1 == steps {
            times.push(it.t);
            positions.push(it.state.clone());
        }
    }
    Ok(PathEnsemble {
        beta,
        n,
        m,
        times,
        positions,
        accepted: it.accepted,
        rejected: it.rejected,
        order_violations: it.violations,
        config: *cfg,
        noise: it.noise,
    })
}

fn check_beta(beta: Beta, cfg: &SdeConfig) -> Result<()> {
    if cfg.drift.beta != beta {
        return Err(Error::Precondition(format!("drift β = {} does not match β = {beta}", cfg.drift.beta)));
    }
    Ok(())
}

/// Finite-n soft-edge dynamics with drift (β/2)Σ 1/(xᵢ − xⱼ) − (β/2)(n^{1/3} + xᵢ/2n^{1/3}).
/// The compensator mode of `cfg.drift` is ignored.
pub fn simulate_finite(beta: Beta, n: usize, init: &PointConfiguration, cfg: &SdeConfig) -> Result<PathEnsemble> {
    finite_path(beta, n, init, cfg, None)
}

/// [`simulate_finite`] driven by given increments (one per nominal step).
pub fn simulate_finite_driven(
    beta: Beta,
    n: usize,
    init: &PointConfiguration,
    cfg: &SdeConfig,
    increments: &[Vec<f64>],
) -> Result<PathEnsemble> {
    finite_path(beta, n, init, cfg, Some(increments))
}

fn finite_path(
    beta: Beta,
    n: usize,
    init: &PointConfiguration,
    cfg: &SdeConfig,
    increments: Option<&[Vec<f64>]>,
) -> Result<PathEnsemble> {
    if init.len() != n {
        return Err(Error::Precondition(format!("initial configuration has {} points, expected {n}", init.len())));
    }
    let mut cfg = *cfg;
    cfg.drift = DriftSpec::new(beta, cfg.drift.radius, CompensatorMode::FiniteN { n })?;
    integrate(beta, n, init, &[], &cfg, increments)
}

/// One path per initial configuration; path i uses stream i of `cfg.seed`.
pub fn simulate_finite_many(beta: Beta, n: usize, inits: &[PointConfiguration], cfg: &SdeConfig) -> Result<Vec<PathEnsemble>> {
    inits
        .par_iter()
        .enumerate()
        .map(|(i, init)| {
            let mut c = *cfg;
            c.stream = i as u64;
            simulate_finite(beta, n, init, &c)
        })
        .collect()
}

/// The first m particles moving against a tail frozen at its initial value.
pub fn simulate_truncated_isde(
    beta: Beta,
    m: usize,
    init_head: &PointConfiguration,
    tail: &TailView,
    cfg: &SdeConfig,
) -> Result<PathEnsemble> {
    check_beta(beta, cfg)?;
    if init_head.len() != m {
        return Err(Error::Precondition(format!("head has {} points, expected m = {m}", init_head.len())));
    }
    integrate(beta, init_head.n, init_head, tail.points(), cfg, None)
}

/// Brownian motions started at `init` (no drift), with increments stored.
pub fn simulate_brownian(init: &PointConfiguration, cfg: &SdeConfig) -> Result<PathEnsemble> {
    let mut c = *cfg;
    c.store_noise = true;
    c.validate()?;
    let m = init.len();
    let mut rng = stream_rng(c.seed, c.stream);
    let steps = c.steps();
    let mut trace = NoiseTrace::default();
    let mut state = init.points().to_vec();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut positions = vec![state.clone()];
    for k in 0..steps {
        let h = if k + 1 == steps { c.t_final - k as f64 * c.dt } else { c.dt };
        let dw: Vec<f64> = (0..m)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                h.sqrt() * z
            })
            .collect();
        trace.times.push(t);
        trace.dts.push(h);
        trace.states.push(state.clone());
        for (x, w) in state.iter_mut().zip(&dw) {
            *x += c.noise_scale * w;
        }
        trace.dw.push(dw);
        t += h;
        if (k + 1) % c.record_stride == 0 || k + 1 == steps {
            times.push(t);
            positions.push(state.clone());
        }
    }
    Ok(PathEnsemble {
        beta: init.beta,
        n: init.n,
        m,
        times,
        positions,
        accepted: steps,
        rejected: 0,
        order_violations: 0,
        config: c,
        noise: Some(trace),
    })
}

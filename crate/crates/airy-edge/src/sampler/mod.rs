//! Exact samplers: the tridiagonal β-ensemble, discretised determinantal
//! sampling (including reduced Palm fields) and empirical densities.

mod dpp;
mod histogram;
mod tridiagonal;

use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Beta;

pub use dpp::{dpp_sample, DppSampler, DEFAULT_GRID_PER_UNIT};
pub use histogram::{empirical_density, Histogram};
pub use tridiagonal::{sample_beta_ensemble, sample_many, tridiagonal_eigenvalues};

/// Minimal separation below which two points count as coincident.
pub const COINCIDENCE: f64 = 1e-12;

/// Coordinates of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Eigenvalues of the matrix model (edge near 2√n).
    Raw,
    /// x = n^{1/6}(λ − 2√n).
    SoftEdge,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Raw => "raw",
            Frame::SoftEdge => "soft_edge",
        })
    }
}

/// Finite configuration sorted in strictly decreasing order.
///
/// `n` is the size of the ensemble the points come from; it fixes the
/// soft-edge scaling. Sub-configurations (heads, tails, Palm samples) keep
/// the parent's `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    points: Vec<f64>,
    pub beta: Beta,
    pub n: usize,
    pub frame: Frame,
}

impl PointConfiguration {
    /// Sorts `points` decreasingly; rejects non-finite or coincident points.
    pub fn new(mut points: Vec<f64>, beta: Beta, n: usize, frame: Frame) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("configuration point {p} is not finite")));
        }
        points.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if let Some(w) = points.windows(2).find(|w| w[0] - w[1] <= COINCIDENCE) {
            return Err(Error::Singularity(format!("coincident points {} and {}", w[0], w[1])));
        }
        Ok(Self { points, beta, n, frame })
    }

    /// Soft-edge configuration.
    pub fn soft_edge(points: Vec<f64>, beta: Beta, n: usize) -> Result<Self> {
        Self::new(points, beta, n, Frame::SoftEdge)
    }

    /// Empty soft-edge configuration.
    pub fn empty(beta: Beta, n: usize) -> Self {
        Self { points: Vec::new(), beta, n, frame: Frame::SoftEdge }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest point.
    pub fn top(&self) -> Option<f64> {
        self.points.first().copied()
    }

    /// Smallest gap between neighbours (∞ for fewer than two points).
    pub fn min_gap(&self) -> f64 {
        self.points.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min)
    }

    /// First `m` points and the rest.
    pub fn split_at(&self, m: usize) -> (Self, Self) {
        let m = m.min(self.points.len());
        let head = Self { points: self.points[..m].to_vec(), ..self.clone() };
        let tail = Self { points: self.points[m..].to_vec(), ..self.clone() };
        (head, tail)
    }

    /// The configuration without the point at index `i`.
    pub fn without(&self, i: usize) -> Self {
        let mut points = self.points.clone();
        points.remove(i);
        Self { points, ..self.clone() }
    }

    fn expect_frame(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(Error::Frame { expected: frame.to_string(), found: self.frame.to_string() })
        }
    }

    /// Maps raw eigenvalues to soft-edge coordinates x = n^{1/6}(λ − 2√n).
    pub fn to_soft_edge(&self) -> Result<Self> {
        self.expect_frame(Frame::Raw)?;
        let nf = self.n as f64;
        let (c, e) = (nf.powf(1.0 / 6.0), 2.0 * nf.sqrt());
        let points = self.points.iter().map(|l| c * (l - e)).collect();
        Ok(Self { points, frame: Frame::SoftEdge, ..self.clone() })
    }

    /// Inverse of [`to_soft_edge`](Self::to_soft_edge).
    pub fn to_raw(&self) -> Result<Self> {
        self.expect_frame(Frame::SoftEdge)?;
        let nf = self.n as f64;
        let (c, e) = (nf.powf(-1.0 / 6.0), 2.0 * nf.sqrt());
        let points = self.points.iter().map(|x| x * c + e).collect();
        Ok(Self { points, frame: Frame::Raw, ..self.clone() })
    }
}

/// Generator for stream `stream` of `seed`. Streams are independent, so
/// per-task streams make parallel runs reproducible for any thread count.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Writes samples as `sample_id,rank,position` rows after a `#` header.
pub fn write_csv<W: Write>(out: &mut W, samples: &[PointConfiguration], seed: u64) -> std::io::Result<()> {
    let (beta, n, frame) = match samples.first() {
        Some(s) => (s.beta.to_string(), s.n.to_string(), s.frame.to_string()),
        None => ("".into(), "".into(), "".into()),
    };
    writeln!(out, "# beta={beta} n={n} frame={frame} seed={seed}")?;
    writeln!(out, "sample_id,rank,position")?;
    for (id, s) in samples.iter().enumerate() {
        for (rank, p) in s.points.iter().enumerate() {
            writeln!(out, "{id},{},{p}", rank + 1)?;
        }
    }
    Ok(())
}

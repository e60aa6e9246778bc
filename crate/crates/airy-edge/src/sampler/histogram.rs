use serde::{Deserialize, Serialize};

use super::PointConfiguration;
use crate::error::{Error, Result};

/// Per-bin intensity (points per unit length) with Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub intensity: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: usize,
    /// Mean number of points outside the binned range.
    pub outside: f64,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Histogram over increasing `edges`.
pub fn empirical_density(samples: &[PointConfiguration], edges: &[f64]) -> Result<Histogram> {
    let Some(first) = samples.first() else {
        return Err(Error::Input("empirical density of an empty sample set".into()));
    };
    if edges.len() < 2 || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("bin edges must be increasing with at least two entries".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.frame != first.frame) {
        return Err(Error::Frame { expected: first.frame.to_string(), found: s.frame.to_string() });
    }
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut counts = vec![0.0; bins];
    let mut outside = 0.0;
    for s in samples {
        counts.iter_mut().for_each(|c| *c = 0.0);
        for &p in s.points() {
            if p < lo || p >= hi {
                outside += 1.0;
                continue;
            }
            let k = edges.partition_point(|e| *e <= p) - 1;
            counts[k] += 1.0;
        }
        for k in 0..bins {
            sum[k] += counts[k];
            sum_sq[k] += counts[k] * counts[k];
        }
    }
    let m = samples.len() as f64;
    let mut intensity = Vec::with_capacity(bins);
    let mut std_error = Vec::with_capacity(bins);
    for k in 0..bins {
        let w = edges[k + 1] - edges[k];
        let mean = sum[k] / m;
        let var = if m > 1.0 { (sum_sq[k] / m - mean * mean).max(0.0) * m / (m - 1.0) } else { 0.0 };
        intensity.push(mean / w);
        std_error.push((var / m).sqrt() / w);
    }
    Ok(Histogram { edges: edges.to_vec(), intensity, std_error, samples: samples.len(), outside: outside / m })
}

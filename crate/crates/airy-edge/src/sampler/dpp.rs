//! Sampling the finite-n β = 2 determinantal field, or its reduced Palm
//! field, discretised on a uniform grid.
//!
//! K^{n}(u, v) = f(u)ᵀf(v) with f_m = n^{−1/6}ψᵐ_n (m < n), an orthonormal
//! family. The Palm kernel at x is f(u)ᵀP f(v) with P the projection onto
//! f(x)^⊥. The windowed Gram matrix √h K √h therefore has rank ≤ n and its
//! eigenpairs come from an n × n problem; sampling then follows the
//! spectral (coin flip plus sequential projection) algorithm.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use super::{stream_rng, PointConfiguration};
use crate::error::{Error, Result};
use crate::kernels::{Beta, KernelHandle, Regime};
use crate::specfun::psi_ladder;

pub const DEFAULT_GRID_PER_UNIT: usize = 400;
const EIGENVALUE_SLACK: f64 = 1e-6;

/// Prepared sampler for one handle, window and grid.
#[derive(Debug, Clone)]
pub struct DppSampler {
    n: usize,
    centers: Vec<f64>,
    cell: f64,
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of the windowed Gram matrix, one column each.
    vectors: DMatrix<f64>,
}

impl DppSampler {
    pub fn new(handle: &KernelHandle, window: (f64, f64), grid_per_unit: usize) -> Result<Self> {
        let n = match (handle.beta, handle.regime) {
            (Beta::Two, Regime::Finite(n)) => n,
            _ => {
                return Err(Error::Capability(
                    "discretised sampling is implemented for finite-n β = 2 handles only".into(),
                ))
            }
        };
        // Validates n and the anchor density.
        handle.resolve()?;
        let (a, b) = window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("sampling window ({a}, {b}) must be finite and non-empty")));
        }
        if grid_per_unit == 0 {
            return Err(Error::Domain("grid density must be positive".into()));
        }
        let cells = ((b - a) * grid_per_unit as f64).ceil() as usize;
        let cell = (b - a) / cells as f64;
        let centers: Vec<f64> = (0..cells).map(|i| a + (i as f64 + 0.5) * cell).collect();
        let scale = (n as f64).powf(-1.0 / 6.0);
        let basis = |u: f64| psi_ladder(n - 1, n, u).into_iter().map(move |p| p * scale);

        let rows: Vec<Vec<f64>> = centers.par_iter().map(|&u| basis(u).collect()).collect();
        let weighted = DMatrix::from_fn(cells, n, |i, m| rows[i][m] * cell.sqrt());

        let coords = match handle.palm_anchor {
            None => DMatrix::identity(n, n),
            Some(x) => complement_basis(&DVector::from_iterator(n, basis(x))),
        };
        let a_mat = &weighted * &coords;
        let gram = a_mat.transpose() * &a_mat;
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top > 1.0 + EIGENVALUE_SLACK {
            return Err(Error::Discretisation(format!(
                "windowed Gram eigenvalue {top} exceeds 1; refine the grid"
            )));
        }
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();
        let mut vectors = a_mat * &eig.eigenvectors;
        for (j, &l) in eig.eigenvalues.iter().enumerate() {
            let s = if l > 1e-300 { 1.0 / l.sqrt() } else { 0.0 };
            vectors.column_mut(j).scale_mut(s);
        }
        Ok(Self { n, centers, cell, eigenvalues, vectors })
    }

    /// Eigenvalues of the windowed Gram matrix.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Expected number of points in the window.
    pub fn expected_count(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Number of grid cells.
    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    /// One configuration; positions are jittered uniformly inside their cell.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointConfiguration> {
        let chosen: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&j| rng.random::<f64>() < self.eigenvalues[j])
            .collect();
        let k = chosen.len();
        let cells = self.centers.len();
        let v = DMatrix::from_fn(cells, k, |i, c| self.vectors[(i, chosen[c])]);
        let mut weight: Vec<f64> = (0..cells).map(|i| v.row(i).norm_squared()).collect();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
        let mut points = Vec::with_capacity(k);
        for step in 0..k {
            let total: f64 = weight.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Accuracy(format!("sequential sampling lost all mass at step {step}")));
            }
            let mut target = rng.random::<f64>() * total;
            let mut idx = cells - 1;
            for (i, w) in weight.iter().enumerate() {
                if target < *w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            let mut e = v.row(idx).transpose();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&e);
                    e.axpy(-c, q, 1.0);
                }
            }
            let norm = e.norm();
            if !(norm > 0.0) {
                return Err(Error::Accuracy("degenerate sequential projection".into()));
            }
            e /= norm;
            let proj = &v * &e;
            for (w, p) in weight.iter_mut().zip(proj.iter()) {
                *w = (*w - p * p).max(0.0);
            }
            weight[idx] = 0.0;
            basis.push(e);
            points.push(self.centers[idx] + self.cell * (rng.random::<f64>() - 0.5));
        }
        PointConfiguration::soft_edge(points, Beta::Two, self.n)
    }

    /// `count` configurations; configuration i uses stream i of `seed`.
    pub fn sample_many(&self, count: usize, seed: u64) -> Result<Vec<PointConfiguration>> {
        (0..count)
            .into_par_iter()
            .map(|i| self.sample(&mut stream_rng(seed, i as u64)))
            .collect()
    }
}

/// Orthonormal basis of v^⊥ from the Householder reflection taking v to |v|e₁.
fn complement_basis(v: &DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    let norm = v.norm();
    let mut w = v.clone();
    w[0] -= if v[0] >= 0.0 { -norm } else { norm };
    let wn = w.norm();
    let h = if wn > 0.0 {
        let w = w / wn;
        DMatrix::identity(n, n) - 2.0 * &w * w.transpose()
    } else {
        DMatrix::identity(n, n)
    };
    h.columns(1, n - 1).into_owned()
}

/// One draw from stream 0 of `seed`.
pub fn dpp_sample(handle: &KernelHandle, window: (f64, f64), grid_per_unit: usize, seed: u64) -> Result<PointConfiguration> {
    DppSampler::new(handle, window, grid_per_unit)?.sample(&mut stream_rng(seed, 0))
}

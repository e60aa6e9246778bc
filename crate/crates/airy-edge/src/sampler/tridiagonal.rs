//! Tridiagonal β-ensemble: diagonal N(0, 2/β), off-diagonal χ_{β(n−k)}/√β.
//! Its eigenvalues have joint density ∝ ∏|xᵢ − xⱼ|^β e^{−(β/4)Σx²}.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use super::{stream_rng, Frame, PointConfiguration};
use crate::error::{Error, Result};
use crate::kernels::Beta;

/// One sample in the raw frame, drawn from stream 0 of `seed`.
pub fn sample_beta_ensemble(beta: Beta, n: usize, seed: u64) -> Result<PointConfiguration> {
    draw(beta, n, &mut stream_rng(seed, 0))
}

/// `count` samples; sample i uses stream i of `seed`.
pub fn sample_many(beta: Beta, n: usize, count: usize, seed: u64, soft_edge: bool) -> Result<Vec<PointConfiguration>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let c = draw(beta, n, &mut stream_rng(seed, i as u64))?;
            if soft_edge {
                c.to_soft_edge()
            } else {
                Ok(c)
            }
        })
        .collect()
}

pub(crate) fn draw<R: Rng + ?Sized>(beta: Beta, n: usize, rng: &mut R) -> Result<PointConfiguration> {
    if n == 0 {
        return Err(Error::Domain("ensemble size must be at least 1".into()));
    }
    let b = beta.value();
    let sd = (2.0 / b).sqrt();
    let mut diag: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect();
    let mut off = vec![0.0; n];
    for (k, e) in off.iter_mut().take(n - 1).enumerate() {
        let dof = b * (n - 1 - k) as f64;
        let g = Gamma::new(0.5 * dof, 2.0).expect("positive shape");
        *e = (g.sample(rng) / b).sqrt();
    }
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    PointConfiguration::new(diag, beta, n, Frame::Raw)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// couplings `e[i]` between i and i + 1 (the last entry is ignored), by
/// implicit QL with Wilkinson-type shifts. The eigenvalues overwrite `d`.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if e.len() != n {
        return Err(Error::Input("coupling vector must have the diagonal's length".into()));
    }
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Accuracy("tridiagonal QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn ql_matches_dense_solver() {
        let d0 = [1.0, -2.0, 0.5, 3.0, 0.0];
        let e0 = [0.7, 1.3, -0.2, 0.9, 0.0];
        let m = DMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                d0[i]
            } else if j == i + 1 {
                e0[i]
            } else if i == j + 1 {
                e0[j]
            } else {
                0.0
            }
        });
        let mut want: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (mut d, mut e) = (d0.to_vec(), e0.to_vec());
        tridiagonal_eigenvalues(&mut d, &mut e).unwrap();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in d.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }
}

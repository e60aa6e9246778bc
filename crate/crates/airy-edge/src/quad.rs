//! Quadrature helpers: Gauss–Legendre rules, composite panels and an
//! adaptive Gauss–Kronrod (7/15) integrator.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| w * half).collect();
        (x, w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_rule(n: usize) -> GaussRule {
    if n == 1 {
        return GaussRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        };
    }
    // Golub–Welsch start, then Newton polish on P_n.
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = legendre_with_derivative(n, *x);
            *x -= p / dp;
        }
        let (_, dp) = legendre_with_derivative(n, *x);
        weights.push(2.0 / ((1.0 - *x * *x) * dp * dp));
    }
    GaussRule { nodes, weights }
}

/// Cached Gauss–Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n.max(1))
        .or_insert_with(|| Arc::new(build_rule(n.max(1))))
        .clone()
}

/// Cumulative integration on one Gauss–Legendre panel: row i holds the
/// weights of ∫_{−1}^{t_i} p(t) dt for the interpolant p through the nodes.
pub fn integration_matrix(n: usize) -> Arc<Vec<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<f64>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n.max(1))
        .or_insert_with(|| Arc::new(build_integration_matrix(n.max(1))))
        .clone()
}

fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

fn build_integration_matrix(n: usize) -> Vec<Vec<f64>> {
    // ℓ_j(t) = w_j Σ_k (k + ½) P_k(t_j) P_k(t), exact for degree < n, and
    // ∫_{−1}^t P_k = (P_{k+1}(t) − P_{k−1}(t))/(2k + 1) for k ≥ 1.
    let rule = gauss_legendre(n);
    let at_nodes: Vec<Vec<f64>> = rule.nodes.iter().map(|&t| legendre_all(n, t)).collect();
    let mut m = vec![vec![0.0; n]; n];
    for (i, pi) in at_nodes.iter().enumerate() {
        let t = rule.nodes[i];
        for (j, pj) in at_nodes.iter().enumerate() {
            let mut s = 0.5 * (t + 1.0);
            for k in 1..n {
                s += 0.5 * pj[k] * (pi[k + 1] - pi[k - 1]);
            }
            m[i][j] = rule.weights[j] * s;
        }
    }
    m
}

/// Composite Gauss–Legendre over [a, b] with panels no wider than `width`.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, width: f64, order: usize, mut f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = gauss_legendre(order);
    let panels = ((b - a).abs() / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        acc += rule.integrate(lo, lo + h, &mut f);
    }
    acc
}

/// Composite rule as explicit nodes and weights (panels no wider than `width`).
pub fn composite_nodes(a: f64, b: f64, width: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let panels = ((b - a).abs() / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let (x, w) = rule.mapped(lo, lo + h);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Integrates an oscillatory integrand over [a, b] with Gauss–Legendre
/// panels sized from a local angular-frequency bound.
///
/// `omega(lo, hi)` must bound the local frequency of the integrand on
/// [lo, hi]; each panel spans at most 1.2/ω and at most 0.5.
pub fn oscillatory<F, W>(a: f64, b: f64, mut omega: W, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
    W: FnMut(f64, f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let rule = gauss_legendre(16);
    let mut acc = 0.0;
    let mut u = lo;
    while u < hi {
        let probe = (u + 0.5).min(hi);
        let w = (1.2 / omega(u, probe).max(1e-3)).min(0.5);
        let next = if hi - u < 1.5 * w { hi } else { u + w };
        acc += rule.integrate(u, next, &mut f);
        u = next;
    }
    sign * acc
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Adaptive Gauss–Kronrod 7/15 integration by interval bisection.
///
/// Returns the estimate and the accumulated error estimate. Fails with
/// [`Error::Accuracy`] when the subdivision budget is exhausted.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy(format!(
                "adaptive quadrature on [{a}, {b}]: error {err:e} after {MAX_INTERVALS} intervals"
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // Re-sum to avoid drift from incremental updates.
    let total: f64 = intervals.iter().map(|t| t.2).sum();
    let err: f64 = intervals.iter().map(|t| t.3).sum();
    Ok((total, err))
}

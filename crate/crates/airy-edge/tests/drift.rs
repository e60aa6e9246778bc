use airy_edge::drift::*;
use airy_edge::kernels::{Beta, Regime};
use airy_edge::sampler::{sample_many, PointConfiguration};
use airy_edge::Error;

fn soft_sample(beta: Beta, n: usize, seed: u64) -> PointConfiguration {
    sample_many(beta, n, 1, seed, true).unwrap().remove(0)
}

#[test]
fn truncated_drift_by_hand() {
    let c = PointConfiguration::soft_edge(vec![1.0, -2.0, -7.0], Beta::Two, 10).unwrap();
    let spec = DriftSpec::new(Beta::Two, 4.0, CompensatorMode::Semicircle).unwrap();
    let got = truncated_isde_drift(&spec, 0.5, &c).unwrap();
    let want = 1.0 / (0.5 - 1.0) + 1.0 / 2.5 - 4.0 / std::f64::consts::PI;
    assert!((got - want).abs() < 1e-14);
}

#[test]
fn drift_rejects_coincident_evaluation_point() {
    let c = PointConfiguration::soft_edge(vec![1.0, -2.0], Beta::One, 10).unwrap();
    let spec = DriftSpec::new(Beta::One, 4.0, CompensatorMode::Semicircle).unwrap();
    assert!(matches!(truncated_isde_drift(&spec, 1.0, &c), Err(Error::Singularity(_))));
    assert!(DriftSpec::new(Beta::One, 0.0, CompensatorMode::Semicircle).is_err());
}

#[test]
fn finite_log_derivative_needs_all_others() {
    let c = PointConfiguration::soft_edge(vec![1.0, -2.0], Beta::Two, 5).unwrap();
    assert!(matches!(finite_log_derivative(Beta::Two, 5, 0.0, &c), Err(Error::Precondition(_))));
}

#[test]
fn gradient_matches_difference_quotient() {
    let c = soft_sample(Beta::Two, 40, 3);
    let spec = DriftSpec::new(Beta::Two, 100.0, CompensatorMode::Semicircle).unwrap();
    let x = 0.5 * (c.points()[0] + c.points()[1]);
    let h = 1e-5;
    let fd = (log_derivative(&spec, x + h, &c).unwrap() - log_derivative(&spec, x - h, &c).unwrap()) / (2.0 * h);
    let g = drift_gradient(Beta::Two, x, &c, 100.0).unwrap();
    assert!((fd - g).abs() < 1e-5 * g.abs().max(1.0), "{fd} {g}");
}

#[test]
fn finite_decomposition_is_exact() {
    for (beta, n) in [(Beta::Two, 20), (Beta::One, 12), (Beta::Four, 10)] {
        let c = soft_sample(beta, n, 11);
        let x = c.points()[0];
        let others = c.without(0);
        let direct = finite_log_derivative(beta, n, x, &others).unwrap();
        let u = u_beta(beta, x, DEFAULT_SHELL, Regime::Finite(n)).unwrap();
        for s in [0.5, 2.0, 16.0] {
            let split = PalmSplit::new(beta, Regime::Finite(n), x, s).unwrap();
            let parts = beta.value() * (u + split.g(&others).unwrap() + split.w(&others).unwrap());
            assert!((direct - parts).abs() < 1e-9, "β = {beta} s = {s}: {direct} vs {parts}");
        }
    }
}

#[test]
fn full_radius_m_matches_u_at_origin() {
    for (beta, n) in [(Beta::Two, 16), (Beta::One, 8), (Beta::Four, 8)] {
        let m = m_n_r(beta, n, f64::INFINITY).unwrap();
        let u = u_beta(beta, 0.0, DEFAULT_SHELL, Regime::Finite(n)).unwrap();
        let want = beta.value() * (u + (n as f64).cbrt());
        assert!((m - want).abs() < 1e-10, "β = {beta}: {m} vs {want}");
    }
}

#[test]
fn limit_u_beta_frozen_values() {
    // Shell extrapolation at s = 200, cross-checked against raw shells at s = 800.
    let frozen = [
        (Beta::Two, 0.0, -0.94081),
        (Beta::Two, -2.0, -0.053239),
        (Beta::Two, 1.0, -1.30298),
        (Beta::One, 0.0, -0.80557),
        (Beta::Four, -2.0, -0.070692),
    ];
    for (beta, x, want) in frozen {
        let u = u_beta(beta, x, DEFAULT_SHELL, Regime::Limit).unwrap();
        assert!((u - want).abs() < 2e-4, "β = {beta} x = {x}: {u} vs {want}");
    }
}

#[test]
fn limit_u_beta_is_stable_in_the_shell() {
    let a = u_beta(Beta::Two, -1.0, 100.0, Regime::Limit).unwrap();
    let b = u_beta(Beta::Two, -1.0, 400.0, Regime::Limit).unwrap();
    assert!((a - b).abs() < 1e-4, "{a} {b}");
    let raw = u_beta_shell(Beta::Two, -1.0, 400.0).unwrap();
    // Without the ρ̂ tail the shell misses about |x|/(π√s).
    assert!((raw - b).abs() > 1e-2);
}

#[test]
fn routes_differ_by_a_vanishing_deterministic_term() {
    let c = soft_sample(Beta::Two, 100, 5);
    let x = c.points()[0];
    let others = c.without(0);
    let mut last = f64::INFINITY;
    for s in [100.0, 1.0e4, 1.0e6] {
        let a = log_derivative_route_a(Beta::Two, s, x, &others).unwrap();
        let b = log_derivative_route_b(Beta::Two, s, x, &others).unwrap();
        let d = (a - b).abs();
        assert!(d < last, "s = {s}: {d}");
        last = d;
    }
    assert!(last < 0.02, "{last}");
}

#[test]
fn limit_w_is_undefined() {
    let c = soft_sample(Beta::Two, 30, 2);
    let split = PalmSplit::new(Beta::Two, Regime::Limit, c.points()[0], 5.0).unwrap();
    assert!(split.w(&c.without(0)).is_err());
}

#[test]
fn free_potential_differentiates_to_u() {
    let (x, h) = (-1.0, 0.05);
    let fd = (free_potential(Beta::Two, x + h).unwrap() - free_potential(Beta::Two, x - h).unwrap()) / (2.0 * h);
    let u = u_beta(Beta::Two, x, DEFAULT_SHELL, Regime::Limit).unwrap();
    // Central difference error is h²Φ‴/6.
    assert!((fd + 2.0 * u).abs() < 2e-3, "{fd} {u}");
    assert_eq!(free_potential(Beta::Two, 0.0).unwrap(), 0.0);
}

#[test]
fn finite_log_derivative_small_cases() {
    let empty = PointConfiguration::empty(Beta::Two, 1);
    for x in [-1.0, 0.3] {
        let v = finite_log_derivative(Beta::Two, 1, x, &empty).unwrap();
        assert!((v - 2.0 * (-1.0 - x / 2.0)).abs() < 1e-15);
    }
    let one = PointConfiguration::soft_edge(vec![0.0], Beta::Two, 2).unwrap();
    let v = finite_log_derivative(Beta::Two, 2, 1.0, &one).unwrap();
    assert!((v + 1.313542).abs() < 1e-6, "{v}");
    let pair = PointConfiguration::soft_edge(vec![-0.7, 0.7], Beta::Four, 3).unwrap();
    let v = finite_log_derivative(Beta::Four, 3, 0.0, &pair).unwrap();
    assert!((v + 4.0 * 3f64.cbrt()).abs() < 1e-14);
}

#[test]
fn truncated_drift_is_half_the_semicircle_log_derivative() {
    let c = soft_sample(Beta::One, 60, 4);
    let spec = DriftSpec::new(Beta::One, 12.0, CompensatorMode::Semicircle).unwrap();
    let x = c.points()[0] + 0.3;
    let d = truncated_isde_drift(&spec, x, &c).unwrap();
    assert!((2.0 * d - log_derivative(&spec, x, &c).unwrap()).abs() < 1e-13);
    let empty = PointConfiguration::empty(Beta::Two, 10);
    let spec = DriftSpec::new(Beta::Two, 4.0, CompensatorMode::Semicircle).unwrap();
    assert!((truncated_isde_drift(&spec, 0.0, &empty).unwrap() + 4.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn gradient_single_particle_and_sign() {
    let c = PointConfiguration::soft_edge(vec![-1.0], Beta::Four, 2).unwrap();
    assert!((drift_gradient(Beta::Four, 0.0, &c, 5.0).unwrap() + 4.0).abs() < 1e-15);
    let c = soft_sample(Beta::Two, 30, 8);
    for k in 0..5 {
        let x = c.points()[k] + 0.01;
        let g = drift_gradient(Beta::Two, x, &c, 10.0).unwrap();
        assert!(g <= 0.0);
        let near = c.points().iter().filter(|y| (x - **y).abs() < 10.0).count() as f64;
        let delta = c.points().iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min);
        assert!(g >= -2.0 * near / (delta * delta));
    }
}

#[test]
fn empty_shell_leaves_minus_the_palm_integral() {
    let far = PointConfiguration::soft_edge(vec![-40.0], Beta::Two, 50).unwrap();
    let split = PalmSplit::new(Beta::Two, Regime::Finite(50), 0.0, 3.0).unwrap();
    assert!((split.g(&far).unwrap() + split.inner).abs() < 1e-15);
}

#[test]
fn finite_compensator_is_the_principal_value_transform() {
    for n in [8usize, 50] {
        let d = airy_edge::densities::EdgeDensity::finite(n);
        for x in [-0.5 * d.width(), -3.0, -0.2] {
            let pv = stieltjes(&d, x, f64::INFINITY).unwrap();
            let want = finite_compensator(n, x);
            assert!((pv - want).abs() < 1e-8, "n = {n} x = {x}: {pv} vs {want}");
        }
    }
    let lim = airy_edge::densities::EdgeDensity::limit();
    assert!(stieltjes(&lim, -1.0, f64::INFINITY).is_err());
}

#[test]
fn m_tail_is_bounded_and_converges_to_u() {
    let (beta, n, r) = (Beta::Two, 10, 50.0);
    let full = m_n_r(beta, n, f64::INFINITY).unwrap();
    let cut = m_n_r(beta, n, r).unwrap();
    assert!((full - cut).abs() <= beta.value() * (n as f64 - 1.0) / r);
    // Beyond the support dip the integrand ρ₀(y)/(−y) is positive on y < 0.
    let a = m_n_r(beta, n, 4.0).unwrap();
    let b = m_n_r(beta, n, 8.0).unwrap();
    assert!(a < b && b <= full + 1e-12);

    let limit = u_beta(beta, 0.0, DEFAULT_SHELL, Regime::Limit).unwrap();
    let mut last = f64::INFINITY;
    for n in [20usize, 50, 100] {
        let gap = beta.value() * (n as f64).cbrt() - m_n_r(beta, n, f64::INFINITY).unwrap();
        let err = (gap + beta.value() * limit).abs();
        assert!(err < last, "n = {n}: {err}");
        last = err;
    }
}

#[test]
fn finite_u_converges_to_limit() {
    let limit = u_beta(Beta::Two, 0.0, DEFAULT_SHELL, Regime::Limit).unwrap();
    let mut last = f64::INFINITY;
    for n in [20usize, 50, 100] {
        let err = (u_beta(Beta::Two, 0.0, DEFAULT_SHELL, Regime::Finite(n)).unwrap() - limit).abs();
        assert!(err < last, "n = {n}: {err}");
        last = err;
    }
    let a = u_beta(Beta::Two, 0.0, 200.0, Regime::Limit).unwrap();
    let b = u_beta(Beta::Two, 0.0, 800.0, Regime::Limit).unwrap();
    assert!((a - b).abs() < 4.0 * 200f64.powf(-0.25));
}

#[test]
fn free_potential_is_continuous() {
    let xs: Vec<f64> = (0..=20).map(|i| -5.0 + 0.5 * i as f64).collect();
    let phi: Vec<f64> = xs.iter().map(|&x| free_potential(Beta::Two, x).unwrap()).collect();
    // |Φ′| = 2|u| stays below 2·5 on [−5, 5], so neighbouring values differ by < 5.
    for w in phi.windows(2) {
        assert!((w[1] - w[0]).abs() < 5.0, "{w:?}");
    }
}

#[test]
fn truncation_radius_stability_matches_the_finite_density_deficit() {
    // Σ over 30 < |y| < 60 at n = 100 is dominated by the finite-n density,
    // so the mean change tracks the density quadrature, not 0.
    let (n, count) = (100, 200);
    let samples = sample_many(Beta::Two, n, count, 21, true).unwrap();
    let s30 = DriftSpec::new(Beta::Two, 30.0, CompensatorMode::Semicircle).unwrap();
    let s60 = DriftSpec::new(Beta::Two, 60.0, CompensatorMode::Semicircle).unwrap();
    let mut diffs = Vec::with_capacity(count);
    for c in &samples {
        let x = c.points()[0];
        let rest = c.without(0);
        diffs.push(truncated_isde_drift(&s60, x, &rest).unwrap() - truncated_isde_drift(&s30, x, &rest).unwrap());
    }
    let m = diffs.iter().sum::<f64>() / count as f64;
    let sd = (diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (count as f64 - 1.0)).sqrt();
    let d = airy_edge::densities::EdgeDensity::finite(n);
    let x0 = samples.iter().map(|c| c.points()[0]).sum::<f64>() / count as f64;
    let annulus = d.integrate(-60.0, -30.0, 40, |y| 1.0 / (x0 - y));
    let want = annulus - 2.0 * (60f64.sqrt() - 30f64.sqrt()) / std::f64::consts::PI;
    assert!((m - want).abs() < 3.0 * sd / (count as f64).sqrt() + 0.01, "{m} vs {want}");
}

use airy_edge::kernels::{Beta, KernelHandle};
use airy_edge::quad::gauss_legendre;
use airy_edge::sampler::*;
use airy_edge::Error;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0);
    (m, var.sqrt())
}

fn bin_average<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    gauss_legendre(16).integrate(a, b, f) / (b - a)
}

#[test]
fn single_particle_is_gaussian() {
    for beta in [Beta::One, Beta::Two, Beta::Four] {
        let count = 100_000;
        let xs: Vec<f64> = sample_many(beta, 1, count, 1, false).unwrap().iter().map(|c| c.points()[0]).collect();
        let (m, sd) = mean_sd(&xs);
        let var = sd * sd;
        let want = 2.0 / beta.value();
        // Var of the sample variance of a Gaussian is 2σ⁴/(N − 1).
        let se = want * (2.0 / (count as f64 - 1.0)).sqrt();
        assert!((var - want).abs() < 3.0 * se, "β = {beta}: {var} vs {want}");
        assert!(m.abs() < 3.0 * sd / (count as f64).sqrt());
    }
}

#[test]
fn bulk_second_moment_is_one() {
    let (n, count) = (200, 40);
    let samples = sample_many(Beta::Two, n, count, 2, false).unwrap();
    let moments: Vec<f64> = samples
        .iter()
        .map(|c| c.points().iter().map(|l| l * l / n as f64).sum::<f64>() / n as f64)
        .collect();
    let (m, sd) = mean_sd(&moments);
    assert!((m - 1.0).abs() < 3.0 * sd / (count as f64).sqrt() + 1e-12, "{m}");
}

#[test]
fn samples_are_ordered_with_positive_gaps() {
    for beta in [Beta::One, Beta::Two, Beta::Four] {
        for c in sample_many(beta, 50, 50, 3, true).unwrap() {
            assert_eq!(c.len(), 50);
            assert!(c.points().windows(2).all(|w| w[0] > w[1]));
            assert!(c.min_gap() > 0.0);
        }
    }
}

#[test]
fn sampling_is_bit_exact_across_thread_counts() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_many(Beta::One, 30, 12, 99, true).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(sample_beta_ensemble(Beta::Two, 10, 5).unwrap(), sample_beta_ensemble(Beta::Two, 10, 5).unwrap());
    assert_ne!(sample_beta_ensemble(Beta::Two, 10, 5).unwrap(), sample_beta_ensemble(Beta::Two, 10, 6).unwrap());
}

#[test]
fn soft_edge_map_round_trips() {
    let raw = sample_beta_ensemble(Beta::Four, 25, 4).unwrap();
    let back = raw.to_soft_edge().unwrap().to_raw().unwrap();
    for (a, b) in raw.points().iter().zip(back.points()) {
        assert!((a - b).abs() < 1e-12);
    }
    let edge = PointConfiguration::new(vec![2.0 * 25f64.sqrt()], Beta::Two, 25, Frame::Raw).unwrap();
    assert_eq!(edge.to_soft_edge().unwrap().points()[0], 0.0);
    let soft = raw.to_soft_edge().unwrap();
    assert!(matches!(soft.to_soft_edge(), Err(Error::Frame { .. })));
}

#[test]
fn top_particle_concentrates_near_the_edge() {
    let mut tops: Vec<f64> = sample_many(Beta::Two, 60, 201, 8, true).unwrap().iter().map(|c| c.points()[0]).collect();
    tops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = tops[100];
    assert!((-3.0..=2.0).contains(&median), "{median}");
}

#[test]
fn configurations_reject_bad_input() {
    assert!(matches!(PointConfiguration::soft_edge(vec![1.0, f64::NAN], Beta::Two, 2), Err(Error::Domain(_))));
    assert!(matches!(PointConfiguration::soft_edge(vec![1.0, 1.0], Beta::Two, 2), Err(Error::Singularity(_))));
    let c = PointConfiguration::soft_edge(vec![-1.0, 3.0, 0.5], Beta::Two, 3).unwrap();
    assert_eq!(c.points(), &[3.0, 0.5, -1.0]);
    assert!(sample_beta_ensemble(Beta::Two, 0, 1).is_err());
}

#[test]
fn csv_has_header_and_one_row_per_point() {
    let samples = sample_many(Beta::Two, 4, 3, 1, true).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &samples, 1).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# beta=2 n=4 frame=soft_edge seed=1");
    assert_eq!(lines[1], "sample_id,rank,position");
    assert_eq!(lines.len(), 2 + 12);
    let p: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(p, samples[0].points()[0]);
}

#[test]
fn histogram_mass_is_n_per_configuration() {
    let samples = sample_many(Beta::Two, 10, 50, 2, true).unwrap();
    let edges: Vec<f64> = (0..=40).map(|i| -30.0 + i as f64).collect();
    let h = empirical_density(&samples, &edges).unwrap();
    let mass: f64 = h.intensity.iter().sum::<f64>() + h.outside;
    assert!((mass - 10.0).abs() < 1e-12);
    assert!(empirical_density(&[], &edges).is_err());
    let mixed = vec![samples[0].clone(), samples[1].to_raw().unwrap()];
    assert!(matches!(empirical_density(&mixed, &edges), Err(Error::Frame { .. })));
}

fn histogram_matches_kernel(beta: Beta, n: usize, seed: u64) {
    let samples = sample_many(beta, n, 10_000, seed, true).unwrap();
    let edges: Vec<f64> = (0..=26).map(|i| -10.0 + 0.5 * i as f64).collect();
    let h = empirical_density(&samples, &edges).unwrap();
    let k = KernelHandle::finite(beta, n).resolve().unwrap();
    for (i, w) in edges.windows(2).enumerate() {
        let want = bin_average(w[0], w[1], |x| k.density(x));
        let tol = 3.0 * h.std_error[i] + 1e-3;
        assert!((h.intensity[i] - want).abs() < tol, "β = {beta}, bin {w:?}: {} vs {want} (se {})", h.intensity[i], h.std_error[i]);
    }
}

#[test]
fn beta_two_histogram_matches_kernel_diagonal() {
    histogram_matches_kernel(Beta::Two, 50, 10);
}

#[test]
fn beta_one_histogram_matches_quaternion_diagonal() {
    histogram_matches_kernel(Beta::One, 6, 11);
}

const WINDOW: (f64, f64) = (-8.0, 3.0);

fn window_integrals(n: usize) -> (f64, f64) {
    let k = KernelHandle::finite(Beta::Two, n).resolve().unwrap();
    let rule = gauss_legendre(16);
    let panels = 44;
    let h = (WINDOW.1 - WINDOW.0) / panels as f64;
    let mut nodes = Vec::new();
    for p in 0..panels {
        let (xs, ws) = rule.mapped(WINDOW.0 + p as f64 * h, WINDOW.0 + (p + 1) as f64 * h);
        nodes.extend(xs.into_iter().zip(ws));
    }
    let first: f64 = nodes.iter().map(|(x, w)| w * k.density(*x)).sum();
    let mut second = 0.0;
    for (x, wx) in &nodes {
        for (y, wy) in &nodes {
            let v = k.value(*x, *y).scalar_part();
            second += wx * wy * v * v;
        }
    }
    (first, second)
}

#[test]
fn dpp_count_moments_match_kernel_integrals() {
    let n = 20;
    let handle = KernelHandle::finite(Beta::Two, n);
    let sampler = DppSampler::new(&handle, WINDOW, DEFAULT_GRID_PER_UNIT).unwrap();
    let count = 4000;
    let counts: Vec<f64> = sampler.sample_many(count, 3).unwrap().iter().map(|c| c.len() as f64).collect();
    let (mean, sd) = mean_sd(&counts);
    let (first, second) = window_integrals(n);
    let var_want = first - second;
    assert!((mean - first).abs() < 3.0 * sd / (count as f64).sqrt(), "{mean} vs {first}");
    // Var of a sample variance ≈ (μ₄ − σ⁴)/N; counts are close to Gaussian here.
    let var = sd * sd;
    let se = var * (2.0 / (count as f64 - 1.0)).sqrt();
    assert!((var - var_want).abs() < 3.0 * se, "{var} vs {var_want}");
    assert!((sampler.expected_count() - first).abs() < 1e-3);
}

#[test]
fn palm_samples_avoid_the_anchor() {
    let n = 20;
    let handle = KernelHandle::finite(Beta::Two, n).with_anchor(0.0);
    let sampler = DppSampler::new(&handle, WINDOW, DEFAULT_GRID_PER_UNIT).unwrap();
    let samples = sampler.sample_many(3000, 4).unwrap();
    let edges: Vec<f64> = (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect();
    let h = empirical_density(&samples, &edges).unwrap();
    let palm = handle.resolve().unwrap();
    let plain = KernelHandle::finite(Beta::Two, n).resolve().unwrap();
    for (i, w) in edges.windows(2).enumerate() {
        let want = bin_average(w[0], w[1], |y| palm.density(y));
        assert!((h.intensity[i] - want).abs() < 3.0 * h.std_error[i] + 2e-3, "bin {w:?}: {} vs {want}", h.intensity[i]);
    }
    // The two bins touching 0 hold far less than the unconditioned density.
    for i in [7, 8] {
        let w = (edges[i], edges[i + 1]);
        assert!(h.intensity[i] < 0.25 * bin_average(w.0, w.1, |y| plain.density(y)));
    }
}

#[test]
fn dpp_rejects_unsupported_handles() {
    assert!(matches!(DppSampler::new(&KernelHandle::finite(Beta::One, 6), WINDOW, 100), Err(Error::Capability(_))));
    assert!(matches!(DppSampler::new(&KernelHandle::limit(Beta::Two), WINDOW, 100), Err(Error::Capability(_))));
    assert!(matches!(DppSampler::new(&KernelHandle::finite(Beta::Two, 20), (-30.0, 5.0), 1), Err(Error::Discretisation(_))));
}

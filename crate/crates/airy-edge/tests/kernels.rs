use airy_edge::kernels::*;
use airy_edge::quad;
use airy_edge::quaternion::{Quaternion, SelfDualMatrix};
use airy_edge::specfun::{ai, airy, airy_tail_integral, oscillator_psi, OscillatorIndex, OscillatorTail};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// (n, x, y, Kⁿ) from the sum form in 40-digit arithmetic.
const KN_REF: [(usize, f64, f64, f64); 4] = [
    (8, 0.3, -1.2, 0.10212760659074933463),
    (8, -2.0, -2.0, 0.46392645371733324),
    (32, 1.0, -4.0, -0.025256637838192151455),
    (6, -1.0, 0.5, 0.07452644007516312878),
];

const KAI_REF: [(f64, f64, f64); 5] = [
    (0.0, 0.0, 0.066987483779663974144),
    (0.3, -1.2, 0.10589048876145758356),
    (0.0, 20.0, 1.1277720458192480001e-28),
    (-5.0, -5.0, 0.72222156777167478541),
    (2.0, -3.0, -0.0018249663790288177711),
];

// (s, x, t, y, value)
const EXT_REF: [(f64, f64, f64, f64, f64); 4] = [
    (0.0, 0.0, 2.0, 0.0, 0.04544685282349152),
    (0.0, 0.5, 1.0, -0.5, 0.04830154554266507),
    (1.0, 0.5, 0.0, -0.5, -0.1674513415558222),
    (2.0, -1.0, 0.0, 0.3, -0.09455508207237477),
];

const F2_REF: [(f64, f64); 7] = [
    (-4.0, 3.544553595509602e-03),
    (-3.0, 8.031955293933470e-02),
    (-2.0, 4.132241425051214e-01),
    (-1.0, 8.072142419992852e-01),
    (0.0, 9.693728283552628e-01),
    (1.0, 9.975054381493901e-01),
    (2.0, 9.998875536983102e-01),
];

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn airy_kernel_reference_values() {
    for &(x, y, v) in &KAI_REF {
        let k = k_airy2(x, y);
        assert!(rel_close(k, v, 1e-9) || (k - v).abs() < 1e-13, "K_Ai({x},{y}) = {k}, want {v}");
    }
}

#[test]
fn airy_kernel_symmetry_and_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x = rng.random_range(-12.0..6.0);
        let y = rng.random_range(-12.0..6.0);
        assert!((k_airy2(x, y) - k_airy2(y, x)).abs() < 1e-12);
    }
    assert!(k_airy2(0.0, 20.0).abs() <= 20f64.powf(-0.75));
}

#[test]
fn airy_kernel_branch_switch() {
    for &x in &[-7.3, -1.0, 0.0, 2.5] {
        for &h in &[0.9e-4, 1.0e-4, 1.1e-4] {
            let a = k_airy2(x, x + h);
            let b = k_airy2(x, x + h * (1.0 - 1e-9));
            assert!((a - b).abs() < 1e-11, "x={x} h={h}: {a} {b}");
        }
        let d = airy(x).unwrap();
        let diag = d.ai_prime * d.ai_prime - x * d.ai * d.ai;
        assert!((k_airy2(x, x) - diag).abs() < 1e-14);
    }
}

#[test]
fn airy_kernel_derivative_matches_difference() {
    for &(x, y) in &[(0.0, 0.0), (-3.0, -3.01), (1.0, -2.0), (-6.0, -5.99)] {
        let h = 1e-5;
        let fd = (k_airy2(x, y + h) - k_airy2(x, y - h)) / (2.0 * h);
        assert!((k_airy2_dy(x, y) - fd).abs() < 1e-7, "({x},{y})");
    }
}

#[test]
fn finite_kernel_reference_values() {
    for &(n, x, y, v) in &KN_REF {
        let k = k_airy2_finite(n, x, y).unwrap();
        let s = k_airy2_finite_sum(n, x, y).unwrap();
        assert!((k - v).abs() < 1e-12, "K^{n}({x},{y}) = {k}, want {v}");
        assert!((s - v).abs() < 1e-12);
    }
}

#[test]
fn finite_kernel_sum_and_ratio_forms() {
    for &n in &[8usize, 32] {
        for i in 0..6 {
            for j in 0..6 {
                let x = -6.0 + 1.7 * i as f64;
                let y = -5.5 + 1.7 * j as f64;
                let r = k_airy2_finite_ratio(n, x, y).unwrap();
                let s = k_airy2_finite_sum(n, x, y).unwrap();
                assert!((r - s).abs() < 1e-8, "n={n} ({x},{y})");
            }
        }
    }
}

#[test]
fn finite_kernel_trace_is_n() {
    let n = 6;
    let lo = -4.0 * (n as f64).powf(2.0 / 3.0) - 20.0;
    let t = quad::composite(lo, 20.0, 0.25, 20, |x| k_airy2_finite(n, x, x).unwrap());
    assert!((t - n as f64).abs() < 1e-6, "trace {t}");
}

#[test]
fn finite_kernel_approaches_limit() {
    let d200 = (k_airy2_finite(200, 0.0, 1.0).unwrap() - k_airy2(0.0, 1.0)).abs();
    let d50 = (k_airy2_finite(50, 0.0, 1.0).unwrap() - k_airy2(0.0, 1.0)).abs();
    assert!(d200 < d50);
}

#[test]
fn orthogonal_limit_diagonal() {
    let q = k_airy_quaternion(Beta::One, 0.0, 0.0).unwrap();
    let expect = k_airy2(0.0, 0.0) + 0.5 * ai(0.0) * (1.0 - airy_tail_integral(0.0).unwrap());
    assert!((q.scalar_part().re - expect).abs() < 1e-14);
    assert_eq!(q.scalar_part().im, 0.0);
}

#[test]
fn symplectic_limit_diagonal() {
    let c = 2f64.powf(2.0 / 3.0);
    for &x in &[0.0, -1.5, 0.7] {
        let q = k_airy_quaternion(Beta::Four, x, x).unwrap();
        let xs = c * x;
        let tail = quad::composite(x, x + 30.0, 0.1, 16, |u| ai(c * u));
        let expect = 2f64.powf(-1.0 / 3.0) * k_airy2(xs, xs) - 2f64.powf(-2.0 / 3.0) * ai(xs) * tail;
        assert!((q.scalar_part().re - expect).abs() < 1e-12, "x={x}");
    }
}

fn gram(handle: KernelHandle, pts: &[f64]) -> Vec<Quaternion> {
    let k = handle.resolve().unwrap();
    let mut e = Vec::new();
    for &a in pts {
        for &b in pts {
            e.push(k.value(a, b).to_quaternion());
        }
    }
    e
}

#[test]
fn quaternion_kernels_are_self_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let handles = [
        KernelHandle::limit(Beta::One),
        KernelHandle::limit(Beta::Four),
        KernelHandle::finite(Beta::One, 6),
        KernelHandle::finite(Beta::One, 5),
        KernelHandle::finite(Beta::Four, 3),
    ];
    for h in handles {
        for _ in 0..5 {
            let x = rng.random_range(-8.0..3.0);
            let y = rng.random_range(-8.0..3.0);
            let e = gram(h, &[x, y]);
            let scale = e.iter().map(|q| q.norm_max()).fold(1.0, f64::max);
            let d = (e[1] - e[2].conjugate()).norm_max();
            assert!(d < 1e-10 * scale, "{h:?} ({x},{y}): defect {d:e}");
            assert!(SelfDualMatrix::self_dualized(2, e).is_ok());
        }
    }
}

#[test]
fn orthogonal_finite_even_diagonal() {
    let n = 6;
    let k = KernelHandle::finite(Beta::One, n).resolve().unwrap();
    let eps = OscillatorTail::new(OscillatorIndex::diagonal(n)).unwrap();
    for &x in &[-1.0, -5.0, 0.5, 2.0] {
        let lower = oscillator_psi(OscillatorIndex { n: n - 1, m: n }, x).unwrap();
        let expect = k_airy2_finite(n, x, x).unwrap() + 0.5 * lower * eps.epsilon(x);
        assert!((k.density(x) - expect).abs() < 1e-12);
    }
}

#[test]
fn symplectic_finite_diagonal() {
    // 2^{−1/3} K^{2n+1,2n}(X, X) + √(2n+1)/(2^{11/6} n^{1/2}) ψ^{2n}_{2n}(X) εψ^{2n}_{2n+1}(X).
    let n = 4;
    let x = 0.0;
    let k = KernelHandle::finite(Beta::Four, n).resolve().unwrap();
    let nf = n as f64;
    let xs = 2f64.powf(2.0 / 3.0) * x;
    let base = {
        let m = 2 * n;
        let s: f64 = airy_edge::specfun::psi_ladder(2 * n, m, xs).iter().map(|v| v * v).sum();
        s * (m as f64).powf(-1.0 / 3.0)
    };
    let psi = oscillator_psi(OscillatorIndex { n: 2 * n, m: 2 * n }, xs).unwrap();
    let eps = OscillatorTail::new(OscillatorIndex { n: 2 * n + 1, m: 2 * n }).unwrap().epsilon(xs);
    let expect = 2f64.powf(-1.0 / 3.0) * base
        + (2.0 * nf + 1.0).sqrt() / (2f64.powf(11.0 / 6.0) * nf.sqrt()) * psi * eps;
    assert!((k.density(x) - expect).abs() < 1e-12, "{} {expect}", k.density(x));
}

fn mass(handle: KernelHandle, n: usize) -> f64 {
    let k = handle.resolve().unwrap();
    let lo = -4.0 * (n as f64).powf(2.0 / 3.0) - 20.0;
    quad::composite(lo, 15.0, 0.25, 16, |x| k.density(x))
}

#[test]
fn quaternion_finite_masses() {
    assert!((mass(KernelHandle::finite(Beta::One, 4), 4) - 4.0).abs() < 1e-4);
    assert!((mass(KernelHandle::finite(Beta::One, 3), 3) - 3.0).abs() < 1e-4);
    assert!((mass(KernelHandle::finite(Beta::Four, 2), 2) - 2.0).abs() < 1e-4);
}

#[test]
fn l_product_routes() {
    let k2 = KernelHandle::finite(Beta::Two, 20).resolve().unwrap();
    let v = k_airy2_finite(20, 0.0, 1.0).unwrap();
    assert!((k2.l_product(0.0, 1.0) - v * v).abs() < 1e-15);
    for h in [
        KernelHandle::finite(Beta::One, 6),
        KernelHandle::finite(Beta::Four, 3),
        KernelHandle::limit(Beta::One),
        KernelHandle::limit(Beta::Four),
    ] {
        let k = h.resolve().unwrap();
        for &(x, y) in &[(0.0, 1.0), (-2.0, -0.5), (-4.5, 0.8)] {
            let j = k.l_product(x, y);
            let q = k.l_product_quaternion(x, y);
            assert!((j - q.re).abs() < 1e-9, "{h:?} ({x},{y}): {j} {}", q.re);
            assert!(q.im.abs() < 1e-10);
        }
    }
}

#[test]
fn palm_kernel_identities() {
    let h = KernelHandle::limit(Beta::Two).with_anchor(0.0);
    for &z in &[-3.0, 0.5, 2.0] {
        assert!(palm_kernel(&h, 0.0, z).unwrap().scalar_part().abs() < 1e-15);
    }
    let rho1 = k_airy2(0.0, 0.0);
    let rho2 = correlation(&CorrelationRequest { handle: KernelHandle::limit(Beta::Two), points: vec![0.0, 1.0] }).unwrap();
    let palm = h.resolve().unwrap().density(1.0);
    assert!((palm - rho2 / rho1).abs() < 1e-10);

    let n = 10;
    let hf = KernelHandle::finite(Beta::Two, n).with_anchor(-1.0);
    let k = hf.resolve().unwrap();
    let base = KernelHandle::finite(Beta::Two, n).resolve().unwrap();
    for &u in &[-3.0, 0.0, 1.5] {
        let expect = base.density(u) - base.l_product(-1.0, u) / base.density(-1.0);
        assert!((k.density(u) - expect).abs() < 1e-14);
        assert!((k.value(u, u).scalar_part() - expect).abs() < 1e-12);
    }
}

#[test]
fn palm_removes_one_particle() {
    let n = 20;
    let base = KernelHandle::finite(Beta::Two, n).resolve().unwrap();
    let palm = KernelHandle::finite(Beta::Two, n).with_anchor(0.0).resolve().unwrap();
    let lo = -4.0 * (n as f64).powf(2.0 / 3.0) - 15.0;
    let d = quad::composite(lo, 12.0, 0.2, 16, |y| base.density(y) - palm.density(y));
    assert!((d - 1.0).abs() < 1e-4, "{d}");
}

#[test]
fn degenerate_anchor_is_rejected() {
    let e = KernelHandle::finite(Beta::Two, 5).with_anchor(40.0).resolve().unwrap_err();
    assert!(matches!(e, airy_edge::Error::SingularAnchor { .. }));
}

#[test]
fn palm_quaternion_is_self_dual() {
    let h = KernelHandle::finite(Beta::One, 6).with_anchor(-1.0);
    let e = gram(h, &[0.3, -2.0]);
    let d = (e[1] - e[2].conjugate()).norm_max();
    assert!(d < 1e-9);
    let k = h.resolve().unwrap();
    assert!(k.density(-1.0).abs() < 1e-10);
}

#[test]
fn correlations_small_orders() {
    let h = KernelHandle::limit(Beta::Two);
    let r1 = correlation(&CorrelationRequest { handle: h, points: vec![0.4] }).unwrap();
    assert!((r1 - k_airy2(0.4, 0.4)).abs() < 1e-15);
    let r2 = correlation(&CorrelationRequest { handle: h, points: vec![0.4, -1.0] }).unwrap();
    let expect = k_airy2(0.4, 0.4) * k_airy2(-1.0, -1.0) - k_airy2(0.4, -1.0).powi(2);
    assert!((r2 - expect).abs() < 1e-14 && r2 >= 0.0);
    let q = correlation(&CorrelationRequest { handle: KernelHandle::limit(Beta::One), points: vec![0.4] }).unwrap();
    assert!((q - k_airy_quaternion(Beta::One, 0.4, 0.4).unwrap().scalar_part().re).abs() < 1e-15);
}

#[test]
fn correlations_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let handles = [
        KernelHandle::limit(Beta::One),
        KernelHandle::limit(Beta::Two),
        KernelHandle::limit(Beta::Four),
        KernelHandle::finite(Beta::One, 8),
        KernelHandle::finite(Beta::Two, 8),
        KernelHandle::finite(Beta::Four, 4),
    ];
    for h in handles {
        let k = h.resolve().unwrap();
        for trial in 0..17 {
            let order = 1 + trial % 3;
            let pts: Vec<f64> = (0..order).map(|_| rng.random_range(-7.0..2.0)).collect();
            let v = k.correlation(&pts).unwrap();
            assert!(v >= 0.0, "{h:?} {pts:?}: {v}");
        }
    }
}

#[test]
fn quaternion_order_cap() {
    let req = CorrelationRequest { handle: KernelHandle::limit(Beta::One), points: (0..10).map(|i| i as f64 * 0.1).collect() };
    assert!(matches!(correlation(&req), Err(airy_edge::Error::Capability(_))));
}

#[test]
fn extended_kernel_reference_values() {
    for &(s, x, t, y, v) in &EXT_REF {
        let k = extended_airy_kernel(s, x, t, y).unwrap();
        assert!((k - v).abs() < 1e-9, "({s},{x},{t},{y}) = {k}, want {v}");
    }
}

#[test]
fn extended_kernel_equal_time() {
    for i in 0..5 {
        for j in 0..5 {
            let x = -3.0 + 1.3 * i as f64;
            let y = -2.5 + 1.2 * j as f64;
            let e = extended_airy_kernel(0.7, x, 0.7, y).unwrap();
            assert!((e - k_airy2(x, y)).abs() < 1e-7, "({x},{y})");
        }
    }
    let damped = extended_airy_kernel(0.0, 0.0, 2.0, 0.0).unwrap();
    assert!(damped > 0.0 && damped < k_airy2(0.0, 0.0));
}

#[test]
fn gap_probability() {
    for &(s, v) in &F2_REF {
        let f = fredholm_gap(s, 60).unwrap();
        assert!((f - v).abs() < 1e-9, "F2({s}) = {f}, want {v}");
    }
    assert!(1.0 - fredholm_gap(8.0, 40).unwrap() < 1e-8);
    let a = fredholm_gap(-2.0, 40).unwrap();
    let b = fredholm_gap(-2.0, 80).unwrap();
    assert!((a - b).abs() < 1e-6);
    assert!(fredholm_gap(-1.0, 40).unwrap() < fredholm_gap(0.0, 40).unwrap());
    assert!(fredholm_gap(0.0, 40).unwrap() < fredholm_gap(1.0, 40).unwrap());
    assert!(fredholm_gap(0.0, 5).is_err());
    assert!(matches!(fredholm_gap_for(1, 0.0, 40), Err(airy_edge::Error::Capability(_))));
}

#[test]
fn kernel_columns_match_pointwise_values() {
    use airy_edge::kernels::PanelGrid;
    let panels: Vec<(f64, f64)> = (0..30).map(|i| (-9.0 + 0.4 * i as f64, -9.0 + 0.4 * (i + 1) as f64)).collect();
    let grid = PanelGrid::new(panels, 8).unwrap();
    for handle in [KernelHandle::finite(Beta::One, 7), KernelHandle::finite(Beta::Four, 6), KernelHandle::limit(Beta::One), KernelHandle::finite(Beta::Two, 9)] {
        let k = handle.resolve().unwrap();
        let cols = k.columns(&grid).unwrap();
        for j in (0..grid.len()).step_by(23) {
            let col = cols.column(j);
            for i in (0..grid.len()).step_by(17) {
                let want = k.value(grid.nodes[i], grid.nodes[j]).to_quaternion();
                assert!((col[i].to_quaternion() - want).norm_max() < 1e-8, "{handle:?} at ({i}, {j})");
            }
        }
    }
    assert!(PanelGrid::new(vec![(0.0, 1.0), (1.5, 2.0)], 8).is_err());
    let anchored = KernelHandle::finite(Beta::Two, 9).with_anchor(0.0).resolve().unwrap();
    assert!(anchored.columns(&grid).is_err());
}

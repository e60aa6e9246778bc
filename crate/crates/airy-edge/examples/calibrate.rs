//! Prints golden ceilings: twice the largest value seen on the reference
//! configurations, rounded up to two significant digits.
//!
//! Run `scripts/calibrate-ceilings.sh` to refresh `golden/ceilings.json`.

use airy_edge::kernels::{Beta, Regime};
use airy_edge::verify::*;

const MARGIN: f64 = 2.0;
const BETAS: [Beta; 3] = [Beta::One, Beta::Two, Beta::Four];

fn round_up(v: f64) -> f64 {
    if v <= 0.0 {
        return 1e-12;
    }
    let exp = v.log10().floor() as i32 - 1;
    let digits = (v / 10f64.powi(exp)).ceil();
    // Through a decimal string so the printed JSON stays short.
    format!("{digits}e{exp}").parse().unwrap()
}

fn sup(report: &BoundReport, series: &str) -> f64 {
    report.series(series).iter().map(|v| v.1).fold(0.0, f64::max)
}

fn main() -> airy_edge::Result<()> {
    let none = Ceilings::none();

    let mut density: f64 = 0.0;
    for beta in BETAS {
        let regimes = [Regime::Finite(20), Regime::Finite(50), Regime::Finite(100)];
        let r = check_density_bound(beta, &regimes, &Grid::new(-1e9, 10.0, 0.05), &none)?;
        density = density.max(sup(&r, "weighted_sup"));
    }
    eprintln!("density bound: {density}");

    let mut palm: f64 = 0.0;
    for beta in BETAS {
        let grid = Grid::union(vec![(-40.0, -2.0), (2.0, 10.0)], 0.1);
        let r = check_palm_difference(beta, Regime::Finite(50), 0.0, &grid, &none)?;
        palm = palm.max(sup(&r, "weighted_sup"));
    }
    eprintln!("palm difference: {palm}");

    let mut i_max = [0.0f64; 6];
    for beta in BETAS {
        for n in [20, 50] {
            for x in [-2.0, 0.0, 2.0] {
                for k in 1..=6 {
                    let r = evaluate_i_integrals(beta, n, k, x, &[16.0], &none)?;
                    i_max[k - 1] = i_max[k - 1].max(sup(&r, "I"));
                }
            }
        }
        eprintln!("I-integrals after β = {beta}: {i_max:?}");
    }

    let sets = [ExponentSet::new(-0.25, 0.5, 1.0, 0.0, 0.5, 0.5), ExponentSet::new(0.0, 0.0, 2.0, 0.0, 0.5, 0.0)];
    let r = check_g_decay(&sets, &[64.0], &none)?;
    let g = r.values.iter().filter(|v| v.at == 64.0).map(|v| v.value).fold(0.0, f64::max);
    eprintln!("G decay: {g}");

    let ceilings = Ceilings {
        density_bound: Some(round_up(MARGIN * density)),
        density_spread: Some(2.0),
        palm_difference: Some(round_up(MARGIN * palm)),
        i_integral: Some(i_max.map(|v| round_up(MARGIN * v))),
        g_decay: Some(round_up(MARGIN * g)),
    };
    println!("{}", serde_json::to_string_pretty(&ceilings).expect("ceilings serialise"));
    Ok(())
}

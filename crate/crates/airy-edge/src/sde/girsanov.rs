use serde::{Deserialize, Serialize};

use super::{DriftField, PathEnsemble};
use crate::drift::{CompensatorMode, DriftSpec, TailView};
use crate::error::{Error, Result};

/// Running ∫b·dW and ½∫|b|²dt of a path, stopped at τ_h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GirsanovAccumulator {
    pub stochastic: f64,
    pub quadratic: f64,
    pub h: f64,
    /// First time the quadratic term reached h, if before the end.
    pub tau: Option<f64>,
    pub t_final: f64,
}

impl GirsanovAccumulator {
    pub fn log_density(&self) -> f64 {
        self.stochastic - self.quadratic
    }

    pub fn density(&self) -> f64 {
        self.log_density().exp()
    }

    /// τ_h ∧ T.
    pub fn stopping_time(&self) -> f64 {
        self.tau.unwrap_or(self.t_final)
    }
}

/// Log Radon–Nikodym density of the frozen-tail m-particle law against
/// Brownian motion along the realised increments of `path`, with the
/// semicircle-compensated drift of `spec`.
pub fn girsanov_log_density(path: &PathEnsemble, m: usize, tail: &TailView, h: f64, spec: &DriftSpec) -> Result<GirsanovAccumulator> {
    if spec.mode != CompensatorMode::Semicircle {
        return Err(Error::Precondition("the Girsanov drift uses the semicircle compensator".into()));
    }
    let mut field = DriftField::new(spec, path.n, tail.points())?;
    girsanov_with(path, m, h, |x, out| field.eval(x, out))
}

/// Same accumulation for an arbitrary drift `b(x, out)`.
pub fn girsanov_with<B>(path: &PathEnsemble, m: usize, h: f64, mut b: B) -> Result<GirsanovAccumulator>
where
    B: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let Some(trace) = path.noise.as_ref() else {
        return Err(Error::Input("path was recorded without its Brownian increments".into()));
    };
    if !(h > 0.0) {
        return Err(Error::Domain(format!("threshold h must be positive, got {h}")));
    }
    if m == 0 || m > path.m {
        return Err(Error::Precondition(format!("m = {m} outside 1..={}", path.m)));
    }
    let mut acc = GirsanovAccumulator { stochastic: 0.0, quadratic: 0.0, h, tau: None, t_final: path.config.t_final };
    let mut drift = vec![0.0; m];
    for k in 0..trace.dw.len() {
        b(&trace.states[k][..m], &mut drift)?;
        let dt = trace.dts[k];
        let dw = &trace.dw[k];
        acc.stochastic += drift.iter().zip(dw).map(|(b, w)| b * w).sum::<f64>();
        acc.quadratic += 0.5 * dt * drift.iter().map(|b| b * b).sum::<f64>();
        if acc.quadratic >= h {
            acc.tau = Some((trace.times[k] + dt).min(acc.t_final));
            break;
        }
    }
    Ok(acc)
}

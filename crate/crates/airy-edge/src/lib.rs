//! Numerics for the soft edge of β-ensembles (β = 1, 2, 4).
//!
//! Airy and Hermite special functions, limit and finite-n correlation
//! kernels (scalar for β = 2, quaternion for β = 1, 4), reduced Palm
//! kernels, edge densities, regularised drifts, exact samplers and
//! Euler–Maruyama integration of the soft-edge Dyson dynamics, plus
//! verification suites that check decay and boundedness estimates on grids.

pub mod densities;
pub mod drift;
pub mod error;
pub mod kernels;
pub mod quad;
pub mod sde;
pub mod quaternion;
pub mod sampler;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};

//! Special functions: the Airy function, Hermite oscillator functions,
//! the ε-transform and the leading Plancherel–Rotach term.

mod airy;
mod oscillator;

pub use airy::{ai, airy, airy_tail_integral, AiryValue, AI0, AIP0};
pub(crate) use airy::airy_state;
pub use oscillator::{
    epsilon_psi, hermite_argument, oscillator_psi, oscillator_psi_prime,
    oscillator_psi_with_limit, phi_ladder, phi_triple, plancherel_rotach_leading, psi_ladder,
    psi_potential, psi_total_integral, psi_triple, OscillatorIndex, OscillatorTail,
    PlancherelRotach, DEFAULT_N_MAX, PR_WINDOW_EXPONENT,
};

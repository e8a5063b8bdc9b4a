//! Action-angle variables of the unperturbed motion.
//!
//! The definitional integrals in [`exact`] and [`three_d`] are authoritative;
//! the printed closed forms and asymptotics are evaluated alongside them so
//! their agreement can be checked.

pub mod asymptotic;
pub mod chart;
pub mod exact;
pub mod fourier;
pub mod three_d;

pub use asymptotic::{
    fourier_large_a, fourier_small_a, h0_large_a, h0_small_a, omega0_large_a, omega0_large_a_printed, omega0_small_a,
    AsymptoticConstants, Regime, RegimeGates,
};
pub use chart::{ActionAngleChart, DEFAULT_CHART_NODES};
pub use exact::{
    action_1d_closed, action_1d_printed, action_1d_quadrature, angle_of_x, angle_printed,
    closed_form_convention_constant, energy_at_turning_point, energy_of_action, modulus_k, omega0_exact,
    omega0_prime_exact, period, Branch,
};
pub use fourier::{fourier_at_energy, fourier_x_k, sample_orbit, FourierAmplitudes, OrbitSamples};
pub use three_d::{
    action_3d_closed, action_3d_printed, action_3d_quadrature, energy_of_action_3d, h0_3d, omega0_3d, omega0_3d_printed,
};

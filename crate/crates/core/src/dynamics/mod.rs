//! Driven motion in regularized coordinates, stroboscopic sections and chaos
//! diagnostics.

pub mod chaos;
pub mod integrator;
pub mod section;

pub use chaos::{
    action_diffusion, chaotic_fraction, divergence_run, lyapunov_mle, ChaosConfig, ChaosReport, Classification,
    DiffusionFit, DiffusionRow, DivergenceRun, LyapunovEstimate,
};
pub use integrator::{
    advance_to_time, derivatives, driven_energy, fictitious_period, step_regularized, step_with, unperturbed_energy,
    Advance, IntegratorConfig, PhaseState, RegularizedState, Scheme,
};
pub use section::{
    initial_grid, phase_point, state_from_action_angle, stroboscopic_section, write_section_csv, InitialCondition,
    SectionConfig, SectionPoint, Trajectory, TrajectoryTag,
};

//! Classical chaotization of a particle in a driven Coulomb-plus-linear
//! potential: action-angle variables, resonance-overlap estimates of the
//! critical field, and regularized integration of the driven motion.

pub mod action_angle;
pub mod chirikov;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod potential;
pub mod quadrature;
pub mod roots;

pub use action_angle::{ActionAngleChart, FourierAmplitudes};
pub use chirikov::{
    ChirikovConfig, CriticalFieldResult, CriticalRegime, Resonance, ResonancePair, ScanMode, ScanRow, WidthLaw,
};
pub use dynamics::{PhaseState, RegularizedState, SectionPoint};
pub use elliptic::EllipticModulus;
pub use error::{Error, Result};
pub use potential::{CentrifugalConvention, DriveParams, SystemParams, TurningPoints1D, TurningPoints3D};

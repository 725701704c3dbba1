//! Forward models and analysis tools for femtosecond-laser-triggered
//! field-emission electron sources.
//!
//! * [`emission`]: Fowler-Nordheim, photofield and optical field emission.
//! * [`laser`]: pulse energetics, focusing and the optical field at the tip.
//! * [`fitting`]: damped least squares and the I–V / polarisation fit models.
//! * [`pulse`]: Poisson pulse trains and their power spectrum.
//! * [`metrics`]: instantaneous current, current density and brightness.
//! * [`io`]: configuration, CSV tables, synthetic data and the command line.
//!
//! Runnable walk-throughs live in the crate's `examples/` directory.

pub mod constants;
pub mod emission;
pub mod error;
pub mod fitting;
pub mod io;
pub mod laser;
pub mod metrics;
pub mod pulse;
pub mod quadrature;

pub use constants::PhysicalConstants;
pub use emission::{Envelope, FieldState, FowlerNordheim, NordheimParams, TipSpec};
pub use error::{Error, Result};
pub use fitting::{FitResult, SweepDataset, SweepKind};
pub use laser::LaserSpec;
pub use pulse::{PulseTrainRecord, SpectrumEstimate};

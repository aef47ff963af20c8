//! Simulation of phonon modes in a uniformly box-trapped Bose-Einstein
//! condensate driven by the oscillating gravitational field of a small
//! sphere, plus the planning layer that sizes experiments (atom numbers,
//! geometries, initial states) for a target signal-to-noise ratio.
//!
//! Module map:
//! - [`grav_source`]: the sphere's field along the trap axis.
//! - [`condensate`]: species data and derived background parameters.
//! - [`mode_dynamics`]: classical mode amplitudes, driving moments,
//!   resonant solutions, and a fixed-step ODE integrator.
//! - [`damping`]: Landau, Beliaev, and atom-loss damping rates.
//! - [`quantum_channels`]: transition amplitudes and a Gaussian-state
//!   engine for displacement, squeezing, and mode mixing.
//! - [`metrology`]: noise models, SNR, quantum Fisher information,
//!   Cramer-Rao bounds, and the seismic floor.
//! - [`planner`] / [`config`]: end-to-end plans, sweeps, reference-table
//!   reproduction, and the units-aware configuration format.

pub mod condensate;
pub mod config;
pub mod constants;
pub mod damping;
mod error;
pub mod grav_source;
pub mod metrology;
pub mod mode_dynamics;
pub mod planner;
pub mod quad;
pub mod quantum_channels;

pub use error::{Error, Result};

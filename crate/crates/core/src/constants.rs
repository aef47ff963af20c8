//! Physical constants, SI units throughout.

/// Newtonian constant of gravitation. m^3 kg^-1 s^-2
pub const G: f64 = 6.674e-11;
/// Reduced Planck constant. J s
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant. J/K
pub const K_B: f64 = 1.380649e-23;
/// Default density of the source sphere (gold/tungsten). kg/m^3
pub const DENSE_METAL_DENSITY: f64 = 19300.0;

//! Gravitational field of the oscillating source sphere along the trap
//! axis: static coefficients at the trap center, first-order oscillation
//! amplitudes, and the exact axial potential used as a numeric oracle.
//!
//! Geometry: the sphere sits on the +x side of the trap. Its center is at
//! distance `R(t) = R0 + delta_r * sin(Omega t + phase)` from the trap
//! center, with `R0 = r + r_min + L/2 + delta_r` so that the surface never
//! comes closer to the trap end than `r_min`.

use crate::constants::G;
use crate::{Error, Result};

/// Stroke ratio above which the linear-in-stroke expansion of the field is
/// considered strained; crossing it yields a warning, not an error.
pub const STROKE_RATIO_WARN: f64 = 0.15;

/// Oscillating massive sphere driving the condensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSphere {
    /// Sphere mass. kg
    pub mass: f64,
    /// Sphere material density. kg/m^3
    pub density: f64,
    /// Closest gap between sphere surface and trap end. m
    pub r_min: f64,
    /// Stroke of the sinusoidal motion. m
    pub delta_r: f64,
    /// Drive angular frequency. rad/s
    pub omega: f64,
    /// Drive phase. rad
    pub phase: f64,
}

impl SourceSphere {
    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 {
            return Err(Error::Domain("sphere mass must be positive".into()));
        }
        if self.density <= 0.0 {
            return Err(Error::Domain("sphere density must be positive".into()));
        }
        if self.r_min < 0.0 || self.delta_r < 0.0 {
            return Err(Error::Domain("gap and stroke must be non-negative".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::Domain("drive frequency must be positive".into()));
        }
        Ok(())
    }

    /// Sphere radius from mass and density.
    pub fn radius(&self) -> Result<f64> {
        sphere_radius(self.mass, self.density)
    }

    /// Center-to-center equilibrium distance for a trap of length `l`.
    pub fn equilibrium_distance(&self, l: f64) -> Result<f64> {
        if l < 0.0 {
            return Err(Error::Domain("trap length must be non-negative".into()));
        }
        Ok(self.radius()? + self.r_min + 0.5 * l + self.delta_r)
    }

    /// Instantaneous center-to-center distance.
    pub fn distance_at(&self, r0: f64, t: f64) -> f64 {
        r0 + self.delta_r * (self.omega * t + self.phase).sin()
    }
}

/// Static field coefficients at the trap center: potential, acceleration,
/// and gradient of the acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoefficients {
    /// Potential at the trap center. m^2/s^2
    pub phi0: f64,
    /// Gravitational acceleration toward the sphere. m/s^2
    pub a: f64,
    /// Gravity gradient. 1/s^2
    pub grad: f64,
}

/// First-order (in stroke) oscillation amplitudes of the field
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAmplitudes {
    /// Oscillating part of the central potential. m^2/s^2
    pub phi0_osc: f64,
    /// Oscillating acceleration amplitude. m/s^2
    pub a_osc: f64,
    /// Oscillating gravity-gradient amplitude. 1/s^2
    pub grad_osc: f64,
}

/// Radius of a homogeneous sphere of the given mass and density.
pub fn sphere_radius(mass: f64, density: f64) -> Result<f64> {
    if mass <= 0.0 || density <= 0.0 {
        return Err(Error::Domain(
            "sphere mass and density must be positive".into(),
        ));
    }
    Ok((3.0 * mass / (4.0 * std::f64::consts::PI * density)).powf(1.0 / 3.0))
}

/// Static coefficients of the sphere's field at distance `r` from its
/// center.
pub fn static_coefficients(mass: f64, r: f64) -> Result<FieldCoefficients> {
    if mass <= 0.0 {
        return Err(Error::Domain("mass must be positive".into()));
    }
    if r <= 0.0 {
        return Err(Error::Domain("distance must be positive".into()));
    }
    let mg = mass * G;
    Ok(FieldCoefficients {
        phi0: -mg / r,
        a: mg / (r * r),
        grad: 2.0 * mg / (r * r * r),
    })
}

/// First-order oscillation amplitudes for a sphere moving sinusoidally
/// about the equilibrium distance `r0`.
pub fn oscillation_amplitudes(sphere: &SourceSphere, r0: f64) -> Result<FieldAmplitudes> {
    sphere.validate()?;
    if r0 <= 0.0 {
        return Err(Error::Domain("equilibrium distance must be positive".into()));
    }
    let mg = sphere.mass * G;
    let d = sphere.delta_r;
    Ok(FieldAmplitudes {
        phi0_osc: mg * d / (r0 * r0),
        a_osc: 2.0 * mg * d / (r0 * r0 * r0),
        grad_osc: 6.0 * mg * d / (r0 * r0 * r0 * r0),
    })
}

/// Ratio `delta_r / r0`; the field expansion is linear in this quantity.
pub fn stroke_ratio(sphere: &SourceSphere, r0: f64) -> f64 {
    sphere.delta_r / r0
}

/// Warning message when the stroke ratio strains the linear expansion.
pub fn stroke_warning(sphere: &SourceSphere, r0: f64) -> Option<String> {
    let ratio = stroke_ratio(sphere, r0);
    (ratio > STROKE_RATIO_WARN).then(|| {
        format!(
            "stroke ratio delta_r/R0 = {ratio:.3} exceeds {STROKE_RATIO_WARN}; \
             linear-in-stroke field amplitudes are strained"
        )
    })
}

/// Exact axial potential `-MG/(R(t) - x)` at position `x` in the trap
/// (positive `x` toward the sphere) and time `t`.
pub fn exact_axial_potential(x: f64, t: f64, sphere: &SourceSphere, r0: f64) -> Result<f64> {
    sphere.validate()?;
    let r_t = sphere.distance_at(r0, t);
    let radius = sphere.radius()?;
    if x >= r_t - radius {
        return Err(Error::Domain(format!(
            "field point x = {x:.3e} m lies inside the sphere (surface at {:.3e} m)",
            r_t - radius
        )));
    }
    Ok(-sphere.mass * G / (r_t - x))
}

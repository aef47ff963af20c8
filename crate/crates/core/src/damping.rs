//! Phonon damping rates: Landau damping (general finite-temperature
//! integral plus its low- and high-temperature closed forms), Beliaev
//! decay, and a constant technical loss rate.

use crate::condensate::{CondensateParams, CondensateSpec};
use crate::constants::{HBAR, K_B};
use crate::quad;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Default technical (one-body) loss rate. 1/s
pub const DEFAULT_LOSS_RATE: f64 = 1e-2;

/// Upper cutoff of the Landau integration variable; the thermal factor
/// `(e^x - e^-x)^-2` is below 3e-17 beyond this point.
const LANDAU_CUTOFF: f64 = 19.0;

/// Boundaries of the temperature-regime tag in units of `k_B T / mu`.
pub const LOW_T_RATIO: f64 = 0.2;
pub const HIGH_T_RATIO: f64 = 5.0;

/// Temperature regime of the Landau damping evaluation, tagged by
/// `k_B T / mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LowTemperature,
    General,
    HighTemperature,
}

impl Regime {
    pub fn classify(t_ratio: f64) -> Regime {
        if t_ratio < LOW_T_RATIO {
            Regime::LowTemperature
        } else if t_ratio > HIGH_T_RATIO {
            Regime::HighTemperature
        } else {
            Regime::General
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::LowTemperature => "low-temperature",
            Regime::General => "general",
            Regime::HighTemperature => "high-temperature",
        }
    }
}

/// Landau damping rate of a mode at frequency `omega_n` from the full
/// finite-temperature integral.
pub fn landau_rate(
    spec: &CondensateSpec,
    params: &CondensateParams,
    omega_n: f64,
) -> Result<f64> {
    if omega_n < 0.0 {
        return Err(Error::Domain("mode frequency must be non-negative".into()));
    }
    if spec.temperature == 0.0 || omega_n == 0.0 {
        return Ok(0.0);
    }
    let t_ratio = K_B * spec.temperature / params.mu;
    let integrand = move |x: f64| {
        if x <= 0.0 {
            // The integrand vanishes as x^2 for small x.
            return 0.0;
        }
        let u = (1.0 + 4.0 * t_ratio * t_ratio * x * x).sqrt();
        let thermal = x.exp() - (-x).exp();
        let kernel = 1.0 - 0.5 / u - 0.5 / (u * u);
        kernel * kernel / (thermal * thermal)
    };
    let integral = quad::integrate(integrand, 0.0, LANDAU_CUTOFF, quad::DEFAULT_REL_TOL)?;
    Ok(spec.species.mass * params.c0 * spec.species.lambda * omega_n / (2.0 * PI * HBAR)
        * integral)
}

/// Low-temperature (`k_B T << mu`) closed form of the Landau rate.
pub fn landau_low_t(spec: &CondensateSpec, params: &CondensateParams, omega_n: f64) -> f64 {
    3.0 * PI.powi(3) / 40.0 * (K_B * spec.temperature).powi(4) * omega_n
        / (spec.species.mass * spec.density * HBAR.powi(3) * params.c0.powi(5))
}

/// High-temperature (`k_B T >> mu`) closed form of the Landau rate.
pub fn landau_high_t(spec: &CondensateSpec, params: &CondensateParams, omega_n: f64) -> f64 {
    3.0 / 64.0 * spec.species.lambda * K_B * spec.temperature * omega_n / (HBAR * params.c0)
}

/// Beliaev decay rate of a mode with wavenumber `k_n`, including the
/// thermal enhancement of the decay products.
pub fn beliaev_rate(
    spec: &CondensateSpec,
    params: &CondensateParams,
    k_n: f64,
) -> Result<f64> {
    if k_n < 0.0 {
        return Err(Error::Domain("wavenumber must be non-negative".into()));
    }
    let base = 3.0 / (640.0 * PI) * HBAR * k_n.powi(5) / (spec.species.mass * spec.density);
    if spec.temperature == 0.0 || k_n == 0.0 {
        return Ok(base);
    }
    let beta_e = params.c0 * HBAR * k_n / (K_B * spec.temperature);
    let integrand = move |x: f64| {
        // x^2/(e^{beta x} - 1) -> 0 as x -> 0; evaluating it directly
        // at the endpoint would give 0/0.
        if x <= 0.0 {
            return 0.0;
        }
        let arg = x * beta_e;
        x * x * (x - 1.0) * (x - 1.0) / arg.exp_m1()
    };
    let integral = quad::integrate(integrand, 0.0, 1.0, quad::DEFAULT_REL_TOL)?;
    Ok(base * (1.0 + 60.0 * integral))
}

/// Breakdown of the total damping rate of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingBreakdown {
    /// Landau rate from the general integral. 1/s
    pub gamma_landau: f64,
    /// Beliaev decay rate. 1/s
    pub gamma_beliaev: f64,
    /// Technical loss rate. 1/s
    pub gamma_loss: f64,
    /// Sum of the three contributions. 1/s
    pub gamma_total: f64,
    /// Temperature regime tag for reporting.
    pub regime: Regime,
}

/// Total damping rate of the mode at `omega_n`, `k_n`. The Landau part
/// always uses the general integral; the regime tag only reports where
/// the temperature sits.
pub fn total_rate(
    spec: &CondensateSpec,
    params: &CondensateParams,
    omega_n: f64,
    k_n: f64,
    gamma_loss: f64,
) -> Result<DampingBreakdown> {
    if gamma_loss < 0.0 {
        return Err(Error::Domain("loss rate must be non-negative".into()));
    }
    let gamma_landau = landau_rate(spec, params, omega_n)?;
    let gamma_beliaev = beliaev_rate(spec, params, k_n)?;
    Ok(DampingBreakdown {
        gamma_landau,
        gamma_beliaev,
        gamma_loss,
        gamma_total: gamma_landau + gamma_beliaev + gamma_loss,
        regime: Regime::classify(K_B * spec.temperature / params.mu),
    })
}

//! Atom-species database and the derived condensate background: healing
//! length, speed of sound, chemical potential, mode spectrum, thermal
//! occupation, geometry, and validity diagnostics for the phonon regime.

use crate::constants::{HBAR, K_B};
use crate::{Error, Result};

/// Validity thresholds operationalizing "much smaller than": ratios below
/// [`RATIO_PASS`] pass, below [`RATIO_FAIL`] warn, above fail.
pub const RATIO_PASS: f64 = 0.1;
pub const RATIO_FAIL: f64 = 0.5;

/// An atomic species with its contact-interaction parameter
/// `lambda = 8 pi a_scatt`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    /// Atomic mass. kg
    pub mass: f64,
    /// Interaction parameter. m
    pub lambda: f64,
}

impl AtomSpecies {
    pub fn new(name: impl Into<String>, mass: f64, lambda: f64) -> Result<Self> {
        if mass <= 0.0 || lambda <= 0.0 {
            return Err(Error::Domain(
                "species mass and interaction must be positive".into(),
            ));
        }
        Ok(Self { name: name.into(), mass, lambda })
    }

    pub fn rubidium_87() -> Self {
        Self { name: "Rb-87".into(), mass: 1.44e-25, lambda: 1.3e-7 }
    }

    pub fn ytterbium_168() -> Self {
        Self { name: "Yb-168".into(), mass: 2.79e-25, lambda: 3.35e-7 }
    }

    /// Looks a species up by name (case-insensitive, `-` and `_` equal).
    pub fn by_name(name: &str) -> Option<Self> {
        let norm = name.to_ascii_lowercase().replace('_', "-");
        match norm.as_str() {
            "rb-87" | "rb87" | "rubidium-87" => Some(Self::rubidium_87()),
            "yb-168" | "yb168" | "ytterbium-168" => Some(Self::ytterbium_168()),
            _ => None,
        }
    }
}

/// A box-trapped condensate: species, trap length, background density,
/// temperature, and (optionally) atom number or cross-section area.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensateSpec {
    pub species: AtomSpecies,
    /// Box length along the drive axis. m
    pub length: f64,
    /// Background number density. 1/m^3
    pub density: f64,
    /// Temperature. K
    pub temperature: f64,
    /// Total atom number (derivable from `cross_section`).
    pub atom_number: Option<f64>,
    /// Transverse cross-section area (derivable from `atom_number`). m^2
    pub cross_section: Option<f64>,
}

impl CondensateSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length <= 0.0 {
            return Err(Error::Domain("trap length must be positive".into()));
        }
        if self.density <= 0.0 {
            return Err(Error::Domain("condensate density must be positive".into()));
        }
        if self.temperature < 0.0 {
            return Err(Error::Domain("temperature must be non-negative".into()));
        }
        if let (Some(n), Some(a)) = (self.atom_number, self.cross_section) {
            let implied = a * self.length * self.density;
            if ((implied - n) / n).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "atom number {n:.6e} inconsistent with cross-section (implies {implied:.6e})"
                )));
            }
        }
        Ok(())
    }

    /// Spec with the atom number fixed and the cross-section left implied.
    pub fn with_atom_number(mut self, n: f64) -> Self {
        self.atom_number = Some(n);
        self.cross_section = None;
        self
    }
}

/// Derived background parameters of the condensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateParams {
    /// Healing length. m
    pub zeta: f64,
    /// Speed of sound. m/s
    pub c0: f64,
    /// Chemical potential. J
    pub mu: f64,
    /// Magnitude of the relative thermal depletion of the condensate.
    pub depletion_fraction: f64,
}

/// Healing length, sound speed, chemical potential, and thermal depletion
/// for a condensate spec.
pub fn derive_params(spec: &CondensateSpec) -> Result<CondensateParams> {
    spec.validate()?;
    let m = spec.species.mass;
    let zeta = 1.0 / (spec.species.lambda * spec.density).sqrt();
    let c0 = HBAR / (std::f64::consts::SQRT_2 * m * zeta);
    let mu = m * c0 * c0;
    let kt = K_B * spec.temperature;
    let depletion_fraction = m * kt * kt / (12.0 * spec.density * c0 * HBAR.powi(3));
    Ok(CondensateParams { zeta, c0, mu, depletion_fraction })
}

/// Wavenumber of mode `n`: `k_n = n pi / L`.
pub fn wavenumber(length: f64, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("mode index must be at least 1".into()));
    }
    Ok(n as f64 * std::f64::consts::PI / length)
}

/// Angular frequency of mode `n`: `omega_n = c0 n pi / L`.
pub fn mode_frequency(params: &CondensateParams, length: f64, n: u32) -> Result<f64> {
    Ok(params.c0 * wavenumber(length, n)?)
}

/// Box length that places the fundamental mode at `omega1`.
pub fn length_for_frequency(species: &AtomSpecies, density: f64, omega1: f64) -> Result<f64> {
    if omega1 <= 0.0 {
        return Err(Error::Domain("target frequency must be positive".into()));
    }
    let lam_rho = species.lambda * density;
    Ok(std::f64::consts::PI / omega1 * HBAR / species.mass * (lam_rho / 2.0).sqrt())
}

/// Mean thermal phonon occupation `k_B T / (hbar omega_n)` in the
/// Rayleigh-Jeans regime.
pub fn thermal_occupation(omega_n: f64, temperature: f64) -> Result<f64> {
    if omega_n <= 0.0 {
        return Err(Error::Domain("mode frequency must be positive".into()));
    }
    Ok(K_B * temperature / (HBAR * omega_n))
}

/// Resolved geometry: atom number, cross-section, and transverse aspect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub atom_number: f64,
    /// Cross-section area. m^2
    pub cross_section: f64,
    /// Transverse diameter over trap length, for a circular cross-section.
    pub d_over_l: f64,
}

/// Resolves atom number / cross-section / aspect ratio from whichever of
/// the two was specified.
pub fn geometry(spec: &CondensateSpec) -> Result<Geometry> {
    spec.validate()?;
    let (atom_number, cross_section) = match (spec.atom_number, spec.cross_section) {
        (Some(n), _) => (n, n / (spec.density * spec.length)),
        (None, Some(a)) => (a * spec.length * spec.density, a),
        (None, None) => {
            return Err(Error::Config(
                "either atom_number or cross_section must be given".into(),
            ))
        }
    };
    let d_over_l =
        2.0 * (atom_number / (std::f64::consts::PI * spec.density * spec.length.powi(3))).sqrt();
    Ok(Geometry { atom_number, cross_section, d_over_l })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// One validity criterion with its dimensionless ratio.
#[derive(Debug, Clone)]
pub struct ValidityCheck {
    pub name: String,
    pub ratio: f64,
    pub status: CheckStatus,
}

fn classify(ratio: f64) -> CheckStatus {
    if ratio < RATIO_PASS {
        CheckStatus::Pass
    } else if ratio <= RATIO_FAIL {
        CheckStatus::Warn
    } else {
        CheckStatus::Fail
    }
}

/// Diagnostics for the phonon-regime assumptions: `k_n zeta`, `k_B T / mu`,
/// and `zeta / L` must all be small. Diagnostics never abort.
pub fn validity_report(
    spec: &CondensateSpec,
    params: &CondensateParams,
    modes: &[u32],
) -> Result<Vec<ValidityCheck>> {
    let mut checks = Vec::new();
    for &n in modes {
        let ratio = wavenumber(spec.length, n)? * params.zeta;
        checks.push(ValidityCheck {
            name: format!("k_{n} zeta << 1"),
            ratio,
            status: classify(ratio),
        });
    }
    let t_ratio = K_B * spec.temperature / params.mu;
    checks.push(ValidityCheck {
        name: "k_B T / mu << 1".into(),
        ratio: t_ratio,
        status: classify(t_ratio),
    });
    let l_ratio = params.zeta / spec.length;
    checks.push(ValidityCheck {
        name: "zeta / L << 1".into(),
        ratio: l_ratio,
        status: classify(l_ratio),
    });
    Ok(checks)
}

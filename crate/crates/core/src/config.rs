//! Strict configuration-file parsing: `[section]` headers with
//! `key = value unit` lines. Unit suffixes are mandatory for dimensional
//! quantities and every unknown section, key, or unit is an error, so
//! silent unit mistakes cannot propagate into a plan.

use crate::{Error, Result};

use std::collections::HashSet;

/// Parsed raw entry before unit resolution.
#[derive(Debug, Clone, PartialEq)]
#[allow(dead_code)]
struct RawEntry {
    section: String,
    key: String,
    value: String,
    unit: Option<String>,
    line: usize,
}

/// Dimension of a config key, defining which unit suffixes are accepted
/// and their scale to SI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Mass,
    Length,
    Area,
    MassDensity,
    NumberDensity,
    Temperature,
    Time,
    Rate,
    Frequency,
    Angle,
    NoiseAmplitude,
    Dimensionless,
    Keyword,
}

fn unit_scale(dim: Dimension, unit: &str) -> Option<f64> {
    let table: &[(&str, f64)] = match dim {
        Dimension::Mass => &[("kg", 1.0), ("g", 1e-3), ("mg", 1e-6)],
        Dimension::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
        Dimension::Area => &[("m2", 1.0), ("mm2", 1e-6), ("um2", 1e-12)],
        Dimension::MassDensity => &[("kg/m3", 1.0), ("g/cm3", 1e3)],
        Dimension::NumberDensity => &[("1/m3", 1.0), ("1/cm3", 1e6)],
        Dimension::Temperature => &[("K", 1.0), ("mK", 1e-3), ("uK", 1e-6), ("nK", 1e-9)],
        Dimension::Time => &[("s", 1.0), ("ms", 1e-3)],
        Dimension::Rate => &[("1/s", 1.0)],
        // Plain hertz are converted to angular frequency.
        Dimension::Frequency => &[("Hz", 2.0 * std::f64::consts::PI), ("rad/s", 1.0)],
        Dimension::Angle => &[("rad", 1.0)],
        Dimension::NoiseAmplitude => &[("m/sqrtHz", 1.0)],
        Dimension::Dimensionless | Dimension::Keyword => &[],
    };
    table.iter().find(|(u, _)| *u == unit).map(|(_, s)| *s)
}

fn key_dimension(section: &str, key: &str) -> Option<Dimension> {
    use Dimension::*;
    let keys: &[(&str, Dimension)] = match section {
        "source" => &[
            ("mass", Mass),
            ("density", MassDensity),
            ("r_min", Length),
            ("delta_r", Length),
            ("phase", Angle),
        ],
        "condensate" => &[
            ("species", Keyword),
            ("species_mass", Mass),
            ("species_lambda", Length),
            ("length", Length),
            ("density", NumberDensity),
            ("temperature", Temperature),
            ("atom_number", Dimensionless),
            ("cross_section", Area),
        ],
        "noise" => &[
            ("delta_n_det", Dimensionless),
            ("atom_rel_fluct", Dimensionless),
            ("init_coherent_rel_fluct", Dimensionless),
        ],
        "run" => &[
            ("scheme", Keyword),
            ("target", Keyword),
            ("t_exp", Time),
            ("reps", Dimensionless),
            ("snr_target", Dimensionless),
            ("omega_min", Frequency),
            ("gamma_loss", Rate),
            ("max_d_over_l", Dimensionless),
            ("mode_n", Dimensionless),
            ("mode_l", Dimensionless),
            ("drive_frequency", Frequency),
            ("drive_phase", Angle),
            ("t_span", Time),
            ("step", Time),
            ("seismic_noise", NoiseAmplitude),
        ],
        "sweep" => &[
            ("parameter", Keyword),
            ("from", Dimensionless),
            ("to", Dimensionless),
            ("points", Dimensionless),
            ("scale", Keyword),
            ("unit", Keyword),
        ],
        _ => return None,
    };
    keys.iter().find(|(k, _)| *k == key).map(|(_, d)| *d)
}

/// One resolved configuration value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Numeric value converted to SI (angular frequency for `Hz`).
    Number(f64),
    /// Enumeration keyword (`species`, `scheme`, ...).
    Keyword(String),
}

/// Parsed configuration: `(section, key) -> Value`.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: Vec<(String, String, Value)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut section = String::new();
        let mut seen: HashSet<(String, String)> = HashSet::new();
        let mut entries = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                if !["source", "condensate", "noise", "run", "sweep"].contains(&name) {
                    return Err(Error::Config(format!("line {line}: unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "line {line}: entry before any [section] header"
                )));
            }
            let (key, rest) = trimmed.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {line}: expected `key = value unit`"))
            })?;
            let key = key.trim().to_string();
            let dim = key_dimension(&section, &key).ok_or_else(|| {
                Error::Config(format!("line {line}: unknown key `{key}` in section [{section}]"))
            })?;
            if !seen.insert((section.clone(), key.clone())) {
                return Err(Error::Config(format!(
                    "line {line}: duplicate key `{key}` in section [{section}]"
                )));
            }
            let mut parts = rest.trim().split_whitespace();
            let value_str = parts
                .next()
                .ok_or_else(|| Error::Config(format!("line {line}: missing value for `{key}`")))?;
            let unit = parts.next();
            if let Some(extra) = parts.next() {
                return Err(Error::Config(format!(
                    "line {line}: unexpected trailing token `{extra}`"
                )));
            }
            let value = match dim {
                Dimension::Keyword => {
                    if unit.is_some() {
                        return Err(Error::Config(format!(
                            "line {line}: keyword `{key}` takes no unit"
                        )));
                    }
                    Value::Keyword(value_str.to_string())
                }
                Dimension::Dimensionless => {
                    if unit.is_some() {
                        return Err(Error::Config(format!(
                            "line {line}: `{key}` is dimensionless and takes no unit"
                        )));
                    }
                    Value::Number(parse_number(value_str, &key, line)?)
                }
                dim => {
                    let unit = unit.ok_or_else(|| {
                        Error::Config(format!(
                            "line {line}: `{key}` requires an explicit unit suffix"
                        ))
                    })?;
                    let scale = unit_scale(dim, unit).ok_or_else(|| {
                        Error::Config(format!(
                            "line {line}: unit `{unit}` is invalid for `{key}` ({dim:?})"
                        ))
                    })?;
                    Value::Number(parse_number(value_str, &key, line)? * scale)
                }
            };
            entries.push((section.clone(), key, value));
        }
        Ok(Config { entries })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.entries
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v)
    }

    pub fn number(&self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn keyword(&self, section: &str, key: &str) -> Option<&str> {
        match self.get(section, key) {
            Some(Value::Keyword(v)) => Some(v.as_str()),
            _ => None,
        }
    }

    /// Numeric value that must exist.
    pub fn require_number(&self, section: &str, key: &str) -> Result<f64> {
        self.number(section, key).ok_or_else(|| {
            Error::Config(format!("missing required key `{key}` in section [{section}]"))
        })
    }

    /// Keyword value that must exist.
    pub fn require_keyword(&self, section: &str, key: &str) -> Result<&str> {
        self.keyword(section, key).ok_or_else(|| {
            Error::Config(format!("missing required key `{key}` in section [{section}]"))
        })
    }
}

fn parse_number(s: &str, key: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("line {line}: `{s}` is not a number for `{key}`")))
}

/// Converts a raw sweep bound given in `unit` for the named axis to SI.
pub fn convert_sweep_value(parameter: &str, value: f64, unit: Option<&str>) -> Result<f64> {
    use Dimension::*;
    let dim = match parameter {
        "M" => Mass,
        "R_min" | "delta_R" | "L" => Length,
        "rho0" => NumberDensity,
        "T" => Temperature,
        "t_exp" => Time,
        "N_a" | "reps" => Dimensionless,
        other => {
            return Err(Error::Config(format!(
                "`{other}` is not a sweepable parameter; valid axes: M, R_min, delta_R, L, rho0, T, N_a, t_exp, reps"
            )))
        }
    };
    match (dim, unit) {
        (Dimensionless, None) => Ok(value),
        (Dimensionless, Some(u)) => {
            Err(Error::Config(format!("axis `{parameter}` takes no unit, got `{u}`")))
        }
        (dim, Some(u)) => unit_scale(dim, u)
            .map(|s| value * s)
            .ok_or_else(|| Error::Config(format!("unit `{u}` is invalid for axis `{parameter}`"))),
        (_, None) => Err(Error::Config(format!(
            "axis `{parameter}` requires a unit in `[sweep] unit = ...`"
        ))),
    }
}

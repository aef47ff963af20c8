//! Noise models, signal-to-noise ratios, quantum Fisher information and
//! Cramer-Rao bounds, and the seismic acceleration floor.

use crate::condensate::{self, CondensateParams, CondensateSpec};
use crate::constants::HBAR;
use crate::{Error, Result};

use std::f64::consts::{PI, SQRT_2};

/// Shot-to-shot fluctuation model entering the SNR formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Detection resolution in phonons.
    pub delta_n_det: f64,
    /// Relative atom-number fluctuation.
    pub atom_rel_fluct: f64,
    /// Relative fluctuation of the initial coherent phonon population.
    pub init_coherent_rel_fluct: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { delta_n_det: 1.0, atom_rel_fluct: 0.1, init_coherent_rel_fluct: 0.01 }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if self.delta_n_det < 0.0
            || self.atom_rel_fluct < 0.0
            || self.init_coherent_rel_fluct < 0.0
        {
            return Err(Error::Domain("noise parameters must be non-negative".into()));
        }
        Ok(())
    }
}

/// SNR with the variance breakdown behind it; the terms satisfy
/// `reps / snr^2 = sum(terms)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub snr: f64,
    /// `(label, variance term)` pairs in the inverse-square combination.
    pub terms: Vec<(&'static str, f64)>,
    pub reps: f64,
}

fn combine(terms: Vec<(&'static str, f64)>, reps: f64) -> Result<SensitivityReport> {
    if reps <= 0.0 {
        return Err(Error::Domain("repetition count must be positive".into()));
    }
    let total: f64 = terms.iter().map(|(_, v)| v).sum();
    if total <= 0.0 {
        return Err(Error::Domain("noise model is entirely zero; SNR is unbounded".into()));
    }
    Ok(SensitivityReport { snr: reps.sqrt() / total.sqrt(), terms, reps })
}

/// SNR of direct phonon creation: thermal and detection noise scaled by
/// the created population, plus the atom-number term.
pub fn snr_direct(
    n_cr: f64,
    n_th: f64,
    noise: &NoiseModel,
    reps: f64,
) -> Result<SensitivityReport> {
    noise.validate()?;
    if n_cr <= 0.0 {
        return Err(Error::Domain("created phonon number must be positive for an SNR".into()));
    }
    let terms = vec![
        ("thermal", n_th * n_th / (4.0 * n_cr * n_cr)),
        ("detection", noise.delta_n_det * noise.delta_n_det / (4.0 * n_cr * n_cr)),
        ("atom_number", noise.atom_rel_fluct * noise.atom_rel_fluct / 16.0),
    ];
    combine(terms, reps)
}

/// SNR of the pumped schemes (two-mode or single-mode squeezing of an
/// initial coherent population).
pub fn snr_parametric(
    n_cr: f64,
    n_th: f64,
    noise: &NoiseModel,
    reps: f64,
) -> Result<SensitivityReport> {
    noise.validate()?;
    if n_cr <= 0.0 {
        return Err(Error::Domain("created phonon number must be positive for an SNR".into()));
    }
    let terms = vec![
        ("thermal", n_th * n_th / (4.0 * n_cr * n_cr)),
        ("detection", noise.delta_n_det * noise.delta_n_det / (4.0 * n_cr * n_cr)),
        ("atom_number", noise.atom_rel_fluct * noise.atom_rel_fluct / 4.0),
        (
            "initial_phonons",
            noise.init_coherent_rel_fluct * noise.init_coherent_rel_fluct / 4.0,
        ),
    ];
    combine(terms, reps)
}

/// Created phonons needed for a target SNR, inverting the variance
/// combination. `amplitude_terms` are the N_cr-independent variance terms.
fn ncr_for_target(
    target_snr: f64,
    n_th: f64,
    delta_n_det: f64,
    amplitude_terms: f64,
    reps: f64,
) -> Result<f64> {
    if target_snr <= 0.0 || reps <= 0.0 {
        return Err(Error::Domain("SNR target and repetitions must be positive".into()));
    }
    let budget = reps / (target_snr * target_snr) - amplitude_terms;
    if budget <= 0.0 {
        return Err(Error::Infeasible(format!(
            "amplitude noise alone exceeds the variance budget for SNR {target_snr}"
        )));
    }
    Ok(((n_th * n_th + delta_n_det * delta_n_det) / (4.0 * budget)).sqrt())
}

/// Created phonons needed for `target_snr` under the direct-drive noise
/// combination.
pub fn ncr_for_target_direct(
    target_snr: f64,
    n_th: f64,
    noise: &NoiseModel,
    reps: f64,
) -> Result<f64> {
    noise.validate()?;
    ncr_for_target(
        target_snr,
        n_th,
        noise.delta_n_det,
        noise.atom_rel_fluct * noise.atom_rel_fluct / 16.0,
        reps,
    )
}

/// Created phonons needed for `target_snr` under the pumped-scheme noise
/// combination.
pub fn ncr_for_target_parametric(
    target_snr: f64,
    n_th: f64,
    noise: &NoiseModel,
    reps: f64,
) -> Result<f64> {
    noise.validate()?;
    ncr_for_target(
        target_snr,
        n_th,
        noise.delta_n_det,
        noise.atom_rel_fluct * noise.atom_rel_fluct / 4.0
            + noise.init_coherent_rel_fluct * noise.init_coherent_rel_fluct / 4.0,
        reps,
    )
}

/// Atom number needed to create `n_cr_target` phonons by resonant direct
/// driving of mode `n` with acceleration amplitude `a_osc` for a time `t`.
pub fn required_atoms_direct(
    n_cr_target: f64,
    n: u32,
    omega_n: f64,
    a_osc: f64,
    t: f64,
    mass: f64,
) -> Result<f64> {
    if a_osc <= 0.0 || t <= 0.0 {
        return Err(Error::Infeasible(
            "zero drive or zero interaction time requires infinitely many atoms".into(),
        ));
    }
    if n_cr_target < 0.0 || omega_n <= 0.0 {
        return Err(Error::Domain("phonon target and mode frequency must be positive".into()));
    }
    Ok((n as f64 * PI).powi(2) * HBAR * omega_n * n_cr_target / (mass * t * t * a_osc * a_osc))
}

/// Pumped scheme selector for phonon bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpScheme {
    /// Two-mode squeezing of the pair `(l, n)`.
    TwoMode,
    /// Single-mode squeezing of a seeded mode.
    SingleMode,
}

/// Initial coherent phonons needed so that the pump creates
/// `n_cr_target` phonons: `N_cr / r^2` for the two-mode channel, and
/// `N_cr / (2 r)` for the small-r single-mode channel where the created
/// population grows linearly in `r`.
pub fn required_initial_phonons(n_cr_target: f64, r: f64, scheme: PumpScheme) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Infeasible(
            "zero squeeze parameter requires infinitely many initial phonons".into(),
        ));
    }
    if n_cr_target < 0.0 {
        return Err(Error::Domain("phonon target must be non-negative".into()));
    }
    Ok(match scheme {
        PumpScheme::TwoMode => n_cr_target / (r * r),
        PumpScheme::SingleMode => n_cr_target / (2.0 * r),
    })
}

/// Minimum atom number that keeps an initial population of `n_0` phonons
/// in mode `n` within the perturbative regime.
pub fn min_atoms_for_state(
    n_0: f64,
    n: u32,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<f64> {
    if n_0 < 0.0 {
        return Err(Error::Domain("phonon number must be non-negative".into()));
    }
    let _ = condensate::wavenumber(spec.length, n)?;
    Ok(100.0 * 2.0 * SQRT_2 * spec.length * n_0 / (n as f64 * PI * params.zeta))
}

/// Estimation channel for the quantum Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationChannel {
    TwoModeSqueeze,
    ModeMix,
}

/// Quantum Fisher information for estimating the parameter `epsilon`
/// through the given channel, probing with `n_s0` initially squeezed
/// phonons. `amplitude` is `|M|` for squeezing and `|A|` for mixing.
pub fn qfi(
    channel: EstimationChannel,
    n_s0: f64,
    amplitude: f64,
    t: f64,
    epsilon: f64,
) -> Result<f64> {
    if n_s0 < 0.0 || amplitude < 0.0 || t < 0.0 {
        return Err(Error::Domain("QFI inputs must be non-negative".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain("estimated parameter must be positive".into()));
    }
    let rate = 2.0 * amplitude * t / (HBAR * epsilon);
    Ok(match channel {
        EstimationChannel::TwoModeSqueeze => {
            let d = 2.0 * (2.0 * n_s0 + 1.0) * rate;
            d * d
        }
        EstimationChannel::ModeMix => 4.0 * n_s0 * (n_s0 + 2.0) * rate * rate,
    })
}

/// Quantum Cramer-Rao bound on the estimated parameter.
pub fn qcrb(fisher_information: f64, reps: f64) -> Result<f64> {
    if reps <= 0.0 {
        return Err(Error::Domain("repetition count must be positive".into()));
    }
    if fisher_information <= 0.0 {
        return Err(Error::Infeasible(
            "zero Fisher information: the channel carries no signal".into(),
        ));
    }
    Ok(1.0 / (reps * fisher_information).sqrt())
}

/// Smallest detectable acceleration above the seismic position noise
/// `sqrt(S_x)` at drive frequency `omega`.
pub fn seismic_floor(s_x_sqrt: f64, omega: f64, t_int: f64, reps: f64) -> Result<f64> {
    if s_x_sqrt <= 0.0 || omega <= 0.0 || t_int <= 0.0 || reps <= 0.0 {
        return Err(Error::Domain("seismic floor inputs must be positive".into()));
    }
    Ok(omega * omega * s_x_sqrt / (t_int * reps).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condensate::{derive_params, AtomSpecies};
    use approx::assert_relative_eq;

    #[test]
    fn direct_snr_reference_row() {
        let r = snr_direct(0.7, 14.0, &NoiseModel::default(), 1e4).unwrap();
        assert!((r.snr - 10.0).abs() < 1.0, "snr = {}", r.snr);
        // Thermal term dominates the breakdown.
        let thermal = r.terms.iter().find(|(l, _)| *l == "thermal").unwrap().1;
        let total: f64 = r.terms.iter().map(|(_, v)| v).sum();
        assert!(thermal / total > 0.5);
        // Breakdown reconstruction.
        assert_relative_eq!(r.reps / (r.snr * r.snr), total, max_relative = 1e-12);
    }

    #[test]
    fn snr_scales_with_sqrt_reps() {
        let noise = NoiseModel::default();
        let base = snr_direct(0.7, 14.0, &noise, 1e4).unwrap().snr;
        let quad = snr_direct(0.7, 14.0, &noise, 4e4).unwrap().snr;
        assert_relative_eq!(quad, 2.0 * base, max_relative = 1e-12);
        let base_p = snr_parametric(0.5, 7.0, &noise, 1e4).unwrap().snr;
        let quad_p = snr_parametric(0.5, 7.0, &noise, 4e4).unwrap().snr;
        assert_relative_eq!(quad_p, 2.0 * base_p, max_relative = 1e-12);
    }

    #[test]
    fn parametric_reduces_to_thermal_detection_form() {
        let quiet = NoiseModel { atom_rel_fluct: 0.0, init_coherent_rel_fluct: 0.0, ..NoiseModel::default() };
        let p = snr_parametric(0.5, 7.0, &quiet, 1e4).unwrap();
        let d = snr_direct(0.5, 7.0, &quiet, 1e4).unwrap();
        assert_relative_eq!(p.snr, d.snr, max_relative = 1e-12);
    }

    #[test]
    fn extra_noise_term_only_reduces_snr() {
        let noise = NoiseModel::default();
        let with_amp = snr_parametric(0.5, 7.0, &noise, 1e4).unwrap().snr;
        let quiet = NoiseModel { init_coherent_rel_fluct: 0.0, ..noise };
        let without = snr_parametric(0.5, 7.0, &quiet, 1e4).unwrap().snr;
        assert!(with_amp <= without);
    }

    #[test]
    fn zero_ncr_is_an_error() {
        assert!(snr_direct(0.0, 14.0, &NoiseModel::default(), 1e4).is_err());
    }

    #[test]
    fn ncr_inversion_roundtrip() {
        let noise = NoiseModel::default();
        for &(n_th, target) in &[(14.0, 10.0), (7.0, 5.0), (35.0, 10.0)] {
            let n_cr = ncr_for_target_direct(target, n_th, &noise, 1e4).unwrap();
            let snr = snr_direct(n_cr, n_th, &noise, 1e4).unwrap().snr;
            assert_relative_eq!(snr, target, max_relative = 1e-10);
            let n_cr = ncr_for_target_parametric(target, n_th, &noise, 1e4).unwrap();
            let snr = snr_parametric(n_cr, n_th, &noise, 1e4).unwrap().snr;
            assert_relative_eq!(snr, target, max_relative = 1e-10);
        }
    }

    #[test]
    fn infeasible_when_amplitude_noise_saturates_budget() {
        let loud = NoiseModel { atom_rel_fluct: 0.9, ..NoiseModel::default() };
        // reps/SNR^2 = 0.1 sits below the 0.9^2/4 amplitude variance alone.
        let err = ncr_for_target_parametric(10.0, 14.0, &loud, 10.0).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn required_atoms_reference_rows() {
        let rb = AtomSpecies::rubidium_87();
        let w1 = 2.0 * PI * 1.5;
        let n_a = required_atoms_direct(0.7, 1, w1, 2e-8, 10.0, rb.mass).unwrap();
        assert!(n_a > 4.5e5 && n_a < 1.8e6, "N_a = {n_a}");
        let yb = AtomSpecies::ytterbium_168();
        let n_a = required_atoms_direct(0.4, 1, 2.0 * PI * 1.2, 2e-8, 10.0, yb.mass).unwrap();
        assert!(n_a > 2.5e5 && n_a < 1.0e6, "N_a = {n_a}");
        // Halving the drive quadruples the requirement.
        let half = required_atoms_direct(0.7, 1, w1, 1e-8, 10.0, rb.mass).unwrap();
        let full = required_atoms_direct(0.7, 1, w1, 2e-8, 10.0, rb.mass).unwrap();
        assert_relative_eq!(half, 4.0 * full, max_relative = 1e-12);
    }

    #[test]
    fn atoms_and_creation_are_inverse() {
        let spec = CondensateSpec {
            species: AtomSpecies::rubidium_87(),
            length: 200e-6,
            density: 1e19,
            temperature: 1e-9,
            atom_number: Some(9e5),
            cross_section: None,
        };
        let p = derive_params(&spec).unwrap();
        let amp = crate::grav_source::FieldAmplitudes { phi0_osc: 0.0, a_osc: 2e-8, grad_osc: 0.0 };
        let t = 10.0;
        let n_cr = crate::mode_dynamics::created_phonons_direct(&amp, &spec, &p, 1, t).unwrap();
        let w1 = condensate::mode_frequency(&p, spec.length, 1).unwrap();
        let back =
            required_atoms_direct(n_cr, 1, w1, amp.a_osc, t, spec.species.mass).unwrap();
        assert_relative_eq!(back, 9e5, max_relative = 1e-9);
    }

    #[test]
    fn initial_phonon_requirements() {
        let n0 = required_initial_phonons(0.4, 0.02, PumpScheme::TwoMode).unwrap();
        assert!(n0 > 350.0 && n0 < 1400.0, "N_0 = {n0}");
        // Linearity in the target.
        let n4 = required_initial_phonons(1.6, 0.02, PumpScheme::TwoMode).unwrap();
        assert_relative_eq!(n4, 4.0 * n0, max_relative = 1e-12);
        // Single-mode channel grows linearly in r.
        let s = required_initial_phonons(0.4, 0.02, PumpScheme::SingleMode).unwrap();
        assert_relative_eq!(s, 10.0, max_relative = 1e-12);
        assert!(required_initial_phonons(0.4, 0.0, PumpScheme::TwoMode).is_err());
    }

    #[test]
    fn min_atoms_reference_row() {
        let spec = CondensateSpec {
            species: AtomSpecies::rubidium_87(),
            length: 200e-6,
            density: 1e19,
            temperature: 1e-9,
            atom_number: None,
            cross_section: Some(1e-10),
        };
        let p = derive_params(&spec).unwrap();
        let n_a = min_atoms_for_state(700.0, 2, &spec, &p).unwrap();
        assert!(n_a > 3.0e6 && n_a < 1.4e7, "N_a_min = {n_a}");
    }

    #[test]
    fn qfi_channel_behavior() {
        // Vacuum probe: mixing carries nothing, squeezing still works.
        assert_eq!(
            qfi(EstimationChannel::ModeMix, 0.0, 1e-36, 10.0, 1e-9).unwrap(),
            0.0
        );
        assert!(qfi(EstimationChannel::TwoModeSqueeze, 0.0, 1e-36, 10.0, 1e-9).unwrap() > 0.0);
        // Monotone in probe size, time, and reps.
        let small = qfi(EstimationChannel::TwoModeSqueeze, 10.0, 1e-36, 10.0, 1e-9).unwrap();
        let large = qfi(EstimationChannel::TwoModeSqueeze, 100.0, 1e-36, 10.0, 1e-9).unwrap();
        assert!(large > small);
        let b1 = qcrb(small, 1e4).unwrap();
        let b2 = qcrb(small, 1e6).unwrap();
        assert!(b2 < b1);
        assert!(qcrb(0.0, 1e4).is_err());
    }

    #[test]
    fn qcrb_reference_magnitudes() {
        // Acceleration channel, about 1000 initial squeezed phonons.
        let spec = CondensateSpec {
            species: AtomSpecies::rubidium_87(),
            length: 200e-6,
            density: 1e19,
            temperature: 1e-9,
            atom_number: Some(9e5),
            cross_section: None,
        };
        let p = derive_params(&spec).unwrap();
        let a_osc = 2e-8;
        let amp = crate::grav_source::FieldAmplitudes { phi0_osc: 0.0, a_osc, grad_osc: 0.0 };
        let amps = crate::quantum_channels::amplitudes_closed(&spec, &p, &amp, 2, 1).unwrap();
        let i = qfi(EstimationChannel::TwoModeSqueeze, 1000.0, amps.m_ln.abs(), 10.0, a_osc)
            .unwrap();
        let bound = qcrb(i, 1e4).unwrap();
        assert!(bound > 2e-14 && bound < 2e-12, "bound = {bound:.3e}");
        // Gradient channel at L = 500 um.
        let mut wide = spec.clone();
        wide.length = 500e-6;
        let p = derive_params(&wide).unwrap();
        let g_osc = 2e-6;
        let amp = crate::grav_source::FieldAmplitudes { phi0_osc: 0.0, a_osc: 0.0, grad_osc: g_osc };
        let amps = crate::quantum_channels::amplitudes_closed(&wide, &p, &amp, 3, 1).unwrap();
        let i = qfi(EstimationChannel::TwoModeSqueeze, 1000.0, amps.m_ln.abs(), 10.0, g_osc)
            .unwrap();
        let bound = qcrb(i, 1e4).unwrap();
        assert!(bound > 5e-11 && bound < 5e-9, "bound = {bound:.3e}");
    }

    #[test]
    fn seismic_floor_scalings() {
        let base = seismic_floor(1e-7, 2.0 * PI, 10.0, 1e4).unwrap();
        assert!(base > 3e-9 && base < 3e-8, "floor = {base:.3e}");
        assert_relative_eq!(base, 1.248e-8, max_relative = 0.01);
        let double = seismic_floor(1e-7, 4.0 * PI, 10.0, 1e4).unwrap();
        assert_relative_eq!(double, 4.0 * base, max_relative = 1e-12);
        let more = seismic_floor(1e-7, 2.0 * PI, 10.0, 1e6).unwrap();
        assert_relative_eq!(more, base / 10.0, max_relative = 1e-12);
    }
}

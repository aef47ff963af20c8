//! Classical (mean-field) phonon-mode dynamics: driving moments, analytic
//! resonant solutions, inter-mode coupling, parametric growth, the map
//! between mode amplitude and phonon number, the stationary perturbation
//! of the background, and a fixed-step RK4 integrator of the coupled mode
//! equations used as a numeric oracle.
//!
//! Mode `n` obeys
//! `g''_n + gamma_n g'_n + omega_n^2 (1 + S_n(t)) g_n = D_n(t) + sum_l T_nl(t) g_l`
//! with `D_n(t) = F_n cos(Omega t + phase)` and the parametric/coupling
//! terms oscillating as `sin(Omega t + phase)`.

use crate::condensate::{wavenumber, CondensateParams, CondensateSpec};
use crate::constants::HBAR;
use crate::grav_source::{FieldAmplitudes, FieldCoefficients};
use crate::{condensate, Error, Result};

use std::f64::consts::PI;

/// Amplitude above which the linear mode expansion is no longer trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// Per-mode drive amplitudes extracted from the oscillating field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivingMoments {
    /// Direct-drive amplitude of mode `n`. 1/s^2
    pub f_n: f64,
    /// Parametric (frequency-modulation) amplitude of mode `n`.
    pub sbar_n: f64,
    /// Coupling amplitude between modes `n` and `l`. 1/s^2
    pub tbar_nl: f64,
    /// Coupling drive on mode `n` given excitation `gbar_l` of mode `l`. 1/s^2
    pub g_ln: f64,
}

fn parity_bracket(amp: &FieldAmplitudes, length: f64, parity_index: u32) -> f64 {
    let sign = if parity_index % 2 == 0 { 1.0 } else { -1.0 };
    (1.0 - sign) * amp.a_osc / length - (1.0 + sign) * amp.grad_osc / 2.0
}

/// Direct, parametric, and coupling drive amplitudes for modes `n` and `l`.
///
/// `omega_drive` is the source oscillation frequency entering the direct
/// term; `gbar_l` scales the effective coupling drive.
pub fn driving_moments(
    amp: &FieldAmplitudes,
    spec: &CondensateSpec,
    params: &CondensateParams,
    omega_drive: f64,
    n: u32,
    l: u32,
    gbar_l: f64,
) -> Result<DrivingMoments> {
    if n < 1 || l < 1 {
        return Err(Error::Domain("mode indices must be at least 1".into()));
    }
    if l == n {
        return Err(Error::Domain(
            "coupling moments require l != n; the degenerate case is the parametric term".into(),
        ));
    }
    let m = spec.species.mass;
    let length = spec.length;
    let (nf, lf) = (n as f64, l as f64);
    let f_n = parity_bracket(amp, length, n)
        * 2.0 * length * length * m * omega_drive
        / (nf * nf * PI * PI * HBAR);
    let sbar_n =
        amp.grad_osc * m * m * length.powi(4) / (2.0 * nf.powi(4) * PI.powi(4) * HBAR * HBAR);
    let tbar_nl = parity_bracket(amp, length, n + l)
        * 2.0 * length * length * (lf * lf + nf * nf)
        / (params.zeta * params.zeta * (lf * lf - nf * nf).powi(2) * PI * PI);
    Ok(DrivingMoments { f_n, sbar_n, tbar_nl, g_ln: 0.5 * gbar_l * tbar_nl })
}

/// Steady-state amplitude and drive-response phase shift of a resonantly
/// driven, damped mode.
pub fn steady_state_response(f_n: f64, gamma_n: f64, omega_n: f64) -> Result<(f64, f64)> {
    if gamma_n <= 0.0 {
        return Err(Error::Domain(
            "steady state needs gamma > 0; use transient_response for the undamped case".into(),
        ));
    }
    Ok((f_n / (gamma_n * omega_n), PI / 2.0))
}

/// Undamped response of mode `omega_n` to a sinusoidal drive switched on
/// at `t = 0` from rest. The resonant branch grows linearly with envelope
/// `f_n t / (2 omega_n)`.
pub fn transient_response(f_n: f64, omega_n: f64, omega_drive: f64, phase: f64, t: f64) -> f64 {
    let ph = phase + PI / 2.0;
    if (omega_drive - omega_n).abs() < 1e-9 * omega_n {
        -f_n / (2.0 * omega_n * omega_n)
            * (omega_n * t * (omega_n * t + ph).cos() - (omega_n * t).sin() * ph.cos())
    } else {
        f_n / (omega_n * omega_n - omega_drive * omega_drive)
            * ((omega_drive * t + ph).sin()
                - ph.sin() * (omega_n * t).cos()
                - omega_drive / omega_n * ph.cos() * (omega_n * t).sin())
    }
}

/// Mean phonon number of the coherent state carried by mode amplitude
/// `gbar_n`. The boolean flags a breach of the perturbative limit.
pub fn phonons_from_amplitude(
    gbar_n: f64,
    n: u32,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<(f64, bool)> {
    if gbar_n < 0.0 {
        return Err(Error::Domain("amplitude must be non-negative".into()));
    }
    let n_a = condensate::geometry(spec)?.atom_number;
    let number = n as f64 * PI * params.zeta * n_a * gbar_n * gbar_n
        / (2.0 * std::f64::consts::SQRT_2 * spec.length);
    Ok((number, gbar_n > PERTURBATIVE_LIMIT))
}

/// Inverse of [`phonons_from_amplitude`].
pub fn amplitude_from_phonons(
    number: f64,
    n: u32,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<f64> {
    if number < 0.0 {
        return Err(Error::Domain("phonon number must be non-negative".into()));
    }
    let n_a = condensate::geometry(spec)?.atom_number;
    Ok((2.0 * std::f64::consts::SQRT_2 * spec.length * number
        / (n as f64 * PI * params.zeta * n_a))
        .sqrt())
}

/// Mode amplitude corresponding to a single phonon.
pub fn single_phonon_amplitude(
    n: u32,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<f64> {
    let n_a = condensate::geometry(spec)?.atom_number;
    let k_n = wavenumber(spec.length, n)?;
    Ok((2.0 * std::f64::consts::SQRT_2 / (k_n * params.zeta * n_a)).sqrt())
}

/// Closed form for the mean number of phonons created in mode `n` after
/// resonant direct driving for a time `t`.
pub fn created_phonons_direct(
    amp: &FieldAmplitudes,
    spec: &CondensateSpec,
    params: &CondensateParams,
    n: u32,
    t: f64,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("mode index must be at least 1".into()));
    }
    let n_a = condensate::geometry(spec)?.atom_number;
    let m = spec.species.mass;
    let length = spec.length;
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let drive = (1.0 - sign) / 2.0 * (amp.a_osc / length).powi(2)
        + (1.0 + sign) / 2.0 * (amp.grad_osc / 2.0).powi(2);
    Ok(m * m * std::f64::consts::SQRT_2 * params.zeta * n_a * length.powi(3) * t * t
        / (HBAR * HBAR * (nf * PI).powi(3))
        * drive)
}

/// Excitation threshold of mode `l` above which its coupling into mode
/// `n` competes with direct driving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingThreshold {
    pub gbar_lim: f64,
    pub n_lim: f64,
}

pub fn coupling_threshold(
    n: u32,
    l: u32,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<CouplingThreshold> {
    if n < 1 || l < 1 || l == n {
        return Err(Error::Domain("coupling threshold requires distinct modes >= 1".into()));
    }
    let n_a = condensate::geometry(spec)?.atom_number;
    let (nf, lf) = (n as f64, l as f64);
    let base = PI * params.zeta / (std::f64::consts::SQRT_2 * spec.length);
    let gbar_lim = base * (lf * lf - nf * nf).powi(2) / (nf * (lf * lf + nf * nf));
    let n_lim = n_a * base.powi(3) * (lf * lf - nf * nf).powi(4)
        / (2.0 * nf * (lf * lf + nf * nf).powi(2));
    Ok(CouplingThreshold { gbar_lim, n_lim })
}

/// Resonance condition of the two-mode coupling drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingResonance {
    /// `Omega = omega_n + omega_l`: pair creation in both modes.
    Sum,
    /// `Omega = omega_n - omega_l`: transfer upward into mode `n`.
    DiffUp,
    /// `Omega = omega_l - omega_n`: transfer downward into mode `n`.
    DiffDown,
}

/// Phase of the effective coupling drive for the given resonance, drive
/// phase `phase`, and phase `phase_l` of the excited mode.
pub fn coupling_drive_phase(res: CouplingResonance, phase: f64, phase_l: f64) -> f64 {
    match res {
        CouplingResonance::Sum => phase - phase_l + PI / 2.0,
        CouplingResonance::DiffUp => phase + phase_l - PI / 2.0,
        CouplingResonance::DiffDown => -phase + phase_l + PI / 2.0,
    }
}

/// Classifies the drive frequency against the three coupling resonances.
pub fn classify_coupling_resonance(
    omega_drive: f64,
    omega_n: f64,
    omega_l: f64,
) -> Result<CouplingResonance> {
    let tol = 1e-6 * omega_n.max(omega_l);
    if (omega_drive - (omega_n + omega_l)).abs() < tol {
        Ok(CouplingResonance::Sum)
    } else if (omega_drive - (omega_n - omega_l)).abs() < tol {
        Ok(CouplingResonance::DiffUp)
    } else if (omega_drive - (omega_l - omega_n)).abs() < tol {
        Ok(CouplingResonance::DiffDown)
    } else {
        Err(Error::Resonance(format!(
            "drive at {omega_drive:.6e} rad/s matches neither Omega = omega_n + omega_l = {:.6e} \
             nor Omega = |omega_n - omega_l| = {:.6e}",
            omega_n + omega_l,
            (omega_n - omega_l).abs()
        )))
    }
}

/// Resonant response of mode `n` to the coupling drive `g_ln`, on top of a
/// free oscillation with amplitude `g_n0` and phase `phase_0`.
pub fn coupling_response(
    g_ln: f64,
    omega_n: f64,
    t: f64,
    drive_phase: f64,
    g_n0: f64,
    phase_0: f64,
) -> f64 {
    g_n0 * (omega_n * t + phase_0).sin()
        - g_ln / (2.0 * omega_n * omega_n)
            * (omega_n * t * (omega_n * t + drive_phase).cos()
                - (omega_n * t).sin() * drive_phase.cos())
}

/// Mean-field phonons created in mode `n` by resonant coupling to mode `l`
/// carrying `n_lc0` coherent phonons.
pub fn created_phonons_coupling(
    amp: &FieldAmplitudes,
    spec: &CondensateSpec,
    params: &CondensateParams,
    n: u32,
    l: u32,
    n_lc0: f64,
    t: f64,
) -> Result<f64> {
    if n < 1 || l < 1 || l == n {
        return Err(Error::Domain("coupling requires distinct modes >= 1".into()));
    }
    if n_lc0 < 0.0 {
        return Err(Error::Domain("initial phonon number must be non-negative".into()));
    }
    let m = spec.species.mass;
    let length = spec.length;
    let (nf, lf) = (n as f64, l as f64);
    let sign = if (n + l) % 2 == 0 { 1.0 } else { -1.0 };
    let drive = (1.0 - sign) / 2.0 * (amp.a_osc / length).powi(2)
        + (1.0 + sign) / 2.0 * (amp.grad_osc / 2.0).powi(2);
    let envelope = std::f64::consts::SQRT_2 * m * t * length.powi(3) * (lf * lf + nf * nf)
        / (HBAR * params.zeta * (nf * lf).sqrt() * (lf * lf - nf * nf).powi(2) * PI.powi(3));
    Ok(n_lc0 * envelope * envelope * drive)
}

/// Parametric amplitude growth at `Omega = 2 omega_n`.
pub fn parametric_growth(gbar_0: f64, sbar_n: f64, omega_n: f64, t: f64) -> f64 {
    gbar_0 * (sbar_n * omega_n * t / 4.0).exp()
}

/// Mean number of phonons added by parametric driving to an initial
/// coherent population `n_0`.
pub fn delta_n_parametric(n_0: f64, sbar_n: f64, omega_n: f64, t: f64) -> f64 {
    n_0 * ((sbar_n * omega_n * t / 2.0).exp() - 1.0)
}

/// Stationary fractional density perturbation and chemical-potential shift
/// caused by static field coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPerturbation {
    /// Sample positions across the box. m
    pub x: Vec<f64>,
    /// Fractional density perturbation at each position.
    pub alpha: Vec<f64>,
    /// Chemical-potential shift. J
    pub delta_mu: f64,
}

/// Number of grid points for the stationary-perturbation profile.
pub const STATIONARY_GRID: usize = 1024;

pub fn stationary_perturbation(
    coeffs: &FieldCoefficients,
    spec: &CondensateSpec,
    params: &CondensateParams,
) -> Result<StationaryPerturbation> {
    spec.validate()?;
    let l = spec.length;
    let c2 = params.c0 * params.c0;
    let mut x = Vec::with_capacity(STATIONARY_GRID);
    let mut alpha = Vec::with_capacity(STATIONARY_GRID);
    for i in 0..STATIONARY_GRID {
        let xi = -l / 2.0 + l * i as f64 / (STATIONARY_GRID - 1) as f64;
        x.push(xi);
        alpha.push((-coeffs.a * xi + coeffs.grad / 2.0 * (l * l / 12.0 - xi * xi)) / (2.0 * c2));
    }
    let delta_mu = spec.species.mass * coeffs.phi0 + spec.species.mass * coeffs.grad * l * l / 24.0;
    Ok(StationaryPerturbation { x, alpha, delta_mu })
}

/// Coupled-mode system integrated by [`integrate_coupled_modes`]: indices,
/// frequencies, damping rates, and drive moments share one ordering.
#[derive(Debug, Clone)]
pub struct ModeSystem {
    pub indices: Vec<u32>,
    /// Mode angular frequencies. rad/s
    pub omega: Vec<f64>,
    /// Damping rates. 1/s
    pub gamma: Vec<f64>,
    /// Direct-drive amplitudes. 1/s^2
    pub f: Vec<f64>,
    /// Parametric amplitudes.
    pub sbar: Vec<f64>,
    /// Coupling matrix, row `i` column `j` driving mode `i` from mode `j`;
    /// the diagonal is ignored.
    pub tbar: Vec<Vec<f64>>,
}

impl ModeSystem {
    fn validate(&self) -> Result<()> {
        let n = self.indices.len();
        if n == 0 {
            return Err(Error::Domain("mode system must contain at least one mode".into()));
        }
        if [self.omega.len(), self.gamma.len(), self.f.len(), self.sbar.len(), self.tbar.len()]
            .iter()
            .any(|&len| len != n)
            || self.tbar.iter().any(|row| row.len() != n)
        {
            return Err(Error::Domain("mode system arrays must share one length".into()));
        }
        Ok(())
    }
}

/// Trajectory of the coupled mode amplitudes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    /// `g[i][k]` is mode `i` at time index `k`.
    pub g: Vec<Vec<f64>>,
    pub gdot: Vec<Vec<f64>>,
}

impl Trajectory {
    /// CSV dump with columns `t, g_1, gdot_1, ...` labeled by mode index.
    pub fn to_csv(&self, indices: &[u32]) -> String {
        let mut out = String::from("t");
        for &n in indices {
            out.push_str(&format!(",g_{n},gdot_{n}"));
        }
        out.push('\n');
        for k in 0..self.t.len() {
            out.push_str(&format!("{:.9e}", self.t[k]));
            for i in 0..self.g.len() {
                out.push_str(&format!(",{:.9e},{:.9e}", self.g[i][k], self.gdot[i][k]));
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed-step RK4 integration of the full coupled mode equations with
/// time-dependent parametric and coupling terms.
///
/// The step must resolve both the drive and the fastest mode:
/// `step <= min(2 pi / Omega, 2 pi / omega_max) / 200`.
pub fn integrate_coupled_modes(
    system: &ModeSystem,
    omega_drive: f64,
    drive_phase: f64,
    initial: &[(f64, f64)],
    t_span: f64,
    step: f64,
) -> Result<Trajectory> {
    system.validate()?;
    if initial.len() != system.indices.len() {
        return Err(Error::Domain("initial conditions must match the mode count".into()));
    }
    if omega_drive <= 0.0 || t_span <= 0.0 || step <= 0.0 {
        return Err(Error::Domain("drive frequency, span, and step must be positive".into()));
    }
    let omega_max = system.omega.iter().cloned().fold(0.0, f64::max);
    let max_step = (2.0 * PI / omega_drive).min(2.0 * PI / omega_max) / 200.0;
    if step > max_step {
        return Err(Error::Domain(format!(
            "step {step:.3e} s too large for the requested frequencies; use step <= {max_step:.3e} s"
        )));
    }
    let n = system.indices.len();
    let deriv = |t: f64, state: &[f64], out: &mut [f64]| {
        let s = (omega_drive * t + drive_phase).sin();
        let c = (omega_drive * t + drive_phase).cos();
        for i in 0..n {
            let g = state[2 * i];
            let gdot = state[2 * i + 1];
            let mut acc = system.f[i] * c
                - system.gamma[i] * gdot
                - system.omega[i] * system.omega[i] * (1.0 + system.sbar[i] * s) * g;
            for j in 0..n {
                if j != i {
                    acc += system.tbar[i][j] * s * state[2 * j];
                }
            }
            out[2 * i] = gdot;
            out[2 * i + 1] = acc;
        }
    };
    let steps = (t_span / step).ceil() as usize;
    let mut state: Vec<f64> = initial.iter().flat_map(|&(g, gd)| [g, gd]).collect();
    let mut t = 0.0;
    let mut times = Vec::with_capacity(steps + 1);
    let mut g_traj = vec![Vec::with_capacity(steps + 1); n];
    let mut gdot_traj = vec![Vec::with_capacity(steps + 1); n];
    let record = |t: f64, state: &[f64], g_traj: &mut Vec<Vec<f64>>, gdot_traj: &mut Vec<Vec<f64>>, times: &mut Vec<f64>| {
        times.push(t);
        for i in 0..n {
            g_traj[i].push(state[2 * i]);
            gdot_traj[i].push(state[2 * i + 1]);
        }
    };
    record(t, &state, &mut g_traj, &mut gdot_traj, &mut times);
    let dim = 2 * n;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    for _ in 0..steps {
        let h = step.min(t_span - t);
        deriv(t, &state, &mut k1);
        for i in 0..dim {
            tmp[i] = state[i] + 0.5 * h * k1[i];
        }
        deriv(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = state[i] + 0.5 * h * k2[i];
        }
        deriv(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = state[i] + h * k3[i];
        }
        deriv(t + h, &tmp, &mut k4);
        for i in 0..dim {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
        record(t, &state, &mut g_traj, &mut gdot_traj, &mut times);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric("mode integration diverged".into()));
        }
    }
    Ok(Trajectory { t: times, g: g_traj, gdot: gdot_traj })
}

//! Quantum description of the driven phonon modes: Bogoliubov mode
//! functions, transition amplitudes (closed forms plus an exact-integral
//! oracle), resonant channel parameters, a Gaussian-state engine for
//! displacement, squeezing, and mode mixing, and the closed-form phonon
//! numbers the channels produce.

use crate::condensate::{self, wavenumber, CondensateParams, CondensateSpec};
use crate::constants::HBAR;
use crate::grav_source::FieldAmplitudes;
use crate::quad;
use crate::{Error, Result};

use nalgebra::{DMatrix, DVector};
use std::f64::consts::{PI, SQRT_2};

/// Bogoliubov mode-function coefficients for mode `n`: `u_n = alpha phi_n`
/// and `v_n = beta phi_n` with `phi_n = cos(k_n (x + L/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunctions {
    pub n: u32,
    pub k_n: f64,
    /// Particle-component coefficient. 1/m^(3/2)
    pub alpha: f64,
    /// Hole-component coefficient. 1/m^(3/2)
    pub beta: f64,
}

impl ModeFunctions {
    pub fn phi(&self, x: f64, length: f64) -> f64 {
        (self.k_n * (x + length / 2.0)).cos()
    }

    pub fn u(&self, x: f64, length: f64) -> f64 {
        self.alpha * self.phi(x, length)
    }

    pub fn v(&self, x: f64, length: f64) -> f64 {
        self.beta * self.phi(x, length)
    }
}

/// Mode functions for mode `n` of the given condensate.
pub fn mode_functions(
    spec: &CondensateSpec,
    params: &CondensateParams,
    n: u32,
) -> Result<ModeFunctions> {
    let k_n = wavenumber(spec.length, n)?;
    let s = 1.0 / (SQRT_2 * params.zeta * k_n);
    if s < 1.0 {
        return Err(Error::Domain(format!(
            "mode {n} lies outside the phonon regime (k_n zeta = {:.3} > 1/sqrt(2))",
            k_n * params.zeta
        )));
    }
    let volume = spec.length * condensate::geometry(spec)?.cross_section;
    Ok(ModeFunctions {
        n,
        k_n,
        alpha: ((s + 1.0) / volume).sqrt(),
        beta: -((s - 1.0) / volume).sqrt(),
    })
}

/// Transition amplitudes of the resonant channels, all in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionAmplitudes {
    /// Displacement drive of mode `n`.
    pub m_0n: f64,
    /// Single-mode squeeze of mode `n`.
    pub m_nn: f64,
    /// Two-mode squeeze of the pair `(l, n)`.
    pub m_ln: f64,
    /// Mode-mixing amplitude (particle-particle part).
    pub a_ln: f64,
    /// Mode-mixing amplitude (hole-hole part).
    pub b_ln: f64,
}

fn parity_bracket(amp: &FieldAmplitudes, length: f64, parity_index: u32) -> f64 {
    let sign = if parity_index % 2 == 0 { 1.0 } else { -1.0 };
    (1.0 - sign) * amp.a_osc / length - (1.0 + sign) * amp.grad_osc / 2.0
}

/// Leading-order closed forms of the transition amplitudes in the phonon
/// regime `k zeta << 1`.
pub fn amplitudes_closed(
    spec: &CondensateSpec,
    params: &CondensateParams,
    amp: &FieldAmplitudes,
    n: u32,
    l: u32,
) -> Result<TransitionAmplitudes> {
    if n < 1 || l < 1 || l == n {
        return Err(Error::Domain("amplitudes require distinct mode indices >= 1".into()));
    }
    let m = spec.species.mass;
    let length = spec.length;
    let n_a = condensate::geometry(spec)?.atom_number;
    let zeta = params.zeta;
    let (nf, lf) = (n as f64, l as f64);

    let m_0n = -m * (n_a * zeta).sqrt() * length.powf(1.5) * parity_bracket(amp, length, n)
        / (SQRT_2 * nf * PI).powf(1.5);
    let m_nn = -m * amp.grad_osc * length.powi(3) / (16.0 * SQRT_2 * nf.powi(3) * PI.powi(3) * zeta);
    // Common projected-potential integral for the pair channels; the
    // leading-order coefficients satisfy alpha_l beta_n = -alpha_l alpha_n,
    // so the beam-splitter and pair-creation amplitudes carry the opposite
    // sign from the mixing amplitude.
    let pair = m * length.powi(3) * (lf * lf + nf * nf) * parity_bracket(amp, length, n + l)
        / (2.0 * (2.0 * nf * lf).sqrt() * (lf * lf - nf * nf).powi(2) * PI.powi(3) * zeta);
    Ok(TransitionAmplitudes { m_0n, m_nn, m_ln: pair, a_ln: -pair, b_ln: -pair })
}

/// Transition amplitudes by adaptive quadrature of the defining integrals;
/// serves as the oracle for [`amplitudes_closed`].
pub fn amplitudes_exact(
    spec: &CondensateSpec,
    params: &CondensateParams,
    amp: &FieldAmplitudes,
    n: u32,
    l: u32,
) -> Result<TransitionAmplitudes> {
    if n < 1 || l < 1 || l == n {
        return Err(Error::Domain("amplitudes require distinct mode indices >= 1".into()));
    }
    let geom = condensate::geometry(spec)?;
    let m = spec.species.mass;
    let length = spec.length;
    let fn_n = mode_functions(spec, params, n)?;
    let fn_l = mode_functions(spec, params, l)?;
    let dmu = m * (amp.phi0_osc + amp.grad_osc * length * length / 24.0);
    let dv = move |x: f64| m * (amp.phi0_osc + amp.a_osc * x + amp.grad_osc * x * x / 2.0) - dmu;
    let half = length / 2.0;
    let tol = quad::DEFAULT_REL_TOL;

    let m_0n = 0.5 * (geom.atom_number * geom.cross_section / length).sqrt()
        * quad::integrate(
            |x| dv(x) * (fn_n.u(x, length) + fn_n.v(x, length)),
            -half,
            half,
            tol,
        )?;
    let m_nn = 0.5
        * geom.cross_section
        * quad::integrate(|x| dv(x) * fn_n.u(x, length) * fn_n.v(x, length), -half, half, tol)?;
    let m_ln = 0.5
        * geom.cross_section
        * quad::integrate(|x| dv(x) * fn_l.u(x, length) * fn_n.v(x, length), -half, half, tol)?;
    let a_ln = 0.5
        * geom.cross_section
        * quad::integrate(|x| dv(x) * fn_l.u(x, length) * fn_n.u(x, length), -half, half, tol)?;
    let b_ln = 0.5
        * geom.cross_section
        * quad::integrate(|x| dv(x) * fn_l.v(x, length) * fn_n.v(x, length), -half, half, tol)?;
    Ok(TransitionAmplitudes { m_0n, m_nn, m_ln, a_ln, b_ln })
}

/// Index of the mode resonant with the drive, `n_Omega = L Omega / (pi c0)`.
/// Errors when the ratio is not an integer to 1e-6 relative.
pub fn resonant_index(
    spec: &CondensateSpec,
    params: &CondensateParams,
    omega_drive: f64,
) -> Result<u32> {
    if omega_drive <= 0.0 {
        return Err(Error::Domain("drive frequency must be positive".into()));
    }
    let ratio = spec.length * omega_drive / (PI * params.c0);
    let nearest = ratio.round();
    if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-6 * ratio {
        Ok(nearest as u32)
    } else {
        Err(Error::Resonance(format!(
            "L Omega / (pi c0) = {ratio:.6} is not an integer; nearest resonances are n = {} and n = {}",
            ratio.floor().max(1.0),
            ratio.ceil().max(1.0)
        )))
    }
}

/// Dimensionless channel parameters after an interaction time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParameters {
    /// Coherent displacement of mode `n`.
    pub alpha_n: f64,
    /// Single-mode squeeze parameter.
    pub r_n: f64,
    /// Two-mode squeeze parameter of the pair `(l, n)`.
    pub r_ln: f64,
    /// Mode-mixing angle.
    pub theta_ln: f64,
}

pub fn channel_parameters(amps: &TransitionAmplitudes, t: f64) -> Result<ChannelParameters> {
    if t < 0.0 {
        return Err(Error::Domain("interaction time must be non-negative".into()));
    }
    Ok(ChannelParameters {
        alpha_n: amps.m_0n.abs() * t / HBAR,
        r_n: 2.0 * amps.m_nn.abs() * t / HBAR,
        r_ln: 2.0 * amps.m_ln.abs() * t / HBAR,
        theta_ln: 2.0 * amps.a_ln.abs() * t / HBAR,
    })
}

/// Gaussian state of `modes` phonon modes in the quadrature convention
/// `x = (b + b^dag)/sqrt(2)` (vacuum variance 1/2). Quadratures are
/// ordered `(x_1, p_1, x_2, p_2, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub modes: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// Tolerance on the uncertainty bound of the minimum symplectic eigenvalue.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

impl GaussianState {
    pub fn new_vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Domain("state needs at least one mode".into()));
        }
        Ok(GaussianState {
            modes,
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        })
    }

    /// Product of thermal states with the given mean occupations.
    pub fn new_thermal(occupations: &[f64]) -> Result<Self> {
        let mut state = Self::new_vacuum(occupations.len())?;
        for (i, &n) in occupations.iter().enumerate() {
            if n < 0.0 {
                return Err(Error::Domain("thermal occupation must be non-negative".into()));
            }
            state.cov[(2 * i, 2 * i)] = n + 0.5;
            state.cov[(2 * i + 1, 2 * i + 1)] = n + 0.5;
        }
        Ok(state)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::Domain(format!(
                "mode index {mode} out of range for a {}-mode state",
                self.modes
            )));
        }
        Ok(())
    }

    /// Coherent displacement of one mode by the complex amplitude
    /// `alpha = alpha_re + i alpha_im`.
    pub fn apply_displacement(&mut self, mode: usize, alpha_re: f64, alpha_im: f64) -> Result<()> {
        self.check_mode(mode)?;
        self.mean[2 * mode] += SQRT_2 * alpha_re;
        self.mean[2 * mode + 1] += SQRT_2 * alpha_im;
        Ok(())
    }

    fn apply_symplectic(&mut self, s: &DMatrix<f64>) {
        self.mean = s * &self.mean;
        self.cov = s * &self.cov * s.transpose();
    }

    /// Single-mode squeeze with parameter `r` and angle `angle`.
    pub fn apply_squeeze(&mut self, mode: usize, r: f64, angle: f64) -> Result<()> {
        self.check_mode(mode)?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let (c, s) = (angle.cos(), angle.sin());
        let mut m = DMatrix::identity(2 * self.modes, 2 * self.modes);
        let i = 2 * mode;
        m[(i, i)] = ch - sh * c;
        m[(i, i + 1)] = -sh * s;
        m[(i + 1, i)] = -sh * s;
        m[(i + 1, i + 1)] = ch + sh * c;
        self.apply_symplectic(&m);
        Ok(())
    }

    /// Two-mode squeeze of the pair `(l, n)` with parameter `r`.
    pub fn apply_two_mode_squeeze(&mut self, l: usize, n: usize, r: f64) -> Result<()> {
        self.check_mode(l)?;
        self.check_mode(n)?;
        if l == n {
            return Err(Error::Domain("two-mode squeeze needs distinct modes".into()));
        }
        let (ch, sh) = (r.cosh(), r.sinh());
        let mut m = DMatrix::identity(2 * self.modes, 2 * self.modes);
        let (a, b) = (2 * l, 2 * n);
        m[(a, a)] = ch;
        m[(a + 1, a + 1)] = ch;
        m[(b, b)] = ch;
        m[(b + 1, b + 1)] = ch;
        m[(a, b)] = sh;
        m[(b, a)] = sh;
        m[(a + 1, b + 1)] = -sh;
        m[(b + 1, a + 1)] = -sh;
        self.apply_symplectic(&m);
        Ok(())
    }

    /// Beam-splitter rotation by `theta` between modes `l` and `n`.
    pub fn apply_beamsplitter(&mut self, l: usize, n: usize, theta: f64) -> Result<()> {
        self.check_mode(l)?;
        self.check_mode(n)?;
        if l == n {
            return Err(Error::Domain("beam splitter needs distinct modes".into()));
        }
        let (c, s) = (theta.cos(), theta.sin());
        let mut m = DMatrix::identity(2 * self.modes, 2 * self.modes);
        let (a, b) = (2 * l, 2 * n);
        for off in 0..2 {
            m[(a + off, a + off)] = c;
            m[(b + off, b + off)] = c;
            m[(a + off, b + off)] = -s;
            m[(b + off, a + off)] = s;
        }
        self.apply_symplectic(&m);
        Ok(())
    }

    /// Mean phonon number of one mode.
    pub fn phonon_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        let var = self.cov[(i, i)] + self.cov[(i + 1, i + 1)];
        let disp = self.mean[i] * self.mean[i] + self.mean[i + 1] * self.mean[i + 1];
        Ok(var / 2.0 + disp / 2.0 - 0.5)
    }

    /// Mean-field (coherent) share of the phonon number of one mode.
    pub fn coherent_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        Ok((self.mean[i] * self.mean[i] + self.mean[i + 1] * self.mean[i + 1]) / 2.0)
    }

    pub fn total_phonons(&self) -> f64 {
        (0..self.modes).map(|m| self.phonon_number(m).unwrap()).sum()
    }

    /// Minimum symplectic eigenvalue of the covariance matrix; physical
    /// states satisfy `nu_min >= 1/2`.
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        // The symplectic eigenvalues squared are the eigenvalues of
        // -(Omega Sigma)^2 = (Omega^T Sigma Omega) Sigma, which shares its
        // spectrum with the symmetric matrix
        // Sigma^{1/2} (Omega^T Sigma Omega) Sigma^{1/2}. Going through two
        // symmetric eigenproblems avoids the nonsymmetric QR iteration,
        // whose real Schur form can stall on the purely imaginary spectrum
        // of Omega Sigma.
        let dim = 2 * self.modes;
        let mut omega = DMatrix::zeros(dim, dim);
        for m in 0..self.modes {
            omega[(2 * m, 2 * m + 1)] = 1.0;
            omega[(2 * m + 1, 2 * m)] = -1.0;
        }
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let mut root = eig.eigenvectors.clone();
        for (j, lam) in eig.eigenvalues.iter().enumerate() {
            let s = lam.max(0.0).sqrt();
            for i in 0..dim {
                root[(i, j)] *= s;
            }
        }
        let half = &root * eig.eigenvectors.transpose();
        let core = &half * omega.transpose() * sym * omega * &half;
        let core = (&core + core.transpose()) * 0.5;
        core.symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    /// Errors when the covariance is asymmetric or violates the
    /// uncertainty relation beyond tolerance.
    pub fn assert_physical(&self) -> Result<()> {
        let asym = (&self.cov - self.cov.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::Numeric(format!("covariance asymmetry {asym:.3e}")));
        }
        let nu = self.min_symplectic_eigenvalue();
        if nu < 0.5 - SYMPLECTIC_TOL {
            return Err(Error::Numeric(format!(
                "covariance violates the uncertainty relation (nu_min = {nu:.12})"
            )));
        }
        Ok(())
    }

    /// CSV dump: per-mode numbers, then the mean vector, then the
    /// covariance rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("record,index,values\n");
        for m in 0..self.modes {
            out.push_str(&format!(
                "mode,{m},{:.9e},{:.9e}\n",
                self.phonon_number(m).unwrap(),
                self.coherent_number(m).unwrap()
            ));
        }
        let mean: Vec<String> = self.mean.iter().map(|v| format!("{v:.9e}")).collect();
        out.push_str(&format!("mean,0,{}\n", mean.join(",")));
        for r in 0..self.cov.nrows() {
            let row: Vec<String> =
                self.cov.row(r).iter().map(|v| format!("{v:.9e}")).collect();
            out.push_str(&format!("cov,{r},{}\n", row.join(",")));
        }
        out
    }
}

/// One resonant channel, for sequential or split-step application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Displacement { mode: usize, alpha_re: f64, alpha_im: f64 },
    Squeeze { mode: usize, r: f64, angle: f64 },
    TwoModeSqueeze { l: usize, n: usize, r: f64 },
    BeamSplitter { l: usize, n: usize, theta: f64 },
}

impl GaussianState {
    pub fn apply_channel(&mut self, ch: &Channel) -> Result<()> {
        match *ch {
            Channel::Displacement { mode, alpha_re, alpha_im } => {
                self.apply_displacement(mode, alpha_re, alpha_im)
            }
            Channel::Squeeze { mode, r, angle } => self.apply_squeeze(mode, r, angle),
            Channel::TwoModeSqueeze { l, n, r } => self.apply_two_mode_squeeze(l, n, r),
            Channel::BeamSplitter { l, n, theta } => self.apply_beamsplitter(l, n, theta),
        }
    }

    /// Applies all channels simultaneously by first-order splitting with
    /// `steps` sub-steps. Approximate: the generators do not commute.
    pub fn apply_combined(&mut self, channels: &[Channel], steps: usize) -> Result<()> {
        if steps == 0 {
            return Err(Error::Domain("combined application needs at least one step".into()));
        }
        let k = steps as f64;
        let split: Vec<Channel> = channels
            .iter()
            .map(|ch| match *ch {
                Channel::Displacement { mode, alpha_re, alpha_im } => Channel::Displacement {
                    mode,
                    alpha_re: alpha_re / k,
                    alpha_im: alpha_im / k,
                },
                Channel::Squeeze { mode, r, angle } => Channel::Squeeze { mode, r: r / k, angle },
                Channel::TwoModeSqueeze { l, n, r } => Channel::TwoModeSqueeze { l, n, r: r / k },
                Channel::BeamSplitter { l, n, theta } => {
                    Channel::BeamSplitter { l, n, theta: theta / k }
                }
            })
            .collect();
        for _ in 0..steps {
            for ch in &split {
                self.apply_channel(ch)?;
            }
        }
        Ok(())
    }
}

/// Default split-step count for the combined channel mode.
pub const COMBINED_STEPS: usize = 100;

/// Total phonon number of a state built by squeezing the vacuum by
/// `(r0, theta0)`, displacing by the complex `alpha`, and squeezing again
/// by `r` at angle zero.
pub fn displaced_squeezed_number(
    alpha_re: f64,
    alpha_im: f64,
    r0: f64,
    theta0: f64,
    r: f64,
) -> f64 {
    let squeezed_re = r0.cosh() * r.sinh() + theta0.cos() * r0.sinh() * r.cosh();
    let squeezed_im = theta0.sin() * r0.sinh() * r.cosh();
    // beta = alpha* cosh r - alpha sinh r
    let beta_re = alpha_re * (r.cosh() - r.sinh());
    let beta_im = -alpha_im * (r.cosh() + r.sinh());
    squeezed_re * squeezed_re + squeezed_im * squeezed_im + beta_re * beta_re + beta_im * beta_im
}

/// Phonon numbers after two-mode squeezing by `r` of a mode carrying
/// `n_n0` coherent phonons against a vacuum partner: occupation of the
/// seeded mode, of the partner, and the coherent share of the partner.
pub fn two_mode_numbers(n_n0: f64, r: f64) -> (f64, f64, f64) {
    let sh2 = r.sinh() * r.sinh();
    (n_n0 + (n_n0 + 1.0) * sh2, (n_n0 + 1.0) * sh2, n_n0 * sh2)
}

/// Phonon number remaining in a mode carrying `n_0` phonons after beam
/// splitters with angles `theta_minus` and `theta_plus` route population
/// into two vacuum neighbors.
pub fn mode_mix_number(n_0: f64, theta_minus: f64, theta_plus: f64) -> f64 {
    n_0 * theta_minus.cos().powi(2) * theta_plus.cos().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condensate::{derive_params, AtomSpecies};
    use approx::assert_relative_eq;

    fn rb_spec() -> CondensateSpec {
        CondensateSpec {
            species: AtomSpecies::rubidium_87(),
            length: 200e-6,
            density: 1e19,
            temperature: 1e-9,
            atom_number: Some(9e5),
            cross_section: None,
        }
    }

    fn reference_amplitudes() -> FieldAmplitudes {
        FieldAmplitudes { phi0_osc: 1e-9, a_osc: 2e-8, grad_osc: 2e-6 }
    }

    #[test]
    fn mode_function_normalization_by_quadrature() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let geom = condensate::geometry(&spec).unwrap();
        for n in 1..=3u32 {
            let f = mode_functions(&spec, &p, n).unwrap();
            let integral = quad::integrate(
                |x| f.u(x, spec.length).powi(2) - f.v(x, spec.length).powi(2),
                -spec.length / 2.0,
                spec.length / 2.0,
                1e-12,
            )
            .unwrap();
            assert_relative_eq!(integral * geom.cross_section, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn mode_function_orthogonality() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let f1 = mode_functions(&spec, &p, 1).unwrap();
        let f2 = mode_functions(&spec, &p, 2).unwrap();
        let integral = quad::integrate(
            |x| f1.u(x, spec.length) * f2.u(x, spec.length),
            -spec.length / 2.0,
            spec.length / 2.0,
            1e-12,
        )
        .unwrap();
        let scale = f1.alpha * f2.alpha * spec.length;
        assert!(integral.abs() < 1e-10 * scale);
    }

    #[test]
    fn coefficient_identity() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let geom = condensate::geometry(&spec).unwrap();
        for n in 1..=4u32 {
            let f = mode_functions(&spec, &p, n).unwrap();
            assert_relative_eq!(
                f.alpha * f.alpha - f.beta * f.beta,
                2.0 / (spec.length * geom.cross_section),
                max_relative = 1e-12
            );
            assert!(f.beta < 0.0);
        }
    }

    #[test]
    fn mode_functions_reject_free_particle_regime() {
        let mut spec = rb_spec();
        // Shrink the box until k_1 zeta > 1/sqrt(2).
        spec.length = 1e-7;
        spec.atom_number = None;
        spec.cross_section = Some(1e-10);
        let p = derive_params(&spec).unwrap();
        assert!(mode_functions(&spec, &p, 1).is_err());
    }

    #[test]
    fn closed_vs_exact_within_phonon_correction() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let amp = reference_amplitudes();
        for (n, l) in [(1u32, 2u32), (1, 3), (2, 3), (3, 4), (1, 4), (2, 4)] {
            let closed = amplitudes_closed(&spec, &p, &amp, n, l).unwrap();
            let exact = amplitudes_exact(&spec, &p, &amp, n, l).unwrap();
            let kz = condensate::wavenumber(spec.length, l).unwrap() * p.zeta;
            let tol = 3.0 * kz;
            for (c, e) in [
                (closed.m_0n, exact.m_0n),
                (closed.m_nn, exact.m_nn),
                (closed.m_ln, exact.m_ln),
                (closed.a_ln, exact.a_ln),
                (closed.b_ln, exact.b_ln),
            ] {
                if c == 0.0 {
                    continue;
                }
                assert!(
                    ((c - e) / e).abs() < tol,
                    "(n,l)=({n},{l}): closed {c:.6e} vs exact {e:.6e}"
                );
            }
        }
    }

    #[test]
    fn pair_amplitudes_nearly_degenerate() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let exact = amplitudes_exact(&spec, &p, &reference_amplitudes(), 1, 2).unwrap();
        let kz = condensate::wavenumber(spec.length, 2).unwrap() * p.zeta;
        assert_relative_eq!(exact.m_ln, -exact.a_ln, max_relative = 3.0 * kz);
        assert_relative_eq!(exact.m_ln, -exact.b_ln, max_relative = 3.0 * kz);
    }

    #[test]
    fn parity_forbidden_integrals_vanish() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        // Pure acceleration drives only odd displacement moments.
        let amp = FieldAmplitudes { phi0_osc: 0.0, a_osc: 2e-8, grad_osc: 0.0 };
        let even = amplitudes_exact(&spec, &p, &amp, 2, 3).unwrap();
        let odd = amplitudes_exact(&spec, &p, &amp, 1, 2).unwrap();
        assert!(even.m_0n.abs() < 1e-9 * odd.m_0n.abs());
        // M_nn comes only from the gradient.
        assert!(even.m_nn.abs() < 1e-9 * odd.m_0n.abs());
        let closed = amplitudes_closed(&spec, &p, &amp, 2, 1).unwrap();
        assert_eq!(closed.m_nn, 0.0);
    }

    #[test]
    fn constant_potential_part_cancels() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let with = amplitudes_exact(
            &spec,
            &p,
            &FieldAmplitudes { phi0_osc: 1e-3, a_osc: 2e-8, grad_osc: 2e-6 },
            1,
            2,
        )
        .unwrap();
        let without = amplitudes_exact(
            &spec,
            &p,
            &FieldAmplitudes { phi0_osc: 0.0, a_osc: 2e-8, grad_osc: 2e-6 },
            1,
            2,
        )
        .unwrap();
        assert_relative_eq!(with.m_0n, without.m_0n, max_relative = 1e-9);
    }

    #[test]
    fn displacement_maximal_at_expected_mode() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let with_a = reference_amplitudes();
        let m: Vec<f64> = (1..=6u32)
            .map(|n| {
                amplitudes_closed(&spec, &p, &with_a, n, n + 1).unwrap().m_0n.abs()
            })
            .collect();
        assert!(m[0] > m[1] && m[0] > m[2], "n=1 should dominate: {m:?}");
        let no_a = FieldAmplitudes { phi0_osc: 0.0, a_osc: 0.0, grad_osc: 2e-6 };
        let m: Vec<f64> = (1..=6u32)
            .map(|n| amplitudes_closed(&spec, &p, &no_a, n, n + 1).unwrap().m_0n.abs())
            .collect();
        assert!(m[1] > m[0] && m[1] > m[2], "n=2 should dominate: {m:?}");
    }

    #[test]
    fn pair_amplitude_maximal_at_fundamental_pair() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let amp = reference_amplitudes();
        let reference = amplitudes_closed(&spec, &p, &amp, 1, 2).unwrap().m_ln.abs();
        for n in 1..=4u32 {
            for l in 1..=5u32 {
                if l == n || (n, l) == (1, 2) || (n, l) == (2, 1) {
                    continue;
                }
                let other = amplitudes_closed(&spec, &p, &amp, n, l).unwrap().m_ln.abs();
                assert!(other < reference, "(n,l)=({n},{l})");
            }
        }
    }

    #[test]
    fn squeeze_amplitude_ignores_acceleration() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let a = amplitudes_closed(
            &spec,
            &p,
            &FieldAmplitudes { phi0_osc: 0.0, a_osc: 2e-8, grad_osc: 2e-6 },
            1,
            2,
        )
        .unwrap();
        let b = amplitudes_closed(
            &spec,
            &p,
            &FieldAmplitudes { phi0_osc: 0.0, a_osc: 9e-8, grad_osc: 2e-6 },
            1,
            2,
        )
        .unwrap();
        assert_eq!(a.m_nn, b.m_nn);
    }

    #[test]
    fn resonant_index_cases() {
        let spec = {
            let mut s = rb_spec();
            s.temperature = 1e-9;
            s
        };
        let p = derive_params(&spec).unwrap();
        let w1 = condensate::mode_frequency(&p, spec.length, 1).unwrap();
        assert_eq!(resonant_index(&spec, &p, 3.0 * w1).unwrap(), 3);
        assert!((w1 / (2.0 * PI) - 1.47).abs() < 0.1);
        assert!(resonant_index(&spec, &p, 2.5 * w1).is_err());
        // Doubling L at fixed drive doubles the index.
        let mut wide = spec.clone();
        wide.length *= 2.0;
        let p2 = derive_params(&wide).unwrap();
        assert_eq!(resonant_index(&wide, &p2, 3.0 * w1).unwrap(), 6);
    }

    #[test]
    fn channel_parameters_linear_in_time() {
        let amps = TransitionAmplitudes {
            m_0n: 1e-36,
            m_nn: -2e-37,
            m_ln: 3e-37,
            a_ln: -3e-37,
            b_ln: -3e-37,
        };
        let zero = channel_parameters(&amps, 0.0).unwrap();
        assert_eq!(
            (zero.alpha_n, zero.r_n, zero.r_ln, zero.theta_ln),
            (0.0, 0.0, 0.0, 0.0)
        );
        let one = channel_parameters(&amps, 10.0).unwrap();
        let two = channel_parameters(&amps, 20.0).unwrap();
        assert_relative_eq!(two.alpha_n, 2.0 * one.alpha_n, max_relative = 1e-12);
        assert_relative_eq!(two.r_ln, 2.0 * one.r_ln, max_relative = 1e-12);
        assert!(one.alpha_n >= 0.0 && one.r_n >= 0.0 && one.theta_ln >= 0.0);
    }

    #[test]
    fn pair_parameter_symmetric_under_swap() {
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let amp = reference_amplitudes();
        let a = amplitudes_closed(&spec, &p, &amp, 1, 2).unwrap();
        let b = amplitudes_closed(&spec, &p, &amp, 2, 1).unwrap();
        assert_relative_eq!(a.m_ln.abs(), b.m_ln.abs(), max_relative = 1e-12);
    }

    #[test]
    fn coherent_state_number() {
        let mut s = GaussianState::new_vacuum(1).unwrap();
        s.apply_displacement(0, 1.2, -0.7).unwrap();
        let expected = 1.2f64 * 1.2 + 0.7 * 0.7;
        assert_relative_eq!(s.phonon_number(0).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(s.coherent_number(0).unwrap(), expected, max_relative = 1e-12);
        s.assert_physical().unwrap();
    }

    #[test]
    fn squeezed_vacuum_number() {
        let mut s = GaussianState::new_vacuum(1).unwrap();
        s.apply_squeeze(0, 0.8, 0.0).unwrap();
        assert_relative_eq!(
            s.phonon_number(0).unwrap(),
            0.8f64.sinh().powi(2),
            max_relative = 1e-12
        );
        s.assert_physical().unwrap();
    }

    #[test]
    fn two_mode_squeeze_and_beamsplitter_conservation() {
        let mut s = GaussianState::new_vacuum(2).unwrap();
        s.apply_two_mode_squeeze(0, 1, 0.6).unwrap();
        let sh2 = 0.6f64.sinh().powi(2);
        assert_relative_eq!(s.phonon_number(0).unwrap(), sh2, max_relative = 1e-12);
        assert_relative_eq!(s.phonon_number(1).unwrap(), sh2, max_relative = 1e-12);
        let before = s.total_phonons();
        s.apply_beamsplitter(0, 1, 0.37).unwrap();
        assert!((s.total_phonons() - before).abs() < 1e-12);
        s.assert_physical().unwrap();
    }

    #[test]
    fn thermal_state_numbers() {
        let s = GaussianState::new_thermal(&[3.5, 0.0]).unwrap();
        assert_relative_eq!(s.phonon_number(0).unwrap(), 3.5, max_relative = 1e-12);
        assert_eq!(s.phonon_number(1).unwrap(), 0.0);
        s.assert_physical().unwrap();
    }

    #[test]
    fn displacement_is_local() {
        let mut s = GaussianState::new_vacuum(2).unwrap();
        s.apply_displacement(0, 2.0, 0.0).unwrap();
        assert_eq!(s.phonon_number(1).unwrap(), 0.0);
    }

    #[test]
    fn displaced_squeezed_matches_engine() {
        for (ar, ai, r0, t0, r) in [
            (1.0, 0.5, 0.3, 0.7, 0.4),
            (0.0, 2.0, 0.0, 0.0, 0.9),
            (1.5, 0.0, 0.8, PI, 0.2),
            (-0.4, 1.1, 0.5, 1.3, 1.2),
        ] {
            let closed = displaced_squeezed_number(ar, ai, r0, t0, r);
            let mut s = GaussianState::new_vacuum(1).unwrap();
            s.apply_squeeze(0, r0, t0).unwrap();
            s.apply_displacement(0, ar, ai).unwrap();
            s.apply_squeeze(0, r, 0.0).unwrap();
            assert_relative_eq!(s.phonon_number(0).unwrap(), closed, max_relative = 1e-10);
        }
    }

    #[test]
    fn imaginary_displacement_grows_real_decays() {
        // alpha* = -alpha (pure imaginary): coherent part grows as e^{2r};
        // alpha* = alpha (real): decays as e^{-2r}.
        let r = 0.5;
        let n0 = 4.0f64;
        let a = n0.sqrt();
        let grow = displaced_squeezed_number(0.0, a, 0.0, 0.0, r) - r.sinh().powi(2);
        assert_relative_eq!(grow, n0 * (2.0 * r).exp(), max_relative = 1e-10);
        let decay = displaced_squeezed_number(a, 0.0, 0.0, 0.0, r) - r.sinh().powi(2);
        assert_relative_eq!(decay, n0 * (-2.0 * r).exp(), max_relative = 1e-10);
    }

    #[test]
    fn small_r_coherent_delta() {
        let n0 = 100.0f64;
        let a = n0.sqrt();
        for r in [0.01, 0.03, 0.05] {
            // (e^{±2r} - 1)/(2r) deviates from ±1 by about r at these r.
            let up = displaced_squeezed_number(0.0, a, 0.0, 0.0, r) - r.sinh().powi(2);
            assert!(((up - n0) / (2.0 * r * n0) - 1.0).abs() < 1.2 * r);
            let down = displaced_squeezed_number(a, 0.0, 0.0, 0.0, r) - r.sinh().powi(2);
            assert!(((n0 - down) / (2.0 * r * n0) - 1.0).abs() < 1.2 * r);
        }
    }

    #[test]
    fn two_mode_closed_matches_engine() {
        let (n0, r) = (7.0, 0.45);
        let (n_seed, n_partner, n_partner_c) = two_mode_numbers(n0, r);
        let mut s = GaussianState::new_vacuum(2).unwrap();
        s.apply_displacement(0, n0.sqrt(), 0.0).unwrap();
        s.apply_two_mode_squeeze(0, 1, r).unwrap();
        assert_relative_eq!(s.phonon_number(0).unwrap(), n_seed, max_relative = 1e-10);
        assert_relative_eq!(s.phonon_number(1).unwrap(), n_partner, max_relative = 1e-10);
        assert_relative_eq!(s.coherent_number(1).unwrap(), n_partner_c, max_relative = 1e-10);
        s.assert_physical().unwrap();
    }

    #[test]
    fn mode_mix_closed_matches_engine() {
        let (n0, tm, tp) = (25.0f64, 0.3, 0.2);
        let mut s = GaussianState::new_vacuum(3).unwrap();
        s.apply_displacement(1, n0.sqrt(), 0.0).unwrap();
        s.apply_beamsplitter(1, 0, tm).unwrap();
        s.apply_beamsplitter(1, 2, tp).unwrap();
        assert_relative_eq!(
            s.phonon_number(1).unwrap(),
            mode_mix_number(n0, tm, tp),
            max_relative = 1e-10
        );
        // Total conserved across the splitters.
        assert_relative_eq!(s.total_phonons(), n0, max_relative = 1e-10);
    }

    #[test]
    fn combined_splitting_converges_to_commuting_limit() {
        // Split-step application of non-commuting channels converges to the
        // simultaneous (Trotter) limit as the step count grows; a much finer
        // splitting serves as the reference for that limit.
        let channels = [
            Channel::Displacement { mode: 0, alpha_re: 1.0, alpha_im: 0.3 },
            Channel::TwoModeSqueeze { l: 0, n: 1, r: 0.3 },
        ];
        let mut reference = GaussianState::new_vacuum(2).unwrap();
        reference.apply_combined(&channels, 4000).unwrap();
        let mut coarse = GaussianState::new_vacuum(2).unwrap();
        coarse.apply_combined(&channels, 10).unwrap();
        let mut fine = GaussianState::new_vacuum(2).unwrap();
        fine.apply_combined(&channels, COMBINED_STEPS).unwrap();
        fine.assert_physical().unwrap();
        let d_coarse = (coarse.total_phonons() - reference.total_phonons()).abs();
        let d_fine = (fine.total_phonons() - reference.total_phonons()).abs();
        assert!(
            d_fine < 0.5 * d_coarse,
            "splitting error should shrink: {d_fine} vs {d_coarse}"
        );
    }

    #[test]
    fn csv_dump_contains_modes() {
        let s = GaussianState::new_thermal(&[1.0]).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("record,index,values\n"));
        assert!(csv.contains("mode,0,"));
        assert!(csv.contains("cov,1,"));
    }

    #[test]
    fn engine_displacement_recovers_direct_creation() {
        // alpha_n(t) from the displacement amplitude reproduces the
        // classical resonant phonon number.
        let spec = rb_spec();
        let p = derive_params(&spec).unwrap();
        let amp = FieldAmplitudes { phi0_osc: 0.0, a_osc: 2e-8, grad_osc: 2e-6 };
        let t = 10.0;
        let amps = amplitudes_closed(&spec, &p, &amp, 1, 2).unwrap();
        let pars = channel_parameters(&amps, t).unwrap();
        let mut s = GaussianState::new_vacuum(1).unwrap();
        s.apply_displacement(0, pars.alpha_n, 0.0).unwrap();
        let classical =
            crate::mode_dynamics::created_phonons_direct(&amp, &spec, &p, 1, t).unwrap();
        assert_relative_eq!(s.phonon_number(0).unwrap(), classical, max_relative = 1e-9);
    }
}

//! Python bindings for the gravbec core library: species and source
//! parameters, condensate background quantities, damping breakdowns,
//! experiment planning, and the Gaussian-state engine.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::gravbec::condensate::{self, AtomSpecies, CondensateSpec};
use ::gravbec::constants::DENSE_METAL_DENSITY;
use ::gravbec::damping;
use ::gravbec::grav_source::{self, SourceSphere};
use ::gravbec::metrology::NoiseModel;
use ::gravbec::planner::{self, Constraints, ExperimentPlan, Target, CSV_HEADER};
use ::gravbec::quantum_channels;

fn err(e: ::gravbec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn species(name: &str) -> PyResult<AtomSpecies> {
    AtomSpecies::by_name(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown species `{name}`")))
}

fn build_spec(
    species_name: &str,
    length: f64,
    density: f64,
    temperature: f64,
    atom_number: f64,
) -> PyResult<CondensateSpec> {
    let spec = CondensateSpec {
        species: species(species_name)?,
        length,
        density,
        temperature,
        atom_number: Some(atom_number),
        cross_section: None,
    };
    spec.validate().map_err(err)?;
    Ok(spec)
}

/// Mass and healing-length scale of a built-in species.
#[pyfunction]
fn species_params(py: Python<'_>, name: &str) -> PyResult<Py<PyDict>> {
    let s = species(name)?;
    let d = PyDict::new_bound(py);
    d.set_item("name", s.name.clone())?;
    d.set_item("mass_kg", s.mass)?;
    d.set_item("lambda_m", s.lambda)?;
    Ok(d.into())
}

/// Equilibrium distance and first-order field amplitudes of an oscillating
/// source sphere next to a trap of length `length_m`.
#[pyfunction]
#[pyo3(signature = (mass_kg, r_min_m, delta_r_m, length_m, density_kg_m3=DENSE_METAL_DENSITY))]
fn source_amplitudes(
    py: Python<'_>,
    mass_kg: f64,
    r_min_m: f64,
    delta_r_m: f64,
    length_m: f64,
    density_kg_m3: f64,
) -> PyResult<Py<PyDict>> {
    let sphere = SourceSphere {
        mass: mass_kg,
        density: density_kg_m3,
        r_min: r_min_m,
        delta_r: delta_r_m,
        omega: 1.0,
        phase: 0.0,
    };
    let r0 = sphere.equilibrium_distance(length_m).map_err(err)?;
    let amp = grav_source::oscillation_amplitudes(&sphere, r0).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("radius_m", sphere.radius().map_err(err)?)?;
    d.set_item("r0_m", r0)?;
    d.set_item("phi0_osc", amp.phi0_osc)?;
    d.set_item("a_osc", amp.a_osc)?;
    d.set_item("grad_osc", amp.grad_osc)?;
    d.set_item("stroke_ratio", grav_source::stroke_ratio(&sphere, r0))?;
    Ok(d.into())
}

/// Healing length, sound speed, chemical potential, and the first mode
/// frequencies of a condensate.
#[pyfunction]
#[pyo3(signature = (species="rb87", length_m=200e-6, density_m3=1e19, temperature_k=1e-9, atom_number=1e6))]
fn condensate_params(
    py: Python<'_>,
    species: &str,
    length_m: f64,
    density_m3: f64,
    temperature_k: f64,
    atom_number: f64,
) -> PyResult<Py<PyDict>> {
    let spec = build_spec(species, length_m, density_m3, temperature_k, atom_number)?;
    let p = condensate::derive_params(&spec).map_err(err)?;
    let geom = condensate::geometry(&spec).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("zeta_m", p.zeta)?;
    d.set_item("c0_m_s", p.c0)?;
    d.set_item("mu_j", p.mu)?;
    d.set_item("d_over_l", geom.d_over_l)?;
    let omegas: Vec<f64> = (1..=4u32)
        .map(|n| condensate::mode_frequency(&p, length_m, n).map_err(err))
        .collect::<PyResult<_>>()?;
    d.set_item("omega_n_rad_s", omegas)?;
    Ok(d.into())
}

/// Damping-rate breakdown of mode `n`.
#[pyfunction]
#[pyo3(signature = (species="rb87", length_m=200e-6, density_m3=1e19, temperature_k=1e-9, n=1, gamma_loss=damping::DEFAULT_LOSS_RATE))]
fn damping_breakdown(
    py: Python<'_>,
    species: &str,
    length_m: f64,
    density_m3: f64,
    temperature_k: f64,
    n: u32,
    gamma_loss: f64,
) -> PyResult<Py<PyDict>> {
    let spec = build_spec(species, length_m, density_m3, temperature_k, 1e6)?;
    let p = condensate::derive_params(&spec).map_err(err)?;
    let omega_n = condensate::mode_frequency(&p, length_m, n).map_err(err)?;
    let k_n = condensate::wavenumber(length_m, n).map_err(err)?;
    let b = damping::total_rate(&spec, &p, omega_n, k_n, gamma_loss).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("omega_n_rad_s", omega_n)?;
    d.set_item("gamma_landau", b.gamma_landau)?;
    d.set_item("gamma_beliaev", b.gamma_beliaev)?;
    d.set_item("gamma_loss", b.gamma_loss)?;
    d.set_item("gamma_total", b.gamma_total)?;
    d.set_item("regime", b.regime.label())?;
    Ok(d.into())
}

fn plan_dict(py: Python<'_>, plan: &ExperimentPlan) -> PyResult<Py<PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("scheme", plan.scheme.label())?;
    d.set_item("species", plan.species.name.clone())?;
    d.set_item("mass_kg", plan.source.mass)?;
    d.set_item("r0_m", plan.r0)?;
    d.set_item("omega_drive_rad_s", plan.omega_drive)?;
    d.set_item("n", plan.n)?;
    d.set_item("l", plan.l)?;
    d.set_item("n_omega", plan.n_omega)?;
    d.set_item("length_m", plan.spec.length)?;
    d.set_item("n_a", plan.n_a)?;
    d.set_item("d_over_l", plan.d_over_l)?;
    d.set_item("zeta_m", plan.zeta)?;
    d.set_item("n_cr", plan.n_cr)?;
    d.set_item("n_th", plan.n_th)?;
    d.set_item("r", plan.r)?;
    d.set_item("n_0", plan.n_0)?;
    d.set_item("n_lim", plan.n_lim)?;
    d.set_item("snr", plan.snr)?;
    d.set_item("warnings", plan.warnings.clone())?;
    d.set_item("csv_row", plan.csv_row())?;
    Ok(d.into())
}

/// Plans an experiment for the given scheme and returns the resolved
/// parameter set as a dict.
#[pyfunction]
#[pyo3(signature = (scheme, mass_kg, r_min_m, delta_r_m, species="rb87", target="acceleration"))]
fn plan(
    py: Python<'_>,
    scheme: &str,
    mass_kg: f64,
    r_min_m: f64,
    delta_r_m: f64,
    species: &str,
    target: &str,
) -> PyResult<Py<PyDict>> {
    let sp = self::species(species)?;
    let source = planner::standard_sphere(mass_kg, r_min_m, delta_r_m, 1.0);
    let target = match target {
        "acceleration" => Target::Acceleration,
        "gradient" => Target::Gradient,
        other => return Err(PyValueError::new_err(format!("unknown target `{other}`"))),
    };
    let constraints = Constraints::default();
    let plan = match scheme {
        "direct" => planner::plan_direct(&source, &sp, &constraints),
        "two_mode_squeeze" => planner::plan_two_mode(&source, &sp, target, &constraints),
        "single_mode_squeeze" => planner::plan_single_mode(&source, &sp, target, &constraints),
        other => return Err(PyValueError::new_err(format!("unknown scheme `{other}`"))),
    }
    .map_err(err)?;
    plan_dict(py, &plan)
}

/// Direct-drive signal-to-noise ratio under the default noise model.
#[pyfunction]
#[pyo3(signature = (n_cr, n_th, reps=1e4))]
fn snr_direct(n_cr: f64, n_th: f64, reps: f64) -> PyResult<f64> {
    Ok(::gravbec::metrology::snr_direct(n_cr, n_th, &NoiseModel::default(), reps)
        .map_err(err)?
        .snr)
}

/// Reproduces the reference tables and returns (all_pass, csv_report).
#[pyfunction]
fn reproduce_tables() -> PyResult<(bool, String)> {
    let rep = planner::reproduce_tables().map_err(err)?;
    Ok((rep.all_pass(), rep.to_csv()))
}

/// Exact CSV header of plan and sweep rows.
#[pyfunction]
fn csv_header() -> &'static str {
    CSV_HEADER
}

/// Gaussian state of one or more phonon modes.
#[pyclass(name = "GaussianState")]
struct PyGaussianState {
    inner: quantum_channels::GaussianState,
}

#[pymethods]
impl PyGaussianState {
    #[new]
    fn new(modes: usize) -> PyResult<Self> {
        Ok(Self { inner: quantum_channels::GaussianState::new_vacuum(modes).map_err(err)? })
    }

    #[staticmethod]
    fn thermal(occupations: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: quantum_channels::GaussianState::new_thermal(&occupations).map_err(err)? })
    }

    fn displace(&mut self, mode: usize, alpha_re: f64, alpha_im: f64) -> PyResult<()> {
        self.inner.apply_displacement(mode, alpha_re, alpha_im).map_err(err)
    }

    fn squeeze(&mut self, mode: usize, r: f64, angle: f64) -> PyResult<()> {
        self.inner.apply_squeeze(mode, r, angle).map_err(err)
    }

    fn two_mode_squeeze(&mut self, l: usize, n: usize, r: f64) -> PyResult<()> {
        self.inner.apply_two_mode_squeeze(l, n, r).map_err(err)
    }

    fn beamsplit(&mut self, l: usize, n: usize, theta: f64) -> PyResult<()> {
        self.inner.apply_beamsplitter(l, n, theta).map_err(err)
    }

    fn phonon_number(&self, mode: usize) -> PyResult<f64> {
        self.inner.phonon_number(mode).map_err(err)
    }

    fn total_phonons(&self) -> f64 {
        self.inner.total_phonons()
    }

    fn min_symplectic_eigenvalue(&self) -> f64 {
        self.inner.min_symplectic_eigenvalue()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

#[pymodule]
fn gravbec(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(species_params, m)?)?;
    m.add_function(wrap_pyfunction!(source_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(condensate_params, m)?)?;
    m.add_function(wrap_pyfunction!(damping_breakdown, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(snr_direct, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_tables, m)?)?;
    m.add_function(wrap_pyfunction!(csv_header, m)?)?;
    m.add_class::<PyGaussianState>()?;
    Ok(())
}

//! Python bindings for the trap-ramp simulator.
//!
//! Exposes the moment state, frequency profile, generator spectrum,
//! exact propagation, oscillation estimators, the classical ensemble
//! cross-check, and the simulated measurement protocol as an in-process
//! extension module named `ep3`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ep3_core::units::PhysicalConstants;
use ep3_core::{algebra, classical, figures, observables, propagation, protocol};

fn err(e: ep3_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn constants(hbar: f64, mass: f64) -> PyResult<PhysicalConstants> {
    PhysicalConstants::new(hbar, mass).map_err(err)
}

/// Moment state (H, L, D) at a trap frequency and time.
#[pyclass(name = "AlgebraState", frozen)]
struct PyAlgebraState {
    inner: algebra::AlgebraState,
}

#[pymethods]
impl PyAlgebraState {
    #[new]
    #[pyo3(signature = (h, l, d, omega, t = 0.0))]
    fn new(h: f64, l: f64, d: f64, omega: f64, t: f64) -> PyResult<Self> {
        Ok(Self {
            inner: algebra::AlgebraState::new(h, l, d, omega, t).map_err(err)?,
        })
    }

    /// Ground state of the trap at `omega`.
    #[staticmethod]
    #[pyo3(signature = (omega, hbar = 1.0))]
    fn ground_state(omega: f64, hbar: f64) -> PyResult<Self> {
        let consts = constants(hbar, 1.0)?;
        Ok(Self {
            inner: algebra::AlgebraState::ground_state(omega, &consts).map_err(err)?,
        })
    }

    /// Thermal state with mean occupation `n_bar`.
    #[staticmethod]
    #[pyo3(signature = (omega, n_bar, hbar = 1.0))]
    fn thermal_state(omega: f64, n_bar: f64, hbar: f64) -> PyResult<Self> {
        let consts = constants(hbar, 1.0)?;
        Ok(Self {
            inner: algebra::AlgebraState::thermal_state(omega, n_bar, &consts).map_err(err)?,
        })
    }

    /// State with the given phase-space second moments
    /// `(<x^2>, <p^2>, <xp>_sym)`.
    #[staticmethod]
    #[pyo3(signature = (xx, pp, xp, omega, t = 0.0, mass = 1.0))]
    fn from_covariance(xx: f64, pp: f64, xp: f64, omega: f64, t: f64, mass: f64) -> PyResult<Self> {
        let consts = constants(1.0, mass)?;
        Ok(Self {
            inner: algebra::AlgebraState::from_covariance(xx, pp, xp, omega, t, &consts)
                .map_err(err)?,
        })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    #[getter]
    fn l(&self) -> f64 {
        self.inner.l()
    }

    #[getter]
    fn d(&self) -> f64 {
        self.inner.d()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t()
    }

    /// Conserved combination (h^2 - l^2 - d^2) / omega^2.
    fn casimir(&self) -> f64 {
        self.inner.casimir()
    }

    /// Wigner-ellipse axes `(sigma_w, sigma_n, rho)` in normalized
    /// coordinates.
    fn sigma_axes(&self) -> PyResult<(f64, f64, f64)> {
        let axes = observables::sigma_axes(&self.inner).map_err(err)?;
        Ok((axes.sigma_w, axes.sigma_n, axes.rho))
    }

    /// Frequency-scaled variances `(m w <x^2>, <p^2>/(m w))`.
    fn scaled_variances(&self) -> (f64, f64) {
        observables::scaled_variances(&self.inner)
    }

    /// `mu d + l^2 / (4 h)`; non-negative values obey the visibility law.
    fn stationarity_condition(&self, mu: f64) -> f64 {
        observables::stationarity_condition(&self.inner, mu)
    }

    /// Phase-space second moments `(<x^2>, <p^2>, <xp>_sym)`.
    #[pyo3(signature = (mass = 1.0))]
    fn covariance(&self, mass: f64) -> PyResult<(f64, f64, f64)> {
        let consts = constants(1.0, mass)?;
        Ok(self.inner.covariance(&consts))
    }

    fn __repr__(&self) -> String {
        format!(
            "AlgebraState(h={}, l={}, d={}, omega={}, t={})",
            self.inner.h(),
            self.inner.l(),
            self.inner.d(),
            self.inner.omega(),
            self.inner.t()
        )
    }
}

/// Trap frequency ramp at constant adiabatic parameter.
#[pyclass(name = "FrequencyProfile", frozen)]
struct PyFrequencyProfile {
    inner: propagation::FrequencyProfile,
}

#[pymethods]
impl PyFrequencyProfile {
    #[new]
    fn new(omega0: f64, mu: f64) -> PyResult<Self> {
        Ok(Self {
            inner: propagation::FrequencyProfile::new(omega0, mu).map_err(err)?,
        })
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.inner.omega0()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    /// Divergence time of the ramp (`inf` for non-closing ramps).
    #[getter]
    fn t_max(&self) -> f64 {
        self.inner.t_max()
    }

    fn omega_at(&self, t: f64) -> PyResult<f64> {
        self.inner.omega_at(t).map_err(err)
    }

    fn tau_of_t(&self, t: f64) -> PyResult<f64> {
        self.inner.tau_of_t(t).map_err(err)
    }

    fn t_of_tau(&self, tau: f64) -> PyResult<f64> {
        self.inner.t_of_tau(tau).map_err(err)
    }

    fn compression_at_tau(&self, tau: f64) -> f64 {
        self.inner.compression_at_tau(tau)
    }

    fn __repr__(&self) -> String {
        format!(
            "FrequencyProfile(omega0={}, mu={})",
            self.inner.omega0(),
            self.inner.mu()
        )
    }
}

/// The real traceless 3x3 generator of the rescaled moment dynamics.
#[pyclass(name = "GeneratorMatrix", frozen)]
struct PyGeneratorMatrix {
    inner: algebra::GeneratorMatrix,
}

#[pymethods]
impl PyGeneratorMatrix {
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    fn entries(&self) -> Vec<Vec<f64>> {
        self.inner
            .entries()
            .iter()
            .map(|row| row.to_vec())
            .collect()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// Smallest k in {1,2,3} with max|M^k| <= tol, or None.
    #[pyo3(signature = (tol = 1e-10))]
    fn nilpotency_index(&self, tol: f64) -> Option<u8> {
        self.inner.nilpotency_index(tol)
    }
}

/// Closed-form spectrum of the generator with EP diagnostics.
#[pyclass(name = "SpectralData", frozen)]
struct PySpectralData {
    inner: algebra::SpectralData,
}

#[pymethods]
impl PySpectralData {
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    /// Eigenvalues of i M, ordered (0, +w, -w).
    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues.to_vec()
    }

    #[getter]
    fn right_eigenvectors(&self) -> Vec<Vec<Complex64>> {
        self.inner
            .right_eigenvectors
            .iter()
            .map(|v| v.to_vec())
            .collect()
    }

    #[getter]
    fn left_eigenvectors(&self) -> Vec<Vec<Complex64>> {
        self.inner
            .left_eigenvectors
            .iter()
            .map(|v| v.to_vec())
            .collect()
    }

    #[getter]
    fn is_ep(&self) -> bool {
        self.inner.is_ep
    }

    #[getter]
    fn nilpotency_index(&self) -> Option<u8> {
        self.inner.nilpotency_index
    }

    #[getter]
    fn defect(&self) -> f64 {
        self.inner.defect
    }
}

/// Time series of moment states along one ramp.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: propagation::TrajectoryRecord,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    fn t(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    fn tau(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.tau).collect()
    }

    fn omega(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.omega).collect()
    }

    fn h(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.h).collect()
    }

    fn l(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.l).collect()
    }

    fn d(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.d).collect()
    }

    fn sigma_w(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.sigma_w).collect()
    }

    fn sigma_n(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.sigma_n).collect()
    }

    fn rho(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.rho).collect()
    }

    fn x2_scaled(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.x2_scaled).collect()
    }

    fn p2_scaled(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.p2_scaled).collect()
    }

    /// Largest relative Casimir deviation along the record.
    fn casimir_drift(&self) -> f64 {
        self.inner.casimir_drift()
    }

    /// Period/visibility report for this trajectory.
    fn measure(&self) -> PyResult<PyOscillationReport> {
        let report = observables::measure_period_and_visibility(&self.inner).map_err(err)?;
        Ok(PyOscillationReport { inner: report })
    }

    /// The trajectory as CSV text (same schema as the CLI).
    fn to_csv(&self) -> String {
        ep3_core::output::trajectory_csv(&self.inner)
    }
}

/// Measured against analytic oscillation characteristics.
#[pyclass(name = "OscillationReport", frozen)]
struct PyOscillationReport {
    inner: observables::OscillationReport,
}

#[pymethods]
impl PyOscillationReport {
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn regime(&self) -> String {
        self.inner.regime.to_string()
    }

    #[getter]
    fn measured_period_tau(&self) -> Option<f64> {
        self.inner.measured_period_tau
    }

    #[getter]
    fn measured_visibility(&self) -> Option<f64> {
        self.inner.measured_visibility
    }

    #[getter]
    fn rho_max(&self) -> f64 {
        self.inner.rho_max
    }

    #[getter]
    fn rho_min(&self) -> f64 {
        self.inner.rho_min
    }

    #[getter]
    fn analytic_period_tau(&self) -> f64 {
        self.inner.analytic_period_tau
    }

    #[getter]
    fn analytic_visibility(&self) -> f64 {
        self.inner.analytic_visibility
    }

    fn __repr__(&self) -> String {
        format!(
            "OscillationReport(mu={}, regime={}, T={:?}, V={:?})",
            self.inner.mu,
            self.inner.regime,
            self.inner.measured_period_tau,
            self.inner.measured_visibility
        )
    }
}

/// Seeded Gaussian phase-space ensemble.
#[pyclass(name = "WignerEnsemble", frozen)]
struct PyWignerEnsemble {
    inner: classical::PhaseSpaceEnsemble,
}

#[pymethods]
impl PyWignerEnsemble {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    fn xs(&self) -> Vec<f64> {
        self.inner.points().iter().map(|p| p.x).collect()
    }

    fn ps(&self) -> Vec<f64> {
        self.inner.points().iter().map(|p| p.p).collect()
    }

    /// Sample second moments `(<x^2>, <p^2>, <xp>_sym)`.
    fn sample_moments(&self) -> (f64, f64, f64) {
        self.inner.sample_moments()
    }
}

/// One measurement of the simulated protocol.
#[pyclass(name = "Measurement", frozen)]
struct PyMeasurement {
    #[pyo3(get)]
    t_n: f64,
    #[pyo3(get)]
    omega_n: f64,
    #[pyo3(get)]
    compression_factor: f64,
    #[pyo3(get)]
    x2_scaled: f64,
    #[pyo3(get)]
    p2_scaled: f64,
    #[pyo3(get)]
    sigma_n: f64,
    #[pyo3(get)]
    sigma_w: f64,
    #[pyo3(get)]
    rho: f64,
}

/// One grid point of the quantum-classical comparison.
#[pyclass(name = "ClassicalCheckRow", frozen)]
struct PyClassicalCheckRow {
    #[pyo3(get)]
    t: f64,
    #[pyo3(get)]
    tau: f64,
    #[pyo3(get)]
    omega: f64,
    #[pyo3(get)]
    h_mc: f64,
    #[pyo3(get)]
    h_exact: f64,
    #[pyo3(get)]
    z_h: f64,
    #[pyo3(get)]
    l_mc: f64,
    #[pyo3(get)]
    l_exact: f64,
    #[pyo3(get)]
    z_l: f64,
    #[pyo3(get)]
    d_mc: f64,
    #[pyo3(get)]
    d_exact: f64,
    #[pyo3(get)]
    z_d: f64,
}

/// Generator matrix M(mu) with rows (0, -mu, 0), (-mu, 0, -2), (0, 2, 0).
#[pyfunction]
fn build_generator(mu: f64) -> PyResult<PyGeneratorMatrix> {
    Ok(PyGeneratorMatrix {
        inner: algebra::build_generator(mu).map_err(err)?,
    })
}

/// Closed-form eigendecomposition of i M(mu).
#[pyfunction]
fn eigensystem(mu: f64) -> PyResult<PySpectralData> {
    Ok(PySpectralData {
        inner: algebra::eigensystem(mu).map_err(err)?,
    })
}

/// Unconjugated left-right product of the coalescing eigenvector.
#[pyfunction]
fn biorthogonal_product(mu: f64) -> PyResult<f64> {
    algebra::biorthogonal_product(mu).map_err(err)
}

/// exp(M dtau) as a nested list.
#[pyfunction]
fn exact_propagator(mu: f64, dtau: f64) -> PyResult<Vec<Vec<f64>>> {
    let p = propagation::exact_propagator(mu, dtau).map_err(err)?;
    Ok(p.entries().iter().map(|row| row.to_vec()).collect())
}

/// Applies exp(M dtau) to a frequency-rescaled (h, l, d) vector.
#[pyfunction]
fn propagate_scaled(state_scaled: [f64; 3], mu: f64, dtau: f64) -> PyResult<[f64; 3]> {
    propagation::propagate_scaled(&state_scaled, mu, dtau).map_err(err)
}

/// Evolves a moment state along a profile to time `t` with the exact
/// propagator.
#[pyfunction]
fn evolve_state(
    state: &PyAlgebraState,
    profile: &PyFrequencyProfile,
    t: f64,
) -> PyResult<PyAlgebraState> {
    Ok(PyAlgebraState {
        inner: propagation::evolve_state(&state.inner, &profile.inner, t).map_err(err)?,
    })
}

/// Ground-state trajectory out to `compression_max`.
#[pyfunction]
#[pyo3(signature = (mu, omega0 = 1.0, compression_max = 1e3, samples_per_period = 512, hbar = 1.0, mass = 1.0))]
fn ground_trajectory(
    mu: f64,
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    hbar: f64,
    mass: f64,
) -> PyResult<PyTrajectory> {
    let consts = constants(hbar, mass)?;
    Ok(PyTrajectory {
        inner: figures::ground_trajectory(mu, omega0, compression_max, samples_per_period, &consts)
            .map_err(err)?,
    })
}

/// Oscillation period 2 pi / sqrt(4 - mu^2) (inf beyond the EP).
#[pyfunction]
fn analytic_period_tau(mu: f64) -> f64 {
    observables::analytic_period_tau(mu)
}

/// Fringe visibility |mu|/2, capped at 1.
#[pyfunction]
fn analytic_visibility(mu: f64) -> f64 {
    observables::analytic_visibility(mu)
}

/// Damped-oscillator eigenfrequencies (i mu +/- sqrt(4 - mu^2)) / 2.
#[pyfunction]
fn classical_eigenfrequencies(mu: f64) -> (Complex64, Complex64) {
    classical::classical_eigenfrequencies(mu)
}

/// Closed-form solution of x'' + mu x' + x = 0; returns (x, dx/dtau).
#[pyfunction]
fn exact_classical_solution(mu: f64, x0: f64, dxdtau0: f64, tau: f64) -> (f64, f64) {
    classical::exact_classical_solution(mu, x0, dxdtau0, tau)
}

/// Seeded Gaussian samples of the state's Wigner distribution.
#[pyfunction]
#[pyo3(signature = (state, n, seed, hbar = 1.0, mass = 1.0))]
fn sample_wigner(
    state: &PyAlgebraState,
    n: usize,
    seed: u64,
    hbar: f64,
    mass: f64,
) -> PyResult<PyWignerEnsemble> {
    let consts = constants(hbar, mass)?;
    Ok(PyWignerEnsemble {
        inner: classical::sample_wigner(&state.inner, n, seed, &consts).map_err(err)?,
    })
}

/// Quantum-classical z-score table from a seeded ground-state ensemble.
#[pyfunction]
#[pyo3(signature = (mu, omega0 = 1.0, compression_max = 1e3, n_mc = 100_000, seed = 7, hbar = 1.0, mass = 1.0))]
fn classical_check(
    mu: f64,
    omega0: f64,
    compression_max: f64,
    n_mc: usize,
    seed: u64,
    hbar: f64,
    mass: f64,
) -> PyResult<Vec<PyClassicalCheckRow>> {
    let consts = constants(hbar, mass)?;
    let rows = figures::classical_check_rows(mu, omega0, compression_max, n_mc, seed, &consts)
        .map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| PyClassicalCheckRow {
            t: r.t,
            tau: r.tau,
            omega: r.omega,
            h_mc: r.h_mc,
            h_exact: r.h_exact,
            z_h: r.z_h,
            l_mc: r.l_mc,
            l_exact: r.l_exact,
            z_l: r.z_l,
            d_mc: r.d_mc,
            d_exact: r.d_exact,
            z_d: r.z_d,
        })
        .collect())
}

/// Runs the ramp-and-measure protocol; `mean_occupation` switches the
/// preparation from the ground state to a thermal state.
#[pyfunction]
#[pyo3(signature = (omega_open, omega_closed, mu, n_times, mean_occupation = None, hbar = 1.0, mass = 1.0))]
fn run_protocol(
    omega_open: f64,
    omega_closed: f64,
    mu: f64,
    n_times: usize,
    mean_occupation: Option<f64>,
    hbar: f64,
    mass: f64,
) -> PyResult<Vec<PyMeasurement>> {
    let consts = constants(hbar, mass)?;
    let plan = protocol::ExperimentPlan {
        omega_open,
        omega_closed,
        mu,
        n_times,
        initial: match mean_occupation {
            Some(n_bar) => protocol::InitialPreparation::Thermal {
                mean_occupation: n_bar,
            },
            None => protocol::InitialPreparation::GroundState,
        },
    };
    let records = protocol::run_protocol(&plan, &consts).map_err(err)?;
    Ok(records
        .into_iter()
        .map(|r| PyMeasurement {
            t_n: r.t_n,
            omega_n: r.omega_n,
            compression_factor: r.compression_factor,
            x2_scaled: r.x2_scaled,
            p2_scaled: r.p2_scaled,
            sigma_n: r.sigma_n_hold,
            sigma_w: r.sigma_w_hold,
            rho: r.rho(),
        })
        .collect())
}

/// Freezes the trap and reads the ellipse axes off one variance period.
#[pyfunction]
fn hold_and_measure(state: &PyAlgebraState) -> PyResult<(f64, f64)> {
    protocol::hold_and_measure(&state.inner).map_err(err)
}

#[pymodule]
#[pyo3(name = "ep3")]
fn extension(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyAlgebraState>()?;
    m.add_class::<PyFrequencyProfile>()?;
    m.add_class::<PyGeneratorMatrix>()?;
    m.add_class::<PySpectralData>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyOscillationReport>()?;
    m.add_class::<PyWignerEnsemble>()?;
    m.add_class::<PyMeasurement>()?;
    m.add_class::<PyClassicalCheckRow>()?;
    m.add_function(wrap_pyfunction!(build_generator, m)?)?;
    m.add_function(wrap_pyfunction!(eigensystem, m)?)?;
    m.add_function(wrap_pyfunction!(biorthogonal_product, m)?)?;
    m.add_function(wrap_pyfunction!(exact_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(propagate_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_state, m)?)?;
    m.add_function(wrap_pyfunction!(ground_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_period_tau, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_visibility, m)?)?;
    m.add_function(wrap_pyfunction!(classical_eigenfrequencies, m)?)?;
    m.add_function(wrap_pyfunction!(exact_classical_solution, m)?)?;
    m.add_function(wrap_pyfunction!(sample_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(classical_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(hold_and_measure, m)?)?;
    Ok(())
}

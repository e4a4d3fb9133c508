//! Pure drivers behind the CLI commands: spectra, sweeps, figure grids and
//! the quantum-classical comparison tables.

use serde::Serialize;

use crate::algebra::{biorthogonal_product, eigensystem, AlgebraState, SpectralData};
use crate::classical::{evolve_ensemble_moments, moment_standard_errors, sample_wigner};
use crate::observables;
use crate::propagation::{trajectory_uniform, FrequencyProfile, TrajectoryRecord};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Default adiabatic-parameter ladder for the figure commands.
pub const DEFAULT_FIG_MU_LIST: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 2.5];

/// Number of grid points for the quantum-classical comparison.
pub const CLASSICAL_CHECK_POINTS: usize = 50;

/// Spectral summary of one adiabatic parameter value.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub mu: f64,
    pub eigenvalues: [(f64, f64); 3],
    pub is_ep: bool,
    pub nilpotency_index: Option<u8>,
    pub biorthogonal_product: f64,
    pub defect: f64,
}

pub fn spectrum_rows(mu_list: &[f64]) -> Result<Vec<SpectrumRow>> {
    if mu_list.is_empty() {
        return Err(Error::precondition("mu list must be non-empty".to_string()));
    }
    mu_list
        .iter()
        .map(|&mu| {
            let SpectralData {
                eigenvalues,
                is_ep,
                nilpotency_index,
                defect,
                ..
            } = eigensystem(mu)?;
            Ok(SpectrumRow {
                mu,
                eigenvalues: [
                    (eigenvalues[0].re, eigenvalues[0].im),
                    (eigenvalues[1].re, eigenvalues[1].im),
                    (eigenvalues[2].re, eigenvalues[2].im),
                ],
                is_ep,
                nilpotency_index,
                biorthogonal_product: biorthogonal_product(mu)?,
                defect,
            })
        })
        .collect()
}

/// How many stretched-time samples a run takes per fastest period.
fn dtau_of(mu: f64, samples_per_period: usize) -> f64 {
    let period = observables::analytic_period_tau(mu).min(std::f64::consts::TAU);
    period / samples_per_period as f64
}

/// Ground-state trajectory out to `compression_max`, sampled at
/// `samples_per_period` per fastest period. For a constant trap the
/// compression target is meaningless, so three periods are used instead.
pub fn ground_trajectory(
    mu: f64,
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    consts: &PhysicalConstants,
) -> Result<TrajectoryRecord> {
    let profile = FrequencyProfile::new(omega0, mu)?;
    let initial = AlgebraState::ground_state(omega0, consts)?;
    let tau_end = if mu == 0.0 {
        3.0 * observables::analytic_period_tau(0.0)
    } else {
        profile.tau_of_compression(compression_max)?
    };
    let dtau = dtau_of(mu, samples_per_period);
    let n = (tau_end / dtau).ceil() as usize + 1;
    trajectory_uniform(&initial, &profile, tau_end, n)
}

/// Oscillation reports for a ladder of adiabatic parameters. Each trajectory
/// is stretched, if necessary, beyond the compression target so that the
/// estimator's minimum-span precondition holds near the exceptional point.
pub fn sweep_reports(
    mu_list: &[f64],
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    consts: &PhysicalConstants,
) -> Result<Vec<observables::OscillationReport>> {
    if mu_list.is_empty() {
        return Err(Error::precondition("mu list must be non-empty".to_string()));
    }
    let mut reports = Vec::with_capacity(mu_list.len());
    for &mu in mu_list {
        let profile = FrequencyProfile::new(omega0, mu)?;
        let initial = AlgebraState::ground_state(omega0, consts)?;
        let period = observables::analytic_period_tau(mu);
        let from_compression = if mu == 0.0 {
            0.0
        } else {
            profile.tau_of_compression(compression_max)?
        };
        let tau_end = if period.is_finite() {
            from_compression.max((observables::MIN_PERIODS + 0.25) * period)
        } else {
            from_compression.max(10.0)
        };
        let dtau = dtau_of(mu, samples_per_period);
        let n = (tau_end / dtau).ceil() as usize + 1;
        let record = trajectory_uniform(&initial, &profile, tau_end, n)?;
        reports.push(observables::measure_period_and_visibility(&record)?);
    }
    Ok(reports)
}

/// Figure-data table: one row per compression factor, one column per mu.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub compressions: Vec<f64>,
    pub mu_labels: Vec<f64>,
    /// `columns[j][i]` is the value for `mu_labels[j]` at
    /// `compressions[i]`.
    pub columns: Vec<Vec<f64>>,
}

#[derive(Clone, Copy)]
enum FigureKind {
    /// Axis ratio `rho`.
    AxisRatio,
    /// Scaled position variance `2 <x^2> w`.
    ScaledPositionVariance,
}

fn figure_table(
    kind: FigureKind,
    mu_list: &[f64],
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    consts: &PhysicalConstants,
) -> Result<FigureTable> {
    if mu_list.is_empty() {
        return Err(Error::precondition("mu list must be non-empty".to_string()));
    }
    let valid_range = compression_max > 1.0 && compression_max.is_finite();
    if !valid_range {
        return Err(Error::domain(format!(
            "compression_max must be finite and exceed 1, got {compression_max}"
        )));
    }
    // Enough log-spaced points that the fastest column keeps
    // `samples_per_period` samples per oscillation.
    let log_span = compression_max.ln();
    let mut n_points: usize = samples_per_period;
    for &mu in mu_list {
        if mu == 0.0 {
            continue;
        }
        let tau_end = log_span / mu.abs();
        let period = observables::analytic_period_tau(mu).min(std::f64::consts::TAU);
        let needed = (tau_end / period * samples_per_period as f64).ceil() as usize;
        n_points = n_points.max(needed);
    }
    n_points = n_points.max(2) + 1;

    let compressions: Vec<f64> = (0..n_points)
        .map(|i| (log_span * i as f64 / (n_points - 1) as f64).exp())
        .collect();
    let mut columns = Vec::with_capacity(mu_list.len());
    for &mu in mu_list {
        let initial = AlgebraState::ground_state(omega0, consts)?;
        let profile = FrequencyProfile::new(omega0, mu)?;
        // The Casimir is conserved, so the axis ratio is the wide-axis
        // variance over sqrt(C0); this form survives the extreme squeezing
        // where (h - sqrt(l^2+d^2)) would cancel away.
        let root_c = initial.casimir().sqrt();
        let mut column = Vec::with_capacity(n_points);
        for &c in &compressions {
            let tau = if mu == 0.0 { 0.0 } else { c.ln() / mu.abs() };
            let u =
                crate::propagation::propagate_scaled(&initial.scaled_vector(), profile.mu(), tau)?;
            let value = match kind {
                FigureKind::AxisRatio => {
                    let radius = (u[1] * u[1] + u[2] * u[2]).sqrt();
                    (u[0] + radius) / root_c
                }
                FigureKind::ScaledPositionVariance => 2.0 * (u[0] - u[1]) / consts.mass,
            };
            column.push(value);
        }
        columns.push(column);
    }
    Ok(FigureTable {
        compressions,
        mu_labels: mu_list.to_vec(),
        columns,
    })
}

/// Axis ratio vs compression factor, one column per mu (log-spaced grid).
pub fn fig1a_table(
    mu_list: &[f64],
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    consts: &PhysicalConstants,
) -> Result<FigureTable> {
    figure_table(
        FigureKind::AxisRatio,
        mu_list,
        omega0,
        compression_max,
        samples_per_period,
        consts,
    )
}

/// Scaled position variance `2 <x^2> w` vs compression factor.
pub fn fig1b_table(
    mu_list: &[f64],
    omega0: f64,
    compression_max: f64,
    samples_per_period: usize,
    consts: &PhysicalConstants,
) -> Result<FigureTable> {
    figure_table(
        FigureKind::ScaledPositionVariance,
        mu_list,
        omega0,
        compression_max,
        samples_per_period,
        consts,
    )
}

/// One grid point of the quantum-classical comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalCheckRow {
    pub t: f64,
    pub tau: f64,
    pub omega: f64,
    pub h_mc: f64,
    pub h_exact: f64,
    pub z_h: f64,
    pub l_mc: f64,
    pub l_exact: f64,
    pub z_l: f64,
    pub d_mc: f64,
    pub d_exact: f64,
    pub z_d: f64,
}

/// Evolves a seeded ground-state ensemble classically and scores the
/// reconstructed moments against the exact dynamics at
/// [`CLASSICAL_CHECK_POINTS`] grid times.
pub fn classical_check_rows(
    mu: f64,
    omega0: f64,
    compression_max: f64,
    n_mc: usize,
    seed: u64,
    consts: &PhysicalConstants,
) -> Result<Vec<ClassicalCheckRow>> {
    let profile = FrequencyProfile::new(omega0, mu)?;
    let initial = AlgebraState::ground_state(omega0, consts)?;
    let tau_end = if mu == 0.0 {
        3.0 * observables::analytic_period_tau(0.0)
    } else {
        profile.tau_of_compression(compression_max)?
    };
    let t_grid: Vec<f64> = (1..=CLASSICAL_CHECK_POINTS)
        .map(|k| profile.t_of_tau(tau_end * k as f64 / CLASSICAL_CHECK_POINTS as f64))
        .collect::<Result<_>>()?;
    let ensemble = sample_wigner(&initial, n_mc, seed, consts)?;
    let mc_states = evolve_ensemble_moments(&ensemble, &profile, &t_grid, consts)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for (mc, &t) in mc_states.iter().zip(&t_grid) {
        let exact = crate::propagation::evolve_state(&initial, &profile, t)?;
        let (se_h, se_l, se_d) = moment_standard_errors(&exact, n_mc, consts);
        rows.push(ClassicalCheckRow {
            t,
            tau: profile.tau_of_t(t)?,
            omega: exact.omega(),
            h_mc: mc.h(),
            h_exact: exact.h(),
            z_h: (mc.h() - exact.h()) / se_h,
            l_mc: mc.l(),
            l_exact: exact.l(),
            z_l: (mc.l() - exact.l()) / se_l,
            d_mc: mc.d(),
            d_exact: exact.d(),
            z_d: (mc.d() - exact.d()) / se_d,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::Regime;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn spectrum_rows_flag_the_ep() {
        let rows = spectrum_rows(&[0.0, 2.0]).unwrap();
        assert!(!rows[0].is_ep);
        assert_eq!(rows[0].eigenvalues[1], (2.0, 0.0));
        assert!(rows[1].is_ep);
        assert_eq!(rows[1].nilpotency_index, Some(3));
        assert_eq!(rows[1].biorthogonal_product, 0.0);
        assert!(spectrum_rows(&[]).is_err());
    }

    #[test]
    fn sweep_matches_analytic_laws() {
        let reports = sweep_reports(&[0.5, 1.0, 1.5], 1.0, 1000.0, 512, &consts()).unwrap();
        for r in &reports {
            assert_eq!(r.regime, Regime::Oscillatory);
            let v = r.measured_visibility.unwrap();
            assert!(
                (v - r.analytic_visibility).abs() < 1e-3,
                "visibility {v} vs {} at mu={}",
                r.analytic_visibility,
                r.mu
            );
            let t = r.measured_period_tau.unwrap();
            assert!(
                ((t - r.analytic_period_tau) / r.analytic_period_tau).abs() < 1e-3,
                "period {t} vs {} at mu={}",
                r.analytic_period_tau,
                r.mu
            );
        }
    }

    #[test]
    fn sweep_spans_enough_periods_near_the_ep() {
        // compression 1000 alone is far less than one period at mu = 1.99;
        // the sweep must stretch the run rather than fail the estimator.
        let reports = sweep_reports(&[1.99], 1.0, 1000.0, 128, &consts()).unwrap();
        assert_eq!(reports[0].regime, Regime::Oscillatory);
    }

    #[test]
    fn fig1b_anchors_at_one() {
        let table = fig1b_table(&DEFAULT_FIG_MU_LIST, 1.0, 1000.0, 64, &consts()).unwrap();
        assert_eq!(table.compressions[0], 1.0);
        for column in &table.columns {
            assert_eq!(column[0], 1.0, "scaled variance must be exactly 1 at c = 1");
        }
    }

    #[test]
    fn fig1a_constant_trap_column_is_flat() {
        let table = fig1a_table(&[0.0], 1.0, 1000.0, 64, &consts()).unwrap();
        for &v in &table.columns[0] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn fig1a_oscillatory_columns_stay_in_band() {
        let table = fig1a_table(&[0.5, 1.0], 1.0, 1000.0, 256, &consts()).unwrap();
        for (j, &mu) in table.mu_labels.iter().enumerate() {
            let top = (2.0 + mu) / (2.0 - mu);
            for &v in &table.columns[j] {
                assert!(v >= 1.0 - 1e-12, "rho below 1 for mu={mu}");
                assert!(v <= top + 1e-9, "rho {v} above band {top} for mu={mu}");
            }
        }
    }

    #[test]
    fn fig1a_ep_column_is_monotone() {
        let table = fig1a_table(&[2.0, 2.5], 1.0, 1000.0, 256, &consts()).unwrap();
        for column in &table.columns {
            for pair in column.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12, "column must be monotone");
            }
        }
    }

    #[test]
    fn classical_check_scores_stay_bounded() {
        let rows = classical_check_rows(1.0, 1.0, 1000.0, 20_000, 7, &consts()).unwrap();
        assert_eq!(rows.len(), CLASSICAL_CHECK_POINTS);
        for r in &rows {
            assert!(r.z_h.abs() < 4.0, "z_h = {} at t = {}", r.z_h, r.t);
            assert!(r.z_l.abs() < 4.0, "z_l = {}", r.z_l);
            assert!(r.z_d.abs() < 4.0, "z_d = {}", r.z_d);
        }
    }
}

//! Simulated ramp-and-measure procedure.
//!
//! The experiment equilibrates a stationary state at the initial frequency,
//! ramps the trap between `omega_open` and `omega_closed` at constant
//! adiabatic parameter, and reads out frequency-scaled variances at a ladder
//! of intermediate times. The hold-and-measure variant freezes the trap at
//! the measurement frequency and tracks the scaled position variance over
//! one rotation of the phase-space ellipse: its minimum and maximum are the
//! squared narrow and wide axes, with no reference state preparation needed.

use serde::Serialize;

use crate::algebra::AlgebraState;
use crate::error::ensure_finite;
use crate::observables::quad_vertex;
use crate::propagation::{exact_propagator, trajectory_tau_grid, FrequencyProfile};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Number of samples of the scaled variance taken over one hold period.
const HOLD_SAMPLES: usize = 256;

/// How the matter is prepared before the ramp. All variants are stationary
/// with respect to the initial trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPreparation {
    GroundState,
    Thermal {
        mean_occupation: f64,
    },
    /// An explicit stationary moment state (`l = d = 0`) at the ramp's
    /// initial frequency.
    Custom(AlgebraState),
}

/// Ramp between two trap frequencies at constant adiabatic parameter, with
/// a ladder of measurement times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPlan {
    pub omega_open: f64,
    pub omega_closed: f64,
    pub mu: f64,
    pub n_times: usize,
    pub initial: InitialPreparation,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.omega_open, "omega_open")?;
        ensure_finite(self.omega_closed, "omega_closed")?;
        ensure_finite(self.mu, "mu")?;
        if self.omega_open <= 0.0 {
            return Err(Error::domain("omega_open must be positive".to_string()));
        }
        if self.omega_closed <= self.omega_open {
            return Err(Error::domain(format!(
                "omega_closed ({}) must exceed omega_open ({})",
                self.omega_closed, self.omega_open
            )));
        }
        if self.mu == 0.0 {
            return Err(Error::domain(
                "the ramp needs a nonzero adiabatic parameter".to_string(),
            ));
        }
        if self.n_times < 1 {
            return Err(Error::domain("n_times must be at least 1".to_string()));
        }
        if let InitialPreparation::Thermal { mean_occupation } = self.initial {
            ensure_finite(mean_occupation, "mean_occupation")?;
            if mean_occupation < 0.0 {
                return Err(Error::domain(
                    "mean occupation must be non-negative".to_string(),
                ));
            }
        }
        Ok(())
    }

    /// The ramp starts open and closes for `mu > 0`, and the other way
    /// around for `mu < 0`.
    pub fn omega_start(&self) -> f64 {
        if self.mu > 0.0 {
            self.omega_open
        } else {
            self.omega_closed
        }
    }

    /// Ramp duration obtained by inverting the frequency profile:
    /// `t_f = (1/|mu|) |1/omega_open - 1/omega_closed|`.
    pub fn t_final(&self) -> f64 {
        (1.0 / self.omega_open - 1.0 / self.omega_closed).abs() / self.mu.abs()
    }

    fn initial_state(&self, consts: &PhysicalConstants) -> Result<AlgebraState> {
        let omega0 = self.omega_start();
        match self.initial {
            InitialPreparation::GroundState => AlgebraState::ground_state(omega0, consts),
            InitialPreparation::Thermal { mean_occupation } => {
                AlgebraState::thermal_state(omega0, mean_occupation, consts)
            }
            InitialPreparation::Custom(state) => {
                if state.l() != 0.0 || state.d() != 0.0 {
                    return Err(Error::domain(
                        "custom initial state must be stationary (l = d = 0)".to_string(),
                    ));
                }
                if (state.omega() - omega0).abs() > 1e-9 * omega0 {
                    return Err(Error::domain(format!(
                        "custom initial state sits at omega = {} but the ramp starts at {omega0}",
                        state.omega()
                    )));
                }
                Ok(state)
            }
        }
    }
}

/// One measurement of the protocol: direct scaled variances plus the
/// hold-and-measure axis readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub t_n: f64,
    pub omega_n: f64,
    pub compression_factor: f64,
    pub x2_scaled: f64,
    pub p2_scaled: f64,
    pub sigma_n_hold: f64,
    pub sigma_w_hold: f64,
}

impl MeasurementRecord {
    /// Axis ratio as read out by the hold measurement.
    pub fn rho(&self) -> f64 {
        self.sigma_w_hold / self.sigma_n_hold
    }
}

/// Runs the ramp and measures at `n_times` compression factors spaced
/// geometrically (uniformly in stretched time) up to the far frequency.
pub fn run_protocol(
    plan: &ExperimentPlan,
    consts: &PhysicalConstants,
) -> Result<Vec<MeasurementRecord>> {
    plan.validate()?;
    let omega0 = plan.omega_start();
    let profile = FrequencyProfile::new(omega0, plan.mu)?;
    let initial = plan.initial_state(consts)?;
    let c_max = plan.omega_closed / plan.omega_open;
    let tau_f = profile.tau_of_compression(c_max)?;
    let tau_grid: Vec<f64> = (1..=plan.n_times)
        .map(|k| tau_f * k as f64 / plan.n_times as f64)
        .collect();
    let record = trajectory_tau_grid(&initial, &profile, &tau_grid)?;
    let mut measurements = Vec::with_capacity(record.samples.len());
    for sample in &record.samples {
        let state = AlgebraState::new(sample.h, sample.l, sample.d, sample.omega, sample.t)?;
        let (sigma_n, sigma_w) = hold_and_measure(&state)?;
        measurements.push(MeasurementRecord {
            t_n: sample.t,
            omega_n: sample.omega,
            compression_factor: profile.compression_at_tau(sample.tau),
            x2_scaled: sample.x2_scaled,
            p2_scaled: sample.p2_scaled,
            sigma_n_hold: sigma_n,
            sigma_w_hold: sigma_w,
        });
    }
    Ok(measurements)
}

/// Freezes the trap at the state's frequency and tracks the scaled position
/// variance `m w <x^2(t)>` over one full variance period (`pi / w` in
/// physical time, since the ellipse turns at rate `2 w`). Returns
/// `(sigma_n, sigma_w)`: the square roots of the minimum and maximum.
pub fn hold_and_measure(state: &AlgebraState) -> Result<(f64, f64)> {
    let u0 = state.scaled_vector();
    // One variance period in stretched time is pi; sample it circularly.
    let mut values = [0.0; HOLD_SAMPLES];
    for (k, slot) in values.iter_mut().enumerate() {
        let dtau = std::f64::consts::PI * k as f64 / HOLD_SAMPLES as f64;
        let u = exact_propagator(0.0, dtau)?.apply(&u0);
        *slot = u[0] - u[1];
    }
    let mut min_val = f64::INFINITY;
    let mut max_val = f64::NEG_INFINITY;
    for k in 0..HOLD_SAMPLES {
        let prev = values[(k + HOLD_SAMPLES - 1) % HOLD_SAMPLES];
        let here = values[k];
        let next = values[(k + 1) % HOLD_SAMPLES];
        // The signal is periodic over the window, so every sample has
        // circular neighbors and boundary extrema are refined too.
        let (_, vertex) = quad_vertex(prev, here, next);
        if here >= prev && here >= next {
            max_val = max_val.max(vertex);
        }
        if here <= prev && here <= next {
            min_val = min_val.min(vertex);
        }
        max_val = max_val.max(here);
        min_val = min_val.min(here);
    }
    if min_val <= 0.0 {
        return Err(Error::domain(
            "hold measurement produced a non-positive variance".to_string(),
        ));
    }
    Ok((min_val.sqrt(), max_val.sqrt()))
}

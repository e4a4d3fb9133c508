//! Wigner-ellipse observables and the oscillation/monotonic classification.
//!
//! In the normalized phase-space coordinates `x sqrt(m w)`, `p / sqrt(m w)`
//! a Gaussian state is an ellipse with axis variances
//! `sigma_{W,N}^2 = (H +/- sqrt(L^2 + D^2)) / w`. The axis ratio
//! `rho = sigma_W / sigma_N >= 1` oscillates in stretched time with period
//! `2 pi / sqrt(4 - mu^2)` below the exceptional point and grows
//! monotonically beyond it; the fringe visibility of the oscillation is
//! `|mu| / 2`.

use serde::Serialize;

use crate::algebra::AlgebraState;
use crate::propagation::TrajectoryRecord;
use crate::{Error, Result};

/// Minimum number of analytic periods an oscillatory trajectory must span
/// before period/visibility estimation is attempted.
pub const MIN_PERIODS: f64 = 3.0;
/// Minimum sampling density for the estimator.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 64.0;

/// Wide/narrow standard deviations of the Wigner ellipse and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseAxes {
    pub sigma_w: f64,
    pub sigma_n: f64,
    pub rho: f64,
}

/// `sigma_{W,N}^2 = (h +/- sqrt(l^2 + d^2)) / omega` in normalized
/// coordinates.
pub fn sigma_axes(state: &AlgebraState) -> Result<EllipseAxes> {
    let radius = (state.l() * state.l() + state.d() * state.d()).sqrt();
    let narrow_sq = (state.h() - radius) / state.omega();
    let wide_sq = (state.h() + radius) / state.omega();
    if narrow_sq <= 0.0 {
        return Err(Error::domain(format!(
            "non-physical state: narrow-axis variance {narrow_sq} is not positive"
        )));
    }
    let sigma_w = wide_sq.sqrt();
    let sigma_n = narrow_sq.sqrt();
    Ok(EllipseAxes {
        sigma_w,
        sigma_n,
        rho: sigma_w / sigma_n,
    })
}

/// Frequency-scaled variances `(m w <x^2>, <p^2> / (m w))`, i.e.
/// `((h - l)/w, (h + l)/w)`.
pub fn scaled_variances(state: &AlgebraState) -> (f64, f64) {
    (
        (state.h() - state.l()) / state.omega(),
        (state.h() + state.l()) / state.omega(),
    )
}

/// Oscillation period of the ellipse ratio in stretched time:
/// `2 pi / sqrt(4 - mu^2)` below the exceptional point, infinite beyond.
pub fn analytic_period_tau(mu: f64) -> f64 {
    let s = 4.0 - mu * mu;
    if s > 0.0 {
        std::f64::consts::TAU / s.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Fringe visibility `|mu| / 2`, capped at 1 where the oscillations are
/// gone.
pub fn analytic_visibility(mu: f64) -> f64 {
    (mu.abs() / 2.0).min(1.0)
}

/// `mu d + l^2 / (4h)`; initial states with a non-negative value follow the
/// analytic visibility law. Stationary states give exactly zero.
pub fn stationarity_condition(state: &AlgebraState, mu: f64) -> f64 {
    mu * state.d() + state.l() * state.l() / (4.0 * state.h())
}

/// Dynamical regime of the ellipse ratio along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Oscillatory,
    Monotonic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Oscillatory => write!(f, "oscillatory"),
            Regime::Monotonic => write!(f, "monotonic"),
        }
    }
}

/// Measured against analytic oscillation characteristics of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationReport {
    pub mu: f64,
    pub regime: Regime,
    pub measured_period_tau: Option<f64>,
    pub measured_visibility: Option<f64>,
    pub rho_max: f64,
    pub rho_min: f64,
    pub analytic_period_tau: f64,
    pub analytic_visibility: f64,
}

/// Vertex of the parabola through `(-1, ym)`, `(0, y0)`, `(1, yp)`:
/// returns `(offset, value)` with the offset clamped to `[-1, 1]`.
pub(crate) fn quad_vertex(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let curvature = 0.5 * (yp + ym) - y0;
    let slope = 0.5 * (yp - ym);
    if curvature == 0.0 {
        return (0.0, y0);
    }
    let offset = (-slope / (2.0 * curvature)).clamp(-1.0, 1.0);
    (offset, y0 + slope * offset + curvature * offset * offset)
}

/// A refined extremum of the ellipse ratio.
struct Extremum {
    tau: f64,
    rho: f64,
}

/// Refines a local maximum of rho by fitting a parabola through the three
/// neighboring samples of rho itself (smooth there).
fn refine_maximum(record: &TrajectoryRecord, i: usize) -> Extremum {
    let s = &record.samples;
    let (offset, value) = quad_vertex(s[i - 1].rho, s[i].rho, s[i + 1].rho);
    let dtau = s[i + 1].tau - s[i].tau;
    Extremum {
        tau: s[i].tau + offset * dtau,
        rho: value,
    }
}

/// Refines a local minimum of rho.
///
/// Minima where the ellipse momentarily turns isotropic are corners of rho
/// (the axis separation vanishes linearly), so the parabola is fitted to the
/// smooth squared separation `q = (l^2 + d^2)/w^2` instead and rho is
/// rebuilt from the interpolated `(h/w, q)` pair. A vertex that dips below
/// zero is clamped: the ellipse became isotropic and the ratio is exactly 1.
fn refine_minimum(record: &TrajectoryRecord, i: usize) -> Extremum {
    let s = &record.samples;
    let q_at = |k: usize| {
        let (l, d, w) = (s[k].l, s[k].d, s[k].omega);
        (l * l + d * d) / (w * w)
    };
    let h_at = |k: usize| s[k].h / s[k].omega;
    let (offset, q_raw) = quad_vertex(q_at(i - 1), q_at(i), q_at(i + 1));
    let q = q_raw.max(0.0);
    // Evaluate the h parabola at the same sub-sample offset.
    let hm = h_at(i - 1);
    let h0 = h_at(i);
    let hp = h_at(i + 1);
    let curvature = 0.5 * (hp + hm) - h0;
    let slope = 0.5 * (hp - hm);
    let h_tilde = h0 + slope * offset + curvature * offset * offset;
    let root = q.sqrt();
    let rho = ((h_tilde + root) / (h_tilde - root)).sqrt();
    let dtau = s[i + 1].tau - s[i].tau;
    Extremum {
        tau: s[i].tau + offset * dtau,
        rho,
    }
}

/// Detects the oscillation regime of the ellipse ratio and, when it
/// oscillates, measures the period (mean spacing of refined maxima) and the
/// fringe visibility `(rho_max - rho_min)/(rho_max + rho_min)`.
pub fn measure_period_and_visibility(record: &TrajectoryRecord) -> Result<OscillationReport> {
    let samples = &record.samples;
    if samples.len() < 3 {
        return Err(Error::precondition(format!(
            "trajectory too short: {} samples, need at least 3",
            samples.len()
        )));
    }
    let mu = record.profile.mu();
    let period = analytic_period_tau(mu);
    let span = samples.last().unwrap().tau - samples[0].tau;
    if period.is_finite() && mu != 0.0 {
        if span < MIN_PERIODS * period {
            return Err(Error::precondition(format!(
                "trajectory spans {span:.3} in tau but {MIN_PERIODS} periods ({:.3}) are needed",
                MIN_PERIODS * period
            )));
        }
        let per_period = samples.len() as f64 / (span / period);
        if per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::precondition(format!(
                "sampling too sparse: {per_period:.1} samples per period, need {MIN_SAMPLES_PER_PERIOD}"
            )));
        }
    }

    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..samples.len() - 1 {
        let (a, b, c) = (samples[i - 1].rho, samples[i].rho, samples[i + 1].rho);
        if b > a && b > c {
            maxima.push(refine_maximum(record, i));
        } else if b < a && b < c {
            minima.push(refine_minimum(record, i));
        }
    }

    if maxima.is_empty() && minima.is_empty() {
        let rho_max = samples
            .iter()
            .map(|s| s.rho)
            .fold(f64::NEG_INFINITY, f64::max);
        let rho_min = samples.iter().map(|s| s.rho).fold(f64::INFINITY, f64::min);
        return Ok(OscillationReport {
            mu,
            regime: Regime::Monotonic,
            measured_period_tau: None,
            measured_visibility: None,
            rho_max,
            rho_min,
            analytic_period_tau: period,
            analytic_visibility: analytic_visibility(mu),
        });
    }

    let mean = |xs: &[Extremum]| xs.iter().map(|e| e.rho).sum::<f64>() / xs.len() as f64;
    // The start of a trajectory launched from a stationary state is itself a
    // minimum; interior minima carry the same value, so means are taken over
    // interior extrema only.
    let rho_max = if maxima.is_empty() {
        samples
            .iter()
            .map(|s| s.rho)
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        mean(&maxima)
    };
    let rho_min = if minima.is_empty() {
        samples.iter().map(|s| s.rho).fold(f64::INFINITY, f64::min)
    } else {
        mean(&minima)
    };

    let spacing = |xs: &[Extremum]| -> Option<f64> {
        if xs.len() >= 2 {
            Some((xs.last().unwrap().tau - xs[0].tau) / (xs.len() - 1) as f64)
        } else {
            None
        }
    };
    let measured_period = spacing(&maxima).or_else(|| spacing(&minima));

    Ok(OscillationReport {
        mu,
        regime: Regime::Oscillatory,
        measured_period_tau: measured_period,
        measured_visibility: Some((rho_max - rho_min) / (rho_max + rho_min)),
        rho_max,
        rho_min,
        analytic_period_tau: period,
        analytic_visibility: analytic_visibility(mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{trajectory_uniform, FrequencyProfile};
    use crate::units::PhysicalConstants;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ground(omega0: f64) -> AlgebraState {
        AlgebraState::ground_state(omega0, &PhysicalConstants::default()).unwrap()
    }

    fn ground_trajectory(mu: f64, periods: f64, samples_per_period: usize) -> TrajectoryRecord {
        let profile = FrequencyProfile::new(1.0, mu).unwrap();
        let period = analytic_period_tau(mu);
        let span_unit = if period.is_finite() {
            period
        } else {
            std::f64::consts::TAU
        };
        let tau_end = periods * span_unit;
        // Sampling density is set by the fastest oscillation.
        let dtau = span_unit.min(std::f64::consts::TAU) / samples_per_period as f64;
        let n = (tau_end / dtau).ceil() as usize + 1;
        trajectory_uniform(&ground(1.0), &profile, tau_end, n).unwrap()
    }

    #[test]
    fn ground_state_axes_are_isotropic() {
        let axes = sigma_axes(&ground(1.0)).unwrap();
        let expected = 0.5_f64.sqrt();
        assert!((axes.sigma_w - expected).abs() < 1e-15);
        assert!((axes.sigma_n - expected).abs() < 1e-15);
        assert_eq!(axes.rho, 1.0);
    }

    #[test]
    fn squeezed_state_axes() {
        let state = AlgebraState::new(0.625, 0.375, 0.0, 1.0, 0.0).unwrap();
        let axes = sigma_axes(&state).unwrap();
        assert!((axes.sigma_w - 1.0).abs() < 1e-15);
        assert!((axes.sigma_n - 0.5).abs() < 1e-15);
        assert!((axes.rho - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_variance_examples() {
        let (x2, p2) = scaled_variances(&ground(1.0));
        assert_eq!((x2, p2), (0.5, 0.5));
        let state = AlgebraState::new(0.8, 0.0, 0.3, 2.0, 0.0).unwrap();
        let (x2, p2) = scaled_variances(&state);
        assert_eq!(x2, p2);
        assert_eq!(x2, 0.4);
    }

    #[test]
    fn analytic_period_examples() {
        assert!((analytic_period_tau(0.0) - PI).abs() < 1e-15);
        assert!((analytic_period_tau(1.0) - std::f64::consts::TAU / 3.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(analytic_period_tau(2.0), f64::INFINITY);
        assert_eq!(analytic_period_tau(-2.5), f64::INFINITY);
    }

    #[test]
    fn analytic_visibility_examples() {
        assert_eq!(analytic_visibility(1.0), 0.5);
        assert_eq!(analytic_visibility(0.0), 0.0);
        assert_eq!(analytic_visibility(2.0), 1.0);
        assert_eq!(analytic_visibility(3.0), 1.0);
        assert_eq!(analytic_visibility(-1.0), 0.5);
    }

    #[test]
    fn stationarity_examples() {
        assert_eq!(stationarity_condition(&ground(1.0), 5.0), 0.0);
        let s = AlgebraState::new(1.0, 0.4, 0.1, 1.0, 0.0).unwrap();
        assert!((stationarity_condition(&s, 1.0) - 0.14).abs() < 1e-15);
        let neg = AlgebraState::new(1.0, 0.0, -0.5, 1.0, 0.0).unwrap();
        assert_eq!(stationarity_condition(&neg, 1.0), -0.5);
    }

    #[test]
    fn measured_period_and_visibility_at_mu_one() {
        let record = ground_trajectory(1.0, 3.2, 4096);
        let report = measure_period_and_visibility(&record).unwrap();
        assert_eq!(report.regime, Regime::Oscillatory);
        let period = report.measured_period_tau.expect("period must be measured");
        let expected = std::f64::consts::TAU / 3.0_f64.sqrt();
        assert!(
            ((period - expected) / expected).abs() < 1e-3,
            "period {period} vs analytic {expected}"
        );
        let v = report.measured_visibility.unwrap();
        assert!((v - 0.5).abs() < 1e-3, "visibility {v} should be 0.5");
        assert!(
            (report.rho_max - 3.0).abs() < 1e-4,
            "rho_max {}",
            report.rho_max
        );
        assert!(
            (report.rho_min - 1.0).abs() < 1e-6,
            "rho_min {}",
            report.rho_min
        );
    }

    #[test]
    fn measured_visibility_at_mu_half() {
        let record = ground_trajectory(0.5, 3.2, 4096);
        let report = measure_period_and_visibility(&record).unwrap();
        let v = report.measured_visibility.unwrap();
        assert!((v - 0.25).abs() < 1e-3, "visibility {v} should be 0.25");
    }

    #[test]
    fn monotonic_beyond_the_ep() {
        let profile = FrequencyProfile::new(1.0, 2.5).unwrap();
        let record = trajectory_uniform(&ground(1.0), &profile, 10.0, 2048).unwrap();
        let report = measure_period_and_visibility(&record).unwrap();
        assert_eq!(report.regime, Regime::Monotonic);
        assert_eq!(report.measured_period_tau, None);
        assert_eq!(report.analytic_visibility, 1.0);
    }

    #[test]
    fn visibility_law_holds_for_non_stationary_starts() {
        // The visibility law extends to any initial state whose
        // stationarity condition is positive, including states whose ratio
        // minima never touch 1. A state violating the condition deviates.
        let cases = [
            (1.0, 0.4, 0.1, 1.0),
            (1.0, 0.0, 0.3, 1.0),
            (1.0, 0.5, 0.0, 1.5),
        ];
        for (h, l, d, mu) in cases {
            let initial = AlgebraState::new(h, l, d, 1.0, 0.0).unwrap();
            assert!(stationarity_condition(&initial, mu) > 0.0);
            let profile = FrequencyProfile::new(1.0, mu).unwrap();
            let tau_end = 3.25 * analytic_period_tau(mu);
            let record = trajectory_uniform(&initial, &profile, tau_end, 8192).unwrap();
            let report = measure_period_and_visibility(&record).unwrap();
            let v = report.measured_visibility.unwrap();
            assert!(
                (v - mu / 2.0).abs() < 1e-3,
                "visibility {v} vs {} for start ({h}, {l}, {d}) at mu={mu}",
                mu / 2.0
            );
            assert!(report.rho_min > 1.01, "these starts never turn isotropic");
        }
        // Negative condition: the law no longer applies.
        let violating = AlgebraState::new(1.0, 0.3, -0.2, 1.0, 0.0).unwrap();
        assert!(stationarity_condition(&violating, 1.0) < 0.0);
        let profile = FrequencyProfile::new(1.0, 1.0).unwrap();
        let tau_end = 3.25 * analytic_period_tau(1.0);
        let record = trajectory_uniform(&violating, &profile, tau_end, 8192).unwrap();
        let report = measure_period_and_visibility(&record).unwrap();
        let v = report.measured_visibility.unwrap();
        assert!(
            (v - 0.5).abs() > 1e-2,
            "a condition-violating start must break the law, got V = {v}"
        );
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let record = ground_trajectory(1.0, 1.5, 512);
        assert!(measure_period_and_visibility(&record).is_err());
    }

    #[test]
    fn sparse_trajectory_is_rejected() {
        let record = ground_trajectory(1.0, 3.5, 32);
        assert!(measure_period_and_visibility(&record).is_err());
    }

    #[test]
    fn constant_trap_keeps_the_ellipse_fixed() {
        // Any initial state: the axis ratio never moves for mu = 0.
        let profile = FrequencyProfile::new(1.0, 0.0).unwrap();
        let initial = AlgebraState::new(0.8, 0.25, -0.3, 1.0, 0.0).unwrap();
        let record = trajectory_uniform(&initial, &profile, 4.0 * PI, 2048).unwrap();
        let rho0 = record.samples[0].rho;
        for s in &record.samples {
            assert!((s.rho - rho0).abs() < 1e-10, "rho moved at tau={}", s.tau);
        }
    }

    #[test]
    fn equal_maxima_across_cycles() {
        let record = ground_trajectory(1.5, 3.4, 4096);
        let samples = &record.samples;
        let mut peaks = Vec::new();
        for i in 1..samples.len() - 1 {
            if samples[i].rho > samples[i - 1].rho && samples[i].rho > samples[i + 1].rho {
                let (_, value) =
                    quad_vertex(samples[i - 1].rho, samples[i].rho, samples[i + 1].rho);
                peaks.push(value);
            }
        }
        assert!(
            peaks.len() >= 3,
            "expected at least 3 peaks, got {}",
            peaks.len()
        );
        for pair in peaks.windows(2) {
            assert!(
                (pair[1] - pair[0]).abs() < 1e-6,
                "successive maxima differ: {} vs {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn oscillations_survive_close_to_the_ep() {
        for mu in [1.9, 1.99] {
            let record = ground_trajectory(mu, 3.2, 512);
            let report = measure_period_and_visibility(&record).unwrap();
            assert_eq!(report.regime, Regime::Oscillatory, "mu={mu} must oscillate");
        }
    }

    proptest! {
        /// sigma_w * sigma_n equals sqrt(Casimir) identically.
        #[test]
        fn axis_product_is_casimir_root(
            omega in 0.2..5.0f64,
            c in 0.25..4.0f64,
            r in 0.0..2.0f64,
            theta in 0.0..std::f64::consts::TAU,
        ) {
            let scale = omega * c.sqrt();
            let state = AlgebraState::new(
                scale * r.cosh(),
                scale * r.sinh() * theta.cos(),
                scale * r.sinh() * theta.sin(),
                omega,
                0.0,
            ).unwrap();
            let axes = sigma_axes(&state).unwrap();
            let expected = state.casimir().sqrt();
            prop_assert!((axes.sigma_w * axes.sigma_n - expected).abs() <= 1e-10 * expected.max(1.0));
            prop_assert!(axes.rho >= 1.0);
            // Uncertainty floor for states at or above the quarter bound.
            prop_assert!(axes.sigma_n * axes.sigma_w >= 0.5 - 1e-12);
        }

        /// Sum and difference identities of the scaled variances.
        #[test]
        fn scaled_variance_identities(
            h in 0.3..3.0f64,
            frac in 0.0..0.9f64,
            theta in 0.0..std::f64::consts::TAU,
            omega in 0.2..5.0f64,
        ) {
            let l = h * frac * theta.cos();
            let d = h * frac * theta.sin();
            let state = AlgebraState::new(h, l, d, omega, 0.0).unwrap();
            let (x2, p2) = scaled_variances(&state);
            prop_assert!((x2 + p2 - 2.0 * h / omega).abs() < 1e-12 * (h / omega).max(1.0));
            prop_assert!((p2 - x2 - 2.0 * l / omega).abs() < 1e-12 * (h / omega).max(1.0));
        }

        /// rho >= 1 along every physical trajectory.
        #[test]
        fn rho_at_least_one_along_trajectories(mu in -2.9..2.9f64) {
            let profile = FrequencyProfile::new(1.0, mu).unwrap();
            let record = trajectory_uniform(&ground(1.0), &profile, 6.0, 600).unwrap();
            for s in &record.samples {
                prop_assert!(s.rho >= 1.0 - 1e-12);
            }
        }
    }
}

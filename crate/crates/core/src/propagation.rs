//! Frequency profile, stretched-time maps, the exact closed-form propagator
//! of the rescaled moment vector, and an RK4 integrator of the physical-time
//! equations of motion for cross-validation.
//!
//! Holding `mu = (dw/dt)/w^2` constant gives `w(t) = w0 / (1 - mu w0 t)`,
//! divergent at `t = 1/(mu w0)` for `mu > 0`. In the stretched coordinate
//! `tau = (1/mu) ln(w/w0)` (with `dtau = w dt`) the rescaled vector
//! `u = (H, L, D)/w` evolves autonomously, `du/dtau = M u`, so the
//! propagator over `dtau` is `exp(M dtau)`. Because `M` satisfies
//! `M^3 = -(4 - mu^2) M`, the exponential reduces to
//! `I + f1 M + f2 M^2` with two scalar coefficients; these switch between
//! trigonometric (`|mu| < 2`), polynomial (`|mu| = 2`, where `M^3 = 0`) and
//! hyperbolic (`|mu| > 2`) behavior.

use serde::Serialize;

use crate::algebra::AlgebraState;
use crate::error::ensure_finite;
use crate::mat3::{self, Mat3, Vec3};
use crate::observables;
use crate::{Error, Result};

/// Default number of RK4 steps per fastest oscillation period (or per 2 pi
/// beyond the exceptional point).
///
/// The Casimir invariant is a difference of squares, so its relative drift
/// amplifies the integrator's component error by `sigma_w^2 / C` — a factor
/// of several hundred over a 10^3 compression in the growth regimes. 4096
/// steps per period keeps the drift under 1e-10 everywhere in |mu| <= 3;
/// 512 would leave ~1e-7 at mu = 2.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 4096;

/// Below this value of `|(4 - mu^2) dtau^2|` the propagator coefficients are
/// evaluated by their 6-term Taylor series; the series variable is small
/// enough there that the relative error stays under 1e-12, and it avoids
/// the `1 - cos` cancellation near the branch point.
pub const SERIES_SWITCH: f64 = 1e-2;

/// Trap frequency ramp at constant adiabatic parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyProfile {
    omega0: f64,
    mu: f64,
    t_max: f64,
}

impl FrequencyProfile {
    pub fn new(omega0: f64, mu: f64) -> Result<Self> {
        ensure_finite(omega0, "omega0")?;
        ensure_finite(mu, "mu")?;
        if omega0 <= 0.0 {
            return Err(Error::domain(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        let t_max = if mu > 0.0 {
            1.0 / (mu * omega0)
        } else {
            f64::INFINITY
        };
        Ok(Self { omega0, mu, t_max })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Physical time at which the frequency diverges (`+inf` for `mu <= 0`).
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn check_t(&self, t: f64) -> Result<()> {
        ensure_finite(t, "t")?;
        if t < 0.0 {
            return Err(Error::domain(format!("t must be non-negative, got {t}")));
        }
        if t >= self.t_max {
            return Err(Error::domain(format!(
                "frequency divergence reached: t = {t} is not below t_max = {}",
                self.t_max
            )));
        }
        Ok(())
    }

    /// `w(t) = w0 / (1 - mu w0 t)`.
    pub fn omega_at(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.omega0 / (1.0 - self.mu * self.omega0 * t))
    }

    /// Stretched time `tau(t) = (1/mu) ln(w(t)/w0)`, or `w0 t` for `mu = 0`.
    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        if self.mu == 0.0 {
            Ok(self.omega0 * t)
        } else {
            // ln(w/w0)/mu = -ln(1 - mu w0 t)/mu; ln_1p keeps precision for
            // small ramps.
            Ok(-(-self.mu * self.omega0 * t).ln_1p() / self.mu)
        }
    }

    /// Inverse of [`tau_of_t`](Self::tau_of_t).
    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        ensure_finite(tau, "tau")?;
        if tau < 0.0 {
            return Err(Error::domain(format!(
                "tau must be non-negative, got {tau}"
            )));
        }
        if self.mu == 0.0 {
            Ok(tau / self.omega0)
        } else {
            // (1 - e^{-mu tau}) / (mu w0); exp_m1 keeps precision near 0.
            Ok(-(-self.mu * tau).exp_m1() / (self.mu * self.omega0))
        }
    }

    /// `w` as a function of stretched time: `w0 e^{mu tau}`.
    pub fn omega_at_tau(&self, tau: f64) -> f64 {
        self.omega0 * (self.mu * tau).exp()
    }

    /// Compression factor at stretched time `tau`: `w(t)/w(0)` for a closing
    /// trap (`mu > 0`), `w(0)/w(t)` for an opening one, i.e. `e^{|mu| tau}`.
    pub fn compression_at_tau(&self, tau: f64) -> f64 {
        (self.mu.abs() * tau).exp()
    }

    /// Stretched time at which the compression factor reaches `c`.
    pub fn tau_of_compression(&self, c: f64) -> Result<f64> {
        ensure_finite(c, "compression factor")?;
        if c < 1.0 {
            return Err(Error::domain(format!(
                "compression factor must be >= 1, got {c}"
            )));
        }
        if self.mu == 0.0 {
            return Err(Error::domain(
                "compression factor is identically 1 for a constant trap".to_string(),
            ));
        }
        Ok(c.ln() / self.mu.abs())
    }
}

/// `sin(sqrt(x))/sqrt(x)`, analytically continued to `sinh` for `x < 0`.
pub(crate) fn sin_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        // 1 - x/3! + x^2/5! - x^3/7! + x^4/9! - x^5/11!
        let mut sum = 0.0;
        let coeffs = [
            1.0,
            -1.0 / 6.0,
            1.0 / 120.0,
            -1.0 / 5040.0,
            1.0 / 362_880.0,
            -1.0 / 39_916_800.0,
        ];
        for &c in coeffs.iter().rev() {
            sum = sum * x + c;
        }
        sum
    } else if x > 0.0 {
        let r = x.sqrt();
        r.sin() / r
    } else {
        let r = (-x).sqrt();
        r.sinh() / r
    }
}

/// `(1 - cos(sqrt(x)))/x`, analytically continued to `(cosh - 1)` for
/// `x < 0`.
pub(crate) fn versine_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        // 1/2! - x/4! + x^2/6! - x^3/8! + x^4/10! - x^5/12!
        let mut sum = 0.0;
        let coeffs = [
            0.5,
            -1.0 / 24.0,
            1.0 / 720.0,
            -1.0 / 40_320.0,
            1.0 / 3_628_800.0,
            -1.0 / 479_001_600.0,
        ];
        for &c in coeffs.iter().rev() {
            sum = sum * x + c;
        }
        sum
    } else if x > 0.0 {
        (1.0 - x.sqrt().cos()) / x
    } else {
        ((-x).sqrt().cosh() - 1.0) / -x
    }
}

/// `exp(M dtau)` for the traceless generator at adiabatic parameter `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    entries: Mat3,
    mu: f64,
    dtau: f64,
}

impl PropagatorMatrix {
    pub fn entries(&self) -> &Mat3 {
        &self.entries
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn apply(&self, u: &Vec3) -> Vec3 {
        mat3::mat_vec(&self.entries, u)
    }
}

/// Closed-form `exp(M dtau) = I + f1 M + f2 M^2` via the cubic identity
/// `M^3 = -(4 - mu^2) M`; exact polynomial at `|mu| = 2` where `M^3 = 0`.
pub fn exact_propagator(mu: f64, dtau: f64) -> Result<PropagatorMatrix> {
    ensure_finite(mu, "mu")?;
    ensure_finite(dtau, "dtau")?;
    let m = crate::algebra::build_generator(mu)?;
    let s = 4.0 - mu * mu;
    let x = s * dtau * dtau;
    let f1 = dtau * sin_ratio(x);
    let f2 = dtau * dtau * versine_ratio(x);
    let m2 = mat3::mat_mul(m.entries(), m.entries());
    let entries = mat3::add_scaled(&mat3::add_scaled(&mat3::IDENTITY, f1, m.entries()), f2, &m2);
    Ok(PropagatorMatrix { entries, mu, dtau })
}

/// Applies the exact propagator to a frequency-rescaled moment vector.
pub fn propagate_scaled(state_scaled: &Vec3, mu: f64, dtau: f64) -> Result<Vec3> {
    for &x in state_scaled {
        ensure_finite(x, "scaled state component")?;
    }
    Ok(exact_propagator(mu, dtau)?.apply(state_scaled))
}

/// Evolves a moment state to `t_target` with the exact propagator:
/// rescale by `1/w`, propagate over `dtau`, scale back by `w(t_target)`.
pub fn evolve_state(
    state: &AlgebraState,
    profile: &FrequencyProfile,
    t_target: f64,
) -> Result<AlgebraState> {
    if t_target < state.t() {
        return Err(Error::domain(format!(
            "t_target = {t_target} precedes the state time {}",
            state.t()
        )));
    }
    let omega_now = profile.omega_at(state.t())?;
    if (state.omega() - omega_now).abs() > 1e-9 * omega_now {
        return Err(Error::domain(format!(
            "state frequency {} does not match the profile value {omega_now} at t = {}",
            state.omega(),
            state.t()
        )));
    }
    let dtau = profile.tau_of_t(t_target)? - profile.tau_of_t(state.t())?;
    let u = state.scaled_vector();
    let propagated = propagate_scaled(&u, profile.mu(), dtau)?;
    let omega_new = profile.omega_at(t_target)?;
    AlgebraState::new(
        omega_new * propagated[0],
        omega_new * propagated[1],
        omega_new * propagated[2],
        omega_new,
        t_target,
    )
}

/// One row of a trajectory: the moment state plus the derived Wigner-ellipse
/// observables at that instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub tau: f64,
    pub omega: f64,
    pub h: f64,
    pub l: f64,
    pub d: f64,
    pub sigma_w: f64,
    pub sigma_n: f64,
    pub rho: f64,
    pub x2_scaled: f64,
    pub p2_scaled: f64,
}

impl TrajectorySample {
    /// `casimir0` is the conserved Casimir of the trajectory's initial
    /// state. The narrow axis is computed from it as `sqrt(C0)/sigma_w`:
    /// the direct difference `(h - sqrt(l^2+d^2))/w` cancels catastrophically
    /// once the wide axis dwarfs the conserved product (strong ramps beyond
    /// the exceptional point), while the product form stays accurate.
    fn build(t: f64, tau: f64, omega: f64, y: &Vec3, casimir0: f64) -> Result<Self> {
        let [h, l, d] = *y;
        let radius = (l * l + d * d).sqrt() / omega;
        let wide_sq = h / omega + radius;
        if wide_sq <= 0.0 || casimir0 <= 0.0 {
            return Err(Error::domain(
                "trajectory sample has a non-physical Wigner ellipse".to_string(),
            ));
        }
        let sigma_w = wide_sq.sqrt();
        let root_c = casimir0.sqrt();
        Ok(Self {
            t,
            tau,
            omega,
            h,
            l,
            d,
            sigma_w,
            sigma_n: root_c / sigma_w,
            rho: wide_sq / root_c,
            x2_scaled: (h - l) / omega,
            p2_scaled: (h + l) / omega,
        })
    }
}

/// Time series of moment states along one ramp.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
    pub profile: FrequencyProfile,
    pub initial: AlgebraState,
}

impl TrajectoryRecord {
    /// Largest relative deviation of the Casimir invariant from its initial
    /// value across all samples.
    pub fn casimir_drift(&self) -> f64 {
        let c0 = self.initial.casimir();
        self.samples
            .iter()
            .map(|s| {
                let c = (s.h * s.h - s.l * s.l - s.d * s.d) / (s.omega * s.omega);
                ((c - c0) / c0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_initial_state(initial: &AlgebraState, profile: &FrequencyProfile) -> Result<()> {
    if initial.t() != 0.0 {
        return Err(Error::precondition(
            "trajectory initial state must be taken at t = 0".to_string(),
        ));
    }
    if (initial.omega() - profile.omega0()).abs() > 1e-9 * profile.omega0() {
        return Err(Error::domain(format!(
            "initial state frequency {} does not match omega0 = {}",
            initial.omega(),
            profile.omega0()
        )));
    }
    Ok(())
}

/// Exact-propagator trajectory sampled on an increasing stretched-time grid.
///
/// Every sample is propagated directly from the initial vector, so no
/// integration error accumulates along the record.
pub fn trajectory_tau_grid(
    initial: &AlgebraState,
    profile: &FrequencyProfile,
    tau_grid: &[f64],
) -> Result<TrajectoryRecord> {
    check_initial_state(initial, profile)?;
    if tau_grid.is_empty() {
        return Err(Error::precondition(
            "tau grid must be non-empty".to_string(),
        ));
    }
    for pair in tau_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::precondition(
                "tau grid must be strictly increasing".to_string(),
            ));
        }
    }
    let u0 = initial.scaled_vector();
    let casimir0 = initial.casimir();
    let mut samples = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        if tau < 0.0 {
            return Err(Error::domain(format!(
                "tau must be non-negative, got {tau}"
            )));
        }
        let u = exact_propagator(profile.mu(), tau)?.apply(&u0);
        let omega = profile.omega_at_tau(tau);
        let t = profile.t_of_tau(tau)?;
        let y = [omega * u[0], omega * u[1], omega * u[2]];
        samples.push(TrajectorySample::build(t, tau, omega, &y, casimir0)?);
    }
    Ok(TrajectoryRecord {
        samples,
        profile: *profile,
        initial: *initial,
    })
}

/// Exact-propagator trajectory on a uniform stretched-time grid from 0 to
/// `tau_end` inclusive.
pub fn trajectory_uniform(
    initial: &AlgebraState,
    profile: &FrequencyProfile,
    tau_end: f64,
    n_samples: usize,
) -> Result<TrajectoryRecord> {
    ensure_finite(tau_end, "tau_end")?;
    if tau_end <= 0.0 || n_samples < 2 {
        return Err(Error::precondition(
            "trajectory needs tau_end > 0 and at least two samples".to_string(),
        ));
    }
    let grid: Vec<f64> = (0..n_samples)
        .map(|k| tau_end * k as f64 / (n_samples - 1) as f64)
        .collect();
    trajectory_tau_grid(initial, profile, &grid)
}

/// Default RK4 step in stretched time: the fastest oscillation period (or
/// 2 pi beyond the exceptional point) divided by
/// [`DEFAULT_STEPS_PER_PERIOD`].
pub fn default_dtau_step(mu: f64) -> f64 {
    let period = observables::analytic_period_tau(mu);
    period.min(std::f64::consts::TAU) / DEFAULT_STEPS_PER_PERIOD as f64
}

/// Physical-time equations of motion for the moment vector:
/// `dH/dt = w mu (H - L)`, `dL/dt = -2 w D - w mu (H - L)`,
/// `dD/dt = 2 w L + w mu D`.
fn moment_rhs(omega: f64, mu: f64, y: &Vec3) -> Vec3 {
    let drive = omega * mu * (y[0] - y[1]);
    [
        drive,
        -2.0 * omega * y[2] - drive,
        2.0 * omega * y[1] + omega * mu * y[2],
    ]
}

fn rk4_step(
    omega_of: &dyn Fn(f64) -> Result<(f64, f64)>,
    t: f64,
    h: f64,
    y: &Vec3,
) -> Result<Vec3> {
    let (w1, mu1) = omega_of(t)?;
    let k1 = moment_rhs(w1, mu1, y);
    let half = 0.5 * h;
    let (w2, mu2) = omega_of(t + half)?;
    let y2 = [
        y[0] + half * k1[0],
        y[1] + half * k1[1],
        y[2] + half * k1[2],
    ];
    let k2 = moment_rhs(w2, mu2, &y2);
    let y3 = [
        y[0] + half * k2[0],
        y[1] + half * k2[1],
        y[2] + half * k2[2],
    ];
    let k3 = moment_rhs(w2, mu2, &y3);
    let (w4, mu4) = omega_of(t + h)?;
    let y4 = [y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]];
    let k4 = moment_rhs(w4, mu4, &y4);
    Ok([
        y[0] + h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0,
        y[1] + h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0,
        y[2] + h * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0,
    ])
}

/// RK4 integration of the physical-time equations of motion along the
/// profile, with the default step control.
pub fn rk4_evolve(
    initial: &AlgebraState,
    profile: &FrequencyProfile,
    t_grid: &[f64],
) -> Result<TrajectoryRecord> {
    rk4_evolve_with_step(initial, profile, t_grid, default_dtau_step(profile.mu()))
}

/// RK4 integration with an explicit stretched-time step. Substeps between
/// grid points are uniform in `tau` and mapped back to physical time, so the
/// integrator keeps resolving the dynamics as the trap stiffens.
pub fn rk4_evolve_with_step(
    initial: &AlgebraState,
    profile: &FrequencyProfile,
    t_grid: &[f64],
    dtau_step: f64,
) -> Result<TrajectoryRecord> {
    check_initial_state(initial, profile)?;
    ensure_finite(dtau_step, "dtau_step")?;
    if dtau_step <= 0.0 {
        return Err(Error::precondition(
            "dtau_step must be positive".to_string(),
        ));
    }
    if t_grid.is_empty() {
        return Err(Error::precondition("t grid must be non-empty".to_string()));
    }
    for pair in t_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::precondition(
                "t grid must be strictly increasing".to_string(),
            ));
        }
    }
    if t_grid[0] < 0.0 {
        return Err(Error::domain("t grid must start at or after 0".to_string()));
    }
    if *t_grid.last().unwrap() >= profile.t_max() {
        return Err(Error::domain(format!(
            "t grid crosses the divergence time t_max = {}",
            profile.t_max()
        )));
    }

    let omega_of = |t: f64| -> Result<(f64, f64)> { Ok((profile.omega_at(t)?, profile.mu())) };

    let casimir0 = initial.casimir();
    let mut y = [initial.h(), initial.l(), initial.d()];
    let mut tau_now = 0.0;
    let mut t_now = 0.0;
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t_target in t_grid {
        let tau_target = profile.tau_of_t(t_target)?;
        if tau_target > tau_now {
            let n_sub = ((tau_target - tau_now) / dtau_step).ceil().max(1.0) as usize;
            for j in 0..n_sub {
                let tau_next = tau_now + (tau_target - tau_now) * (j + 1) as f64 / n_sub as f64;
                let t_next = profile.t_of_tau(tau_next)?;
                y = rk4_step(&omega_of, t_now, t_next - t_now, &y)?;
                t_now = t_next;
            }
            tau_now = tau_target;
            t_now = t_target;
        }
        let omega = profile.omega_at(t_target)?;
        samples.push(TrajectorySample::build(
            t_target, tau_target, omega, &y, casimir0,
        )?);
    }
    Ok(TrajectoryRecord {
        samples,
        profile: *profile,
        initial: *initial,
    })
}

/// Tabulated frequency ramp for the RK4 validation path. The frequency is
/// interpolated linearly; the local adiabatic parameter comes from the
/// segment slope.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaTable {
    ts: Vec<f64>,
    omegas: Vec<f64>,
}

impl OmegaTable {
    pub fn new(ts: Vec<f64>, omegas: Vec<f64>) -> Result<Self> {
        if ts.len() != omegas.len() || ts.len() < 2 {
            return Err(Error::precondition(
                "omega table needs at least two matching (t, omega) pairs".to_string(),
            ));
        }
        for pair in ts.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::precondition(
                    "omega table times must increase".to_string(),
                ));
            }
        }
        for &w in &omegas {
            ensure_finite(w, "tabulated omega")?;
            if w <= 0.0 {
                return Err(Error::domain(
                    "tabulated omega must be positive".to_string(),
                ));
            }
        }
        Ok(Self { ts, omegas })
    }

    /// Linear interpolation of `(omega, mu)` at time `t`.
    pub fn lookup(&self, t: f64) -> Result<(f64, f64)> {
        if t < self.ts[0] || t > *self.ts.last().unwrap() {
            return Err(Error::domain(format!(
                "t = {t} outside the tabulated range"
            )));
        }
        let idx = match self
            .ts
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ts.len() - 2),
        };
        let (t0, t1) = (self.ts[idx], self.ts[idx + 1]);
        let (w0, w1) = (self.omegas[idx], self.omegas[idx + 1]);
        let slope = (w1 - w0) / (t1 - t0);
        let w = w0 + slope * (t - t0);
        Ok((w, slope / (w * w)))
    }
}

/// RK4 along a tabulated ramp; each grid interval is split into
/// `substeps_per_interval` uniform physical-time steps. The stretched-time
/// column is accumulated by the trapezoid rule.
pub fn rk4_evolve_tabulated(
    initial: &AlgebraState,
    table: &OmegaTable,
    t_grid: &[f64],
    substeps_per_interval: usize,
) -> Result<Vec<TrajectorySample>> {
    if t_grid.len() < 2 || substeps_per_interval == 0 {
        return Err(Error::precondition(
            "tabulated RK4 needs at least two grid times and one substep".to_string(),
        ));
    }
    let omega_of = |t: f64| table.lookup(t);
    let casimir0 = initial.casimir();
    let mut y = [initial.h(), initial.l(), initial.d()];
    let mut tau = 0.0;
    let mut samples = Vec::with_capacity(t_grid.len());
    let (w_first, _) = table.lookup(t_grid[0])?;
    samples.push(TrajectorySample::build(
        t_grid[0], tau, w_first, &y, casimir0,
    )?);
    for pair in t_grid.windows(2) {
        let h = (pair[1] - pair[0]) / substeps_per_interval as f64;
        for j in 0..substeps_per_interval {
            let t0 = pair[0] + j as f64 * h;
            let (w0, _) = table.lookup(t0)?;
            let (w1, _) = table.lookup(t0 + h)?;
            y = rk4_step(&omega_of, t0, h, &y)?;
            tau += 0.5 * h * (w0 + w1);
        }
        let (omega, _) = table.lookup(pair[1])?;
        samples.push(TrajectorySample::build(pair[1], tau, omega, &y, casimir0)?);
    }
    Ok(samples)
}

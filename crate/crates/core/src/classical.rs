//! Classical counterpart of the moment dynamics.
//!
//! For a quadratic Hamiltonian the quantum evolution of second moments is
//! identical to the classical one with the initial conditions drawn from the
//! Wigner distribution. In stretched time the trajectory of a single sample
//! obeys the damped-oscillator equation `x'' + mu x' + x = 0`, whose
//! eigenfrequencies `(i mu +/- sqrt(4 - mu^2)) / 2` collide exactly where the
//! moment generator has its triple degeneracy, `|mu| = 2`. Sampling is
//! seeded and the per-sample evolution is closed form, so ensembles provide
//! an integrator-free cross-check of the exact propagator.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::algebra::AlgebraState;
use crate::propagation::{sin_ratio, versine_ratio, FrequencyProfile};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// A single classical phase-space sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub p: f64,
}

/// Seeded Gaussian ensemble representing the Wigner distribution of a
/// moment state.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceEnsemble {
    points: Vec<PhaseSpacePoint>,
    seed: u64,
    source_state: AlgebraState,
}

impl PhaseSpaceEnsemble {
    pub fn points(&self) -> &[PhaseSpacePoint] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source_state(&self) -> &AlgebraState {
        &self.source_state
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sample second moments `(<x^2>, <p^2>, <xp>_sym)`.
    pub fn sample_moments(&self) -> (f64, f64, f64) {
        let n = self.points.len() as f64;
        let mut xx = 0.0;
        let mut pp = 0.0;
        let mut xp = 0.0;
        for pt in &self.points {
            xx += pt.x * pt.x;
            pp += pt.p * pt.p;
            xp += pt.x * pt.p;
        }
        (xx / n, pp / n, xp / n)
    }
}

/// Uniform double in (0, 1] from the top 53 bits of a ChaCha word.
fn next_unit_open(rng: &mut ChaCha12Rng) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
}

/// Draws `n` phase-space samples from the zero-mean Gaussian whose
/// covariance reproduces the state's second moments. Deterministic for a
/// fixed seed: ChaCha12 stream plus a Box-Muller transform.
pub fn sample_wigner(
    state: &AlgebraState,
    n: usize,
    seed: u64,
    consts: &PhysicalConstants,
) -> Result<PhaseSpaceEnsemble> {
    if n < 2 {
        return Err(Error::precondition(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if state.casimir() < consts.casimir_floor() - 1e-12 {
        return Err(Error::domain(format!(
            "state Casimir {} is below the uncertainty floor {}; covariance not physical",
            state.casimir(),
            consts.casimir_floor()
        )));
    }
    let (xx, pp, xp) = state.covariance(consts);
    // Cholesky factor of [[xx, xp], [xp, pp]].
    let a = xx.sqrt();
    let b = xp / a;
    let c_sq = pp - b * b;
    let positive_definite = a > 0.0 && c_sq > 0.0;
    if !positive_definite {
        return Err(Error::domain(
            "state covariance is not positive definite".to_string(),
        ));
    }
    let c = c_sq.sqrt();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let u1 = next_unit_open(&mut rng);
        let u2 = next_unit_open(&mut rng);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        let z1 = radius * angle.cos();
        let z2 = radius * angle.sin();
        points.push(PhaseSpacePoint {
            x: a * z1,
            p: b * z1 + c * z2,
        });
    }
    Ok(PhaseSpaceEnsemble {
        points,
        seed,
        source_state: *state,
    })
}

/// Eigenfrequencies `(i mu +/- sqrt(4 - mu^2)) / 2` of the stretched-time
/// damped oscillator; a double root at `|mu| = 2`, both purely imaginary
/// beyond it.
pub fn classical_eigenfrequencies(mu: f64) -> (Complex64, Complex64) {
    let s = 4.0 - mu * mu;
    let root = if s >= 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    };
    let i_mu = Complex64::new(0.0, mu);
    ((i_mu + root) / 2.0, (i_mu - root) / 2.0)
}

/// Closed-form solution of `x'' + mu x' + x = 0` in stretched time, valid in
/// the under-, critically and over-damped regimes. Returns `(x, dx/dtau)`.
///
/// The initial stretched-time velocity is the physical momentum divided by
/// `m w(0)`.
pub fn exact_classical_solution(mu: f64, x0: f64, dxdtau0: f64, tau: f64) -> (f64, f64) {
    // x = e^{-mu tau / 2} (x0 C + (v0 + mu x0 / 2) S) with
    // C = cos(wd tau), S = sin(wd tau)/wd, wd^2 = 1 - mu^2/4; the kernels
    // continue analytically through wd = 0 (critical damping) and wd^2 < 0.
    let arg = (1.0 - 0.25 * mu * mu) * tau * tau;
    let s_kernel = tau * sin_ratio(arg);
    let c_kernel = 1.0 - arg * versine_ratio(arg);
    let b = dxdtau0 + 0.5 * mu * x0;
    let envelope = (-0.5 * mu * tau).exp();
    let x = envelope * (x0 * c_kernel + b * s_kernel);
    // C' = -wd^2 S, S' = C.
    let wd_sq = 1.0 - 0.25 * mu * mu;
    let v = envelope
        * (x0 * (-0.5 * mu * c_kernel - wd_sq * s_kernel) + b * (c_kernel - 0.5 * mu * s_kernel));
    (x, v)
}

/// Evolves every sample with the closed-form solution and converts the
/// ensemble moments back to `(h, l, d)` at each grid time.
pub fn evolve_ensemble_moments(
    ensemble: &PhaseSpaceEnsemble,
    profile: &FrequencyProfile,
    t_grid: &[f64],
    consts: &PhysicalConstants,
) -> Result<Vec<AlgebraState>> {
    let omega0 = profile.omega0();
    let source = ensemble.source_state();
    if (source.omega() - omega0).abs() > 1e-9 * omega0 {
        return Err(Error::domain(format!(
            "ensemble was sampled at omega = {} but the profile starts at {omega0}",
            source.omega()
        )));
    }
    let m = consts.mass;
    let n = ensemble.len() as f64;
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let tau = profile.tau_of_t(t)?;
        let omega = profile.omega_at(t)?;
        let mut xx = 0.0;
        let mut pp = 0.0;
        let mut xp = 0.0;
        for pt in ensemble.points() {
            let v0 = pt.p / (m * omega0);
            let (x, dxdtau) = exact_classical_solution(profile.mu(), pt.x, v0, tau);
            let p = m * omega * dxdtau;
            xx += x * x;
            pp += p * p;
            xp += x * p;
        }
        states.push(AlgebraState::from_covariance(
            xx / n,
            pp / n,
            xp / n,
            omega,
            t,
            consts,
        )?);
    }
    Ok(states)
}

/// Standard errors of the sample estimates of `(h, l, d)` for an ensemble of
/// size `n` drawn from the Gaussian state `state`, via the Gaussian
/// fourth-moment (Isserlis) identities:
/// `Var(x^2) = 2 Sxx^2`, `Cov(x^2, p^2) = 2 Sxp^2`,
/// `Var(xp) = Sxx Spp + Sxp^2`.
pub fn moment_standard_errors(
    state: &AlgebraState,
    n: usize,
    consts: &PhysicalConstants,
) -> (f64, f64, f64) {
    let (xx, pp, xp) = state.covariance(consts);
    let m = consts.mass;
    let w = state.omega();
    let alpha = 0.5 / m; // p^2 weight in h and l
    let beta = 0.5 * m * w * w; // x^2 weight
    let var_x2 = 2.0 * xx * xx;
    let var_p2 = 2.0 * pp * pp;
    let cov_x2p2 = 2.0 * xp * xp;
    let var_h = alpha * alpha * var_p2 + beta * beta * var_x2 + 2.0 * alpha * beta * cov_x2p2;
    let var_l = alpha * alpha * var_p2 + beta * beta * var_x2 - 2.0 * alpha * beta * cov_x2p2;
    let var_d = w * w * (xx * pp + xp * xp);
    let n = n as f64;
    ((var_h / n).sqrt(), (var_l / n).sqrt(), (var_d / n).sqrt())
}

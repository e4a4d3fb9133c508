//! Moment state, evolution generator, closed-form spectrum, and
//! exceptional-point diagnostics.
//!
//! The trap Hamiltonian `H = p^2/2m + m w^2(t) x^2 / 2` closes an su(1,1)
//! algebra together with the Lagrangian `L = H - m w^2 x^2` and the scaled
//! anticommutator `D = w (xp + px) / 2`. With the adiabatic parameter
//! `mu = (dw/dt)/w^2` held constant and time stretched to `tau`
//! (`dtau = w dt`), the rescaled expectation vector `(H, L, D)/w` obeys
//! `du/dtau = M u` with the real traceless generator
//!
//! ```text
//!         |  0   -mu   0 |
//!     M = | -mu   0   -2 |
//!         |  0    2    0 |
//! ```
//!
//! The complex spectrum reported here is that of `i M`, i.e. `{0, +/- w}`
//! with `w = sqrt(4 - mu^2)`; all three eigenvalues and eigenvectors
//! coalesce at `|mu| = 2`, where `M` becomes nilpotent of index 3.

use num_complex::Complex64;

use crate::error::ensure_finite;
use crate::mat3::{self, Mat3, Vec3};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

/// Tolerance on `|4 - mu^2|` below which the spectrum is reported as
/// coalesced (exceptional point).
pub const EP_TOL: f64 = 1e-9;

/// Max-abs norm below which a power of the generator counts as zero when
/// probing nilpotency.
pub const NILPOTENCY_TOL: f64 = 1e-10;

/// Expectation values of (H, L, D) at trap frequency `omega` and time `t`.
///
/// Immutable after construction; the constructor enforces `omega > 0`,
/// `h > 0` and a positive Casimir `h^2 - l^2 - d^2 > 0`, which together
/// guarantee a positive-definite phase-space covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraState {
    h: f64,
    l: f64,
    d: f64,
    omega: f64,
    t: f64,
}

impl AlgebraState {
    pub fn new(h: f64, l: f64, d: f64, omega: f64, t: f64) -> Result<Self> {
        ensure_finite(h, "h")?;
        ensure_finite(l, "l")?;
        ensure_finite(d, "d")?;
        ensure_finite(omega, "omega")?;
        ensure_finite(t, "t")?;
        if omega <= 0.0 {
            return Err(Error::domain(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if t < 0.0 {
            return Err(Error::domain(format!("t must be non-negative, got {t}")));
        }
        if h <= 0.0 {
            return Err(Error::domain(format!("h must be positive, got {h}")));
        }
        if h * h - l * l - d * d <= 0.0 {
            return Err(Error::domain(format!(
                "state (h={h}, l={l}, d={d}) has non-positive Casimir"
            )));
        }
        Ok(Self { h, l, d, omega, t })
    }

    /// Ground state of the trap at frequency `omega`: `h = hbar omega / 2`.
    pub fn ground_state(omega: f64, consts: &PhysicalConstants) -> Result<Self> {
        Self::new(0.5 * consts.hbar * omega, 0.0, 0.0, omega, 0.0)
    }

    /// Thermal state with mean occupation `n_bar`:
    /// `h = hbar omega (n_bar + 1/2)`, `l = d = 0`.
    pub fn thermal_state(omega: f64, n_bar: f64, consts: &PhysicalConstants) -> Result<Self> {
        ensure_finite(n_bar, "n_bar")?;
        if n_bar < 0.0 {
            return Err(Error::domain(format!(
                "n_bar must be non-negative, got {n_bar}"
            )));
        }
        Self::new(consts.hbar * omega * (n_bar + 0.5), 0.0, 0.0, omega, 0.0)
    }

    /// Builds a state from phase-space second moments
    /// `xx = <x^2>`, `pp = <p^2>`, `xp = <xp + px>/2`.
    pub fn from_covariance(
        xx: f64,
        pp: f64,
        xp: f64,
        omega: f64,
        t: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        let m = consts.mass;
        let h = 0.5 * pp / m + 0.5 * m * omega * omega * xx;
        let l = 0.5 * pp / m - 0.5 * m * omega * omega * xx;
        let d = omega * xp;
        Self::new(h, l, d, omega, t)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The conserved combination `(h^2 - l^2 - d^2) / omega^2`, bounded
    /// below by `hbar^2/4` for physical states.
    pub fn casimir(&self) -> f64 {
        (self.h * self.h - self.l * self.l - self.d * self.d) / (self.omega * self.omega)
    }

    /// Moment vector divided by the instantaneous frequency; this is the
    /// vector the traceless generator propagates.
    pub fn scaled_vector(&self) -> Vec3 {
        [
            self.h / self.omega,
            self.l / self.omega,
            self.d / self.omega,
        ]
    }

    /// Phase-space second moments `(<x^2>, <p^2>, <xp>_sym)` obtained by
    /// inverting the definitions of H, L, D.
    pub fn covariance(&self, consts: &PhysicalConstants) -> (f64, f64, f64) {
        let m = consts.mass;
        let w = self.omega;
        let xx = (self.h - self.l) / (m * w * w);
        let pp = m * (self.h + self.l);
        let xp = self.d / w;
        (xx, pp, xp)
    }
}

/// `(h^2 - l^2 - d^2) / omega^2` of a state.
pub fn casimir(state: &AlgebraState) -> f64 {
    state.casimir()
}

/// The real traceless generator `M(mu)` of the rescaled moment dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix {
    entries: Mat3,
    mu: f64,
}

impl GeneratorMatrix {
    pub fn entries(&self) -> &Mat3 {
        &self.entries
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn trace(&self) -> f64 {
        mat3::trace(&self.entries)
    }

    /// Smallest k in {1, 2, 3} such that `max_abs(M^k) <= tol`, if any.
    pub fn nilpotency_index(&self, tol: f64) -> Option<u8> {
        let mut power = self.entries;
        for k in 1..=3u8 {
            if mat3::max_abs(&power) <= tol {
                return Some(k);
            }
            power = mat3::mat_mul(&power, &self.entries);
        }
        None
    }
}

/// Builds `M(mu)` with rows `(0, -mu, 0)`, `(-mu, 0, -2)`, `(0, 2, 0)`.
pub fn build_generator(mu: f64) -> Result<GeneratorMatrix> {
    ensure_finite(mu, "mu")?;
    Ok(GeneratorMatrix {
        entries: [[0.0, -mu, 0.0], [-mu, 0.0, -2.0], [0.0, 2.0, 0.0]],
        mu,
    })
}

/// Smallest k in {1, 2, 3} with `max_abs(M^k) <= tol`, or `None` if even the
/// cube exceeds the tolerance.
pub fn nilpotency_index(m: &GeneratorMatrix, tol: f64) -> Option<u8> {
    m.nilpotency_index(tol)
}

/// Closed-form spectrum of `i M(mu)` plus degeneracy diagnostics.
///
/// Eigenvalues are `{0, +w, -w}` with `w = sqrt(4 - mu^2)` (real for
/// `|mu| <= 2`, imaginary beyond). Eigenvectors are reported in their
/// unnormalized closed form: the zero mode is `(1, 0, -mu/2)`, the paired
/// modes `(mu, +/- i w, -2)/mu` (limit form `(0, +/- i, -1)` at `mu = 0`).
/// Left eigenvectors are eigenvectors of the transpose, paired by
/// eigenvalue; they follow from the sign symmetry `M^T = S M S` with
/// `S = diag(1, 1, -1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub mu: f64,
    /// Eigenvalues of `i M` ordered `(0, +w, -w)`.
    pub eigenvalues: [Complex64; 3],
    pub right_eigenvectors: [[Complex64; 3]; 3],
    pub left_eigenvectors: [[Complex64; 3]; 3],
    pub is_ep: bool,
    pub nilpotency_index: Option<u8>,
    /// Magnitude of the eigenvalue splitting `|w|`; zero exactly at the
    /// exceptional point.
    pub defect: f64,
}

impl SpectralData {
    /// Right eigenvectors scaled to unit Euclidean norm.
    pub fn right_unit(&self) -> [[Complex64; 3]; 3] {
        self.right_eigenvectors.map(normalize)
    }

    /// Left eigenvectors scaled to unit Euclidean norm.
    pub fn left_unit(&self) -> [[Complex64; 3]; 3] {
        self.left_eigenvectors.map(normalize)
    }
}

fn normalize(v: [Complex64; 3]) -> [Complex64; 3] {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        v
    } else {
        v.map(|z| z / norm)
    }
}

/// Analytic eigendecomposition of `i M(mu)`.
pub fn eigensystem(mu: f64) -> Result<SpectralData> {
    let generator = build_generator(mu)?;
    let s = 4.0 - mu * mu;
    let is_ep = s.abs() < EP_TOL;

    // w = sqrt(4 - mu^2) as a complex number; the splitting of the paired
    // eigenvalues.
    let w = if is_ep {
        Complex64::new(0.0, 0.0)
    } else if s > 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    };

    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let eigenvalues = [zero, w, -w];

    let v0 = [one, zero, Complex64::new(-0.5 * mu, 0.0)];
    let (v_plus, v_minus) = if is_ep {
        // All three eigenvectors coalesce onto the zero mode.
        (v0, v0)
    } else if mu == 0.0 {
        // The generic form divides by mu; its mu -> 0 limit is well defined
        // after rescaling.
        (
            [zero, Complex64::new(0.0, 1.0), -one],
            [zero, Complex64::new(0.0, -1.0), -one],
        )
    } else {
        let first = one;
        let iw_over_mu = Complex64::new(0.0, 1.0) * w / mu;
        let last = Complex64::new(-2.0 / mu, 0.0);
        ([first, iw_over_mu, last], [first, -iw_over_mu, last])
    };

    let right = [v0, v_plus, v_minus];
    // M^T = S M S with S = diag(1, 1, -1), so left vectors are the right
    // ones with the last component negated.
    let left = right.map(|v| [v[0], v[1], -v[2]]);

    Ok(SpectralData {
        mu,
        eigenvalues,
        right_eigenvectors: right,
        left_eigenvectors: left,
        is_ep,
        nilpotency_index: if is_ep {
            Some(3)
        } else {
            generator.nilpotency_index(NILPOTENCY_TOL)
        },
        defect: s.abs().sqrt(),
    })
}

/// Unconjugated left-right product of the eigenvector continuously connected
/// to the zero mode: `(1, 0, mu/2) . (1, 0, -mu/2) = 1 - mu^2/4`.
///
/// Vanishes exactly at `|mu| = 2`, where the surviving eigenvector is
/// self-orthogonal: right `(1, 0, -1)` against left `(1, 0, 1)`.
pub fn biorthogonal_product(mu: f64) -> Result<f64> {
    let spectral = eigensystem(mu)?;
    let v = spectral.right_eigenvectors[0];
    let u = spectral.left_eigenvectors[0];
    let product = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    Ok(product.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{evolve_state, FrequencyProfile};
    use proptest::prelude::*;

    #[test]
    fn generator_entries_at_mu_zero() {
        let m = build_generator(0.0).unwrap();
        assert_eq!(
            *m.entries(),
            [[0.0, 0.0, 0.0], [0.0, 0.0, -2.0], [0.0, 2.0, 0.0]]
        );
        assert_eq!(m.trace(), 0.0);
    }

    #[test]
    fn generator_entries_at_ep() {
        let m = build_generator(2.0).unwrap();
        assert_eq!(
            *m.entries(),
            [[0.0, -2.0, 0.0], [-2.0, 0.0, -2.0], [0.0, 2.0, 0.0]]
        );
    }

    #[test]
    fn generator_entries_at_mu_one() {
        let m = build_generator(1.0).unwrap();
        assert_eq!(
            *m.entries(),
            [[0.0, -1.0, 0.0], [-1.0, 0.0, -2.0], [0.0, 2.0, 0.0]]
        );
    }

    #[test]
    fn generator_rejects_non_finite() {
        assert!(build_generator(f64::NAN).is_err());
        assert!(build_generator(f64::INFINITY).is_err());
    }

    #[test]
    fn eigenvalues_at_mu_zero() {
        let s = eigensystem(0.0).unwrap();
        assert_eq!(s.eigenvalues[0], Complex64::new(0.0, 0.0));
        assert_eq!(s.eigenvalues[1], Complex64::new(2.0, 0.0));
        assert_eq!(s.eigenvalues[2], Complex64::new(-2.0, 0.0));
        assert!(!s.is_ep);
    }

    #[test]
    fn eigenvalues_at_mu_one() {
        let s = eigensystem(1.0).unwrap();
        assert!((s.eigenvalues[1].re - 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((s.eigenvalues[2].re + 3.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.eigenvalues[1].im, 0.0);
    }

    #[test]
    fn triple_coalescence_at_ep() {
        for mu in [2.0, -2.0] {
            let s = eigensystem(mu).unwrap();
            assert!(s.is_ep, "mu={mu} must be flagged as an exceptional point");
            for e in s.eigenvalues {
                assert_eq!(e, Complex64::new(0.0, 0.0));
            }
            assert_eq!(s.nilpotency_index, Some(3));
            assert_eq!(s.defect, 0.0);
            // Right and left vectors of the surviving mode.
            let v = s.right_eigenvectors[0];
            let u = s.left_eigenvectors[0];
            assert_eq!((v[0].re, v[1].re, v[2].re), (1.0, 0.0, -mu / 2.0));
            assert_eq!((u[0].re, u[1].re, u[2].re), (1.0, 0.0, mu / 2.0));
        }
    }

    #[test]
    fn imaginary_spectrum_beyond_ep() {
        let s = eigensystem(3.0).unwrap();
        let k = 5.0_f64.sqrt();
        assert_eq!(s.eigenvalues[1].re, 0.0);
        assert!((s.eigenvalues[1].im - k).abs() < 1e-15);
        assert!((s.eigenvalues[2].im + k).abs() < 1e-15);
    }

    #[test]
    fn unit_copies_preserve_direction() {
        let s = eigensystem(1.3).unwrap();
        for (raw, unit) in s.right_eigenvectors.iter().zip(s.right_unit().iter()) {
            let norm = unit.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14, "unit copy has norm {norm}");
            let raw_norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..3 {
                assert!((raw[i] / raw_norm - unit[i]).norm() < 1e-14);
            }
        }
        for unit in s.left_unit() {
            let norm = unit.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    /// Residual of M v = lambda v, with lambda the generator eigenvalue
    /// (eigenvalue of i M divided by i).
    fn right_residual(mu: f64) -> f64 {
        let m = build_generator(mu).unwrap();
        let s = eigensystem(mu).unwrap();
        let mut worst = 0.0_f64;
        for (e, v) in s.eigenvalues.iter().zip(s.right_eigenvectors.iter()) {
            let lambda = -Complex64::new(0.0, 1.0) * e;
            for (row, &vi) in m.entries().iter().zip(v.iter()) {
                let mv: Complex64 = row.iter().zip(v.iter()).map(|(&a, &b)| a * b).sum();
                worst = worst.max((mv - lambda * vi).norm());
            }
        }
        worst
    }

    fn left_residual(mu: f64) -> f64 {
        let m = build_generator(mu).unwrap();
        let mt = mat3::transpose(m.entries());
        let s = eigensystem(mu).unwrap();
        let mut worst = 0.0_f64;
        for (e, u) in s.eigenvalues.iter().zip(s.left_eigenvectors.iter()) {
            let lambda = -Complex64::new(0.0, 1.0) * e;
            for i in 0..3 {
                let mut mv = Complex64::new(0.0, 0.0);
                for j in 0..3 {
                    mv += mt[i][j] * u[j];
                }
                worst = worst.max((mv - lambda * u[i]).norm());
            }
        }
        worst
    }

    #[test]
    fn closed_form_eigenvectors_satisfy_eigen_equations() {
        for mu in [-3.0, -2.0, -1.5, -0.5, 0.0, 0.25, 1.0, 1.999, 2.0, 2.5, 3.0] {
            assert!(
                right_residual(mu) < 1e-12,
                "right residual too large at mu={mu}: {}",
                right_residual(mu)
            );
            assert!(
                left_residual(mu) < 1e-12,
                "left residual too large at mu={mu}: {}",
                left_residual(mu)
            );
        }
    }

    #[test]
    fn nilpotency_index_three_exactly_at_ep() {
        for mu in [2.0, -2.0] {
            let m = build_generator(mu).unwrap();
            assert_eq!(m.nilpotency_index(NILPOTENCY_TOL), Some(3));
            // The cube is the zero matrix in exact integer arithmetic.
            let m2 = mat3::mat_mul(m.entries(), m.entries());
            let m3 = mat3::mat_mul(&m2, m.entries());
            assert_eq!(mat3::max_abs(&m3), 0.0);
            assert!(mat3::max_abs(&m2) > 0.0);
        }
    }

    #[test]
    fn no_nilpotency_away_from_ep() {
        // Oracle: by Cayley-Hamilton the cube is -(4 - mu^2) M, nonzero for
        // mu = 1, so no power up to 3 vanishes.
        let m = build_generator(1.0).unwrap();
        assert_eq!(m.nilpotency_index(NILPOTENCY_TOL), None);
        let m2 = mat3::mat_mul(m.entries(), m.entries());
        let m3 = mat3::mat_mul(&m2, m.entries());
        let expected = mat3::add_scaled(&[[0.0; 3]; 3], -3.0, m.entries());
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (m3[i][j] - expected[i][j]).abs() < 1e-14,
                    "cube mismatch at ({i},{j})"
                );
            }
        }
    }

    /// Test-only kernel solve: one vector spanning the null space of a
    /// (rank-2) 3x3 matrix via cross products of its rows.
    fn null_vector(a: &Mat3) -> Vec3 {
        let rows = [a[0], a[1], a[2]];
        let cross = |u: &Vec3, v: &Vec3| -> Vec3 {
            [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ]
        };
        let candidates = [
            cross(&rows[0], &rows[1]),
            cross(&rows[0], &rows[2]),
            cross(&rows[1], &rows[2]),
        ];
        let mut best = candidates[0];
        let norm = |v: &Vec3| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for c in &candidates[1..] {
            if norm(c) > norm(&best) {
                best = *c;
            }
        }
        let n = norm(&best);
        best.map(|x| x / n)
    }

    #[test]
    fn biorthogonal_product_examples() {
        // Exactly zero at the exceptional point.
        assert_eq!(biorthogonal_product(2.0).unwrap(), 0.0);
        // Oracle at mu = 0: explicit left null vector of M^T.
        let m = build_generator(0.0).unwrap();
        let u = null_vector(&mat3::transpose(m.entries()));
        let expected_left = [1.0, 0.0, 0.0];
        for i in 0..3 {
            assert!(
                (u[i].abs() - expected_left[i]).abs() < 1e-14,
                "left null vector mismatch at {i}: {u:?}"
            );
        }
        assert!((biorthogonal_product(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn biorthogonal_product_vanishes_continuously() {
        let mut prev = biorthogonal_product(1.9).unwrap();
        for k in 2..9 {
            let mu = 2.0 - 10.0_f64.powi(-k);
            let p = biorthogonal_product(mu).unwrap();
            assert!(p > 0.0, "product must stay positive below the EP");
            assert!(p < prev, "product must shrink towards the EP");
            prev = p;
        }
        assert!(
            (biorthogonal_product(1.999).unwrap() - (1.0 - 1.999f64 * 1.999 / 4.0)).abs() < 1e-12
        );
    }

    #[test]
    fn casimir_examples() {
        let consts = PhysicalConstants::default();
        let ground = AlgebraState::ground_state(1.0, &consts).unwrap();
        assert_eq!(ground.casimir(), 0.25);
        let s = AlgebraState::new(1.0, 0.0, 0.0, 2.0, 0.0).unwrap();
        assert_eq!(s.casimir(), 0.25);
    }

    #[test]
    fn casimir_conserved_along_evolution() {
        let consts = PhysicalConstants::default();
        let profile = FrequencyProfile::new(1.0, 1.0).unwrap();
        let initial = AlgebraState::ground_state(1.0, &consts).unwrap();
        let c0 = initial.casimir();
        let mut state = initial;
        for step in 1..=20 {
            let t = 0.04 * step as f64;
            state = evolve_state(&state, &profile, t).unwrap();
            let c = state.casimir();
            assert!(
                ((c - c0) / c0).abs() < 1e-9,
                "Casimir drifted at t={t}: {c} vs {c0}"
            );
        }
    }

    #[test]
    fn state_constructor_rejects_unphysical_input() {
        assert!(
            AlgebraState::new(0.5, 0.0, 0.0, 0.0, 0.0).is_err(),
            "omega = 0"
        );
        assert!(
            AlgebraState::new(-0.5, 0.0, 0.0, 1.0, 0.0).is_err(),
            "h < 0"
        );
        assert!(
            AlgebraState::new(0.5, 0.5, 0.0, 1.0, 0.0).is_err(),
            "null Casimir"
        );
        assert!(
            AlgebraState::new(0.5, 0.0, 0.6, 1.0, 0.0).is_err(),
            "negative Casimir"
        );
        assert!(
            AlgebraState::new(0.5, 0.0, 0.0, 1.0, -1.0).is_err(),
            "t < 0"
        );
    }

    #[test]
    fn covariance_round_trip() {
        let consts = PhysicalConstants {
            hbar: 1.0,
            mass: 1.7,
        };
        let state = AlgebraState::new(1.2, 0.3, -0.4, 0.8, 0.0).unwrap();
        let (xx, pp, xp) = state.covariance(&consts);
        let back = AlgebraState::from_covariance(xx, pp, xp, 0.8, 0.0, &consts).unwrap();
        assert!((back.h() - state.h()).abs() < 1e-14);
        assert!((back.l() - state.l()).abs() < 1e-14);
        assert!((back.d() - state.d()).abs() < 1e-14);
    }

    #[test]
    fn physical_wigner_states_stay_above_uncertainty_floor() {
        let consts = PhysicalConstants::default();
        // States built from a physical covariance: Casimir >= hbar^2/4.
        for &(xx, pp, xp) in &[(0.5, 0.5, 0.0), (1.0, 0.3, 0.1), (0.26, 1.0, -0.05)] {
            let s = AlgebraState::from_covariance(xx, pp, xp, 1.3, 0.0, &consts).unwrap();
            assert!(
                s.casimir() >= consts.casimir_floor() - 1e-12,
                "covariance ({xx},{pp},{xp}) produced sub-floor Casimir {}",
                s.casimir()
            );
        }
    }

    proptest! {
        /// Cayley-Hamilton: M^3 + (4 - mu^2) M = 0 for every mu.
        #[test]
        fn cayley_hamilton_identity(mu in -3.0..3.0f64) {
            let m = build_generator(mu).unwrap();
            let m2 = mat3::mat_mul(m.entries(), m.entries());
            let m3 = mat3::mat_mul(&m2, m.entries());
            let residual = mat3::add_scaled(&m3, 4.0 - mu * mu, m.entries());
            prop_assert!(mat3::max_abs(&residual) < 1e-12);
        }

        #[test]
        fn trace_is_zero(mu in -10.0..10.0f64) {
            prop_assert_eq!(build_generator(mu).unwrap().trace(), 0.0);
        }

        /// The bilinear zero-mode product follows 1 - mu^2/4.
        #[test]
        fn biorthogonal_matches_closed_form(mu in -3.0..3.0f64) {
            let p = biorthogonal_product(mu).unwrap();
            prop_assert!((p - (1.0 - 0.25 * mu * mu)).abs() < 1e-12);
        }
    }
}

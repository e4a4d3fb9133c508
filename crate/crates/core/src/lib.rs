//! Moment dynamics of a single particle in a harmonic trap whose frequency
//! is ramped at constant adiabatic parameter `mu = (dw/dt) / w^2`.
//!
//! The second moments of the trap Hamiltonian close on the three operators
//! (H, L, D) — energy, Lagrangian, and the frequency-scaled x-p
//! anticommutator. In the stretched time coordinate `tau` (with
//! `dtau = w(t) dt`) their rescaled expectation values evolve under a real,
//! traceless, time-independent 3x3 generator whose spectrum collapses to a
//! triple zero at `|mu| = 2`: a third-order exceptional point that separates
//! oscillatory from monotonic dynamics. This crate provides:
//!
//! - [`algebra`]: the moment state, the generator, its closed-form spectrum,
//!   and the exceptional-point diagnostics (nilpotency, self-orthogonality,
//!   Casimir invariant);
//! - [`propagation`]: the frequency profile, the `t <-> tau` maps, the exact
//!   closed-form propagator, and a fixed-step RK4 integrator in physical time
//!   for cross-validation;
//! - [`observables`]: Wigner-ellipse axes, the oscillation/monotonic
//!   classification, and period/visibility estimators;
//! - [`classical`]: the equivalent damped-oscillator picture with seeded
//!   Monte-Carlo sampling of the initial Wigner distribution;
//! - [`protocol`]: the simulated ramp-and-measure experimental procedure,
//!   including the hold-and-measure variance readout;
//! - [`figures`] and [`output`]: parameter sweeps and deterministic CSV/JSON
//!   emission for plotting.

pub mod algebra;
pub mod classical;
pub mod error;
pub mod figures;
pub mod mat3;
pub mod observables;
pub mod output;
pub mod propagation;
pub mod protocol;
pub mod units;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

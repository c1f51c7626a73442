//! Simulation core for a gravitational scattering experiment in which the
//! source of gravity is a nanoparticle prepared in a spatial superposition
//! over two slit positions.
//!
//! The crate models the full pipeline of such a tabletop test:
//!
//! * [`gravity`] — the Newtonian field of the source under three rival
//!   hypotheses for how a superposed mass gravitates (`Collapsed`,
//!   `MeanField`, `Superposed`),
//! * [`scattering`] — test-particle trajectories through that field with an
//!   adaptive embedded Runge-Kutta integrator, deflection angles and the
//!   analytic hyperbolic-orbit oracle,
//! * [`casimir`] — the competing Casimir-Polder acceleration bound and the
//!   mass × impact-parameter feasibility scans,
//! * [`interference`] — cat-state preparation at the slits, far-field fringe
//!   patterns and which-path visibility under each hypothesis,
//! * [`toymodel`] — the regularized field-expectation integral that exhibits
//!   the ill-defined interference cross term,
//! * [`constants`] / [`units`] — CODATA-2018 constants and the unit
//!   conversions used at the configuration boundary.
//!
//! Everything computes in SI double precision. All operations are pure and
//! deterministic; the per-shot branch sampling of the `Collapsed` hypothesis
//! takes an explicit seed and shot index so runs replay bit-identically.
//!
//! With the default `parallel` feature the grid scans, shot batches and
//! quadratures fan out over rayon; summation order is fixed (indexed cells,
//! pairwise reduction) so results are bitwise identical at any thread count.

// Validations use the `!(x > 0.0)` form so NaN inputs fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casimir;
pub mod constants;
pub mod error;
mod exec;
pub mod geometry;
pub mod gravity;
pub mod interference;
pub mod quadrature;
pub mod scattering;
pub mod stats;
pub mod toymodel;
pub mod units;

pub use error::{CoreError, Result};
pub use geometry::Vec2;
pub use gravity::{GravityHypothesis, HypothesisKind, SourceSpec};
pub use scattering::{NumericsConfig, TestParticleSpec};

//! A desk-scale laboratory for constrained two-layer adversarial models:
//! seeded data sources, regularized minimax objectives, projected-gradient
//! training, Rademacher-complexity estimation (Monte-Carlo and exact), and
//! closed-form generalization bounds to compare measured gaps against.
//!
//! The pieces compose in one direction:
//!
//! * [`classes`] — the constrained function classes, their evaluation,
//!   closed-form gradients, projections and finite-grid enumeration;
//! * [`dist`] — reproducible sources of points on the unit cube;
//! * [`objective`] — the measuring-function objective family and its
//!   empirical forms;
//! * [`optim`] — projected-gradient maximization, alternating minimax
//!   training and generalization-gap measurement;
//! * [`rademacher`] — empirical, exact and composition complexity
//!   estimators;
//! * [`bounds`] — every closed-form bound, covering-number formulas and the
//!   numeric Dudley entropy integral.
//!
//! The `genbound` binary (in the companion CLI crate) drives experiment
//! sweeps over these pieces and emits CSV tables and SVG plots. The guide
//! in `book/` walks through the concepts; its code snippets compile and run
//! as doctests of this crate.

pub mod bounds;
pub mod classes;
pub mod dist;
pub mod error;
pub mod matrix;
pub mod objective;
pub mod optim;
pub mod rademacher;

mod guide;

pub use error::{Error, Result};
pub use matrix::Matrix;

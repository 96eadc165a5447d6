//! Trace calculus for operators commuting with magnetic translations.
//!
//! Operators are stored by their coefficients in the transition-operator
//! basis `Υ_{j→k}`, which acts on the first index of the Laguerre basis
//! `ψ_{n,m}`. On top of that representation the crate computes the canonical
//! trace in four independent ways, Dixmier traces of operators weighted by
//! powers of the harmonic oscillator, and the density of states of the Landau
//! Hamiltonian.
//!
//! | module | contents |
//! |---|---|
//! | [`config`] | magnetic length and derived constants |
//! | [`laguerre`] | basis functions and quadrature |
//! | [`algebra`] | coefficient operators, weights, blocks, file format |
//! | [`kernel`] | position-space kernels and magnetic translations |
//! | [`trace`] | diagonal, residue, shell and ordered-basis engines |
//! | [`dixmier`] | spectra, partial sums, Dixmier and zeta-residue estimates |
//! | [`dos`] | IDOS, DOS measure and trace formulas for `f(H)` |
//! | [`cli`] | the `magtrace` command line and its reports |

pub mod algebra;
pub mod cli;
pub mod config;
pub mod dixmier;
pub mod dos;
pub mod error;
pub mod kernel;
pub mod laguerre;
pub mod trace;

pub use algebra::{CoefficientOperator, DiagonalWeight, Form, OperatorClass};
pub use config::MagneticConfig;
pub use error::{Error, Result};
pub use laguerre::{BasisIndex, Point2D};
pub use trace::ConvergenceTable;

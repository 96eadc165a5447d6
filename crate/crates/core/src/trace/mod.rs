//! Four independent computations of the canonical trace: the diagonal sum,
//! the zeta residue, the energy-shell logarithmic average with its harmonic
//! acceleration, and the ordered-eigenbasis average.

mod dd;
mod engines;
mod harmonic;
mod table;
mod zeta;

pub use engines::{
    residue_pair, shell_average, shell_dimension, shell_sum, tau_diagonal, tau_ordered_basis, tau_residue,
    tau_shell, theta, ResiduePair,
};
pub use harmonic::HarmonicNumbers;
pub use table::{
    log_inverse_fit, richardson_at_zero, ConvergenceRow, ConvergenceTable, ExtrapolationModel, LogInverseFit,
};
pub use zeta::hurwitz_zeta;

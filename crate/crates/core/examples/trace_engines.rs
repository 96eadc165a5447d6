//! Compute the trace of one operator with all four engines and print the
//! convergence tables.
//!
//! ```bash
//! cargo run --release --example trace_engines
//! ```

use magtrace::trace::{shell_dimension, tau_diagonal, tau_ordered_basis, tau_residue, tau_shell};
use magtrace::{CoefficientOperator, OperatorClass};
use num_complex::Complex64;

fn main() -> magtrace::Result<()> {
    let diag: Vec<Complex64> = [0.7, 0.05, 0.3, 0.0, 0.45].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let s = CoefficientOperator::diagonal_from(&diag, OperatorClass::L1)?;
    println!("diagonal sum: {}", tau_diagonal(&s).re);

    let residue = tau_residue(&s, 0.0, &[1e-1, 1e-2, 1e-3])?;
    print!("\nzeta residue, x -> 0\n{}", residue.to_csv());

    let shell = tau_shell(&s, &[100, 1000, 10_000])?;
    print!("\nenergy shells, N -> infinity\n{}", shell.to_csv());

    // ordered-basis cutoffs at the end of whole shells
    let cutoffs: Vec<usize> = [64, 128, 256, 512].iter().map(|&e| shell_dimension(e) - 1).collect();
    let ordered = tau_ordered_basis(&s, &cutoffs)?;
    print!("\nordered basis (tends to tau/2)\n{}", ordered.to_csv());
    Ok(())
}

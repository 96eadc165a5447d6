//! Integrated density of states of the Landau Hamiltonian and the trace
//! formula for f(H).
//!
//! ```bash
//! cargo run --release --example landau_dos
//! ```

use magtrace::dos::{
    dixmier_dos_check, dos_measure, idos, idos_shell_approx, landau_hamiltonian, spectral_formula_check,
    CompactTestFunction,
};
use magtrace::{Form, MagneticConfig};

fn main() -> magtrace::Result<()> {
    let cfg = MagneticConfig::new(1.0)?;
    let h = landau_hamiltonian(8)?;

    for eps in [0.25, 0.5, 1.0, 2.75, 7.5] {
        println!("N({eps}) = {:.6}", idos(&h, eps, &cfg)?);
    }
    let mu = dos_measure(&h, &cfg);
    println!("mass of (1, 3] = {:.6}", mu.mass(1.0, 3.0));

    let approx = idos_shell_approx(&h, 2.0, &[100, 1000, 10_000], &cfg)?;
    print!("\nshell approximation of N(2)\n{}", approx.to_csv());

    let f = CompactTestFunction::new(vec![(0.25, 0.0), (0.5, 1.0), (1.5, 0.25), (1.75, 0.0)])?;
    let check = spectral_formula_check(&h, &f, &cfg)?;
    println!("\ntau(f(H)) = {:.12}, integral = {:.12}", check.lhs, check.rhs);
    // f(H) has finite support, so it needs a long shell cutoff to fill the spectrum
    let d = dixmier_dos_check(&h, &f, Form::Left, 2.0, 2.0, 20_000, &cfg)?;
    println!("Dixmier trace of Q^-1 f(H) = {:.6} (gap {:.2e})", d.dixmier, d.gap);
    Ok(())
}

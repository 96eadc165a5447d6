//! Dixmier traces of harmonic-oscillator weighted operators, from partial sums
//! of their spectra and from the zeta residue.
//!
//! ```bash
//! cargo run --release --example dixmier_trace
//! ```

use magtrace::algebra::weighted_product;
use magtrace::dixmier::{
    calderon_norm, default_checkpoints, dixmier_estimate, eigen_sequence, gamma, singular_spectrum,
    tauberian_residue, Truncation,
};
use magtrace::{CoefficientOperator, DiagonalWeight, Form};

fn main() -> magtrace::Result<()> {
    // Q^{-2} has Dixmier trace 1/2
    let w = DiagonalWeight::q_power(2.0, 0.0)?;
    let spec = singular_spectrum(&w, Truncation::shells(2000))?;
    let cps = default_checkpoints(&spec, 8)?;
    let partial = dixmier_estimate(&spec, &cps)?;
    print!("Q^-2 partial sums\n{}", partial.to_csv());
    let residue = tauberian_residue(&spec, &[1e-1, 1e-2, 1e-3])?;
    println!("zeta residue: {:.6}", residue.extrapolated.unwrap_or_default().re);
    println!("gamma(1000) = {:.6}, Calderon norm = {:.6}", gamma(&spec, 1000)?, calderon_norm(&spec)?);

    // Q^{-1} Π_0 in each ordering: all reproduce tau(Π_0) = 1
    let p0 = CoefficientOperator::landau_projection(0);
    let trunc = Truncation::matched_to_weight(2000, p0.support_dim());
    for form in [Form::Left, Form::Right, Form::Split] {
        let product = weighted_product(&p0, form, 0.5, 0.5, 1.0)?;
        let seq = eigen_sequence(&product, trunc)?;
        let table = dixmier_estimate(&seq, &default_checkpoints(&seq, 8)?)?;
        println!("{form:?}: {:.6}", table.extrapolated.unwrap_or_default().re);
    }
    Ok(())
}

//! Realize an operator as a twisted convolution on a grid and check that it
//! commutes with magnetic translations.
//!
//! ```bash
//! cargo run --release --example kernel_realization
//! ```

use magtrace::kernel::{
    apply_kernel, coefficient_action, commutant_residual, folner_trace, kernel_at_zero, GridFunction, UniformGrid,
};
use magtrace::laguerre::psi;
use magtrace::{BasisIndex, CoefficientOperator, MagneticConfig, Point2D};

fn main() -> magtrace::Result<()> {
    let cfg = MagneticConfig::new(1.0)?;
    let s = CoefficientOperator::transition(1, 0).add(&CoefficientOperator::landau_projection(0));

    let f0 = kernel_at_zero(&s, &cfg);
    println!("f_S(0) = {:.12}, tau(S) = {:.12}", f0.re, magtrace::trace::tau_diagonal(&s).re);

    let grid = UniformGrid::new(12.0, 80)?;
    let input = BasisIndex::new(1, 0);
    let phi = GridFunction::sample(grid, |p| psi(input, p, &cfg));
    let out = apply_kernel(&s, &phi, &cfg)?;
    let exact = coefficient_action(&s, input, grid, &cfg);
    println!("quadrature vs coefficient action: sup error {:.2e}", out.function.sup_distance(&exact));
    for w in &out.warnings {
        println!("warning: {w}");
    }

    let residual = commutant_residual(&s, Point2D::new(1.5, -0.5), &phi, &cfg)?;
    println!("|| [S, V(a)] phi || / || phi || = {residual:.2e}");

    for r in [2.0, 5.0, 10.0] {
        println!("box trace per unit volume, R = {r:>4}: {:.12}", folner_trace(&s, r, &cfg)?.re);
    }
    Ok(())
}

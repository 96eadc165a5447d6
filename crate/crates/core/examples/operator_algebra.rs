//! Build coefficient operators, compose them and look at their matrix blocks.
//!
//! ```bash
//! cargo run --release --example operator_algebra
//! ```

use magtrace::algebra::{covering_block, matrix_block, spectral_norm, weighted_product};
use magtrace::{CoefficientOperator, Form, OperatorClass};
use num_complex::Complex64;

fn main() -> magtrace::Result<()> {
    let up = CoefficientOperator::transition(0, 1);
    let down = up.adjoint();
    show("Y(0->1) Y(1->0)", &up.compose(&down));
    show("Y(1->0) Y(0->1)", &down.compose(&up));

    let c = |re, im| Complex64::new(re, im);
    let s = CoefficientOperator::from_entries(
        [(0, 0, c(1.0, 0.0)), (0, 2, c(0.0, 0.5)), (2, 0, c(0.0, -0.5)), (1, 1, c(0.25, 0.0))],
        OperatorClass::L1,
    )?;
    println!("self-adjoint: {}", s.is_self_adjoint(0.0));
    println!("||S||_1 = {:.6}  ||S||_2 = {:.6}", s.lp_norm(1.0)?, s.lp_norm(2.0)?);
    println!("operator norm = {:.6}", spectral_norm(&covering_block(&s)));

    // every block of S is the same finite matrix
    let block = matrix_block(&s, 7, 3)?;
    println!("block at m=7:{}", block.data);

    let weighted = weighted_product(&s, Form::Split, 0.0, 1.0, 1.0)?;
    let wb = matrix_block(&weighted, 0, 3)?;
    println!("block of Q^-1/2 S Q'^-1/2 at m=0:{}", wb.data);
    Ok(())
}

fn show(name: &str, op: &CoefficientOperator) {
    let terms: Vec<String> = op.entries().iter().map(|(&(j, k), v)| format!("({v}) Y({j}->{k})")).collect();
    println!("{name} = {}", terms.join(" + "));
}

//! Run every engine on a random diagonal operator and report the gaps.
//!
//! ```bash
//! cargo run --release --example compare_engines
//! ```

use magtrace::cli::{compare, Budget};
use magtrace::{CoefficientOperator, OperatorClass};
use num_complex::Complex64;

fn main() -> magtrace::Result<()> {
    // deterministic pseudo-random diagonal
    let mut x = 0x9e37_79b9_u64;
    let diag: Vec<Complex64> = (0..6)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Complex64::new((x >> 11) as f64 / (1u64 << 53) as f64, 0.0)
        })
        .collect();
    let s = CoefficientOperator::diagonal_from(&diag, OperatorClass::L1)?;

    let result = compare(&s, 0.5, &Budget::quick())?;
    println!("reference {:.12}", result.reference.re);
    for g in &result.gaps {
        let value = g.value.map_or("-".into(), |v| format!("{v:.12}"));
        let gap = g.gap.map_or("-".into(), |v| format!("{v:.2e}"));
        println!("{:<24} {value:>16} gap {gap:>9} (tol {:.0e})", g.engine, g.tolerance);
    }
    println!("within tolerance: {}", result.within_tolerance());
    Ok(())
}

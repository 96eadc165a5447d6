//! Evaluate Laguerre basis functions and check their orthonormality by quadrature.
//!
//! ```bash
//! cargo run --release --example laguerre_basis
//! ```

use magtrace::laguerre::{orthonormality_check, psi, QuadratureSpec};
use magtrace::{BasisIndex, MagneticConfig, Point2D};

fn main() -> magtrace::Result<()> {
    let cfg = MagneticConfig::new(1.0)?;
    let p = Point2D::new(0.7, -0.4);
    for (n, m) in [(0, 0), (1, 0), (0, 1), (3, 2)] {
        let v = psi(BasisIndex::new(n, m), p, &cfg);
        println!("psi_{n},{m}(0.7, -0.4) = {:+.12} {:+.12}i", v.re, v.im);
    }

    // ψ_{n,m} and ψ_{m,n} differ by conjugation and a sign
    let a = psi(BasisIndex::new(3, 1), p, &cfg);
    let b = psi(BasisIndex::new(1, 3), p, &cfg);
    println!("|psi_3,1 - conj(psi_1,3)| = {:.2e}", (a - b.conj()).norm());

    let gram = orthonormality_check(4, &cfg, &QuadratureSpec::default_for(&cfg))?;
    println!("gram matrix over {} functions, max error {:.2e}", gram.indices.len(), gram.max_error);
    Ok(())
}

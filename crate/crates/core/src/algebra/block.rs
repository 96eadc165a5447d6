use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CoefficientOperator, DiagonalWeight, WeightedProduct};
use crate::error::{Error, Result};

/// Operators that are block diagonal in the second Laguerre index.
///
/// `block_entry(n, n2, m)` is the matrix element `⟨ψ_{n,m}, T ψ_{n2,m}⟩`.
pub trait BlockOperator: Sync {
    fn block_entry(&self, n: usize, n2: usize, m: usize) -> Complex64;
    fn describe(&self) -> String;
}

impl BlockOperator for CoefficientOperator {
    fn block_entry(&self, n: usize, n2: usize, _m: usize) -> Complex64 {
        self.get(n2, n)
    }

    fn describe(&self) -> String {
        format!("coefficient operator ({} entries, {})", self.len(), self.class())
    }
}

impl BlockOperator for DiagonalWeight {
    fn block_entry(&self, n: usize, n2: usize, m: usize) -> Complex64 {
        if n == n2 {
            Complex64::new(self.value(n, m), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn describe(&self) -> String {
        DiagonalWeight::describe(self)
    }
}

impl BlockOperator for WeightedProduct {
    fn block_entry(&self, n: usize, n2: usize, m: usize) -> Complex64 {
        self.entry(n, n2, m)
    }

    fn describe(&self) -> String {
        WeightedProduct::describe(self)
    }
}

/// Block `m` of an operator, restricted to first indices `n, n' < order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    pub m: usize,
    pub order: usize,
    pub data: DMatrix<Complex64>,
}

impl TruncatedMatrix {
    pub fn entry(&self, n: usize, n2: usize) -> Complex64 {
        self.data[(n, n2)]
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }
}

/// Materializes block `m` of `op` truncated to order `order`.
pub fn matrix_block<T: BlockOperator + ?Sized>(op: &T, m: usize, order: usize) -> Result<TruncatedMatrix> {
    if order == 0 {
        return Err(Error::Domain("truncation order must be at least 1".into()));
    }
    let data = DMatrix::from_fn(order, order, |n, n2| op.block_entry(n, n2, m));
    Ok(TruncatedMatrix { m, order, data })
}

/// Smallest block of a coefficient operator containing all stored indices.
/// Every block is the same, so `m = 0` is used; the zero operator gets a
/// `1×1` zero block.
pub fn covering_block(op: &CoefficientOperator) -> TruncatedMatrix {
    matrix_block(op, 0, op.support_dim().max(1)).expect("order is at least 1")
}

/// Largest singular value of a truncated block.
pub fn spectral_norm(block: &TruncatedMatrix) -> f64 {
    block
        .data
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

use serde::{Deserialize, Serialize};

use super::{covering_block, matrix_block, spectral_norm, CoefficientOperator, DiagonalWeight, OperatorClass};
use crate::error::{Error, Result};

fn require_l1(op: &CoefficientOperator, name: &str) -> Result<()> {
    if op.class() == OperatorClass::L1 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be declared L1 (got {}): absorption needs ℓ¹ coefficients on both sides",
            op.class()
        )))
    }
}

/// Absorption product `κ_{p,s} = Σ_{r,q} a1_{r,s} t_{q,r} a2_{p,q}`, the
/// coefficients of `A1·T·A2`.
pub fn absorb_product(
    a1: &CoefficientOperator,
    t: &CoefficientOperator,
    a2: &CoefficientOperator,
) -> Result<CoefficientOperator> {
    require_l1(a1, "A1")?;
    require_l1(a2, "A2")?;
    Ok(a1.compose(&t.compose(a2)).with_class(OperatorClass::L1))
}

/// The ℓ¹ bound `‖κ‖₁ ≤ ‖T‖·‖A1‖₁·‖A2‖₁` with `‖T‖` estimated from below by
/// the spectral norm of the covering block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsorptionReport {
    pub l1_product: f64,
    pub t_norm_estimate: f64,
    pub l1_a1: f64,
    pub l1_a2: f64,
    pub bound: f64,
    pub margin: f64,
}

pub fn absorption_bound(
    a1: &CoefficientOperator,
    t: &CoefficientOperator,
    a2: &CoefficientOperator,
) -> Result<AbsorptionReport> {
    let kappa = absorb_product(a1, t, a2)?;
    let l1_product = kappa.lp_norm(1.0)?;
    let t_norm_estimate = spectral_norm(&covering_block(t));
    let l1_a1 = a1.lp_norm(1.0)?;
    let l1_a2 = a2.lp_norm(1.0)?;
    let bound = t_norm_estimate * l1_a1 * l1_a2;
    Ok(AbsorptionReport {
        l1_product,
        t_norm_estimate,
        l1_a1,
        l1_a2,
        bound,
        margin: bound - l1_product,
    })
}

/// Entry bound `max |t_{n,k}| ≤ ‖T_block‖`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientBoundReport {
    pub block_order: usize,
    pub max_entry: f64,
    pub block_norm: f64,
    pub margin: f64,
}

/// Compares the largest coefficient against the spectral norm of the block
/// of order `max(order, support)`, which always contains every stored index.
pub fn coefficient_bound_check(t: &CoefficientOperator, order: usize) -> Result<CoefficientBoundReport> {
    let block_order = order.max(t.support_dim());
    let block = matrix_block(t, 0, block_order)?;
    let max_entry = t.lp_norm(f64::INFINITY)?;
    let block_norm = spectral_norm(&block);
    Ok(CoefficientBoundReport {
        block_order,
        max_entry,
        block_norm,
        margin: block_norm - max_entry,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailConvergence {
    Convergent,
    Divergent,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelNormReport {
    pub m_max: usize,
    /// `Σ_{m ≤ m_max} Σ_{n,n'} |w(n,m)|² |a_{n',n}|²`
    pub partial_sq: f64,
    pub partial_norm: f64,
    pub tail: TailConvergence,
}

/// Partial Hilbert–Schmidt norm of the kernel of `W·A` over blocks
/// `m ≤ m_max`, with the convergence verdict for the tail in `m`.
///
/// With `A` finitely supported in `n`, the block-`m` contribution behaves
/// like `m^{2e}` where `e` is the `m`-exponent of `W`, so the tail converges
/// iff `2e < −1`.
pub fn hs_kernel_norm(w: &DiagonalWeight, a: &CoefficientOperator, m_max: usize) -> Result<KernelNormReport> {
    if m_max == 0 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let partial_sq: f64 = (0..=m_max)
        .map(|m| {
            a.entries()
                .iter()
                .map(|(&(_, n), v)| w.value(n, m).powi(2) * v.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    let tail = match w.m_exponent() {
        _ if a.is_zero() => TailConvergence::Convergent,
        Some(e) if 2.0 * e < -1.0 => TailConvergence::Convergent,
        Some(_) => TailConvergence::Divergent,
        None => TailConvergence::Unknown,
    };
    Ok(KernelNormReport {
        m_max,
        partial_sq,
        partial_norm: partial_sq.sqrt(),
        tail,
    })
}

//! Realization of coefficient operators on `L²(ℝ²)` as twisted convolutions
//!
//! `(Aφ)(x) = (2πℓ²)⁻¹ ∫ f_A(y − x) e^{i x∧y / 2ℓ²} φ(y) dy`
//!
//! with kernel `f_A = √(2π)ℓ Σ (−1)^{j−k} a_{j,k} ψ_{k,j}`.

mod apply;
mod grid;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::CoefficientOperator;
use crate::config::MagneticConfig;
use crate::error::Result;
use crate::laguerre::{psi, BasisIndex, Point2D, QuadratureSpec};

pub use apply::{
    apply_kernel, coefficient_action, commutant_residual, commutant_residual_with, folner_trace,
    magnetic_translate, GridOperator, GridOutput, PositionMultiplier, TwistedConvolution,
};
pub use grid::{GridFunction, UniformGrid};

/// Kernel `f_A` of a coefficient operator, evaluated through its Laguerre series.
#[derive(Debug, Clone)]
pub struct KernelFunction {
    source: CoefficientOperator,
    cfg: MagneticConfig,
    terms: Vec<(BasisIndex, Complex64)>,
}

impl KernelFunction {
    pub fn source(&self) -> &CoefficientOperator {
        &self.source
    }

    /// Number of Laguerre terms in the series.
    pub fn terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest Laguerre index in the series; governs the decay radius.
    pub fn max_index(&self) -> usize {
        self.source.max_index().unwrap_or(0)
    }

    pub fn eval(&self, p: Point2D) -> Complex64 {
        self.terms.iter().map(|(idx, c)| c * psi(*idx, p, &self.cfg)).sum()
    }
}

pub fn kernel_of(a: &CoefficientOperator, cfg: &MagneticConfig) -> KernelFunction {
    let pref = cfg.kernel_prefactor();
    let terms = a
        .entries()
        .iter()
        .map(|(&(j, k), &v)| {
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            (BasisIndex::new(k, j), v * (sign * pref))
        })
        .collect();
    KernelFunction {
        source: a.clone(),
        cfg: *cfg,
        terms,
    }
}

/// `f_S(0)`, evaluated from the kernel series. Off-diagonal basis functions
/// vanish at the origin, so this reproduces the diagonal sum.
pub fn kernel_at_zero(s: &CoefficientOperator, cfg: &MagneticConfig) -> Complex64 {
    kernel_of(s, cfg).eval(Point2D::default())
}

/// Quadrature pairing `(2πℓ²)⁻¹ ⟨f_A, f_B⟩`.
pub fn kernel_pairing(
    a: &CoefficientOperator,
    b: &CoefficientOperator,
    cfg: &MagneticConfig,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let fa = kernel_of(a, cfg);
    let fb = kernel_of(b, cfg);
    let pts = quad.points()?;
    let inner: Complex64 = pts
        .par_iter()
        .map(|(p, w)| fa.eval(*p).conj() * fb.eval(*p) * *w)
        .sum();
    Ok(inner * cfg.idos_scale())
}

/// `‖f_A‖_{L²}` by quadrature.
pub fn kernel_l2_norm(a: &CoefficientOperator, cfg: &MagneticConfig, quad: &QuadratureSpec) -> Result<f64> {
    Ok((kernel_pairing(a, a, cfg, quad)?.re / cfg.idos_scale()).max(0.0).sqrt())
}

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{kernel_at_zero, kernel_of, GridFunction, UniformGrid};
use crate::algebra::CoefficientOperator;
use crate::config::MagneticConfig;
use crate::error::{Error, Result};
use crate::laguerre::{psi, BasisIndex, Point2D, QuadratureSpec};

/// Relative size below which boundary values and clipped mass are ignored.
const LOCALIZATION_TOL: f64 = 1e-10;

/// Grid result together with resource warnings raised while computing it.
#[derive(Debug, Clone)]
pub struct GridOutput {
    pub function: GridFunction,
    pub warnings: Vec<String>,
}

/// Operators that act on grid functions.
pub trait GridOperator: Sync {
    fn apply(&self, phi: &GridFunction) -> Result<GridOutput>;
}

/// Twisted convolution with the kernel of a coefficient operator.
#[derive(Debug, Clone)]
pub struct TwistedConvolution {
    pub op: CoefficientOperator,
    pub cfg: MagneticConfig,
}

impl GridOperator for TwistedConvolution {
    fn apply(&self, phi: &GridFunction) -> Result<GridOutput> {
        apply_kernel(&self.op, phi, &self.cfg)
    }
}

/// Multiplication by a coordinate, `φ ↦ x_axis φ`. Does not commute with
/// magnetic translations and serves as a negative control.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PositionMultiplier {
    /// 1 or 2.
    pub axis: u8,
}

impl GridOperator for PositionMultiplier {
    fn apply(&self, phi: &GridFunction) -> Result<GridOutput> {
        let grid = phi.grid;
        let n = grid.nodes;
        let axis = self.axis;
        if axis != 1 && axis != 2 {
            return Err(Error::Domain(format!("position axis must be 1 or 2 (got {axis})")));
        }
        let values = phi
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let p = grid.point(idx / n, idx % n);
                v * if axis == 1 { p.x1 } else { p.x2 }
            })
            .collect();
        Ok(GridOutput {
            function: GridFunction { grid, values },
            warnings: Vec::new(),
        })
    }
}

fn localization_warning(phi: &GridFunction, what: &str) -> Option<String> {
    let sup = phi.sup_norm();
    let edge = phi.boundary_sup();
    (sup > 0.0 && edge > LOCALIZATION_TOL * sup).then(|| {
        format!("{what} is not localized inside the grid (edge/sup = {:.2e}); enlarge the extent", edge / sup)
    })
}

/// Trapezoid realization of the twisted convolution on the grid of `phi`.
///
/// Kernel values are tabulated once on the lattice of grid differences and
/// the phase `e^{i c x∧y}` factors into two tables indexed by one coordinate
/// of each point.
pub fn apply_kernel(s: &CoefficientOperator, phi: &GridFunction, cfg: &MagneticConfig) -> Result<GridOutput> {
    let grid = phi.grid;
    let n = grid.nodes;
    let h = grid.spacing();
    let c = cfg.phase_constant();
    let mut warnings = Vec::new();
    if std::f64::consts::PI / h <= c * grid.half_width + 3.0 / cfg.ell() {
        warnings.push(format!(
            "grid spacing {h:.3} is too coarse for the magnetic phase at extent {}",
            grid.half_width
        ));
    }
    warnings.extend(localization_warning(phi, "input"));

    if s.is_zero() {
        return Ok(GridOutput {
            function: GridFunction::zeros(grid),
            warnings,
        });
    }

    let kernel = kernel_of(s, cfg);
    let width = 2 * n - 1;
    let diff: Vec<Complex64> = (0..width * width)
        .into_par_iter()
        .map(|idx| {
            let d1 = (idx / width) as f64 - (n - 1) as f64;
            let d2 = (idx % width) as f64 - (n - 1) as f64;
            kernel.eval(Point2D::new(d1 * h, d2 * h))
        })
        .collect();
    let coords: Vec<f64> = (0..n).map(|i| grid.coord(i)).collect();
    // phase[i][j] = e^{i c x_i y_j}
    let phase: Vec<Complex64> = (0..n * n)
        .map(|idx| Complex64::from_polar(1.0, c * coords[idx / n] * coords[idx % n]))
        .collect();
    let prefactor = grid.cell_area() * cfg.idos_scale();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i1| {
            // e^{i c x₁ y₂} φ(y)
            let twisted: Vec<Complex64> = (0..n * n)
                .map(|idx| phase[i1 * n + idx % n] * phi.values[idx])
                .collect();
            (0..n)
                .map(|i2| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j1 in 0..n {
                        let base = (j1 + n - 1 - i1) * width + (n - 1 - i2);
                        let krow = &diff[base..base + n];
                        let trow = &twisted[j1 * n..(j1 + 1) * n];
                        let inner: Complex64 = krow.iter().zip(trow).map(|(k, t)| k * t).sum();
                        // e^{−i c x₂ y₁}
                        acc += phase[i2 * n + j1].conj() * inner;
                    }
                    acc * prefactor
                })
                .collect()
        })
        .collect();
    let function = GridFunction {
        grid,
        values: rows.into_iter().flatten().collect(),
    };
    warnings.extend(localization_warning(&function, "output"));
    Ok(GridOutput { function, warnings })
}

/// Samples of the exact coefficient action `Aψ_{n,m} = Σ_k a_{n,k} ψ_{k,m}`.
pub fn coefficient_action(
    a: &CoefficientOperator,
    input: BasisIndex,
    grid: UniformGrid,
    cfg: &MagneticConfig,
) -> GridFunction {
    let terms: Vec<(usize, Complex64)> = a
        .entries()
        .iter()
        .filter(|((j, _), _)| *j == input.n)
        .map(|(&(_, k), &v)| (k, v))
        .collect();
    GridFunction::sample(grid, |p| {
        terms
            .iter()
            .map(|&(k, v)| v * psi(BasisIndex::new(k, input.m), p, cfg))
            .sum()
    })
}

fn fft_shift(values: &[Complex64], n: usize, h: f64, a: Point2D) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let transpose = |src: &[Complex64]| -> Vec<Complex64> {
        (0..n * n).map(|idx| src[(idx % n) * n + idx / n]).collect()
    };
    let mut data = values.to_vec();
    data.chunks_exact_mut(n).for_each(|row| forward.process(row));
    let mut data = transpose(&data);
    data.chunks_exact_mut(n).for_each(|row| forward.process(row));
    // data is now indexed (k2, k1)
    let wavenumber = |idx: usize| {
        let f = if idx <= n / 2 { idx as f64 } else { idx as f64 - n as f64 };
        2.0 * std::f64::consts::PI * f / (n as f64 * h)
    };
    for (idx, v) in data.iter_mut().enumerate() {
        let k2 = wavenumber(idx / n);
        let k1 = wavenumber(idx % n);
        *v *= Complex64::from_polar(1.0, -(k1 * a.x1 + k2 * a.x2));
    }
    data.chunks_exact_mut(n).for_each(|row| inverse.process(row));
    let mut data = transpose(&data);
    data.chunks_exact_mut(n).for_each(|row| inverse.process(row));
    let norm = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|v| *v *= norm);
    data
}

/// Magnetic translation `(V(a)φ)(x) = e^{i x∧a / 2ℓ²} φ(x − a)`.
///
/// Shifts by whole grid steps move samples; other shifts are done by a
/// Fourier phase ramp, which treats the grid as periodic. Mass that leaves
/// the box is reported as a warning.
pub fn magnetic_translate(a: Point2D, phi: &GridFunction, cfg: &MagneticConfig) -> Result<GridOutput> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("translation vector must be finite (got {a:?})")));
    }
    let grid = phi.grid;
    let n = grid.nodes;
    let h = grid.spacing();
    let (s1, s2) = (a.x1 / h, a.x2 / h);
    let on_lattice = (s1 - s1.round()).abs() < 1e-9 && (s2 - s2.round()).abs() < 1e-9;

    let inside = |x: f64| x >= -grid.half_width - 1e-9 * h && x < grid.half_width - 1e-9 * h;
    let mut clipped = 0.0;
    let mut total = 0.0;
    for (idx, v) in phi.values.iter().enumerate() {
        let p = grid.point(idx / n, idx % n) + a;
        total += v.norm_sqr();
        if !(inside(p.x1) && inside(p.x2)) {
            clipped += v.norm_sqr();
        }
    }
    let mut warnings = Vec::new();
    if total > 0.0 && (clipped / total).sqrt() > LOCALIZATION_TOL {
        warnings.push(format!(
            "translation by ({}, {}) clips {:.2e} of the norm at the grid boundary",
            a.x1,
            a.x2,
            (clipped / total).sqrt()
        ));
    }

    let shifted: Vec<Complex64> = if on_lattice {
        let (d1, d2) = (s1.round() as i64, s2.round() as i64);
        (0..n * n)
            .map(|idx| {
                let src1 = (idx / n) as i64 - d1;
                let src2 = (idx % n) as i64 - d2;
                if (0..n as i64).contains(&src1) && (0..n as i64).contains(&src2) {
                    phi.values[src1 as usize * n + src2 as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect()
    } else {
        fft_shift(&phi.values, n, h, a)
    };
    let c = cfg.phase_constant();
    let values = shifted
        .into_iter()
        .enumerate()
        .map(|(idx, v)| v * Complex64::from_polar(1.0, c * grid.point(idx / n, idx % n).wedge(&a)))
        .collect();
    Ok(GridOutput {
        function: GridFunction { grid, values },
        warnings,
    })
}

/// `‖(T V(a) − V(a) T)φ‖ / ‖φ‖` for an arbitrary grid operator.
pub fn commutant_residual_with<T: GridOperator + ?Sized>(
    op: &T,
    a: Point2D,
    phi: &GridFunction,
    cfg: &MagneticConfig,
) -> Result<f64> {
    let norm = phi.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let tv = op.apply(&magnetic_translate(a, phi, cfg)?.function)?.function;
    let vt = magnetic_translate(a, &op.apply(phi)?.function, cfg)?.function;
    Ok(tv.sub(&vt).norm() / norm)
}

/// Commutator residual of a coefficient operator with `V(a)`.
pub fn commutant_residual(
    s: &CoefficientOperator,
    a: Point2D,
    phi: &GridFunction,
    cfg: &MagneticConfig,
) -> Result<f64> {
    let op = TwistedConvolution { op: s.clone(), cfg: *cfg };
    commutant_residual_with(&op, a, phi, cfg)
}

/// Trace per unit volume over the box `[−R, R]²`, scaled by `Ω_ℓ/2`.
///
/// The diagonal of the twisted-convolution kernel is the constant
/// `f_S(0)/(2πℓ²)`; it is integrated by Gauss–Legendre over the box.
pub fn folner_trace(s: &CoefficientOperator, half_width: f64, cfg: &MagneticConfig) -> Result<Complex64> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Domain(format!("box half-width must be positive (got {half_width})")));
    }
    let diagonal = kernel_at_zero(s, cfg) * cfg.idos_scale();
    let quad = QuadratureSpec { half_width, nodes: 8 };
    let integral: Complex64 = quad.points()?.iter().map(|(_, w)| diagonal * *w).sum();
    let volume = 4.0 * half_width * half_width;
    Ok(integral * (cfg.omega_ell() / 2.0) / volume)
}

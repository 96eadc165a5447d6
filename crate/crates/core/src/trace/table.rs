use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extrapolation model attached to a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationModel {
    /// Least squares on `value(N) = L + c / log N`.
    LogInverse,
    /// Polynomial interpolation in `x`, evaluated at `x = 0`.
    RichardsonX,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub param: f64,
    pub raw: Complex64,
    pub accelerated: Option<Complex64>,
}

/// Sequence of estimates converging to a limit, with its extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub label: String,
    pub rows: Vec<ConvergenceRow>,
    pub model: ExtrapolationModel,
    pub extrapolated: Option<Complex64>,
    pub residual: Option<f64>,
    pub warnings: Vec<String>,
}

impl ConvergenceTable {
    pub fn new(label: impl Into<String>, rows: Vec<ConvergenceRow>) -> Self {
        Self {
            label: label.into(),
            rows,
            model: ExtrapolationModel::None,
            extrapolated: None,
            residual: None,
            warnings: Vec::new(),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.param).collect()
    }

    pub fn raw(&self) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.raw).collect()
    }

    /// Accelerated value of the last row, when the engine provides one.
    pub fn last_accelerated(&self) -> Option<Complex64> {
        self.rows.last().and_then(|r| r.accelerated)
    }

    /// Fits the raw column with `L + c/log N`.
    pub fn fit_log_inverse(mut self) -> Self {
        let (ns, ys): (Vec<f64>, Vec<Complex64>) = self.rows.iter().map(|r| (r.param, r.raw)).unzip();
        match log_inverse_fit(&ns, &ys) {
            Ok(fit) => {
                self.model = ExtrapolationModel::LogInverse;
                self.extrapolated = Some(fit.limit);
                self.residual = Some(fit.residual);
            }
            Err(e) => self.warnings.push(format!("no extrapolation: {e}")),
        }
        self
    }

    /// Extrapolates the raw column to `x = 0` by Richardson/Neville.
    pub fn fit_richardson(mut self) -> Self {
        let (xs, ys): (Vec<f64>, Vec<Complex64>) = self.rows.iter().map(|r| (r.param, r.raw)).unzip();
        match richardson_at_zero(&xs, &ys) {
            Ok((limit, residual)) => {
                self.model = ExtrapolationModel::RichardsonX;
                self.extrapolated = Some(limit);
                self.residual = Some(residual);
            }
            Err(e) => self.warnings.push(format!("no extrapolation: {e}")),
        }
        self
    }

    /// CSV with columns `param,raw,accelerated,extrapolated,residual`
    /// holding real parts, followed by the imaginary parts.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("param,raw,accelerated,extrapolated,residual,raw_im,accelerated_im,extrapolated_im\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{},{},{},{:.17e},{},{}",
                row.param,
                row.raw.re,
                opt(row.accelerated.map(|a| a.re)),
                opt(self.extrapolated.map(|e| e.re)),
                opt(self.residual),
                row.raw.im,
                opt(row.accelerated.map(|a| a.im)),
                opt(self.extrapolated.map(|e| e.im)),
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogInverseFit {
    pub limit: Complex64,
    pub slope: Complex64,
    /// Root-mean-square misfit.
    pub residual: f64,
}

/// Least-squares fit of `y = L + c / log N` over at least three points.
pub fn log_inverse_fit(ns: &[f64], ys: &[Complex64]) -> Result<LogInverseFit> {
    if ns.len() != ys.len() || ns.len() < 3 {
        return Err(Error::Domain(format!(
            "log-inverse fit needs at least 3 points (got {})",
            ns.len()
        )));
    }
    if ns.iter().any(|&n| n.is_nan() || n <= 1.0) {
        return Err(Error::Domain("log-inverse fit needs N > 1".into()));
    }
    let us: Vec<f64> = ns.iter().map(|n| 1.0 / n.ln()).collect();
    let k = us.len() as f64;
    let mu = us.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<Complex64>() / k;
    let suu: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
    if suu <= 0.0 {
        return Err(Error::Domain("log-inverse fit needs distinct N".into()));
    }
    let suy: Complex64 = us.iter().zip(ys).map(|(u, y)| (y - my) * (u - mu)).sum();
    let slope = suy / suu;
    let limit = my - slope * mu;
    let residual = (us
        .iter()
        .zip(ys)
        .map(|(u, y)| (y - limit - slope * u).norm_sqr())
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(LogInverseFit { limit, slope, residual })
}

fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i] * xj - p[i + 1] * xi) / (xj - xi);
        }
    }
    p[0]
}

/// Value at `x = 0` of the interpolating polynomial through all points,
/// with the change against dropping the point farthest from zero as the
/// error estimate.
pub fn richardson_at_zero(xs: &[f64], ys: &[Complex64]) -> Result<(Complex64, f64)> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Domain(format!(
            "Richardson extrapolation needs at least 3 points (got {})",
            xs.len()
        )));
    }
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain("Richardson grid must be positive".into()));
    }
    for i in 0..xs.len() {
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(Error::Domain("Richardson grid points must be distinct".into()));
            }
        }
    }
    let full = neville_at_zero(xs, ys);
    let far = (0..xs.len())
        .max_by(|&a, &b| xs[a].total_cmp(&xs[b]))
        .expect("non-empty grid");
    let (xr, yr): (Vec<f64>, Vec<Complex64>) = xs
        .iter()
        .zip(ys)
        .enumerate()
        .filter(|(i, _)| *i != far)
        .map(|(_, (x, y))| (*x, *y))
        .unzip();
    let reduced = neville_at_zero(&xr, &yr);
    Ok((full, (full - reduced).norm()))
}

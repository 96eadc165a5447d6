use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::Point2D;

/// Periodic uniform grid on `[−R, R)²` with nodes `−R + i·h`, `h = 2R/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub half_width: f64,
    pub nodes: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) || nodes < 2 {
            return Err(Error::Resource(format!(
                "grid needs positive extent and at least 2 nodes (got R={half_width}, n={nodes})"
            )));
        }
        Ok(Self { half_width, nodes })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.nodes as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn point(&self, i1: usize, i2: usize) -> Point2D {
        Point2D::new(self.coord(i1), self.coord(i2))
    }

    pub fn len(&self) -> usize {
        self.nodes * self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    /// Trapezoid weight `h²`.
    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }
}

/// Complex samples on a [`UniformGrid`], row-major in `(i1, i2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: UniformGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn sample<F: Fn(Point2D) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let n = grid.nodes;
        let values = (0..n * n).map(|idx| f(grid.point(idx / n, idx % n))).collect();
        Self { grid, values }
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[i1 * self.grid.nodes + i2]
    }

    /// Discrete `L²` norm with trapezoid weights.
    pub fn norm(&self) -> f64 {
        (self.grid.cell_area() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete inner product `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        self.grid.cell_area()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Largest modulus on the outermost ring of nodes.
    pub fn boundary_sup(&self) -> f64 {
        let n = self.grid.nodes;
        (0..n)
            .flat_map(|i| [(0, i), (n - 1, i), (i, 0), (i, n - 1)])
            .map(|(a, b)| self.at(a, b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,x2,re,im\n");
        let n = self.grid.nodes;
        for i1 in 0..n {
            for i2 in 0..n {
                let p = self.grid.point(i1, i2);
                let v = self.at(i1, i2);
                let _ = writeln!(out, "{:e},{:e},{:e},{:e}", p.x1, p.x2, v.re, v.im);
            }
        }
        out
    }

    /// Parses the CSV written by [`Self::to_csv`]; the grid is recovered
    /// from the node count and the first coordinate.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("grid csv line {}: {e}", lineno + 1)))?;
            if fields.len() != 4 {
                return Err(Error::Parse(format!("grid csv line {}: expected 4 fields", lineno + 1)));
            }
            rows.push(fields);
        }
        let n = (rows.len() as f64).sqrt().round() as usize;
        if n < 2 || n * n != rows.len() {
            return Err(Error::Parse(format!("grid csv has {} rows, not a square grid", rows.len())));
        }
        let grid = UniformGrid::new(-rows[0][0], n)?;
        let values = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
        Ok(Self { grid, values })
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

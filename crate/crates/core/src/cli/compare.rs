//! Cross-engine comparison of every trace formula on one operator.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::EngineGap;
use super::Budget;
use crate::algebra::{weighted_product, CoefficientOperator, Form};
use crate::dixmier::{default_checkpoints, dixmier_estimate, eigen_sequence, Truncation};
use crate::error::Result;
use crate::trace::{shell_dimension, tau_diagonal, tau_ordered_basis, tau_residue, tau_shell, ConvergenceTable};

/// Per-engine tolerances against the diagonal sum.
pub const RESIDUE_TOL: f64 = 1e-3;
pub const SHELL_RAW_TOL: f64 = 1e-2;
pub const SHELL_ACCELERATED_TOL: f64 = 1e-12;
pub const ORDERED_TOL: f64 = 5e-2;
pub const DIXMIER_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: Complex64,
    pub gaps: Vec<EngineGap>,
    pub tables: BTreeMap<String, ConvergenceTable>,
    pub warnings: Vec<String>,
}

impl Comparison {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().filter_map(|g| g.gap).fold(0.0, f64::max)
    }

    /// True when every engine that produced a value is within tolerance.
    pub fn within_tolerance(&self) -> bool {
        self.gaps.iter().all(|g| g.gap.is_none_or(|gap| gap <= g.tolerance))
    }

    fn push(&mut self, engine: &str, value: Option<Complex64>, tolerance: f64) {
        self.gaps.push(EngineGap {
            engine: engine.into(),
            value: value.map(|v| v.re),
            gap: value.map(|v| (v - self.reference).norm()),
            tolerance,
        });
    }
}

/// Runs the diagonal, residue, shell, ordered-basis and Dixmier engines on
/// `s` and reports each gap to the diagonal sum.
pub fn compare(s: &CoefficientOperator, lambda: f64, budget: &Budget) -> Result<Comparison> {
    let reference = tau_diagonal(s);
    let mut cmp = Comparison {
        reference,
        gaps: Vec::new(),
        tables: BTreeMap::new(),
        warnings: Vec::new(),
    };
    cmp.push("diagonal", Some(reference), 0.0);

    let residue = tau_residue(s, lambda, &budget.x_grid)?;
    cmp.push("residue", residue.extrapolated, RESIDUE_TOL);
    cmp.tables.insert("residue".into(), residue);

    let shell = tau_shell(s, &budget.n_grid)?;
    cmp.push("shell_raw", shell.extrapolated, SHELL_RAW_TOL);
    cmp.push("shell_accelerated", shell.last_accelerated(), SHELL_ACCELERATED_TOL);
    cmp.tables.insert("shell".into(), shell);

    let ordered_grid: Vec<usize> = budget.ordered_shells.iter().map(|&e| shell_dimension(e) - 1).collect();
    let ordered = tau_ordered_basis(s, &ordered_grid)?;
    cmp.push("ordered_basis_doubled", ordered.extrapolated.map(|v| 2.0 * v), ORDERED_TOL);
    cmp.tables.insert("ordered_basis".into(), ordered);

    if s.is_zero() {
        cmp.push("dixmier", Some(Complex64::new(0.0, 0.0)), DIXMIER_TOL);
    } else {
        let dix = weighted_product(s, Form::Left, lambda, lambda, 1.0)
            .and_then(|p| eigen_sequence(&p, Truncation::matched_to_weight(budget.dixmier_shells, s.support_dim())))
            .and_then(|seq| {
                let cps = default_checkpoints(&seq, 8)?;
                dixmier_estimate(&seq, &cps)
            });
        match dix {
            Ok(table) => {
                cmp.push("dixmier", table.extrapolated, DIXMIER_TOL);
                cmp.tables.insert("dixmier".into(), table);
            }
            Err(e) => {
                cmp.warnings.push(format!("dixmier engine unavailable: {e}"));
                cmp.push("dixmier", None, DIXMIER_TOL);
            }
        }
    }
    for (name, t) in &cmp.tables {
        cmp.warnings.extend(t.warnings.iter().map(|w| format!("{name}: {w}")));
    }
    Ok(cmp)
}

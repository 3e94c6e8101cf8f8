//! Cross-checks a fill against the linear oracle on the same window.

use std::fmt;

use crate::fill::{FillError, FillStatus, FillStrategy, Worklist};
use crate::layout::Layout;
use crate::oracle::{classify_and_solve, Classification};
use crate::overlay::Overlay;
use crate::scalar::Scalar;
use crate::window::{Bounds, Coord};

/// A cell where the fill and the oracle disagree. `None` means the side
/// leaves the cell undetermined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMismatch {
    pub coord: Coord,
    pub fill: Option<Scalar>,
    pub oracle: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDiff {
    pub fill_status: &'static str,
    pub oracle_status: &'static str,
    pub status_agrees: bool,
    pub mismatches: Vec<CellMismatch>,
}

impl OracleDiff {
    pub fn agrees(&self) -> bool {
        self.status_agrees && self.mismatches.is_empty()
    }
}

impl fmt::Display for OracleDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fill: {}", self.fill_status)?;
        writeln!(f, "oracle: {}", self.oracle_status)?;
        for m in &self.mismatches {
            let show = |v: &Option<Scalar>| v.as_ref().map_or("?".to_string(), |s| s.to_string());
            writeln!(
                f,
                "mismatch at ({}, {}): fill {} oracle {}",
                m.coord.0,
                m.coord.1,
                show(&m.fill),
                show(&m.oracle)
            )?;
        }
        writeln!(f, "{}", if self.agrees() { "agree" } else { "disagree" })
    }
}

/// Runs the default worklist fill and the oracle and compares them.
pub fn oracle_equals_fill(
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<OracleDiff, FillError> {
    oracle_diff_with(&Worklist, overlay, layout, bounds)
}

/// Agreement means one of
///
/// * fill `complete` and oracle `unique`, with every cell equal;
/// * fill `partial` and oracle `underdetermined`, with every cell the fill
///   knows pinned by the oracle to the same value;
/// * both `inconsistent`.
pub fn oracle_diff_with(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<OracleDiff, FillError> {
    let result = strategy.fill(overlay, layout, bounds)?;
    let class = classify_and_solve(overlay, layout, bounds)?;
    let status_agrees = matches!(
        (&result.status, &class),
        (FillStatus::Complete, Classification::Unique { .. })
            | (
                FillStatus::Partial { .. },
                Classification::Underdetermined { .. }
            )
            | (
                FillStatus::Inconsistent { .. },
                Classification::Inconsistent { .. }
            )
    );
    let oracle_value = |coord: Coord| -> Option<Scalar> {
        match &class {
            Classification::Unique { assignment } => assignment.value(coord.0, coord.1).cloned(),
            Classification::Underdetermined { pinned, .. } => pinned.get(&coord).cloned(),
            Classification::Inconsistent { .. } => None,
        }
    };
    let mut mismatches = Vec::new();
    if !matches!(class, Classification::Inconsistent { .. }) {
        for coord in bounds.coords() {
            let fill = result.window.value(coord.0, coord.1).cloned();
            let oracle = oracle_value(coord);
            // Cells only the oracle determines are covered by the status check.
            let differs = match (&fill, &oracle) {
                (Some(a), Some(b)) => a != b,
                (Some(_), None) => true,
                (None, _) => false,
            };
            if differs {
                mismatches.push(CellMismatch {
                    coord,
                    fill,
                    oracle,
                });
            }
        }
    }
    Ok(OracleDiff {
        fill_status: result.status.label(),
        oracle_status: class.label(),
        status_agrees,
        mismatches,
    })
}

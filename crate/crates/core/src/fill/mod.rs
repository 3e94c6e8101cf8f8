//! Constructive filling of windows from layouts.
//!
//! Every fill procedure implements [`FillStrategy`] and is looked up by name in
//! a [`StrategyRegistry`]:
//!
//! * `worklist` slides the overlay over the window and solves any placement
//!   with exactly one unknown cell, rescanning in row-major batches until
//!   nothing changes;
//! * `shuffled` runs the same propagation with a seeded random placement order;
//! * `diagonal` follows the three-region construction for the stencil
//!   `b00 + b10 Y + b11 XY` with a diagonal layout;
//! * `oracle` solves the window's full linear system instead of propagating.

mod basis;
mod diagonal;
mod registry;
mod worklist;

use serde_json::json;
use thiserror::Error;

pub use basis::{
    basis_array, check_support_cases, contribution_growth, finite_contribution_report, superpose,
    CaseOutcome, ContributionReport, SupportCase, SupportCheck, SupportReport,
};
pub use diagonal::DiagonalFill;
pub use registry::{OracleSolve, StrategyOptions, StrategyRegistry};
pub use worklist::{ShuffledWorklist, Worklist};

use crate::layout::{Layout, LayoutError};
use crate::overlay::Overlay;
use crate::scalar::{Scalar, ScalarError};
use crate::window::{ArrayWindow, Bounds, Coord, WindowError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("overlay or layout does not have the required shape: {0}")]
    ShapeMismatch(String),
    #[error("unknown fill strategy `{0}`")]
    UnknownStrategy(String),
    #[error("coordinate ({}, {}) is not part of the layout", .0.0, .0.1)]
    CoordinateNotInLayout(Coord),
}

/// One solved cell: the overlay placed at `placement` determined `solved`
/// through the pivot coefficient `b[pivot.0][pivot.1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub placement: Coord,
    pub solved: Coord,
    pub pivot: (usize, usize),
    pub pivot_coeff: Scalar,
    pub value: Scalar,
}

impl Step {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "placement": [self.placement.0, self.placement.1],
            "solved": [self.solved.0, self.solved.1],
            "pivot": [self.pivot.0, self.pivot.1],
            "coefficient": self.pivot_coeff.to_string(),
            "value": self.value.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FillStatus {
    Complete,
    Partial {
        unfilled: Vec<Coord>,
    },
    /// A fully known placement (or, for the oracle, a prescription) whose
    /// equation does not hold.
    Inconsistent {
        witness: Coord,
        residual: Scalar,
    },
}

impl FillStatus {
    pub fn label(&self) -> &'static str {
        match self {
            FillStatus::Complete => "complete",
            FillStatus::Partial { .. } => "partial",
            FillStatus::Inconsistent { .. } => "inconsistent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillResult {
    pub window: ArrayWindow,
    pub status: FillStatus,
    pub steps: Vec<Step>,
}

impl FillResult {
    pub fn is_complete(&self) -> bool {
        self.status == FillStatus::Complete
    }

    /// Step log as JSON lines.
    pub fn steps_jsonl(&self) -> String {
        self.steps
            .iter()
            .map(|s| format!("{}\n", s.to_json()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.window.to_json();
        v["status"] = json!(self.status.label());
        match &self.status {
            FillStatus::Complete => {}
            FillStatus::Partial { unfilled } => {
                v["unfilled"] = json!(unfilled.len());
            }
            FillStatus::Inconsistent { witness, residual } => {
                v["witness"] = json!([witness.0, witness.1]);
                v["residual"] = json!(residual.to_string());
            }
        }
        v
    }
}

/// A named procedure that fills a window from an overlay and a layout.
pub trait FillStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn fill(
        &self,
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<FillResult, FillError>;
}

/// Fill with the default row-major worklist.
pub fn fill(overlay: &Overlay, layout: &Layout, bounds: Bounds) -> Result<FillResult, FillError> {
    Worklist.fill(overlay, layout, bounds)
}

/// Window holding just the layout values; checks field and bounds.
pub(crate) fn seed_window(
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<ArrayWindow, FillError> {
    if layout.field() != overlay.field() {
        return Err(ScalarError::MixedField {
            left: overlay.field(),
            right: layout.field(),
        }
        .into());
    }
    layout.check_within(&bounds)?;
    let mut w = ArrayWindow::unknown(bounds, overlay.field());
    for (&(r, c), v) in layout.prescribed() {
        w.set(r, c, v.clone())?;
    }
    Ok(w)
}

/// If every cell of the placement except `target` is known, solves for it.
pub(crate) fn solve_cell(
    overlay: &Overlay,
    w: &ArrayWindow,
    placement: Coord,
    target: Coord,
) -> Option<Step> {
    let (r, c) = placement;
    let pivot = ((r - target.0) as usize, (c - target.1) as usize);
    let pivot_coeff = overlay.coeff(pivot.0, pivot.1).clone();
    if pivot_coeff.is_zero() {
        return None;
    }
    let mut acc = Scalar::zero(overlay.field());
    for (coord, b) in overlay.placement_equation(r, c) {
        if coord == target {
            continue;
        }
        acc = &acc + &(&b * w.value(coord.0, coord.1)?);
    }
    // b_pivot * z + acc = 0
    let value = &(-acc) * &pivot_coeff.inv().expect("nonzero pivot");
    Some(Step {
        placement,
        solved: target,
        pivot,
        pivot_coeff,
        value,
    })
}

/// Post-fixpoint audit: the first fully known placement with a nonzero
/// residual, and the completeness of the window.
pub(crate) fn final_status(overlay: &Overlay, w: &ArrayWindow) -> FillStatus {
    let bounds = w.bounds();
    'placements: for (r, c) in overlay.placements(&bounds) {
        let mut acc = Scalar::zero(overlay.field());
        for (coord, b) in overlay.placement_equation(r, c) {
            match w.value(coord.0, coord.1) {
                Some(v) => acc = &acc + &(&b * v),
                None => continue 'placements,
            }
        }
        if !acc.is_zero() {
            return FillStatus::Inconsistent {
                witness: (r, c),
                residual: acc,
            };
        }
    }
    let unfilled = w.unknown_coords();
    if unfilled.is_empty() {
        FillStatus::Complete
    } else {
        FillStatus::Partial { unfilled }
    }
}

/// Re-derives a fill from its layout and step log. Returns `None` if any
/// step does not reproduce its recorded value.
pub fn replay(overlay: &Overlay, layout: &Layout, result: &FillResult) -> Option<ArrayWindow> {
    let mut w = seed_window(overlay, layout, result.window.bounds()).ok()?;
    for step in &result.steps {
        let again = solve_cell(overlay, &w, step.placement, step.solved)?;
        if again != *step {
            return None;
        }
        w.set(step.solved.0, step.solved.1, again.value).ok()?;
    }
    Some(w)
}

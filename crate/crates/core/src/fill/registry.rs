use std::collections::BTreeMap;

use super::{
    DiagonalFill, FillError, FillResult, FillStatus, FillStrategy, ShuffledWorklist, Worklist,
};
use crate::layout::Layout;
use crate::oracle::{Classification, LinearSystem};
use crate::overlay::Overlay;
use crate::window::{ArrayWindow, Bounds};

/// Parameters handed to strategy constructors.
#[derive(Debug, Clone, Copy, Default)]
pub struct StrategyOptions {
    pub seed: u64,
}

type Factory = fn(&StrategyOptions) -> Box<dyn FillStrategy>;

struct Entry {
    description: &'static str,
    factory: Factory,
}

/// Fill strategies by name.
pub struct StrategyRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// Registry holding `worklist`, `shuffled`, `diagonal` and `oracle`.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(
            "worklist",
            "row-major single-unknown propagation to a fixpoint",
            |_| Box::new(Worklist),
        );
        reg.register(
            "shuffled",
            "single-unknown propagation in a seeded random order",
            |opts| Box::new(ShuffledWorklist { seed: opts.seed }),
        );
        reg.register(
            "diagonal",
            "three-region construction for b00 + b10 Y + b11 XY with a diagonal layout",
            |_| Box::new(DiagonalFill),
        );
        reg.register(
            "oracle",
            "exact elimination of the window's full linear system",
            |_| Box::new(OracleSolve),
        );
        reg
    }

    /// Adds or replaces a strategy.
    pub fn register(&mut self, name: &'static str, description: &'static str, factory: Factory) {
        self.entries.insert(
            name,
            Entry {
                description,
                factory,
            },
        );
    }

    pub fn create(
        &self,
        name: &str,
        opts: &StrategyOptions,
    ) -> Result<Box<dyn FillStrategy>, FillError> {
        self.entries
            .get(name)
            .map(|e| (e.factory)(opts))
            .ok_or_else(|| FillError::UnknownStrategy(name.to_string()))
    }

    /// `(name, description)` pairs in name order.
    pub fn list(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(name, e)| (*name, e.description))
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Fills by solving the linear system; the step log is empty. Underdetermined
/// systems yield the cells that every solution agrees on.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSolve;

impl FillStrategy for OracleSolve {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn fill(
        &self,
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<FillResult, FillError> {
        super::seed_window(overlay, layout, bounds)?;
        let (window, status) = match LinearSystem::assemble(overlay, layout, bounds)?.classify() {
            Classification::Unique { assignment } => (assignment, FillStatus::Complete),
            Classification::Underdetermined { pinned, .. } => {
                let mut w = ArrayWindow::unknown(bounds, overlay.field());
                for ((r, c), v) in pinned {
                    w.set(r, c, v)?;
                }
                let unfilled = w.unknown_coords();
                (w, FillStatus::Partial { unfilled })
            }
            Classification::Inconsistent { certificate } => (
                ArrayWindow::unknown(bounds, overlay.field()),
                FillStatus::Inconsistent {
                    witness: certificate.trigger.coord(),
                    residual: certificate.rhs,
                },
            ),
        };
        Ok(FillResult {
            window,
            status,
            steps: Vec::new(),
        })
    }
}

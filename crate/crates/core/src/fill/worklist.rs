use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{final_status, seed_window, solve_cell, FillError, FillResult, FillStrategy};
use crate::layout::Layout;
use crate::overlay::Overlay;
use crate::window::{Bounds, Coord};

/// Propagation with row-major batches: each pass visits the pending placements
/// in row-major order, and placements touched by a solve are queued for the
/// next pass.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worklist;

/// Propagation that picks the next pending placement at random.
#[derive(Debug, Clone, Copy)]
pub struct ShuffledWorklist {
    pub seed: u64,
}

trait Schedule {
    fn push(&mut self, placement: Coord);
    fn pop(&mut self) -> Option<Coord>;
}

#[derive(Default)]
struct Batches {
    current: VecDeque<Coord>,
    next: BTreeSet<Coord>,
}

impl Schedule for Batches {
    fn push(&mut self, placement: Coord) {
        self.next.insert(placement);
    }

    fn pop(&mut self) -> Option<Coord> {
        if self.current.is_empty() {
            self.current = std::mem::take(&mut self.next).into_iter().collect();
        }
        self.current.pop_front()
    }
}

struct Shuffled {
    rng: ChaCha8Rng,
    pending: Vec<Coord>,
    queued: HashSet<Coord>,
}

impl Schedule for Shuffled {
    fn push(&mut self, placement: Coord) {
        if self.queued.insert(placement) {
            self.pending.push(placement);
        }
    }

    fn pop(&mut self) -> Option<Coord> {
        if self.pending.is_empty() {
            return None;
        }
        let k = self.rng.gen_range(0..self.pending.len());
        let p = self.pending.swap_remove(k);
        self.queued.remove(&p);
        Some(p)
    }
}

fn propagate(
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
    schedule: &mut dyn Schedule,
) -> Result<FillResult, FillError> {
    let mut w = seed_window(overlay, layout, bounds)?;
    let offsets: Vec<(i64, i64)> = overlay
        .nonzero_entries()
        .map(|((i, j), _)| (i as i64, j as i64))
        .collect();
    for p in overlay.placements(&bounds) {
        schedule.push(p);
    }
    let mut steps = Vec::new();
    while let Some((r, c)) = schedule.pop() {
        let mut unknown = offsets
            .iter()
            .map(|(i, j)| (r - i, c - j))
            .filter(|&(x, y)| !w.is_known(x, y));
        let (Some(target), None) = (unknown.next(), unknown.next()) else {
            continue;
        };
        let Some(step) = solve_cell(overlay, &w, (r, c), target) else {
            continue;
        };
        w.set(target.0, target.1, step.value.clone())?;
        steps.push(step);
        for (i, j) in &offsets {
            let p = (target.0 + i, target.1 + j);
            if overlay.placement_fits(&bounds, p) {
                schedule.push(p);
            }
        }
    }
    let status = final_status(overlay, &w);
    Ok(FillResult {
        window: w,
        status,
        steps,
    })
}

impl FillStrategy for Worklist {
    fn name(&self) -> &'static str {
        "worklist"
    }

    fn fill(
        &self,
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<FillResult, FillError> {
        propagate(overlay, layout, bounds, &mut Batches::default())
    }
}

impl FillStrategy for ShuffledWorklist {
    fn name(&self) -> &'static str {
        "shuffled"
    }

    fn fill(
        &self,
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<FillResult, FillError> {
        let mut schedule = Shuffled {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            pending: Vec::new(),
            queued: HashSet::new(),
        };
        propagate(overlay, layout, bounds, &mut schedule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fill::{replay, FillStatus};
    use crate::layout::ValueSource;
    use crate::scalar::{FieldDescriptor, Scalar};
    use crate::template::Template;
    use proptest::prelude::*;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn int(v: i64) -> Scalar {
        Scalar::from_i64(v, Q)
    }

    fn overlay(terms: &[((u32, u32), i64)]) -> Overlay {
        let t = Template::from_terms(Q, terms.iter().map(|(e, c)| (*e, int(*c)))).unwrap();
        Overlay::from_template(&t).unwrap()
    }

    fn example() -> Overlay {
        overlay(&[((1, 1), 1), ((1, 0), 3), ((0, 1), 2), ((0, 0), -1)])
    }

    #[test]
    fn zero_layout_gives_zero_window() {
        let b = Bounds::new(-2, 4, -3, 3).unwrap();
        let lay = Layout::standard(&example(), b, 0, 0, &ValueSource::Zero).unwrap();
        let res = Worklist.fill(&example(), &lay, b).unwrap();
        assert_eq!(res.status, FillStatus::Complete);
        assert!(res.window.known_all_zero());
    }

    #[test]
    fn empty_layout_stays_partial() {
        let b = Bounds::new(-1, 3, -1, 3).unwrap();
        let lay = Layout::custom(Q, Default::default()).unwrap();
        let res = Worklist.fill(&example(), &lay, b).unwrap();
        assert!(matches!(res.status, FillStatus::Partial { ref unfilled } if unfilled.len() == 25));
        assert!(res.steps.is_empty());
    }

    #[test]
    fn contradiction_is_reported() {
        let b = Bounds::new(-1, 3, -1, 3).unwrap();
        let lay = Layout::standard(&example(), b, 0, 0, &ValueSource::Delta((0, 0)))
            .unwrap()
            .with_prescription((1, 1), int(0));
        let res = Worklist.fill(&example(), &lay, b).unwrap();
        assert!(matches!(res.status, FillStatus::Inconsistent { .. }));
    }

    #[test]
    fn single_row_overlay_fills_both_ways() {
        // m = 0: A_{r,c} + 2 A_{r,c-1} + 5 A_{r,c-2} = 0 with columns 0 and 1 given
        let o = overlay(&[((0, 0), 1), ((0, 1), 2), ((0, 2), 5)]);
        let b = Bounds::new(-2, 2, -4, 5).unwrap();
        let lay = Layout::standard(&o, b, 0, 0, &ValueSource::Random { seed: 3 }).unwrap();
        let res = Worklist.fill(&o, &lay, b).unwrap();
        assert!(res.is_complete());
    }

    proptest! {
        #[test]
        fn schedules_agree(seed in any::<u64>(), values in any::<u64>()) {
            let b = Bounds::new(-3, 4, -3, 4).unwrap();
            let lay = Layout::standard(&example(), b, -1, 1, &ValueSource::Random { seed: values }).unwrap();
            let base = Worklist.fill(&example(), &lay, b).unwrap();
            let shuffled = ShuffledWorklist { seed }.fill(&example(), &lay, b).unwrap();
            prop_assert!(base.is_complete());
            prop_assert_eq!(&base.window, &shuffled.window);
            prop_assert_eq!(&base.status, &shuffled.status);
            prop_assert_eq!(replay(&example(), &lay, &shuffled), Some(shuffled.window.clone()));
        }

        #[test]
        fn deterministic(values in any::<u64>()) {
            let b = Bounds::new(-2, 3, -2, 3).unwrap();
            let lay = Layout::standard(&example(), b, 0, 0, &ValueSource::Random { seed: values }).unwrap();
            prop_assert_eq!(
                Worklist.fill(&example(), &lay, b).unwrap(),
                Worklist.fill(&example(), &lay, b).unwrap()
            );
        }
    }
}

use super::{final_status, seed_window, solve_cell, FillError, FillResult, FillStrategy, Step};
use crate::layout::{Layout, Provenance};
use crate::overlay::Overlay;
use crate::window::{ArrayWindow, Bounds, Coord};

/// Region-by-region construction for `b00 + b10 Y + b11 XY` (all three
/// coefficients nonzero) from a diagonal layout with anchor row `k`:
///
/// 1. cells right of the diagonal, by increasing distance from it, pivoting on `b10`;
/// 2. rows above `k`, left of the diagonal, moving up and left, pivoting on `b11`;
/// 3. rows below `k`, left of the diagonal, moving down and left, pivoting on `b00`.
///
/// Cells whose inputs fall outside the window are left unknown.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagonalFill;

fn check_shape(overlay: &Overlay) -> Result<(), FillError> {
    let ok = overlay.m() == 1
        && overlay.n() == 1
        && overlay.coeff(0, 1).is_zero()
        && [(0, 0), (1, 0), (1, 1)]
            .iter()
            .all(|&(i, j)| !overlay.coeff(i, j).is_zero());
    if ok {
        Ok(())
    } else {
        Err(FillError::ShapeMismatch(
            "diagonal fill needs the stencil b00 + b10 Y + b11 XY with nonzero coefficients".into(),
        ))
    }
}

struct Regions<'a> {
    overlay: &'a Overlay,
    window: ArrayWindow,
    steps: Vec<Step>,
}

impl Regions<'_> {
    fn solve(&mut self, placement: Coord, target: Coord) {
        let b = self.window.bounds();
        if !b.contains(target) || self.window.is_known(target.0, target.1) {
            return;
        }
        if !self.overlay.placement_fits(&b, placement) {
            return;
        }
        if let Some(step) = solve_cell(self.overlay, &self.window, placement, target) {
            self.window
                .set(target.0, target.1, step.value.clone())
                .expect("target in bounds");
            self.steps.push(step);
        }
    }
}

impl FillStrategy for DiagonalFill {
    fn name(&self) -> &'static str {
        "diagonal"
    }

    fn fill(
        &self,
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<FillResult, FillError> {
        check_shape(overlay)?;
        let Provenance::Diagonal { k } = layout.provenance() else {
            return Err(FillError::ShapeMismatch(
                "diagonal fill needs a diagonal layout".into(),
            ));
        };
        let mut st = Regions {
            overlay,
            window: seed_window(overlay, layout, bounds)?,
            steps: Vec::new(),
        };
        let b = bounds;

        // Region 1: A_{x,y} with y - x = p + 1 from the placement at (x+1, y).
        for dist in 1..=(b.c_max - b.r_min).max(0) {
            for x in b.r_min..=b.r_max {
                let y = x + dist;
                st.solve((x + 1, y), (x, y));
            }
        }
        // Region 2: rows k-1, k-2, ... right to left, from the placement at (x+1, c+1).
        for x in (b.r_min..k).rev() {
            for c in (b.c_min..x).rev() {
                st.solve((x + 1, c + 1), (x, c));
            }
        }
        // Region 3: rows k+1, k+2, ... right to left, from the placement at (x, c).
        for x in k + 1..=b.r_max {
            for c in (b.c_min..x).rev() {
                st.solve((x, c), (x, c));
            }
        }

        let status = final_status(overlay, &st.window);
        Ok(FillResult {
            window: st.window,
            status,
            steps: st.steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fill::{FillStatus, Worklist};
    use crate::layout::ValueSource;
    use crate::scalar::{FieldDescriptor, Scalar};
    use crate::template::Template;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn int(v: i64) -> Scalar {
        Scalar::from_i64(v, Q)
    }

    fn stencil(b00: i64, b10: i64, b11: i64) -> Overlay {
        let t = Template::from_terms(
            Q,
            [((0, 0), int(b00)), ((1, 0), int(b10)), ((1, 1), int(b11))],
        )
        .unwrap();
        Overlay::from_template(&t).unwrap()
    }

    #[test]
    fn agrees_with_worklist() {
        let o = stencil(-1, 3, 1);
        let b = Bounds::new(-4, 0, -4, 0).unwrap();
        let lay = Layout::diagonal(0, b, Q, &ValueSource::Delta((0, 0))).unwrap();
        let lay = lay
            .with_values(&ValueSource::Explicit(
                lay.coords()
                    .into_iter()
                    .filter(|(r, c)| r == c)
                    .map(|c| (c, int(1)))
                    .collect(),
            ))
            .unwrap();
        let diag = DiagonalFill.fill(&o, &lay, b).unwrap();
        let generic = Worklist.fill(&o, &lay, b).unwrap();
        assert_eq!(diag.status, FillStatus::Complete);
        assert_eq!(diag.window, generic.window);
    }

    #[test]
    fn zero_layout() {
        let o = stencil(2, -5, 7);
        let b = Bounds::new(-3, 2, -3, 2).unwrap();
        let lay = Layout::diagonal(2, b, Q, &ValueSource::Zero).unwrap();
        let res = DiagonalFill.fill(&o, &lay, b).unwrap();
        assert!(res.is_complete());
        assert!(res.window.known_all_zero());
    }

    #[test]
    fn rejects_other_shapes() {
        let b = Bounds::new(-2, 0, -2, 0).unwrap();
        let lay = Layout::diagonal(0, b, Q, &ValueSource::Zero).unwrap();
        let full = Overlay::from_template(
            &Template::from_terms(
                Q,
                [
                    ((0, 0), int(1)),
                    ((0, 1), int(1)),
                    ((1, 0), int(1)),
                    ((1, 1), int(1)),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            DiagonalFill.fill(&full, &lay, b),
            Err(FillError::ShapeMismatch(_))
        ));
        let std_layout = Layout::custom(Q, Default::default()).unwrap();
        assert!(matches!(
            DiagonalFill.fill(&stencil(1, 1, 1), &std_layout, b),
            Err(FillError::ShapeMismatch(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn worklist_covers_region_construction(
            coeffs in proptest::array::uniform3(1i64..7),
            k in -2i64..=2,
            rows in (-4i64..=0, 0i64..=3),
            cols in (-4i64..=0, 0i64..=3),
            seed in proptest::prelude::any::<u64>(),
        ) {
            let o = stencil(coeffs[0], -coeffs[1], coeffs[2]);
            let b = Bounds::new(k + rows.0, k + rows.1, k + cols.0, k + cols.1).unwrap();
            let lay = Layout::diagonal(k, b, Q, &ValueSource::Random { seed }).unwrap();
            let diag = DiagonalFill.fill(&o, &lay, b).unwrap();
            let generic = Worklist.fill(&o, &lay, b).unwrap();
            for ((r, c), v) in diag.window.known() {
                proptest::prop_assert_eq!(generic.window.value(r, c), Some(v));
            }
        }
    }
}

//! Basis arrays `E(i,j)` of a layout and the checks built on them.

use std::fmt;

use rayon::prelude::*;

use super::{FillError, FillStrategy};
use crate::layout::{Layout, Provenance, ValueSource};
use crate::overlay::Overlay;
use crate::scalar::Scalar;
use crate::window::{ArrayWindow, Bounds, Coord};

/// The fill whose layout values are one at `at` and zero at every other
/// layout coordinate.
pub fn basis_array(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    at: Coord,
    bounds: Bounds,
) -> Result<ArrayWindow, FillError> {
    if !layout.contains(at) {
        return Err(FillError::CoordinateNotInLayout(at));
    }
    let indicator = layout.with_values(&ValueSource::Delta(at))?;
    Ok(strategy.fill(overlay, &indicator, bounds)?.window)
}

fn all_basis_arrays(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    coords: &[Coord],
    bounds: Bounds,
) -> Result<Vec<ArrayWindow>, FillError> {
    coords
        .par_iter()
        .map(|&at| basis_array(strategy, overlay, layout, at, bounds))
        .collect()
}

/// Vanishing claims for `E(i,j)` on an `(m+1) x (n+1)` overlay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportCase {
    /// `j >= m`: zero for columns `l < j`.
    RightOfColumn,
    /// `j < 0`: zero for columns `l > j`.
    LeftOfColumn,
    /// `i >= n`: zero for rows `k < i`.
    BelowRow,
    /// `i < 0`: zero for rows `k > i`.
    AboveRow,
}

impl SupportCase {
    pub fn number(&self) -> u8 {
        match self {
            SupportCase::RightOfColumn => 1,
            SupportCase::LeftOfColumn => 2,
            SupportCase::BelowRow => 3,
            SupportCase::AboveRow => 4,
        }
    }

    /// Cases whose hypothesis holds for the basis coordinate `(i, j)`.
    pub fn applicable(overlay: &Overlay, (i, j): Coord) -> Vec<SupportCase> {
        let (m, n) = (overlay.m() as i64, overlay.n() as i64);
        let mut out = Vec::new();
        if j >= m {
            out.push(SupportCase::RightOfColumn);
        }
        if j < 0 {
            out.push(SupportCase::LeftOfColumn);
        }
        if i >= n {
            out.push(SupportCase::BelowRow);
        }
        if i < 0 {
            out.push(SupportCase::AboveRow);
        }
        out
    }

    /// Whether `(k, l)` lies in the region where `E(i,j)` is claimed to vanish.
    pub fn claims_zero(&self, (i, j): Coord, (k, l): Coord) -> bool {
        match self {
            SupportCase::RightOfColumn => l < j,
            SupportCase::LeftOfColumn => l > j,
            SupportCase::BelowRow => k < i,
            SupportCase::AboveRow => k > i,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub case: SupportCase,
    /// Known cells of the claimed region.
    pub checked: usize,
    /// Cells of the claimed region the fill could not determine.
    pub unchecked: usize,
    pub counterexamples: Vec<(Coord, Scalar)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCheck {
    pub at: Coord,
    /// Empty when no case applies to `at`.
    pub outcomes: Vec<CaseOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub checks: Vec<SupportCheck>,
}

impl SupportReport {
    pub fn counterexample_count(&self) -> usize {
        self.checks
            .iter()
            .flat_map(|c| &c.outcomes)
            .map(|o| o.counterexamples.len())
            .sum()
    }

    pub fn check_for(&self, at: Coord) -> Option<&SupportCheck> {
        self.checks.iter().find(|c| c.at == at)
    }
}

impl fmt::Display for SupportReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let (i, j) = check.at;
            if check.outcomes.is_empty() {
                writeln!(f, "E({i},{j}): no claim")?;
                continue;
            }
            for o in &check.outcomes {
                let verdict = if o.counterexamples.is_empty() {
                    "confirmed".to_string()
                } else {
                    format!("{} counterexample(s)", o.counterexamples.len())
                };
                writeln!(
                    f,
                    "E({i},{j}): case {}: {verdict} ({} checked, {} undetermined)",
                    o.case.number(),
                    o.checked,
                    o.unchecked
                )?;
                for ((k, l), v) in &o.counterexamples {
                    writeln!(f, "  E({i},{j})[{k},{l}] = {v}")?;
                }
            }
        }
        writeln!(f, "total counterexamples: {}", self.counterexample_count())
    }
}

/// Builds every basis array of a standard layout and scans the regions each
/// applicable case claims to be zero.
pub fn check_support_cases(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<SupportReport, FillError> {
    if !matches!(layout.provenance(), Provenance::Standard { .. }) {
        return Err(FillError::ShapeMismatch(
            "support cases are stated for standard layouts".into(),
        ));
    }
    let coords = layout.coords();
    let arrays = all_basis_arrays(strategy, overlay, layout, &coords, bounds)?;
    let checks = coords
        .iter()
        .zip(&arrays)
        .map(|(&at, e)| {
            let outcomes = SupportCase::applicable(overlay, at)
                .into_iter()
                .map(|case| {
                    let mut outcome = CaseOutcome {
                        case,
                        checked: 0,
                        unchecked: 0,
                        counterexamples: Vec::new(),
                    };
                    for cell in bounds.coords().filter(|&cell| case.claims_zero(at, cell)) {
                        match e.value(cell.0, cell.1) {
                            Some(v) => {
                                outcome.checked += 1;
                                if !v.is_zero() {
                                    outcome.counterexamples.push((cell, v.clone()));
                                }
                            }
                            None => outcome.unchecked += 1,
                        }
                    }
                    outcome
                })
                .collect();
            SupportCheck { at, outcomes }
        })
        .collect();
    Ok(SupportReport { checks })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionReport {
    pub at: Coord,
    /// Layout coordinates `(i, j)` with `E(i,j)` nonzero at `at`, and that value.
    pub contributors: Vec<(Coord, Scalar)>,
    /// Layout coordinates whose basis array leaves `at` undetermined.
    pub undetermined: Vec<Coord>,
    pub layout_size: usize,
}

/// Which basis arrays are nonzero at the cell `at`.
pub fn finite_contribution_report(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
    at: Coord,
) -> Result<ContributionReport, FillError> {
    let coords = layout.coords();
    let arrays = all_basis_arrays(strategy, overlay, layout, &coords, bounds)?;
    let mut report = ContributionReport {
        at,
        contributors: Vec::new(),
        undetermined: Vec::new(),
        layout_size: coords.len(),
    };
    for (coord, e) in coords.into_iter().zip(arrays) {
        match e.value(at.0, at.1) {
            Some(v) if !v.is_zero() => report.contributors.push((coord, v.clone())),
            Some(_) => {}
            None => report.undetermined.push(coord),
        }
    }
    Ok(report)
}

/// Contributor counts at `at` for a sequence of `(layout, window)` pairs,
/// typically nested windows of growing size.
pub fn contribution_growth(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    cases: &[(Layout, Bounds)],
    at: Coord,
) -> Result<Vec<usize>, FillError> {
    cases
        .iter()
        .map(|(layout, bounds)| {
            finite_contribution_report(strategy, overlay, layout, *bounds, at)
                .map(|r| r.contributors.len())
        })
        .collect()
}

/// `sum d_ij E(i,j)` over the layout coordinates with nonzero value `d_ij`.
pub fn superpose(
    strategy: &dyn FillStrategy,
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<ArrayWindow, FillError> {
    let active: Vec<(Coord, Scalar)> = layout
        .prescribed()
        .iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(c, d)| (*c, d.clone()))
        .collect();
    if active.is_empty() {
        let zero = layout.with_values(&ValueSource::Zero)?;
        return Ok(strategy.fill(overlay, &zero, bounds)?.window);
    }
    let coords: Vec<Coord> = active.iter().map(|(c, _)| *c).collect();
    let arrays = all_basis_arrays(strategy, overlay, layout, &coords, bounds)?;
    let terms: Vec<(Scalar, &ArrayWindow)> = active
        .into_iter()
        .map(|(_, d)| d)
        .zip(arrays.iter())
        .collect();
    Ok(ArrayWindow::linear_combine(&terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fill::{fill, Worklist};
    use crate::scalar::FieldDescriptor;
    use crate::template::Template;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn int(v: i64) -> Scalar {
        Scalar::from_i64(v, Q)
    }

    fn example() -> Overlay {
        let t = Template::from_terms(
            Q,
            [
                ((1, 1), int(1)),
                ((1, 0), int(3)),
                ((0, 1), int(2)),
                ((0, 0), int(-1)),
            ],
        )
        .unwrap();
        Overlay::from_template(&t).unwrap()
    }

    fn std_layout(b: Bounds) -> Layout {
        Layout::standard(&example(), b, 0, 0, &ValueSource::Zero).unwrap()
    }

    #[test]
    fn basis_is_indicator_on_layout() {
        let b = Bounds::new(-2, 3, -2, 3).unwrap();
        let lay = std_layout(b);
        let e = basis_array(&Worklist, &example(), &lay, (0, 2), b).unwrap();
        for coord in lay.coords() {
            let expect = if coord == (0, 2) { 1 } else { 0 };
            assert_eq!(e.value(coord.0, coord.1), Some(&int(expect)));
        }
        assert_eq!(
            basis_array(&Worklist, &example(), &lay, (5, 5), b),
            Err(FillError::CoordinateNotInLayout((5, 5)))
        );
    }

    #[test]
    fn delta_basis_is_example_grid() {
        let b = Bounds::new(-1, 3, -1, 3).unwrap();
        let e = basis_array(&Worklist, &example(), &std_layout(b), (0, 0), b).unwrap();
        assert_eq!(e.value(2, 2), Some(&int(13)));
        assert_eq!(e.value(3, 3), Some(&int(253)));
    }

    #[test]
    fn support_report_for_example() {
        let b = Bounds::new(-3, 4, -2, 5).unwrap();
        let report = check_support_cases(&Worklist, &example(), &std_layout(b), b).unwrap();
        assert_eq!(report.counterexample_count(), 0);
        assert!(report.check_for((0, 0)).unwrap().outcomes.is_empty());
        let c = report.check_for((0, 2)).unwrap();
        assert_eq!(c.outcomes[0].case, SupportCase::RightOfColumn);
        assert!(c.outcomes[0].checked > 0);
        assert!(report.to_string().contains("E(0,0): no claim"));
    }

    #[test]
    fn support_requires_standard_layout() {
        let b = Bounds::new(-1, 1, -1, 1).unwrap();
        let lay = Layout::custom(Q, Default::default()).unwrap();
        assert!(check_support_cases(&Worklist, &example(), &lay, b).is_err());
    }

    #[test]
    fn contributors() {
        let b = Bounds::new(-1, 3, -1, 3).unwrap();
        let lay = std_layout(b);
        let rep = finite_contribution_report(&Worklist, &example(), &lay, b, (2, 2)).unwrap();
        assert!(rep.contributors.contains(&((0, 0), int(13))));
        assert!(rep.undetermined.is_empty());
        let own = finite_contribution_report(&Worklist, &example(), &lay, b, (0, 3)).unwrap();
        assert_eq!(own.contributors, vec![((0, 3), int(1))]);
    }

    #[test]
    fn superposition_matches_fill() {
        let b = Bounds::new(-2, 3, -2, 3).unwrap();
        let lay = Layout::standard(&example(), b, -1, 1, &ValueSource::Random { seed: 5 }).unwrap();
        let direct = fill(&example(), &lay, b).unwrap().window;
        assert_eq!(superpose(&Worklist, &example(), &lay, b).unwrap(), direct);
        let zero = lay.with_values(&ValueSource::Zero).unwrap();
        let sum = superpose(&Worklist, &example(), &zero, b).unwrap();
        assert!(sum.is_complete() && sum.known_all_zero());
    }
}

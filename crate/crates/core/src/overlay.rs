//! Overlays: templates normalized to a dense `(m+1) x (n+1)` coefficient grid.
//!
//! `b[i][j]` multiplies `A_{r-i,c-j}` when the overlay is placed at `(r, c)`.
//! Row `0` is the bottom row and column `0` the right-most column, so figures
//! are drawn with row `m` on top and column `n` on the left.

use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::{FieldDescriptor, Scalar, ScalarError};
use crate::template::{ShiftAction, Template};
use crate::window::{Bounds, Coord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OverlayError {
    #[error("the zero template has no overlay")]
    ZeroTemplate,
    #[error("overlay grid is empty or ragged")]
    Ragged,
    #[error("overlay {0} contains no nonzero entry")]
    EmptyBoundary(&'static str),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Overlay {
    field: FieldDescriptor,
    coeffs: Vec<Scalar>,
    m: usize,
    n: usize,
    u: usize,
    l: usize,
    s: usize,
    t: usize,
    shift: ShiftAction,
}

/// Smallest and largest column holding a nonzero entry in a row.
fn nonzero_span(row: &[Scalar]) -> Option<(usize, usize)> {
    let first = row.iter().position(|v| !v.is_zero())?;
    let last = row.iter().rposition(|v| !v.is_zero())?;
    Some((first, last))
}

impl Overlay {
    /// Translates `t` so that its smallest row and column exponents are zero.
    pub fn from_template(t: &Template) -> Result<Self, OverlayError> {
        let (min_i, max_i, min_j, max_j) = t.exponent_box().ok_or(OverlayError::ZeroTemplate)?;
        let m = (max_i - min_i) as usize;
        let n = (max_j - min_j) as usize;
        let mut coeffs = vec![Scalar::zero(t.field()); (m + 1) * (n + 1)];
        for ((i, j), c) in t.terms() {
            coeffs[(i - min_i) as usize * (n + 1) + (j - min_j) as usize] = c.clone();
        }
        let shift = ShiftAction::new(min_i as i64, min_j as i64);
        Self::build(t.field(), coeffs, m, n, shift)
    }

    /// Builds an overlay from rows in figure orientation: the first row is row
    /// `m`, and within a row the first entry is column `n`.
    pub fn from_display_rows(
        field: FieldDescriptor,
        rows: Vec<Vec<Scalar>>,
    ) -> Result<Self, OverlayError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if height == 0 || width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(OverlayError::Ragged);
        }
        let (m, n) = (height - 1, width - 1);
        let mut coeffs = vec![Scalar::zero(field); height * width];
        for (di, row) in rows.into_iter().enumerate() {
            for (dj, v) in row.into_iter().enumerate() {
                if v.field() != field {
                    return Err(ScalarError::MixedField {
                        left: field,
                        right: v.field(),
                    }
                    .into());
                }
                coeffs[(m - di) * width + (n - dj)] = v;
            }
        }
        Self::build(field, coeffs, m, n, ShiftAction::default())
    }

    fn build(
        field: FieldDescriptor,
        coeffs: Vec<Scalar>,
        m: usize,
        n: usize,
        shift: ShiftAction,
    ) -> Result<Self, OverlayError> {
        let width = n + 1;
        let row = |i: usize| &coeffs[i * width..(i + 1) * width];
        let col_nonzero = |j: usize| (0..=m).any(|i| !coeffs[i * width + j].is_zero());
        let (s, top_last) = nonzero_span(row(m)).ok_or(OverlayError::EmptyBoundary("top row"))?;
        let (t, bottom_last) =
            nonzero_span(row(0)).ok_or(OverlayError::EmptyBoundary("bottom row"))?;
        if !col_nonzero(0) {
            return Err(OverlayError::EmptyBoundary("right column"));
        }
        if !col_nonzero(n) {
            return Err(OverlayError::EmptyBoundary("left column"));
        }
        Ok(Overlay {
            field,
            m,
            n,
            u: top_last - s,
            l: bottom_last - t,
            s,
            t,
            shift,
            coeffs,
        })
    }

    /// Inverse of [`Overlay::from_template`], re-applying the recorded shift.
    pub fn to_template(&self) -> Template {
        self.normalized_template()
            .shifted(self.shift)
            .expect("recorded shift is non-negative")
    }

    /// The template with the recorded shift dropped, i.e. `sum b_ij Y^i X^j`.
    pub fn normalized_template(&self) -> Template {
        let terms = self
            .nonzero_entries()
            .map(|((i, j), c)| ((i as u32, j as u32), c.clone()));
        Template::from_terms(self.field, terms).expect("single field")
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    /// Height minus one.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Width minus one.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Span of the nonzeros of the top row (row `m`), minus one.
    pub fn u(&self) -> usize {
        self.u
    }

    /// Span of the nonzeros of the bottom row (row `0`), minus one.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Column of the right-most nonzero in the top row.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Column of the right-most nonzero in the bottom row.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn shift(&self) -> ShiftAction {
        self.shift
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Scalar {
        &self.coeffs[i * (self.n + 1) + j]
    }

    /// `((i, j), b_ij)` for every nonzero coefficient, `i` then `j` ascending.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((usize, usize), &Scalar)> + '_ {
        let width = self.n + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| ((k / width, k % width), v))
    }

    /// The equation `sum b_ij A_{r-i,c-j} = 0` for the placement at `(r, c)`,
    /// listing only nonzero coefficients.
    pub fn placement_equation(&self, r: i64, c: i64) -> Vec<(Coord, Scalar)> {
        self.nonzero_entries()
            .map(|((i, j), b)| ((r - i as i64, c - j as i64), b.clone()))
            .collect()
    }

    /// Whether the whole stencil of the placement at `(r, c)` lies in `bounds`.
    pub fn placement_fits(&self, bounds: &Bounds, (r, c): Coord) -> bool {
        bounds.contains((r, c)) && bounds.contains((r - self.m as i64, c - self.n as i64))
    }

    /// Placements whose stencil lies in `bounds`, row-major.
    pub fn placements(&self, bounds: &Bounds) -> Vec<Coord> {
        let (m, n) = (self.m as i64, self.n as i64);
        (bounds.r_min + m..=bounds.r_max)
            .flat_map(|r| (bounds.c_min + n..=bounds.c_max).map(move |c| (r, c)))
            .collect()
    }

    /// True when the nonzeros of rows `0` and `m` each form a contiguous block.
    pub fn extreme_rows_contiguous(&self) -> bool {
        self.contiguity_diagnostic().is_none()
    }

    /// Explains which extreme row has interior zeros, if any.
    pub fn contiguity_diagnostic(&self) -> Option<String> {
        let mut problems = Vec::new();
        for (label, i, start, span) in [
            ("top", self.m, self.s, self.u),
            ("bottom", 0, self.t, self.l),
        ] {
            let gaps: Vec<usize> = (start..=start + span)
                .filter(|&j| self.coeff(i, j).is_zero())
                .collect();
            if !gaps.is_empty() {
                problems.push(format!(
                    "{label} row (row {i}) has zeros at columns {gaps:?}"
                ));
            }
        }
        (!problems.is_empty()).then(|| problems.join("; "))
    }

    /// Rows in figure orientation, as text. Zeros before the first and after the
    /// last nonzero of a row are rendered as empty strings.
    pub fn display_rows(&self) -> Vec<Vec<String>> {
        (0..=self.m)
            .rev()
            .map(|i| {
                let row = &self.coeffs[i * (self.n + 1)..(i + 1) * (self.n + 1)];
                let span = nonzero_span(row);
                (0..=self.n)
                    .rev()
                    .map(|j| match span {
                        Some((a, b)) if (a..=b).contains(&j) => row[j].to_string(),
                        _ => String::new(),
                    })
                    .collect()
            })
            .collect()
    }

    /// Boxed text grid matching the usual overlay figures.
    pub fn render_ascii(&self) -> String {
        let rows = self.display_rows();
        let w = rows.iter().flatten().map(String::len).max().unwrap_or(1);
        let rule = format!(
            "+{}\n",
            format!("{}+", "-".repeat(w + 2)).repeat(self.n + 1)
        );
        let mut out = rule.clone();
        for row in rows {
            out.push('|');
            for cell in row {
                write!(out, " {cell:>w$} |").unwrap();
            }
            out.push('\n');
            out.push_str(&rule);
        }
        out
    }
}

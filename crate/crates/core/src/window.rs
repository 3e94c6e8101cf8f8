//! Finite rectangular views of a Z^2-indexed array.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::scalar::{FieldDescriptor, Scalar, ScalarError};

/// `(row, column)` in Z^2.
pub type Coord = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("invalid bounds: rows {r_min}..={r_max}, cols {c_min}..={c_max}")]
    InvalidBounds {
        r_min: i64,
        r_max: i64,
        c_min: i64,
        c_max: i64,
    },
    #[error("coordinate ({}, {}) lies outside the window", .0.0, .0.1)]
    OutOfBounds(Coord),
    #[error("windows have different bounds")]
    ShapeMismatch,
    #[error("linear combination of zero windows")]
    EmptyCombination,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Inclusive rectangle `r_min..=r_max` x `c_min..=c_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub r_min: i64,
    pub r_max: i64,
    pub c_min: i64,
    pub c_max: i64,
}

impl Bounds {
    pub fn new(r_min: i64, r_max: i64, c_min: i64, c_max: i64) -> Result<Self, WindowError> {
        let b = Bounds {
            r_min,
            r_max,
            c_min,
            c_max,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), WindowError> {
        if self.r_min > self.r_max || self.c_min > self.c_max {
            return Err(WindowError::InvalidBounds {
                r_min: self.r_min,
                r_max: self.r_max,
                c_min: self.c_min,
                c_max: self.c_max,
            });
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        (self.r_max - self.r_min + 1) as usize
    }

    pub fn width(&self) -> usize {
        (self.c_max - self.c_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.height() * self.width()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, (r, c): Coord) -> bool {
        (self.r_min..=self.r_max).contains(&r) && (self.c_min..=self.c_max).contains(&c)
    }

    /// Row-major offset of a coordinate.
    pub fn index(&self, coord: Coord) -> Option<usize> {
        if !self.contains(coord) {
            return None;
        }
        let (r, c) = coord;
        Some((r - self.r_min) as usize * self.width() + (c - self.c_min) as usize)
    }

    pub fn coord_at(&self, index: usize) -> Coord {
        let w = self.width();
        (
            self.r_min + (index / w) as i64,
            self.c_min + (index % w) as i64,
        )
    }

    /// All coordinates in row-major order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (self.r_min..=self.r_max).flat_map(move |r| (self.c_min..=self.c_max).map(move |c| (r, c)))
    }
}

/// Knowledge state of one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Unknown,
    Known(Scalar),
}

impl Cell {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Cell::Known(v) => Some(v),
            Cell::Unknown => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, Cell::Known(_))
    }
}

/// Dense window over a rectangle of the array. Reads outside the rectangle
/// report [`Cell::Unknown`]; the window never fabricates values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayWindow {
    bounds: Bounds,
    field: FieldDescriptor,
    cells: Vec<Cell>,
}

impl ArrayWindow {
    pub fn unknown(bounds: Bounds, field: FieldDescriptor) -> Self {
        ArrayWindow {
            bounds,
            field,
            cells: vec![Cell::Unknown; bounds.len()],
        }
    }

    pub fn constant(bounds: Bounds, value: Scalar) -> Self {
        ArrayWindow {
            bounds,
            field: value.field(),
            cells: vec![Cell::Known(value); bounds.len()],
        }
    }

    pub fn zeros(bounds: Bounds, field: FieldDescriptor) -> Self {
        Self::constant(bounds, Scalar::zero(field))
    }

    /// Window that knows exactly the given cells. Terms outside `bounds` are dropped.
    pub fn from_terms<I>(
        bounds: Bounds,
        field: FieldDescriptor,
        terms: I,
    ) -> Result<Self, WindowError>
    where
        I: IntoIterator<Item = (i64, i64, Scalar)>,
    {
        let mut w = Self::unknown(bounds, field);
        for (r, c, v) in terms {
            if bounds.contains((r, c)) {
                w.set(r, c, v)?;
            }
        }
        Ok(w)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn get(&self, r: i64, c: i64) -> Cell {
        self.bounds
            .index((r, c))
            .map_or(Cell::Unknown, |i| self.cells[i].clone())
    }

    pub fn value(&self, r: i64, c: i64) -> Option<&Scalar> {
        self.bounds
            .index((r, c))
            .and_then(|i| self.cells[i].value())
    }

    pub fn is_known(&self, r: i64, c: i64) -> bool {
        self.value(r, c).is_some()
    }

    pub fn set(&mut self, r: i64, c: i64, value: Scalar) -> Result<(), WindowError> {
        if value.field() != self.field {
            return Err(ScalarError::MixedField {
                left: self.field,
                right: value.field(),
            }
            .into());
        }
        let i = self
            .bounds
            .index((r, c))
            .ok_or(WindowError::OutOfBounds((r, c)))?;
        self.cells[i] = Cell::Known(value);
        Ok(())
    }

    pub fn clear(&mut self, r: i64, c: i64) {
        if let Some(i) = self.bounds.index((r, c)) {
            self.cells[i] = Cell::Unknown;
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Known cells in row-major order.
    pub fn known(&self) -> impl Iterator<Item = (Coord, &Scalar)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, cell)| cell.value().map(|v| (self.bounds.coord_at(i), v)))
    }

    pub fn unknown_coords(&self) -> Vec<Coord> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, cell)| !cell.is_known())
            .map(|(i, _)| self.bounds.coord_at(i))
            .collect()
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_known()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Cell::is_known)
    }

    /// True when every known cell is zero.
    pub fn known_all_zero(&self) -> bool {
        self.known().all(|(_, v)| v.is_zero())
    }

    /// `sum alpha_k * w_k`. A cell is known iff it is known in every input.
    pub fn linear_combine(terms: &[(Scalar, &ArrayWindow)]) -> Result<ArrayWindow, WindowError> {
        let (_, first) = terms.first().ok_or(WindowError::EmptyCombination)?;
        let (bounds, field) = (first.bounds, first.field);
        for (alpha, w) in terms {
            if w.bounds != bounds {
                return Err(WindowError::ShapeMismatch);
            }
            for f in [w.field, alpha.field()] {
                if f != field {
                    return Err(ScalarError::MixedField {
                        left: field,
                        right: f,
                    }
                    .into());
                }
            }
        }
        let cells = (0..bounds.len())
            .map(|i| {
                let mut acc = Scalar::zero(field);
                for (alpha, w) in terms {
                    match &w.cells[i] {
                        Cell::Known(v) => {
                            if !alpha.is_zero() && !v.is_zero() {
                                acc = &acc + &(alpha * v);
                            }
                        }
                        Cell::Unknown => return Cell::Unknown,
                    }
                }
                Cell::Known(acc)
            })
            .collect();
        Ok(ArrayWindow {
            bounds,
            field,
            cells,
        })
    }

    /// Nonzero known cells as terms `A_{r,c} x^r y^c` of the generating function,
    /// sorted by `(r, c)`.
    pub fn series_terms(&self) -> Vec<(i64, i64, Scalar)> {
        self.known()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v.clone()))
            .collect()
    }

    /// Tab-separated grid with a header row of column indices and a leading
    /// column of row indices; `?` marks unknown cells.
    pub fn to_tsv(&self) -> String {
        let b = self.bounds;
        let mut out = String::from("r\\c");
        for c in b.c_min..=b.c_max {
            write!(out, "\t{c}").unwrap();
        }
        out.push('\n');
        for r in b.r_min..=b.r_max {
            write!(out, "{r}").unwrap();
            for c in b.c_min..=b.c_max {
                match self.value(r, c) {
                    Some(v) => write!(out, "\t{v}").unwrap(),
                    None => out.push_str("\t?"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// `{bounds, cells: [{r, c, value}]}` listing every known cell.
    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<_> = self
            .known()
            .map(|((r, c), v)| json!({ "r": r, "c": c, "value": v.to_string() }))
            .collect();
        json!({ "bounds": self.bounds, "cells": cells })
    }

    /// Right-aligned text grid; rows grow downward, columns grow to the right.
    pub fn render_ascii(&self) -> String {
        let b = self.bounds;
        let text = |r, c| match self.value(r, c) {
            Some(v) => v.to_string(),
            None => "?".to_string(),
        };
        let label_w = (b.r_min..=b.r_max)
            .map(|r| r.to_string().len())
            .max()
            .unwrap_or(1);
        let col_w: Vec<usize> = (b.c_min..=b.c_max)
            .map(|c| {
                (b.r_min..=b.r_max)
                    .map(|r| text(r, c).len())
                    .chain(std::iter::once(c.to_string().len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = format!("{:>label_w$} |", "");
        for (c, w) in (b.c_min..=b.c_max).zip(&col_w) {
            write!(out, " {c:>w$}").unwrap();
        }
        out.push('\n');
        out.push_str(&"-".repeat(out.len() - 1));
        out.push('\n');
        for r in b.r_min..=b.r_max {
            write!(out, "{r:>label_w$} |").unwrap();
            for (c, w) in (b.c_min..=b.c_max).zip(&col_w) {
                write!(out, " {:>w$}", text(r, c)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn int(v: i64) -> Scalar {
        Scalar::from_i64(v, Q)
    }

    fn delta(bounds: Bounds) -> ArrayWindow {
        let mut w = ArrayWindow::zeros(bounds, Q);
        w.set(0, 0, int(1)).unwrap();
        w
    }

    #[test]
    fn get_inside_and_outside() {
        let b = Bounds::new(-2, 2, -2, 5).unwrap();
        let w = delta(b);
        assert_eq!(w.get(0, 0), Cell::Known(int(1)));
        assert_eq!(w.get(0, 5), Cell::Known(int(0)));
        assert_eq!(w.get(0, 6), Cell::Unknown);
        assert_eq!(w.get(-3, 0), Cell::Unknown);
    }

    #[test]
    fn invalid_bounds() {
        assert!(Bounds::new(1, 0, 0, 0).is_err());
        assert!(Bounds::new(0, 0, 3, 2).is_err());
        assert_eq!(Bounds::new(-1, 3, -1, 3).unwrap().len(), 25);
    }

    #[test]
    fn combine_basics() {
        let b = Bounds::new(-1, 1, -1, 1).unwrap();
        let w = delta(b);
        let same = ArrayWindow::linear_combine(&[(int(1), &w), (int(0), &w)]).unwrap();
        assert_eq!(same, w);
        let zero = ArrayWindow::linear_combine(&[(int(1), &w), (int(-1), &w)]).unwrap();
        assert_eq!(zero, ArrayWindow::zeros(b, Q));
        let mut partial = w.clone();
        partial.clear(1, 1);
        let mixed = ArrayWindow::linear_combine(&[(int(2), &w), (int(1), &partial)]).unwrap();
        assert_eq!(mixed.get(1, 1), Cell::Unknown);
        assert_eq!(mixed.value(0, 0), Some(&int(3)));
    }

    #[test]
    fn combine_errors() {
        let w1 = ArrayWindow::zeros(Bounds::new(0, 1, 0, 1).unwrap(), Q);
        let w2 = ArrayWindow::zeros(Bounds::new(0, 2, 0, 1).unwrap(), Q);
        assert_eq!(
            ArrayWindow::linear_combine(&[(int(1), &w1), (int(1), &w2)]),
            Err(WindowError::ShapeMismatch)
        );
        let f7 = FieldDescriptor::prime(7).unwrap();
        let w3 = ArrayWindow::zeros(w1.bounds(), f7);
        assert!(matches!(
            ArrayWindow::linear_combine(&[(int(1), &w1), (int(1), &w3)]),
            Err(WindowError::Scalar(ScalarError::MixedField { .. }))
        ));
        assert_eq!(
            ArrayWindow::linear_combine(&[]),
            Err(WindowError::EmptyCombination)
        );
    }

    #[test]
    fn series_of_delta_and_zero() {
        let b = Bounds::new(-3, 3, -3, 3).unwrap();
        assert_eq!(delta(b).series_terms(), vec![(0, 0, int(1))]);
        assert!(ArrayWindow::zeros(b, Q).series_terms().is_empty());
    }

    #[test]
    fn tsv_and_json_shapes() {
        let b = Bounds::new(0, 1, 0, 1).unwrap();
        let mut w = delta(b);
        w.clear(1, 1);
        w.set(0, 1, Scalar::parse("-3/8", Q).unwrap()).unwrap();
        assert_eq!(w.to_tsv(), "r\\c\t0\t1\n0\t1\t-3/8\n1\t0\t?\n");
        let j = w.to_json();
        assert_eq!(j["cells"].as_array().unwrap().len(), 3);
        assert_eq!(j["bounds"]["r_max"], 1);
        assert_eq!(j["cells"][1]["value"], "-3/8");
    }

    fn random_window(seed: u64, bounds: Bounds) -> ArrayWindow {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = ArrayWindow::unknown(bounds, Q);
        for (r, c) in bounds.coords().collect::<Vec<_>>() {
            if rand::Rng::gen_bool(&mut rng, 0.8) {
                w.set(r, c, Scalar::sample(&mut rng, Q, false)).unwrap();
            }
        }
        w
    }

    proptest! {
        #[test]
        fn combine_is_order_independent(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
            let b = Bounds::new(-2, 2, -1, 3).unwrap();
            let (w1, w2, w3) = (random_window(s1, b), random_window(s2, b), random_window(s3, b));
            let (a, bb, c) = (int(2), Scalar::parse("-1/3", Q).unwrap(), int(5));
            let left = ArrayWindow::linear_combine(&[(a.clone(), &w1), (bb.clone(), &w2), (c.clone(), &w3)]).unwrap();
            let right = ArrayWindow::linear_combine(&[(c.clone(), &w3), (a.clone(), &w1), (bb.clone(), &w2)]).unwrap();
            prop_assert_eq!(&left, &right);
            let inner = ArrayWindow::linear_combine(&[(a, &w1), (bb, &w2)]).unwrap();
            let nested = ArrayWindow::linear_combine(&[(int(1), &inner), (c, &w3)]).unwrap();
            prop_assert_eq!(left, nested);
        }

        #[test]
        fn series_round_trip(seed in any::<u64>()) {
            let b = Bounds::new(-2, 3, -3, 1).unwrap();
            let w = random_window(seed, b);
            let rebuilt = ArrayWindow::from_terms(b, Q, w.series_terms()).unwrap();
            for ((r, c), v) in w.known() {
                if !v.is_zero() {
                    prop_assert_eq!(rebuilt.value(r, c), Some(v));
                }
            }
            prop_assert_eq!(rebuilt.series_terms(), w.series_terms());
        }
    }
}

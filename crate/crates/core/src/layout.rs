//! Initial-conditions layouts: coordinate sets carrying prescribed values.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::overlay::Overlay;
use crate::scalar::{FieldDescriptor, Scalar, ScalarError};
use crate::window::{Bounds, Coord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("layout does not fit the window: {0}")]
    OutOfWindow(String),
    #[error("standard layout needs contiguous extreme rows: {0}")]
    NonContiguousExtremeRow(String),
    #[error("coordinate ({}, {}) is not part of the layout", .0.0, .0.1)]
    NotInLayout(Coord),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// How a layout's coordinate set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    /// Rows `0..m`, `u` stub columns starting at `a` above them, `l` stub
    /// columns starting at `d` below them.
    Standard {
        m: usize,
        u: usize,
        l: usize,
        a: i64,
        d: i64,
    },
    /// The main diagonal plus row `k` left of the diagonal.
    Diagonal {
        k: i64,
    },
    Custom,
}

/// Where layout values come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSource {
    /// Listed values; layout coordinates not listed are zero.
    Explicit(BTreeMap<Coord, Scalar>),
    /// One at the given coordinate, zero elsewhere.
    Delta(Coord),
    Zero,
    /// Seeded random values, reproducible for a fixed seed.
    Random {
        seed: u64,
    },
}

impl ValueSource {
    fn assign(
        &self,
        coords: &[Coord],
        field: FieldDescriptor,
    ) -> Result<BTreeMap<Coord, Scalar>, LayoutError> {
        let zero = Scalar::zero(field);
        let mut out: BTreeMap<Coord, Scalar> = coords.iter().map(|&c| (c, zero.clone())).collect();
        match self {
            ValueSource::Zero => {}
            ValueSource::Delta(at) => {
                if let Some(v) = out.get_mut(at) {
                    *v = Scalar::one(field);
                }
            }
            ValueSource::Explicit(values) => {
                for (coord, v) in values {
                    if v.field() != field {
                        return Err(ScalarError::MixedField {
                            left: field,
                            right: v.field(),
                        }
                        .into());
                    }
                    let slot = out.get_mut(coord).ok_or(LayoutError::NotInLayout(*coord))?;
                    *slot = v.clone();
                }
            }
            ValueSource::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for v in out.values_mut() {
                    *v = Scalar::sample(&mut rng, field, false);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    field: FieldDescriptor,
    prescribed: BTreeMap<Coord, Scalar>,
    provenance: Provenance,
}

impl Layout {
    /// Standard layout for `overlay` on `bounds`: rows `0..m` across the whole
    /// window, columns `a..a+u` in every window row above them and columns
    /// `d..d+l` in every window row from `m` down.
    pub fn standard(
        overlay: &Overlay,
        bounds: Bounds,
        a: i64,
        d: i64,
        values: &ValueSource,
    ) -> Result<Layout, LayoutError> {
        let (m, u, l) = (overlay.m(), overlay.u(), overlay.l());
        if m > 0 {
            if let Some(diag) = overlay.contiguity_diagnostic() {
                return Err(LayoutError::NonContiguousExtremeRow(diag));
            }
            if bounds.r_min > 0 || bounds.r_max < m as i64 - 1 {
                return Err(LayoutError::OutOfWindow(format!(
                    "rows 0..={} must lie inside rows {}..={}",
                    m - 1,
                    bounds.r_min,
                    bounds.r_max
                )));
            }
        }
        let cols_fit = |start: i64, count: usize| {
            count == 0 || (start >= bounds.c_min && start + count as i64 - 1 <= bounds.c_max)
        };
        let has_above = bounds.r_min < 0;
        let has_below = bounds.r_max >= m as i64;
        if has_above && !cols_fit(a, u) {
            return Err(LayoutError::OutOfWindow(format!(
                "top stub columns {a}..{} leave the window",
                a + u as i64
            )));
        }
        if has_below && !cols_fit(d, l) {
            return Err(LayoutError::OutOfWindow(format!(
                "bottom stub columns {d}..{} leave the window",
                d + l as i64
            )));
        }
        let mut coords = Vec::new();
        for r in bounds.r_min..=bounds.r_max {
            if r < 0 {
                coords.extend((a..a + u as i64).map(|c| (r, c)));
            } else if r < m as i64 {
                coords.extend((bounds.c_min..=bounds.c_max).map(|c| (r, c)));
            } else {
                coords.extend((d..d + l as i64).map(|c| (r, c)));
            }
        }
        let field = overlay.field();
        Ok(Layout {
            field,
            prescribed: values.assign(&coords, field)?,
            provenance: Provenance::Standard { m, u, l, a, d },
        })
    }

    /// The diagonal `A_{i,i}` together with `A_{k,c}` for `c < k`, clipped to `bounds`.
    pub fn diagonal(
        k: i64,
        bounds: Bounds,
        field: FieldDescriptor,
        values: &ValueSource,
    ) -> Result<Layout, LayoutError> {
        let lo = bounds.r_min.max(bounds.c_min);
        let hi = bounds.r_max.min(bounds.c_max);
        if lo > hi {
            return Err(LayoutError::OutOfWindow(
                "window misses the diagonal".into(),
            ));
        }
        if !(bounds.r_min..=bounds.r_max).contains(&k) {
            return Err(LayoutError::OutOfWindow(format!(
                "row {k} is outside the window"
            )));
        }
        let mut coords: Vec<Coord> = (lo..=hi).map(|i| (i, i)).collect();
        coords.extend((bounds.c_min..=bounds.c_max.min(k - 1)).map(|c| (k, c)));
        Ok(Layout {
            field,
            prescribed: values.assign(&coords, field)?,
            provenance: Provenance::Diagonal { k },
        })
    }

    /// Arbitrary coordinates with explicit values.
    pub fn custom(
        field: FieldDescriptor,
        values: BTreeMap<Coord, Scalar>,
    ) -> Result<Layout, LayoutError> {
        if let Some(v) = values.values().find(|v| v.field() != field) {
            return Err(ScalarError::MixedField {
                left: field,
                right: v.field(),
            }
            .into());
        }
        Ok(Layout {
            field,
            prescribed: values,
            provenance: Provenance::Custom,
        })
    }

    /// Same coordinates, values drawn from `values`.
    pub fn with_values(&self, values: &ValueSource) -> Result<Layout, LayoutError> {
        let coords = self.coords();
        Ok(Layout {
            field: self.field,
            prescribed: values.assign(&coords, self.field)?,
            provenance: self.provenance,
        })
    }

    /// Adds or overwrites one prescription, keeping the provenance.
    pub fn with_prescription(mut self, coord: Coord, value: Scalar) -> Layout {
        self.prescribed.insert(coord, value);
        self
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn prescribed(&self) -> &BTreeMap<Coord, Scalar> {
        &self.prescribed
    }

    pub fn coords(&self) -> Vec<Coord> {
        self.prescribed.keys().copied().collect()
    }

    pub fn contains(&self, coord: Coord) -> bool {
        self.prescribed.contains_key(&coord)
    }

    pub fn value(&self, coord: Coord) -> Option<&Scalar> {
        self.prescribed.get(&coord)
    }

    pub fn len(&self) -> usize {
        self.prescribed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prescribed.is_empty()
    }

    pub fn check_within(&self, bounds: &Bounds) -> Result<(), LayoutError> {
        match self.prescribed.keys().find(|c| !bounds.contains(**c)) {
            Some((r, c)) => Err(LayoutError::OutOfWindow(format!(
                "coordinate ({r}, {c}) lies outside the window"
            ))),
            None => Ok(()),
        }
    }

    /// `{kind, params, values: [{r, c, value}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (kind, params) = match self.provenance {
            Provenance::Standard { m, u, l, a, d } => (
                "standard",
                json!({ "a": a, "d": d, "m": m, "u": u, "l": l }),
            ),
            Provenance::Diagonal { k } => ("diagonal", json!({ "k": k })),
            Provenance::Custom => ("custom", json!({})),
        };
        let values: Vec<_> = self
            .prescribed
            .iter()
            .map(|((r, c), v)| json!({ "r": r, "c": c, "value": v.to_string() }))
            .collect();
        json!({ "kind": kind, "params": params, "values": values })
    }
}

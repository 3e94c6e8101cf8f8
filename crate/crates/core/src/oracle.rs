//! Independent verifier: the full linear system of a window solved by exact
//! Gauss-Jordan elimination.
//!
//! Equations are assembled only from [`Overlay::placement_equation`] and the
//! layout prescriptions; nothing here goes through the propagation engine.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::layout::{Layout, LayoutError};
use crate::overlay::Overlay;
use crate::scalar::{FieldDescriptor, Scalar};
use crate::window::{ArrayWindow, Bounds, Coord};

/// Where an equation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationOrigin {
    /// Homogeneous equation of the overlay placed at this coordinate.
    Placement(Coord),
    /// `A_coord = value` from the layout.
    Prescribed(Coord),
}

impl EquationOrigin {
    pub fn coord(&self) -> Coord {
        match self {
            EquationOrigin::Placement(c) | EquationOrigin::Prescribed(c) => *c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    /// `(variable index, coefficient)`, sorted by variable, no zero coefficients.
    pub terms: Vec<(usize, Scalar)>,
    pub rhs: Scalar,
    pub origin: EquationOrigin,
}

/// All in-window placement equations plus one unit equation per layout cell.
/// Variables are the window cells in row-major order.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    bounds: Bounds,
    field: FieldDescriptor,
    equations: Vec<Equation>,
}

/// Proof of inconsistency: a combination of equations whose coefficients all
/// cancel while the right-hand side does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// `(equation index, multiplier)`.
    pub multipliers: Vec<(usize, Scalar)>,
    pub rhs: Scalar,
    /// The equation whose reduction exposed the contradiction.
    pub trigger: EquationOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Unique {
        assignment: ArrayWindow,
    },
    Underdetermined {
        /// Variables with no pivot, row-major.
        free: Vec<Coord>,
        /// Variables whose value is the same in every solution.
        pinned: BTreeMap<Coord, Scalar>,
    },
    Inconsistent {
        certificate: Certificate,
    },
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Unique { .. } => "unique",
            Classification::Underdetermined { .. } => "underdetermined",
            Classification::Inconsistent { .. } => "inconsistent",
        }
    }
}

impl LinearSystem {
    pub fn assemble(
        overlay: &Overlay,
        layout: &Layout,
        bounds: Bounds,
    ) -> Result<Self, LayoutError> {
        layout.check_within(&bounds)?;
        let field = overlay.field();
        let index = |coord: Coord| bounds.index(coord).expect("coordinate inside window");
        let mut equations = Vec::new();
        for (&coord, value) in layout.prescribed() {
            equations.push(Equation {
                terms: vec![(index(coord), Scalar::one(field))],
                rhs: value.clone(),
                origin: EquationOrigin::Prescribed(coord),
            });
        }
        for placement in overlay.placements(&bounds) {
            let mut terms: Vec<_> = overlay
                .placement_equation(placement.0, placement.1)
                .into_iter()
                .map(|(coord, b)| (index(coord), b))
                .collect();
            terms.sort_by_key(|(v, _)| *v);
            equations.push(Equation {
                terms,
                rhs: Scalar::zero(field),
                origin: EquationOrigin::Placement(placement),
            });
        }
        Ok(LinearSystem {
            bounds,
            field,
            equations,
        })
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn variables(&self) -> Vec<Coord> {
        self.bounds.coords().collect()
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Exact elimination and classification.
    pub fn classify(&self) -> Classification {
        let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
        for (k, eq) in self.equations.iter().enumerate() {
            let mut row = Row {
                coeffs: eq.terms.iter().cloned().collect(),
                rhs: eq.rhs.clone(),
                combo: BTreeMap::from([(k, Scalar::one(self.field))]),
            };
            let hits: Vec<usize> = row
                .coeffs
                .keys()
                .copied()
                .filter(|v| pivots.contains_key(v))
                .collect();
            for v in hits {
                let factor = row.coeffs[&v].clone();
                row.axpy(&-factor, &pivots[&v]);
            }
            let Some((&lead, lead_coeff)) = row.coeffs.iter().next() else {
                if row.rhs.is_zero() {
                    continue;
                }
                return Classification::Inconsistent {
                    certificate: Certificate {
                        multipliers: row.combo.into_iter().collect(),
                        rhs: row.rhs,
                        trigger: eq.origin,
                    },
                };
            };
            let inv = lead_coeff.inv().expect("nonzero lead");
            row.scale(&inv);
            for other in pivots.values_mut() {
                if let Some(f) = other.coeffs.get(&lead).cloned() {
                    other.axpy(&-f, &row);
                }
            }
            pivots.insert(lead, row);
        }

        let n = self.bounds.len();
        let free: Vec<Coord> = (0..n)
            .filter(|v| !pivots.contains_key(v))
            .map(|v| self.bounds.coord_at(v))
            .collect();
        if free.is_empty() {
            let mut assignment = ArrayWindow::unknown(self.bounds, self.field);
            for (v, row) in pivots {
                let (r, c) = self.bounds.coord_at(v);
                assignment.set(r, c, row.rhs).expect("in bounds");
            }
            return Classification::Unique { assignment };
        }
        let pinned = pivots
            .into_iter()
            .filter(|(_, row)| row.coeffs.len() == 1)
            .map(|(v, row)| (self.bounds.coord_at(v), row.rhs))
            .collect();
        Classification::Underdetermined { free, pinned }
    }

    /// `sum coeff * value - rhs` for every equation, using known cells of `w`.
    /// Equations touching unknown cells are skipped.
    pub fn residuals(&self, w: &ArrayWindow) -> Vec<(EquationOrigin, Scalar)> {
        let mut out = Vec::new();
        'eqs: for eq in &self.equations {
            let mut acc = -&eq.rhs;
            for (v, b) in &eq.terms {
                let (r, c) = self.bounds.coord_at(*v);
                match w.value(r, c) {
                    Some(x) => acc = &acc + &(b * x),
                    None => continue 'eqs,
                }
            }
            out.push((eq.origin, acc));
        }
        out
    }

    /// Checks that a certificate's combination cancels every coefficient and
    /// leaves the stated nonzero right-hand side.
    pub fn verify_certificate(&self, cert: &Certificate) -> bool {
        let mut coeffs: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut rhs = Scalar::zero(self.field);
        for (k, mult) in &cert.multipliers {
            let eq = &self.equations[*k];
            for (v, b) in &eq.terms {
                let entry = coeffs.entry(*v).or_insert_with(|| Scalar::zero(self.field));
                *entry = &*entry + &(mult * b);
            }
            rhs = &rhs + &(mult * &eq.rhs);
        }
        coeffs.values().all(Scalar::is_zero) && !rhs.is_zero() && rhs == cert.rhs
    }

    /// Coordinate-list dump in the spirit of Matrix Market: a header, one line
    /// per nonzero (`row col value`, 1-based), then the right-hand side.
    pub fn to_matrix_market(&self) -> String {
        let nnz: usize = self.equations.iter().map(|e| e.terms.len()).sum();
        let mut out = String::from("%%LinearSystem coordinate exact\n");
        writeln!(out, "% field {}", self.field).unwrap();
        writeln!(
            out,
            "% variables row-major over rows {}..={}, cols {}..={}",
            self.bounds.r_min, self.bounds.r_max, self.bounds.c_min, self.bounds.c_max
        )
        .unwrap();
        writeln!(
            out,
            "{} {} {}",
            self.equations.len(),
            self.bounds.len(),
            nnz
        )
        .unwrap();
        for (k, eq) in self.equations.iter().enumerate() {
            for (v, b) in &eq.terms {
                writeln!(out, "{} {} {}", k + 1, v + 1, b.bare()).unwrap();
            }
        }
        out.push_str("% rhs\n");
        for (k, eq) in self.equations.iter().enumerate() {
            let origin = match eq.origin {
                EquationOrigin::Placement((r, c)) => format!("placement {r} {c}"),
                EquationOrigin::Prescribed((r, c)) => format!("prescribed {r} {c}"),
            };
            writeln!(out, "{} {} % {origin}", k + 1, eq.rhs.bare()).unwrap();
        }
        out
    }
}

/// Sparse elimination row that also remembers which input equations it combines.
#[derive(Debug, Clone)]
struct Row {
    coeffs: BTreeMap<usize, Scalar>,
    rhs: Scalar,
    combo: BTreeMap<usize, Scalar>,
}

fn axpy_map(dst: &mut BTreeMap<usize, Scalar>, k: &Scalar, src: &BTreeMap<usize, Scalar>) {
    for (key, v) in src {
        let add = k * v;
        match dst.get_mut(key) {
            Some(slot) => {
                let sum = &*slot + &add;
                if sum.is_zero() {
                    dst.remove(key);
                } else {
                    *slot = sum;
                }
            }
            None => {
                if !add.is_zero() {
                    dst.insert(*key, add);
                }
            }
        }
    }
}

impl Row {
    /// `self += k * other`.
    fn axpy(&mut self, k: &Scalar, other: &Row) {
        axpy_map(&mut self.coeffs, k, &other.coeffs);
        axpy_map(&mut self.combo, k, &other.combo);
        self.rhs = &self.rhs + &(k * &other.rhs);
    }

    fn scale(&mut self, k: &Scalar) {
        for v in self.coeffs.values_mut().chain(self.combo.values_mut()) {
            *v = &*v * k;
        }
        self.rhs = &self.rhs * k;
    }
}

/// Assembles and classifies in one call.
pub fn classify_and_solve(
    overlay: &Overlay,
    layout: &Layout,
    bounds: Bounds,
) -> Result<Classification, LayoutError> {
    Ok(LinearSystem::assemble(overlay, layout, bounds)?.classify())
}

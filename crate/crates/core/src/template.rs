//! Templates: polynomials in the commuting shift operators `X` and `Y`.
//!
//! `(X A)_{r,c} = A_{r,c-1}` and `(Y A)_{r,c} = A_{r-1,c}`, so the term
//! `b Y^i X^j` contributes `b * A_{r-i,c-j}` to `(T A)_{r,c}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use thiserror::Error;

use crate::scalar::{is_negative, FieldDescriptor, Scalar, ScalarError};
use crate::window::{ArrayWindow, Bounds, Coord};

/// Exponent pair `(i, j)`: `i` is the power of `Y` (row shift), `j` the power of `X`.
pub type Exponent = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("shift would produce a negative exponent")]
    NegativeExponent,
}

/// A translation of the array by `dr` rows and `dc` columns, i.e. the operator
/// `Y^dr X^dc`. Shifts compose by adding their components.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
pub struct ShiftAction {
    pub dr: i64,
    pub dc: i64,
}

impl ShiftAction {
    pub fn new(dr: i64, dc: i64) -> Self {
        ShiftAction { dr, dc }
    }

    pub fn compose(self, other: ShiftAction) -> ShiftAction {
        ShiftAction::new(self.dr + other.dr, self.dc + other.dc)
    }

    pub fn inverse(self) -> ShiftAction {
        ShiftAction::new(-self.dr, -self.dc)
    }

    /// Where the value at `coord` ends up after the shift.
    pub fn apply_to(self, (r, c): Coord) -> Coord {
        (r + self.dr, c + self.dc)
    }
}

/// Finitely supported map from exponent pairs to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    terms: BTreeMap<Exponent, Scalar>,
    field: FieldDescriptor,
}

/// Outcome of checking `T A = 0` on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annihilation {
    /// Every fully defined cell of `T A` is zero.
    Annihilated { checked: usize },
    /// Cells of `T A` that are defined and nonzero.
    Residual {
        checked: usize,
        cells: Vec<(Coord, Scalar)>,
    },
    /// No cell of the window admits the full stencil with known inputs.
    Indeterminate,
}

impl Annihilation {
    pub fn is_annihilated(&self) -> bool {
        matches!(self, Annihilation::Annihilated { .. })
    }
}

impl Template {
    pub fn zero(field: FieldDescriptor) -> Self {
        Template {
            terms: BTreeMap::new(),
            field,
        }
    }

    pub fn identity(field: FieldDescriptor) -> Self {
        Template::monomial(0, 0, Scalar::one(field))
    }

    /// The single term `coeff * Y^i X^j`.
    pub fn monomial(i: u32, j: u32, coeff: Scalar) -> Self {
        let field = coeff.field();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((i, j), coeff);
        }
        Template { terms, field }
    }

    pub fn x(field: FieldDescriptor) -> Self {
        Template::monomial(0, 1, Scalar::one(field))
    }

    pub fn y(field: FieldDescriptor) -> Self {
        Template::monomial(1, 0, Scalar::one(field))
    }

    pub fn constant(c: Scalar) -> Self {
        Template::monomial(0, 0, c)
    }

    /// Builds a template from `((i, j), coeff)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(field: FieldDescriptor, terms: I) -> Result<Self, TemplateError>
    where
        I: IntoIterator<Item = (Exponent, Scalar)>,
    {
        let mut t = Template::zero(field);
        for (e, c) in terms {
            t.accumulate(e, &c)?;
        }
        Ok(t)
    }

    fn accumulate(&mut self, e: Exponent, c: &Scalar) -> Result<(), TemplateError> {
        if c.field() != self.field {
            return Err(ScalarError::MixedField {
                left: self.field,
                right: c.field(),
            }
            .into());
        }
        let sum = match self.terms.get(&e) {
            Some(old) => old.try_add(c)?,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, sum);
        }
        Ok(())
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, i: u32, j: u32) -> Scalar {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn try_add(&self, other: &Template) -> Result<Template, TemplateError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(*e, c)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Template) -> Result<Template, TemplateError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Template) -> Result<Template, TemplateError> {
        self.check_same(other)?;
        let mut out = Template::zero(self.field);
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &other.terms {
                out.accumulate((i1 + i2, j1 + j2), &c1.try_mul(c2)?)?;
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Template {
        self.scale(&-Scalar::one(self.field))
    }

    pub fn scale(&self, k: &Scalar) -> Template {
        if k.is_zero() {
            return Template::zero(self.field);
        }
        Template {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
            field: self.field,
        }
    }

    pub fn pow(&self, n: u32) -> Template {
        let mut result = Template::identity(self.field);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplies by `Y^dr X^dc`. Fails if any exponent would become negative.
    pub fn shifted(&self, shift: ShiftAction) -> Result<Template, TemplateError> {
        let mut terms = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let i = *i as i64 + shift.dr;
            let j = *j as i64 + shift.dc;
            if i < 0 || j < 0 {
                return Err(TemplateError::NegativeExponent);
            }
            terms.insert((i as u32, j as u32), c.clone());
        }
        Ok(Template {
            terms,
            field: self.field,
        })
    }

    fn check_same(&self, other: &Template) -> Result<(), TemplateError> {
        if self.field != other.field {
            return Err(ScalarError::MixedField {
                left: self.field,
                right: other.field,
            }
            .into());
        }
        Ok(())
    }

    /// Largest and smallest exponents, as `(min_i, max_i, min_j, max_j)`.
    pub fn exponent_box(&self) -> Option<(u32, u32, u32, u32)> {
        let first = self.terms.keys().next()?;
        let mut b = (first.0, first.0, first.1, first.1);
        for (i, j) in self.terms.keys() {
            b.0 = b.0.min(*i);
            b.1 = b.1.max(*i);
            b.2 = b.2.min(*j);
            b.3 = b.3.max(*j);
        }
        Some(b)
    }

    /// Computes `T w`. The result covers the rectangle of cells whose stencil
    /// stays inside `w`; a cell is known only when all of its inputs are known.
    /// Returns `None` when that rectangle is empty.
    pub fn apply(&self, w: &ArrayWindow) -> Option<ArrayWindow> {
        let wb = w.bounds();
        let Some((min_i, max_i, min_j, max_j)) = self.exponent_box() else {
            return Some(ArrayWindow::zeros(wb, self.field));
        };
        let bounds = Bounds::new(
            wb.r_min + max_i as i64,
            wb.r_max + min_i as i64,
            wb.c_min + max_j as i64,
            wb.c_max + min_j as i64,
        )
        .ok()?;
        let mut out = ArrayWindow::unknown(bounds, self.field);
        'cells: for (r, c) in bounds.coords() {
            let mut acc = Scalar::zero(self.field);
            for ((i, j), b) in &self.terms {
                match w.value(r - *i as i64, c - *j as i64) {
                    Some(v) => acc = &acc + &(b * v),
                    None => continue 'cells,
                }
            }
            out.set(r, c, acc).expect("cell inside result bounds");
        }
        Some(out)
    }

    /// Checks whether `T w` vanishes on every cell where it is fully defined.
    pub fn annihilates(&self, w: &ArrayWindow) -> Annihilation {
        let Some(image) = self.apply(w) else {
            return Annihilation::Indeterminate;
        };
        let checked = image.known_count();
        if checked == 0 {
            return Annihilation::Indeterminate;
        }
        let cells: Vec<_> = image
            .known()
            .filter(|(_, v)| !v.is_zero())
            .map(|(coord, v)| (coord, v.clone()))
            .collect();
        if cells.is_empty() {
            Annihilation::Annihilated { checked }
        } else {
            Annihilation::Residual { checked, cells }
        }
    }
}

impl Add for &Template {
    type Output = Template;
    fn add(self, rhs: &Template) -> Template {
        self.try_add(rhs).expect("template addition")
    }
}

impl Mul for &Template {
    type Output = Template;
    fn mul(self, rhs: &Template) -> Template {
        self.try_mul(rhs).expect("template multiplication")
    }
}

fn monomial_text(i: u32, j: u32) -> String {
    let mut s = String::new();
    match j {
        0 => {}
        1 => s.push('X'),
        _ => s.push_str(&format!("X^{j}")),
    }
    match i {
        0 => {}
        1 => s.push('Y'),
        _ => s.push_str(&format!("Y^{i}")),
    }
    s
}

/// Renders in the template DSL, highest exponents first, e.g. `XY + 3Y + 2X - I`.
impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, ((i, j), c)) in self.terms.iter().rev().enumerate() {
            let neg = is_negative(c);
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = monomial_text(*i, *j);
            match (mono.is_empty(), mag.is_one()) {
                (true, true) => f.write_str("I")?,
                (true, false) => f.write_str(&mag.bare())?,
                (false, true) => f.write_str(&mono)?,
                (false, false) => write!(f, "{}{}", mag.bare(), mono)?,
            }
        }
        Ok(())
    }
}

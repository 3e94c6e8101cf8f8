//! Exact field arithmetic: arbitrary-precision rationals and prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted for prime fields. Residue products are formed in `u128`,
/// and primality is checked by trial division, so the bound keeps both cheap.
pub const MAX_PRIME: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cannot combine scalars from different fields ({left} and {right})")]
    MixedField {
        left: FieldDescriptor,
        right: FieldDescriptor,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("invalid prime field modulus {0}")]
    InvalidModulus(u64),
}

/// Which field a scalar lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    #[serde(alias = "rationals", alias = "q")]
    Rational,
    Prime {
        p: u64,
    },
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor::Rational
    }

    /// Prime field of order `p`. Fails unless `p` is a prime below [`MAX_PRIME`].
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(ScalarError::InvalidModulus(p));
        }
        Ok(FieldDescriptor::Prime { p })
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldDescriptor::Rational => None,
            FieldDescriptor::Prime { p } => Some(*p),
        }
    }

    /// Re-checks the invariants of a descriptor that may have been deserialized.
    pub fn validate(&self) -> Result<(), ScalarError> {
        match *self {
            FieldDescriptor::Rational => Ok(()),
            FieldDescriptor::Prime { p } => FieldDescriptor::prime(p).map(|_| ()),
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::Prime { p } => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element. Values are kept canonical at all times: rationals in
/// lowest terms with a positive denominator, residues in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { residue: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero(field: FieldDescriptor) -> Self {
        Scalar::from_i64(0, field)
    }

    pub fn one(field: FieldDescriptor) -> Self {
        Scalar::from_i64(1, field)
    }

    pub fn from_i64(v: i64, field: FieldDescriptor) -> Self {
        match field {
            FieldDescriptor::Rational => Scalar::Rational(BigRational::from_integer(v.into())),
            FieldDescriptor::Prime { p } => Scalar::Prime {
                residue: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(v: &BigInt, field: FieldDescriptor) -> Self {
        match field {
            FieldDescriptor::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            FieldDescriptor::Prime { p } => Scalar::Prime {
                residue: reduce_bigint(v, p),
                modulus: p,
            },
        }
    }

    /// `num / den` as an element of `field`.
    pub fn fraction(num: i64, den: i64, field: FieldDescriptor) -> Result<Self, ScalarError> {
        Scalar::from_i64(num, field).try_div(&Scalar::from_i64(den, field))
    }

    pub fn field(&self) -> FieldDescriptor {
        match self {
            Scalar::Rational(_) => FieldDescriptor::Rational,
            Scalar::Prime { modulus, .. } => FieldDescriptor::Prime { p: *modulus },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Prime { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Prime { residue, .. } => *residue == 1,
        }
    }

    /// Rational value, if this is an element of Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Prime { .. } => None,
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<(), ScalarError> {
        let (left, right) = (self.field(), other.field());
        if left == right {
            Ok(())
        } else {
            Err(ScalarError::MixedField { left, right })
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (
                Scalar::Prime {
                    residue: a,
                    modulus,
                },
                Scalar::Prime { residue: b, .. },
            ) => Scalar::Prime {
                residue: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_same(other)?;
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (
                Scalar::Prime {
                    residue: a,
                    modulus,
                },
                Scalar::Prime { residue: b, .. },
            ) => Scalar::Prime {
                residue: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_same(other)?;
        self.try_mul(&other.inv()?)
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Prime { residue, modulus } => Scalar::Prime {
                residue: mod_inverse(*residue, *modulus),
                modulus: *modulus,
            },
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Prime { residue, modulus } => Scalar::Prime {
                residue: (modulus - residue) % modulus,
                modulus: *modulus,
            },
        }
    }

    /// Parses `-?digits(/digits)?`. Prime-field input may also carry the `mod p`
    /// suffix produced by [`Display`](fmt::Display), provided `p` matches.
    pub fn parse(text: &str, field: FieldDescriptor) -> Result<Scalar, ScalarError> {
        let err = |reason: &str| ScalarError::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let mut body = text.trim();
        if let (FieldDescriptor::Prime { p }, Some(idx)) = (field, body.find("mod")) {
            let suffix = body[idx + 3..].trim();
            if suffix.parse::<u64>().ok() != Some(p) {
                return Err(err("modulus suffix does not match the field"));
            }
            body = body[..idx].trim_end();
        }
        let (neg, unsigned) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body),
        };
        let (num_text, den_text) = match unsigned.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (unsigned, None),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(num_text) {
            return Err(err("expected digits"));
        }
        let mut num = BigInt::from_str(num_text).map_err(|_| err("expected digits"))?;
        if neg {
            num = -num;
        }
        let den = match den_text {
            Some(d) if digits(d) => BigInt::from_str(d).map_err(|_| err("expected digits"))?,
            Some(_) => return Err(err("expected digits after `/`")),
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        match field {
            FieldDescriptor::Rational => Ok(Scalar::Rational(BigRational::new(num, den))),
            FieldDescriptor::Prime { p } => {
                let n = Scalar::from_bigint(&num, field);
                let d = Scalar::from_bigint(&den, field);
                if d.is_zero() {
                    return Err(err(&format!("denominator vanishes mod {p}")));
                }
                n.try_div(&d)
            }
        }
    }

    /// Text form without the `mod p` suffix; this is what template rendering uses.
    pub fn bare(&self) -> String {
        match self {
            Scalar::Rational(q) => format_rational(q),
            Scalar::Prime { residue, .. } => residue.to_string(),
        }
    }

    /// Random element, drawn from small numerators and denominators for Q and
    /// uniformly for prime fields.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, field: FieldDescriptor, nonzero: bool) -> Scalar {
        loop {
            let s = match field {
                FieldDescriptor::Rational => {
                    let num: i64 = rng.gen_range(-9..=9);
                    let den: i64 = if rng.gen_bool(0.25) {
                        rng.gen_range(2..=4)
                    } else {
                        1
                    };
                    Scalar::Rational(BigRational::new(num.into(), den.into()))
                }
                FieldDescriptor::Prime { p } => Scalar::Prime {
                    residue: rng.gen_range(0..p),
                    modulus: p,
                },
            };
            if !nonzero || !s.is_zero() {
                return s;
            }
        }
    }

    /// Small-integer view, handy for tests and display. `None` for non-integers.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Prime { residue, .. } => Some(*residue as i64),
        }
    }
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue below modulus")
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on signed 128-bit values
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => f.write_str(&format_rational(q)),
            Scalar::Prime { residue, modulus } => write!(f, "{residue} mod {modulus}"),
        }
    }
}

// Operator forms panic on mixed fields; callers that cannot rule that out use
// the `try_*` methods.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Sign test for rationals; prime-field elements have no sign.
pub(crate) fn is_negative(s: &Scalar) -> bool {
    matches!(s, Scalar::Rational(q) if q.is_negative())
}

//! Exact-or-float numbers.
//!
//! Every probability, margin and coefficient in the crate is a [`Num`]. Exact
//! values are reduced rationals; any operation that touches a float value
//! produces a float, so the variant of a result records whether the whole
//! computation stayed exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational or binary floating value.
#[derive(Clone, Debug)]
pub enum Num {
    Exact(BigRational),
    Float(f64),
}

/// A probability-valued [`Num`]. The `[0, 1]` range is checked by
/// [`crate::graph::validate`], not by construction, so malformed inputs can be
/// reported instead of rejected.
pub type Prob = Num;

/// Computation mode requested by a caller.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a probability (expected \"num/den\" or a decimal literal)")]
pub struct ParseNumError(pub String);

impl Num {
    pub fn zero() -> Self {
        Num::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Num::Exact(BigRational::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Num::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Self {
        Num::ratio(n, 1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Num::Exact(r) => Some(r),
            Num::Float(_) => None,
        }
    }

    /// Exact value; floats are converted to the rational they represent.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Num::Exact(r) => r.clone(),
            Num::Float(f) => BigRational::from_float(*f).unwrap_or_else(BigRational::zero),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Num::Float(f) => *f,
        }
    }

    pub fn to_float(&self) -> Num {
        Num::Float(self.to_f64())
    }

    /// Converts to the requested mode. Float values cannot be promoted.
    pub fn in_mode(self, mode: Mode) -> Num {
        match mode {
            Mode::Exact => self,
            Mode::Float => self.to_float(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Num::Exact(r) => r.is_zero(),
            Num::Float(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Num::Exact(r) => r.is_one(),
            Num::Float(f) => *f == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Num::Exact(r) => r.is_negative(),
            Num::Float(f) => *f < 0.0,
        }
    }

    /// `0 < p < 1`.
    pub fn is_proper(&self) -> bool {
        self.sign() > 0 && self.cmp_num(&Num::one()) == Ordering::Less
    }

    pub fn in_unit_interval(&self) -> bool {
        match self {
            Num::Exact(r) => !r.is_negative() && *r <= BigRational::one(),
            Num::Float(f) => (0.0..=1.0).contains(f),
        }
    }

    pub fn sign(&self) -> i32 {
        match self {
            Num::Exact(r) if r.is_positive() => 1,
            Num::Exact(r) if r.is_negative() => -1,
            Num::Exact(_) => 0,
            Num::Float(f) if *f > 0.0 => 1,
            Num::Float(f) if *f < 0.0 => -1,
            Num::Float(_) => 0,
        }
    }

    /// Total order; exact/exact comparisons are exact, mixed ones go through
    /// the exact value of the float.
    pub fn cmp_num(&self, other: &Num) -> Ordering {
        match (self, other) {
            (Num::Exact(a), Num::Exact(b)) => a.cmp(b),
            (Num::Float(a), Num::Float(b)) => a.total_cmp(b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }

    pub fn min_of<'a>(values: impl IntoIterator<Item = &'a Num>) -> Option<Num> {
        values
            .into_iter()
            .min_by(|a, b| a.cmp_num(b))
            .cloned()
    }

    pub fn abs(&self) -> Num {
        match self {
            Num::Exact(r) => Num::Exact(r.abs()),
            Num::Float(f) => Num::Float(f.abs()),
        }
    }

    pub fn complement(&self) -> Num {
        &Num::one() - self
    }

    /// Checked division; `None` on a zero divisor.
    pub fn checked_div(&self, other: &Num) -> Option<Num> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }

    /// The `"num/den"` form for exact values, a decimal literal otherwise.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Num::Float(x) => {
                if x.is_finite() && x.fract() == 0.0 {
                    write!(f, "{x:.1}")
                } else {
                    write!(f, "{x}")
                }
            }
        }
    }
}

impl FromStr for Num {
    type Err = ParseNumError;

    /// `"n/d"` and bare integers parse as exact values; anything with a decimal
    /// point or exponent parses as a float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseNumError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Num::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = BigInt::from_str(t) {
            return Ok(Num::Exact(BigRational::from_integer(n)));
        }
        let looks_decimal = t
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        if !looks_decimal {
            return Err(err());
        }
        let x = f64::from_str(t).map_err(|_| err())?;
        if !x.is_finite() {
            return Err(err());
        }
        Ok(Num::Float(x))
    }
}

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_num(other) == Ordering::Equal
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Num::from_str(&s).map_err(serde::de::Error::custom)
    }
}

impl From<BigRational> for Num {
    fn from(r: BigRational) -> Self {
        Num::Exact(r)
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Float(x)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a Num> for &'a Num {
            type Output = Num;
            fn $method(self, rhs: &'a Num) -> Num {
                match (self, rhs) {
                    (Num::Exact(a), Num::Exact(b)) => Num::Exact(a $op b),
                    _ => Num::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $tr<Num> for Num {
            type Output = Num;
            fn $method(self, rhs: Num) -> Num {
                &self $op &rhs
            }
        }
        impl<'a> $tr<&'a Num> for Num {
            type Output = Num;
            fn $method(self, rhs: &'a Num) -> Num {
                &self $op rhs
            }
        }
        impl<'a> $tr<Num> for &'a Num {
            type Output = Num;
            fn $method(self, rhs: Num) -> Num {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Num {
    type Output = Num;
    fn neg(self) -> Num {
        match self {
            Num::Exact(r) => Num::Exact(-r),
            Num::Float(f) => Num::Float(-f),
        }
    }
}

impl Neg for &Num {
    type Output = Num;
    fn neg(self) -> Num {
        -(self.clone())
    }
}

impl std::iter::Sum for Num {
    fn sum<I: Iterator<Item = Num>>(iter: I) -> Num {
        iter.fold(Num::zero(), |acc, x| acc + x)
    }
}

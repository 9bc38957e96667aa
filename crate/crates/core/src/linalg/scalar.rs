//! The scalar field ℚ(i): complex numbers with rational real and imaginary
//! parts.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational. Always stored in lowest terms with a
/// positive denominator; zero is `0/1`.
///
/// The text form is `p/q`, with `/q` omitted when the denominator is 1;
/// both [`std::fmt::Display`] and [`std::str::FromStr`] use it.
pub type Rational = num_rational::BigRational;

/// A complex number with rational real and imaginary parts.
///
/// Gaussian rationals form a field: the type is closed under the four
/// arithmetic operations (with nonzero divisor), conjugation is an
/// involution, and `|z|^2 = re^2 + im^2` is a nonnegative [`Rational`] that
/// vanishes exactly at zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GaussianRationalRepr", into = "GaussianRationalRepr")]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    /// A purely real value.
    pub fn from_rational(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    /// The Gaussian integer `a + b·i`.
    pub fn from_ints(a: i64, b: i64) -> Self {
        Self {
            re: Rational::from_integer(BigInt::from(a)),
            im: Rational::from_integer(BigInt::from(b)),
        }
    }

    pub fn from_bigints(a: BigInt, b: BigInt) -> Self {
        Self { re: Rational::from_integer(a), im: Rational::from_integer(b) }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Squared modulus `re^2 + im^2`, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -&self.im / &n })
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;

    /// Panics when dividing by zero, like integer division.
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero GaussianRational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_value_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

forward_value_binop!(Add, add);
forward_value_binop!(Sub, sub);
forward_value_binop!(Mul, mul);
forward_value_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical text form: `0`, `3/2`, `i`, `-i`, `2i`, `1+i`, `1-2/3i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write_imaginary(f, &self.im, false);
        }
        write!(f, "{}", self.re)?;
        write_imaginary(f, &self.im, true)
    }
}

fn write_imaginary(f: &mut fmt::Formatter<'_>, im: &Rational, explicit_plus: bool) -> fmt::Result {
    if im.is_one() {
        return write!(f, "{}i", if explicit_plus { "+" } else { "" });
    }
    if (-im).is_one() {
        return write!(f, "-i");
    }
    if explicit_plus && im.is_positive() {
        write!(f, "+")?;
    }
    write!(f, "{}i", im)
}

/// Error parsing the `a+bi` text form of a Gaussian rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid Gaussian rational `{input}`: {reason}")]
pub struct ParseGaussianError {
    input: String,
    reason: String,
}

impl ParseGaussianError {
    fn new(input: &str, reason: impl Into<String>) -> Self {
        Self { input: input.to_string(), reason: reason.into() }
    }
}

impl FromStr for GaussianRational {
    type Err = ParseGaussianError;

    /// Parses the forms produced by `Display`: a rational, a pure imaginary
    /// part ending in `i`, or `a±bi` with both.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseGaussianError::new(s, "empty string"));
        }
        let parse_rat = |part: &str, what: &str| -> Result<Rational, ParseGaussianError> {
            Rational::from_str(part)
                .map_err(|e| ParseGaussianError::new(s, format!("bad {what} `{part}`: {e}")))
        };
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::from_rational(parse_rat(t, "real part")?));
        };
        // Split `a±b` at the last sign that starts the imaginary coefficient:
        // signs inside a rational only occur at its front.
        let split = body
            .char_indices()
            .rev()
            .find(|&(pos, c)| (c == '+' || c == '-') && pos > 0)
            .map(|(pos, _)| pos);
        let (re_part, im_part) = match split {
            Some(pos) => (&body[..pos], &body[pos..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            _ => parse_rat(im_part, "imaginary part")?,
        };
        if re_part.is_empty() {
            return Ok(Self::new(Rational::zero(), im));
        }
        Ok(Self::new(parse_rat(re_part, "real part")?, im))
    }
}

#[derive(Serialize, Deserialize)]
struct GaussianRationalRepr {
    re: String,
    im: String,
}

impl From<GaussianRational> for GaussianRationalRepr {
    fn from(z: GaussianRational) -> Self {
        Self { re: z.re.to_string(), im: z.im.to_string() }
    }
}

impl TryFrom<GaussianRationalRepr> for GaussianRational {
    type Error = num_rational::ParseRatioError;

    fn try_from(repr: GaussianRationalRepr) -> Result<Self, Self::Error> {
        Ok(Self { re: Rational::from_str(&repr.re)?, im: Rational::from_str(&repr.im)? })
    }
}

/// Serde adapter serializing a [`Rational`] as its `p/q` text form.
pub(crate) mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        Rational::from_str(&text).map_err(|e| D::Error::custom(format!("bad rational `{text}`: {e}")))
    }
}

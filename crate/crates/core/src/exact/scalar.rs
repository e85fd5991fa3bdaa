//! Exact elements of a real quadratic field `Q(sqrt(d))`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FieldError;

/// `a + b*sqrt(d)` with rational `a`, `b` and square-free `d >= 2`.
///
/// Values with `b = 0` are stored with `d = 0` and combine with elements of
/// any field. Two values with nonzero irrational parts must share `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

pub fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { a: BigRational::zero(), b: BigRational::zero(), d: 0 }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { a: rat(n), b: BigRational::zero(), d: 0 }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Scalar { a: BigRational::from_integer(n.clone()), b: BigRational::zero(), d: 0 }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero(), d: 0 }
    }

    /// `a + b*sqrt(d)`. Tags 0 and 1 denote the rational field.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self, FieldError> {
        match d {
            0 => Ok(Scalar::rational(a)),
            1 => Ok(Scalar::rational(a + b)),
            _ if !is_square_free(d) => Err(FieldError::NotSquareFree(d)),
            _ => Ok(Scalar { a, b, d }.normalized()),
        }
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_of(d: u64) -> Result<Self, FieldError> {
        Scalar::new(BigRational::zero(), BigRational::one(), d)
    }

    /// Convenience for small literals `p1/q1 + (p2/q2) sqrt(d)`.
    pub fn quadratic(a: (i64, i64), b: (i64, i64), d: u64) -> Result<Self, FieldError> {
        Scalar::new(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
            d,
        )
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.d = 0;
        }
        self
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Field tag: 0 for rational values.
    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The integer value, if this is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        (self.b.is_zero() && self.a.is_integer()).then(|| self.a.to_integer())
    }

    fn join(&self, other: &Scalar) -> Result<u64, FieldError> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(FieldError::Mismatch(d, e)),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = self.join(other)?;
        Ok(Scalar { a: &self.a + &other.a, b: &self.b + &other.b, d }.normalized())
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = self.join(other)?;
        Ok(Scalar { a: &self.a - &other.a, b: &self.b - &other.b, d }.normalized())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = self.join(other)?;
        let dd = rat(d as i64);
        let a = &self.a * &other.a + &self.b * &other.b * dd;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Scalar { a, b, d }.normalized())
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.join(other)?;
        let inv = other.try_recip()?;
        self.try_mul(&inv)
    }

    /// Multiplicative inverse via the conjugate: `1/x = conj(x) / N(x)`.
    pub fn try_recip(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let norm = self.norm();
        Ok(Scalar { a: &self.a / &norm, b: -&self.b / &norm, d: self.d }.normalized())
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, FieldError> {
        Ok(self.try_sub(other)?.signum_ord())
    }

    pub fn conjugate(&self) -> Scalar {
        Scalar { a: self.a.clone(), b: -&self.b, d: self.d }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d as i64)
    }

    /// Exact sign, decided by comparing `a^2` with `d b^2` when the parts
    /// have opposite signs.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * rat(self.d as i64);
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    fn signum_ord(&self) -> Ordering {
        self.signum().cmp(&0)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.a);
        if self.b.is_zero() {
            return a;
        }
        a + ratio_to_f64(&self.b) * (self.d as f64).sqrt()
    }

    /// Decimal rendering for reports. Derived from `to_f64`, never used for
    /// decisions.
    pub fn decimal(&self) -> String {
        format!("{:.12}", self.to_f64())
    }

    /// The coefficient pair used to flatten this value into two rational
    /// coordinates over `Q`.
    pub fn coefficients(&self) -> (BigRational, BigRational) {
        (self.a.clone(), self.b.clone())
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    if let Some(f) = q.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    // Huge numerators/denominators: shift both to a common scale.
    let n = q.numer();
    let dn = q.denom();
    let shift = n.bits().max(dn.bits()).saturating_sub(1000);
    let n2 = n >> shift;
    let d2 = dn >> shift;
    n2.to_f64().unwrap_or(0.0) / d2.to_f64().unwrap_or(1.0)
}

impl PartialOrd for Scalar {
    /// `None` when the two values live in incompatible fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

// The operator forms panic on field mismatch or division by zero; callers
// that cannot guarantee a single field use the `try_*` methods.
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

fn fmt_ratio(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// `p/q` for rationals, `a+b*sqrt(d)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_ratio(&self.a));
        }
        let b = fmt_ratio(&self.b.abs());
        let op = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*sqrt({})", fmt_ratio(&self.a), op, b, self.d)
    }
}

/// `{"exact", "a", "b", "decimal"}`; `a` and `b` are the rational
/// coefficients, `exact` the display form.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Scalar", 4)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("a", &fmt_ratio(&self.a))?;
        st.serialize_field("b", &fmt_ratio(&self.b))?;
        st.serialize_field("decimal", &self.decimal())?;
        st.end()
    }
}

/// Parses a rational literal `p` or `p/q`.
pub fn parse_ratio(s: &str) -> Result<BigRational, FieldError> {
    let s = s.trim();
    let bad = || FieldError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for Scalar {
    type Err = FieldError;

    /// Accepts the `Display` format: `p/q`, `a+b*sqrt(d)`, `a-b*sqrt(d)`,
    /// and the bare forms `b*sqrt(d)` / `sqrt(d)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = s.find("sqrt(") else {
            return Ok(Scalar::rational(parse_ratio(&s)?));
        };
        let bad = || FieldError::Parse(s.clone());
        let inner = s[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
        let d: u64 = inner.parse().map_err(|_| bad())?;
        let head = &s[..pos];
        let head = head.strip_suffix('*').unwrap_or(head);
        // The last sign after position 0 separates the rational part from
        // the coefficient of sqrt(d).
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (a, b) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let b = match b {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_ratio(other.strip_prefix('+').unwrap_or(other))?,
        };
        Scalar::new(parse_ratio(a)?, b, d)
    }
}

/// Least common multiple of the denominators of both coefficients.
pub fn denominator_lcm(values: &[Scalar]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| {
        acc.lcm(v.a.denom()).lcm(v.b.denom())
    })
}

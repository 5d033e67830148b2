//! Exact arithmetic in the rationals and in quadratic fields `Q(sqrt d)`.
//!
//! Elements are stored as a pair of reduced rationals `(x, y)` standing for
//! `x + y*sqrt(d)`. The field itself is a small `Copy` value and travels with
//! every element, so mixing elements of different fields is caught at the
//! operation that mixes them.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `Q` (no `d`) or `Q(sqrt d)` with `d` squarefree, nonzero and not 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticField {
    d: Option<i64>,
}

impl QuadraticField {
    pub const RATIONALS: QuadraticField = QuadraticField { d: None };

    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::InvalidField(d));
        }
        Ok(QuadraticField { d: Some(d) })
    }

    /// `None` selects `Q`.
    pub fn from_option(d: Option<i64>) -> Result<Self> {
        match d {
            None => Ok(Self::RATIONALS),
            Some(d) => Self::new(d),
        }
    }

    pub fn d(&self) -> Option<i64> {
        self.d
    }

    /// Degree over `Q`.
    pub fn kappa(&self) -> u32 {
        if self.d.is_some() {
            2
        } else {
            1
        }
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_none()
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => write!(f, "Q"),
            Some(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

pub(crate) fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// `x + y*sqrt(d)`; `y` is always zero over `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: QuadraticField,
    x: Rational,
    y: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(field: QuadraticField, x: Rational, y: Rational) -> Result<Self> {
        if field.is_rational() && !y.is_zero() {
            return Err(Error::InvalidInput(
                "irrational part given for an element of Q".into(),
            ));
        }
        Ok(FieldElement { field, x, y })
    }

    pub fn from_rational(field: QuadraticField, x: Rational) -> Self {
        FieldElement {
            field,
            x,
            y: Rational::zero(),
        }
    }

    pub fn from_int(field: QuadraticField, n: impl Into<BigInt>) -> Self {
        Self::from_rational(field, Rational::from_integer(n.into()))
    }

    pub fn zero(field: QuadraticField) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: QuadraticField) -> Self {
        Self::from_int(field, 1)
    }

    /// `sqrt(d)`; panics over `Q`.
    pub fn sqrt_d(field: QuadraticField) -> Self {
        assert!(!field.is_rational(), "sqrt(d) requested in Q");
        FieldElement {
            field,
            x: Rational::zero(),
            y: Rational::one(),
        }
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        FieldElement {
            field: self.field,
            x: self.x.clone(),
            y: -self.y.clone(),
        }
    }

    /// `x^2 - d*y^2`, or `x` itself over `Q`.
    pub fn norm(&self) -> Rational {
        match self.field.d {
            None => self.x.clone(),
            Some(d) => &self.x * &self.x - Rational::from_integer(d.into()) * &self.y * &self.y,
        }
    }

    /// `2x`, or `x` itself over `Q`.
    pub fn trace(&self) -> Rational {
        match self.field.d {
            None => self.x.clone(),
            Some(_) => &self.x * Rational::from_integer(2.into()),
        }
    }

    pub fn is_algebraic_integer(&self) -> bool {
        if self.field.is_rational() {
            return self.x.is_integer();
        }
        self.trace().is_integer() && self.norm().is_integer()
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(FieldElement {
            field: self.field,
            x: &self.x + &other.x,
            y: &self.y + &other.y,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(FieldElement {
            field: self.field,
            x: &self.x - &other.x,
            y: &self.y - &other.y,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let d = Rational::from_integer(self.field.d.unwrap_or(0).into());
        Ok(FieldElement {
            field: self.field,
            x: &self.x * &other.x + d * &self.y * &other.y,
            y: &self.x * &other.y + &other.x * &self.y,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.is_rational() {
            return Ok(Self::from_rational(self.field, self.x.recip()));
        }
        // 1/a = conj(a) / N(a)
        let n = self.norm();
        Ok(FieldElement {
            field: self.field,
            x: &self.x / &n,
            y: -(&self.y / &n),
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElement {
            field: self.field,
            x: &self.x * r,
            y: &self.y * r,
        }
    }

    /// Parses `"x"` or `"x,y"` where each part is `n` or `n/m`.
    pub fn parse(field: QuadraticField, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(',');
        let x = parse_rational(parts.next().unwrap_or(""))?;
        let y = match parts.next() {
            Some(p) => parse_rational(p)?,
            None => Rational::zero(),
        };
        if parts.next().is_some() {
            return Err(Error::Parse(s.to_string()));
        }
        Self::new(field, x, y)
    }

    fn float_parts(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, m)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let m = BigInt::from_str(m.trim()).map_err(|_| err())?;
            if m.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, m))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| err())?,
        )),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_rational() {
            write!(f, "{}", format_rational(&self.x))
        } else {
            write!(f, "{},{}", format_rational(&self.x), format_rational(&self.y))
        }
    }
}

pub fn elem_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect(concat!("FieldElement::", stringify!($m)))
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field,
            x: -self.x.clone(),
            y: -self.y.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Natural log of a nonzero big integer's absolute value, accurate for
/// integers far beyond the `f64` range.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(r: &Rational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match r.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => v,
        _ => {
            let sign = if r.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
            sign * ln_rational(r).exp()
        }
    }
}

/// `ln |x^(i)|` for each Archimedean embedding, before normalisation.
/// Real fields list the `+sqrt d` embedding first. Zero maps to `-inf`.
pub(crate) fn arch_log_abs_raw(field: QuadraticField, a: &FieldElement) -> Vec<(String, f64)> {
    match field.d() {
        None => vec![("real".to_string(), ln_abs_or_neg_inf(&a.x))],
        Some(d) if d < 0 => {
            // |x + y sqrt d|^2 = norm
            let n = a.norm();
            let v = if n.is_zero() { f64::NEG_INFINITY } else { 0.5 * ln_rational(&n) };
            vec![("complex".to_string(), v)]
        }
        Some(d) => {
            if a.is_zero() {
                return vec![
                    ("real_1".to_string(), f64::NEG_INFINITY),
                    ("real_2".to_string(), f64::NEG_INFINITY),
                ];
            }
            let (x, y) = a.float_parts();
            let s = (d as f64).sqrt();
            let plus = x + y * s;
            let minus = x - y * s;
            let n = a.norm();
            // the smaller conjugate is recovered from the norm to avoid cancellation
            let (lp, lm) = if n.is_zero() {
                (plus.abs().ln(), minus.abs().ln())
            } else if plus.abs() >= minus.abs() {
                let lp = plus.abs().ln();
                (lp, ln_rational(&n) - lp)
            } else {
                let lm = minus.abs().ln();
                (ln_rational(&n) - lm, lm)
            };
            vec![("real_1".to_string(), lp), ("real_2".to_string(), lm)]
        }
    }
}

fn ln_abs_or_neg_inf(r: &Rational) -> f64 {
    if r.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_rational(r)
    }
}

/// `ln ||a||_v` for every Archimedean place, normalised by `kappa_v / kappa`.
pub fn arch_log_normalized(field: QuadraticField, a: &FieldElement) -> Vec<(String, f64)> {
    let kappa = field.kappa() as f64;
    arch_log_abs_raw(field, a)
        .into_iter()
        .map(|(label, l)| {
            let kappa_v = if label == "real_1" || label == "real_2" || label == "real" {
                1.0
            } else {
                2.0
            };
            (label, l * kappa_v / kappa)
        })
        .collect()
}

/// `||a||_v` for every Archimedean place `v`.
pub fn arch_abs_normalized(field: QuadraticField, a: &FieldElement) -> Vec<(String, f64)> {
    arch_log_normalized(field, a)
        .into_iter()
        .map(|(label, l)| (label, l.exp()))
        .collect()
}

/// Smallest positive integer `n` with `n*a` an algebraic integer.
pub fn denominator(a: &FieldElement) -> BigInt {
    let bound = a.x.denom().lcm(a.y.denom());
    let mut divisors = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= bound {
        if (&bound % &i).is_zero() {
            divisors.push(i.clone());
            divisors.push(&bound / &i);
        }
        i += 1;
    }
    divisors.sort();
    divisors
        .into_iter()
        .find(|n| a.scale(&Rational::from_integer(n.clone())).is_algebraic_integer())
        .unwrap_or(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> QuadraticField {
        QuadraticField::new(5).unwrap()
    }

    fn el(f: QuadraticField, s: &str) -> FieldElement {
        FieldElement::parse(f, s).unwrap()
    }

    #[test]
    fn golden_ratio_times_conjugate() {
        let phi = el(q5(), "1/2,1/2");
        let psi = el(q5(), "1/2,-1/2");
        assert_eq!(&phi * &psi, FieldElement::from_int(q5(), -1));
        assert_eq!(phi.conjugate(), psi);
        assert_eq!(phi.trace(), Rational::one());
    }

    #[test]
    fn add_zero_is_identity() {
        let a = el(q5(), "3/7,-2");
        assert_eq!(&a + &FieldElement::zero(q5()), a);
    }

    #[test]
    fn one_over_sqrt5() {
        let r = elem_arith(&FieldElement::one(q5()), &FieldElement::sqrt_d(q5()), ArithOp::Div).unwrap();
        assert_eq!(r, el(q5(), "0,1/5"));
        assert!((&r * &FieldElement::sqrt_d(q5())).is_one());
    }

    #[test]
    fn division_errors() {
        let a = FieldElement::one(q5());
        assert_eq!(
            elem_arith(&a, &FieldElement::zero(q5()), ArithOp::Div),
            Err(Error::DivisionByZero)
        );
        let b = FieldElement::one(QuadraticField::new(2).unwrap());
        assert!(matches!(
            elem_arith(&a, &b, ArithOp::Add),
            Err(Error::FieldMismatch(_, _))
        ));
    }

    #[test]
    fn norm_and_trace() {
        assert_eq!(el(q5(), "2,1").norm(), Rational::from_integer((-1).into()));
        let q = QuadraticField::RATIONALS;
        assert_eq!(el(q, "-3/4").norm(), el(q, "-3/4").x().clone());
        assert_eq!(el(q, "-3/4").trace(), el(q, "-3/4").x().clone());
    }

    #[test]
    fn algebraic_integer_test() {
        assert!(el(q5(), "1/2,1/2").is_algebraic_integer());
        assert!(!el(q5(), "1/3,1/3").is_algebraic_integer());
        assert!(!el(q5(), "0,1/2").is_algebraic_integer());
        let q = QuadraticField::RATIONALS;
        assert!(el(q, "4").is_algebraic_integer());
        assert!(!el(q, "1/2").is_algebraic_integer());
    }

    #[test]
    fn arch_values() {
        let a = el(q5(), "1,1");
        let v = arch_abs_normalized(q5(), &a);
        assert!((v[0].1 - 1.7989).abs() < 1e-4);
        assert!((v[1].1 - 1.1118).abs() < 1e-4);
        let r = arch_abs_normalized(QuadraticField::RATIONALS, &el(QuadraticField::RATIONALS, "-7"));
        assert_eq!(r.len(), 1);
        assert!((r[0].1 - 7.0).abs() < 1e-12);
        let s = arch_abs_normalized(q5(), &FieldElement::sqrt_d(q5()));
        assert!((s[0].1 * s[1].1 - 5f64.sqrt()).abs() < 1e-12);
        let gi = QuadraticField::new(-1).unwrap();
        let c = arch_abs_normalized(gi, &el(gi, "3,4"));
        assert_eq!(c.len(), 1);
        assert!((c[0].1 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn field_validation() {
        assert!(QuadraticField::new(4).is_err());
        assert!(QuadraticField::new(1).is_err());
        assert!(QuadraticField::new(0).is_err());
        assert!(QuadraticField::new(-12).is_err());
        assert!(QuadraticField::new(-1).is_ok());
        assert!(FieldElement::parse(QuadraticField::RATIONALS, "1,2").is_err());
        assert!(FieldElement::parse(q5(), "1/0").is_err());
        assert!(FieldElement::parse(q5(), "a").is_err());
    }

    #[test]
    fn parse_display_roundtrip() {
        let a = el(q5(), "-6/4,3");
        assert_eq!(a.to_string(), "-3/2,3");
        assert_eq!(el(q5(), &a.to_string()), a);
    }

    #[test]
    fn denominators() {
        assert_eq!(denominator(&el(q5(), "0,1/5")), BigInt::from(5));
        assert_eq!(denominator(&el(q5(), "1/2,1/2")), BigInt::from(1));
        assert_eq!(denominator(&el(q5(), "1/4,1/4")), BigInt::from(2));
        let q = QuadraticField::RATIONALS;
        assert_eq!(denominator(&el(q, "5/6")), BigInt::from(6));
    }

    #[test]
    fn ln_of_huge_integers() {
        let n = BigInt::from(3).pow(2000);
        let expected = 2000.0 * 3f64.ln();
        assert!((ln_bigint(&n) - expected).abs() / expected < 1e-14);
    }
}

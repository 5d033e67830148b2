//! Non-Archimedean places of `Q` and `Q(sqrt d)`, exact valuations and
//! normalised absolute values in log space.
//!
//! Valuations are measured in units where `w_v(p) = 1`, so a ramified place
//! takes values in `(1/2)Z`. The normalised absolute value is then
//! `||x||_v = p^(-w_v(x) * kappa_v / kappa)` and only its exponent is stored.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_divisors, vp_int, vp_rational};
use crate::error::{Error, Result};
use crate::numfield::{arch_log_normalized, FieldElement, QuadraticField, Rational};
use crate::padics::split_root;

/// Default cap on the working precision used to resolve split valuations.
pub const SPLIT_VALUATION_CAP: u32 = 256;

/// Ordering follows the certificate scan order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Splitting {
    #[serde(rename = "split_1")]
    Split1,
    #[serde(rename = "split_2")]
    Split2,
    #[serde(rename = "inert")]
    Inert,
    #[serde(rename = "ramified")]
    Ramified,
    #[serde(rename = "rational")]
    Rational,
}

impl Splitting {
    pub fn label(&self) -> &'static str {
        match self {
            Splitting::Split1 => "split_1",
            Splitting::Split2 => "split_2",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
            Splitting::Rational => "rational",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "split_1" => Splitting::Split1,
            "split_2" => Splitting::Split2,
            "inert" => Splitting::Inert,
            "ramified" => Splitting::Ramified,
            "rational" => Splitting::Rational,
            _ => return Err(Error::Parse(s.to_string())),
        })
    }
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Place {
    field: QuadraticField,
    p: u64,
    splitting: Splitting,
}

/// Wire form of a place: `{"p": 11, "splitting": "split_1", "e": 1, "f": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceJson {
    pub p: u64,
    pub splitting: Splitting,
    pub e: u32,
    pub f: u32,
}

impl Place {
    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn splitting(&self) -> Splitting {
        self.splitting
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        if self.splitting == Splitting::Ramified {
            2
        } else {
            1
        }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        if self.splitting == Splitting::Inert {
            2
        } else {
            1
        }
    }

    pub fn kappa_v(&self) -> u32 {
        self.e() * self.f()
    }

    pub fn to_json(&self) -> PlaceJson {
        PlaceJson {
            p: self.p,
            splitting: self.splitting,
            e: self.e(),
            f: self.f(),
        }
    }

    /// Rebuilds a place from its wire form, checking it really lies over `p` in `field`.
    pub fn from_json(field: QuadraticField, j: &PlaceJson) -> Result<Self> {
        let place = places_above(field, j.p)?
            .into_iter()
            .find(|v| v.splitting == j.splitting)
            .ok_or_else(|| Error::InvalidInput(format!("no {} place over {} in {field}", j.splitting, j.p)))?;
        if place.e() != j.e || place.f() != j.f {
            return Err(Error::InvalidInput("place e/f do not match".into()));
        }
        Ok(place)
    }

    /// Local integral basis `{1, omega}` with `omega^2 = t*omega + c`.
    ///
    /// `omega = (1 + sqrt d)/2` at `p = 2` when `d = 1 mod 4`, since half-integral
    /// coordinates are units away from 2 but not at 2; otherwise `omega = sqrt d`.
    pub(crate) fn local_basis(&self) -> (i64, BigInt) {
        match self.field.d() {
            None => (0, BigInt::zero()),
            Some(d) if self.p == 2 && d.rem_euclid(4) == 1 => (1, BigInt::from((d - 1) / 4)),
            Some(d) => (0, BigInt::from(d)),
        }
    }

    /// Coordinates of `a` in the local basis.
    pub(crate) fn local_coords(&self, a: &FieldElement) -> (Rational, Rational) {
        let (t, _) = self.local_basis();
        if t == 1 {
            // sqrt d = 2 omega - 1
            (a.x() - a.y(), a.y() * Rational::from_integer(2.into()))
        } else {
            (a.x().clone(), a.y().clone())
        }
    }

    /// Norm of `u + w*omega` in the local basis.
    pub(crate) fn basis_norm(&self, u: &BigInt, w: &BigInt) -> BigInt {
        let (t, c) = self.local_basis();
        u * u + BigInt::from(t) * u * w - c * w * w
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {} in {}", self.splitting, self.p, self.field)
    }
}

/// Exponent of a normalised absolute value: `||x||_v = p^(-coefficient)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogAbs {
    pub p: u64,
    pub coefficient: Rational,
}

impl LogAbs {
    pub fn ln(&self) -> f64 {
        -crate::numfield::rational_to_f64(&self.coefficient) * (self.p as f64).ln()
    }
}

fn legendre_is_residue(d: i64, p: u64) -> bool {
    let a = BigInt::from(d).mod_floor(&BigInt::from(p));
    if a.is_zero() {
        return false;
    }
    a.modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p)).is_one()
}

/// All places of `field` above the rational prime `p`, in scan order.
pub fn places_above(field: QuadraticField, p: u64) -> Result<Vec<Place>> {
    if !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    let mk = |splitting| Place { field, p, splitting };
    let d = match field.d() {
        None => return Ok(vec![mk(Splitting::Rational)]),
        Some(d) => d,
    };
    let splitting = if p == 2 {
        match d.rem_euclid(8) {
            1 => None,
            5 => Some(Splitting::Inert),
            _ => Some(Splitting::Ramified),
        }
    } else if d.rem_euclid(p as i64) == 0 {
        Some(Splitting::Ramified)
    } else if legendre_is_residue(d, p) {
        None
    } else {
        Some(Splitting::Inert)
    };
    Ok(match splitting {
        None => vec![mk(Splitting::Split1), mk(Splitting::Split2)],
        Some(s) => vec![mk(s)],
    })
}

/// `w_v(a)` normalised so that `w_v(p) = 1`.
pub fn valuation(v: &Place, a: &FieldElement) -> Result<Rational> {
    valuation_with_cap(v, a, SPLIT_VALUATION_CAP)
}

pub fn valuation_with_cap(v: &Place, a: &FieldElement, cap: u32) -> Result<Rational> {
    if a.field() != v.field {
        return Err(Error::FieldMismatch(a.field().to_string(), v.field.to_string()));
    }
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let p = v.p;
    match v.splitting {
        Splitting::Rational => Ok(Rational::from_integer(vp_rational(a.x(), p).into())),
        Splitting::Inert | Splitting::Ramified => Ok(Rational::new(vp_rational(&a.norm(), p).into(), 2.into())),
        Splitting::Split1 | Splitting::Split2 => {
            let (x0, x1) = v.local_coords(a);
            let den = x0.denom().lcm(x1.denom());
            let u = (&x0 * Rational::from_integer(den.clone())).to_integer();
            let w = (&x1 * Rational::from_integer(den.clone())).to_integer();
            // v(u + w rho) + v(u + w rho') = v_p(norm), so norm valuation + 1 digits suffice
            let needed = vp_int(&v.basis_norm(&u, &w), p) + 1;
            if needed > cap as u64 {
                return Err(Error::PrecisionCapExceeded { requested: needed as u32, cap });
            }
            let needed = needed as u32;
            let modulus = crate::arith::pow_big(p, needed);
            let rho = split_root(v, needed)?;
            let image = (u + w * rho).mod_floor(&modulus);
            let vi = vp_int(&image, p) as i64;
            Ok(Rational::from_integer((vi - vp_int(&den, p) as i64).into()))
        }
    }
}

pub fn normalized_abs_log(v: &Place, a: &FieldElement) -> Result<LogAbs> {
    let w = valuation(v, a)?;
    let scale = Rational::new(v.kappa_v().into(), v.field.kappa().into());
    Ok(LogAbs { p: v.p, coefficient: w * scale })
}

/// `v_p(n!)` by Legendre's formula.
pub fn factorial_valuation(p: u64, n: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// For every prime dividing the norm of `a`, the exact sum of the
/// normalised log-coefficients over the places above it.
pub fn non_archimedean_log_coefficients(field: QuadraticField, a: &FieldElement) -> Result<Vec<(u64, Rational)>> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = a.norm();
    let mut primes = prime_divisors(n.numer());
    primes.extend(prime_divisors(n.denom()));
    primes.sort_unstable();
    primes.dedup();
    let mut out = Vec::with_capacity(primes.len());
    for p in primes {
        let mut total = Rational::zero();
        for v in places_above(field, p)? {
            total += normalized_abs_log(&v, a)?.coefficient;
        }
        out.push((p, total));
    }
    Ok(out)
}

/// `|sum_v ln ||a||_v|` over all places; zero up to rounding by the product formula.
pub fn product_formula_defect(field: QuadraticField, a: &FieldElement) -> Result<f64> {
    let finite: f64 = non_archimedean_log_coefficients(field, a)?
        .iter()
        .map(|(p, c)| -crate::numfield::rational_to_f64(c) * (*p as f64).ln())
        .sum();
    let arch: f64 = arch_log_normalized(field, a).iter().map(|(_, l)| l).sum();
    Ok((finite + arch).abs())
}

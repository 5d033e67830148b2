//! Fixed-precision arithmetic in the completions `K_v` and certified
//! evaluation of Euler's series and generalised factorial series.
//!
//! Rational and split places work in `Z / p^N` (split places embed `sqrt d`
//! through a Hensel root). Inert and ramified places work in
//! `(Z / p^N)[X] / (X^2 - tX - c)` over the local integral basis of the place.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{pow_big, rational_mod, vp_int};
use crate::error::{Error, Result};
use crate::numfield::{format_rational, FieldElement, Rational};
use crate::places::{factorial_valuation, valuation, Place, Splitting};

/// Largest precision exponent accepted by the evaluators.
pub const PRECISION_CAP: u32 = 4096;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Square root of a nonzero quadratic residue `a` modulo an odd prime `p`.
fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Newton-lifts a simple root `r0` of `f(X) = X^2 - tX - c` from mod `p` to mod `p^n`.
fn lift_root(r0: BigInt, t: &BigInt, c: &BigInt, p: u64, n: u32) -> BigInt {
    let mut r = r0;
    let mut k = 1u32;
    while k < n {
        k = (2 * k).min(n);
        let m = pow_big(p, k);
        let f = &r * &r - t * &r - c;
        let df = BigInt::from(2) * &r - t;
        let inv = crate::arith::mod_inverse(&df, &m).expect("root is simple");
        r = (r - f * inv).mod_floor(&m);
    }
    r.mod_floor(&pow_big(p, n))
}

/// `r` with `r^2 = d (mod p^n)`, `0 < r < p^n`, normalised so that
/// `r mod p` is the smaller of the two square roots of `d` modulo `p`.
pub fn hensel_sqrt(d: i64, p: u64, n: u32) -> Result<BigInt> {
    let not_split = Error::NotSplit { d, p };
    if p == 2 || !crate::arith::is_prime(p) || n == 0 {
        return Err(not_split);
    }
    let a = d.rem_euclid(p as i64) as u64;
    let r0 = tonelli_shanks(a, p).ok_or(not_split)?;
    let r0 = r0.min(p - r0);
    Ok(lift_root(BigInt::from(r0), &BigInt::zero(), &BigInt::from(d), p, n))
}

/// Image of the local basis element `omega` at a split place, modulo `p^n`.
pub(crate) fn split_root(v: &Place, n: u32) -> Result<BigInt> {
    let d = v.field().d().ok_or(Error::InvalidInput("split root over Q".into()))?;
    let p = v.p();
    let modulus = pow_big(p, n);
    let second = v.splitting() == Splitting::Split2;
    if p == 2 {
        // omega = (1 + sqrt d)/2 is a root of X^2 - X - (d-1)/4; the roots are 0 and 1 mod 2
        let (t, c) = v.local_basis();
        let r0 = if second { BigInt::one() } else { BigInt::zero() };
        return Ok(lift_root(r0, &BigInt::from(t), &c, 2, n));
    }
    let r = hensel_sqrt(d, p, n)?;
    Ok(if second { (&modulus - r).mod_floor(&modulus) } else { r })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Residue {
    /// Rational and split places.
    Scalar(BigInt),
    /// `u + w*omega` at inert and ramified places.
    Pair(BigInt, BigInt),
}

/// An element of `O_v / p^N O_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionElement {
    place: Place,
    precision: u32,
    modulus: BigInt,
    omega_image: Option<BigInt>,
    residue: Residue,
}

impl CompletionElement {
    fn with_residue(&self, residue: Residue) -> Self {
        CompletionElement {
            place: self.place,
            precision: self.precision,
            modulus: self.modulus.clone(),
            omega_image: self.omega_image.clone(),
            residue,
        }
    }

    fn base(place: &Place, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        let omega_image = match place.splitting() {
            Splitting::Split1 | Splitting::Split2 => Some(split_root(place, precision)?),
            _ => None,
        };
        let residue = match place.splitting() {
            Splitting::Inert | Splitting::Ramified => Residue::Pair(BigInt::zero(), BigInt::zero()),
            _ => Residue::Scalar(BigInt::zero()),
        };
        Ok(CompletionElement {
            place: *place,
            precision,
            modulus: pow_big(place.p(), precision),
            omega_image,
            residue,
        })
    }

    pub fn zero(place: &Place, precision: u32) -> Result<Self> {
        Self::base(place, precision)
    }

    /// Image of a field element that is integral at `place`.
    pub fn embed(place: &Place, a: &FieldElement, precision: u32) -> Result<Self> {
        if a.field() != place.field() {
            return Err(Error::FieldMismatch(a.field().to_string(), place.field().to_string()));
        }
        let z = Self::base(place, precision)?;
        z.embed_like(a)
    }

    /// Embeds `a` at the same place and precision as `self`.
    pub fn embed_like(&self, a: &FieldElement) -> Result<Self> {
        let p = self.place.p();
        let (x0, x1) = self.place.local_coords(a);
        let red = |r: &Rational| rational_mod(r, p, &self.modulus).ok_or(Error::NotIntegral(p));
        let u = red(&x0)?;
        let w = red(&x1)?;
        let residue = match (&self.residue, &self.omega_image) {
            (Residue::Pair(..), _) => Residue::Pair(u, w),
            (Residue::Scalar(_), Some(rho)) => Residue::Scalar((u + w * rho).mod_floor(&self.modulus)),
            (Residue::Scalar(_), None) => Residue::Scalar(u),
        };
        Ok(self.with_residue(residue))
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &Residue {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        match &self.residue {
            Residue::Scalar(r) => r.is_zero(),
            Residue::Pair(u, w) => u.is_zero() && w.is_zero(),
        }
    }

    fn check(&self, other: &Self) {
        assert!(
            self.place == other.place && self.precision == other.precision,
            "completion elements from different rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let m = &self.modulus;
        let residue = match (&self.residue, &other.residue) {
            (Residue::Scalar(a), Residue::Scalar(b)) => Residue::Scalar((a + b).mod_floor(m)),
            (Residue::Pair(a, b), Residue::Pair(c, d)) => Residue::Pair((a + c).mod_floor(m), (b + d).mod_floor(m)),
            _ => unreachable!(),
        };
        self.with_residue(residue)
    }

    pub fn neg(&self) -> Self {
        let m = &self.modulus;
        let residue = match &self.residue {
            Residue::Scalar(a) => Residue::Scalar((-a).mod_floor(m)),
            Residue::Pair(a, b) => Residue::Pair((-a).mod_floor(m), (-b).mod_floor(m)),
        };
        self.with_residue(residue)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let m = &self.modulus;
        let residue = match (&self.residue, &other.residue) {
            (Residue::Scalar(a), Residue::Scalar(b)) => Residue::Scalar((a * b).mod_floor(m)),
            (Residue::Pair(u1, w1), Residue::Pair(u2, w2)) => {
                let (t, c) = self.place.local_basis();
                let ww = w1 * w2;
                let u = (u1 * u2 + &c * &ww).mod_floor(m);
                let w = (u1 * w2 + u2 * w1 + BigInt::from(t) * ww).mod_floor(m);
                Residue::Pair(u, w)
            }
            _ => unreachable!(),
        };
        self.with_residue(residue)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let m = &self.modulus;
        let residue = match &self.residue {
            Residue::Scalar(a) => Residue::Scalar((a * k).mod_floor(m)),
            Residue::Pair(a, b) => Residue::Pair((a * k).mod_floor(m), (b * k).mod_floor(m)),
        };
        self.with_residue(residue)
    }

    /// Reduces to a lower precision.
    pub fn reduce(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::InvalidInput("cannot raise precision by reduction".into()));
        }
        let z = Self::base(&self.place, precision)?;
        let m = &z.modulus;
        let residue = match &self.residue {
            Residue::Scalar(a) => Residue::Scalar(a.mod_floor(m)),
            Residue::Pair(a, b) => Residue::Pair(a.mod_floor(m), b.mod_floor(m)),
        };
        Ok(z.with_residue(residue))
    }

    /// `w_v` of the represented element when it is below the precision,
    /// `None` when the residue cannot be told apart from zero.
    pub fn valuation(&self) -> Option<Rational> {
        let p = self.place.p();
        let n = self.precision as i64;
        match &self.residue {
            Residue::Scalar(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Rational::from_integer(vp_int(r, p).into()))
                }
            }
            Residue::Pair(u, w) => {
                if u.is_zero() && w.is_zero() {
                    return None;
                }
                // X^2 - tX - c is irreducible, so a nonzero lift has nonzero norm
                let v = vp_int(&self.place.basis_norm(u, w), p) as i64;
                let w = Rational::new(v.into(), 2.into());
                if w < Rational::from_integer(n.into()) {
                    Some(w)
                } else {
                    None
                }
            }
        }
    }
}

impl Serialize for Residue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Residue::Scalar(r) => big_number(r).serialize(s),
            Residue::Pair(u, w) => [big_number(u), big_number(w)].serialize(s),
        }
    }
}

/// Exact JSON number for a big integer.
pub(crate) fn big_number(n: &BigInt) -> serde_json::Number {
    if let Some(v) = n.to_i64() {
        return v.into();
    }
    n.to_string().parse().expect("integer literal is a valid JSON number")
}

/// A residue of a series value together with a proven lower bound on the
/// valuation of the part of the series that was not summed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedValue {
    pub value: CompletionElement,
    pub tail_valuation_bound: Rational,
    pub terms_used: u64,
}

impl CertifiedValue {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serialisable")
    }
}

impl Serialize for CertifiedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CertifiedValue", 6)?;
        st.serialize_field("p", &self.value.place.p())?;
        st.serialize_field("place", self.value.place.splitting().label())?;
        st.serialize_field("N", &self.value.precision)?;
        st.serialize_field("residue", &self.value.residue)?;
        st.serialize_field("tail_valuation_bound", &format_rational(&self.tail_valuation_bound))?;
        st.serialize_field("terms_used", &self.terms_used)?;
        st.end()
    }
}

fn check_precision(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    if n > PRECISION_CAP {
        return Err(Error::PrecisionCapExceeded { requested: n, cap: PRECISION_CAP });
    }
    Ok(())
}

/// `w_v(a)`, rejecting elements outside the valuation ring (`w_v < 0`).
/// `None` stands for the zero element.
fn integral_valuation(v: &Place, a: &FieldElement) -> Result<Option<Rational>> {
    if a.is_zero() {
        return Ok(None);
    }
    let w = valuation(v, a)?;
    if w < Rational::zero() {
        return Err(Error::NotIntegral(v.p()));
    }
    Ok(Some(w))
}

/// `F_v(alpha) = sum n! alpha^n` modulo `p^N`, summed until every remaining
/// term provably has valuation at least `N`.
pub fn euler_eval_certified(v: &Place, alpha: &FieldElement, precision: u32) -> Result<CertifiedValue> {
    check_precision(precision)?;
    let one = CompletionElement::embed(v, &FieldElement::one(v.field()), precision)?;
    let target = Rational::from_integer(precision.into());
    let w_alpha = match integral_valuation(v, alpha)? {
        None => {
            return Ok(CertifiedValue { value: one, tail_valuation_bound: target, terms_used: 1 });
        }
        Some(w) => w,
    };
    let a = one.embed_like(alpha)?;
    let mut sum = CompletionElement::zero(v, precision)?;
    let mut term = one;
    let mut n: u64 = 0;
    loop {
        let bound = Rational::from_integer(factorial_valuation(v.p(), n).into())
            + &w_alpha * Rational::from_integer(n.into());
        if bound >= target {
            return Ok(CertifiedValue { value: sum, tail_valuation_bound: bound, terms_used: n });
        }
        sum = sum.add(&term);
        n += 1;
        term = term.mul(&a).mul_int(&BigInt::from(n));
    }
}

/// Generalised factorial series `sum [P]_n t^n` with `P(x) = p0 + p1*x`,
/// `[P]_n = P(0) P(1) ... P(n-1)`, modulo `p^N`.
pub fn genfact_eval(
    v: &Place,
    p0: &FieldElement,
    p1: &FieldElement,
    t: &FieldElement,
    precision: u32,
    n_max: u64,
) -> Result<CertifiedValue> {
    check_precision(precision)?;
    if p1.is_zero() {
        return Err(Error::DegenerateP("P must have degree one".into()));
    }
    integral_valuation(v, p0)?;
    integral_valuation(v, p1)?;
    let one = CompletionElement::embed(v, &FieldElement::one(v.field()), precision)?;
    let target = Rational::from_integer(precision.into());
    let w_t = match integral_valuation(v, t)? {
        None => return Ok(CertifiedValue { value: one, tail_valuation_bound: target, terms_used: 1 }),
        Some(w) => w,
    };
    let te = one.embed_like(t)?;
    let mut sum = CompletionElement::zero(v, precision)?;
    let mut term = one;
    let mut w_pochhammer = Rational::zero();
    let mut n: u64 = 0;
    while n <= n_max {
        let bound = &w_pochhammer + &w_t * Rational::from_integer(n.into());
        if bound >= target {
            return Ok(CertifiedValue { value: sum, tail_valuation_bound: bound, terms_used: n });
        }
        sum = sum.add(&term);
        let pk = p0 + &p1.scale(&Rational::from_integer(n.into()));
        if pk.is_zero() {
            // every later [P]_n vanishes: the sum is exact
            return Ok(CertifiedValue { value: sum, tail_valuation_bound: target, terms_used: n + 1 });
        }
        w_pochhammer += valuation(v, &pk)?;
        term = term.mul(&te.embed_like(&pk)?).mul(&te);
        n += 1;
    }
    Err(Error::NoConvergenceEvidence(precision))
}

/// The residue of an integer as a plain number (rational places only).
pub fn scalar_residue(c: &CompletionElement) -> Option<&BigInt> {
    match c.residue() {
        Residue::Scalar(r) => Some(r),
        Residue::Pair(..) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::QuadraticField;
    use crate::places::places_above;

    fn rat_place(p: u64) -> Place {
        places_above(QuadraticField::RATIONALS, p).unwrap()[0]
    }

    fn int(n: i64) -> FieldElement {
        FieldElement::from_int(QuadraticField::RATIONALS, n)
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_sqrt(5, 11, 2).unwrap(), BigInt::from(48));
        assert_eq!(hensel_sqrt(2, 7, 1).unwrap(), BigInt::from(3));
        assert_eq!(hensel_sqrt(5, 2, 1), Err(Error::NotSplit { d: 5, p: 2 }));
        assert!(hensel_sqrt(3, 5, 3).is_err());
        assert!(hensel_sqrt(10, 5, 3).is_err());
    }

    #[test]
    fn tonelli_matches_brute_force() {
        for p in [3u64, 5, 7, 13, 17, 41, 97, 113, 257] {
            for a in 1..p {
                let brute = (1..p).find(|x| x * x % p == a);
                let ts = tonelli_shanks(a, p);
                assert_eq!(brute.is_some(), ts.is_some(), "p={p} a={a}");
                if let Some(r) = ts {
                    assert_eq!(r * r % p, a);
                }
            }
        }
    }

    #[test]
    fn two_adic_split_root() {
        let q17 = QuadraticField::new(17).unwrap();
        for v in places_above(q17, 2).unwrap() {
            let rho = split_root(&v, 20).unwrap();
            let m = pow_big(2, 20);
            // rho^2 - rho - 4 = 0
            assert!((&rho * &rho - &rho - BigInt::from(4)).mod_floor(&m).is_zero());
        }
    }

    #[test]
    fn euler_at_two_and_five() {
        let c = euler_eval_certified(&rat_place(2), &int(1), 2).unwrap();
        assert_eq!(scalar_residue(&c.value), Some(&BigInt::from(2)));
        assert!(c.tail_valuation_bound >= Rational::from_integer(3.into()));
        assert_eq!(c.terms_used, 4);
        let c = euler_eval_certified(&rat_place(5), &int(1), 2).unwrap();
        assert_eq!(scalar_residue(&c.value), Some(&BigInt::from(14)));
        assert_eq!(c.terms_used, 10);
    }

    #[test]
    fn euler_at_zero_is_one() {
        for p in [2, 3, 7] {
            let c = euler_eval_certified(&rat_place(p), &int(0), 5).unwrap();
            assert_eq!(scalar_residue(&c.value), Some(&BigInt::one()));
        }
    }

    #[test]
    fn euler_rejects_non_integral_and_huge_precision() {
        let half = FieldElement::parse(QuadraticField::RATIONALS, "1/2").unwrap();
        assert_eq!(euler_eval_certified(&rat_place(2), &half, 4), Err(Error::NotIntegral(2)));
        assert!(matches!(
            euler_eval_certified(&rat_place(2), &int(1), PRECISION_CAP + 1),
            Err(Error::PrecisionCapExceeded { .. })
        ));
    }

    #[test]
    fn genfact_examples() {
        let v = rat_place(3);
        let c = genfact_eval(&v, &int(1), &int(2), &int(1), 2, 1000).unwrap();
        assert_eq!(scalar_residue(&c.value), Some(&BigInt::from(8)));
        let e = euler_eval_certified(&v, &int(1), 6).unwrap();
        let g = genfact_eval(&v, &int(1), &int(1), &int(1), 6, 1000).unwrap();
        assert_eq!(e, g);
        assert_eq!(
            genfact_eval(&v, &int(1), &int(3), &int(1), 4, 200),
            Err(Error::NoConvergenceEvidence(4))
        );
        assert!(matches!(genfact_eval(&v, &int(1), &int(0), &int(1), 4, 200), Err(Error::DegenerateP(_))));
    }

    #[test]
    fn certified_value_json() {
        let c = euler_eval_certified(&rat_place(2), &int(1), 2).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"p":2,"place":"rational","N":2,"residue":2,"tail_valuation_bound":"3","terms_used":4}"#
        );
        let q5 = QuadraticField::new(5).unwrap();
        let inert = places_above(q5, 2).unwrap()[0];
        let phi = FieldElement::parse(q5, "1/2,1/2").unwrap();
        let c = euler_eval_certified(&inert, &phi, 3).unwrap();
        let j = c.to_json();
        assert!(j["residue"].is_array());
        assert_eq!(j["place"], "inert");
    }
}

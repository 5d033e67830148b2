//! Constants, the limsup diagnostic, the effective bound chain for the lower
//! bound theorem, the residue-class condition, reduction of linear
//! recurrences, and the non-vanishing certificate search.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, is_prime, prime_divisors, primes_up_to};
use crate::error::{Error, Result};
use crate::numfield::{arch_abs_normalized, denominator, format_rational, parse_rational, FieldElement, QuadraticField, Rational};
use crate::padics::{euler_eval_certified, CompletionElement};
use crate::pade::{pade_construct, select_mu};
use crate::places::{factorial_valuation, places_above, valuation, Place, PlaceJson};

/// Which non-Archimedean places make up `V`.
#[derive(Clone, Debug, PartialEq)]
pub enum ValuationSetDescriptor {
    All,
    /// Every place except the listed ones.
    Cofinite(Vec<Place>),
    /// Places above primes `p` with `p mod modulus` in `classes`.
    ResidueClasses { modulus: u64, classes: Vec<u64> },
}

impl ValuationSetDescriptor {
    pub fn validate(&self, field: QuadraticField) -> Result<()> {
        match self {
            ValuationSetDescriptor::All => Ok(()),
            ValuationSetDescriptor::Cofinite(excluded) => {
                for v in excluded {
                    if v.field() != field {
                        return Err(Error::FieldMismatch(field.to_string(), v.field().to_string()));
                    }
                }
                Ok(())
            }
            ValuationSetDescriptor::ResidueClasses { modulus, classes } => {
                if *modulus < 3 || classes.is_empty() {
                    return Err(Error::InvalidModulus(format!("n = {modulus}, {} classes", classes.len())));
                }
                for c in classes {
                    if *c >= *modulus || c.gcd(modulus) != 1 {
                        return Err(Error::InvalidModulus(format!("{c} is not a reduced residue mod {modulus}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, v: &Place) -> bool {
        match self {
            ValuationSetDescriptor::All => true,
            ValuationSetDescriptor::Cofinite(excluded) => !excluded.contains(v),
            ValuationSetDescriptor::ResidueClasses { modulus, classes } => classes.contains(&(v.p() % modulus)),
        }
    }
}

fn check_alphas(alphas: &[FieldElement]) -> Result<QuadraticField> {
    let field = alphas.first().map(|a| a.field()).ok_or_else(|| Error::InvalidInput("no alpha values".into()))?;
    for a in alphas {
        if a.field() != field {
            return Err(Error::FieldMismatch(field.to_string(), a.field().to_string()));
        }
        if a.is_zero() {
            return Err(Error::ZeroAlpha);
        }
        if !a.is_algebraic_integer() {
            return Err(Error::InvalidInput(format!("{a} is not an algebraic integer")));
        }
    }
    Ok(field)
}

/// `c_1` over the Archimedean places.
pub fn constant_c1(alphas: &[FieldElement]) -> Result<f64> {
    let field = check_alphas(alphas)?;
    let m = alphas.len() as i32;
    let abs: Vec<Vec<(String, f64)>> = alphas.iter().map(|a| arch_abs_normalized(field, a)).collect();
    let mut c1 = 1.0;
    for (k, (_, _)) in abs[0].iter().enumerate() {
        let big = abs.iter().map(|row| row[k].1).fold(1.0f64, f64::max);
        let prod: f64 = abs.iter().map(|row| row[k].1 + big).product();
        c1 *= big.powi(m) * prod;
    }
    Ok(c1)
}

/// `ln prod_(v in V) max_j ||alpha_j||_v`; only places where every `alpha_j`
/// has positive valuation contribute.
fn log_nonarch_factor(alphas: &[FieldElement], set: &ValuationSetDescriptor) -> Result<f64> {
    let field = alphas[0].field();
    let mut total = 0.0;
    for p in prime_divisors(alphas[0].norm().numer()) {
        for v in places_above(field, p)? {
            if !set.contains(&v) {
                continue;
            }
            let mut w_min: Option<Rational> = None;
            for a in alphas {
                let w = valuation(&v, a)?;
                w_min = Some(match w_min {
                    Some(cur) if cur <= w => cur,
                    _ => w,
                });
            }
            let w = w_min.expect("nonempty");
            let scale = v.kappa_v() as f64 / field.kappa() as f64;
            total -= crate::numfield::rational_to_f64(&w) * scale * (p as f64).ln();
        }
    }
    Ok(total)
}

/// `(c_1, c_2)` for the given `alpha` and valuation set.
pub fn constants_c1_c2(alphas: &[FieldElement], set: &ValuationSetDescriptor) -> Result<(f64, f64)> {
    let field = check_alphas(alphas)?;
    set.validate(field)?;
    let c1 = constant_c1(alphas)?;
    Ok((c1, c1 * log_nonarch_factor(alphas, set)?.exp()))
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LimsupReport {
    pub c2: f64,
    /// `log` of the sequence for `l = 1..=L_max`.
    pub values: Vec<f64>,
    /// First `l` after which the values decrease strictly up to `L_max`.
    pub decreasing_from: Option<usize>,
}

/// `ln(c_2^l (ml+m)^kappa (ml+m)! prod_(v in V) ||(ml)! l!||_v)` for
/// `l = 1..=l_max`, the product rewritten by the product formula.
pub fn limsup_sequence(alphas: &[FieldElement], set: &ValuationSetDescriptor, l_max: usize) -> Result<LimsupReport> {
    let field = check_alphas(alphas)?;
    set.validate(field)?;
    let excluded = match set {
        ValuationSetDescriptor::All => Vec::new(),
        ValuationSetDescriptor::Cofinite(ex) => ex.clone(),
        ValuationSetDescriptor::ResidueClasses { .. } => return Err(Error::UnsupportedDescriptor),
    };
    let (_, c2) = constants_c1_c2(alphas, set)?;
    let m = alphas.len() as u64;
    let kappa = field.kappa() as f64;
    let mut values = Vec::with_capacity(l_max);
    for l in 1..=l_max as u64 {
        let top = m * l + m;
        let mut val = l as f64 * c2.ln() + kappa * (top as f64).ln() + ln_factorial(top)
            - ln_factorial(m * l)
            - ln_factorial(l);
        for v in &excluded {
            let p = v.p();
            let w = factorial_valuation(p, m * l) + factorial_valuation(p, l);
            val += v.kappa_v() as f64 / kappa * w as f64 * (p as f64).ln();
        }
        values.push(val);
    }
    let mut decreasing_from = None;
    for start in 1..=values.len() {
        if values[start - 1..].windows(2).all(|w| w[1] < w[0]) {
            decreasing_from = Some(start);
            break;
        }
    }
    if values.len() < 2 {
        decreasing_from = None;
    }
    Ok(LimsupReport { c2, values, decreasing_from })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: u32,
    pub kappa: u32,
    pub c1: f64,
    pub s: f64,
    #[serde(rename = "logH")]
    pub log_h: f64,
    pub ell: u64,
    #[serde(rename = "N_ell")]
    pub n_ell: f64,
    #[serde(rename = "N_ell_plus_1")]
    pub n_ell_plus_1: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub exponent: f64,
    /// `[log(ell+1), m(ell+2)]` lies inside the open interval.
    pub containment: bool,
}

pub fn parameter_s(m: u32, kappa: u32, c1: f64) -> f64 {
    let m = m as f64;
    ((kappa as f64).exp() + 1.0).max(c1 + 1.0).max((m + 3.0).powi(2) + 1.0)
}

/// `N(l)` with the bracket multiplied out by `l log log l`.
pub fn n_of_l(m: u32, kappa: u32, c1: f64, log_h: f64, l: f64) -> f64 {
    let (m, kappa) = (m as f64, kappa as f64);
    let ll = l.ln().ln();
    log_h + 2.0 * (m + 1.0) * l * ll + 2.0 * m * ll + l * c1.ln() + l + (kappa - 0.5) * l.ln()
        + kappa * m.ln()
        + kappa * (m + 1.0).ln()
        + kappa / l
        - l * l.ln()
}

const MAX_ELL: u64 = 1 << 53;

pub fn theorem2_bounds(m: u32, kappa: u32, c1: f64, log_h: f64) -> Result<BoundReport> {
    if m == 0 || kappa == 0 || !c1.is_finite() || c1 <= 0.0 {
        return Err(Error::InvalidInput("m, kappa and c1 must be positive".into()));
    }
    let s = parameter_s(m, kappa, c1);
    let min = s * s.exp();
    if log_h.is_nan() || log_h < min {
        return Err(Error::HeightTooSmall { log_h, min });
    }
    let n = |l: u64| n_of_l(m, kappa, c1, log_h, l as f64);
    if n(2) < 0.0 {
        return Err(Error::InvalidInput("N(2) < 0".into()));
    }
    let (mut lo, mut hi) = (2u64, 4u64);
    while n(hi) >= 0.0 {
        lo = hi;
        hi = hi.checked_mul(2).filter(|&h| h <= MAX_ELL).ok_or(Error::ScaleTooLarge)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if n(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ell = lo;
    // log_h = log H, so these are log log H and log log log H
    let llh = log_h.ln();
    let lllh = llh.ln();
    let interval_lo = (log_h / llh).ln();
    let interval_hi = 17.0 * m as f64 * log_h / llh;
    let exponent = (m as f64 + 1.0) + 114.0 * (m as f64).powi(2) * lllh / llh;
    let left = ((ell + 1) as f64).ln();
    let right = m as f64 * (ell + 2) as f64;
    Ok(BoundReport {
        m,
        kappa,
        c1,
        s,
        log_h,
        ell,
        n_ell: n(ell),
        n_ell_plus_1: n(ell + 1),
        interval_lo,
        interval_hi,
        exponent,
        containment: interval_lo < left && right < interval_hi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZInverse {
    pub z: f64,
    /// `z_0 = y, z_n = y / log z_(n-1)`.
    pub iterates: Vec<f64>,
}

const Z_MAX_ITERATES: usize = 200;

/// Inverse of `z log z` on `z >= e`.
pub fn z_inverse(y: f64) -> Result<ZInverse> {
    let e = std::f64::consts::E;
    if !y.is_finite() || y < e {
        return Err(Error::DomainError(format!("z(y) needs y >= e, got {y}")));
    }
    if y == e {
        return Ok(ZInverse { z: e, iterates: vec![e] });
    }
    let mut iterates = vec![y];
    let mut z = y;
    for _ in 0..Z_MAX_ITERATES {
        let next = y / z.ln();
        iterates.push(next);
        let done = (next - z).abs() < 1e-12 * next;
        z = next;
        if done {
            break;
        }
    }
    // the contraction factor 1/log z is close to 1 near y = e; Newton finishes
    for _ in 0..100 {
        let step = (z * z.ln() - y) / (z.ln() + 1.0);
        z -= step;
        if step.abs() < 1e-15 * z {
            break;
        }
    }
    Ok(ZInverse { z, iterates })
}

/// `z_1 < z_3 < ... < z < ... < z_2 < z_0`, tolerating rounding once the
/// iterates have converged.
pub fn iterates_alternate(res: &ZInverse) -> bool {
    let tol = 1e-12 * res.z;
    res.iterates.iter().enumerate().all(|(n, &zn)| {
        if (zn - res.z).abs() <= tol {
            return true;
        }
        if n % 2 == 0 {
            zn > res.z
        } else {
            zn < res.z
        }
    }) && res.iterates.windows(3).all(|w| {
        // same-parity iterates move toward z
        (w[2] - res.z).abs() <= (w[0] - res.z).abs() + tol
    })
}

/// `(1 + log r / r) y / log y`, an upper bound for `z(y)` when `y >= r e^r`, `r >= e`.
pub fn z_upper_bound(y: f64, r: f64) -> Result<f64> {
    if r < std::f64::consts::E || y < r * r.exp() {
        return Err(Error::DomainError(format!("need r >= e and y >= r e^r (r = {r}, y = {y})")));
    }
    Ok((1.0 + r.ln() / r) * y / y.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MertensReport {
    /// `sum_(p <= x) log p / (p - 1)`.
    pub sum: f64,
    /// `sum_(p <= x) log p / p`.
    pub rosser_sum: f64,
    pub rosser_ok: bool,
}

pub fn mertens_sum(x: f64) -> Result<MertensReport> {
    if !x.is_finite() || x < 2.0 {
        return Err(Error::DomainError(format!("x must be at least 2, got {x}")));
    }
    let mut sum = 0.0;
    let mut rosser_sum = 0.0;
    for p in primes_up_to(x.floor() as u64) {
        let lp = (p as f64).ln();
        sum += lp / (p as f64 - 1.0);
        rosser_sum += lp / p as f64;
    }
    Ok(MertensReport { sum, rosser_sum, rosser_ok: rosser_sum < x.ln() })
}

/// Checks `sum_(p <= x) log p / p < log x` for every integer `2 <= x <= x_max`
/// in one sieve pass; returns the first failing `x`.
pub fn rosser_first_failure(x_max: u64) -> Option<u64> {
    let primes = primes_up_to(x_max);
    let mut idx = 0;
    let mut acc = 0.0;
    for x in 2..=x_max {
        while idx < primes.len() && primes[idx] <= x {
            acc += (primes[idx] as f64).ln() / primes[idx] as f64;
            idx += 1;
        }
        if acc >= (x as f64).ln() {
            return Some(x);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueReport {
    pub ok: bool,
    pub slope: f64,
    /// `m - r(m+1)/phi(n)` as an exact fraction.
    pub slope_exact: String,
}

pub fn residue_condition(n: u64, r: u64, m: u32) -> Result<ResidueReport> {
    if n < 3 {
        return Err(Error::InvalidModulus(format!("modulus {n} < 3")));
    }
    let phi = euler_phi(n);
    if r == 0 || r > phi {
        return Err(Error::InvalidModulus(format!("class count {r} outside 1..={phi}")));
    }
    let m_big = BigInt::from(m);
    let slope = Rational::from_integer(m_big.clone())
        - Rational::new(BigInt::from(r) * (&m_big + 1), BigInt::from(phi));
    let ok = BigInt::from(r) * (&m_big + 1) > &m_big * BigInt::from(phi);
    Ok(ResidueReport { ok, slope: crate::numfield::rational_to_f64(&slope), slope_exact: format_rational(&slope) })
}

/// `x_n = sum_i a_i alpha_i^n` with `b_i = d a_i` integral.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceForm {
    pub field: QuadraticField,
    pub alphas: Vec<FieldElement>,
    pub b: Vec<FieldElement>,
    pub d: BigInt,
}

fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    // n = f^2 * core with core squarefree (sign kept in core)
    let mut f = BigInt::one();
    let mut core = if n.is_negative() { BigInt::from(-1) } else { BigInt::one() };
    let mut rest = n.abs();
    for p in prime_divisors(&rest) {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        f *= num_traits::pow(pb.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            core *= pb;
        }
    }
    (f, core)
}

/// `x_n = c_1 x_(n-1) + ... + c_k x_(n-k)` for `k <= 2`.
pub fn recurrence_to_linear_form(c: &[i64], init: &[i64]) -> Result<RecurrenceForm> {
    if c.len() > 2 {
        return Err(Error::OrderUnsupported(c.len()));
    }
    if c.is_empty() || init.len() != c.len() {
        return Err(Error::InvalidInput("need k coefficients and k initial values".into()));
    }
    if *c.last().unwrap() == 0 {
        return Err(Error::InvalidInput("c_k must be nonzero".into()));
    }
    let q = QuadraticField::RATIONALS;
    let (field, alphas, a) = if c.len() == 1 {
        (q, vec![FieldElement::from_int(q, c[0])], vec![FieldElement::from_int(q, init[0])])
    } else {
        let disc = BigInt::from(c[0]) * c[0] + BigInt::from(4) * c[1];
        if disc.is_zero() {
            return Err(Error::RepeatedRoots);
        }
        let (f, core) = squarefree_decompose(&disc);
        let field = if core.is_one() {
            q
        } else {
            let d = i64::try_from(&core).map_err(|_| Error::InvalidInput("discriminant too large".into()))?;
            QuadraticField::new(d)?
        };
        let half = Rational::new(1.into(), 2.into());
        let c0 = Rational::from_integer(c[0].into());
        let root = |sign: i64| -> Result<FieldElement> {
            let fr = Rational::from_integer(&f * sign);
            if field.is_rational() {
                Ok(FieldElement::from_rational(field, (c0.clone() + fr) * &half))
            } else {
                FieldElement::new(field, c0.clone() * &half, fr * &half)
            }
        };
        let (a1, a2) = (root(1)?, root(-1)?);
        let x0 = FieldElement::from_int(field, init[0]);
        let x1 = FieldElement::from_int(field, init[1]);
        let coef1 = (&x1 - &(&x0 * &a2)).checked_div(&(&a1 - &a2))?;
        let coef2 = &x0 - &coef1;
        (field, vec![a1, a2], vec![coef1, coef2])
    };
    if alphas.iter().any(|r| !r.is_algebraic_integer()) {
        return Err(Error::NonIntegralRoots);
    }
    let d = a.iter().fold(BigInt::one(), |acc, ai| acc.lcm(&denominator(ai)));
    let dr = Rational::from_integer(d.clone());
    let b = a.iter().map(|ai| ai.scale(&dr)).collect();
    Ok(RecurrenceForm { field, alphas, b, d })
}

/// `lambda` for `B * sum n! x_n - A` scaled by `d`: `lambda_0 = -d A`, `lambda_i = B b_i`.
pub fn recurrence_lambdas(form: &RecurrenceForm, a: &Rational, b: &Rational) -> Result<Vec<FieldElement>> {
    // clear denominators of A/B so every lambda is an algebraic integer
    let scale = Rational::from_integer(a.denom().lcm(b.denom()));
    let (a, b) = (a * &scale, b * &scale);
    let mut lambdas = vec![FieldElement::from_rational(form.field, -(a * Rational::from_integer(form.d.clone())))];
    lambdas.extend(form.b.iter().map(|bi| bi.scale(&b)));
    if lambdas.iter().all(|l| l.is_zero()) {
        return Err(Error::AllLambdaZero);
    }
    Ok(lambdas)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertStatus {
    Nonzero,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub field: QuadraticField,
    pub lambdas: Vec<FieldElement>,
    pub alphas: Vec<FieldElement>,
    pub place: Place,
    pub precision: u32,
    /// Valuation of the truncated form, or `precision` when it vanishes mod `p^N`.
    pub partial_valuation: Rational,
    pub tail_valuation_bound: Rational,
    pub status: CertStatus,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    field_d: Option<i64>,
    lambdas: Vec<String>,
    alphas: Vec<String>,
    prime: u64,
    place: PlaceJson,
    precision: u32,
    partial_valuation: String,
    tail_valuation_bound: String,
    status: CertStatus,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CertificateJson {
            field_d: self.field.d(),
            lambdas: self.lambdas.iter().map(|x| x.to_string()).collect(),
            alphas: self.alphas.iter().map(|x| x.to_string()).collect(),
            prime: self.place.p(),
            place: self.place.to_json(),
            precision: self.precision,
            partial_valuation: format_rational(&self.partial_valuation),
            tail_valuation_bound: format_rational(&self.tail_valuation_bound),
            status: self.status,
        })
        .expect("serialisable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let j: CertificateJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("certificate: {e}")))?;
        let field = QuadraticField::from_option(j.field_d)?;
        let parse_all = |v: &[String]| v.iter().map(|s| FieldElement::parse(field, s)).collect::<Result<Vec<_>>>();
        let place = Place::from_json(field, &j.place)?;
        if place.p() != j.prime {
            return Err(Error::Parse("prime does not match place".into()));
        }
        Ok(Certificate {
            field,
            lambdas: parse_all(&j.lambdas)?,
            alphas: parse_all(&j.alphas)?,
            place,
            precision: j.precision,
            partial_valuation: parse_rational(&j.partial_valuation)?,
            tail_valuation_bound: parse_rational(&j.tail_valuation_bound)?,
            status: j.status,
        })
    }
}

/// Search exhausted without a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct UndeterminedReport {
    pub field: QuadraticField,
    pub lambdas: Vec<FieldElement>,
    pub alphas: Vec<FieldElement>,
    pub p_min: u64,
    pub p_max: u64,
    pub max_precision: u32,
    pub places_tried: usize,
}

impl UndeterminedReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field_d": self.field.d(),
            "lambdas": self.lambdas.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "alphas": self.alphas.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "p_min": self.p_min,
            "p_max": self.p_max,
            "max_precision": self.max_precision,
            "places_tried": self.places_tried,
            "status": CertStatus::Undetermined,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyOutcome {
    Nonzero(Certificate),
    Undetermined(UndeterminedReport),
}

impl CertifyOutcome {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CertifyOutcome::Nonzero(c) => c.to_json(),
            CertifyOutcome::Undetermined(u) => u.to_json(),
        }
    }
}

/// `Lambda_v = lambda_0 + sum lambda_j F_v(alpha_j)` modulo `p^N`, with the
/// smallest tail bound among the series.
pub fn linear_form_value(
    v: &Place,
    lambdas: &[FieldElement],
    alphas: &[FieldElement],
    precision: u32,
) -> Result<(CompletionElement, Rational)> {
    let mut acc = CompletionElement::embed(v, &lambdas[0], precision)?;
    let mut tail = Rational::from_integer(precision.into());
    for (lam, alpha) in lambdas[1..].iter().zip(alphas) {
        let f = euler_eval_certified(v, alpha, precision)?;
        if f.tail_valuation_bound < tail {
            tail = f.tail_valuation_bound.clone();
        }
        acc = acc.add(&f.value.embed_like(lam)?.mul(&f.value));
    }
    Ok((acc, tail))
}

fn evaluate_at(
    v: &Place,
    lambdas: &[FieldElement],
    alphas: &[FieldElement],
    precision: u32,
) -> Result<(Rational, Rational, CertStatus)> {
    let (value, tail) = linear_form_value(v, lambdas, alphas, precision)?;
    let n = Rational::from_integer(precision.into());
    let partial = value.valuation().unwrap_or_else(|| n.clone());
    let status = if partial < tail && partial < n { CertStatus::Nonzero } else { CertStatus::Undetermined };
    Ok((partial, tail, status))
}

fn check_certify_input(lambdas: &[FieldElement], alphas: &[FieldElement]) -> Result<QuadraticField> {
    let field = check_alphas(alphas)?;
    for (i, a) in alphas.iter().enumerate() {
        if alphas[..i].contains(a) {
            return Err(Error::RepeatedAlpha);
        }
    }
    if lambdas.len() != alphas.len() + 1 {
        return Err(Error::InvalidInput(format!("expected {} lambda values, got {}", alphas.len() + 1, lambdas.len())));
    }
    for l in lambdas {
        if l.field() != field {
            return Err(Error::FieldMismatch(field.to_string(), l.field().to_string()));
        }
        if !l.is_algebraic_integer() {
            return Err(Error::InvalidInput(format!("lambda {l} is not an algebraic integer")));
        }
    }
    if lambdas.iter().all(|l| l.is_zero()) {
        return Err(Error::AllLambdaZero);
    }
    Ok(field)
}

/// Precisions `4, 8, 16, ... <= n_max` (just `n_max` when it is below 4).
fn precision_ladder(n_max: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut n = 4u32;
    while n <= n_max {
        out.push(n);
        n = n.saturating_mul(2);
    }
    if out.is_empty() && n_max > 0 {
        out.push(n_max);
    }
    out
}

/// Scans primes in `[p_min, p_max]` ascending, places in splitting order, and
/// precisions `4, 8, ...`; returns the first nonzero certificate.
pub fn certify_nonvanishing(
    lambdas: &[FieldElement],
    alphas: &[FieldElement],
    p_min: u64,
    p_max: u64,
    n_max: u32,
) -> Result<CertifyOutcome> {
    let field = check_certify_input(lambdas, alphas)?;
    if n_max == 0 {
        return Err(Error::InvalidInput("maximum precision must be positive".into()));
    }
    let ladder = precision_ladder(n_max);
    let mut places_tried = 0;
    for p in p_min.max(2)..=p_max {
        if !is_prime(p) {
            continue;
        }
        for v in places_above(field, p)? {
            places_tried += 1;
            for &n in &ladder {
                let (partial, tail, status) = evaluate_at(&v, lambdas, alphas, n)?;
                if status == CertStatus::Nonzero {
                    return Ok(CertifyOutcome::Nonzero(Certificate {
                        field,
                        lambdas: lambdas.to_vec(),
                        alphas: alphas.to_vec(),
                        place: v,
                        precision: n,
                        partial_valuation: partial,
                        tail_valuation_bound: tail,
                        status,
                    }));
                }
            }
        }
    }
    Ok(CertifyOutcome::Undetermined(UndeterminedReport {
        field,
        lambdas: lambdas.to_vec(),
        alphas: alphas.to_vec(),
        p_min,
        p_max,
        max_precision: *ladder.last().unwrap(),
        places_tried,
    }))
}

/// Independent recomputation at precision `N + 4`: the status holds only if
/// the valuation found there agrees with the certificate.
pub fn verify_certificate(cert: &Certificate) -> Result<CertStatus> {
    check_certify_input(&cert.lambdas, &cert.alphas)?;
    let (partial, tail, status) = evaluate_at(&cert.place, &cert.lambdas, &cert.alphas, cert.precision + 4)?;
    if cert.status == CertStatus::Nonzero {
        let claimed_ok = cert.partial_valuation < cert.tail_valuation_bound
            && cert.partial_valuation < Rational::from_integer(cert.precision.into());
        if !claimed_ok || status != CertStatus::Nonzero || partial != cert.partial_valuation || tail < partial {
            return Ok(CertStatus::Undetermined);
        }
        return Ok(CertStatus::Nonzero);
    }
    Ok(CertStatus::Undetermined)
}

/// Checks `b_(l,mu,0) Lambda_v = W + sum lambda_j s_(l,mu,j)` modulo `p^N`
/// with `mu` the least index giving `W != 0`. Returns `(mu, W)`.
pub fn w_identity(
    v: &Place,
    l: u32,
    lambdas: &[FieldElement],
    alphas: &[FieldElement],
    precision: u32,
) -> Result<(usize, FieldElement, bool)> {
    check_certify_input(lambdas, alphas)?;
    let (mu, w) = select_mu(l, lambdas, alphas)?;
    let sys = pade_construct(alphas.len(), l, mu, alphas)?;
    let b0 = sys.values_at_one().remove(0);
    let (lambda_v, _) = linear_form_value(v, lambdas, alphas, precision)?;
    let lhs = lambda_v.embed_like(&b0)?.mul(&lambda_v);
    let mut rhs = lambda_v.embed_like(&w)?;
    for (j, lam) in lambdas.iter().enumerate().skip(1) {
        let s = sys.remainder_value(v, j, precision)?;
        rhs = rhs.add(&s.embed_like(lam)?.mul(&s));
    }
    Ok((mu, w, lhs.sub(&rhs).is_zero()))
}

/// Maps each prime to the list of places above it in scan order.
pub fn scan_plan(field: QuadraticField, p_min: u64, p_max: u64) -> Result<BTreeMap<u64, Vec<Place>>> {
    let mut out = BTreeMap::new();
    for p in p_min.max(2)..=p_max {
        if is_prime(p) {
            out.insert(p, places_above(field, p)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::places::Splitting;

    fn q() -> QuadraticField {
        QuadraticField::RATIONALS
    }

    fn qi(v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&x| FieldElement::from_int(q(), x)).collect()
    }

    #[test]
    fn c1_c2_examples() {
        let (c1, c2) = constants_c1_c2(&qi(&[1]), &ValuationSetDescriptor::All).unwrap();
        assert!((c1 - 2.0).abs() < 1e-12 && (c2 - 2.0).abs() < 1e-12);
        let (_, c2) = constants_c1_c2(&qi(&[1, -1]), &ValuationSetDescriptor::All).unwrap();
        assert!((c2 - 4.0).abs() < 1e-12);
        let form = recurrence_to_linear_form(&[1, 1], &[0, 1]).unwrap();
        let (c1, c2) = constants_c1_c2(&form.alphas, &ValuationSetDescriptor::All).unwrap();
        assert!((c2 - 71.78).abs() < 0.01, "{c2}");
        assert_eq!(c1, c2);
        assert_eq!(constants_c1_c2(&qi(&[0]), &ValuationSetDescriptor::All).unwrap_err(), Error::ZeroAlpha);
    }

    #[test]
    fn c2_sees_common_prime_factors() {
        // ||2||_2 = 1/2 and ||4||_2 = 1/4, max = 1/2
        let alphas = qi(&[2, 4]);
        let (c1, c2) = constants_c1_c2(&alphas, &ValuationSetDescriptor::All).unwrap();
        assert!((c2 - c1 / 2.0).abs() < 1e-9);
        let v2 = places_above(q(), 2).unwrap()[0];
        let (c1b, c2b) = constants_c1_c2(&alphas, &ValuationSetDescriptor::Cofinite(vec![v2])).unwrap();
        assert_eq!(c1, c1b);
        assert!((c2b - c1).abs() < 1e-9);
    }

    #[test]
    fn limsup_closed_form() {
        let rep = limsup_sequence(&qi(&[1]), &ValuationSetDescriptor::All, 20).unwrap();
        for (i, v) in rep.values.iter().enumerate() {
            let l = (i + 1) as f64;
            let expect = l * 2f64.ln() + 2.0 * (l + 1.0).ln() - ln_factorial(i as u64 + 1);
            assert!((v - expect).abs() < 1e-9);
        }
        assert!(rep.decreasing_from.unwrap() <= 8);
        let v2 = places_above(q(), 2).unwrap()[0];
        let ex = limsup_sequence(&qi(&[1]), &ValuationSetDescriptor::Cofinite(vec![v2]), 60).unwrap();
        assert!(ex.values[59] < ex.values[58]);
        assert!(ex.values[4] > rep.values[4]);
        let rc = ValuationSetDescriptor::ResidueClasses { modulus: 4, classes: vec![1] };
        assert_eq!(limsup_sequence(&qi(&[1]), &rc, 5).unwrap_err(), Error::UnsupportedDescriptor);
    }

    #[test]
    fn bounds_example() {
        let log_h = 17.0 * 17f64.exp();
        let rep = theorem2_bounds(1, 1, 2.0, log_h).unwrap();
        assert_eq!(rep.s, 17.0);
        assert!((rep.interval_lo - 16.85).abs() < 0.01, "{}", rep.interval_lo);
        assert!((rep.interval_hi / 3.523e8 - 1.0).abs() < 1e-3, "{}", rep.interval_hi);
        assert!((rep.exponent - 19.17).abs() < 0.01, "{}", rep.exponent);
        assert!(rep.n_ell >= 0.0 && rep.n_ell_plus_1 < 0.0);
        assert!(rep.containment);
        assert!(matches!(theorem2_bounds(1, 1, 2.0, 1000.0), Err(Error::HeightTooSmall { .. })));
    }

    #[test]
    fn z_examples() {
        let e = std::f64::consts::E;
        assert_eq!(z_inverse(e).unwrap().z, e);
        let r = z_inverse(2.0 * e * e).unwrap();
        assert!((r.z - e * e).abs() < 1e-9);
        assert!(iterates_alternate(&r));
        let y = 17.0 * 17f64.exp();
        assert!(z_inverse(y).unwrap().z <= z_upper_bound(y, 17.0).unwrap());
        assert!(matches!(z_inverse(2.0), Err(Error::DomainError(_))));
        let near = z_inverse(e + 1e-6).unwrap();
        assert!((near.z * near.z.ln() - (e + 1e-6)).abs() < 1e-9);
    }

    #[test]
    fn mertens_examples() {
        let r = mertens_sum(10.0).unwrap();
        assert!((r.rosser_sum - 1.3127).abs() < 1e-4);
        assert!(r.rosser_ok);
        let r = mertens_sum(2.0).unwrap();
        assert!((r.sum - 2f64.ln()).abs() < 1e-12);
        assert_eq!(rosser_first_failure(10_000), None);
    }

    #[test]
    fn residue_examples() {
        let r = residue_condition(4, 2, 1).unwrap();
        assert!(r.ok);
        assert_eq!(r.slope, -1.0);
        assert!(!residue_condition(3, 1, 1).unwrap().ok);
        assert_eq!(residue_condition(3, 1, 1).unwrap().slope_exact, "0");
        assert!(residue_condition(2, 1, 1).is_err());
        assert!(residue_condition(5, 5, 1).is_err());
    }

    #[test]
    fn recurrence_examples() {
        let fib = recurrence_to_linear_form(&[1, 1], &[0, 1]).unwrap();
        let k = QuadraticField::new(5).unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(fib.field, k);
        assert_eq!(fib.alphas[0], FieldElement::new(k, half.clone(), half.clone()).unwrap());
        assert_eq!(fib.b, vec![FieldElement::sqrt_d(k), -FieldElement::sqrt_d(k)]);
        assert_eq!(fib.d, BigInt::from(5));
        let pow2 = recurrence_to_linear_form(&[2], &[1]).unwrap();
        assert_eq!((pow2.alphas, pow2.b, pow2.d), (qi(&[2]), qi(&[1]), BigInt::one()));
        assert_eq!(recurrence_to_linear_form(&[2, -1], &[0, 1]).unwrap_err(), Error::RepeatedRoots);
        assert_eq!(recurrence_to_linear_form(&[1, 1, 1], &[0, 0, 1]).unwrap_err(), Error::OrderUnsupported(3));
        // x_n = 3 x_(n-1) - 2 x_(n-2): roots 2, 1
        let r = recurrence_to_linear_form(&[3, -2], &[0, 1]).unwrap();
        assert!(r.field.is_rational());
        assert_eq!(r.alphas, qi(&[2, 1]));
        assert_eq!(r.b, qi(&[1, -1]));
    }

    #[test]
    fn recurrence_reproduces_sequence() {
        let form = recurrence_to_linear_form(&[1, 1], &[0, 1]).unwrap();
        let d = Rational::from_integer(form.d.clone());
        let (mut a, mut b) = (0i64, 1i64);
        for n in 0..20u32 {
            let x = form
                .alphas
                .iter()
                .zip(&form.b)
                .fold(FieldElement::zero(form.field), |acc, (al, bi)| &acc + &(bi * &al.pow(n)));
            assert_eq!(x, FieldElement::from_rational(form.field, d.clone() * Rational::from_integer(a.into())));
            (a, b) = (b, a + b);
        }
    }

    #[test]
    fn certificate_examples() {
        let out = certify_nonvanishing(&qi(&[0, -1]), &qi(&[1]), 2, 2, 8).unwrap();
        let CertifyOutcome::Nonzero(c) = out else { panic!("expected certificate") };
        assert_eq!(c.partial_valuation, Rational::one());
        assert!(c.tail_valuation_bound >= Rational::from_integer(3.into()));
        assert_eq!(verify_certificate(&c).unwrap(), CertStatus::Nonzero);

        let CertifyOutcome::Nonzero(c) = certify_nonvanishing(&qi(&[1, -1]), &qi(&[1]), 2, 2, 8).unwrap() else {
            panic!()
        };
        assert_eq!(c.partial_valuation, Rational::zero());
        assert_eq!(certify_nonvanishing(&qi(&[0, 0]), &qi(&[1]), 2, 5, 8).unwrap_err(), Error::AllLambdaZero);
    }

    #[test]
    fn fibonacci_certificate() {
        let form = recurrence_to_linear_form(&[1, 1], &[0, 1]).unwrap();
        let lambdas = recurrence_lambdas(&form, &Rational::one(), &Rational::one()).unwrap();
        let CertifyOutcome::Nonzero(c) = certify_nonvanishing(&lambdas, &form.alphas, 2, 50, 32).unwrap() else {
            panic!()
        };
        assert_eq!(c.place.p(), 2);
        assert_eq!(c.place.splitting(), Splitting::Inert);
        assert_eq!(c.partial_valuation, Rational::one());
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(verify_certificate(&back).unwrap(), CertStatus::Nonzero);
    }

    #[test]
    fn undetermined_when_range_is_empty() {
        let out = certify_nonvanishing(&qi(&[1, -1]), &qi(&[1]), 24, 28, 8).unwrap();
        assert!(matches!(out, CertifyOutcome::Undetermined(_)));
        assert_eq!(out.to_json()["status"], "undetermined");
    }

    #[test]
    fn w_identity_holds() {
        let v = places_above(q(), 3).unwrap()[0];
        for l in 1..=3 {
            let (_, w, ok) = w_identity(&v, l, &qi(&[2, -1, 1]), &qi(&[1, -1]), 12).unwrap();
            assert!(ok && !w.is_zero());
        }
    }
}

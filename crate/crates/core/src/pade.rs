//! Explicit Padé systems for Euler's series and for generalised factorial
//! series `G(t) = sum [P]_n t^n` with `P` linear.
//!
//! For `l_1 = ... = l_m = l` and `P(x) = 1 + x` the polynomials are cleared
//! by `(ml + mu)!` so that every coefficient is an algebraic integer when the
//! `alpha_j` are:
//!
//! ```text
//! B_0(t) = sum_i sigma_i (ml+mu)!/(i+mu)! t^(ml-i)
//! B_j(t) = (ml+mu)! sum_{N < ml+mu} t^N sum_h sigma_(ml-h) (N-h)!/(ml-h+mu)! alpha_j^(N-h)
//! B_0(t) F(alpha_j t) - B_j(t) = S_j(t),   ord S_j >= (m+1) l + mu
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{format_rational, FieldElement, QuadraticField, Rational};
use crate::padics::{euler_eval_certified, CompletionElement};
use crate::places::Place;

/// Dense polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: QuadraticField,
    coeffs: Vec<FieldElement>,
}

#[derive(Serialize)]
struct PolyJson {
    coeffs: Vec<Vec<String>>,
}

impl Poly {
    pub fn new(field: QuadraticField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: QuadraticField) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    /// `c * t^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![FieldElement::zero(field); k];
        coeffs.push(c);
        Poly::new(field, coeffs)
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FieldElement::zero(self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(self.field, (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        self.mul_truncated(other, self.coeffs.len() + other.coeffs.len() - 1)
    }

    /// Product keeping only the exponents `< len`.
    pub fn mul_truncated(&self, other: &Poly, len: usize) -> Poly {
        let mut out = vec![FieldElement::zero(self.field); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.field, out)
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, t: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::zero(self.field), |acc, c| &(&acc * t) + c)
    }

    /// `{"coeffs": [["x", "y"], ...]}`, ascending powers; one string per
    /// coefficient over `Q`.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if self.field.is_rational() {
                    vec![format_rational(c.x())]
                } else {
                    vec![format_rational(c.x()), format_rational(c.y())]
                }
            })
            .collect();
        serde_json::to_value(PolyJson { coeffs }).expect("serialisable")
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn int(field: QuadraticField, n: impl Into<BigInt>) -> FieldElement {
    FieldElement::from_int(field, n)
}

fn common_field(values: &[FieldElement]) -> Result<QuadraticField> {
    let field = values
        .first()
        .map(|v| v.field())
        .ok_or_else(|| Error::InvalidInput("empty parameter vector".into()))?;
    if let Some(bad) = values.iter().find(|v| v.field() != field) {
        return Err(Error::FieldMismatch(field.to_string(), bad.field().to_string()));
    }
    Ok(field)
}

/// Coefficients of `prod_j (beta_j - w)^(l_j) = sum_i sigma_i w^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaVector {
    pub l_vec: Vec<u32>,
    pub beta: Vec<FieldElement>,
    pub coeffs: Vec<FieldElement>,
}

impl SigmaVector {
    /// `L = sum l_j`.
    pub fn total(&self) -> usize {
        self.l_vec.iter().map(|&l| l as usize).sum()
    }
}

pub fn sigma_coeffs(l_vec: &[u32], beta: &[FieldElement]) -> Result<SigmaVector> {
    if l_vec.len() != beta.len() {
        return Err(Error::InvalidInput("l_vec and beta differ in length".into()));
    }
    if l_vec.iter().any(|&l| l == 0) {
        return Err(Error::InvalidInput("every l_j must be at least 1".into()));
    }
    let field = common_field(beta)?;
    let mut prod = Poly::new(field, vec![FieldElement::one(field)]);
    for (b, &l) in beta.iter().zip(l_vec) {
        let factor = Poly::new(field, vec![b.clone(), int(field, -1)]);
        for _ in 0..l {
            prod = prod.mul(&factor);
        }
    }
    let total: usize = l_vec.iter().map(|&l| l as usize).sum();
    let coeffs = (0..=total).map(|i| prod.coeff(i)).collect();
    Ok(SigmaVector { l_vec: l_vec.to_vec(), beta: beta.to_vec(), coeffs })
}

/// `sum_i sigma_i i^k beta_j^i` for the 1-based column `j`; vanishes for `k < l_j`.
pub fn sigma_annihilation_check(sv: &SigmaVector, j: usize, k: u32) -> Result<FieldElement> {
    if j == 0 || j > sv.beta.len() {
        return Err(Error::InvalidInput(format!("column index {j} out of range")));
    }
    let beta = &sv.beta[j - 1];
    let field = beta.field();
    let mut power = FieldElement::one(field);
    let mut acc = FieldElement::zero(field);
    for (i, s) in sv.coeffs.iter().enumerate() {
        let ik = num_traits::pow(BigInt::from(i), k as usize);
        acc = &acc + &(&(s * &power) * &int(field, ik));
        power = &power * beta;
    }
    Ok(acc)
}

/// Weights `a_(n,i)` with `(x d/dx)^n = sum_i a_(n,i) x^i (d/dx)^i`, for `i = 1..=n`.
pub fn operator_weights(n: u32) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut row = vec![BigInt::one()];
    for size in 2..=n as usize {
        let mut next = vec![BigInt::zero(); size];
        for i in 1..=size {
            let from_left = if i >= 2 { row[i - 2].clone() } else { BigInt::zero() };
            let from_same = if i < size { &row[i - 1] * BigInt::from(i) } else { BigInt::zero() };
            next[i - 1] = from_left + from_same;
        }
        row = next;
    }
    Ok(row)
}

fn validate_alpha(alpha: &[FieldElement]) -> Result<QuadraticField> {
    let field = common_field(alpha)?;
    if alpha.iter().any(|a| a.is_zero()) {
        return Err(Error::ZeroAlpha);
    }
    for (i, a) in alpha.iter().enumerate() {
        if alpha[..i].contains(a) {
            return Err(Error::RepeatedAlpha);
        }
    }
    Ok(field)
}

/// Padé system for Euler's series with equal `l_j = l`, cleared by `(ml+mu)!`.
#[derive(Clone, Debug)]
pub struct PadeSystem {
    pub m: usize,
    pub l: u32,
    pub mu: usize,
    pub alpha: Vec<FieldElement>,
    pub sigma: SigmaVector,
    /// `B_0, ..., B_m`.
    pub b: Vec<Poly>,
}

impl PadeSystem {
    pub fn field(&self) -> QuadraticField {
        self.alpha[0].field()
    }

    fn ml(&self) -> usize {
        self.m * self.l as usize
    }

    /// `(ml+mu)! r_(N,j)`: the coefficient of `t^N` in `B_0(t) F(alpha_j t)`.
    pub fn remainder_coefficient(&self, n: usize, j: usize) -> FieldElement {
        self.remainder_coefficients(n + 1, j).pop().expect("n + 1 >= 1 entries")
    }

    /// The coefficients for `N = 0..len`, sharing factorial and power tables.
    pub fn remainder_coefficients(&self, len: usize, j: usize) -> Vec<FieldElement> {
        let field = self.field();
        let ml = self.ml();
        let top_index = ml + self.mu;
        let mut fact = vec![BigInt::one()];
        for k in 1..=len.max(top_index + 1) {
            let next = &fact[k - 1] * BigInt::from(k);
            fact.push(next);
        }
        let alpha = &self.alpha[j - 1];
        let mut powers = vec![FieldElement::one(field)];
        for k in 1..len {
            let next = &powers[k - 1] * alpha;
            powers.push(next);
        }
        // sigma_(ml-h) (ml+mu)! / (ml-h+mu)!, independent of N
        let weights: Vec<FieldElement> = (0..=ml)
            .map(|h| &self.sigma.coeffs[ml - h] * &int(field, &fact[top_index] / &fact[ml - h + self.mu]))
            .collect();
        (0..len)
            .map(|n| {
                let mut acc = FieldElement::zero(field);
                for h in 0..=ml.min(n) {
                    if weights[h].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&(&weights[h] * &int(field, fact[n - h].clone())) * &powers[n - h]);
                }
                acc
            })
            .collect()
    }

    /// Coefficient of `t^((m+1)l + mu + k)` in `S_j` from the closed
    /// binomial form of the remainder.
    pub fn remainder_coefficient_closed(&self, k: usize, j: usize) -> FieldElement {
        let field = self.field();
        let l = self.l as usize;
        let alpha = &self.alpha[j - 1];
        let mut inner = FieldElement::zero(field);
        for (i, s) in self.sigma.coeffs.iter().enumerate() {
            inner = &inner + &(&(s * &int(field, binomial(i + self.mu + l + k, i + self.mu))) * &alpha.pow(i as u32));
        }
        let pre = factorial((self.ml() + self.mu) as u64)
            * factorial(l as u64)
            * factorial(k as u64)
            * binomial(l + k, k);
        &(&inner * &int(field, pre)) * &alpha.pow((l + self.mu + k) as u32)
    }

    /// `b_(l,mu,i) = B_i(1)` for `i = 0..=m`.
    pub fn values_at_one(&self) -> Vec<FieldElement> {
        let one = FieldElement::one(self.field());
        self.b.iter().map(|p| p.eval(&one)).collect()
    }

    /// `s_(l,mu,j) = b_0 F_v(alpha_j) - b_j` modulo `p^N`.
    pub fn remainder_value(&self, v: &Place, j: usize, precision: u32) -> Result<CompletionElement> {
        let vals = self.values_at_one();
        let f = euler_eval_certified(v, &self.alpha[j - 1], precision)?.value;
        let b0 = f.embed_like(&vals[0])?;
        let bj = f.embed_like(&vals[j])?;
        Ok(b0.mul(&f).sub(&bj))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "l": self.l,
            "mu": self.mu,
            "alphas": self.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "B": self.b.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn pade_construct(m: usize, l: u32, mu: usize, alpha: &[FieldElement]) -> Result<PadeSystem> {
    if m == 0 || l == 0 {
        return Err(Error::InvalidInput("m and l must be at least 1".into()));
    }
    if alpha.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} alpha values, got {}", alpha.len())));
    }
    if mu > m {
        return Err(Error::InvalidInput(format!("mu = {mu} exceeds m = {m}")));
    }
    let field = validate_alpha(alpha)?;
    let sigma = sigma_coeffs(&vec![l; m], alpha)?;
    let ml = m * l as usize;
    let top = factorial((ml + mu) as u64);
    let b0_coeffs = (0..=ml)
        .map(|e| {
            let i = ml - e;
            &sigma.coeffs[i] * &int(field, &top / factorial((i + mu) as u64))
        })
        .collect();
    let mut sys = PadeSystem {
        m,
        l,
        mu,
        alpha: alpha.to_vec(),
        sigma,
        b: vec![Poly::new(field, b0_coeffs)],
    };
    for j in 1..=m {
        let coeffs = sys.remainder_coefficients(ml + mu, j);
        sys.b.push(Poly::new(field, coeffs));
    }
    Ok(sys)
}

/// `sum_(n < len) n! alpha^n t^n`.
fn euler_series(alpha: &FieldElement, len: usize) -> Poly {
    let field = alpha.field();
    let mut coeffs = Vec::with_capacity(len);
    let mut term = FieldElement::one(field);
    for n in 0..len {
        coeffs.push(term.clone());
        term = &(&term * alpha) * &int(field, n + 1);
    }
    Poly::new(field, coeffs)
}

/// Minimal order over `j` of `B_0(t) F(alpha_j t) - B_j(t)`, computed by
/// truncated series multiplication. Returns `cutoff` if no nonzero
/// coefficient appears below it.
pub fn pade_order_check(sys: &PadeSystem, cutoff: usize) -> Result<usize> {
    let lower = (sys.m + 1) * sys.l as usize + sys.mu;
    let needed = lower + 5;
    if cutoff < needed {
        return Err(Error::CutoffTooSmall { cutoff, needed });
    }
    let ml = sys.ml();
    let mut best = cutoff;
    for j in 1..=sys.m {
        let series = euler_series(&sys.alpha[j - 1], cutoff);
        let rem = sys.b[0].mul_truncated(&series, cutoff).sub(&sys.b[j]);
        best = best.min(rem.order().unwrap_or(cutoff));
        // the coefficient formula itself must vanish on the band [ml+mu, (m+1)l+mu)
        let band = sys.remainder_coefficients(lower, j);
        if let Some(n) = (ml + sys.mu..lower).find(|&n| !band[n].is_zero()) {
            best = best.min(n);
        }
    }
    Ok(best)
}

/// Padé system for `G(t) = sum [P]_n t^n` with `P(x) = p0 + p1 x` and
/// arbitrary `l_j`, uncleared (coefficients lie in the field).
#[derive(Clone, Debug)]
pub struct GenericPadeSystem {
    pub mu: usize,
    pub beta: Vec<FieldElement>,
    pub p0: FieldElement,
    pub p1: FieldElement,
    pub sigma: SigmaVector,
    /// `A_0, ..., A_m`.
    pub a: Vec<Poly>,
}

/// `[P]_0, ..., [P]_(n-1)`.
fn pochhammer_values(p0: &FieldElement, p1: &FieldElement, n: usize) -> Vec<FieldElement> {
    let field = p0.field();
    let mut out = Vec::with_capacity(n);
    let mut acc = FieldElement::one(field);
    for k in 0..n {
        out.push(acc.clone());
        acc = &acc * &(p0 + &p1.scale(&Rational::from_integer(k.into())));
    }
    out
}

impl GenericPadeSystem {
    pub fn field(&self) -> QuadraticField {
        self.p0.field()
    }

    /// `L + mu + l_j` for each column.
    pub fn required_orders(&self) -> Vec<usize> {
        let total = self.sigma.total();
        self.sigma.l_vec.iter().map(|&l| total + self.mu + l as usize).collect()
    }

    /// Order of `A_0(t) G(beta_j t) - A_j(t)` for each column, capped at `cutoff`.
    pub fn order_check(&self, cutoff: usize) -> Result<Vec<usize>> {
        let max_needed = self.required_orders().into_iter().max().unwrap_or(0);
        if cutoff < max_needed + 1 {
            return Err(Error::CutoffTooSmall { cutoff, needed: max_needed + 1 });
        }
        let poch = pochhammer_values(&self.p0, &self.p1, cutoff);
        let mut out = Vec::with_capacity(self.beta.len());
        for (j, beta) in self.beta.iter().enumerate() {
            let mut power = FieldElement::one(self.field());
            let mut coeffs = Vec::with_capacity(cutoff);
            for pn in &poch {
                coeffs.push(pn * &power);
                power = &power * beta;
            }
            let series = Poly::new(self.field(), coeffs);
            let rem = self.a[0].mul_truncated(&series, cutoff).sub(&self.a[j + 1]);
            out.push(rem.order().unwrap_or(cutoff));
        }
        Ok(out)
    }
}

pub fn pade_generic(
    l_vec: &[u32],
    mu: usize,
    beta: &[FieldElement],
    p0: &FieldElement,
    p1: &FieldElement,
) -> Result<GenericPadeSystem> {
    if p1.is_zero() {
        return Err(Error::DegenerateP("P must have degree one".into()));
    }
    let sigma = sigma_coeffs(l_vec, beta)?;
    let field = beta[0].field();
    if p0.field() != field || p1.field() != field {
        return Err(Error::FieldMismatch(field.to_string(), p0.field().to_string()));
    }
    let total = sigma.total();
    let poch = pochhammer_values(p0, p1, total + mu + 1);
    if poch.iter().any(|v| v.is_zero()) {
        return Err(Error::DegenerateP("P vanishes at a nonnegative integer below L + mu".into()));
    }
    let a0_coeffs = (0..=total)
        .map(|e| {
            let i = total - e;
            &sigma.coeffs[i] / &poch[i + mu]
        })
        .collect();
    let mut a = vec![Poly::new(field, a0_coeffs)];
    for b in beta {
        // r_(N,j) needs [P]_(N-h) with N - h < L + mu, all available in poch
        let coeffs = (0..total + mu)
            .map(|n| {
                let mut acc = FieldElement::zero(field);
                for h in 0..=total.min(n) {
                    let s = &sigma.coeffs[total - h];
                    if s.is_zero() {
                        continue;
                    }
                    let ratio = &poch[n - h] / &poch[total - h + mu];
                    acc = &acc + &(&(s * &ratio) * &b.pow((n - h) as u32));
                }
                acc
            })
            .collect();
        a.push(Poly::new(field, coeffs));
    }
    Ok(GenericPadeSystem { mu, beta: beta.to_vec(), p0: p0.clone(), p1: p1.clone(), sigma, a })
}

/// Determinant of the matrix `(B_(l,mu,j)(t))_(mu, j = 0..m)`.
#[derive(Clone, Debug)]
pub struct DeterminantReport {
    pub exponent: usize,
    /// Leading coefficient from the closed product formula.
    pub b: FieldElement,
    /// Determinant computed by cofactor expansion of the polynomial matrix.
    pub brute_force: Poly,
    pub brute_force_equal: bool,
}

fn poly_determinant(matrix: &[Vec<Poly>]) -> Poly {
    let n = matrix.len();
    let field = matrix[0][0].field();
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut acc = Poly::zero(field);
    for col in 0..n {
        if matrix[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = matrix[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = matrix[0][col].mul(&poly_determinant(&minor));
        acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// `sum_i sigma_i i^l alpha_j^i = (-1)^l l! alpha_j^l prod_(i != j) (alpha_i - alpha_j)^l`.
pub fn weighted_sigma_closed(l: u32, alpha: &[FieldElement], j: usize) -> FieldElement {
    let field = alpha[0].field();
    let sign = if l % 2 == 0 { 1 } else { -1 };
    let mut acc = &int(field, factorial(l as u64) * sign) * &alpha[j].pow(l);
    for (i, a) in alpha.iter().enumerate() {
        if i != j {
            acc = &acc * &(a - &alpha[j]).pow(l);
        }
    }
    acc
}

pub fn pade_determinant(m: usize, l: u32, alpha: &[FieldElement]) -> Result<DeterminantReport> {
    let systems = (0..=m).map(|mu| pade_construct(m, l, mu, alpha)).collect::<Result<Vec<_>>>()?;
    let field = alpha[0].field();
    let matrix: Vec<Vec<Poly>> = systems.iter().map(|s| s.b.clone()).collect();
    let brute = poly_determinant(&matrix);

    let ml = m * l as usize;
    let exponent = m * (m + 1) * l as usize + m * (m - 1) / 2;
    // b = (-1)^(ml) prod_(mu<m) (ml+mu)! prod alpha_j^l prod_j (sum sigma_i i^l alpha_j^i) prod_(i<j) (alpha_j - alpha_i)
    let mut b = int(field, if ml % 2 == 0 { 1 } else { -1 });
    for mu in 0..m {
        b = &b * &int(field, factorial((ml + mu) as u64));
    }
    for j in 0..m {
        b = &b * &alpha[j].pow(l);
        b = &b * &weighted_sigma_closed(l, alpha, j);
        for i in 0..j {
            b = &b * &(&alpha[j] - &alpha[i]);
        }
    }
    let expected = Poly::monomial(b.clone(), exponent);
    Ok(DeterminantReport { exponent, brute_force_equal: brute == expected, b, brute_force: brute })
}

/// Least `mu` in `0..=m` with `W(l, mu) = sum_i lambda_i b_(l,mu,i) != 0`.
pub fn select_mu(l: u32, lambda: &[FieldElement], alpha: &[FieldElement]) -> Result<(usize, FieldElement)> {
    let m = alpha.len();
    if lambda.len() != m + 1 {
        return Err(Error::InvalidInput(format!("expected {} lambda values, got {}", m + 1, lambda.len())));
    }
    if lambda.iter().all(|x| x.is_zero()) {
        return Err(Error::AllLambdaZero);
    }
    for mu in 0..=m {
        let sys = pade_construct(m, l, mu, alpha)?;
        let w = sys
            .values_at_one()
            .iter()
            .zip(lambda)
            .fold(FieldElement::zero(sys.field()), |acc, (b, lam)| &acc + &(b * lam));
        if !w.is_zero() {
            return Ok((mu, w));
        }
    }
    Err(Error::InvalidInput("no mu with W != 0; alpha values are degenerate".into()))
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use eulerpade::certify::{
    certify_nonvanishing, constants_c1_c2, iterates_alternate, recurrence_lambdas, recurrence_to_linear_form,
    rosser_first_failure, theorem2_bounds, verify_certificate, z_inverse, z_upper_bound, CertStatus,
    CertifyOutcome, ValuationSetDescriptor,
};
use eulerpade::pade::{
    pade_construct, pade_determinant, pade_order_check, sigma_annihilation_check, sigma_coeffs,
    weighted_sigma_closed,
};
use eulerpade::padics::{euler_eval_certified, scalar_residue};
use eulerpade::places::{non_archimedean_log_coefficients, places_above, product_formula_defect, Splitting};
use eulerpade::{FieldElement, QuadraticField, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn q() -> QuadraticField {
    QuadraticField::RATIONALS
}

fn qint(n: i64) -> FieldElement {
    FieldElement::from_int(q(), n)
}

const POOL: [i64; 5] = [1, -1, 2, -2, 3];

/// Ordered tuples of `m` distinct entries of `POOL`.
fn tuples(m: usize) -> Vec<Vec<FieldElement>> {
    fn go(m: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<FieldElement>>) {
        if cur.len() == m {
            out.push(cur.iter().map(|&x| qint(x)).collect());
            return;
        }
        for x in POOL {
            if !cur.contains(&x) {
                cur.push(x);
                go(m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

fn is_integral_poly(p: &eulerpade::pade::Poly) -> bool {
    p.coeffs().iter().all(|c| c.is_algebraic_integer())
}

fn pade_orders() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for m in 1..=3usize {
        for l in 1..=4u32 {
            for mu in 0..=m {
                for alpha in tuples(m) {
                    let sys = pade_construct(m, l, mu, &alpha).map_err(|e| e.to_string())?;
                    let required = (m + 1) * l as usize + mu;
                    let order = pade_order_check(&sys, required + 5).map_err(|e| e.to_string())?;
                    ensure(order >= required, || format!("m={m} l={l} mu={mu} {alpha:?}: order {order} < {required}"))?;
                    ensure(sys.b.iter().all(is_integral_poly), || format!("non-integral coefficients m={m} l={l} mu={mu}"))?;
                    count += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{count} systems, all orders >= (m+1)l+mu, {:.2?}", start.elapsed()))
}

fn determinants() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for m in 1..=2usize {
        for l in 1..=3u32 {
            for alpha in tuples(m) {
                let rep = pade_determinant(m, l, &alpha).map_err(|e| e.to_string())?;
                let exp = m * (m + 1) * l as usize + m * (m - 1) / 2;
                ensure(rep.exponent == exp, || format!("exponent {} != {exp}", rep.exponent))?;
                ensure(rep.brute_force_equal, || format!("m={m} l={l} {alpha:?}: determinant differs from b t^{exp}"))?;
                ensure(rep.brute_force.order() == Some(exp) && rep.brute_force.degree() == Some(exp), || {
                    "determinant is not a monomial".into()
                })?;
                // weighted sigma sum: by direct summation and by the product formula
                let sv = sigma_coeffs(&vec![l; m], &alpha).map_err(|e| e.to_string())?;
                for j in 0..m {
                    let direct = sigma_annihilation_check(&sv, j + 1, l).map_err(|e| e.to_string())?;
                    ensure(direct == weighted_sigma_closed(l, &alpha, j), || "weighted sigma routes disagree".into())?;
                }
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{count} determinants equal the closed form, {:.2?}", start.elapsed()))
}

fn sigma_annihilation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let k5 = QuadraticField::new(5).unwrap();
    let mut unequal = 0;
    for case in 0..20 {
        let m = rng.gen_range(1..=4usize);
        let field = if case % 2 == 0 { q() } else { k5 };
        let mut beta: Vec<FieldElement> = Vec::new();
        while beta.len() < m {
            let x = Rational::from_integer(rng.gen_range(-6i64..=6).into());
            let y = if field.is_rational() {
                Rational::zero()
            } else {
                Rational::from_integer(rng.gen_range(-2i64..=2).into())
            };
            let b = FieldElement::new(field, x, y).unwrap();
            if !b.is_zero() && !beta.contains(&b) {
                beta.push(b);
            }
        }
        let l_vec: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
        if l_vec.windows(2).any(|w| w[0] != w[1]) {
            unequal += 1;
        }
        let sv = sigma_coeffs(&l_vec, &beta).map_err(|e| e.to_string())?;
        for (j, &lj) in l_vec.iter().enumerate() {
            for k in 0..lj {
                let v = sigma_annihilation_check(&sv, j + 1, k).map_err(|e| e.to_string())?;
                ensure(v.is_zero(), || format!("case {case}: nonzero at j={} k={k} < l_j={lj}", j + 1))?;
            }
            // sharpness: k = l_j never vanishes for distinct nonzero beta
            let v = sigma_annihilation_check(&sv, j + 1, lj).map_err(|e| e.to_string())?;
            ensure(!v.is_zero(), || format!("case {case}: vanishes at k = l_j"))?;
        }
    }
    ensure(unequal > 0, || "no unequal l_vec among the cases".into())?;
    // constructed sharp case: l = (2), beta = (3): sum = 2 * 3^2
    let sv = sigma_coeffs(&[2], &[qint(3)]).map_err(|e| e.to_string())?;
    let v = sigma_annihilation_check(&sv, 1, 2).map_err(|e| e.to_string())?;
    ensure(v == qint(18), || format!("constructed case gives {v}"))?;
    Ok(format!("20 random cases ({unequal} with unequal l_j) vanish for k < l_j and not at k = l_j"))
}

fn padic_evaluator() -> Outcome {
    let start = Instant::now();
    let v2 = places_above(q(), 2).unwrap()[0];
    let f2 = euler_eval_certified(&v2, &qint(1), 2).map_err(|e| e.to_string())?;
    ensure(scalar_residue(&f2.value) == Some(&BigInt::from(2)), || "F_2(1) mod 4 != 2".into())?;
    ensure(f2.tail_valuation_bound >= Rational::from_integer(3.into()), || "tail bound < 3".into())?;
    let v5 = places_above(q(), 5).unwrap()[0];
    let f5 = euler_eval_certified(&v5, &qint(1), 2).map_err(|e| e.to_string())?;
    ensure(scalar_residue(&f5.value) == Some(&BigInt::from(14)), || "F_5(1) mod 25 != 14".into())?;

    let k = QuadraticField::new(5).unwrap();
    let half = Rational::new(1.into(), 2.into());
    let alphas = [
        FieldElement::one(k),
        FieldElement::new(k, half.clone(), half.clone()).unwrap(),
        FieldElement::new(k, half.clone(), -half).unwrap(),
        FieldElement::sqrt_d(k),
        FieldElement::new(k, Rational::from_integer(2.into()), Rational::one()).unwrap(),
        FieldElement::from_int(k, -3),
    ];
    let mut checks = 0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        for v in places_above(k, p).map_err(|e| e.to_string())? {
            for a in &alphas {
                let top = euler_eval_certified(&v, a, 32).map_err(|e| e.to_string())?;
                for n in [4u32, 8, 16] {
                    let low = euler_eval_certified(&v, a, n).map_err(|e| e.to_string())?;
                    let reduced = top.value.reduce(n).map_err(|e| e.to_string())?;
                    ensure(reduced == low.value, || format!("{v}: F({a}) at N=32 and N={n} disagree"))?;
                    checks += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("F_2(1) = 2 mod 4, F_5(1) = 14 mod 25, {checks} consistency checks, {:.2?}", start.elapsed()))
}

fn fibonacci() -> Outcome {
    let start = Instant::now();
    let form = recurrence_to_linear_form(&[1, 1], &[0, 1]).map_err(|e| e.to_string())?;
    let lambdas = recurrence_lambdas(&form, &Rational::one(), &Rational::one()).map_err(|e| e.to_string())?;
    let outcome = certify_nonvanishing(&lambdas, &form.alphas, 2, 50, 32).map_err(|e| e.to_string())?;
    let CertifyOutcome::Nonzero(cert) = outcome else {
        return Err("no certificate found for p <= 50".into());
    };
    ensure(cert.place.p() == 2 && cert.place.splitting() == Splitting::Inert, || format!("certificate at {}", cert.place))?;
    ensure(cert.partial_valuation == Rational::one(), || "partial valuation != 1".into())?;
    ensure(cert.tail_valuation_bound >= Rational::from_integer(3.into()), || "tail bound < 3".into())?;
    ensure(verify_certificate(&cert).map_err(|e| e.to_string())? == CertStatus::Nonzero, || "re-verification failed".into())?;
    let (_, c2) = constants_c1_c2(&form.alphas, &ValuationSetDescriptor::All).map_err(|e| e.to_string())?;
    ensure((c2 - 72.0).abs() < 0.5, || format!("c2 = {c2}"))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("nonzero at {} with valuation 1 < {}, c2 = {c2:.4}", cert.place, cert.tail_valuation_bound))
}

fn double_factorial_demo() -> Outcome {
    let alphas = [qint(1), qint(-1)];
    let mut found = Vec::new();
    for (a, b) in [(0i64, 1i64), (1, 1), (1, 2)] {
        let lambdas = [qint(2 * a), qint(-b), qint(-b)];
        let outcome = certify_nonvanishing(&lambdas, &alphas, 2, 50, 32).map_err(|e| e.to_string())?;
        let CertifyOutcome::Nonzero(cert) = outcome else {
            return Err(format!("(a,b) = ({a},{b}): undetermined"));
        };
        ensure(verify_certificate(&cert).map_err(|e| e.to_string())? == CertStatus::Nonzero, || {
            format!("({a},{b}): re-verification failed")
        })?;
        found.push(format!("{a}/{b}@p={}", cert.place.p()));
    }
    Ok(format!("certified: {}", found.join(", ")))
}

fn theorem2() -> Outcome {
    let base = 17.0 * 17f64.exp();
    for k in 0..50 {
        let log_h = base * 1.3f64.powi(k);
        let rep = theorem2_bounds(1, 1, 2.0, log_h).map_err(|e| format!("logH = {log_h}: {e}"))?;
        ensure(rep.s == 17.0, || format!("s = {}", rep.s))?;
        ensure(rep.n_ell >= 0.0 && rep.n_ell_plus_1 < 0.0, || format!("logH = {log_h}: bracket fails"))?;
        let lo = (log_h / log_h.ln()).ln();
        let hi = 17.0 * log_h / log_h.ln();
        let left = ((rep.ell + 1) as f64).ln();
        let right = (rep.ell + 2) as f64;
        ensure(lo < left && right < hi, || format!("logH = {log_h}: containment fails"))?;
        let expect = 2.0 + 114.0 * log_h.ln().ln() / log_h.ln();
        ensure(((rep.exponent - expect) / expect).abs() < 1e-6, || format!("exponent {} vs {expect}", rep.exponent))?;
    }
    let rep = theorem2_bounds(1, 1, 2.0, base).unwrap();
    Ok(format!(
        "50 logH values; at 17e^17: ell = {}, interval ]{:.2}, {:.4e}[, exponent {:.4}",
        rep.ell, rep.interval_lo, rep.interval_hi, rep.exponent
    ))
}

fn rosser() -> Outcome {
    let start = Instant::now();
    if let Some(x) = rosser_first_failure(100_000) {
        return Err(format!("fails at x = {x}"));
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("sum log p / p < log x for every x <= 1e5, {:.2?}", start.elapsed()))
}

fn product_formula() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    let mut worst: f64 = 0.0;
    for d in [5i64, -1] {
        let field = QuadraticField::new(d).unwrap();
        let mut done = 0;
        while done < 500 {
            let (x, y) = if d == 5 && rng.gen_bool(0.5) {
                // half-integral integers of Q(sqrt 5): a, b odd
                let a = 2 * rng.gen_range(-500i64..500) + 1;
                let b = 2 * rng.gen_range(-500i64..500) + 1;
                (Rational::new(a.into(), 2.into()), Rational::new(b.into(), 2.into()))
            } else {
                (Rational::from_integer(rng.gen_range(-1000i64..=1000).into()), Rational::from_integer(rng.gen_range(-1000i64..=1000).into()))
            };
            let a = FieldElement::new(field, x, y).unwrap();
            if a.is_zero() {
                continue;
            }
            ensure(a.is_algebraic_integer(), || format!("{a} not integral"))?;
            let defect = product_formula_defect(field, &a).map_err(|e| e.to_string())?;
            worst = worst.max(defect);
            ensure(defect < 1e-9, || format!("{a} in {field}: defect {defect}"))?;
            // exact: prod_p p^(kappa * coefficient_p) = |N(a)|
            let mut prod = BigInt::one();
            for (p, c) in non_archimedean_log_coefficients(field, &a).map_err(|e| e.to_string())? {
                let e = c * Rational::from_integer(2.into());
                ensure(e.is_integer() && !e.is_negative(), || format!("{a}: exponent {e} at {p}"))?;
                prod *= num_traits::pow(BigInt::from(p), e.to_integer().try_into().unwrap());
            }
            let norm = a.norm().abs();
            ensure(Rational::from_integer(prod.clone()) == norm, || format!("{a}: {prod} != |N| = {norm}"))?;
            done += 1;
        }
    }
    Ok(format!("1000 elements, worst defect {worst:.2e}, non-Archimedean parts exact"))
}

fn z_function() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let e = std::f64::consts::E;
    for r in [e, 17.0] {
        for _ in 0..100 {
            let y = r * r.exp() * rng.gen_range(0.0f64..25.0).exp();
            let res = z_inverse(y).map_err(|er| er.to_string())?;
            let rel = ((res.z * res.z.ln() - y) / y).abs();
            ensure(rel < 1e-9, || format!("y = {y}: z log z off by {rel}"))?;
            ensure(iterates_alternate(&res), || format!("y = {y}: iterates do not alternate"))?;
            let bound = z_upper_bound(y, r).map_err(|er| er.to_string())?;
            ensure(res.z <= bound, || format!("y = {y}, r = {r}: z = {} > {bound}", res.z))?;
        }
    }
    Ok("200 samples: z log z = y, alternating iterates, upper bound holds".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Pade order suite", pade_orders),
        ("determinant suite", determinants),
        ("sigma annihilation", sigma_annihilation),
        ("p-adic evaluator", padic_evaluator),
        ("Fibonacci demo", fibonacci),
        ("(2n)! demo", double_factorial_demo),
        ("effective bounds arithmetic", theorem2),
        ("Rosser/Mertens", rosser),
        ("product formula", product_formula),
        ("z-function", z_function),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

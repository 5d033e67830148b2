//! Command-line front end. `run` is the whole program; `main` only wires
//! it to the process streams.

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::certify::{
    certify_nonvanishing, constant_c1, constants_c1_c2, limsup_sequence, recurrence_lambdas,
    recurrence_to_linear_form, residue_condition, theorem2_bounds, verify_certificate, CertStatus, Certificate,
    CertifyOutcome, ValuationSetDescriptor,
};
use crate::error::{Error, Result};
use crate::numfield::{format_rational, parse_rational, FieldElement, QuadraticField};
use crate::pade::{pade_construct, pade_order_check};
use crate::padics::euler_eval_certified;
use crate::places::places_above;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "eulerpade", version, about = "Pade approximations and p-adic certificates for Euler's factorial series")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the B-polynomials of a Pade system and its order check
    Pade(PadeArgs),
    /// Certified value of F_v(alpha) at every place above p
    Eval(EvalArgs),
    /// Search for a non-vanishing certificate of lambda_0 + sum lambda_j F_v(alpha_j)
    Certify(CertifyArgs),
    /// Effective bounds: ell, the prime interval and the exponent
    Bounds(BoundsArgs),
    /// Diagnostic prefix of the limsup sequence (evidence, not proof)
    Limsup(LimsupArgs),
    /// Certify sum n! f_n != a/b for the Fibonacci numbers f_n
    Fib(FibArgs),
    /// Residue-class condition r > m phi(n) / (m+1)
    Residue(ResidueArgs),
    /// Re-verify a certificate JSON file at precision N+4
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct FieldArg {
    /// Squarefree d for Q(sqrt d); omit for Q
    #[arg(long, allow_hyphen_values = true)]
    field: Option<i64>,
}

#[derive(Args, Debug)]
struct PadeArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    mu: usize,
    /// Elements separated by ';', coordinates x,y
    #[arg(long, alias = "alpha", allow_hyphen_values = true)]
    alphas: String,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long)]
    p: u64,
    #[arg(long, alias = "alphas", allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, default_value_t = 8)]
    prec: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PrimeRange {
    /// Single prime (same as --pmin P --pmax P)
    #[arg(long, conflicts_with_all = ["pmin", "pmax"])]
    p: Option<u64>,
    #[arg(long)]
    pmin: Option<u64>,
    #[arg(long)]
    pmax: Option<u64>,
}

impl PrimeRange {
    fn bounds(&self) -> (u64, u64) {
        match self.p {
            Some(p) => (p, p),
            None => (self.pmin.unwrap_or(2), self.pmax.unwrap_or(50)),
        }
    }
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long, allow_hyphen_values = true)]
    lambdas: String,
    #[arg(long, alias = "alpha", allow_hyphen_values = true)]
    alphas: String,
    #[command(flatten)]
    range: PrimeRange,
    /// Largest precision N tried
    #[arg(long, default_value_t = 32)]
    prec: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    c1: Option<f64>,
    /// Compute m, kappa and c1 from these alpha values instead
    #[command(flatten)]
    field: FieldArg,
    #[arg(long, alias = "alpha", allow_hyphen_values = true)]
    alphas: Option<String>,
    #[arg(long = "logH")]
    log_h: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct LimsupArgs {
    #[command(flatten)]
    field: FieldArg,
    #[arg(long, alias = "alpha", allow_hyphen_values = true)]
    alphas: String,
    #[arg(long, default_value_t = 20)]
    lmax: usize,
    /// Primes whose places are removed from V, comma separated
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct FibArgs {
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    a: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    b: String,
    #[command(flatten)]
    range: PrimeRange,
    #[arg(long, default_value_t = 32)]
    prec: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ResidueArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Path to a certificate JSON file
    #[arg(long)]
    cert: std::path::PathBuf,
    #[arg(long)]
    json: bool,
}

fn field_of(arg: &FieldArg) -> Result<QuadraticField> {
    QuadraticField::from_option(arg.field)
}

/// `x,y;x,y;...` into field elements.
pub fn parse_elements(field: QuadraticField, s: &str) -> Result<Vec<FieldElement>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(|t| FieldElement::parse(field, t.trim())).collect()
}

fn strings(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::InvalidInput(e.to_string()))
}

macro_rules! say {
    ($out:expr, $($t:tt)*) => {
        writeln!($out, $($t)*).map_err(|e| Error::InvalidInput(e.to_string()))?
    };
}

/// Runs the program on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Pade(a) => pade(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Limsup(a) => limsup(a, out),
        Command::Fib(a) => fib(a, out),
        Command::Residue(a) => residue(a, out),
        Command::Verify(a) => verify(a, out),
    }
}

fn pade(a: PadeArgs, out: &mut dyn Write) -> Result<i32> {
    let field = field_of(&a.field)?;
    let alphas = parse_elements(field, &a.alphas)?;
    let m = a.m.unwrap_or(alphas.len());
    let sys = pade_construct(m, a.l, a.mu, &alphas)?;
    let required = (m + 1) * a.l as usize + a.mu;
    let cutoff = a.cutoff.unwrap_or(required + 5);
    let order = pade_order_check(&sys, cutoff)?;
    if a.json {
        let mut v = sys.to_json();
        v["required_order"] = required.into();
        v["cutoff"] = cutoff.into();
        v["order"] = order.into();
        emit(out, &v)?;
    } else {
        say!(out, "Pade system over {field}: m={m} l={} mu={}", a.l, a.mu);
        for (i, p) in sys.b.iter().enumerate() {
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("({c})*t^{k}"))
                .collect();
            let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            say!(out, "B_{i}(t) = {body}");
        }
        let shown = if order == cutoff { format!(">= {order}") } else { order.to_string() };
        say!(out, "remainder order {shown} (required {required}, cutoff {cutoff})");
    }
    Ok(EXIT_OK)
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let field = field_of(&a.field)?;
    let alpha = FieldElement::parse(field, a.alpha.trim())?;
    let values = places_above(field, a.p)?
        .iter()
        .map(|v| euler_eval_certified(v, &alpha, a.prec))
        .collect::<Result<Vec<_>>>()?;
    if a.json {
        emit(out, &serde_json::Value::Array(values.iter().map(|c| c.to_json()).collect()))?;
    } else {
        for c in &values {
            let j = c.to_json();
            say!(
                out,
                "F_v({alpha}) at {} mod p^{}: residue {}, tail valuation >= {}, terms {}",
                c.value.place(),
                a.prec,
                j["residue"],
                format_rational(&c.tail_valuation_bound),
                c.terms_used
            );
        }
    }
    Ok(EXIT_OK)
}

fn report_outcome(outcome: &CertifyOutcome, json: bool, out: &mut dyn Write) -> Result<i32> {
    if json {
        emit(out, &outcome.to_json())?;
    } else {
        match outcome {
            CertifyOutcome::Nonzero(c) => {
                say!(
                    out,
                    "nonzero at {} (precision {}): partial valuation {} < tail bound {}",
                    c.place,
                    c.precision,
                    format_rational(&c.partial_valuation),
                    format_rational(&c.tail_valuation_bound)
                );
            }
            CertifyOutcome::Undetermined(u) => {
                say!(
                    out,
                    "undetermined: no certificate for p in [{}, {}] up to precision {} ({} places tried)",
                    u.p_min,
                    u.p_max,
                    u.max_precision,
                    u.places_tried
                );
            }
        }
    }
    Ok(match outcome {
        CertifyOutcome::Nonzero(_) => EXIT_OK,
        CertifyOutcome::Undetermined(_) => EXIT_UNDETERMINED,
    })
}

fn certify(a: CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let field = field_of(&a.field)?;
    let lambdas = parse_elements(field, &a.lambdas)?;
    let alphas = parse_elements(field, &a.alphas)?;
    let (lo, hi) = a.range.bounds();
    let outcome = certify_nonvanishing(&lambdas, &alphas, lo, hi, a.prec)?;
    report_outcome(&outcome, a.json, out)
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<i32> {
    let (m, kappa, c1) = match &a.alphas {
        Some(s) => {
            let field = field_of(&a.field)?;
            let alphas = parse_elements(field, s)?;
            (alphas.len() as u32, field.kappa(), constant_c1(&alphas)?)
        }
        None => match (a.m, a.kappa, a.c1) {
            (Some(m), Some(k), Some(c)) => (m, k, c),
            _ => return Err(Error::InvalidInput("give --m, --kappa and --c1, or --alphas".into())),
        },
    };
    let rep = theorem2_bounds(m, kappa, c1, a.log_h)?;
    if a.json {
        emit(out, &serde_json::to_value(&rep).map_err(|e| Error::InvalidInput(e.to_string()))?)?;
    } else {
        say!(out, "m = {}, kappa = {}, c1 = {}, s = {}", rep.m, rep.kappa, rep.c1, rep.s);
        say!(out, "ell = {} with N(ell) = {:.6e}, N(ell+1) = {:.6e}", rep.ell, rep.n_ell, rep.n_ell_plus_1);
        say!(out, "prime interval ]{:.6}, {:.6e}[", rep.interval_lo, rep.interval_hi);
        say!(out, "exponent {:.6}", rep.exponent);
        say!(out, "[log(ell+1), m(ell+2)] inside interval: {}", rep.containment);
    }
    Ok(EXIT_OK)
}

fn limsup(a: LimsupArgs, out: &mut dyn Write) -> Result<i32> {
    let field = field_of(&a.field)?;
    let alphas = parse_elements(field, &a.alphas)?;
    let set = if a.exclude.is_empty() {
        ValuationSetDescriptor::All
    } else {
        let mut ex = Vec::new();
        for &p in &a.exclude {
            ex.extend(places_above(field, p)?);
        }
        ValuationSetDescriptor::Cofinite(ex)
    };
    let rep = limsup_sequence(&alphas, &set, a.lmax)?;
    if a.json {
        let mut v = serde_json::to_value(&rep).map_err(|e| Error::InvalidInput(e.to_string()))?;
        v["kind"] = "evidence".into();
        emit(out, &v)?;
    } else {
        say!(out, "evidence only (finite prefix): c2 = {}", rep.c2);
        for (i, v) in rep.values.iter().enumerate() {
            say!(out, "l = {:>3}  log a_l = {v:.6}", i + 1);
        }
        match rep.decreasing_from {
            Some(l) => say!(out, "strictly decreasing from l = {l} up to {}", a.lmax),
            None => say!(out, "not yet decreasing by l = {}", a.lmax),
        }
    }
    Ok(EXIT_OK)
}

fn fib(a: FibArgs, out: &mut dyn Write) -> Result<i32> {
    let form = recurrence_to_linear_form(&[1, 1], &[0, 1])?;
    let lambdas = recurrence_lambdas(&form, &parse_rational(&a.a)?, &parse_rational(&a.b)?)?;
    let (lo, hi) = a.range.bounds();
    let outcome = certify_nonvanishing(&lambdas, &form.alphas, lo, hi, a.prec)?;
    if !a.json {
        let (_, c2) = constants_c1_c2(&form.alphas, &ValuationSetDescriptor::All)?;
        say!(out, "sum n! f_n != {}/{} over {}", a.a, a.b, form.field);
        say!(out, "alphas = {:?}, lambdas = {:?}, c2 = {c2:.4}", strings(&form.alphas), strings(&lambdas));
    }
    report_outcome(&outcome, a.json, out)
}

fn residue(a: ResidueArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = residue_condition(a.n, a.r, a.m)?;
    if a.json {
        emit(out, &serde_json::to_value(&rep).map_err(|e| Error::InvalidInput(e.to_string()))?)?;
    } else {
        say!(
            out,
            "n = {}, r = {}, m = {}: condition {} (slope {})",
            a.n,
            a.r,
            a.m,
            if rep.ok { "holds" } else { "fails" },
            rep.slope_exact
        );
    }
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&a.cert).map_err(|e| Error::InvalidInput(format!("{}: {e}", a.cert.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let cert = Certificate::from_json(&value)?;
    let status = verify_certificate(&cert)?;
    if a.json {
        emit(out, &serde_json::json!({ "status": status }))?;
    } else {
        say!(out, "{}", if status == CertStatus::Nonzero { "verified nonzero" } else { "undetermined" });
    }
    Ok(if status == CertStatus::Nonzero { EXIT_OK } else { EXIT_UNDETERMINED })
}

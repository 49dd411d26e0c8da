//! Command-line front end: field construction, polynomial-expression
//! parsing, the verification/inversion workflows, and machine-readable
//! export.
//!
//! The tool is a pure function from argv to output: no configuration files,
//! no state. Reports go to standard output (one JSON document with `--json`),
//! diagnostics to standard error. Exit status 0 is a success or a true
//! verdict, 1 a mathematical negative (not a permutation, criterion fails,
//! methods disagree), 2 a usage or parse error.
//!
//! Text formats:
//! * field spec: `p^n` (auto modulus) or `p^n:c0,c1,...,cn` (modulus
//!   coefficients, low degree first);
//! * element: decimal index, `[c0,c1,...]` coordinates, or `g^k` for the
//!   k-th power of the primitive element;
//! * polynomial: terms `COEFF*x^EXP`, `x^EXP`, `x`, `COEFF` joined by
//!   `+`/`-`, whitespace-insensitive, with COEFF an element literal.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::binom;
use crate::cyclotomic::{self, FamilyParams};
use crate::dickson::{self, DicksonSpec};
use crate::error::{Error, Result};
use crate::gf::{self, FieldCtx, FieldElement};
use crate::piecewise::{self, BranchedPP, CaseTag};
use crate::polyring::{invert_permutation, Poly};

#[derive(Parser, Debug)]
#[command(
    name = "ppinv",
    version,
    about = "Permutation polynomials over GF(3^n) and their compositional inverses"
)]
pub struct Cli {
    /// Emit one JSON document on stdout instead of human-readable text
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled suites (reproducible bit-for-bit)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a field and print its parameters
    Field {
        /// Field spec, e.g. `3^2` or `3^2:1,0,1`
        #[arg(long)]
        spec: String,
    },
    /// Piecewise (branched) permutation analysis and inversion
    Pp {
        #[command(subcommand)]
        action: PpAction,
    },
    /// Dickson and reversed Dickson polynomials
    Dickson {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = DicksonKind::Reversed)]
        kind: DicksonKind,
        #[arg(long)]
        index: u64,
        /// Parameter element
        #[arg(long, default_value = "1")]
        a: String,
        /// Also compute the compositional inverse of the induced map
        #[arg(long)]
        invert: bool,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
        /// Write the value table x,f(x),finv(f(x)) as CSV (`-` for stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generalized cyclotomic permutation families
    Cyclo {
        #[command(subcommand)]
        action: CycloAction,
    },
    /// Binomial coefficients modulo a prime
    Binom {
        #[command(subcommand)]
        action: BinomAction,
    },
    /// Run the built-in verification suites
    Selftest {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

#[derive(Subcommand, Debug)]
pub enum PpAction {
    /// Branch behavior, permutation verdict, and (when possible) the inverse
    Analyze {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        f0: String,
        #[arg(long)]
        f1: String,
    },
    /// Compositional inverse of a permutation polynomial
    Invert {
        #[arg(long)]
        spec: String,
        /// One polynomial for the whole field (used on both cosets)
        #[arg(long)]
        poly: Option<String>,
        /// Square-coset branch (requires --f1)
        #[arg(long)]
        f0: Option<String>,
        /// Non-square-coset branch (requires --f0)
        #[arg(long)]
        f1: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
        /// Write the value table x,f(x),finv(f(x)) as CSV (`-` for stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct CycloParamArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    /// Square-coset cubic parameter (families l5, l7)
    #[arg(long)]
    pub gamma: Option<String>,
    /// Non-square-coset cubic parameter (families l5, l6)
    #[arg(long)]
    pub theta: Option<String>,
    /// Monomial exponent (families l6, l7)
    #[arg(long)]
    pub t: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum CycloAction {
    /// Evaluate the family's permutation criterion
    Check {
        #[command(flatten)]
        params: CycloParamArgs,
    },
    /// Build the map and verify it permutes the field
    Build {
        #[command(flatten)]
        params: CycloParamArgs,
    },
    /// Compute the compositional inverse
    Invert {
        #[command(flatten)]
        params: CycloParamArgs,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
        /// Write the value table x,f(x),finv(f(x)) as CSV (`-` for stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum BinomAction {
    /// C(m, k) mod p; m may be negative (generalized upper index)
    Coeff {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: u64,
    },
    /// Nonzero supports of the inverse-coefficient binomial families
    Support {
        #[arg(long, value_enum)]
        family: SupportFamily,
        #[arg(long)]
        n: u32,
    },
    /// Base-p digit expansion, low digit first
    Digits {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        len: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DicksonKind {
    Plain,
    Reversed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Brute force: tabulate, invert the table, interpolate
    Oracle,
    /// The generic piecewise coefficient engine
    Theorem2,
    /// Family-specific closed-form expression
    ClosedForm,
    /// Run every applicable method and compare
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    L5,
    L6,
    L7,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportFamily {
    /// i with C(3i, i-1) != 0 mod 3
    #[value(name = "3i")]
    ThreeI,
    /// the shifted window family entering the inverse's upper coefficients
    Shifted,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Everything a command run produces: exit code, the JSON document, the
/// human rendering of the same facts, and an optional CSV export.
#[derive(Debug)]
pub struct Report {
    pub code: i32,
    pub json: Value,
    pub human: String,
    pub csv: Option<(PathBuf, String)>,
}

impl Report {
    fn new(code: i32, json: Value, human: String) -> Report {
        Report {
            code,
            json,
            human,
            csv: None,
        }
    }
}

/// Entry point used by the binary: parse argv, run, print, return the code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    run(cli, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run(cli: Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    match execute(&cli) {
        Ok(report) => {
            if let Some((path, content)) = &report.csv {
                if path.as_os_str() == "-" {
                    // the CSV table replaces the report on stdout
                    let _ = out.write_all(content.as_bytes());
                    return report.code;
                }
                if let Err(e) = std::fs::write(path, content) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            let text = if cli.json {
                report.json.to_string()
            } else {
                report.human.clone()
            };
            let _ = writeln!(out, "{text}");
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotAPermutation
        | Error::CriterionFailed(_)
        | Error::NoClosedForm
        | Error::NoCosetCase
        | Error::NotABranchBijection { .. }
        | Error::ZeroConventionViolated
        | Error::FieldTooSmallForBranchInverse => 1,
        _ => 2,
    }
}

pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.cmd {
        Command::Field { spec } => field_cmd(spec),
        Command::Pp { action } => match action {
            PpAction::Analyze { spec, f0, f1 } => pp_analyze(spec, f0, f1),
            PpAction::Invert {
                spec,
                poly,
                f0,
                f1,
                method,
                csv,
            } => pp_invert(
                spec,
                poly.as_deref(),
                f0.as_deref(),
                f1.as_deref(),
                *method,
                csv,
            ),
        },
        Command::Dickson {
            spec,
            kind,
            index,
            a,
            invert,
            method,
            csv,
        } => dickson_cmd(spec, *kind, *index, a, *invert, *method, csv),
        Command::Cyclo { action } => match action {
            CycloAction::Check { params } => cyclo_check(params),
            CycloAction::Build { params } => cyclo_build(params),
            CycloAction::Invert {
                params,
                method,
                csv,
            } => cyclo_invert(params, *method, csv),
        },
        Command::Binom { action } => binom_cmd(action),
        Command::Selftest { level } => selftest(*level, cli.seed),
    }
}

// ---------------------------------------------------------------------------
// text formats

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

/// `p^n` or `p^n:c0,c1,...,cn`.
pub fn parse_field_spec(text: &str) -> Result<Arc<FieldCtx>> {
    let (dims, modulus_text) = match text.split_once(':') {
        Some((d, m)) => (d, Some(m)),
        None => (text, None),
    };
    let (p_text, n_text) = match dims.split_once('^') {
        Some((p, n)) => (p, n),
        None => (dims, "1"),
    };
    let p: u64 = p_text
        .trim()
        .parse()
        .map_err(|_| parse_err(0, format!("bad prime in field spec: {p_text:?}")))?;
    let n: usize = n_text.trim().parse().map_err(|_| {
        parse_err(
            p_text.len() + 1,
            format!("bad degree in field spec: {n_text:?}"),
        )
    })?;
    let modulus = match modulus_text {
        None => None,
        Some(m) => {
            let coeffs = m
                .split(',')
                .map(|c| {
                    c.trim().parse::<u64>().map_err(|_| {
                        parse_err(dims.len() + 1, format!("bad modulus coefficient {c:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Some(coeffs)
        }
    };
    match modulus {
        Some(m) => gf::field_with_modulus(p, n, &m),
        None => gf::field(p, n),
    }
}

/// Decimal index, `[c0,c1,...]`, or `g^k` / `g`.
pub fn parse_element(ctx: &Arc<FieldCtx>, text: &str) -> Result<FieldElement> {
    parse_element_at(ctx, text.trim(), 0)
}

fn parse_element_at(ctx: &Arc<FieldCtx>, t: &str, offset: usize) -> Result<FieldElement> {
    if t.is_empty() {
        return Err(parse_err(offset, "empty element literal"));
    }
    if let Some(rest) = t.strip_prefix('[') {
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| parse_err(offset, "unterminated coordinate list"))?;
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| parse_err(offset, format!("bad coordinate {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        return ctx.element_from_coeffs(&coords);
    }
    if let Some(rest) = t.strip_prefix('g') {
        if rest.is_empty() {
            return Ok(ctx.xi());
        }
        let k = rest
            .strip_prefix('^')
            .ok_or_else(|| parse_err(offset, format!("bad element literal {t:?}")))?
            .parse::<u64>()
            .map_err(|_| parse_err(offset, format!("bad exponent in {t:?}")))?;
        return Ok(ctx.pow(ctx.xi(), k));
    }
    let index = t
        .parse::<u64>()
        .map_err(|_| parse_err(offset, format!("bad element literal {t:?}")))?;
    ctx.element(index)
}

/// Polynomial expression parser; see the module docs for the grammar.
pub fn parse_poly(ctx: &Arc<FieldCtx>, text: &str) -> Result<Poly> {
    let bytes = text.as_bytes();
    let mut acc = Poly::zero(ctx);
    let mut pos = 0usize;
    let mut saw_term = false;

    loop {
        // skip whitespace
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        // sign
        let mut negative = false;
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                negative = true;
                pos += 1;
            }
            _ if saw_term => {
                return Err(parse_err(pos, "expected '+' or '-' between terms"));
            }
            _ => {}
        }
        // collect the term body up to the next top-level sign
        let term_start = pos;
        let mut depth = 0i32;
        let mut term = String::new();
        while pos < bytes.len() {
            let b = bytes[pos];
            match b {
                b'[' => depth += 1,
                b']' => depth -= 1,
                b'+' | b'-' if depth == 0 => break,
                _ => {}
            }
            if !b.is_ascii_whitespace() {
                term.push(b as char);
            }
            pos += 1;
        }
        if depth != 0 {
            return Err(parse_err(term_start, "unbalanced brackets"));
        }
        if term.is_empty() {
            return Err(parse_err(term_start, "empty term"));
        }
        let (mut coeff, exp) = parse_term(ctx, &term, term_start)?;
        if negative {
            coeff = ctx.neg(coeff);
        }
        acc = acc.add(&Poly::monomial(ctx, coeff, exp));
        saw_term = true;
    }
    if !saw_term {
        return Err(parse_err(0, "empty polynomial"));
    }
    Ok(acc)
}

/// One term without sign: `COEFF*XPART`, `XPART`, or `COEFF`.
fn parse_term(ctx: &Arc<FieldCtx>, term: &str, offset: usize) -> Result<(FieldElement, u64)> {
    if let Some((coeff_text, xpart)) = term.split_once('*') {
        let coeff = parse_element_at(ctx, coeff_text, offset)?;
        let exp = parse_xpart(xpart, offset + coeff_text.len() + 1)?;
        Ok((coeff, exp))
    } else if term.starts_with('x') {
        Ok((FieldElement::ONE, parse_xpart(term, offset)?))
    } else {
        Ok((parse_element_at(ctx, term, offset)?, 0))
    }
}

/// `x` or `x^EXP`.
fn parse_xpart(t: &str, offset: usize) -> Result<u64> {
    let rest = t
        .strip_prefix('x')
        .ok_or_else(|| parse_err(offset, format!("expected x-term, got {t:?}")))?;
    if rest.is_empty() {
        return Ok(1);
    }
    let exp_text = rest
        .strip_prefix('^')
        .ok_or_else(|| parse_err(offset, format!("malformed term {t:?}")))?;
    exp_text.parse::<u64>().map_err(|_| {
        parse_err(
            offset + 2,
            format!("exponent overflow or malformed: {exp_text:?}"),
        )
    })
}

/// Human rendering; parses back to the same canonical polynomial.
pub fn render_poly(f: &Poly) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// command handlers

fn field_json(ctx: &FieldCtx) -> Value {
    json!({
        "p": ctx.p(),
        "n": ctx.n(),
        "modulus": ctx.modulus(),
        "q": ctx.q(),
        "xi": ctx.xi().index(),
    })
}

fn field_human(ctx: &FieldCtx) -> String {
    format!(
        "field GF({}^{}): q = {}, modulus = {:?} (low degree first), xi = {}",
        ctx.p(),
        ctx.n(),
        ctx.q(),
        ctx.modulus(),
        ctx.xi().index()
    )
}

fn field_cmd(spec: &str) -> Result<Report> {
    let ctx = parse_field_spec(spec)?;
    let json = json!({ "field": field_json(&ctx) });
    Ok(Report::new(0, json, field_human(&ctx)))
}

fn case_name(case: CaseTag) -> &'static str {
    match case {
        CaseTag::SameCoset => "same",
        CaseTag::Swapped => "swapped",
        CaseTag::Neither => "none",
    }
}

/// The engine route: analyze, invert each branch, assemble.
fn engine_inverse(bpp: &BranchedPP, cls: &piecewise::CyclotomicClasses) -> Result<Poly> {
    let behavior = piecewise::analyze(bpp, cls);
    if !behavior.is_pp {
        return Err(Error::NotAPermutation);
    }
    if bpp.ctx().q() == 3 {
        return piecewise::assemble_inverse(
            bpp,
            &Poly::x(bpp.ctx()),
            &Poly::x(bpp.ctx()),
            &behavior,
            cls,
        );
    }
    let (t0, t1) = match behavior.case {
        CaseTag::SameCoset => (0, 1),
        CaseTag::Swapped => (1, 0),
        CaseTag::Neither => return Err(Error::NoCosetCase),
    };
    let g0 = piecewise::branch_inverse(bpp.f0(), 0, t0, cls, false)?;
    let g1 = piecewise::branch_inverse(bpp.f1(), 1, t1, cls, false)?;
    piecewise::assemble_inverse(bpp, &g0, &g1, &behavior, cls)
}

fn verify_inverse(f_table: &[FieldElement], g: &Poly) -> bool {
    f_table
        .iter()
        .enumerate()
        .all(|(c, &y)| g.eval(y).index() == c as u64)
}

fn csv_table(f_table: &[FieldElement], g: &Poly) -> String {
    let mut s = String::from("x,f(x),finv(f(x))\n");
    for (i, &y) in f_table.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", i, y.index(), g.eval(y).index()));
    }
    s
}

fn pp_analyze(spec: &str, f0_text: &str, f1_text: &str) -> Result<Report> {
    let ctx = parse_field_spec(spec)?;
    let cls = piecewise::classes(&ctx);
    let f0 = parse_poly(&ctx, f0_text)?;
    let f1 = parse_poly(&ctx, f1_text)?;
    let bpp = BranchedPP::new(f0, f1);
    let behavior = piecewise::analyze(&bpp, &cls);
    let inverse = if behavior.is_pp {
        engine_inverse(&bpp, &cls).ok()
    } else {
        None
    };
    let json = json!({
        "field": field_json(&ctx),
        "f0": bpp.f0().coeff_indices(),
        "f1": bpp.f1().coeff_indices(),
        "behavior": behavior,
        "is_pp": behavior.is_pp,
        "case": case_name(behavior.case),
        "inverse": inverse.as_ref().map(|g| g.coeff_indices()),
    });
    let mut human = format!(
        "{}\nis_pp: {}\ncase: {}\n",
        field_human(&ctx),
        behavior.is_pp,
        case_name(behavior.case)
    );
    human.push_str(&format!(
        "branch 0: injective = {}, zero-free = {}\nbranch 1: injective = {}, zero-free = {}\nimages disjoint: {}",
        behavior.injective[0],
        behavior.zero_free[0],
        behavior.injective[1],
        behavior.zero_free[1],
        behavior.images_disjoint
    ));
    if let Some(g) = &inverse {
        human.push_str(&format!("\ninverse: {}", render_poly(g)));
    }
    let code = if behavior.is_pp { 0 } else { 1 };
    Ok(Report::new(code, json, human))
}

fn pp_invert(
    spec: &str,
    poly: Option<&str>,
    f0: Option<&str>,
    f1: Option<&str>,
    method: Method,
    csv: &Option<PathBuf>,
) -> Result<Report> {
    let ctx = parse_field_spec(spec)?;
    let cls = piecewise::classes(&ctx);
    let bpp = match (poly, f0, f1) {
        (Some(p), None, None) => {
            let f = parse_poly(&ctx, p)?;
            BranchedPP::new(f.clone(), f)
        }
        (None, Some(a), Some(b)) => BranchedPP::new(parse_poly(&ctx, a)?, parse_poly(&ctx, b)?),
        _ => return Err(parse_err(0, "give either --poly, or both --f0 and --f1")),
    };
    let f = piecewise::branched_to_poly(&bpp)?;
    let f_table = f.value_table();

    let mut methods = serde_json::Map::new();
    let mut inverses: Vec<(&'static str, Poly)> = Vec::new();
    let run_method = |m: Method| -> Result<Poly> {
        match m {
            Method::Oracle => invert_permutation(&f),
            Method::Theorem2 => engine_inverse(&bpp, &cls),
            Method::ClosedForm => match dickson::hou_pp(&ctx) {
                Ok(hou) if f.equal_mod_qx(&hou) => dickson::hou_pp_inverse(&ctx),
                _ => Err(Error::NoClosedForm),
            },
            Method::All => unreachable!(),
        }
    };

    if method == Method::All {
        for (name, m) in [
            ("oracle", Method::Oracle),
            ("theorem2", Method::Theorem2),
            ("closed-form", Method::ClosedForm),
        ] {
            match run_method(m) {
                Ok(g) => {
                    methods.insert(name.into(), Value::from(g.coeff_indices()));
                    inverses.push((name, g));
                }
                Err(Error::NoClosedForm) | Err(Error::NoCosetCase) => {
                    methods.insert(name.into(), Value::Null);
                }
                Err(e) => return Err(e),
            }
        }
        if inverses.is_empty() {
            return Err(Error::NotAPermutation);
        }
    } else {
        let name = match method {
            Method::Oracle => "oracle",
            Method::Theorem2 => "theorem2",
            Method::ClosedForm => "closed-form",
            Method::All => unreachable!(),
        };
        let g = run_method(method)?;
        methods.insert(name.into(), Value::from(g.coeff_indices()));
        inverses.push((name, g));
    }

    let agreement = inverses.windows(2).all(|w| w[0].1 == w[1].1);
    let primary = &inverses[0].1;
    let verified = verify_inverse(&f_table, primary);
    let behavior = piecewise::analyze(&bpp, &cls);

    let json = json!({
        "field": field_json(&ctx),
        "poly": f.coeff_indices(),
        "is_pp": behavior.is_pp,
        "case": case_name(behavior.case),
        "methods": Value::Object(methods),
        "inverse": primary.coeff_indices(),
        "agreement": agreement,
        "verified": verified,
    });
    let mut human = format!(
        "{}\nf: {}\nis_pp: {}\ncase: {}\n",
        field_human(&ctx),
        render_poly(&f),
        behavior.is_pp,
        case_name(behavior.case)
    );
    for (name, g) in &inverses {
        human.push_str(&format!("inverse ({name}): {}\n", render_poly(g)));
    }
    human.push_str(&format!("agreement: {agreement}\nverified: {verified}"));

    let code = if agreement && verified { 0 } else { 1 };
    let mut report = Report::new(code, json, human);
    if let Some(path) = csv {
        report.csv = Some((path.clone(), csv_table(&f_table, primary)));
    }
    Ok(report)
}

fn dickson_cmd(
    spec: &str,
    kind: DicksonKind,
    index: u64,
    a_text: &str,
    invert: bool,
    method: Method,
    csv: &Option<PathBuf>,
) -> Result<Report> {
    let ctx = parse_field_spec(spec)?;
    let a = parse_element(&ctx, a_text)?;
    let dspec = DicksonSpec {
        index,
        param: a,
        reversed: kind == DicksonKind::Reversed,
    };
    let d = dickson::dickson_polynomial(&ctx, &dspec)?;
    let mut json = json!({
        "field": field_json(&ctx),
        "kind": match kind { DicksonKind::Plain => "plain", DicksonKind::Reversed => "reversed" },
        "index": index,
        "a": a.index(),
        "poly": d.coeff_indices(),
    });
    let mut human = format!(
        "{}\nD_{}({}) {}: {}",
        field_human(&ctx),
        index,
        a.index(),
        if dspec.reversed { "reversed" } else { "plain" },
        render_poly(&d)
    );
    let mut code = 0;
    let mut csv_out = None;

    if invert {
        let closed_applies = dspec.reversed
            && a == ctx.one()
            && index == dickson::reversed_dickson_index(&ctx)
            && ctx.p() == 3
            && ctx.n() % 2 == 0;
        let g = match method {
            Method::Oracle => invert_permutation(&d)?,
            Method::ClosedForm => {
                if closed_applies {
                    dickson::reversed_dickson_inverse(&ctx)?
                } else {
                    return Err(Error::NoClosedForm);
                }
            }
            Method::Theorem2 => return Err(Error::NoClosedForm),
            Method::All => {
                let oracle = invert_permutation(&d)?;
                if closed_applies {
                    let closed = dickson::reversed_dickson_inverse(&ctx)?;
                    if closed != oracle {
                        code = 1;
                    }
                    closed
                } else {
                    oracle
                }
            }
        };
        let table = d.value_table();
        let verified = verify_inverse(&table, &g);
        if !verified {
            code = 1;
        }
        json["inverse"] = Value::from(g.coeff_indices());
        json["verified"] = Value::from(verified);
        human.push_str(&format!(
            "\ninverse: {}\nverified: {verified}",
            render_poly(&g)
        ));
        if let Some(path) = csv {
            csv_out = Some((path.clone(), csv_table(&table, &g)));
        }
    }
    let mut report = Report::new(code, json, human);
    report.csv = csv_out;
    Ok(report)
}

fn build_family_params(args: &CycloParamArgs) -> Result<(Arc<FieldCtx>, FamilyParams)> {
    let ctx = parse_field_spec(&args.spec)?;
    let alpha = parse_element(&ctx, &args.alpha)?;
    let beta = parse_element(&ctx, &args.beta)?;
    let need = |opt: &Option<String>, name: &str| -> Result<FieldElement> {
        match opt {
            Some(text) => parse_element(&ctx, text),
            None => Err(parse_err(
                0,
                format!("--{name} is required for this family"),
            )),
        }
    };
    let need_t = || -> Result<u64> {
        args.t
            .ok_or_else(|| parse_err(0, "--t is required for this family"))
    };
    let params = match args.family {
        FamilyArg::L5 => FamilyParams::cubic_cubic(
            &ctx,
            alpha,
            beta,
            need(&args.gamma, "gamma")?,
            need(&args.theta, "theta")?,
        )?,
        FamilyArg::L6 => {
            FamilyParams::monomial_cubic(&ctx, alpha, beta, need(&args.theta, "theta")?, need_t()?)?
        }
        FamilyArg::L7 => {
            FamilyParams::cubic_monomial(&ctx, alpha, beta, need(&args.gamma, "gamma")?, need_t()?)?
        }
    };
    Ok((ctx, params))
}

fn family_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::L5 => "l5",
        FamilyArg::L6 => "l6",
        FamilyArg::L7 => "l7",
    }
}

fn cyclo_check(args: &CycloParamArgs) -> Result<Report> {
    let (ctx, params) = build_family_params(args)?;
    let verdict = cyclotomic::criterion(&params);
    let json = json!({
        "field": field_json(&ctx),
        "family": family_name(args.family),
        "criterion": verdict.holds,
        "reason": verdict.reason,
    });
    let human = format!(
        "{}\nfamily {}: criterion {}{}",
        field_human(&ctx),
        family_name(args.family),
        if verdict.holds { "holds" } else { "fails" },
        verdict
            .reason
            .as_deref()
            .map(|r| format!(" ({r})"))
            .unwrap_or_default()
    );
    Ok(Report::new(if verdict.holds { 0 } else { 1 }, json, human))
}

fn cyclo_build(args: &CycloParamArgs) -> Result<Report> {
    let (ctx, params) = build_family_params(args)?;
    let verdict = cyclotomic::criterion(&params);
    let cls = piecewise::classes(&ctx);
    let bpp = cyclotomic::branched_pp(&params);
    let behavior = piecewise::analyze(&bpp, &cls);
    let poly = piecewise::branched_to_poly(&bpp)?;
    let json = json!({
        "field": field_json(&ctx),
        "family": family_name(args.family),
        "criterion": verdict.holds,
        "reason": verdict.reason,
        "is_pp": behavior.is_pp,
        "case": case_name(behavior.case),
        "f0": bpp.f0().coeff_indices(),
        "f1": bpp.f1().coeff_indices(),
        "poly": poly.coeff_indices(),
    });
    let human = format!(
        "{}\nfamily {}: criterion {}{}\nis_pp: {}\nf: {}",
        field_human(&ctx),
        family_name(args.family),
        if verdict.holds { "holds" } else { "fails" },
        verdict
            .reason
            .as_deref()
            .map(|r| format!(" ({r})"))
            .unwrap_or_default(),
        behavior.is_pp,
        render_poly(&poly)
    );
    let code = if verdict.holds && behavior.is_pp {
        0
    } else {
        1
    };
    Ok(Report::new(code, json, human))
}

fn cyclo_invert(args: &CycloParamArgs, method: Method, csv: &Option<PathBuf>) -> Result<Report> {
    let (ctx, params) = build_family_params(args)?;
    let verdict = cyclotomic::criterion(&params);
    if !verdict.holds {
        return Err(Error::CriterionFailed(verdict.reason.unwrap_or_default()));
    }
    let cls = piecewise::classes(&ctx);
    let bpp = cyclotomic::branched_pp(&params);
    let f = piecewise::branched_to_poly(&bpp)?;
    let f_table = f.value_table();

    let mut methods = serde_json::Map::new();
    let mut inverses: Vec<(&'static str, Poly)> = Vec::new();
    let wanted: Vec<(&'static str, Method)> = match method {
        Method::All => vec![
            ("oracle", Method::Oracle),
            ("theorem2", Method::Theorem2),
            ("closed-form", Method::ClosedForm),
        ],
        Method::Oracle => vec![("oracle", Method::Oracle)],
        Method::Theorem2 => vec![("theorem2", Method::Theorem2)],
        Method::ClosedForm => vec![("closed-form", Method::ClosedForm)],
    };
    for (name, m) in wanted {
        let g = match m {
            Method::Oracle => invert_permutation(&f)?,
            Method::Theorem2 => engine_inverse(&bpp, &cls)?,
            Method::ClosedForm => cyclotomic::closed_form_inverse(&params)?,
            Method::All => unreachable!(),
        };
        methods.insert(name.into(), Value::from(g.coeff_indices()));
        inverses.push((name, g));
    }
    let agreement = inverses.windows(2).all(|w| w[0].1 == w[1].1);
    let primary = &inverses.last().unwrap().1;
    let verified = verify_inverse(&f_table, primary);

    let json = json!({
        "field": field_json(&ctx),
        "family": family_name(args.family),
        "criterion": true,
        "reason": Value::Null,
        "poly": f.coeff_indices(),
        "methods": Value::Object(methods),
        "inverse": primary.coeff_indices(),
        "agreement": agreement,
        "verified": verified,
    });
    let mut human = format!(
        "{}\nfamily {}: criterion holds\nf: {}\n",
        field_human(&ctx),
        family_name(args.family),
        render_poly(&f)
    );
    for (name, g) in &inverses {
        human.push_str(&format!("inverse ({name}): {}\n", render_poly(g)));
    }
    human.push_str(&format!("agreement: {agreement}\nverified: {verified}"));
    let code = if agreement && verified { 0 } else { 1 };
    let mut report = Report::new(code, json, human);
    if let Some(path) = csv {
        report.csv = Some((path.clone(), csv_table(&f_table, primary)));
    }
    Ok(report)
}

fn binom_cmd(action: &BinomAction) -> Result<Report> {
    match action {
        BinomAction::Coeff { m, k, p } => {
            let residue = binom::binom_mod_p_generalized(*m, *k, *p)?;
            let json = json!({ "m": m, "k": k, "p": p, "residue": residue });
            Ok(Report::new(
                0,
                json,
                format!("C({m}, {k}) mod {p} = {residue}"),
            ))
        }
        BinomAction::Support { family, n } => {
            let support: Vec<u64> = match family {
                SupportFamily::ThreeI => binom::binom_3i_support(*n).into_iter().collect(),
                SupportFamily::Shifted => binom::shifted_binom_support(*n).into_iter().collect(),
            };
            let name = match family {
                SupportFamily::ThreeI => "3i",
                SupportFamily::Shifted => "shifted",
            };
            let json = json!({ "family": name, "n": n, "support": support });
            Ok(Report::new(
                0,
                json,
                format!("support ({name}, n = {n}): {support:?}"),
            ))
        }
        BinomAction::Digits { m, p, len } => {
            let d = binom::digits(*m, *p, *len)?;
            let json = json!({ "m": m, "p": p, "digits": d.digits });
            Ok(Report::new(
                0,
                json,
                format!("digits of {m} base {p} (low first): {:?}", d.digits),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// selftest

struct Check {
    name: &'static str,
    pass: bool,
}

fn selftest(level: Level, seed: u64) -> Result<Report> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut checks: Vec<Check> = Vec::new();
    let mut push = |name: &'static str, pass: bool| checks.push(Check { name, pass });

    // field axioms, sampled
    {
        let mut ok = true;
        for (p, n) in [(3u64, 2usize), (3, 3)] {
            let ctx = gf::field(p, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..2000 {
                let a = ctx.element(rng.gen_range(0..ctx.q())).unwrap();
                let b = ctx.element(rng.gen_range(0..ctx.q())).unwrap();
                let c = ctx.element(rng.gen_range(0..ctx.q())).unwrap();
                ok &= ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c));
                ok &= ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c));
                if !a.is_zero() {
                    ok &= ctx.mul(a, ctx.inv(a).unwrap()) == ctx.one();
                }
            }
        }
        push("field axioms (GF(9), GF(27), sampled)", ok);
    }

    // coset power sums
    {
        let mut ok = true;
        for n in [2usize, 3] {
            let ctx = gf::field(3, n).unwrap();
            let cls = piecewise::classes(&ctx);
            let q = ctx.q();
            let half = ctx.inv(ctx.from_subfield(2)).unwrap();
            for s in 0..2 {
                for k in 1..=q - 1 {
                    let want = if k == q - 1 {
                        ctx.neg(half)
                    } else if k == (q - 1) / 2 {
                        if s == 0 {
                            ctx.neg(half)
                        } else {
                            half
                        }
                    } else {
                        ctx.zero()
                    };
                    ok &= piecewise::coset_power_sum(&cls, s, k).unwrap() == want;
                }
            }
        }
        push("coset power sums match the closed form (q = 9, 27)", ok);
    }

    // the cubic-branch permutation and its inverse, three routes
    {
        let mut ok = true;
        let sizes: &[usize] = match level {
            Level::Quick => &[2],
            Level::Full => &[2, 4],
        };
        for &n in sizes {
            let ctx = gf::field(3, n).unwrap();
            let cls = piecewise::classes(&ctx);
            let f = dickson::hou_pp(&ctx).unwrap();
            let closed = dickson::hou_pp_inverse(&ctx).unwrap();
            let oracle = invert_permutation(&f).unwrap();
            let (f0, f1) = dickson::hou_branches(&ctx).unwrap();
            let bpp = BranchedPP::new(f0, f1);
            let engine = engine_inverse(&bpp, &cls).unwrap();
            ok &= closed == oracle && engine == oracle;
            ok &= ctx.elements().all(|c| closed.eval(f.eval(c)) == c);
        }
        push(
            "cubic-branch permutation: all three inverse routes agree",
            ok,
        );
    }

    // reversed Dickson identities
    {
        let mut ok = true;
        let sizes: &[usize] = match level {
            Level::Quick => &[2],
            Level::Full => &[2, 4],
        };
        for &n in sizes {
            let ctx = gf::field(3, n).unwrap();
            let f = dickson::hou_pp(&ctx).unwrap();
            let d = dickson::dickson_polynomial(
                &ctx,
                &DicksonSpec {
                    index: dickson::reversed_dickson_index(&ctx),
                    param: ctx.one(),
                    reversed: true,
                },
            )
            .unwrap();
            ok &= ctx
                .elements()
                .all(|c| d.eval(c) == ctx.sub(f.eval(ctx.sub(ctx.one(), c)), ctx.one()));
            let dinv = dickson::reversed_dickson_inverse(&ctx).unwrap();
            ok &= ctx.elements().all(|c| dinv.eval(d.eval(c)) == c);
        }
        push("reversed Dickson shift identity and inverse", ok);
    }

    // family criteria against exhaustive permutation checks
    {
        let sizes: &[usize] = match level {
            Level::Quick => &[2],
            Level::Full => &[2, 3],
        };
        let mut ok = true;
        for &n in sizes {
            let ctx = gf::field(3, n).unwrap();
            let cls = piecewise::classes(&ctx);
            let els: Vec<_> = ctx.elements().filter(|e| !e.is_zero()).collect();
            let m = (ctx.q() - 1) / 2;
            for &alpha in &els {
                for &beta in &els {
                    for &gamma in &els {
                        for &theta in &els {
                            let p =
                                FamilyParams::cubic_cubic(&ctx, alpha, beta, gamma, theta).unwrap();
                            ok &= cyclotomic::criterion(&p).holds
                                == piecewise::analyze(&cyclotomic::branched_pp(&p), &cls).is_pp;
                        }
                    }
                }
            }
            for t in 1..m {
                for &alpha in &els {
                    for &beta in &els {
                        for &x in &els {
                            let p = FamilyParams::monomial_cubic(&ctx, alpha, beta, x, t).unwrap();
                            ok &= cyclotomic::criterion(&p).holds
                                == piecewise::analyze(&cyclotomic::branched_pp(&p), &cls).is_pp;
                            let p = FamilyParams::cubic_monomial(&ctx, alpha, beta, x, t).unwrap();
                            ok &= cyclotomic::criterion(&p).holds
                                == piecewise::analyze(&cyclotomic::branched_pp(&p), &cls).is_pp;
                        }
                    }
                }
            }
        }
        push("family criteria match exhaustive permutation tests", ok);
    }

    // family closed-form inverses against brute force
    {
        let mut ok = true;
        let ctx = gf::field(3, 2).unwrap();
        let els: Vec<_> = ctx.elements().filter(|e| !e.is_zero()).collect();
        for &alpha in &els {
            for &beta in &els {
                for &gamma in &els {
                    for &theta in &els {
                        let p = FamilyParams::cubic_cubic(&ctx, alpha, beta, gamma, theta).unwrap();
                        if !cyclotomic::criterion(&p).holds {
                            continue;
                        }
                        let f = piecewise::branched_to_poly(&cyclotomic::branched_pp(&p)).unwrap();
                        ok &= cyclotomic::closed_form_inverse(&p).unwrap()
                            == invert_permutation(&f).unwrap();
                    }
                }
            }
        }
        push("family closed-form inverses match brute force (GF(9))", ok);
    }

    // Lucas digits against Pascal rows
    {
        let rows = match level {
            Level::Quick => 121,
            Level::Full => 501,
        };
        let mut ok = true;
        for p in [3u64, 5, 7] {
            let mut tri: Vec<Vec<u64>> = Vec::with_capacity(rows);
            for m in 0..rows {
                let mut row = vec![1u64; m + 1];
                for k in 1..m {
                    row[k] = (tri[m - 1][k - 1] + tri[m - 1][k]) % p;
                }
                tri.push(row);
            }
            for m in 0..rows {
                for k in 0..=m {
                    ok &= binom::binom_mod_p(m as u64, k as u64, p).unwrap() == tri[m][k];
                }
            }
        }
        push("digit-product binomials match the Pascal oracle", ok);
    }

    // binomial support predictions
    {
        let max_n = match level {
            Level::Quick => 4,
            Level::Full => 6,
        };
        let mut ok = true;
        for n in 1..=max_n {
            let brute: std::collections::BTreeSet<u64> = (1..binom::pow3(n))
                .filter(|&i| binom::binom_mod_p(3 * i, i - 1, 3).unwrap() != 0)
                .collect();
            ok &= binom::binom_3i_support(n) == brute;
            if n <= 5 {
                let lo = (binom::pow3(n) + 1) / 2;
                let hi = (5 * binom::pow3(n) - 3) / 6;
                let shift = (binom::pow3(n) - 1) / 2;
                let brute: std::collections::BTreeSet<u64> = (lo..=hi)
                    .filter(|&i| binom::binom_mod_p(3 * i - shift, i - lo, 3).unwrap() != 0)
                    .collect();
                ok &= binom::shifted_binom_support(n) == brute;
            }
        }
        push("binomial support predictions match enumeration", ok);
    }

    if level == Level::Full {
        // pointwise inverse at q = 729
        let ctx = gf::field(3, 6).unwrap();
        let f = dickson::hou_pp(&ctx).unwrap();
        let g = dickson::hou_pp_inverse(&ctx).unwrap();
        let ok = ctx.elements().all(|c| g.eval(f.eval(c)) == c);
        push("cubic-branch inverse pointwise on GF(729)", ok);

        // sampled closed-form inverses at q = 81
        let ctx = gf::field(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let els: Vec<_> = ctx.elements().filter(|e| !e.is_zero()).collect();
        let m = (ctx.q() - 1) / 2;
        let mut ok = true;
        let mut done = 0;
        while done < 60 {
            let pick = |rng: &mut ChaCha8Rng| els[rng.gen_range(0..els.len())];
            let fam = done % 3;
            let (alpha, beta, x) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let t = rng.gen_range(1..m);
            let params = match fam {
                0 => FamilyParams::cubic_cubic(&ctx, alpha, beta, x, pick(&mut rng)).unwrap(),
                1 => FamilyParams::monomial_cubic(&ctx, alpha, beta, x, t).unwrap(),
                _ => FamilyParams::cubic_monomial(&ctx, alpha, beta, x, t).unwrap(),
            };
            if !cyclotomic::criterion(&params).holds {
                continue;
            }
            let f = piecewise::branched_to_poly(&cyclotomic::branched_pp(&params)).unwrap();
            ok &= cyclotomic::closed_form_inverse(&params).unwrap()
                == invert_permutation(&f).unwrap();
            done += 1;
        }
        push(
            "family closed-form inverses match brute force (GF(81), sampled)",
            ok,
        );
    }

    let passed = checks.iter().all(|c| c.pass);
    let json = json!({
        "level": match level { Level::Quick => "quick", Level::Full => "full" },
        "seed": seed,
        "checks": checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass })).collect::<Vec<_>>(),
        "passed": passed,
    });
    let mut human = String::new();
    for c in &checks {
        human.push_str(&format!(
            "{} {}\n",
            if c.pass { "ok  " } else { "FAIL" },
            c.name
        ));
    }
    human.push_str(if passed {
        "all checks passed"
    } else {
        "FAILURES"
    });
    Ok(Report::new(if passed { 0 } else { 1 }, json, human))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exec(args: &[&str]) -> (i32, Value) {
        let cli = Cli::try_parse_from(args).expect("argv parses");
        let report = execute(&cli).unwrap();
        (report.code, report.json)
    }

    fn exec_err(args: &[&str]) -> Error {
        let cli = Cli::try_parse_from(args).expect("argv parses");
        execute(&cli).unwrap_err()
    }

    #[test]
    fn field_spec_parsing() {
        let f9 = parse_field_spec("3^2").unwrap();
        assert_eq!(f9.q(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let f9b = parse_field_spec("3^2:1,0,1").unwrap();
        assert_eq!(f9b.modulus(), &[1, 0, 1]);
        let f3 = parse_field_spec("3").unwrap();
        assert_eq!(f3.q(), 3);
        assert!(parse_field_spec("4^2").is_err());
        assert!(parse_field_spec("3^x").is_err());
        assert!(matches!(
            parse_field_spec("3^2:2,0,1").unwrap_err(),
            Error::ReducibleModulus { .. }
        ));
    }

    #[test]
    fn element_literals() {
        let ctx = parse_field_spec("3^2").unwrap();
        assert_eq!(parse_element(&ctx, "7").unwrap().index(), 7);
        assert_eq!(parse_element(&ctx, "[1,2]").unwrap().index(), 7);
        assert_eq!(parse_element(&ctx, "[1]").unwrap().index(), 1);
        assert_eq!(parse_element(&ctx, "g").unwrap(), ctx.xi());
        // xi^4 = -1 since xi has order 8
        assert_eq!(parse_element(&ctx, "g^4").unwrap(), ctx.neg(ctx.one()));
        assert!(parse_element(&ctx, "9").is_err());
        assert!(parse_element(&ctx, "[1,2,3]").is_err());
        assert!(parse_element(&ctx, "h").is_err());
        assert!(parse_element(&ctx, "").is_err());
    }

    #[test]
    fn poly_expressions() {
        let ctx = parse_field_spec("3^2").unwrap();
        let f = parse_poly(&ctx, "x^3 + 2*x + 1").unwrap();
        assert_eq!(f.coeff_indices(), vec![1, 2, 0, 1]);
        // exponent folding
        let f = parse_poly(&ctx, "x^9").unwrap();
        assert_eq!(f.coeff_indices(), vec![0, 1]);
        // subtraction and accumulation
        let f = parse_poly(&ctx, "x - x").unwrap();
        assert!(f.is_zero());
        let f = parse_poly(&ctx, "-x + 2*x^2").unwrap();
        assert_eq!(f.coeff_indices(), vec![0, 2, 2]);
        // coordinate and generator coefficients
        let f = parse_poly(&ctx, "[1,1]*x^2 + g^4").unwrap();
        assert_eq!(f.coeff_indices(), vec![2, 0, 4]);
        // constant
        let f = parse_poly(&ctx, "7").unwrap();
        assert_eq!(f.coeff_indices(), vec![7]);
    }

    #[test]
    fn poly_parse_errors_carry_positions() {
        let ctx = parse_field_spec("3^2").unwrap();
        assert!(matches!(
            parse_poly(&ctx, "").unwrap_err(),
            Error::Parse { .. }
        ));
        match parse_poly(&ctx, "x^").unwrap_err() {
            Error::Parse { pos, .. } => assert!(pos <= 2),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_poly(&ctx, "x^99999999999999999999").is_err());
        assert!(parse_poly(&ctx, "x x").is_err());
        assert!(parse_poly(&ctx, "[1,2*x").is_err());
        assert!(parse_poly(&ctx, "9*x").is_err());
    }

    #[test]
    fn render_parse_round_trip() {
        for spec in ["3^2", "3^4"] {
            let ctx = parse_field_spec(spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            for _ in 0..40 {
                let len = rng.gen_range(0..ctx.q() as usize);
                let coeffs: Vec<_> = (0..len)
                    .map(|_| ctx.element(rng.gen_range(0..ctx.q())).unwrap())
                    .collect();
                let f = Poly::from_coeffs(&ctx, coeffs);
                let back = parse_poly(&ctx, &render_poly(&f)).unwrap();
                assert_eq!(back, f);
            }
        }
    }

    #[test]
    fn field_command_reports_modulus() {
        let (code, json) = exec(&["ppinv", "field", "--spec", "3^2"]);
        assert_eq!(code, 0);
        assert_eq!(json["field"]["q"], 9);
        assert_eq!(json["field"]["modulus"], json!([1, 0, 1]));
        assert_eq!(json["field"]["xi"], 4);
    }

    #[test]
    fn pp_analyze_reports_behavior_and_inverse() {
        let (code, json) = exec(&[
            "ppinv",
            "pp",
            "analyze",
            "--spec",
            "3^2",
            "--f0",
            "2*x^3",
            "--f1",
            "x^3 + 2*x^2 + x",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["is_pp"], true);
        assert_eq!(json["case"], "same");
        assert_eq!(json["inverse"], json!([0, 2, 2, 0, 0, 1, 1, 2]));

        let (code, json) = exec(&[
            "ppinv", "pp", "analyze", "--spec", "3^2", "--f0", "x^2", "--f1", "x",
        ]);
        assert_eq!(code, 1);
        assert_eq!(json["is_pp"], false);
        assert_eq!(json["inverse"], Value::Null);
    }

    #[test]
    fn pp_invert_methods_agree_on_the_cubic_pp() {
        let hou = "x^5 - x^6 - x^7 - x + x^2";
        let (code, json) = exec(&[
            "ppinv", "pp", "invert", "--spec", "3^2", "--poly", hou, "--method", "all",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["agreement"], true);
        assert_eq!(json["verified"], true);
        assert_eq!(json["inverse"], json!([0, 2, 2, 0, 0, 1, 1, 2]));
        assert_eq!(json["methods"]["oracle"], json!([0, 2, 2, 0, 0, 1, 1, 2]));
        assert_eq!(
            json["methods"]["closed-form"],
            json!([0, 2, 2, 0, 0, 1, 1, 2])
        );

        // closed form alone
        let (code, json) = exec(&[
            "ppinv",
            "pp",
            "invert",
            "--spec",
            "3^2",
            "--poly",
            hou,
            "--method",
            "closed-form",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["inverse"], json!([0, 2, 2, 0, 0, 1, 1, 2]));
    }

    #[test]
    fn pp_invert_rejects_non_permutations_and_unknown_closed_forms() {
        let e = exec_err(&["ppinv", "pp", "invert", "--spec", "3^2", "--poly", "x^2"]);
        assert_eq!(e, Error::NotAPermutation);
        assert_eq!(exit_code_for(&e), 1);

        let e = exec_err(&[
            "ppinv",
            "pp",
            "invert",
            "--spec",
            "3^2",
            "--poly",
            "x^3",
            "--method",
            "closed-form",
        ]);
        assert_eq!(e, Error::NoClosedForm);
        assert_eq!(exit_code_for(&e), 1);

        let e = exec_err(&["ppinv", "pp", "invert", "--spec", "3^2"]);
        assert!(matches!(e, Error::Parse { .. }));
        assert_eq!(exit_code_for(&e), 2);
    }

    #[test]
    fn dickson_command_builds_and_inverts() {
        let (code, json) = exec(&[
            "ppinv", "dickson", "--spec", "3^2", "--kind", "reversed", "--index", "14", "--a", "1",
            "--invert",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["poly"], json!([1, 1, 2, 0, 0, 2, 1, 1]));
        assert_eq!(json["verified"], true);

        // plain Dickson of small index: D_2(x, a) = x^2 - 2a = x^2 + a
        let (code, json) = exec(&[
            "ppinv", "dickson", "--spec", "3^2", "--kind", "plain", "--index", "2", "--a", "4",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["poly"], json!([4, 0, 1]));
    }

    #[test]
    fn cyclo_check_build_invert() {
        // gamma must be a non-square; 2 = -1 is a square in GF(9) since n is even
        let (code, json) = exec(&[
            "ppinv", "cyclo", "check", "--spec", "3^2", "--family", "l5", "--alpha", "1", "--beta",
            "1", "--gamma", "2", "--theta", "1",
        ]);
        assert_eq!(code, 1);
        assert_eq!(json["criterion"], false);
        assert_eq!(json["reason"], "η(γ) ≠ -1");

        let (code, json) = exec(&[
            "ppinv", "cyclo", "check", "--spec", "3^2", "--family", "l5", "--alpha", "1", "--beta",
            "1", "--gamma", "g", "--theta", "1",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["criterion"], true);

        let (code, json) = exec(&[
            "ppinv", "cyclo", "build", "--spec", "3^2", "--family", "l6", "--alpha", "1", "--beta",
            "1", "--theta", "1", "--t", "1",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["is_pp"], true);

        let (code, json) = exec(&[
            "ppinv", "cyclo", "invert", "--spec", "3^2", "--family", "l5", "--alpha", "1",
            "--beta", "1", "--gamma", "g", "--theta", "1", "--method", "all",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["agreement"], true);
        assert_eq!(json["verified"], true);

        let e = exec_err(&[
            "ppinv", "cyclo", "invert", "--spec", "3^2", "--family", "l5", "--alpha", "1",
            "--beta", "1", "--gamma", "2", "--theta", "1",
        ]);
        assert!(matches!(e, Error::CriterionFailed(_)));

        let e = exec_err(&[
            "ppinv", "cyclo", "check", "--spec", "3^2", "--family", "l5", "--alpha", "1", "--beta",
            "1", "--gamma", "g",
        ]);
        assert!(matches!(e, Error::Parse { .. }));
    }

    #[test]
    fn binom_commands() {
        let (code, json) = exec(&[
            "ppinv", "binom", "coeff", "--m", "12", "--k", "3", "--p", "3",
        ]);
        assert_eq!(code, 0);
        assert_eq!(json["residue"], 1);

        let (_, json) = exec(&[
            "ppinv", "binom", "coeff", "--m", "-1", "--k", "3", "--p", "3",
        ]);
        assert_eq!(json["residue"], 2);

        let (_, json) = exec(&["ppinv", "binom", "support", "--family", "3i", "--n", "2"]);
        assert_eq!(json["support"], json!([1, 4]));
        let (_, json) = exec(&[
            "ppinv", "binom", "support", "--family", "shifted", "--n", "2",
        ]);
        assert_eq!(json["support"], json!([5, 6, 7]));

        let (_, json) = exec(&["ppinv", "binom", "digits", "--m", "4", "--p", "3"]);
        assert_eq!(json["digits"], json!([1, 1]));

        let e = exec_err(&[
            "ppinv", "binom", "coeff", "--m", "5", "--k", "2", "--p", "4",
        ]);
        assert_eq!(e, Error::NotPrime(4));
    }

    #[test]
    fn selftest_quick_passes() {
        let (code, json) = exec(&["ppinv", "selftest", "--level", "quick"]);
        assert_eq!(code, 0);
        assert_eq!(json["passed"], true);
        assert!(json["checks"].as_array().unwrap().len() >= 6);
    }

    #[test]
    fn csv_export_writes_the_value_table() {
        let dir = std::env::temp_dir().join("ppinv-csv-test");
        let _ = std::fs::create_dir_all(&dir);
        let path = dir.join("table.csv");
        let cli = Cli::try_parse_from([
            "ppinv",
            "cyclo",
            "invert",
            "--spec",
            "3^2",
            "--family",
            "l6",
            "--alpha",
            "1",
            "--beta",
            "1",
            "--theta",
            "1",
            "--t",
            "1",
            "--csv",
            path.to_str().unwrap(),
        ])
        .unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(cli, &mut out, &mut err);
        assert_eq!(code, 0, "stderr: {}", String::from_utf8_lossy(&err));
        let content = std::fs::read_to_string(&path).unwrap();
        let mut lines = content.lines();
        assert_eq!(lines.next(), Some("x,f(x),finv(f(x))"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 9);
        for (i, row) in rows.iter().enumerate() {
            let cols: Vec<u64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[0], i as u64);
            assert_eq!(cols[2], i as u64, "finv(f(x)) must return x");
        }
        let _ = std::fs::remove_file(&path);
    }

    #[test]
    fn json_flag_emits_single_document() {
        let cli = Cli::try_parse_from(["ppinv", "--json", "field", "--spec", "3^2"]).unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(cli, &mut out, &mut err);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["field"]["p"], 3);
    }

    #[test]
    fn run_reports_errors_on_stderr_with_exit_2() {
        let cli = Cli::try_parse_from(["ppinv", "field", "--spec", "3^2:2,0,1"]).unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(cli, &mut out, &mut err);
        assert_eq!(code, 2);
        assert!(String::from_utf8_lossy(&err).contains("reducible"));
        assert!(out.is_empty());
    }
}

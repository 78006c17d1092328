//! The `vfspan` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors and unreadable input,
//! 2 when a verification or table check fails.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::bounds::{full_residue, prop_other_closed, report, thm_bnd_closed};
use crate::dyadic::{adams_v, nu};
use crate::error::{Error, Result};
use crate::laurent::{
    f0_closed_form, f_series, f_system, rational_eq, rewrite_iterative, satisfies, stable_measure,
    LaurentPoly, RationalFn,
};
use crate::obstruction::{
    best_bound_scan, certify_with_rule, default_s_max, scan_all, verify, Certificate,
    CertifyOutcome, Verification,
};
use crate::qmodule::VanishingRule;
use crate::table1::{compute_row, Family, HEADER, REFERENCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

/// `bounds` stops scanning here unless told otherwise. Without a cap,
/// factors like `P^3` push the scan range to about `m / 2`.
pub const DEFAULT_SCAN_LIMIT: u64 = 400;

#[derive(Debug, Parser)]
#[command(
    name = "vfspan",
    version,
    about = "Bounds on the number of independent vector fields on P^m x P^n"
)]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on stdout; rely on the exit code.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Adams vector-field number V(n).
    V { n: u64 },
    /// All known bounds for span(P^m x P^n).
    Bounds {
        m: u64,
        n: u64,
        /// Largest s' tried by the obstruction scan.
        #[arg(long, default_value_t = DEFAULT_SCAN_LIMIT)]
        scan_limit: u64,
        #[arg(long, default_value_t)]
        rule: VanishingRule,
    },
    /// Test the obstruction sum for (M, N, s') and emit a certificate.
    Certify {
        #[arg(value_name = "M")]
        big_m: u64,
        #[arg(value_name = "N")]
        big_n: u64,
        #[arg(value_name = "S_PRIME")]
        s_prime: u64,
        /// Write the certificate to this file.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t)]
        rule: VanishingRule,
    },
    /// Replay a certificate document ("-" reads stdin).
    Verify { file: PathBuf },
    /// Find the smallest certified bound for (M, N) over a range of s'.
    Scan {
        #[arg(value_name = "M")]
        big_m: u64,
        #[arg(value_name = "N")]
        big_n: u64,
        #[arg(long, default_value_t = 3)]
        s_min: u64,
        /// Defaults to where the Stiefel-Whitney bound takes over.
        #[arg(long)]
        s_max: Option<u64>,
        /// Report every s' instead of stopping at the first certificate.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t)]
        rule: VanishingRule,
    },
    /// Closed-form bounds for span(P^{2M-1} x P^{2N-1}) from the 2-exponents of M and N.
    ClosedForm {
        #[arg(value_name = "M")]
        big_m: u64,
        #[arg(value_name = "N")]
        big_n: u64,
    },
    /// Bounds for span(P^m x P^111), m = 2^e-1 or 3*2^e-1, 5 <= e <= 17.
    Table1 {
        /// Compare against the published values; exit 2 on any difference.
        #[arg(long)]
        check: bool,
        /// 1 for m = 2^e-1, 3 for m = 3*2^e-1; both when omitted.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["1", "3"]))]
        family: Option<String>,
        #[arg(long, default_value_t)]
        rule: VanishingRule,
    },
    /// The series f0, f1, f2 with v_i = v3 f_i.
    Fseries {
        /// Check the defining equations, the closed form of f0 and the rewriter.
        #[arg(long)]
        verify: bool,
        /// Measure cutoff for the rewriter cross-check.
        #[arg(long, default_value_t = -20, allow_negative_numbers = true)]
        cutoff: i64,
    },
}

struct Ctx<'a> {
    json: bool,
    quiet: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn text(&mut self, s: impl std::fmt::Display) -> Result<()> {
        if !self.quiet && !self.json {
            writeln!(self.out, "{s}")?;
        }
        Ok(())
    }

    fn json(&mut self, v: serde_json::Value) -> Result<()> {
        if !self.quiet && self.json {
            writeln!(self.out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Ok(())
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        quiet: cli.quiet,
        out,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Parse(_) | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_CHECK,
            }
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Result<i32> {
    match command {
        Command::V { n } => cmd_v(n, ctx),
        Command::Bounds {
            m,
            n,
            scan_limit,
            rule,
        } => cmd_bounds(m, n, scan_limit, rule, ctx),
        Command::Certify {
            big_m,
            big_n,
            s_prime,
            out,
            rule,
        } => cmd_certify(big_m, big_n, s_prime, out, rule, ctx),
        Command::Verify { file } => cmd_verify(file, ctx),
        Command::Scan {
            big_m,
            big_n,
            s_min,
            s_max,
            all,
            rule,
        } => cmd_scan(big_m, big_n, s_min, s_max, all, rule, ctx),
        Command::ClosedForm { big_m, big_n } => cmd_closed_form(big_m, big_n, ctx),
        Command::Table1 {
            check,
            family,
            rule,
        } => cmd_table1(check, family.as_deref(), rule, ctx),
        Command::Fseries { verify, cutoff } => cmd_fseries(verify, cutoff, ctx),
    }
}

fn positive(name: &str, x: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be positive")));
    }
    Ok(())
}

fn cmd_v(n: u64, ctx: &mut Ctx) -> Result<i32> {
    if n == u64::MAX {
        return Err(Error::InvalidArgument("n + 1 overflows".into()));
    }
    let a = adams_v(n);
    ctx.text(a.value)?;
    ctx.json(serde_json::to_value(a)?)?;
    Ok(EXIT_OK)
}

fn cmd_bounds(m: u64, n: u64, scan_limit: u64, rule: VanishingRule, ctx: &mut Ctx) -> Result<i32> {
    positive("m", m)?;
    positive("n", n)?;
    let r = report(m, n, Some(scan_limit), rule)?;
    ctx.text(&r)?;
    ctx.json(serde_json::to_value(&r)?)?;
    Ok(EXIT_OK)
}

fn inconclusive_json(outcome: &CertifyOutcome) -> serde_json::Value {
    match outcome {
        CertifyOutcome::Certified(c) => serde_json::to_value(c).expect("certificate serializes"),
        CertifyOutcome::Inconclusive(reason) => json!({ "inconclusive": reason }),
    }
}

fn cmd_certify(
    big_m: u64,
    big_n: u64,
    s_prime: u64,
    out: Option<PathBuf>,
    rule: VanishingRule,
    ctx: &mut Ctx,
) -> Result<i32> {
    let outcome = certify_with_rule(big_m, big_n, s_prime, rule)?;
    if let (Some(path), CertifyOutcome::Certified(c)) = (&out, &outcome) {
        std::fs::write(path, c.to_json() + "\n")?;
    }
    match &outcome {
        CertifyOutcome::Certified(c) => ctx.text(c)?,
        CertifyOutcome::Inconclusive(reason) => ctx.text(format_args!("inconclusive: {reason}"))?,
    }
    ctx.json(inconclusive_json(&outcome))?;
    Ok(EXIT_OK)
}

fn read_input(file: &PathBuf) -> Result<String> {
    if file.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(file)?)
    }
}

fn cmd_verify(file: PathBuf, ctx: &mut Ctx) -> Result<i32> {
    let cert = Certificate::from_json(&read_input(&file)?)?;
    let result = verify(&cert);
    ctx.text(&result)?;
    match &result {
        Verification::Match => ctx.json(json!({ "result": "MATCH" }))?,
        Verification::Mismatch(why) => ctx.json(json!({ "result": "MISMATCH", "reason": why }))?,
    }
    Ok(if result.is_match() {
        EXIT_OK
    } else {
        EXIT_CHECK
    })
}

fn cmd_scan(
    big_m: u64,
    big_n: u64,
    s_min: u64,
    s_max: Option<u64>,
    all: bool,
    rule: VanishingRule,
    ctx: &mut Ctx,
) -> Result<i32> {
    if big_m < 2 || big_n < 2 {
        return Err(Error::InvalidArgument("need M, N >= 2".into()));
    }
    let s_max = s_max.unwrap_or_else(|| default_s_max(big_m, big_n));
    if all {
        let outcomes = scan_all(big_m, big_n, s_min, s_max, rule)?;
        for (s, o) in &outcomes {
            match o {
                CertifyOutcome::Certified(c) => ctx.text(format_args!(
                    "s'={s:<4} bound {:<5} {}",
                    c.bound(),
                    c.leading()
                ))?,
                CertifyOutcome::Inconclusive(r) => ctx.text(format_args!("s'={s:<4} {r}"))?,
            }
        }
        let rows: Vec<_> = outcomes
            .iter()
            .map(|(s, o)| json!({ "sPrime": s, "outcome": inconclusive_json(o) }))
            .collect();
        ctx.json(json!(rows))?;
        return Ok(EXIT_OK);
    }
    match best_bound_scan(big_m, big_n, s_min, s_max, rule)? {
        Some(c) => {
            ctx.text(&c)?;
            ctx.json(serde_json::to_value(&c)?)?;
        }
        None => {
            ctx.text(format_args!("no certificate for s' in {s_min}..={s_max}"))?;
            ctx.json(serde_json::Value::Null)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_closed_form(big_m: u64, big_n: u64, ctx: &mut Ctx) -> Result<i32> {
    positive("M", big_m)?;
    positive("N", big_n)?;
    let (r, t) = (
        nu(big_m).finite().expect("M > 0"),
        nu(big_n).finite().expect("N > 0"),
    );
    let thm = thm_bnd_closed(r, t);
    let prop = prop_other_closed(r, t, Some(full_residue(big_n)));
    ctx.text(format_args!(
        "span(P^{} x P^{}), r={r}, t={t}",
        2 * big_m - 1,
        2 * big_n - 1
    ))?;
    for (label, hit) in [("2-exponents", thm), ("residues", prop)] {
        match hit {
            Some((b, p)) => ctx.text(format_args!(
                "  {label:<12} <= {b} ({}, e={}, k={})",
                p.case_id, p.e, p.k
            ))?,
            None => ctx.text(format_args!("  {label:<12} does not apply"))?,
        }
    }
    let pack = |hit: Option<(u64, crate::bounds::CaseParams)>| {
        hit.map(|(bound, params)| json!({ "bound": bound, "params": params }))
    };
    ctx.json(json!({ "r": r, "t": t, "byExponents": pack(thm), "byResidues": pack(prop) }))?;
    Ok(EXIT_OK)
}

fn cmd_table1(
    check: bool,
    family: Option<&str>,
    rule: VanishingRule,
    ctx: &mut Ctx,
) -> Result<i32> {
    let families = match family {
        Some(f) => {
            vec![Family::from_multiplier(f.parse().map_err(|_| {
                Error::InvalidArgument(format!("bad family {f}"))
            })?)?]
        }
        None => vec![Family::PowerOfTwo, Family::ThreeTimes],
    };
    let mut failures = Vec::new();
    let mut all_rows = Vec::new();
    for family in families {
        ctx.text(format_args!("m = {}*2^e - 1, n = 111", family.multiplier()))?;
        ctx.text(HEADER)?;
        for reference in &REFERENCE {
            let row = compute_row(reference.e, family, rule)?;
            let mismatches = row.mismatches();
            if check && !mismatches.is_empty() {
                let detail: Vec<String> = mismatches
                    .iter()
                    .map(|(col, got, want)| {
                        let got = got.map_or("-".into(), |g| g.to_string());
                        format!("{col} {got} (published {want})")
                    })
                    .collect();
                failures.push(format!(
                    "family {} e={}: {}",
                    family.multiplier(),
                    row.e,
                    detail.join(", ")
                ));
                ctx.text(format_args!("{row}   <- differs"))?;
            } else {
                ctx.text(&row)?;
            }
            all_rows.push(row);
        }
    }
    if check {
        for f in &failures {
            ctx.text(format_args!("MISMATCH {f}"))?;
        }
        if failures.is_empty() {
            ctx.text("table matches the published values")?;
        }
    }
    ctx.json(json!({ "rows": all_rows, "mismatches": failures }))?;
    Ok(if check && !failures.is_empty() {
        EXIT_CHECK
    } else {
        EXIT_OK
    })
}

fn poly_json(p: &LaurentPoly) -> serde_json::Value {
    json!(p.terms().map(|e| e.0).collect::<Vec<_>>())
}

fn rational_json(f: &RationalFn) -> serde_json::Value {
    json!({ "num": poly_json(f.num()), "den": poly_json(f.den()) })
}

fn cmd_fseries(check: bool, cutoff: i64, ctx: &mut Ctx) -> Result<i32> {
    let f = f_series()?;
    let closed = f0_closed_form();
    let f0_is_closed = rational_eq(&f[0], &RationalFn::from_poly(closed.clone()));
    if f0_is_closed {
        ctx.text(format_args!("f0 = {closed}"))?;
    } else {
        ctx.text(format_args!("f0 = {}", f[0]))?;
    }
    ctx.text(format_args!("f1 = {}", f[1]))?;
    ctx.text(format_args!("f2 = {}", f[2]))?;

    let mut doc = json!({
        "f0": rational_json(&f[0]),
        "f1": rational_json(&f[1]),
        "f2": rational_json(&f[2]),
        "f0Polynomial": if f0_is_closed { poly_json(&closed) } else { serde_json::Value::Null },
    });
    let mut ok = true;
    if check {
        let (m, rhs) = f_system();
        let equations = satisfies(&m, &rhs, &f);
        let rewrite = rewrite_iterative(0, cutoff)?;
        let expected = closed.filter(|e| stable_measure(e) >= cutoff);
        let rewriter = rewrite.stable == expected;
        ctx.text(format_args!("equations hold:        {equations}"))?;
        ctx.text(format_args!("f0 equals closed form: {f0_is_closed}"))?;
        ctx.text(format_args!(
            "rewriter (cutoff {cutoff}): {rewriter} ({} stable monomials, {} steps)",
            rewrite.stable.len(),
            rewrite.steps
        ))?;
        doc["checks"] = json!({
            "equations": equations,
            "f0ClosedForm": f0_is_closed,
            "rewriter": rewriter,
            "cutoff": cutoff,
        });
        ok = equations && f0_is_closed && rewriter;
    }
    ctx.json(doc)?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("vfspan").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn v_command() {
        assert_eq!(run_capture(&["v", "111"]).1.trim(), "8");
        assert_eq!(run_capture(&["v", "0"]).1.trim(), "0");
        assert_eq!(run_capture(&["v", "15"]).1.trim(), "8");
        assert_eq!(run_capture(&["v", "abc"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--quiet", "v", "15"]).1, "");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["certify", "1", "8", "25"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["table1", "--family", "2"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn certify_text_and_json() {
        let (code, out, _) = run_capture(&["certify", "32", "8", "25"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("<= 46"));
        let (_, out, _) = run_capture(&["--json", "certify", "32", "8", "25"]);
        let c = Certificate::from_json(&out).unwrap();
        assert_eq!(c.bound(), 46);
    }

    #[test]
    fn closed_form_command() {
        // M = 32, N = 8: r = 5, t = 3.
        let (_, out, _) = run_capture(&["--json", "closed-form", "32", "8"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["byExponents"]["bound"], 46);
    }

    #[test]
    fn fseries_verify() {
        let (code, out, _) = run_capture(&["fseries", "--verify", "--cutoff", "-20"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.starts_with("f0 = "));
    }
}

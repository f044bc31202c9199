//! The `qprim` command line.
//!
//! Exit codes: 0 success, 1 a verification found a contradiction, 2 usage or
//! precondition error. Data goes to stdout, diagnostics to stderr. JSON keys
//! are emitted in alphabetical order.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classgroup::enumerate_classes;
use crate::error::{Error, Result};
use crate::oracle::{verify_grid_with, Classifier, GridConfig, GridReport, Outcome};
use crate::pprim::{
    build_isometry, classify, classify_all, solve_principal_square, IsometryCheck, VerdictJson,
};
use crate::qform::{check_discriminant, BinaryForm};
use crate::repcount::{rep_counts, represent, spectrum};
use crate::ternary::check_residue_one_identity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRADICTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Caps the worker count of `verify`.
pub const THREADS_ENV: &str = "QPRIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Tsv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "qprim",
    version,
    about = "Completely p-primitive binary quadratic forms"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class number, reduced classes with their orders, ambiguous classes.
    Classgroup {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Decide complete p-primitivity for every class of discriminant D.
    Classify {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        p: i64,
        /// Same as --format json.
        #[arg(long)]
        json: bool,
    },
    /// All representations of n by each class.
    Represent {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        n: i64,
        #[arg(long)]
        p: Option<i64>,
    },
    /// Q, Q* and Q_p* of one form up to a bound.
    Spectrum {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        /// Coefficients as a,b,c.
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        bound: i64,
        #[arg(long)]
        p: i64,
    },
    /// The scaling map T with f(Tv) = p^2 f(v), with its checked properties.
    Isometry {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        p: i64,
        /// Coefficients as a,b,c; defaults to every class representative.
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// Compare verdicts with brute force over a grid of (D, p).
    Verify {
        #[arg(long, default_value_t = -400, allow_negative_numbers = true)]
        dmin: i64,
        #[arg(long, default_value_t = -3, allow_negative_numbers = true)]
        dmax: i64,
        #[arg(long, default_value_t = 23)]
        pmax: i64,
        #[arg(long, default_value_t = 5000)]
        bound: i64,
        /// Negative verdicts without a witness are retried over n = p^2 m,
        /// m <= ceiling (default 10 * bound).
        #[arg(long)]
        ceiling: Option<i64>,
        /// Write the full report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare Q(f_1) and Q(f~_1) on integers = 1 mod 3.
    TernaryDemo {
        #[arg(long, default_value_t = 1000)]
        bound: i64,
    },
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        match &self.command {
            Command::Classgroup { d }
            | Command::Classify { d, .. }
            | Command::Isometry { d, .. } => {
                check_discriminant(*d)?;
            }
            Command::Represent { d, n, .. } => {
                check_discriminant(*d)?;
                if *n < 1 {
                    return Err(Error::NonPositive(*n));
                }
            }
            Command::Spectrum { d, bound, .. } => {
                check_discriminant(*d)?;
                if *bound < 1 {
                    return Err(Error::NonPositive(*bound));
                }
            }
            Command::Verify {
                dmin,
                dmax,
                pmax,
                bound,
                ceiling,
                ..
            } => {
                if dmin > dmax || *dmax >= 0 {
                    return Err(Error::HypothesisNotMet(format!(
                        "need dmin <= dmax < 0, got {dmin}..{dmax}"
                    )));
                }
                if *pmax < 2 || *bound < 1 || ceiling.is_some_and(|c| c < 0) {
                    return Err(Error::HypothesisNotMet(
                        "need pmax >= 2, bound >= 1, ceiling >= 0".into(),
                    ));
                }
            }
            Command::TernaryDemo { bound } => {
                if *bound < 100 {
                    return Err(Error::HypothesisNotMet(format!("bound {bound} < 100")));
                }
            }
        }
        Ok(())
    }
}

/// Entry point used by the binary.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, out, err, &classify)
}

/// Like [`run`], with the decision procedure used by `verify` swapped out.
pub fn run_with<I, S>(
    argv: I,
    out: &mut dyn Write,
    err: &mut dyn Write,
    classifier: &Classifier,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                EXIT_OK
            } else {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            };
        }
    };
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(&cfg, out, err, classifier) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    // Going through Value sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let text = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Parse(e.to_string()))
}

fn emit_line(out: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))
}

fn parse_form(s: &str, d: i64) -> Result<BinaryForm> {
    let f: BinaryForm = s.parse()?;
    if f.discriminant() != d {
        return Err(Error::DiscriminantMismatch(f.discriminant(), d));
    }
    Ok(f)
}

fn fmt_form(f: &[i64; 3]) -> String {
    format!("[{},{},{}]", f[0], f[1], f[2])
}

fn dispatch(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
    classifier: &Classifier,
) -> Result<i32> {
    let format = cfg.format;
    match &cfg.command {
        Command::Classgroup { d } => {
            let j = enumerate_classes(*d)?.to_json()?;
            match format {
                Format::Json => emit_json(out, &j)?,
                Format::Tsv => {
                    emit_line(out, "form\torder\tambiguous")?;
                    for c in &j.classes {
                        let amb = j.ambiguous.contains(&c.form);
                        emit_line(out, &format!("{}\t{}\t{}", fmt_form(&c.form), c.order, amb))?;
                    }
                }
                Format::Text => {
                    emit_line(out, &format!("D = {}  h = {}", j.d, j.h))?;
                    for c in &j.classes {
                        let amb = if j.ambiguous.contains(&c.form) {
                            "  ambiguous"
                        } else {
                            ""
                        };
                        emit_line(
                            out,
                            &format!("  {}  order {}{amb}", fmt_form(&c.form), c.order),
                        )?;
                    }
                }
            }
        }
        Command::Classify { d, p, json } => {
            let verdicts: Vec<VerdictJson> = classify_all(*d, *p)?
                .iter()
                .map(VerdictJson::from)
                .collect();
            match if *json { Format::Json } else { format } {
                Format::Json => emit_json(out, &verdicts)?,
                Format::Tsv => {
                    emit_line(out, "form\tp\tcpp\troute")?;
                    for v in &verdicts {
                        emit_line(
                            out,
                            &format!(
                                "{}\t{}\t{}\t{}",
                                fmt_form(&v.form),
                                v.p,
                                v.cpp,
                                v.route.as_str()
                            ),
                        )?;
                    }
                }
                Format::Text => {
                    for v in &verdicts {
                        let word = if v.cpp {
                            "completely p-primitive"
                        } else {
                            "not completely p-primitive"
                        };
                        emit_line(
                            out,
                            &format!(
                                "{}  p={}  {word}  ({})",
                                fmt_form(&v.form),
                                v.p,
                                v.route.as_str()
                            ),
                        )?;
                    }
                }
            }
        }
        Command::Represent { d, n, p } => {
            let group = enumerate_classes(*d)?;
            let mut records = Vec::new();
            for x in group.classes() {
                let rec = match p {
                    Some(p) => rep_counts(x.rep(), *n, *p)?,
                    None => represent(x.rep(), *n)?,
                };
                records.push(json!({ "form": x.rep().coeffs(), "record": rec }));
            }
            match format {
                Format::Json => emit_json(out, &records)?,
                Format::Tsv | Format::Text => {
                    emit_line(out, "form\tn\tr\tr_star_p\tr_flat_p")?;
                    for r in &records {
                        let rec = &r["record"];
                        emit_line(
                            out,
                            &format!(
                                "{}\t{}\t{}\t{}\t{}",
                                r["form"], rec["n"], rec["r"], rec["r_star_p"], rec["r_flat_p"]
                            ),
                        )?;
                    }
                }
            }
        }
        Command::Spectrum { d, form, bound, p } => {
            let f = parse_form(form, *d)?;
            let s = spectrum(&f, *bound, *p)?;
            match format {
                Format::Json => emit_json(out, &json!({ "form": f.coeffs(), "spectrum": s }))?,
                Format::Tsv | Format::Text => {
                    emit_line(out, "n\tQ\tQstar\tQp_star")?;
                    for &n in &s.q {
                        emit_line(
                            out,
                            &format!(
                                "{n}\t1\t{}\t{}",
                                s.in_q_star(n) as u8,
                                s.in_qp_star(n) as u8
                            ),
                        )?;
                    }
                }
            }
        }
        Command::Isometry { d, p, form } => {
            let sols = solve_principal_square(*d, *p)?;
            let forms: Vec<BinaryForm> = match form {
                Some(s) => vec![parse_form(s, *d)?],
                None => enumerate_classes(*d)?
                    .classes()
                    .iter()
                    .map(|x| *x.rep())
                    .collect(),
            };
            let mut maps = Vec::new();
            if let Some(sol) = sols.first() {
                for f in &forms {
                    let t = build_isometry(f, sol)?;
                    let check = IsometryCheck::run(f, &t, *p);
                    maps.push(json!({
                        "form": f.coeffs(),
                        "T": t.rows(),
                        "check": check,
                        "verified": check.all_hold(*p),
                    }));
                }
            }
            let all_ok = maps.iter().all(|m| m["verified"] == Value::Bool(true));
            let report = json!({
                "D": d,
                "p": p,
                "principal_square": !sols.is_empty(),
                "solution": sols.first(),
                "maps": maps,
            });
            match format {
                Format::Json => emit_json(out, &report)?,
                Format::Tsv | Format::Text => {
                    if sols.is_empty() {
                        emit_line(
                            out,
                            "no solution of 4p^2 = m^2 + |D| n^2 with gcd(m, n, p) = 1",
                        )?;
                    }
                    for m in &maps {
                        emit_line(
                            out,
                            &format!("{}\tT={}\tverified={}", m["form"], m["T"], m["verified"]),
                        )?;
                    }
                }
            }
            if !all_ok {
                let _ = writeln!(err, "isometry check failed");
                return Ok(EXIT_CONTRADICTION);
            }
        }
        Command::Verify {
            dmin,
            dmax,
            pmax,
            bound,
            ceiling,
            json,
        } => {
            let mut grid = GridConfig::new(*dmin, *dmax, *pmax, *bound);
            if let Some(c) = ceiling {
                grid.ceiling = *c;
            }
            let report = run_grid(&grid, classifier)?;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(
                    &serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?,
                )
                .map_err(|e| Error::Parse(e.to_string()))?;
                std::fs::write(path, text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            }
            let summary = grid_summary(&report);
            match format {
                Format::Json => emit_json(out, &summary)?,
                Format::Tsv | Format::Text => {
                    for key in [
                        "classes_checked",
                        "positive",
                        "negative_confirmed",
                        "unconfirmed",
                        "contradictions",
                        "bad_evidence",
                    ] {
                        emit_line(out, &format!("{key}\t{}", summary[key]))?;
                    }
                }
            }
            for (cell, c) in report.failures() {
                let _ = writeln!(
                    err,
                    "contradiction: D={} p={} form={} cpp={} witness={:?} outcome={:?}",
                    cell.d,
                    cell.p,
                    fmt_form(&c.form),
                    c.cpp,
                    c.witness,
                    c.outcome
                );
            }
            if !report.is_clean() {
                return Ok(EXIT_CONTRADICTION);
            }
        }
        Command::TernaryDemo { bound } => {
            let r = check_residue_one_identity(*bound)?;
            match format {
                Format::Json => emit_json(
                    out,
                    &json!({
                        "bound": r.bound,
                        "symmetric_difference": r.symmetric_difference,
                        "identity_holds": r.identity_holds,
                        "theta_bound": r.theta_bound,
                        "theta_agree": r.theta_agree,
                        "det_tilde": r.det_tilde,
                        "det_shape": r.det_shape,
                        "equivalence": r.equivalence,
                        "shape_status": r.shape_status,
                    }),
                )?,
                Format::Tsv | Format::Text => {
                    emit_line(
                        out,
                        &format!("symmetric_difference\t{:?}", r.symmetric_difference),
                    )?;
                    emit_line(out, &format!("identity_holds\t{}", r.identity_holds))?;
                    emit_line(out, &format!("theta_agree\t{}", r.theta_agree))?;
                    emit_line(out, &format!("shape_status\t{}", r.shape_status))?;
                }
            }
            if !r.holds() {
                return Ok(EXIT_CONTRADICTION);
            }
        }
    }
    Ok(EXIT_OK)
}

fn run_grid(grid: &GridConfig, classifier: &Classifier) -> Result<GridReport> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Parse(e.to_string()))?;
            pool.install(|| verify_grid_with(grid, classifier))
        }
        _ => verify_grid_with(grid, classifier),
    }
}

fn grid_summary(report: &GridReport) -> Value {
    let unconfirmed: Vec<Value> = report
        .cells
        .iter()
        .flat_map(|cell| {
            cell.classes
                .iter()
                .filter(|c| c.outcome == Outcome::Unconfirmed)
                .map(move |c| json!({ "D": cell.d, "p": cell.p, "form": c.form, "searched_to": c.searched_to }))
        })
        .collect();
    let failures: Vec<Value> = report
        .failures()
        .map(|(cell, c)| json!({ "D": cell.d, "p": cell.p, "check": c }))
        .collect();
    json!({
        "config": report.config,
        "cells": report.cells.len(),
        "classes_checked": report.classes_checked,
        "positive": report.positive,
        "negative_confirmed": report.negative_confirmed,
        "unconfirmed": report.unconfirmed,
        "unconfirmed_cases": unconfirmed,
        "contradictions": report.contradictions,
        "bad_evidence": report.bad_evidence,
        "failures": failures,
        "note": "all statements are truncations at the stated bounds",
    })
}

/// Reads the `classgroup` JSON output back into a group.
pub fn parse_classgroup_json(text: &str) -> Result<crate::classgroup::ClassGroup> {
    let j: crate::classgroup::ClassGroupJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    crate::classgroup::ClassGroup::try_from(j)
}

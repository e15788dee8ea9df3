//! Subcommand bodies. Each returns the full rendered output so the caller
//! can mirror it to `--out` and choose the exit status.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use mzsv_core::numeric::{lemma42_decay, verify_thm12_numeric, zeta_numeric, zeta_star_numeric};
use mzsv_core::{
    equal_as_term_multisets, expand_kappa_limit, expand_oplus, lemma21_check, mhs, mhs_star,
    parse_signed_composition, parse_star_spec, verify_thm23, NumericResult, SignedComposition,
    StarSpec, Term,
};

use crate::{EvalTarget, ExpandMode};

pub struct Outcome {
    pub text: String,
    /// Lines for stderr (failed checks).
    pub alerts: Vec<String>,
    pub ok: bool,
}

impl Outcome {
    fn new(text: String, ok: bool) -> Self {
        Outcome {
            text,
            alerts: Vec::new(),
            ok,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn spec_arg(text: &str) -> Result<StarSpec> {
    parse_star_spec(text).with_context(|| format!("spec `{text}`"))
}

fn composition_arg(text: &str) -> Result<SignedComposition> {
    parse_signed_composition(text).with_context(|| format!("composition `{text}`"))
}

/// `"a..b"` (inclusive) or a single integer.
pub fn parse_n_range(text: &str) -> Result<(u64, u64)> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("bad n `{t}` in `{text}`"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        bail!("n range `{text}` must satisfy 1 <= n_min <= n_max");
    }
    Ok((lo, hi))
}

pub fn parse_n_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| anyhow!("bad n `{t}` in `{text}`"))
        })
        .collect()
}

fn render_numeric(r: &NumericResult) -> String {
    let flag = if r.converged {
        ""
    } else {
        "  [tolerance not reached]"
    };
    format!(
        "{:.12} ± {:.3e} ({} terms){flag}",
        r.value, r.error_bound, r.terms_used
    )
}

pub fn verify_mhs(spec_texts: &[String], n_text: &str, json: bool) -> Result<Outcome> {
    let specs: Vec<StarSpec> = spec_texts
        .iter()
        .map(|t| spec_arg(t))
        .collect::<Result<_>>()?;
    let (lo, hi) = parse_n_range(n_text)?;
    let cells: Vec<(usize, u64)> = (0..specs.len())
        .flat_map(|i| (lo..=hi).map(move |n| (i, n)))
        .collect();
    let reports: Vec<_> = cells
        .par_iter()
        .map(|&(i, n)| verify_thm23(n, &specs[i]))
        .collect();
    let all_equal = reports.iter().all(|r| r.equal);
    let alerts: Vec<String> = reports
        .iter()
        .filter(|r| !r.equal)
        .map(|r| {
            format!(
                "IDENTITY VIOLATION: spec {} n={}: lhs {} != rhs {}",
                r.spec, r.n, r.lhs, r.rhs
            )
        })
        .collect();
    let text = if json {
        to_json(&json!({
            "command": "verify-mhs",
            "all_equal": all_equal,
            "reports": reports,
        }))?
    } else {
        let mut out = String::new();
        let mut current = None;
        for r in &reports {
            if current != Some(&r.spec) {
                writeln!(out, "spec {} ({} terms)", r.spec, r.term_count)?;
                if r.degenerate {
                    writeln!(
                        out,
                        "  note: empty composition; right side uses the degenerate convention H*_n(()) = 1"
                    )?;
                }
                current = Some(&r.spec);
            }
            let verdict = if r.equal { "equal" } else { "NOT EQUAL" };
            writeln!(
                out,
                "  n={:<3} {verdict:<9} lhs={} rhs={}",
                r.n, r.lhs, r.rhs
            )?;
        }
        writeln!(
            out,
            "{} of {} checks equal",
            reports.iter().filter(|r| r.equal).count(),
            reports.len()
        )?;
        out
    };
    Ok(Outcome {
        text,
        alerts,
        ok: all_equal,
    })
}

fn render_terms(out: &mut String, label: &str, spec: &StarSpec, terms: &[Term]) -> Result<()> {
    writeln!(out, "{label}: z*({spec}) =")?;
    for t in terms {
        writeln!(out, "  {t}")?;
    }
    Ok(())
}

pub fn expand(spec_text: &str, mode: ExpandMode, json: bool) -> Result<Outcome> {
    let spec = spec_arg(spec_text)?;
    let oplus = match mode {
        ExpandMode::Oplus | ExpandMode::Both => Some(expand_oplus(&spec)?),
        ExpandMode::Kappa => None,
    };
    let kappa = match mode {
        ExpandMode::Kappa | ExpandMode::Both => Some(expand_kappa_limit(&spec)),
        ExpandMode::Oplus => None,
    };
    let equal = match (&oplus, &kappa) {
        (Some(a), Some(b)) => Some(equal_as_term_multisets(a, b)),
        _ => None,
    };
    let text = if json {
        let mut value = json!({ "command": "expand", "spec": spec.to_string() });
        if let Some(t) = &oplus {
            value["oplus"] = serde_json::to_value(t)?;
        }
        if let Some(t) = &kappa {
            value["kappa"] = serde_json::to_value(t)?;
        }
        if let Some(e) = equal {
            value["equal"] = json!(e);
        }
        to_json(&value)?
    } else {
        let mut out = String::new();
        if let Some(t) = &oplus {
            render_terms(&mut out, "oplus", &spec, t)?;
        }
        if let Some(t) = &kappa {
            render_terms(&mut out, "kappa", &spec, t)?;
        }
        if let Some(e) = equal {
            writeln!(out, "term multisets equal: {e}")?;
        }
        out
    };
    let mut outcome = Outcome::new(text, equal.unwrap_or(true));
    if equal == Some(false) {
        outcome.alerts.push(format!(
            "EXPANSION MISMATCH: the two term lists for {spec} differ"
        ));
    }
    Ok(outcome)
}

pub fn verify_numeric(spec_texts: &[String], tol: f64, json: bool) -> Result<Outcome> {
    let specs: Vec<StarSpec> = spec_texts
        .iter()
        .map(|t| spec_arg(t))
        .collect::<Result<_>>()?;
    let reports = specs
        .par_iter()
        .map(|s| verify_thm12_numeric(s, tol))
        .collect::<mzsv_core::Result<Vec<_>>>()?;
    let ok = reports.iter().all(|r| r.consistent);
    let text = if json {
        to_json(&json!({
            "command": "verify-numeric",
            "all_consistent": ok,
            "reports": reports,
        }))?
    } else {
        let mut out = String::new();
        for r in &reports {
            writeln!(out, "spec {}", r.spec)?;
            writeln!(out, "  z*       = {}", render_numeric(&r.lhs))?;
            writeln!(out, "  expansion= {}", render_numeric(&r.rhs))?;
            writeln!(
                out,
                "  |diff| = {:.3e}  consistent: {}",
                r.difference, r.consistent
            )?;
        }
        out
    };
    let mut outcome = Outcome::new(text, ok);
    for r in reports.iter().filter(|r| !r.consistent) {
        outcome.alerts.push(format!(
            "NUMERIC MISMATCH: spec {} differs by {:.3e}",
            r.spec, r.difference
        ));
    }
    Ok(outcome)
}

pub fn lemma21(
    n_text: Option<&str>,
    a: Option<u64>,
    c: Option<u64>,
    v_text: &str,
    json: bool,
) -> Result<Outcome> {
    let a = a.ok_or_else(|| anyhow!("--a is required for check-lemma 21"))?;
    let c = c.ok_or_else(|| anyhow!("--c is required for check-lemma 21"))?;
    let v = composition_arg(v_text)?;
    let (lo, hi) = parse_n_range(n_text.unwrap_or("1..8"))?;
    let reports = (lo..=hi)
        .into_par_iter()
        .map(|n| lemma21_check(n, a, c, &v))
        .collect::<mzsv_core::Result<Vec<_>>>()?;
    let ok = reports.iter().all(|r| r.equal);
    let text = if json {
        to_json(
            &json!({ "command": "check-lemma", "lemma": 21, "all_equal": ok, "reports": reports }),
        )?
    } else {
        let mut out = format!("a={a} c={c} v=({v})\n");
        for r in &reports {
            writeln!(
                out,
                "  n={:<3} equal = {:<5} lhs={} rhs={}",
                r.n, r.equal, r.lhs, r.rhs
            )?;
        }
        out
    };
    Ok(Outcome::new(text, ok))
}

pub fn lemma42(n_text: Option<&str>, s_text: &str, e: Option<f64>, json: bool) -> Result<Outcome> {
    let e = e.ok_or_else(|| anyhow!("--e is required for check-lemma 42"))?;
    let s = composition_arg(s_text)?;
    let ns = parse_n_list(n_text.unwrap_or("10,100,1000"))?;
    let rows = lemma42_decay(&s, e, &ns)?;
    let decreasing = rows.windows(2).all(|w| w[1].value < w[0].value);
    let text = if json {
        to_json(&json!({
            "command": "check-lemma",
            "lemma": 42,
            "s": s,
            "e": e,
            "rows": rows,
            "strictly_decreasing": decreasing,
        }))?
    } else {
        let mut out = format!("s=({s}) e={e}\n");
        for r in &rows {
            writeln!(out, "  n={:<8} {:.15e}", r.n, r.value)?;
        }
        writeln!(out, "strictly decreasing: {decreasing}")?;
        out
    };
    Ok(Outcome::new(text, decreasing))
}

pub fn eval(
    target: EvalTarget,
    n: Option<u64>,
    s_text: Option<&str>,
    spec_text: Option<&str>,
    tol: f64,
    json: bool,
) -> Result<Outcome> {
    enum Value {
        Exact(String),
        Numeric(NumericResult),
    }
    let need_s = || -> Result<SignedComposition> {
        composition_arg(s_text.ok_or_else(|| anyhow!("--s is required"))?)
    };
    let need_n = || n.ok_or_else(|| anyhow!("--n is required for exact evaluation"));
    let (label, value) = match target {
        EvalTarget::Mhs => {
            let s = need_s()?;
            (
                format!("H_{}({s})", need_n()?),
                Value::Exact(mhs(need_n()?, &s).to_string()),
            )
        }
        EvalTarget::Star => match spec_text {
            Some(t) => {
                let spec = spec_arg(t)?;
                (
                    format!("z*({spec})"),
                    Value::Numeric(zeta_star_numeric(&spec, tol)?),
                )
            }
            None => {
                let s = need_s()?;
                (
                    format!("H*_{}({s})", need_n()?),
                    Value::Exact(mhs_star(need_n()?, &s).to_string()),
                )
            }
        },
        EvalTarget::Zeta => {
            let s = match spec_text {
                Some(t) => mzsv_core::expand_spec(&spec_arg(t)?),
                None => need_s()?,
            };
            (format!("z({s})"), Value::Numeric(zeta_numeric(&s, tol)?))
        }
    };
    let ok = match &value {
        Value::Exact(_) => true,
        Value::Numeric(r) => r.converged,
    };
    let text = match (&value, json) {
        (Value::Exact(v), true) => {
            to_json(&json!({ "command": "eval", "target": label, "value": v }))?
        }
        (Value::Numeric(r), true) => {
            to_json(&json!({ "command": "eval", "target": label, "result": r }))?
        }
        (Value::Exact(v), false) => format!("{v}\n"),
        (Value::Numeric(r), false) => format!("{label} = {}\n", render_numeric(r)),
    };
    Ok(Outcome::new(text, ok))
}

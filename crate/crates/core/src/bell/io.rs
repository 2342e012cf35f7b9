//! Plain-text inequality files.
//!
//! ```text
//! # CHSH
//! parties 2 settings 2 2 local 2 ns 4
//! 1 0 0
//! 1 0 1
//! 1 1 0
//! -1 1 1
//! ```
//!
//! A header starts each inequality; every following line until the next header is a
//! term `coef s1 … sN` with `sk` a 0-based setting index or `-` for an unmeasured party.
//! `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::{CorrelatorInequality, SettingTuple};
use crate::error::{Error, Result};

struct Pending {
    header_line: usize,
    settings: Vec<usize>,
    local: f64,
    ns: Option<f64>,
    terms: Vec<(SettingTuple, f64)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn expect_keyword(tok: Option<&str>, kw: &str, line: usize) -> Result<()> {
    match tok {
        Some(t) if t == kw => Ok(()),
        Some(t) => Err(parse_err(line, format!("expected '{kw}', found '{t}'"))),
        None => Err(parse_err(line, format!("expected '{kw}'"))),
    }
}

fn parse_header(toks: &[&str], line: usize) -> Result<Pending> {
    let mut it = toks.iter().copied();
    expect_keyword(it.next(), "parties", line)?;
    let n: usize = number(it.next(), line, "party count")?;
    if n == 0 {
        return Err(parse_err(line, "party count must be positive"));
    }
    expect_keyword(it.next(), "settings", line)?;
    let settings = (0..n)
        .map(|_| number::<usize>(it.next(), line, "setting count"))
        .collect::<Result<Vec<_>>>()?;
    expect_keyword(it.next(), "local", line)?;
    let local: f64 = number(it.next(), line, "local bound")?;
    let ns = match it.next() {
        None => None,
        Some("ns") => Some(number::<f64>(it.next(), line, "no-signalling bound")?),
        Some(t) => return Err(parse_err(line, format!("unexpected token '{t}'"))),
    };
    if let Some(t) = it.next() {
        return Err(parse_err(line, format!("unexpected token '{t}'")));
    }
    Ok(Pending {
        header_line: line,
        settings,
        local,
        ns,
        terms: Vec::new(),
    })
}

fn finish(p: Pending) -> Result<CorrelatorInequality> {
    CorrelatorInequality::new(p.settings, p.terms, p.local, p.ns).map_err(|e| match e {
        Error::InvalidArgument(m) => parse_err(p.header_line, m),
        other => other,
    })
}

pub fn parse_inequalities(text: &str) -> Result<Vec<CorrelatorInequality>> {
    let mut out = Vec::new();
    let mut current: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] == "parties" {
            if let Some(p) = current.take() {
                out.push(finish(p)?);
            }
            current = Some(parse_header(&toks, line)?);
            continue;
        }
        let pending = current
            .as_mut()
            .ok_or_else(|| parse_err(line, "term before any 'parties' header"))?;
        let n = pending.settings.len();
        if toks.len() != n + 1 {
            return Err(parse_err(
                line,
                format!("expected a coefficient and {n} settings, found {} fields", toks.len()),
            ));
        }
        let coef: f64 = number(Some(toks[0]), line, "coefficient")?;
        if !coef.is_finite() {
            return Err(parse_err(line, "coefficient must be finite"));
        }
        let tuple = toks[1..]
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                if t == "-" {
                    return Ok(None);
                }
                let s: usize = number(Some(t), line, "setting index")?;
                if s >= pending.settings[k] {
                    return Err(parse_err(
                        line,
                        format!("party {} has {} settings, got index {s}", k + 1, pending.settings[k]),
                    ));
                }
                Ok(Some(s))
            })
            .collect::<Result<SettingTuple>>()?;
        pending.terms.push((tuple, coef));
    }
    if let Some(p) = current {
        out.push(finish(p)?);
    }
    Ok(out)
}

pub fn load_inequalities(path: impl AsRef<Path>) -> Result<Vec<CorrelatorInequality>> {
    parse_inequalities(&std::fs::read_to_string(path)?)
}

pub fn write_inequalities(ineqs: &[CorrelatorInequality]) -> String {
    let mut s = String::new();
    for ineq in ineqs {
        let _ = write!(s, "parties {} settings", ineq.n_parties());
        for m in ineq.settings_per_party() {
            let _ = write!(s, " {m}");
        }
        let _ = write!(s, " local {:?}", ineq.local_bound());
        if let Some(ns) = ineq.ns_bound() {
            let _ = write!(s, " ns {ns:?}");
        }
        s.push('\n');
        for (tuple, c) in ineq.terms() {
            let _ = write!(s, "{c:?}");
            for t in tuple {
                match t {
                    Some(i) => {
                        let _ = write!(s, " {i}");
                    }
                    None => s.push_str(" -"),
                }
            }
            s.push('\n');
        }
    }
    s
}

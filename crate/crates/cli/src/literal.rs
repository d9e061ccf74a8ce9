//! Textual inputs: sequence literals, lists of them, and domains.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use branch_lab_core::expr::parse;
use branch_lab_core::{DomainInterval, SmoothSequence};
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    tail: String,
    #[serde(default)]
    exceptions: BTreeMap<String, String>,
    #[serde(default = "one")]
    start: u32,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
struct Wrapper {
    s: RawSequence,
}

/// A plain expression (`cos(nu*x)`) or an inline table
/// `{ tail = "...", exceptions = { "3" = "..." }, start = 1 }`.
pub fn parse_sequence(text: &str) -> Result<SmoothSequence> {
    let text = text.trim();
    if !text.starts_with('{') {
        let e = parse(text).with_context(|| format!("in expression {text:?}"))?;
        return Ok(SmoothSequence::new(e));
    }
    let raw: Wrapper = toml::from_str(&format!("s = {text}")).with_context(|| format!("in sequence literal {text}"))?;
    let raw = raw.s;
    let mut exceptions = BTreeMap::new();
    for (k, v) in raw.exceptions {
        let index: u32 = k.trim().parse().with_context(|| format!("exception index {k:?}"))?;
        exceptions.insert(index, parse(&v).with_context(|| format!("in exception {index}: {v:?}"))?);
    }
    let tail = parse(&raw.tail).with_context(|| format!("in tail {:?}", raw.tail))?;
    Ok(SmoothSequence::with_parts(tail, exceptions, raw.start)?)
}

/// Splits on commas outside braces and quotes.
pub fn split_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut quoted, mut cur) = (0i32, false, String::new());
    for ch in text.chars() {
        match ch {
            '"' => quoted = !quoted,
            '{' if !quoted => depth += 1,
            '}' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// A list item is read from a file when it names one, otherwise parsed as
/// a literal.
pub fn sequence_item(item: &str) -> Result<SmoothSequence> {
    let path = Path::new(item);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_sequence(&text).with_context(|| format!("in file {}", path.display()));
    }
    parse_sequence(item)
}

pub fn sequence_list(items: &[String]) -> Result<Vec<SmoothSequence>> {
    items.iter().flat_map(|i| split_list(i)).map(|s| sequence_item(&s)).collect()
}

/// One literal per line; blank lines and lines starting with `#` are
/// skipped.
pub fn sequence_file(path: &Path) -> Result<Vec<SmoothSequence>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_sequence(l).with_context(|| format!("in file {}", path.display())))
        .collect()
}

fn constant(text: &str) -> Result<f64> {
    let e = parse(text).with_context(|| format!("in domain bound {text:?}"))?;
    if e.contains_x() || e.contains_nu() {
        bail!("domain bound {text:?} must be a constant");
    }
    Ok(e.eval(1, 0.0)?)
}

/// `"a,b"` with constant expressions, e.g. `"0,2*pi"`.
pub fn parse_domain(text: &str) -> Result<DomainInterval> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b] = parts.as_slice() else {
        bail!("domain must be \"lower,upper\", got {text:?}");
    };
    Ok(DomainInterval::new(constant(a)?, constant(b)?)?)
}

//! Text format for families.
//!
//! ```text
//! # comment
//! n=5
//! 1,3,5
//! empty
//! 01100
//! ```
//!
//! The header `n=<int>` is the first non-comment line. A member is either a
//! comma-separated list of 1-based elements, the word `empty`, or a bitstring
//! of exactly `n` characters whose leftmost character is element 1.

use std::fmt::Write as _;

use super::{check_ground_set, SetFamily};
use crate::error::{Error, Result};

pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut n: Option<usize> = None;
    let mut masks = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(n) = n else {
            n = Some(parse_header(line, line_no)?);
            continue;
        };
        masks.push(parse_member(line, n, line_no)?);
    }
    let n = n.ok_or_else(|| Error::parse(last_line.max(1), "missing header `n=<integer>`"))?;
    SetFamily::new(n, masks)
}

fn parse_header(line: &str, line_no: usize) -> Result<usize> {
    let rest = line
        .strip_prefix('n')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(line_no, format!("expected `n=<integer>`, found `{line}`")))?;
    let n: usize = rest
        .trim()
        .parse()
        .map_err(|_| Error::parse(line_no, format!("bad ground set size `{}`", rest.trim())))?;
    check_ground_set(n).map_err(|e| Error::parse(line_no, e.to_string()))?;
    Ok(n)
}

fn parse_member(line: &str, n: usize, line_no: usize) -> Result<u64> {
    if line == "empty" {
        return Ok(0);
    }
    if !line.contains(',') && line.len() == n && line.bytes().all(|b| b == b'0' || b == b'1') {
        return Ok(line
            .bytes()
            .enumerate()
            .filter(|&(_, b)| b == b'1')
            .fold(0u64, |acc, (i, _)| acc | 1 << i));
    }
    let mut bits = 0u64;
    for tok in line.split(',') {
        let tok = tok.trim();
        let e: usize = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad element `{tok}`")))?;
        if e == 0 || e > n {
            return Err(Error::parse(
                line_no,
                format!("element {e} outside the ground set [{n}]"),
            ));
        }
        bits |= 1 << (e - 1);
    }
    Ok(bits)
}

/// Renders a family in the comma-separated form, one member per line.
pub fn format_family(family: &SetFamily) -> String {
    let mut out = format!("n={}\n", family.n());
    for m in family.iter() {
        if m.is_empty() {
            out.push_str("empty\n");
            continue;
        }
        let elems = m.elements();
        for (i, e) in elems.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{e}");
        }
        out.push('\n');
    }
    out
}

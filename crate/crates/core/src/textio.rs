//! Text interchange format for generator lists.
//!
//! One permutation per line, either as an image list or in cycle form with
//! an explicit degree:
//!
//! ```text
//! # comment
//! img: 1 0 3 2
//! cyc(8): (0 1 2 3 4 5 6 7)
//! cyc(8): (1 5)(3 7)
//! ```
//!
//! All lines of a file must agree on the degree.

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Parses a generator file, returning the common degree and the generators
/// in file order.
pub fn parse_generators(text: &str) -> Result<(usize, Vec<Permutation>)> {
    let mut degree: Option<usize> = None;
    let mut gens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let perm =
            parse_line(line).map_err(|e| Error::Parse(format!("line {}: {}", lineno + 1, e)))?;
        match degree {
            None => degree = Some(perm.degree()),
            Some(d) if d != perm.degree() => {
                return Err(Error::Parse(format!(
                    "line {}: degree {} does not match earlier degree {}",
                    lineno + 1,
                    perm.degree(),
                    d
                )));
            }
            Some(_) => {}
        }
        gens.push(perm);
    }
    match degree {
        Some(d) => Ok((d, gens)),
        None => Err(Error::Parse("no generators in input".into())),
    }
}

fn parse_line(line: &str) -> Result<Permutation> {
    if let Some(rest) = line.strip_prefix("img:") {
        let images = rest
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad point '{}'", tok)))
            })
            .collect::<Result<Vec<_>>>()?;
        if images.is_empty() {
            return Err(Error::Parse("empty image list".into()));
        }
        Permutation::from_images(images)
            .map_err(|e| Error::Parse(format!("invalid image list: {}", e)))
    } else if let Some(rest) = line.strip_prefix("cyc(") {
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse("missing ')' after degree".into()))?;
        let degree: usize = rest[..close]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree '{}'", &rest[..close])))?;
        let body = rest[close + 1..]
            .trim()
            .strip_prefix(':')
            .ok_or_else(|| Error::Parse("expected ':' after cyc(degree)".into()))?
            .trim();
        let cycles = parse_cycles(body)?;
        Permutation::from_cycles(&cycles, degree)
            .map_err(|e| Error::Parse(format!("invalid cycles: {}", e)))
    } else {
        Err(Error::Parse(format!(
            "expected 'img:' or 'cyc(degree):', got '{}'",
            line
        )))
    }
}

fn parse_cycles(body: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(Error::Parse(format!("expected '(' in '{}'", rest)));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse("unclosed cycle".into()))?;
        let inner = &rest[1..close];
        let cycle = inner
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad point '{}'", tok)))
            })
            .collect::<Result<Vec<_>>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = &rest[close + 1..];
    }
    Ok(cycles)
}

/// Serializes generators as `img:` lines. Inverse of [`parse_generators`]
/// up to formatting.
pub fn write_generators(perms: &[Permutation]) -> String {
    let mut out = String::new();
    for p in perms {
        out.push_str("img:");
        for &y in p.images() {
            out.push(' ');
            out.push_str(&y.to_string());
        }
        out.push('\n');
    }
    out
}

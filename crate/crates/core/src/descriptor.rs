//! Text descriptors for operators, e.g. `circle(c=2,k=1)` or
//! `circle(c=2)⊗circle(c=2)`. `x` and `*` are accepted in place of `⊗`.

use crate::spectra::{Entry, Family, ProductOperator};
use crate::{Error, Result};

/// Parses a single factor: `circle(c=<real>,k=<int>)`, `folded(c=<real>,k=<int>)`
/// or `list(<value>:<mult>,...)`.
pub fn parse_family(text: &str) -> Result<Family> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| bad(text, "expected `name(...)`"))?;
    if !text.ends_with(')') {
        return Err(bad(text, "missing closing parenthesis"));
    }
    let name = text[..open].trim();
    let body = &text[open + 1..text.len() - 1];
    match name {
        "circle" | "folded" => {
            let mut c = None;
            let mut k = 1u32;
            for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| bad(text, &format!("expected key=value, got `{part}`")))?;
                match key.trim() {
                    "c" => {
                        c = Some(value.trim().parse::<f64>().map_err(|_| {
                            bad(text, &format!("cannot parse c = `{}`", value.trim()))
                        })?)
                    }
                    "k" => {
                        k = value.trim().parse::<u32>().map_err(|_| {
                            bad(text, &format!("cannot parse k = `{}`", value.trim()))
                        })?
                    }
                    other => return Err(bad(text, &format!("unknown parameter `{other}`"))),
                }
            }
            let c = c.ok_or_else(|| bad(text, "missing parameter c"))?;
            let family = if name == "circle" {
                Family::circle(c, k)
            } else {
                Family::folded(c, k)
            };
            family.map_err(|e| bad(text, &e.to_string()))
        }
        "list" => {
            let mut entries = Vec::new();
            for part in body
                .split([',', ';'])
                .map(str::trim)
                .filter(|p| !p.is_empty())
            {
                let (v, w) = part.split_once(':').unwrap_or((part, "1"));
                let value = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(text, &format!("cannot parse eigenvalue `{v}`")))?;
                let mult = w
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| bad(text, &format!("cannot parse multiplicity `{w}`")))?;
                entries.push(Entry::new(value, mult));
            }
            Family::finite(entries).map_err(|e| bad(text, &e.to_string()))
        }
        other => Err(bad(text, &format!("unknown family `{other}`"))),
    }
}

/// Splits a descriptor on top-level tensor symbols and parses each factor.
pub fn parse_factors(text: &str) -> Result<Vec<Family>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth -= 1;
                current.push(ch);
            }
            '⊗' | 'x' | '*' if depth == 0 => parts.push(std::mem::take(&mut current)),
            _ => current.push(ch),
        }
    }
    parts.push(current);
    if depth != 0 {
        return Err(bad(text, "unbalanced parentheses"));
    }
    parts.iter().map(|p| parse_family(p)).collect()
}

/// Parses a two-factor product descriptor.
pub fn parse_product(text: &str) -> Result<ProductOperator> {
    let mut factors = parse_factors(text)?;
    if factors.len() != 2 {
        return Err(bad(
            text,
            &format!("expected two factors, found {}", factors.len()),
        ));
    }
    let right = factors.pop().unwrap_or_else(|| unreachable!());
    let left = factors.pop().unwrap_or_else(|| unreachable!());
    Ok(ProductOperator::new(left, right))
}

fn bad(text: &str, why: &str) -> Error {
    Error::Descriptor(format!("`{text}`: {why}"))
}

//! Group definition files.
//!
//! ```text
//! ; Z/3 on a single generator
//! [alphabet]
//! a A
//! [backend]
//! kind = finite
//! name = Z/3
//! gens = 1 2
//! [table]
//! 0 1 2
//! 1 2 0
//! 2 0 1
//! ```
//!
//! `kind` is one of `finite`, `free`, `free_product`, `direct_product`.
//! Product kinds list their factors with repeated `factor = ...` lines, each
//! either `builtin:<name>` or a path relative to the defining file. Lines
//! starting with `;` are comments; whitespace is insignificant.

use std::path::Path;
use std::sync::Arc;

use super::{Backend, GroupSpec};
use crate::error::{Error, Result};
use crate::words::Alphabet;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_group_file(text: &str, base_dir: Option<&Path>) -> Result<GroupSpec> {
    let mut section = String::new();
    let mut pairs: Vec<(char, char)> = Vec::new();
    let mut kind: Option<String> = None;
    let mut name: Option<String> = None;
    let mut rank: Option<usize> = None;
    let mut gens: Option<Vec<u32>> = None;
    let mut factors: Vec<GroupSpec> = Vec::new();
    let mut rows: Vec<Vec<u32>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_ascii_lowercase();
            continue;
        }
        match section.as_str() {
            "alphabet" => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let [x, y] = toks.as_slice() else {
                    return Err(parse_err(ln, "expected an inverse pair like `a A`"));
                };
                let single = |t: &str| {
                    let mut cs = t.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Ok(c),
                        _ => Err(parse_err(ln, format!("letter names are single characters: {t:?}"))),
                    }
                };
                pairs.push((single(x)?, single(y)?));
            }
            "backend" => {
                let (key, value) = line.split_once('=').ok_or_else(|| parse_err(ln, "expected key = value"))?;
                let key = key.trim();
                let value = value.trim();
                match key {
                    "kind" => kind = Some(value.to_ascii_lowercase()),
                    "name" => name = Some(value.to_string()),
                    "rank" => rank = Some(value.parse().map_err(|_| parse_err(ln, "rank must be an integer"))?),
                    "gens" => {
                        gens = Some(
                            value
                                .split_whitespace()
                                .map(|t| t.parse::<u32>())
                                .collect::<std::result::Result<_, _>>()
                                .map_err(|_| parse_err(ln, "gens must be element ids"))?,
                        )
                    }
                    "factor" => factors.push(load_factor(value, base_dir).map_err(|e| match e {
                        Error::Parse { message, .. } => parse_err(ln, format!("in factor {value}: {message}")),
                        other => other,
                    })?),
                    other => return Err(parse_err(ln, format!("unknown backend key {other:?}"))),
                }
            }
            "table" => {
                let row = line
                    .split_whitespace()
                    .map(|t| t.parse::<u32>())
                    .collect::<std::result::Result<Vec<u32>, _>>()
                    .map_err(|_| parse_err(ln, "table rows are element ids"))?;
                rows.push(row);
            }
            "" => return Err(parse_err(ln, "content outside of a section")),
            other => return Err(parse_err(ln, format!("unknown section [{other}]"))),
        }
    }

    let kind = kind.ok_or_else(|| parse_err(0, "missing backend kind"))?;
    let spec = match kind.as_str() {
        "finite" => {
            let alphabet = Arc::new(Alphabet::from_pairs(&pairs)?);
            let gens = gens.ok_or_else(|| parse_err(0, "finite backend needs `gens`"))?;
            GroupSpec::from_table(name.as_deref().unwrap_or("finite"), alphabet, rows, gens)?
        }
        "free" => {
            let spec = if pairs.is_empty() {
                GroupSpec::free(rank.ok_or_else(|| parse_err(0, "free backend needs a rank or an alphabet"))?)
            } else {
                if let Some(r) = rank {
                    if r != pairs.len() {
                        return Err(Error::InvalidGroup(format!("rank {r} but {} letter pairs", pairs.len())));
                    }
                }
                GroupSpec::free_named(&pairs)?
            };
            match name {
                Some(n) => spec.with_name(&n),
                None => spec,
            }
        }
        "free_product" | "direct_product" => {
            let spec = if kind == "free_product" {
                GroupSpec::free_product(factors)?
            } else {
                GroupSpec::direct_product(factors)?
            };
            if !pairs.is_empty() && pairs != spec.alphabet().pairs() {
                return Err(Error::InvalidGroup("alphabet does not match the factors' letters".into()));
            }
            match name {
                Some(n) => spec.with_name(&n),
                None => spec,
            }
        }
        other => return Err(parse_err(0, format!("unknown backend kind {other:?}"))),
    };
    Ok(spec)
}

fn load_factor(value: &str, base_dir: Option<&Path>) -> Result<GroupSpec> {
    if let Some(b) = value.strip_prefix("builtin:") {
        return GroupSpec::builtin(b.trim()).ok_or_else(|| Error::InvalidGroup(format!("unknown builtin group {b}")));
    }
    let path = match base_dir {
        Some(d) => d.join(value),
        None => Path::new(value).to_path_buf(),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidGroup(format!("cannot read {}: {e}", path.display())))?;
    parse_group_file(&text, path.parent())
}

/// Renders finite and free backends in the group file format.
pub fn render_group_file(spec: &GroupSpec) -> Result<String> {
    let mut out = String::from("[alphabet]\n");
    for (x, y) in spec.alphabet().pairs() {
        out.push_str(&format!("{x} {y}\n"));
    }
    out.push_str("[backend]\n");
    match spec.backend() {
        Backend::FiniteTable(t) => {
            out.push_str(&format!("kind = finite\nname = {}\n", spec.name()));
            let gens: Vec<String> = t.generators().iter().map(u32::to_string).collect();
            out.push_str(&format!("gens = {}\n[table]\n", gens.join(" ")));
            for row in t.rows() {
                let row: Vec<String> = row.iter().map(u32::to_string).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        Backend::Free { .. } => out.push_str(&format!("kind = free\nname = {}\n", spec.name())),
        _ => return Err(Error::UnsupportedBackend(spec.backend_kind())),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z3: &str = "
        ; cyclic of order three
        [alphabet]
          a   A
        [backend]
        kind = finite
        name = Z/3
        gens = 1 2
        [table]
        0 1 2
        1 2 0
        2 0 1
    ";

    #[test]
    fn parses_finite_table() {
        let g = parse_group_file(Z3, None).unwrap();
        assert_eq!(g.order(), Some(3));
        assert_eq!(g.name(), "Z/3");
        let again = parse_group_file(&render_group_file(&g).unwrap(), None).unwrap();
        assert_eq!(again.order(), Some(3));
    }

    #[test]
    fn parses_products_of_builtins() {
        let text = "[backend]\nkind = free_product\nfactor = builtin:z2\nfactor = builtin:z3\n";
        // both builtins use letters a/A, which clash
        assert!(parse_group_file(text, None).is_err());
        let text = "[backend]\nkind = direct_product\nname = Z^2\nfactor = builtin:z\n";
        let g = parse_group_file(text, None).unwrap();
        assert_eq!(g.backend_kind(), "direct_product");
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_group_file("[alphabet]\nabc\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_group_file("[backend]\nkind = finite\ngens = 1 x\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn free_from_rank() {
        let g = parse_group_file("[backend]\nkind = free\nrank = 2\n", None).unwrap();
        assert_eq!(g.alphabet().num_letters(), 4);
    }
}

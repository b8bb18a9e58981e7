use std::collections::HashMap;

use super::{Cfg, GSym};
use crate::error::{Error, Result};

/// TERM, BIN (with shared suffixes), DEL, UNIT, then prune.
pub(super) fn to_cnf(g: &Cfg) -> Result<(Cfg, Vec<Option<usize>>)> {
    let (g, _) = g.prune_with_map();
    if g.nullable()[g.start()] && !g.productions().is_empty() {
        return Err(Error::EpsilonInLanguage);
    }
    let originals = g.num_nonterminals();
    let mut h = g.clone();

    // TERM: terminals inside long right-hand sides get their own nonterminal
    let mut term_nt: HashMap<crate::words::Symbol, usize> = HashMap::new();
    let mut prods: Vec<(usize, Vec<GSym>)> = Vec::new();
    for p in g.productions() {
        let rhs = if p.rhs.len() >= 2 {
            p.rhs
                .iter()
                .map(|&s| match s {
                    GSym::T(t) => {
                        let n = *term_nt.entry(t).or_insert_with(|| {
                            let name = format!("T[{}]", g.alphabet().name(t));
                            h.fresh_nonterminal(&name)
                        });
                        GSym::N(n)
                    }
                    n => n,
                })
                .collect()
        } else {
            p.rhs.clone()
        };
        prods.push((p.lhs, rhs));
    }
    for (&t, &n) in &term_nt {
        prods.push((n, vec![GSym::T(t)]));
    }

    // BIN: X1 X2 ... Xk becomes X1 <X2...Xk>, suffix nonterminals shared
    let mut suffix_nt: HashMap<Vec<GSym>, usize> = HashMap::new();
    let mut binary: Vec<(usize, Vec<GSym>)> = Vec::new();
    for (lhs, rhs) in prods {
        if rhs.len() <= 2 {
            binary.push((lhs, rhs));
            continue;
        }
        let mut cur_lhs = lhs;
        let mut i = 0;
        loop {
            let rest = &rhs[i + 1..];
            if rest.len() == 1 {
                binary.push((cur_lhs, vec![rhs[i], rest[0]]));
                break;
            }
            let (n, new) = match suffix_nt.get(rest) {
                Some(&n) => (n, false),
                None => {
                    let name = format!("<{}>", rest.iter().map(|&s| h.render_symbol(s)).collect::<Vec<_>>().join(" "));
                    let n = h.fresh_nonterminal(&name);
                    suffix_nt.insert(rest.to_vec(), n);
                    (n, true)
                }
            };
            binary.push((cur_lhs, vec![rhs[i], GSym::N(n)]));
            if !new {
                break;
            }
            cur_lhs = n;
            i += 1;
        }
    }

    // DEL: drop nullable occurrences, then ε-productions
    let mut tmp = Cfg::new(h.alphabet().clone(), h.name(h.start()));
    for name in h.names() {
        tmp.nonterminal(name);
    }
    for (lhs, rhs) in &binary {
        tmp.add_production(*lhs, rhs.clone());
    }
    let nullable = tmp.nullable();
    let mut nonempty: Vec<(usize, Vec<GSym>)> = Vec::new();
    for (lhs, rhs) in binary {
        match rhs.as_slice() {
            [] => {}
            [x, y] => {
                let nx = matches!(x, GSym::N(n) if nullable[*n]);
                let ny = matches!(y, GSym::N(n) if nullable[*n]);
                nonempty.push((lhs, rhs.clone()));
                if nx {
                    nonempty.push((lhs, vec![*y]));
                }
                if ny {
                    nonempty.push((lhs, vec![*x]));
                }
            }
            _ => nonempty.push((lhs, rhs)),
        }
    }

    // UNIT: A gets every non-unit production of each B with A =>* B by units
    let n = h.num_nonterminals();
    let mut unit_succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut proper: Vec<Vec<Vec<GSym>>> = vec![Vec::new(); n];
    for (lhs, rhs) in nonempty {
        match rhs.as_slice() {
            [GSym::N(b)] => unit_succ[lhs].push(*b),
            _ => proper[lhs].push(rhs),
        }
    }
    let mut out = Cfg::new(h.alphabet().clone(), h.name(h.start()));
    for name in h.names() {
        out.nonterminal(name);
    }
    for a in 0..n {
        let mut seen = vec![false; n];
        seen[a] = true;
        let mut stack = vec![a];
        while let Some(b) = stack.pop() {
            for rhs in &proper[b] {
                out.add_production(a, rhs.clone());
            }
            for &c in &unit_succ[b] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
    }
    let (pruned, map) = out.prune_with_map();
    let mut origin = vec![None; pruned.num_nonterminals()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = new {
            if old < originals {
                origin[*new] = Some(old);
            }
        }
    }
    Ok((pruned, origin))
}

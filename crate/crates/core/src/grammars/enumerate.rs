//! Bounded enumeration of context-free languages.
//!
//! Words are packed into `u128` (a fixed number of bits per symbol) and the
//! sets `L_A ∩ Σ_#^ℓ` are built for ℓ = 1, 2, ... in turn. After removing
//! ε-productions every part of a right-hand side of length at least two is
//! strictly shorter than the whole, so only unit productions need a
//! fixpoint within one length.

use std::collections::HashSet;

use super::{Cfg, GSym};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{Symbol, Word};

struct Packer {
    bits: u32,
    mask: u128,
}

impl Packer {
    fn new(g: &Cfg, max_len: usize) -> Result<Packer> {
        let k = g.alphabet().num_symbols() as u32;
        let bits = (32 - k.saturating_sub(1).leading_zeros()).max(1);
        if bits as usize * max_len > 128 {
            return Err(Error::OutputBudgetExceeded(128 / bits as usize));
        }
        Ok(Packer { bits, mask: (1u128 << bits) - 1 })
    }

    fn unpack(&self, g: &Cfg, mut x: u128, len: usize) -> Word {
        let mut v = vec![Symbol::HASH; len];
        for i in (0..len).rev() {
            v[i] = g.alphabet().symbol_at((x & self.mask) as usize);
            x >>= self.bits;
        }
        Word::from(v)
    }
}

enum Part {
    T(u128),
    N(usize),
}

/// `L(G)` restricted to words of length at most `max_len`, sorted.
pub fn enumerate_cfg(g: &Cfg, max_len: usize, limits: &Limits) -> Result<Vec<Word>> {
    let mut all = enumerate_nonterminals(g, max_len, limits)?;
    Ok(std::mem::take(&mut all[g.start()]))
}

/// Bounded languages of every nonterminal, each sorted.
pub fn enumerate_nonterminals(g: &Cfg, max_len: usize, limits: &Limits) -> Result<Vec<Vec<Word>>> {
    let packer = Packer::new(g, max_len)?;
    let n = g.num_nonterminals();
    let nullable = g.nullable();

    // ε-free productions: every subset of nullable occurrences removed
    let mut rules: Vec<(usize, Vec<Part>)> = Vec::new();
    let mut units: Vec<Vec<usize>> = vec![Vec::new(); n]; // units[b] = {a : a -> b}
    let mut seen = HashSet::new();
    for p in g.productions() {
        let opt: Vec<usize> =
            (0..p.rhs.len()).filter(|&i| matches!(p.rhs[i], GSym::N(m) if nullable[m])).collect();
        if opt.len() > 16 {
            return Err(Error::OutputBudgetExceeded(limits.output));
        }
        for mask in 0u32..(1 << opt.len()) {
            let body: Vec<GSym> = p
                .rhs
                .iter()
                .enumerate()
                .filter(|(i, _)| opt.iter().position(|o| o == i).is_none_or(|k| mask & (1 << k) == 0))
                .map(|(_, s)| *s)
                .collect();
            if body.is_empty() || !seen.insert((p.lhs, body.clone())) {
                continue;
            }
            if let [GSym::N(b)] = body.as_slice() {
                if *b != p.lhs {
                    units[*b].push(p.lhs);
                }
                continue;
            }
            let parts = body
                .iter()
                .map(|s| match *s {
                    GSym::T(t) => Part::T(g.alphabet().index_of(t) as u128),
                    GSym::N(m) => Part::N(m),
                })
                .collect();
            rules.push((p.lhs, parts));
        }
    }

    // sets[a][len]
    let mut sets: Vec<Vec<Vec<u128>>> = vec![vec![Vec::new(); max_len + 1]; n];
    let mut members: Vec<HashSet<u128>> = vec![HashSet::new(); n];
    let mut total = 0usize;
    for len in 1..=max_len {
        for a in 0..n {
            members[a].clear();
        }
        for (lhs, parts) in &rules {
            let mut fresh = Vec::new();
            expand(&packer, &sets, parts, 0, len, 0, &mut fresh);
            for x in fresh {
                if members[*lhs].insert(x) {
                    sets[*lhs][len].push(x);
                    total += 1;
                }
            }
            if total > limits.output {
                return Err(Error::OutputBudgetExceeded(limits.output));
            }
        }
        // unit closure at this length
        let mut work: Vec<usize> = (0..n).filter(|&b| !sets[b][len].is_empty()).collect();
        while let Some(b) = work.pop() {
            for &a in &units[b] {
                let mut grew = false;
                for i in 0..sets[b][len].len() {
                    let x = sets[b][len][i];
                    if members[a].insert(x) {
                        sets[a][len].push(x);
                        total += 1;
                        grew = true;
                    }
                }
                if grew {
                    work.push(a);
                }
            }
            if total > limits.output {
                return Err(Error::OutputBudgetExceeded(limits.output));
            }
        }
    }

    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut words: Vec<Word> = Vec::new();
        if nullable[a] {
            words.push(Word::empty());
        }
        for len in 1..=max_len {
            words.extend(sets[a][len].iter().map(|&x| packer.unpack(g, x, len)));
        }
        words.sort();
        out.push(words);
    }
    Ok(out)
}

// Appends every packed word of exactly `remaining` symbols derivable from
// `parts[i..]`, prefixed by `prefix`.
fn expand(
    packer: &Packer,
    sets: &[Vec<Vec<u128>>],
    parts: &[Part],
    i: usize,
    remaining: usize,
    prefix: u128,
    out: &mut Vec<u128>,
) {
    if i == parts.len() {
        if remaining == 0 {
            out.push(prefix);
        }
        return;
    }
    let rest = parts.len() - i - 1;
    if remaining < rest + 1 {
        return;
    }
    match parts[i] {
        Part::T(code) => expand(packer, sets, parts, i + 1, remaining - 1, (prefix << packer.bits) | code, out),
        Part::N(m) => {
            // a lone nonterminal covering everything is a unit rule, handled elsewhere
            let max_here = remaining - rest;
            for l in 1..=max_here {
                if sets[m][l].is_empty() || (i == 0 && rest == 0) {
                    continue;
                }
                let shift = packer.bits * l as u32;
                for &x in &sets[m][l] {
                    expand(packer, sets, parts, i + 1, remaining - l, (prefix << shift) | x, out);
                }
            }
        }
    }
}

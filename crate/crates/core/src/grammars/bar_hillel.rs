//! Intersection of a grammar with a regular language.
//!
//! The productive relation `Rel_X ⊆ Q × Q` of every symbol is computed as a
//! boolean-matrix fixpoint, then only the triples `(X, p, q)` reachable from
//! `(S, q0, f)` are materialized. Long right-hand sides are split through
//! helper nonterminals keyed by `(suffix, p, q)`, so the result has
//! right-hand sides of length at most two.

use std::collections::HashMap;

use super::{Cfg, GSym};
use crate::automata::{Dfa, Fsa};
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone)]
struct Rel {
    q: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Rel {
    fn new(q: usize) -> Rel {
        let words = q.div_ceil(64);
        Rel { q, words, bits: vec![0; q * words] }
    }

    fn get(&self, p: usize, r: usize) -> bool {
        self.bits[p * self.words + r / 64] >> (r % 64) & 1 == 1
    }

    fn set(&mut self, p: usize, r: usize) {
        self.bits[p * self.words + r / 64] |= 1 << (r % 64);
    }

    fn identity(q: usize) -> Rel {
        let mut r = Rel::new(q);
        for p in 0..q {
            r.set(p, p);
        }
        r
    }

    fn compose(&self, other: &Rel) -> Rel {
        let mut out = Rel::new(self.q);
        for p in 0..self.q {
            for m in 0..self.q {
                if self.get(p, m) {
                    let (dst, src) = (p * self.words, m * self.words);
                    for k in 0..self.words {
                        out.bits[dst + k] |= other.bits[src + k];
                    }
                }
            }
        }
        out
    }

    /// Bitwise or; returns whether anything changed.
    fn absorb(&mut self, other: &Rel) -> bool {
        let mut changed = false;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            let n = *a | *b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }
}

struct Builder<'a> {
    g: &'a Cfg,
    dfa: Dfa,
    rel: Vec<Rel>,
    by_lhs: Vec<Vec<usize>>,
    out: Cfg,
    triples: HashMap<(usize, usize, usize), usize>,
    helpers: HashMap<(Vec<GSym>, usize, usize), usize>,
    feasible: HashMap<(Vec<GSym>, usize, usize), bool>,
    queue: Vec<Item>,
    limits: &'a Limits,
}

enum Item {
    Triple(usize, usize, usize, usize),
    Helper(Vec<GSym>, usize, usize, usize),
}

impl Builder<'_> {
    fn sym_rel(&self, s: GSym, p: usize, q: usize) -> bool {
        match s {
            GSym::T(t) => self.dfa.step(p, t) == Some(q),
            GSym::N(m) => self.rel[m].get(p, q),
        }
    }

    fn seq_feasible(&mut self, seq: &[GSym], p: usize, q: usize) -> bool {
        if seq.is_empty() {
            return p == q;
        }
        if seq.len() == 1 {
            return self.sym_rel(seq[0], p, q);
        }
        let key = (seq.to_vec(), p, q);
        if let Some(&b) = self.feasible.get(&key) {
            return b;
        }
        let mut ok = false;
        for r in 0..self.dfa.num_states() {
            if self.sym_rel(seq[0], p, r) && self.seq_feasible(&seq[1..], r, q) {
                ok = true;
                break;
            }
        }
        self.feasible.insert(key, ok);
        ok
    }

    fn check_budget(&self) -> Result<()> {
        if self.out.num_nonterminals() > self.limits.states {
            return Err(Error::StateBudgetExceeded(self.limits.states));
        }
        Ok(())
    }

    fn triple(&mut self, a: usize, p: usize, q: usize) -> Result<usize> {
        if let Some(&id) = self.triples.get(&(a, p, q)) {
            return Ok(id);
        }
        let id = self.out.fresh_nonterminal(&format!("({},{p},{q})", self.g.name(a)));
        self.triples.insert((a, p, q), id);
        self.queue.push(Item::Triple(a, p, q, id));
        self.check_budget()?;
        Ok(id)
    }

    fn symbol(&mut self, s: GSym, p: usize, q: usize) -> Result<GSym> {
        Ok(match s {
            GSym::T(t) => GSym::T(t),
            GSym::N(m) => GSym::N(self.triple(m, p, q)?),
        })
    }

    fn helper(&mut self, seq: &[GSym], p: usize, q: usize) -> Result<usize> {
        let key = (seq.to_vec(), p, q);
        if let Some(&id) = self.helpers.get(&key) {
            return Ok(id);
        }
        let label = seq.iter().map(|&s| self.g.render_symbol(s)).collect::<Vec<_>>().join(" ");
        let id = self.out.fresh_nonterminal(&format!("[{label}],{p},{q}"));
        self.helpers.insert(key, id);
        self.queue.push(Item::Helper(seq.to_vec(), p, q, id));
        self.check_budget()?;
        Ok(id)
    }

    // Productions for `lhs` deriving `seq` from `p` to `q`.
    fn expand(&mut self, lhs: usize, seq: &[GSym], p: usize, q: usize) -> Result<()> {
        match seq.len() {
            0 => {
                if p == q {
                    self.out.add_production(lhs, Vec::new());
                }
            }
            1 => {
                if self.sym_rel(seq[0], p, q) {
                    let s = self.symbol(seq[0], p, q)?;
                    self.out.add_production(lhs, vec![s]);
                }
            }
            _ => {
                for r in 0..self.dfa.num_states() {
                    if !self.sym_rel(seq[0], p, r) || !self.seq_feasible(&seq[1..], r, q) {
                        continue;
                    }
                    let first = self.symbol(seq[0], p, r)?;
                    let rest = if seq.len() == 2 {
                        self.symbol(seq[1], r, q)?
                    } else {
                        GSym::N(self.helper(&seq[1..], r, q)?)
                    };
                    self.out.add_production(lhs, vec![first, rest]);
                }
            }
        }
        Ok(())
    }
}

pub(super) fn intersect_regular(g: &Cfg, a: &Fsa, limits: &Limits) -> Result<Cfg> {
    let dfa = a.to_dfa(limits)?.minimize();
    let nq = dfa.num_states();
    let n = g.num_nonterminals();

    // productive relations by fixpoint
    let mut term_rel: HashMap<crate::words::Symbol, Rel> = HashMap::new();
    for t in g.alphabet().symbols_with_hash() {
        let mut r = Rel::new(nq);
        for p in 0..nq {
            if let Some(q) = dfa.step(p, t) {
                r.set(p, q);
            }
        }
        term_rel.insert(t, r);
    }
    let mut rel = vec![Rel::new(nq); n];
    let mut changed = true;
    while changed {
        changed = false;
        for p in g.productions() {
            let mut acc = Rel::identity(nq);
            for s in &p.rhs {
                let r = match *s {
                    GSym::T(t) => &term_rel[&t],
                    GSym::N(m) => &rel[m],
                };
                acc = acc.compose(r);
            }
            changed |= rel[p.lhs].absorb(&acc);
        }
    }

    let mut b = Builder {
        g,
        dfa,
        rel,
        by_lhs: g.productions_by_lhs(),
        out: Cfg::new(g.alphabet().clone(), "S"),
        triples: HashMap::new(),
        helpers: HashMap::new(),
        feasible: HashMap::new(),
        queue: Vec::new(),
        limits,
    };
    let start = b.out.start();
    for f in 0..nq {
        if b.dfa.is_accepting(f) && b.rel[g.start()].get(0, f) {
            let t = b.triple(g.start(), 0, f)?;
            b.out.add_production(start, vec![GSym::N(t)]);
        }
    }
    while let Some(item) = b.queue.pop() {
        match item {
            Item::Triple(x, p, q, id) => {
                for i in b.by_lhs[x].clone() {
                    let rhs = g.productions()[i].rhs.clone();
                    b.expand(id, &rhs, p, q)?;
                }
            }
            Item::Helper(seq, p, q, id) => b.expand(id, &seq, p, q)?,
        }
    }
    Ok(b.out.prune())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammars::{enumerate_cfg, parse_cfg};
    use crate::words::{Alphabet, Word};

    #[test]
    fn with_everything_and_nothing() {
        let al = Alphabet::standard(1);
        let g = parse_cfg("S -> a S A | # | S S\n", al.clone()).unwrap();
        let lim = Limits::default();
        let all = g.intersect_regular(&Fsa::sigma_hash_star(al.clone()), &lim).unwrap();
        assert_eq!(enumerate_cfg(&all, 7, &lim).unwrap(), enumerate_cfg(&g, 7, &lim).unwrap());
        let none = g.intersect_regular(&Fsa::empty(al.clone()), &lim).unwrap();
        assert!(none.productions().is_empty());
    }

    #[test]
    fn filters_by_regular_language() {
        let al = Alphabet::standard(1);
        let g = parse_cfg("S -> a S A | # | S S\n", al.clone()).unwrap();
        let lim = Limits::default();
        // exactly one marker
        let mut one = Fsa::sigma_star(al.clone());
        one.set_terminal(0, false);
        let t = one.add_state();
        one.set_terminal(t, true);
        one.add_edge(0, Word::hash(), t);
        for l in al.letters() {
            one.add_edge(t, Word::from(vec![l]), t);
        }
        let h = g.intersect_regular(&one, &lim).unwrap();
        let want: Vec<Word> = enumerate_cfg(&g, 9, &lim).unwrap().into_iter().filter(|w| w.hash_count() == 1).collect();
        assert_eq!(enumerate_cfg(&h, 9, &lim).unwrap(), want);
    }
}

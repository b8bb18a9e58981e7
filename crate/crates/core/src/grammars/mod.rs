//! Context-free grammars over `Σ_#`.
//!
//! Text format: one production per line, `A -> X Y Z`, symbols separated by
//! whitespace. A token that is a letter name of the alphabet or `#` is a
//! terminal, any other token names a nonterminal, and `eps` stands for the
//! empty right-hand side. Alternatives may be separated with `|`. The left
//! side of the first production is the start symbol.

mod bar_hillel;
mod cnf;
mod cyk;
mod enumerate;
mod pumping;
mod rank;
mod transduce;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

pub use cyk::{cyk_member, cyk_parse, ParseTree};
pub use enumerate::{enumerate_cfg, enumerate_nonterminals};
pub use pumping::{default_pumping_constant, pumping_pairs};
pub use rank::{rank_analysis, shortest_words, RankEntry, RankOptions, RankTable};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Symbol, Word};

/// A grammar symbol: terminal or nonterminal index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GSym {
    T(Symbol),
    N(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<GSym>,
}

#[derive(Clone)]
pub struct Cfg {
    alphabet: Arc<Alphabet>,
    names: Vec<String>,
    by_name: HashMap<String, usize>,
    start: usize,
    productions: Vec<Production>,
    seen: HashSet<Production>,
}

impl Cfg {
    /// A grammar with only its start symbol; generates nothing.
    pub fn new(alphabet: Arc<Alphabet>, start: &str) -> Cfg {
        let mut g = Cfg {
            alphabet,
            names: Vec::new(),
            by_name: HashMap::new(),
            start: 0,
            productions: Vec::new(),
            seen: HashSet::new(),
        };
        g.nonterminal(start);
        g
    }

    /// Index of the nonterminal called `name`, created if missing.
    pub fn nonterminal(&mut self, name: &str) -> usize {
        if let Some(&i) = self.by_name.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    /// Creates a nonterminal whose name does not clash with existing ones.
    pub fn fresh_nonterminal(&mut self, base: &str) -> usize {
        let mut name = base.to_string();
        while self.by_name.contains_key(&name) {
            name.push('\'');
        }
        self.nonterminal(&name)
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Adds `lhs -> rhs`; duplicates are ignored. Returns whether it was new.
    pub fn add_production(&mut self, lhs: usize, rhs: Vec<GSym>) -> bool {
        debug_assert!(lhs < self.names.len());
        debug_assert!(rhs.iter().all(|s| match s {
            GSym::N(n) => *n < self.names.len(),
            GSym::T(t) => self.alphabet.contains(*t),
        }));
        let p = Production { lhs, rhs };
        if self.seen.contains(&p) {
            return false;
        }
        self.seen.insert(p.clone());
        self.productions.push(p);
        true
    }

    /// `lhs -> w` for a terminal word.
    pub fn add_word_production(&mut self, lhs: usize, w: &Word) -> bool {
        self.add_production(lhs, w.iter().map(|&s| GSym::T(s)).collect())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn set_start(&mut self, start: usize) {
        assert!(start < self.names.len());
        self.start = start;
    }

    pub fn num_nonterminals(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, n: usize) -> &str {
        &self.names[n]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Production indices grouped by left-hand side.
    pub fn productions_by_lhs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.names.len()];
        for (i, p) in self.productions.iter().enumerate() {
            out[p.lhs].push(i);
        }
        out
    }

    pub fn is_cnf(&self) -> bool {
        self.productions.iter().all(is_cnf_production)
    }

    pub(crate) fn check_cnf(&self) -> Result<()> {
        match self.productions.iter().find(|p| !is_cnf_production(p)) {
            Some(p) => Err(Error::NotCnf(self.render_production(p))),
            None => Ok(()),
        }
    }

    pub fn render_symbol(&self, s: GSym) -> String {
        match s {
            GSym::T(t) => self.alphabet.name(t).to_string(),
            GSym::N(n) => self.names[n].clone(),
        }
    }

    pub fn render_production(&self, p: &Production) -> String {
        let rhs = if p.rhs.is_empty() {
            "eps".to_string()
        } else {
            p.rhs.iter().map(|&s| self.render_symbol(s)).collect::<Vec<_>>().join(" ")
        };
        format!("{} -> {}", self.names[p.lhs], rhs)
    }

    /// Nonterminals deriving the empty word.
    pub fn nullable(&self) -> Vec<bool> {
        let mut nullable = vec![false; self.names.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !nullable[p.lhs] && p.rhs.iter().all(|s| matches!(s, GSym::N(n) if nullable[*n])) {
                    nullable[p.lhs] = true;
                    changed = true;
                }
            }
        }
        nullable
    }

    /// Nonterminals deriving at least one terminal word.
    pub fn productive(&self) -> Vec<bool> {
        let n = self.names.len();
        let mut productive = vec![false; n];
        let mut pending: Vec<usize> = Vec::with_capacity(self.productions.len());
        let mut uses: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queue = Vec::new();
        for (i, p) in self.productions.iter().enumerate() {
            let mut count = 0;
            for s in &p.rhs {
                if let GSym::N(m) = s {
                    count += 1;
                    uses[*m].push(i);
                }
            }
            pending.push(count);
            if count == 0 && !productive[p.lhs] {
                productive[p.lhs] = true;
                queue.push(p.lhs);
            }
        }
        while let Some(m) = queue.pop() {
            for &i in &uses[m] {
                pending[i] -= 1;
                let lhs = self.productions[i].lhs;
                if pending[i] == 0 && !productive[lhs] {
                    productive[lhs] = true;
                    queue.push(lhs);
                }
            }
        }
        productive
    }

    /// Removes nonproductive and unreachable nonterminals and every
    /// production mentioning them. The start symbol always survives and
    /// becomes index 0.
    pub fn prune(&self) -> Cfg {
        self.prune_with_map().0
    }

    pub(crate) fn prune_with_map(&self) -> (Cfg, Vec<Option<usize>>) {
        let productive = self.productive();
        let ok = |p: &Production| productive[p.lhs] && p.rhs.iter().all(|s| !matches!(s, GSym::N(m) if !productive[*m]));
        let by_lhs = self.productions_by_lhs();
        let mut reach = vec![false; self.names.len()];
        reach[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(a) = stack.pop() {
            for &i in &by_lhs[a] {
                let p = &self.productions[i];
                if !ok(p) {
                    continue;
                }
                for s in &p.rhs {
                    if let GSym::N(m) = *s {
                        if !reach[m] {
                            reach[m] = true;
                            stack.push(m);
                        }
                    }
                }
            }
        }
        let mut map = vec![None; self.names.len()];
        let mut out = Cfg::new(self.alphabet.clone(), &self.names[self.start]);
        map[self.start] = Some(0);
        for (i, name) in self.names.iter().enumerate() {
            if i != self.start && reach[i] && productive[i] {
                map[i] = Some(out.nonterminal(name));
            }
        }
        for p in &self.productions {
            if reach[p.lhs] && ok(p) {
                let rhs = p
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        GSym::N(m) => GSym::N(map[m].unwrap()),
                        t => t,
                    })
                    .collect();
                out.add_production(map[p.lhs].unwrap(), rhs);
            }
        }
        (out, map)
    }

    /// Chomsky normal form; fails when the empty word is in the language.
    pub fn to_cnf(&self) -> Result<Cfg> {
        Ok(cnf::to_cnf(self)?.0)
    }

    /// Chomsky normal form together with, for every new nonterminal, the
    /// original nonterminal it stands for (`None` for helper symbols).
    pub fn to_cnf_with_origin(&self) -> Result<(Cfg, Vec<Option<usize>>)> {
        cnf::to_cnf(self)
    }

    /// Grammar for the intersection with a regular language (Bar-Hillel).
    pub fn intersect_regular(&self, a: &crate::automata::Fsa, limits: &crate::limits::Limits) -> Result<Cfg> {
        bar_hillel::intersect_regular(self, a, limits)
    }

    /// Grammar for the image under a rational transduction.
    pub fn apply_transduction(
        &self,
        t: &crate::transducers::Transducer,
        limits: &crate::limits::Limits,
    ) -> Result<Cfg> {
        transduce::apply_transduction(self, t, limits)
    }
}

fn is_cnf_production(p: &Production) -> bool {
    matches!(p.rhs.as_slice(), [GSym::T(_)] | [GSym::N(_), GSym::N(_)])
}

impl fmt::Debug for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_cfg(self))
    }
}

pub fn parse_cfg(text: &str, alphabet: Arc<Alphabet>) -> Result<Cfg> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let (lhs, rhs) = line.split_once("->").ok_or(Error::Parse { line: i + 1, message: "expected `A -> ...`".into() })?;
        let lhs = lhs.trim();
        if lhs.is_empty() || lhs.contains(char::is_whitespace) {
            return Err(Error::Parse { line: i + 1, message: format!("bad left-hand side {lhs:?}") });
        }
        lines.push((i + 1, lhs.to_string(), rhs.to_string()));
    }
    let Some((_, first, _)) = lines.first() else {
        return Err(Error::Parse { line: 0, message: "no productions".into() });
    };
    let mut g = Cfg::new(alphabet.clone(), first);
    for (ln, lhs, rhs) in lines {
        let a = g.nonterminal(&lhs);
        for alt in rhs.split('|') {
            let mut body = Vec::new();
            let toks: Vec<&str> = alt.split_whitespace().collect();
            if toks.is_empty() {
                return Err(Error::Parse { line: ln, message: "empty alternative (write eps)".into() });
            }
            if toks != ["eps"] {
                for tok in toks {
                    if tok == "eps" {
                        return Err(Error::Parse { line: ln, message: "eps must stand alone".into() });
                    }
                    let mut cs = tok.chars();
                    let sym = match (cs.next(), cs.next()) {
                        (Some(c), None) => alphabet.lookup(c),
                        _ => None,
                    };
                    body.push(match sym {
                        Some(s) => GSym::T(s),
                        None => GSym::N(g.nonterminal(tok)),
                    });
                }
            }
            g.add_production(a, body);
        }
    }
    Ok(g)
}

pub fn render_cfg(g: &Cfg) -> String {
    let mut out = String::new();
    let by_lhs = g.productions_by_lhs();
    let mut order: Vec<usize> = vec![g.start];
    order.extend((0..g.num_nonterminals()).filter(|&n| n != g.start));
    for n in order {
        for &i in &by_lhs[n] {
            out.push_str(&g.render_production(&g.productions[i]));
            out.push('\n');
        }
    }
    out
}

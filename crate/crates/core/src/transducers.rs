//! Rational transductions: finite automata whose edges carry pairs of words.
//!
//! Both tapes range over the same alphabet `Σ_#`. Composition follows the
//! relational convention `S ∘ T = {(u, w) | ∃v (u, v) ∈ T, (v, w) ∈ S}`:
//! `T` is applied first.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::automata::format::{parse_label, parse_state, render_label};
use crate::automata::Fsa;
use crate::error::{Error, Result};
use crate::grammars::{Cfg, GSym};
use crate::limits::Limits;
use crate::words::{formal_inverse, Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairEdge {
    pub from: usize,
    pub input: Word,
    pub output: Word,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct Transducer {
    alphabet: Arc<Alphabet>,
    num_states: usize,
    initial: Vec<usize>,
    terminal: Vec<bool>,
    edges: Vec<PairEdge>,
}

impl Transducer {
    pub fn new(alphabet: Arc<Alphabet>, num_states: usize) -> Transducer {
        Transducer { alphabet, num_states, initial: Vec::new(), terminal: vec![false; num_states], edges: Vec::new() }
    }

    /// The empty relation.
    pub fn empty(alphabet: Arc<Alphabet>) -> Transducer {
        let mut t = Transducer::new(alphabet, 1);
        t.set_initial(0);
        t
    }

    /// Exactly the given pairs.
    pub fn from_pairs(alphabet: Arc<Alphabet>, pairs: &[(Word, Word)]) -> Transducer {
        let mut t = Transducer::new(alphabet, 2);
        t.set_initial(0);
        t.set_terminal(1, true);
        for (u, v) in pairs {
            t.add_edge(0, u.clone(), v.clone(), 1);
        }
        t
    }

    /// `{(w, w) | w ∈ Σ*}`.
    pub fn diagonal(alphabet: Arc<Alphabet>) -> Transducer {
        let mut t = Transducer::new(alphabet.clone(), 1);
        t.set_initial(0);
        t.set_terminal(0, true);
        for l in alphabet.letters() {
            let w = Word::from(vec![l]);
            t.add_edge(0, w.clone(), w, 0);
        }
        t
    }

    /// `{(w, w) | w ∈ Σ_#*}`.
    pub fn diagonal_hash(alphabet: Arc<Alphabet>) -> Transducer {
        let mut t = Transducer::diagonal(alphabet);
        t.add_edge(0, Word::hash(), Word::hash(), 0);
        t
    }

    /// `{(xwy, xvy) | x, y ∈ Σ_#*}`, built as `D·(w, v)·D` with `D` the
    /// diagonal over `Σ_#`.
    pub fn context_embed(alphabet: Arc<Alphabet>, w: &Word, v: &Word) -> Transducer {
        let d = Transducer::diagonal_hash(alphabet.clone());
        let mid = Transducer::from_pairs(alphabet, &[(w.clone(), v.clone())]);
        d.product(&mid).product(&d)
    }

    pub fn add_state(&mut self) -> usize {
        self.num_states += 1;
        self.terminal.push(false);
        self.num_states - 1
    }

    pub fn set_initial(&mut self, q: usize) {
        assert!(q < self.num_states);
        if let Err(pos) = self.initial.binary_search(&q) {
            self.initial.insert(pos, q);
        }
    }

    pub fn set_terminal(&mut self, q: usize, terminal: bool) {
        self.terminal[q] = terminal;
    }

    pub fn add_edge(&mut self, from: usize, input: Word, output: Word, to: usize) {
        assert!(from < self.num_states && to < self.num_states);
        self.edges.push(PairEdge { from, input, output, to });
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_terminal(&self, q: usize) -> bool {
        self.terminal[q]
    }

    pub fn terminal_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states).filter(|&q| self.terminal[q])
    }

    pub fn edges(&self) -> &[PairEdge] {
        &self.edges
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        out
    }

    /// Membership of `(u, v)`: breadth-first search over
    /// `(state, input cursor, output cursor)` with a visited set, so
    /// `(ε, ε)`-cycles cannot loop.
    pub fn relate(&self, u: &Word, v: &Word, limits: &Limits) -> Result<bool> {
        let out = self.out_edges();
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
        let mut queue: VecDeque<(usize, usize, usize)> = VecDeque::new();
        for &q in &self.initial {
            if seen.insert((q, 0, 0)) {
                queue.push_back((q, 0, 0));
            }
        }
        while let Some((q, i, j)) = queue.pop_front() {
            if i == u.len() && j == v.len() && self.terminal[q] {
                return Ok(true);
            }
            for &k in &out[q] {
                let e = &self.edges[k];
                if u.symbols()[i..].starts_with(e.input.symbols()) && v.symbols()[j..].starts_with(e.output.symbols()) {
                    let next = (e.to, i + e.input.len(), j + e.output.len());
                    if seen.insert(next) {
                        if seen.len() > limits.search {
                            return Err(Error::SearchBudgetExceeded(limits.search));
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Every related pair with `|u| ≤ max_in` and `|v| ≤ max_out`, sorted.
    pub fn bounded_pairs(&self, max_in: usize, max_out: usize, limits: &Limits) -> Result<Vec<(Word, Word)>> {
        let out = self.out_edges();
        let mut seen: HashSet<(usize, Word, Word)> = HashSet::new();
        let mut stack: Vec<(usize, Word, Word)> = Vec::new();
        for &q in &self.initial {
            if seen.insert((q, Word::empty(), Word::empty())) {
                stack.push((q, Word::empty(), Word::empty()));
            }
        }
        let mut pairs = BTreeSet::new();
        while let Some((q, u, v)) = stack.pop() {
            if self.terminal[q] {
                pairs.insert((u.clone(), v.clone()));
                if pairs.len() > limits.output {
                    return Err(Error::OutputBudgetExceeded(limits.output));
                }
            }
            for &k in &out[q] {
                let e = &self.edges[k];
                if u.len() + e.input.len() > max_in || v.len() + e.output.len() > max_out {
                    continue;
                }
                let next = (e.to, u.concat(&e.input), v.concat(&e.output));
                if !seen.contains(&next) {
                    seen.insert(next.clone());
                    if seen.len() > limits.search {
                        return Err(Error::SearchBudgetExceeded(limits.search));
                    }
                    stack.push(next);
                }
            }
        }
        Ok(pairs.into_iter().collect())
    }

    /// Outputs related to the input `u`, of length at most `max_out`, sorted.
    pub fn image_of(&self, u: &Word, max_out: usize, limits: &Limits) -> Result<Vec<Word>> {
        let out = self.out_edges();
        let mut seen: HashSet<(usize, usize, Word)> = HashSet::new();
        let mut stack: Vec<(usize, usize, Word)> = Vec::new();
        for &q in &self.initial {
            if seen.insert((q, 0, Word::empty())) {
                stack.push((q, 0, Word::empty()));
            }
        }
        let mut images = BTreeSet::new();
        while let Some((q, i, v)) = stack.pop() {
            if i == u.len() && self.terminal[q] {
                images.insert(v.clone());
            }
            for &k in &out[q] {
                let e = &self.edges[k];
                if v.len() + e.output.len() > max_out || !u.symbols()[i..].starts_with(e.input.symbols()) {
                    continue;
                }
                let next = (e.to, i + e.input.len(), v.concat(&e.output));
                if !seen.contains(&next) {
                    seen.insert(next.clone());
                    if seen.len() > limits.search {
                        return Err(Error::SearchBudgetExceeded(limits.search));
                    }
                    stack.push(next);
                }
            }
        }
        Ok(images.into_iter().collect())
    }

    fn disjoint(&self, other: &Transducer) -> (Transducer, usize) {
        let mut out = self.clone();
        let off = out.num_states;
        out.num_states += other.num_states;
        out.terminal.extend_from_slice(&other.terminal);
        out.edges.extend(other.edges.iter().map(|e| PairEdge {
            from: e.from + off,
            input: e.input.clone(),
            output: e.output.clone(),
            to: e.to + off,
        }));
        (out, off)
    }

    pub fn union(&self, other: &Transducer) -> Transducer {
        let (mut out, off) = self.disjoint(other);
        for &q in &other.initial {
            out.set_initial(q + off);
        }
        out
    }

    /// Componentwise concatenation `{(u u', v v')}`.
    pub fn product(&self, other: &Transducer) -> Transducer {
        let (mut out, off) = self.disjoint(other);
        for q in 0..self.num_states {
            out.terminal[q] = false;
        }
        for t in self.terminal_states() {
            for &q in &other.initial {
                out.add_edge(t, Word::empty(), Word::empty(), q + off);
            }
        }
        out
    }

    pub fn star(&self) -> Transducer {
        let mut out = self.clone();
        let hub = out.add_state();
        for &q in &self.initial {
            out.add_edge(hub, Word::empty(), Word::empty(), q);
        }
        for t in self.terminal_states() {
            out.add_edge(t, Word::empty(), Word::empty(), hub);
        }
        out.initial = vec![hub];
        out.terminal[hub] = true;
        out
    }

    /// `ρ⁻¹ = {(v, w) | (w, v) ∈ ρ}`.
    pub fn inverse_relation(&self) -> Transducer {
        let mut out = self.clone();
        for e in &mut out.edges {
            std::mem::swap(&mut e.input, &mut e.output);
        }
        out
    }

    /// Splits every edge into steps labelled `(x, ε)`, `(ε, y)` or `(ε, ε)`
    /// with single symbols `x`, `y`.
    pub fn letterize(&self) -> Transducer {
        let mut out = Transducer {
            alphabet: self.alphabet.clone(),
            num_states: self.num_states,
            initial: self.initial.clone(),
            terminal: self.terminal.clone(),
            edges: Vec::new(),
        };
        for e in &self.edges {
            let steps: Vec<(Word, Word)> = e
                .input
                .iter()
                .map(|&s| (Word::from(vec![s]), Word::empty()))
                .chain(e.output.iter().map(|&s| (Word::empty(), Word::from(vec![s]))))
                .collect();
            if steps.is_empty() {
                out.edges.push(e.clone());
                continue;
            }
            let mut prev = e.from;
            let n = steps.len();
            for (i, (x, y)) in steps.into_iter().enumerate() {
                let next = if i + 1 == n { e.to } else { out.add_state() };
                out.edges.push(PairEdge { from: prev, input: x, output: y, to: next });
                prev = next;
            }
        }
        out
    }

    /// Keeps states on some initial-to-terminal path.
    pub fn trim(&self) -> Transducer {
        let n = self.num_states;
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for e in &self.edges {
            fwd[e.from].push(e.to);
            bwd[e.to].push(e.from);
        }
        let reach = |starts: Vec<usize>, adj: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            let mut stack = starts;
            for &s in &stack {
                seen[s] = true;
            }
            while let Some(q) = stack.pop() {
                for &r in &adj[q] {
                    if !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            seen
        };
        let a = reach(self.initial.clone(), &fwd);
        let b = reach(self.terminal_states().collect(), &bwd);
        let mut map = vec![usize::MAX; n];
        let mut out = Transducer::new(self.alphabet.clone(), 0);
        for q in 0..n {
            if a[q] && b[q] {
                map[q] = out.add_state();
                out.terminal[map[q]] = self.terminal[q];
            }
        }
        if out.num_states == 0 {
            return Transducer::empty(self.alphabet.clone());
        }
        for &q in &self.initial {
            if map[q] != usize::MAX {
                out.set_initial(map[q]);
            }
        }
        for e in &self.edges {
            if map[e.from] != usize::MAX && map[e.to] != usize::MAX {
                out.edges.push(PairEdge { from: map[e.from], input: e.input.clone(), output: e.output.clone(), to: map[e.to] });
            }
        }
        out
    }

    /// `self ∘ t`: apply `t`, then `self`. The product synchronizes the
    /// output tape of `t` with the input tape of `self` symbol by symbol.
    pub fn compose(&self, t: &Transducer, limits: &Limits) -> Result<Transducer> {
        let s = self.letterize();
        let t = t.letterize();
        let s_out = s.out_edges();
        let t_out = t.out_edges();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut out = Transducer::new(self.alphabet.clone(), 0);
        let mut intern = |out: &mut Transducer, pairs: &mut Vec<(usize, usize)>, key: (usize, usize)| -> Result<usize> {
            if let Some(&i) = index.get(&key) {
                return Ok(i);
            }
            if out.num_states >= limits.states {
                return Err(Error::StateBudgetExceeded(limits.states));
            }
            let i = out.add_state();
            out.terminal[i] = t.terminal[key.0] && s.terminal[key.1];
            index.insert(key, i);
            pairs.push(key);
            Ok(i)
        };
        for &p in &t.initial {
            for &q in &s.initial {
                let i = intern(&mut out, &mut pairs, (p, q))?;
                out.set_initial(i);
            }
        }
        let mut k = 0;
        while k < pairs.len() {
            let (p, q) = pairs[k];
            let from = k;
            for &ei in &t_out[p] {
                let e = &t.edges[ei];
                if e.output.is_empty() {
                    let to = intern(&mut out, &mut pairs, (e.to, q))?;
                    out.edges.push(PairEdge { from, input: e.input.clone(), output: Word::empty(), to });
                } else {
                    for &fi in &s_out[q] {
                        let f = &s.edges[fi];
                        if f.input == e.output {
                            let to = intern(&mut out, &mut pairs, (e.to, f.to))?;
                            out.edges.push(PairEdge { from, input: Word::empty(), output: f.output.clone(), to });
                        }
                    }
                }
            }
            for &fi in &s_out[q] {
                let f = &s.edges[fi];
                if f.input.is_empty() {
                    let to = intern(&mut out, &mut pairs, (p, f.to))?;
                    out.edges.push(PairEdge { from, input: Word::empty(), output: f.output.clone(), to });
                }
            }
            k += 1;
        }
        Ok(out.trim())
    }

    /// `ρ ∩ (L(r) × L(s))` by a product with deterministic acceptors.
    pub fn restrict(&self, r: &Fsa, s: &Fsa, limits: &Limits) -> Result<Transducer> {
        let t = self.letterize();
        let dr = r.to_dfa(limits)?;
        let ds = s.to_dfa(limits)?;
        let t_out = t.out_edges();
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut states: Vec<(usize, usize, usize)> = Vec::new();
        let mut out = Transducer::new(self.alphabet.clone(), 0);
        let mut intern = |out: &mut Transducer, states: &mut Vec<_>, key: (usize, usize, usize)| -> Result<usize> {
            if let Some(&i) = index.get(&key) {
                return Ok(i);
            }
            if out.num_states >= limits.states {
                return Err(Error::StateBudgetExceeded(limits.states));
            }
            let i = out.add_state();
            out.terminal[i] = t.terminal[key.0] && dr.is_accepting(key.1) && ds.is_accepting(key.2);
            index.insert(key, i);
            states.push(key);
            Ok(i)
        };
        for &p in &t.initial {
            let i = intern(&mut out, &mut states, (p, 0, 0))?;
            out.set_initial(i);
        }
        let mut k = 0;
        while k < states.len() {
            let (p, a, b) = states[k];
            for &ei in &t_out[p] {
                let e = &t.edges[ei];
                let a2 = match e.input.symbols() {
                    [] => Some(a),
                    [x] => dr.step(a, *x),
                    _ => unreachable!("letterized"),
                };
                let b2 = match e.output.symbols() {
                    [] => Some(b),
                    [y] => ds.step(b, *y),
                    _ => unreachable!("letterized"),
                };
                if let (Some(a2), Some(b2)) = (a2, b2) {
                    let to = intern(&mut out, &mut states, (e.to, a2, b2))?;
                    out.edges.push(PairEdge { from: k, input: e.input.clone(), output: e.output.clone(), to });
                }
            }
            k += 1;
        }
        Ok(out.trim())
    }

    /// Acceptor of `ρ(L(a))`.
    pub fn apply_to_regular(&self, a: &Fsa, limits: &Limits) -> Result<Fsa> {
        let t = self.letterize();
        let d = a.to_dfa(limits)?;
        let t_out = t.out_edges();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut states: Vec<(usize, usize)> = Vec::new();
        let mut out = Fsa::new(self.alphabet.clone(), 0);
        let mut intern = |out: &mut Fsa, states: &mut Vec<_>, key: (usize, usize)| -> Result<usize> {
            if let Some(&i) = index.get(&key) {
                return Ok(i);
            }
            if out.num_states() >= limits.states {
                return Err(Error::StateBudgetExceeded(limits.states));
            }
            let i = out.add_state();
            out.set_terminal(i, t.terminal[key.0] && d.is_accepting(key.1));
            index.insert(key, i);
            states.push(key);
            Ok(i)
        };
        for &p in &t.initial {
            let i = intern(&mut out, &mut states, (p, 0))?;
            out.set_initial(i);
        }
        let mut k = 0;
        while k < states.len() {
            let (p, q) = states[k];
            for &ei in &t_out[p] {
                let e = &t.edges[ei];
                let q2 = match e.input.symbols() {
                    [] => Some(q),
                    [x] => d.step(q, *x),
                    _ => unreachable!("letterized"),
                };
                if let Some(q2) = q2 {
                    let to = intern(&mut out, &mut states, (e.to, q2))?;
                    out.add_edge(k, e.output.clone(), to);
                }
            }
            k += 1;
        }
        Ok(out)
    }

    /// `{(w, v) | (w⁻¹, v⁻¹) ∈ ρ}`: edges reversed with both labels
    /// inverted, initial and terminal states exchanged.
    pub fn invert_both(&self) -> Result<Transducer> {
        let mut out = Transducer::new(self.alphabet.clone(), self.num_states);
        for e in &self.edges {
            out.edges.push(PairEdge {
                from: e.to,
                input: formal_inverse(&e.input)?,
                output: formal_inverse(&e.output)?,
                to: e.from,
            });
        }
        for t in self.terminal_states() {
            out.set_initial(t);
        }
        for &q in &self.initial {
            out.terminal[q] = true;
        }
        Ok(out)
    }

    /// Linear grammar for `{u#w | (u, w⁻¹) ∈ ρ}`: a nonterminal `A<p>` per
    /// state, `A<p> -> x A<q> y⁻¹` per edge and `A<q> -> #` per terminal
    /// state. Several initial states get a fresh start symbol with unit
    /// productions.
    pub fn to_linear_grammar(&self) -> Result<Cfg> {
        let name = |q: usize| format!("A<{q}>");
        let (mut g, offset) = if self.initial.len() == 1 {
            let mut g = Cfg::new(self.alphabet.clone(), &name(self.initial[0]));
            for q in 0..self.num_states {
                g.nonterminal(&name(q));
            }
            (g, None)
        } else {
            let g = Cfg::new(self.alphabet.clone(), "S");
            (g, Some(()))
        };
        let ids: Vec<usize> = (0..self.num_states).map(|q| g.nonterminal(&name(q))).collect();
        if offset.is_some() {
            for &q in &self.initial {
                g.add_production(g.start(), vec![GSym::N(ids[q])]);
            }
        }
        for e in &self.edges {
            let mut rhs: Vec<GSym> = e.input.iter().map(|&s| GSym::T(s)).collect();
            rhs.push(GSym::N(ids[e.to]));
            rhs.extend(formal_inverse(&e.output)?.iter().map(|&s| GSym::T(s)));
            g.add_production(ids[e.from], rhs);
        }
        for t in self.terminal_states() {
            g.add_production(ids[t], vec![GSym::T(Symbol::HASH)]);
        }
        Ok(g)
    }

    /// Transducer of a grammar whose productions are all `A -> xBy` or
    /// `A -> x#y` (x, y marker-free words): edges `A --(x, y⁻¹)--> B`, and
    /// `A --(x, y⁻¹)--> F` into a single final state.
    pub fn from_linear_grammar(g: &Cfg) -> Result<Transducer> {
        let n = g.num_nonterminals();
        let mut t = Transducer::new(g.alphabet().clone(), n + 1);
        t.set_initial(g.start());
        t.set_terminal(n, true);
        for p in g.productions() {
            let bad = || Error::NotLinearNormalForm(g.render_production(p));
            let mut middle = None;
            for (i, s) in p.rhs.iter().enumerate() {
                let is_middle = matches!(s, GSym::N(_)) || matches!(s, GSym::T(x) if x.is_hash());
                if is_middle {
                    if middle.is_some() {
                        return Err(bad());
                    }
                    middle = Some(i);
                }
            }
            let Some(m) = middle else { return Err(bad()) };
            let x: Word = p.rhs[..m].iter().map(|s| if let GSym::T(t) = s { *t } else { unreachable!() }).collect();
            let y: Word = p.rhs[m + 1..].iter().map(|s| if let GSym::T(t) = s { *t } else { unreachable!() }).collect();
            let to = match p.rhs[m] {
                GSym::N(b) => b,
                GSym::T(_) => n,
            };
            t.add_edge(p.lhs, x, formal_inverse(&y)?, to);
        }
        Ok(t)
    }
}

/// Transducer text format: `state <id> [initial] [terminal]` and
/// `edge <from> <u>|<v> <to>`, with `-` for the empty word.
pub fn parse_transducer(text: &str, alphabet: Arc<Alphabet>) -> Result<Transducer> {
    let mut t = Transducer::new(alphabet.clone(), 0);
    let ensure = |t: &mut Transducer, q: usize| {
        while t.num_states <= q {
            t.add_state();
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["state", id, flags @ ..] => {
                let q = parse_state(id, ln)?;
                ensure(&mut t, q);
                for f in flags {
                    match *f {
                        "initial" => t.set_initial(q),
                        "terminal" => t.set_terminal(q, true),
                        other => return Err(Error::Parse { line: ln, message: format!("unknown state flag {other:?}") }),
                    }
                }
            }
            ["edge", from, label, to] => {
                let (u, v) = label
                    .split_once('|')
                    .ok_or(Error::Parse { line: ln, message: "pair labels are written u|v".into() })?;
                let from = parse_state(from, ln)?;
                let to = parse_state(to, ln)?;
                ensure(&mut t, from.max(to));
                let u = parse_label(&alphabet, u, ln)?;
                let v = parse_label(&alphabet, v, ln)?;
                t.add_edge(from, u, v, to);
            }
            _ => return Err(Error::Parse { line: ln, message: format!("cannot read {line:?}") }),
        }
    }
    Ok(t)
}

pub fn render_transducer(t: &Transducer) -> String {
    let mut out = String::new();
    for q in 0..t.num_states {
        out.push_str(&format!("state {q}"));
        if t.initial.contains(&q) {
            out.push_str(" initial");
        }
        if t.terminal[q] {
            out.push_str(" terminal");
        }
        out.push('\n');
    }
    for e in &t.edges {
        out.push_str(&format!(
            "edge {} {}|{} {}\n",
            e.from,
            render_label(&t.alphabet, &e.input),
            render_label(&t.alphabet, &e.output),
            e.to
        ));
    }
    out
}

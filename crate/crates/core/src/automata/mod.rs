//! Finite-state acceptors over `Σ_#`.
//!
//! An [`Fsa`] may have several initial states and edges labelled by arbitrary
//! words, including the empty word. Boolean operations and enumeration go
//! through [`Dfa`], the letterized deterministic form.

mod dfa;
pub(crate) mod format;

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

pub use dfa::Dfa;
pub use format::{parse_fsa, render_fsa};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{formal_inverse, Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub label: Word,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct Fsa {
    alphabet: Arc<Alphabet>,
    num_states: usize,
    initial: Vec<usize>,
    terminal: Vec<bool>,
    edges: Vec<Edge>,
}

impl Fsa {
    /// An acceptor with `num_states` states and no edges; accepts nothing.
    pub fn new(alphabet: Arc<Alphabet>, num_states: usize) -> Fsa {
        Fsa { alphabet, num_states, initial: Vec::new(), terminal: vec![false; num_states], edges: Vec::new() }
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Fsa {
        Fsa::new(alphabet, 1).with_initial(0)
    }

    /// Accepts exactly the given words.
    pub fn from_words<'a>(alphabet: Arc<Alphabet>, words: impl IntoIterator<Item = &'a Word>) -> Fsa {
        let mut a = Fsa::new(alphabet, 2).with_initial(0);
        a.set_terminal(1, true);
        for w in words {
            a.add_edge(0, w.clone(), 1);
        }
        a
    }

    pub fn single(alphabet: Arc<Alphabet>, w: &Word) -> Fsa {
        Fsa::from_words(alphabet, [w])
    }

    /// `Σ*` over the letters (no marker).
    pub fn sigma_star(alphabet: Arc<Alphabet>) -> Fsa {
        let mut a = Fsa::new(alphabet.clone(), 1).with_initial(0);
        a.set_terminal(0, true);
        for l in alphabet.letters() {
            a.add_edge(0, Word::from(vec![l]), 0);
        }
        a
    }

    /// `Σ_#*`.
    pub fn sigma_hash_star(alphabet: Arc<Alphabet>) -> Fsa {
        let mut a = Fsa::sigma_star(alphabet);
        a.add_edge(0, Word::hash(), 0);
        a
    }

    /// `R#R#R` for a combing `R`.
    pub fn hash_sandwich(r: &Fsa) -> Fsa {
        let hash = Fsa::single(r.alphabet.clone(), &Word::hash());
        r.concat(&hash).concat(r).concat(&hash).concat(r)
    }

    /// `Σ*#Σ*#Σ*`.
    pub fn two_marker_frame(alphabet: Arc<Alphabet>) -> Fsa {
        Fsa::hash_sandwich(&Fsa::sigma_star(alphabet))
    }

    /// `Σ*##`.
    pub fn trailing_markers(alphabet: Arc<Alphabet>) -> Fsa {
        let mut a = Fsa::sigma_star(alphabet);
        a.set_terminal(0, false);
        let t = a.add_state();
        a.add_edge(0, Word::from(vec![Symbol::HASH, Symbol::HASH]), t);
        a.set_terminal(t, true);
        a
    }

    pub fn with_initial(mut self, q: usize) -> Fsa {
        self.set_initial(q);
        self
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

    pub fn add_edge(&mut self, from: usize, label: Word, to: usize) {
        assert!(from < self.num_states && to < self.num_states);
        debug_assert!(label.iter().all(|&s| self.alphabet.contains(s)));
        self.edges.push(Edge { from, label, to });
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

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn uses_hash(&self) -> bool {
        self.edges.iter().any(|e| e.label.contains_hash())
    }

    /// Membership by simulation over `(state, position)` configurations.
    pub fn accepts(&self, w: &Word) -> bool {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        let mut seen = HashSet::new();
        let mut stack: Vec<(usize, usize)> = self.initial.iter().map(|&q| (q, 0)).collect();
        while let Some((q, pos)) = stack.pop() {
            if !seen.insert((q, pos)) {
                continue;
            }
            if pos == w.len() && self.terminal[q] {
                return true;
            }
            for &i in &out[q] {
                let e = &self.edges[i];
                if w.symbols()[pos..].starts_with(e.label.symbols()) {
                    stack.push((e.to, pos + e.label.len()));
                }
            }
        }
        false
    }

    /// Splits multi-letter labels into chains; empty labels stay.
    pub fn letterize(&self) -> Fsa {
        let mut out = Fsa {
            alphabet: self.alphabet.clone(),
            num_states: self.num_states,
            initial: self.initial.clone(),
            terminal: self.terminal.clone(),
            edges: Vec::new(),
        };
        for e in &self.edges {
            if e.label.len() <= 1 {
                out.edges.push(e.clone());
                continue;
            }
            let mut prev = e.from;
            let n = e.label.len();
            for (i, &s) in e.label.iter().enumerate() {
                let next = if i + 1 == n { e.to } else { out.add_state() };
                out.edges.push(Edge { from: prev, label: Word::from(vec![s]), to: next });
                prev = next;
            }
        }
        out
    }

    pub fn to_dfa(&self, limits: &Limits) -> Result<Dfa> {
        Dfa::from_fsa(self, limits)
    }

    /// Equivalent deterministic acceptor with single-symbol labels.
    pub fn determinize_letterize(&self, limits: &Limits) -> Result<Fsa> {
        Ok(self.to_dfa(limits)?.trim().to_fsa())
    }

    /// Disjoint union; initial states of both operands stay initial.
    pub fn union(&self, other: &Fsa) -> Fsa {
        let mut out = self.clone();
        let off = out.num_states;
        out.num_states += other.num_states;
        out.terminal.extend_from_slice(&other.terminal);
        for &q in &other.initial {
            out.set_initial(q + off);
        }
        out.edges.extend(other.edges.iter().map(|e| Edge { from: e.from + off, label: e.label.clone(), to: e.to + off }));
        out
    }

    pub fn concat(&self, other: &Fsa) -> Fsa {
        let mut out = self.clone();
        let off = out.num_states;
        out.num_states += other.num_states;
        out.terminal = vec![false; self.num_states];
        out.terminal.extend_from_slice(&other.terminal);
        out.edges.extend(other.edges.iter().map(|e| Edge { from: e.from + off, label: e.label.clone(), to: e.to + off }));
        for t in self.terminal_states() {
            for &q in &other.initial {
                out.edges.push(Edge { from: t, label: Word::empty(), to: q + off });
            }
        }
        out
    }

    pub fn star(&self) -> Fsa {
        let mut out = self.clone();
        let hub = out.add_state();
        for &q in &self.initial {
            out.edges.push(Edge { from: hub, label: Word::empty(), to: q });
        }
        for t in self.terminal_states() {
            out.edges.push(Edge { from: t, label: Word::empty(), to: hub });
        }
        out.initial = vec![hub];
        out.terminal[hub] = true;
        out
    }

    pub fn intersect(&self, other: &Fsa, limits: &Limits) -> Result<Fsa> {
        let a = self.to_dfa(limits)?;
        let b = other.to_dfa(limits)?;
        Ok(a.intersect(&b, limits)?.trim().to_fsa())
    }

    pub fn difference(&self, other: &Fsa, limits: &Limits) -> Result<Fsa> {
        let a = self.to_dfa(limits)?;
        let b = other.to_dfa(limits)?;
        Ok(a.difference(&b, limits)?.trim().to_fsa())
    }

    /// `f⁻¹(L)` for the marker-erasing homomorphism `f`: a marker loop at
    /// every state of the letterized machine.
    pub fn inverse_homomorphism_hash(&self) -> Result<Fsa> {
        if self.uses_hash() {
            return Err(Error::MarkerInInput);
        }
        let mut out = self.letterize();
        for q in 0..out.num_states {
            out.edges.push(Edge { from: q, label: Word::hash(), to: q });
        }
        Ok(out)
    }

    /// `f(L)`: markers deleted from every label.
    pub fn image_homomorphism_hash(&self) -> Fsa {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.label = crate::words::hash_erase(&e.label);
        }
        out
    }

    /// `{w⁻¹ | w ∈ L}`: edges reversed with inverted labels, initial and
    /// terminal states exchanged.
    pub fn reverse_invert(&self) -> Result<Fsa> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push(Edge { from: e.to, label: formal_inverse(&e.label)?, to: e.from });
        }
        let mut terminal = vec![false; self.num_states];
        for &q in &self.initial {
            terminal[q] = true;
        }
        Ok(Fsa {
            alphabet: self.alphabet.clone(),
            num_states: self.num_states,
            initial: self.terminal_states().collect(),
            terminal,
            edges,
        })
    }

    /// Accepted words of length at most `max_len`, lexicographically ordered.
    pub fn enumerate(&self, max_len: usize, limits: &Limits) -> Result<Vec<Word>> {
        self.to_dfa(limits)?.trim().enumerate(max_len, limits.output)
    }

    pub fn equivalent(&self, other: &Fsa, limits: &Limits) -> Result<bool> {
        let a = self.to_dfa(limits)?.minimize();
        let b = other.to_dfa(limits)?.minimize();
        Ok(a == b)
    }

    pub fn is_empty_language(&self) -> bool {
        let reach = self.reachable();
        !(0..self.num_states).any(|q| reach[q] && self.terminal[q])
    }

    fn reachable(&self) -> Vec<bool> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for e in &self.edges {
            out[e.from].push(e.to);
        }
        let mut seen = vec![false; self.num_states];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &q in &self.initial {
            seen[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for &r in &out[q] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    }

    /// Rewrites every label symbol-wise into another alphabet.
    pub fn relabel(&self, alphabet: Arc<Alphabet>, map: impl Fn(Symbol) -> Symbol) -> Fsa {
        let mut out = self.clone();
        out.alphabet = alphabet;
        for e in &mut out.edges {
            e.label = e.label.iter().map(|&s| map(s)).collect();
        }
        out
    }

    /// Same machine viewed over a different alphabet with the same letter codes.
    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Fsa {
        let mut out = self.clone();
        out.alphabet = alphabet;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn f1() -> Arc<Alphabet> {
        Alphabet::standard(1)
    }

    fn reduced_f2() -> Fsa {
        // start + one state per last letter
        let al = Alphabet::standard(2);
        let mut a = Fsa::new(al.clone(), 5).with_initial(0);
        for q in 0..5 {
            a.set_terminal(q, true);
        }
        for l in al.letters() {
            let to = l.code() as usize + 1;
            a.add_edge(0, Word::from(vec![l]), to);
            for prev in al.letters() {
                if prev.inverse() != Some(l) {
                    a.add_edge(prev.code() as usize + 1, Word::from(vec![l]), to);
                }
            }
        }
        a
    }

    fn strs(al: &Alphabet, ws: &[Word]) -> Vec<String> {
        ws.iter().map(|w| al.render(w)).collect()
    }

    #[test]
    fn letterize_multi_letter_edge() {
        let al = Alphabet::standard(2);
        let ab = al.parse("ab").unwrap();
        let a = Fsa::single(al.clone(), &ab);
        let d = a.determinize_letterize(&lim()).unwrap();
        assert_eq!(d.num_states(), 3);
        assert!(d.edges().iter().all(|e| e.label.len() == 1));
        assert_eq!(d.enumerate(5, &lim()).unwrap(), vec![ab]);
    }

    #[test]
    fn two_initial_states_determinize_to_one() {
        let al = f1();
        let a = Fsa::single(al.clone(), &al.parse("a").unwrap()).union(&Fsa::single(al.clone(), &al.parse("A").unwrap()));
        assert_eq!(a.initial().len(), 2);
        let d = a.determinize_letterize(&lim()).unwrap();
        assert_eq!(d.initial().len(), 1);
        assert!(d.equivalent(&a, &lim()).unwrap());
    }

    #[test]
    fn reduced_words_already_deterministic() {
        let r = reduced_f2();
        let d = r.determinize_letterize(&lim()).unwrap();
        assert_eq!(d.num_states(), r.num_states());
        assert!(d.equivalent(&r, &lim()).unwrap());
    }

    #[test]
    fn closure_examples() {
        let r = reduced_f2();
        let al = r.alphabet().clone();
        let sigma = Fsa::sigma_star(al.clone());
        assert!(sigma.intersect(&r, &lim()).unwrap().equivalent(&r, &lim()).unwrap());
        assert!(r.difference(&Fsa::empty(al.clone()), &lim()).unwrap().equivalent(&r, &lim()).unwrap());
        let short = Fsa::from_words(al.clone(), &crate::words::words_up_to(&al.letters().collect::<Vec<_>>(), 1));
        let long = r.difference(&short, &lim()).unwrap();
        let got = long.enumerate(4, &lim()).unwrap();
        let want: Vec<Word> = r.enumerate(4, &lim()).unwrap().into_iter().filter(|w| w.len() >= 2).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn hash_homomorphisms() {
        let al = f1();
        let eps = Fsa::single(al.clone(), &Word::empty());
        let lifted = eps.inverse_homomorphism_hash().unwrap();
        assert_eq!(strs(&al, &lifted.enumerate(2, &lim()).unwrap()), vec!["", "#", "##"]);
        let a = Fsa::single(al.clone(), &al.parse("a").unwrap()).inverse_homomorphism_hash().unwrap();
        assert_eq!(strs(&al, &a.enumerate(2, &lim()).unwrap()), vec!["a", "a#", "#a"]);
        assert!(matches!(lifted.inverse_homomorphism_hash(), Err(Error::MarkerInInput)));

        let ah = Fsa::single(al.clone(), &al.parse("a#").unwrap()).image_homomorphism_hash();
        assert_eq!(strs(&al, &ah.enumerate(3, &lim()).unwrap()), vec!["a"]);
        let hashes = Fsa::single(al.clone(), &Word::hash()).star().image_homomorphism_hash();
        assert_eq!(strs(&al, &hashes.enumerate(3, &lim()).unwrap()), vec![""]);
    }

    #[test]
    fn reverse_invert_examples() {
        let al = Alphabet::standard(2);
        let a = Fsa::single(al.clone(), &al.parse("ab").unwrap()).reverse_invert().unwrap();
        assert_eq!(strs(&al, &a.enumerate(3, &lim()).unwrap()), vec!["BA"]);
        let r = reduced_f2();
        assert!(r.reverse_invert().unwrap().equivalent(&r, &lim()).unwrap());
        let eps = Fsa::single(al.clone(), &Word::empty());
        assert_eq!(eps.reverse_invert().unwrap().enumerate(2, &lim()).unwrap(), vec![Word::empty()]);
        assert!(Fsa::single(al.clone(), &Word::hash()).reverse_invert().is_err());
    }

    #[test]
    fn enumerate_examples() {
        let al = f1();
        let a = Fsa::single(al.clone(), &al.parse("a").unwrap());
        assert!(a.enumerate(0, &lim()).unwrap().is_empty());
        let sigma = Fsa::sigma_star(al.clone());
        assert_eq!(strs(&al, &sigma.enumerate(1, &lim()).unwrap()), vec!["", "a", "A"]);
        assert_eq!(reduced_f2().enumerate(2, &lim()).unwrap().len(), 17);
        let tight = Limits { output: 5, ..lim() };
        assert!(matches!(reduced_f2().enumerate(2, &tight), Err(Error::OutputBudgetExceeded(5))));
    }

    #[test]
    fn equivalence_examples() {
        let al = f1();
        let r = Fsa::sigma_star(al.clone());
        assert!(r.equivalent(&r, &lim()).unwrap());
        let eps = Fsa::single(al.clone(), &Word::empty());
        assert!(!eps.equivalent(&Fsa::empty(al.clone()), &lim()).unwrap());
    }

    #[test]
    fn accepts_with_word_labels() {
        let al = Alphabet::standard(2);
        let a = Fsa::single(al.clone(), &al.parse("ab").unwrap()).star();
        assert!(a.accepts(&al.parse("abab").unwrap()));
        assert!(a.accepts(&Word::empty()));
        assert!(!a.accepts(&al.parse("aba").unwrap()));
    }

    #[test]
    fn marker_frames() {
        let al = f1();
        let frame = Fsa::two_marker_frame(al.clone());
        assert!(frame.accepts(&al.parse("a##A").unwrap()));
        assert!(!frame.accepts(&al.parse("a#").unwrap()));
        let tail = Fsa::trailing_markers(al.clone());
        assert!(tail.accepts(&al.parse("aA##").unwrap()));
        assert!(!tail.accepts(&al.parse("a#A#").unwrap()));
    }
}

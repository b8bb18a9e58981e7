use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::Fsa;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{Alphabet, Symbol, Word};

const NONE: u32 = u32::MAX;

/// Partial deterministic acceptor over `Σ_#` with initial state 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    width: usize,
    trans: Vec<u32>,
    accepting: Vec<bool>,
}

impl Dfa {
    pub(super) fn from_fsa(fsa: &Fsa, limits: &Limits) -> Result<Dfa> {
        let fsa = fsa.letterize();
        let alphabet = fsa.alphabet().clone();
        let width = alphabet.num_symbols();
        let n = fsa.num_states();
        let mut eps: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut moves: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for e in fsa.edges() {
            match e.label.symbols() {
                [] => eps[e.from].push(e.to as u32),
                [s] => moves[e.from].push((alphabet.index_of(*s), e.to as u32)),
                _ => unreachable!("letterized"),
            }
        }
        let closure = |seed: &mut Vec<u32>| {
            let mut seen = vec![false; n];
            let mut stack = seed.clone();
            for &q in seed.iter() {
                seen[q as usize] = true;
            }
            while let Some(q) = stack.pop() {
                for &r in &eps[q as usize] {
                    if !seen[r as usize] {
                        seen[r as usize] = true;
                        seed.push(r);
                        stack.push(r);
                    }
                }
            }
            seed.sort_unstable();
            seed.dedup();
        };

        let mut start: Vec<u32> = fsa.initial().iter().map(|&q| q as u32).collect();
        closure(&mut start);
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut subsets: Vec<Vec<u32>> = Vec::new();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut trans: Vec<u32> = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            accepting.push(cur.iter().any(|&q| fsa.is_terminal(q as usize)));
            let mut targets: Vec<Vec<u32>> = vec![Vec::new(); width];
            for &q in &cur {
                for &(s, r) in &moves[q as usize] {
                    targets[s].push(r);
                }
            }
            for mut t in targets {
                if t.is_empty() {
                    trans.push(NONE);
                    continue;
                }
                closure(&mut t);
                let id = match index.get(&t) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as u32;
                        if subsets.len() >= limits.states {
                            return Err(Error::StateBudgetExceeded(limits.states));
                        }
                        index.insert(t.clone(), id);
                        subsets.push(t);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        Ok(Dfa { alphabet, width, trans, accepting })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, s: Symbol) -> Option<usize> {
        let t = self.trans[q * self.width + self.alphabet.index_of(s)];
        (t != NONE).then_some(t as usize)
    }

    fn step_index(&self, q: usize, si: usize) -> Option<usize> {
        let t = self.trans[q * self.width + si];
        (t != NONE).then_some(t as usize)
    }

    /// State reached from `q` on `w`, if defined.
    pub fn run_from(&self, q: usize, w: &[Symbol]) -> Option<usize> {
        w.iter().try_fold(q, |q, &s| self.step(q, s))
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.run_from(0, w.symbols()).is_some_and(|q| self.accepting[q])
    }

    pub fn to_fsa(&self) -> Fsa {
        let mut a = Fsa::new(self.alphabet.clone(), self.num_states()).with_initial(0);
        for q in 0..self.num_states() {
            a.set_terminal(q, self.accepting[q]);
            for si in 0..self.width {
                if let Some(r) = self.step_index(q, si) {
                    a.add_edge(q, Word::from(vec![self.alphabet.symbol_at(si)]), r);
                }
            }
        }
        a
    }

    /// Minimum number of symbols from each state to an accepting state.
    fn distance_to_accept(&self) -> Vec<Option<usize>> {
        let n = self.num_states();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for si in 0..self.width {
                if let Some(r) = self.step_index(q, si) {
                    rev[r].push(q);
                }
            }
        }
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        for q in 0..n {
            if self.accepting[q] {
                dist[q] = Some(0);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            let d = dist[q].unwrap();
            for &p in &rev[q] {
                if dist[p].is_none() {
                    dist[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// Keeps the initial state and the states that are both reachable and
    /// co-reachable, renumbered in breadth-first symbol order.
    pub fn trim(&self) -> Dfa {
        let live = self.distance_to_accept();
        let mut map = vec![NONE; self.num_states()];
        let mut order = vec![0usize];
        map[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for si in 0..self.width {
                if let Some(r) = self.step_index(q, si) {
                    if live[r].is_some() && map[r] == NONE {
                        map[r] = order.len() as u32;
                        order.push(r);
                    }
                }
            }
            i += 1;
        }
        let mut trans = Vec::with_capacity(order.len() * self.width);
        for &q in &order {
            for si in 0..self.width {
                trans.push(match self.step_index(q, si) {
                    Some(r) => map[r],
                    None => NONE,
                });
            }
        }
        let accepting = order.iter().map(|&q| self.accepting[q]).collect();
        Dfa { alphabet: self.alphabet.clone(), width: self.width, trans, accepting }
    }

    /// Canonical minimal partial DFA: equal languages give equal values.
    pub fn minimize(&self) -> Dfa {
        let t = self.trim();
        let n = t.num_states();
        let sink = n;
        let succ = |q: usize, si: usize| -> usize {
            if q == sink {
                sink
            } else {
                t.step_index(q, si).unwrap_or(sink)
            }
        };
        let mut class: Vec<usize> = (0..=n).map(|q| usize::from(q < n && t.accepting[q])).collect();
        loop {
            let mut sig_index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n + 1];
            for q in 0..=n {
                let mut sig = Vec::with_capacity(self.width + 1);
                sig.push(class[q]);
                for si in 0..self.width {
                    sig.push(class[succ(q, si)]);
                }
                let len = sig_index.len();
                next[q] = *sig_index.entry(sig).or_insert(len);
            }
            let stable = sig_index.len() == {
                let mut c = class.clone();
                c.sort_unstable();
                c.dedup();
                c.len()
            };
            class = next;
            if stable {
                break;
            }
        }
        let dead = class[sink];
        // canonical numbering by BFS over classes
        let mut rep: HashMap<usize, usize> = HashMap::new();
        for q in (0..=n).rev() {
            rep.insert(class[q], q);
        }
        let mut map: HashMap<usize, u32> = HashMap::new();
        let mut order = vec![class[0]];
        map.insert(class[0], 0);
        let mut i = 0;
        let mut trans = Vec::new();
        let mut accepting = Vec::new();
        while i < order.len() {
            let c = order[i];
            let q = rep[&c];
            accepting.push(q < n && t.accepting[q]);
            for si in 0..self.width {
                let d = class[succ(q, si)];
                if d == dead {
                    trans.push(NONE);
                    continue;
                }
                let id = *map.entry(d).or_insert_with(|| {
                    order.push(d);
                    (order.len() - 1) as u32
                });
                trans.push(id);
            }
            i += 1;
        }
        Dfa { alphabet: self.alphabet.clone(), width: self.width, trans, accepting }
    }

    pub fn intersect(&self, other: &Dfa, limits: &Limits) -> Result<Dfa> {
        self.product(other, limits, |a, b| a && b, false)
    }

    pub fn difference(&self, other: &Dfa, limits: &Limits) -> Result<Dfa> {
        self.product(other, limits, |a, b| a && !b, true)
    }

    // Product over pairs (p, q); when `right_total`, a missing right
    // transition moves the right component to an implicit sink.
    fn product(&self, other: &Dfa, limits: &Limits, accept: fn(bool, bool) -> bool, right_total: bool) -> Result<Dfa> {
        assert_eq!(self.width, other.width, "acceptors over different alphabets");
        let sink = u32::MAX;
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(0u32, 0u32)];
        index.insert((0, 0), 0);
        let mut trans = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let qa = q != sink && other.accepting[q as usize];
            accepting.push(accept(self.accepting[p as usize], qa));
            for si in 0..self.width {
                let Some(p2) = self.step_index(p as usize, si) else {
                    trans.push(NONE);
                    continue;
                };
                let q2 = if q == sink { None } else { other.step_index(q as usize, si) };
                let q2 = match q2 {
                    Some(r) => r as u32,
                    None if right_total => sink,
                    None => {
                        trans.push(NONE);
                        continue;
                    }
                };
                let key = (p2 as u32, q2);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if pairs.len() >= limits.states {
                            return Err(Error::StateBudgetExceeded(limits.states));
                        }
                        let id = pairs.len() as u32;
                        index.insert(key, id);
                        pairs.push(key);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        Ok(Dfa { alphabet: self.alphabet.clone(), width: self.width, trans, accepting })
    }

    /// Accepted words of length at most `max_len` in lexicographic order.
    pub fn enumerate(&self, max_len: usize, budget: usize) -> Result<Vec<Word>> {
        let dist = self.distance_to_accept();
        let mut out = Vec::new();
        if dist[0].is_none_or(|d| d > max_len) {
            return Ok(out);
        }
        let mut word: Vec<Symbol> = Vec::new();
        // explicit stack of (state, next symbol index to try)
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        if self.accepting[0] {
            out.push(Word::empty());
        }
        while let Some(top) = stack.last_mut() {
            let (q, si) = *top;
            if si == self.width {
                stack.pop();
                word.pop();
                continue;
            }
            top.1 += 1;
            let Some(r) = self.step_index(q, si) else { continue };
            let Some(d) = dist[r] else { continue };
            if word.len() + 1 + d > max_len {
                continue;
            }
            word.push(self.alphabet.symbol_at(si));
            if self.accepting[r] {
                if out.len() >= budget {
                    return Err(Error::OutputBudgetExceeded(budget));
                }
                out.push(Word::from(word.clone()));
            }
            stack.push((r, 0));
        }
        Ok(out)
    }
}

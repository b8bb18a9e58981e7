//! Alphabets with formal inverses and words over `Σ` and `Σ_#`.
//!
//! Letters are small integer codes paired so that the formal inverse of a
//! letter flips the low bit: codes `2i` and `2i + 1` are mutually inverse.
//! The marker `#` is a distinguished symbol outside every alphabet and sorts
//! after all letters.

use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A letter code or the marker.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol(u16);

impl Symbol {
    pub const HASH: Symbol = Symbol(u16::MAX);

    pub const fn letter(code: u16) -> Symbol {
        assert!(code != u16::MAX);
        Symbol(code)
    }

    pub fn is_hash(self) -> bool {
        self == Symbol::HASH
    }

    pub fn code(self) -> u16 {
        self.0
    }

    /// Formal inverse of a letter; `None` for the marker.
    pub fn inverse(self) -> Option<Symbol> {
        if self.is_hash() {
            None
        } else {
            Some(Symbol(self.0 ^ 1))
        }
    }
}

/// A finite alphabet with a fixed-point-free involution and the marker.
///
/// Letter `2i` is named `names[2i]` and its inverse `2i + 1` is named
/// `names[2i + 1]`. Names are single printable characters other than `#`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet from inverse pairs, e.g. `[('a', 'A'), ('b', 'B')]`.
    pub fn from_pairs(pairs: &[(char, char)]) -> Result<Alphabet> {
        let mut names = Vec::with_capacity(pairs.len() * 2);
        for &(x, y) in pairs {
            names.push(x);
            names.push(y);
        }
        for (i, &c) in names.iter().enumerate() {
            if c == '#' || c == '-' || c == '|' || c.is_whitespace() {
                return Err(Error::InvalidAlphabet(format!("reserved letter name {c:?}")));
            }
            if names[..i].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter name {c:?}")));
            }
        }
        if names.len() >= u16::MAX as usize {
            return Err(Error::InvalidAlphabet("too many letters".into()));
        }
        Ok(Alphabet { names })
    }

    /// `rank` generator pairs named `a A`, `b B`, ...
    pub fn standard(rank: usize) -> Arc<Alphabet> {
        assert!(rank <= 26);
        let pairs: Vec<(char, char)> = (0..rank)
            .map(|i| {
                let c = (b'a' + i as u8) as char;
                (c, c.to_ascii_uppercase())
            })
            .collect();
        Arc::new(Alphabet::from_pairs(&pairs).expect("standard alphabet is valid"))
    }

    pub fn num_letters(&self) -> usize {
        self.names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u16).map(Symbol::letter)
    }

    /// Letters followed by the marker, in symbol order.
    pub fn symbols_with_hash(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.letters().chain(std::iter::once(Symbol::HASH))
    }

    /// Number of symbols in `Σ_#`.
    pub fn num_symbols(&self) -> usize {
        self.names.len() + 1
    }

    /// Dense index of a symbol in `0..num_symbols()`; the marker is last.
    pub fn index_of(&self, s: Symbol) -> usize {
        if s.is_hash() {
            self.names.len()
        } else {
            s.0 as usize
        }
    }

    pub fn symbol_at(&self, index: usize) -> Symbol {
        if index == self.names.len() {
            Symbol::HASH
        } else {
            Symbol::letter(index as u16)
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.is_hash() || (s.0 as usize) < self.names.len()
    }

    pub fn name(&self, s: Symbol) -> char {
        if s.is_hash() {
            '#'
        } else {
            self.names[s.0 as usize]
        }
    }

    pub fn lookup(&self, c: char) -> Option<Symbol> {
        if c == '#' {
            return Some(Symbol::HASH);
        }
        self.names.iter().position(|&n| n == c).map(|i| Symbol::letter(i as u16))
    }

    /// Inverse pairs in order, as written in group files.
    pub fn pairs(&self) -> Vec<(char, char)> {
        self.names.chunks(2).map(|p| (p[0], p[1])).collect()
    }

    /// Parses a word from its printable form. `ε` and `-` denote the empty word.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "ε" || text == "-" {
            return Ok(Word::empty());
        }
        text.chars()
            .map(|c| self.lookup(c).ok_or(Error::UnknownSymbol(c.to_string())))
            .collect()
    }

    /// Machine rendering: empty word renders as the empty string.
    pub fn render(&self, w: &Word) -> String {
        w.iter().map(|&s| self.name(s)).collect()
    }

    /// Human rendering: empty word renders as `ε`.
    pub fn display(&self, w: &Word) -> String {
        if w.is_empty() {
            "ε".to_string()
        } else {
            self.render(w)
        }
    }
}

/// An immutable finite sequence over `Σ ∪ {#}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn hash() -> Word {
        Word(vec![Symbol::HASH])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn contains_hash(&self) -> bool {
        self.0.iter().any(|s| s.is_hash())
    }

    pub fn hash_count(&self) -> usize {
        self.0.iter().filter(|s| s.is_hash()).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn append(&self, s: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(s);
        Word(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn starts_with(&self, prefix: &[Symbol]) -> bool {
        self.0.starts_with(prefix)
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Word {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Word {
        Word(v.to_vec())
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

impl Index<usize> for Word {
    type Output = Symbol;
    fn index(&self, i: usize) -> &Symbol {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if s.is_hash() {
                write!(f, "#")?;
            } else {
                write!(f, "{}", s.0)?;
            }
        }
        write!(f, "]")
    }
}

/// `(wv)⁻¹ = v⁻¹w⁻¹`: reverse and invert every letter.
pub fn formal_inverse(w: &Word) -> Result<Word> {
    w.0.iter()
        .rev()
        .map(|s| s.inverse().ok_or(Error::HashNotInvertible))
        .collect()
}

/// Deletes adjacent `x x⁻¹` pairs until none remain.
pub fn free_reduce(w: &Word) -> Result<Word> {
    let mut out: Vec<Symbol> = Vec::with_capacity(w.len());
    for &s in &w.0 {
        let inv = s.inverse().ok_or(Error::HashNotInvertible)?;
        if out.last() == Some(&inv) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    Ok(Word(out))
}

pub fn is_freely_reduced(w: &[Symbol]) -> bool {
    w.windows(2).all(|p| p[0].inverse() != Some(p[1]))
}

/// The erasing homomorphism `f` with `f(#) = ε` and `f(a) = a`.
pub fn hash_erase(w: &Word) -> Word {
    w.0.iter().copied().filter(|s| !s.is_hash()).collect()
}

/// Maximal marker-free segments, keeping empty ones.
pub fn split_on_hash(w: &Word) -> Vec<Word> {
    w.0.split(|s| s.is_hash()).map(Word::from).collect()
}

/// Joins segments with a single marker between consecutive ones.
pub fn join_with_hash(parts: &[&Word]) -> Word {
    let mut v = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            v.push(Symbol::HASH);
        }
        v.extend_from_slice(&p.0);
    }
    Word(v)
}

/// All words over `symbols` of length exactly `len`, in lexicographic order.
pub fn words_of_length(symbols: &[Symbol], len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * symbols.len());
        for w in &out {
            for &s in symbols {
                next.push(w.append(s));
            }
        }
        out = next;
    }
    out
}

/// All words over `symbols` of length at most `max_len`, shortest first.
pub fn words_up_to(symbols: &[Symbol], max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|l| words_of_length(symbols, l)).collect()
}

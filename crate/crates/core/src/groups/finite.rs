use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Symbol, Word};

/// A finite group given by its full multiplication table over element ids
/// `0..order`, together with the image of every letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    order: usize,
    mult: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    gens: Vec<u32>,
    shortlex: Vec<Word>,
}

impl FiniteTable {
    /// Validates the table (closure, associativity, identity, inverses),
    /// that generators respect formal inverses, and that they generate.
    pub fn new(alphabet: &Alphabet, rows: Vec<Vec<u32>>, gens: Vec<u32>) -> Result<FiniteTable> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut mult = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &x in row {
                if x as usize >= n {
                    return Err(Error::InvalidGroup(format!("entry {x} out of range in row {i}")));
                }
                mult.push(x);
            }
        }
        let m = |x: usize, y: usize| mult[x * n + y] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if m(m(x, y), z) != m(x, m(y, z)) {
                        return Err(Error::InvalidGroup(format!("not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| m(x, y) == identity && m(y, x) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))?;
            inverse.push(inv as u32);
        }
        if gens.len() != alphabet.num_letters() {
            return Err(Error::InvalidGroup(format!(
                "{} generator images for {} letters",
                gens.len(),
                alphabet.num_letters()
            )));
        }
        for l in alphabet.letters() {
            let g = gens[l.code() as usize];
            if g as usize >= n {
                return Err(Error::InvalidGroup(format!("generator image {g} out of range")));
            }
            let gi = gens[l.inverse().unwrap().code() as usize];
            if inverse[g as usize] != gi {
                return Err(Error::InvalidGroup(format!(
                    "letter {} and its formal inverse do not map to inverse elements",
                    alphabet.name(l)
                )));
            }
        }
        let mut table = FiniteTable {
            order: n,
            mult,
            identity: identity as u32,
            inverse,
            gens,
            shortlex: Vec::new(),
        };
        table.shortlex = table.shortlex_words(alphabet)?;
        Ok(table)
    }

    // BFS in letter order assigns every element its shortlex-least word.
    fn shortlex_words(&self, alphabet: &Alphabet) -> Result<Vec<Word>> {
        let mut words: Vec<Option<Word>> = vec![None; self.order];
        words[self.identity as usize] = Some(Word::empty());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            let wx = words[x as usize].clone().unwrap();
            for l in alphabet.letters() {
                let y = self.mul(x, self.gens[l.code() as usize]);
                if words[y as usize].is_none() {
                    words[y as usize] = Some(wx.append(l));
                    queue.push_back(y);
                }
            }
        }
        words
            .into_iter()
            .collect::<Option<Vec<Word>>>()
            .ok_or_else(|| Error::InvalidGroup("generators do not generate the table".into()))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mult[x as usize * self.order + y as usize]
    }

    pub fn inverse(&self, x: u32) -> u32 {
        self.inverse[x as usize]
    }

    pub fn generator(&self, letter: Symbol) -> u32 {
        self.gens[letter.code() as usize]
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    /// Shortlex-least word for `x`.
    pub fn shortlex(&self, x: u32) -> &Word {
        &self.shortlex[x as usize]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Word-length diameter of the Cayley graph.
    pub fn diameter(&self) -> usize {
        self.shortlex.iter().map(Word::len).max().unwrap_or(0)
    }
}

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Cfg, GSym};
use crate::error::{Error, Result};
use crate::groups::{Element, GroupSpec};
use crate::words::{Symbol, Word};

/// A shortest terminal word for every productive nonterminal (ties broken
/// by production order).
pub fn shortest_words(g: &Cfg) -> Vec<Option<Word>> {
    let n = g.num_nonterminals();
    let prods = g.productions();
    let mut pending: Vec<usize> = Vec::with_capacity(prods.len());
    let mut uses: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();
    for (i, p) in prods.iter().enumerate() {
        let mut count = 0;
        for s in &p.rhs {
            if let GSym::N(m) = s {
                count += 1;
                uses[*m].push(i);
            }
        }
        pending.push(count);
        if count == 0 {
            heap.push(Reverse((p.rhs.len(), i)));
        }
    }
    let mut words: Vec<Option<Word>> = vec![None; n];
    while let Some(Reverse((_, i))) = heap.pop() {
        let p = &prods[i];
        if words[p.lhs].is_some() {
            continue;
        }
        let mut v: Vec<Symbol> = Vec::new();
        for s in &p.rhs {
            match *s {
                GSym::T(t) => v.push(t),
                GSym::N(m) => v.extend_from_slice(words[m].as_ref().unwrap().symbols()),
            }
        }
        words[p.lhs] = Some(Word::from(v));
        for &j in &uses[p.lhs] {
            pending[j] -= 1;
            if pending[j] == 0 {
                let q = &prods[j];
                let len = q
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        GSym::T(_) => 1,
                        GSym::N(m) => words[m].as_ref().unwrap().len(),
                    })
                    .sum();
                heap.push(Reverse((len, j)));
            }
        }
    }
    words
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry {
    /// Number of markers in every derived word.
    pub rank: usize,
    /// A shortest derived word `u_A`.
    pub witness: Word,
    /// The common image of all derived words.
    pub image: Element,
}

#[derive(Clone, Debug)]
pub struct RankTable {
    /// Indexed by nonterminal; `None` for nonproductive ones.
    pub entries: Vec<Option<RankEntry>>,
    /// One more than the length of the longest `u_A`.
    pub k: usize,
    /// Sampled derived words checked per nonterminal.
    pub samples_checked: usize,
}

impl RankTable {
    pub fn get(&self, n: usize) -> Option<&RankEntry> {
        self.entries[n].as_ref()
    }

    pub fn rank(&self, n: usize) -> Option<usize> {
        self.get(n).map(|e| e.rank)
    }
}

#[derive(Clone, Debug)]
pub struct RankOptions {
    /// Image of the marker; the identity when `None`.
    pub marker: Option<Element>,
    /// Random derivations sampled per nonterminal.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { marker: None, samples: 100, seed: 0 }
    }
}

/// Marker counts and group images per nonterminal.
///
/// Both are read off a shortest word and then checked on every production
/// (which by induction covers every derived word), and again on seeded
/// random derivations.
pub fn rank_analysis(g: &Cfg, spec: &GroupSpec, options: &RankOptions) -> Result<RankTable> {
    let marker = options.marker.clone().unwrap_or_else(|| spec.identity());
    let shortest = shortest_words(g);
    let mut entries: Vec<Option<RankEntry>> = Vec::with_capacity(g.num_nonterminals());
    for w in &shortest {
        entries.push(match w {
            Some(w) => Some(RankEntry {
                rank: w.hash_count(),
                witness: w.clone(),
                image: spec.evaluate_with_marker(w.symbols(), &marker)?,
            }),
            None => None,
        });
    }
    for p in g.productions() {
        let Some(lhs) = &entries[p.lhs] else { continue };
        let mut rank = 0;
        let mut image = spec.identity();
        let mut productive = true;
        for s in &p.rhs {
            match *s {
                GSym::T(t) if t.is_hash() => {
                    rank += 1;
                    image = spec.mul(&image, &marker);
                }
                GSym::T(t) => image = spec.mul_letter(&image, t),
                GSym::N(m) => match &entries[m] {
                    Some(e) => {
                        rank += e.rank;
                        image = spec.mul(&image, &e.image);
                    }
                    None => productive = false,
                },
            }
        }
        if !productive {
            continue;
        }
        if rank != lhs.rank {
            return Err(Error::RankInconsistent(g.render_production(p)));
        }
        if image != lhs.image {
            return Err(Error::ImageInconsistent(g.render_production(p)));
        }
    }

    let by_lhs = g.productions_by_lhs();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checked = 0;
    for a in 0..g.num_nonterminals() {
        let Some(entry) = &entries[a] else { continue };
        for _ in 0..options.samples {
            let w = sample(g, &by_lhs, &shortest, a, 12, &mut rng);
            checked += 1;
            if w.hash_count() != entry.rank {
                return Err(Error::RankInconsistent(g.name(a).to_string()));
            }
            if spec.evaluate_with_marker(w.symbols(), &marker)? != entry.image {
                return Err(Error::ImageInconsistent(g.name(a).to_string()));
            }
        }
    }
    let k = 1 + shortest.iter().flatten().map(Word::len).max().unwrap_or(0);
    Ok(RankTable { entries, k, samples_checked: checked })
}

// Random derivation: uniform productions while shallow, then the
// productions used by shortest words to terminate.
fn sample(
    g: &Cfg,
    by_lhs: &[Vec<usize>],
    shortest: &[Option<Word>],
    a: usize,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Word {
    if depth == 0 {
        return shortest[a].clone().unwrap();
    }
    let options: Vec<usize> = by_lhs[a]
        .iter()
        .copied()
        .filter(|&i| g.productions()[i].rhs.iter().all(|s| !matches!(s, GSym::N(m) if shortest[*m].is_none())))
        .collect();
    let Some(&i) = options.choose(rng) else {
        return shortest[a].clone().unwrap();
    };
    let mut v = Vec::new();
    for s in &g.productions()[i].rhs {
        match *s {
            GSym::T(t) => v.push(t),
            GSym::N(m) => v.extend_from_slice(sample(g, by_lhs, shortest, m, depth - 1, rng).symbols()),
        }
    }
    Word::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammars::parse_cfg;

    #[test]
    fn marker_nonterminal_has_rank_one() {
        let z = GroupSpec::free(1);
        let g = parse_cfg("S -> a S A | H\nH -> #\n", z.alphabet().clone()).unwrap();
        let t = rank_analysis(&g, &z, &RankOptions::default()).unwrap();
        let h = g.find("H").unwrap();
        assert_eq!(t.rank(h), Some(1));
        assert_eq!(t.get(h).unwrap().witness, Word::hash());
        assert_eq!(t.rank(g.start()), Some(1));
        assert_eq!(t.k, 2);
    }

    #[test]
    fn inconsistent_grammars() {
        let z = GroupSpec::free(1);
        let g = parse_cfg("S -> # | # #\n", z.alphabet().clone()).unwrap();
        assert!(matches!(rank_analysis(&g, &z, &RankOptions::default()), Err(Error::RankInconsistent(_))));
        let g = parse_cfg("S -> # | a #\n", z.alphabet().clone()).unwrap();
        assert!(matches!(rank_analysis(&g, &z, &RankOptions::default()), Err(Error::ImageInconsistent(_))));
    }

    #[test]
    fn shortest_words_follow_lengths() {
        let al = crate::words::Alphabet::standard(2);
        let g = parse_cfg("S -> a S b | a b a | X\nX -> b\n", al.clone()).unwrap();
        let w = shortest_words(&g);
        assert_eq!(al.render(w[g.start()].as_ref().unwrap()), "b");
    }
}

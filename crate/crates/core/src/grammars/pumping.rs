use std::collections::{BTreeSet, HashSet};

use super::rank::shortest_words;
use super::{Cfg, GSym};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::Word;

/// `2^(|N| + 1)`, saturating.
pub fn default_pumping_constant(g: &Cfg) -> usize {
    1usize.checked_shl(g.num_nonterminals() as u32 + 1).unwrap_or(usize::MAX)
}

/// Substitution pairs `(x, y)` from self-embeddings `A ⇒* pAq` of
/// marker-free nonterminals: `x = p·u_A·q`, `y = u_A`, with `|pq| ≥ 1` and
/// `|x| ≤ k_prime`. Sibling subtrees are filled with their shortest words.
/// Cycle search depth is bounded by `2·|N|`.
pub fn pumping_pairs(g: &Cfg, k_prime: Option<usize>, limits: &Limits) -> Result<Vec<(Word, Word)>> {
    g.check_cnf()?;
    let k_prime = k_prime.unwrap_or_else(|| default_pumping_constant(g));
    let n = g.num_nonterminals();
    let shortest = shortest_words(g);
    // edges X -> (child, left sibling word, right sibling word)
    let mut edges: Vec<Vec<(usize, &Word, &Word)>> = vec![Vec::new(); n];
    let empty = Word::empty();
    for p in g.productions() {
        if let [GSym::N(b), GSym::N(c)] = p.rhs.as_slice() {
            let (Some(ub), Some(uc)) = (&shortest[*b], &shortest[*c]) else { continue };
            edges[p.lhs].push((*b, &empty, uc));
            edges[p.lhs].push((*c, ub, &empty));
        }
    }
    let scc = components(n, &edges);
    let max_depth = 2 * n;
    let mut visited_total = 0usize;
    let mut pairs = BTreeSet::new();
    for a in 0..n {
        let Some(ua) = &shortest[a] else { continue };
        if ua.hash_count() != 0 || ua.len() >= k_prime {
            continue;
        }
        let mut seen: HashSet<(usize, Word, Word)> = HashSet::new();
        let mut stack: Vec<(usize, Word, Word, usize)> = vec![(a, Word::empty(), Word::empty(), 0)];
        while let Some((x, p, q, depth)) = stack.pop() {
            if depth == max_depth {
                continue;
            }
            for &(child, left, right) in &edges[x] {
                if scc[child] != scc[a] {
                    continue;
                }
                let p2 = p.concat(left);
                let q2 = right.concat(&q);
                if p2.len() + q2.len() + ua.len() > k_prime {
                    continue;
                }
                if child == a && p2.len() + q2.len() >= 1 {
                    pairs.insert((p2.concat(ua).concat(&q2), ua.clone()));
                }
                if seen.insert((child, p2.clone(), q2.clone())) {
                    visited_total += 1;
                    if visited_total > limits.search {
                        return Err(Error::SearchBudgetExceeded(limits.search));
                    }
                    stack.push((child, p2, q2, depth + 1));
                }
            }
        }
    }
    Ok(pairs.into_iter().collect())
}

// Strongly connected component id per node (Kosaraju).
fn components(n: usize, edges: &[Vec<(usize, &Word, &Word)>]) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((v, i)) = stack.pop() {
            if i < edges[v].len() {
                stack.push((v, i + 1));
                let w = edges[v][i].0;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, es) in edges.iter().enumerate() {
        for e in es {
            rev[e.0].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = c;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &rev[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammars::parse_cfg;
    use crate::words::Alphabet;

    #[test]
    fn star_of_a() {
        let al = Alphabet::standard(1);
        let g = parse_cfg("S -> a S | a\n", al.clone()).unwrap().to_cnf().unwrap();
        let pairs = pumping_pairs(&g, Some(2), &Limits::default()).unwrap();
        let shown: Vec<(String, String)> = pairs.iter().map(|(x, y)| (al.render(x), al.render(y))).collect();
        assert!(shown.contains(&("aa".into(), "a".into())));
        for (x, y) in &pairs {
            assert!(y.len() < x.len() && x.len() <= 2);
        }
    }

    #[test]
    fn no_recursion_no_pairs() {
        let al = Alphabet::standard(2);
        let g = parse_cfg("S -> a b | b a\n", al).unwrap().to_cnf().unwrap();
        assert!(pumping_pairs(&g, None, &Limits::default()).unwrap().is_empty());
    }
}

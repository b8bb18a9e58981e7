//! Regular combings for the supported backends.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Backend, Element, FiniteTable, GroupSpec};
use crate::automata::Fsa;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{Alphabet, Symbol, Word};

/// A regular language projecting onto the group, with the properties
/// reports need to record.
#[derive(Clone, Debug)]
pub struct Combing {
    pub name: String,
    pub fsa: Fsa,
    /// Every element has exactly one representative.
    pub unique_representatives: bool,
    /// The language is exactly the set of geodesic words.
    pub geodesic: bool,
}

/// Free groups: freely reduced words. Finite tables: shortlex normal forms.
/// Free products: all geodesic words (syllables from alternating factors,
/// each a geodesic of its factor). Direct products: concatenated factor
/// normal forms, flagged as not geodesic-complete.
pub fn geodesic_combing(spec: &GroupSpec) -> Result<Combing> {
    match spec.backend() {
        Backend::Free { .. } => Ok(Combing {
            name: "reduced".into(),
            fsa: reduced_words(spec.alphabet().clone()),
            unique_representatives: true,
            geodesic: true,
        }),
        Backend::FiniteTable(t) => Ok(Combing {
            name: "shortlex".into(),
            fsa: shortlex_trie(spec.alphabet().clone(), t),
            unique_representatives: true,
            geodesic: false,
        }),
        Backend::FreeProduct(_) => {
            let fsa = syllable_combing(spec, true);
            let unique = spec.factors().iter().all(|f| {
                let Backend::FiniteTable(t) = f.backend() else { unreachable!() };
                (0..t.order() as u32).all(|e| factor_geodesics(f.alphabet(), t, e).len() <= 1)
            });
            Ok(Combing { name: "geodesic".into(), fsa, unique_representatives: unique, geodesic: true })
        }
        Backend::DirectProduct(_) => product_combing(spec),
    }
}

/// A combing with a unique representative per element.
pub fn shortlex_combing(spec: &GroupSpec) -> Result<Combing> {
    match spec.backend() {
        Backend::FreeProduct(_) => Ok(Combing {
            name: "shortlex".into(),
            fsa: syllable_combing(spec, false),
            unique_representatives: true,
            geodesic: false,
        }),
        _ => geodesic_combing(spec),
    }
}

fn reduced_words(alphabet: Arc<Alphabet>) -> Fsa {
    // state 0 is the start, state 1 + code remembers the last letter
    let n = alphabet.num_letters();
    let mut a = Fsa::new(alphabet.clone(), n + 1).with_initial(0);
    for q in 0..=n {
        a.set_terminal(q, true);
    }
    for l in alphabet.letters() {
        let to = l.code() as usize + 1;
        a.add_edge(0, Word::from(vec![l]), to);
        for prev in alphabet.letters() {
            if prev.inverse() != Some(l) {
                a.add_edge(prev.code() as usize + 1, Word::from(vec![l]), to);
            }
        }
    }
    a
}

// States are element ids; `x --l--> y` whenever shortlex(y) = shortlex(x)·l.
fn shortlex_trie(alphabet: Arc<Alphabet>, t: &FiniteTable) -> Fsa {
    let mut a = Fsa::new(alphabet.clone(), t.order()).with_initial(t.identity() as usize);
    for x in 0..t.order() as u32 {
        a.set_terminal(x as usize, true);
        for l in alphabet.letters() {
            let y = t.mul(x, t.generator(l));
            if *t.shortlex(y) == t.shortlex(x).append(l) {
                a.add_edge(x as usize, Word::from(vec![l]), y as usize);
            }
        }
    }
    a
}

/// All geodesic words of a finite-table group representing `e`.
pub(crate) fn factor_geodesics(alphabet: &Alphabet, t: &FiniteTable, e: u32) -> Vec<Word> {
    let target = t.shortlex(e).len();
    let mut out = Vec::new();
    let mut stack = vec![(t.identity(), Word::empty())];
    while let Some((x, w)) = stack.pop() {
        if w.len() == target {
            if x == e {
                out.push(w);
            }
            continue;
        }
        for l in alphabet.letters() {
            let y = t.mul(x, t.generator(l));
            // stay on geodesics from the identity
            if t.shortlex(y).len() == w.len() + 1 {
                stack.push((y, w.append(l)));
            }
        }
    }
    out.sort();
    out
}

fn syllable_combing(spec: &GroupSpec, all_geodesics: bool) -> Fsa {
    let factors = spec.factors();
    let k = factors.len();
    // state 0 = start, state 1 + i = "last syllable came from factor i"
    let mut a = Fsa::new(spec.alphabet().clone(), k + 1).with_initial(0);
    for q in 0..=k {
        a.set_terminal(q, true);
    }
    for (i, f) in factors.iter().enumerate() {
        let Backend::FiniteTable(t) = f.backend() else { unreachable!() };
        let off = spec.factor_offset(i);
        for e in 0..t.order() as u32 {
            if e == t.identity() {
                continue;
            }
            let words = if all_geodesics { factor_geodesics(f.alphabet(), t, e) } else { vec![t.shortlex(e).clone()] };
            for w in words {
                let w: Word = w.iter().map(|s| Symbol::letter(s.code() + off)).collect();
                for from in 0..=k {
                    if from != i + 1 {
                        a.add_edge(from, w.clone(), i + 1);
                    }
                }
            }
        }
    }
    a
}

fn product_combing(spec: &GroupSpec) -> Result<Combing> {
    let mut fsa: Option<Fsa> = None;
    let mut unique = true;
    for (i, f) in spec.factors().iter().enumerate() {
        let c = shortlex_combing(f)?;
        unique &= c.unique_representatives;
        let off = spec.factor_offset(i);
        let part = c.fsa.relabel(spec.alphabet().clone(), |s| if s.is_hash() { s } else { Symbol::letter(s.code() + off) });
        fsa = Some(match fsa {
            None => part,
            Some(prev) => prev.concat(&part),
        });
    }
    Ok(Combing {
        name: "normal-form".into(),
        fsa: fsa.ok_or_else(|| Error::InvalidGroup("product of no factors".into()))?,
        unique_representatives: unique,
        geodesic: false,
    })
}

/// Shortest length of an `R`-representative for each element of the
/// radius ball, searching words of length at most `radius + slack`.
pub fn representative_lengths(
    spec: &GroupSpec,
    r: &Fsa,
    radius: usize,
    slack: Option<usize>,
    limits: &Limits,
) -> Result<HashMap<Element, usize>> {
    let max_len = radius + slack.unwrap_or(2 * radius);
    let mut best: HashMap<Element, usize> = HashMap::new();
    for w in r.enumerate(max_len, limits)? {
        let x = spec.evaluate(&w)?;
        let e = best.entry(x).or_insert(w.len());
        *e = (*e).min(w.len());
    }
    Ok(best)
}

/// Ball elements with no representative of length at most `radius + slack`
/// (default slack `2·radius`), in canonical order.
pub fn surjectivity_gaps(
    spec: &GroupSpec,
    r: &Fsa,
    radius: usize,
    slack: Option<usize>,
    limits: &Limits,
) -> Result<Vec<Element>> {
    let ball = spec.cayley_ball(radius, limits)?;
    let hit = representative_lengths(spec, r, radius, slack, limits)?;
    let missing: BTreeSet<Element> = ball.table.keys().filter(|x| !hit.contains_key(*x)).cloned().collect();
    Ok(missing.into_iter().collect())
}

pub fn is_surjective_at_radius(spec: &GroupSpec, r: &Fsa, radius: usize, limits: &Limits) -> Result<bool> {
    Ok(surjectivity_gaps(spec, r, radius, None, limits)?.is_empty())
}

//! Multiplication tables, columns and comparators over a combing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::automata::Fsa;
use crate::error::{Error, Result};
use crate::grammars::{enumerate_nonterminals, rank_analysis, Cfg, GSym, RankOptions};
use crate::groups::combing::factor_geodesics;
use crate::groups::{geodesic_combing, is_surjective_at_radius, Backend, Element, GroupSpec};
use crate::limits::Limits;
use crate::transducers::Transducer;
use crate::words::{split_on_hash, Alphabet, Symbol, Word};

/// A group with a regular combing.
#[derive(Clone, Debug)]
pub struct TableSpec {
    pub group: GroupSpec,
    pub combing: Fsa,
    pub closed_under_inverses: bool,
}

impl TableSpec {
    pub fn new(group: GroupSpec, combing: Fsa, limits: &Limits) -> Result<TableSpec> {
        let closed = combing.reverse_invert()?.equivalent(&combing, limits)?;
        Ok(TableSpec { group, combing, closed_under_inverses: closed })
    }

    /// The group with its default geodesic (or normal-form) combing.
    pub fn with_default_combing(group: GroupSpec, limits: &Limits) -> Result<TableSpec> {
        let c = geodesic_combing(&group)?;
        TableSpec::new(group, c.fsa, limits)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.group.alphabet()
    }

    pub fn is_surjective_at_radius(&self, radius: usize, limits: &Limits) -> Result<bool> {
        is_surjective_at_radius(&self.group, &self.combing, radius, limits)
    }

    /// `t = u#v#w` with `u, v, w ∈ R` and `ūv̄w̄ = 1`.
    pub fn is_table_word(&self, t: &Word) -> Result<bool> {
        let parts = split_on_hash(t);
        if parts.len() != 3 || !parts.iter().all(|p| self.combing.accepts(p)) {
            return Ok(false);
        }
        Ok(self.group.is_identity(&self.group.evaluate(t)?))
    }
}

/// The column of `g` in a table.
#[derive(Clone, Debug)]
pub struct ColumnSpec {
    pub table: TableSpec,
    pub g: Element,
}

// Combing words of length at most `max_len`, grouped by image.
struct Representatives {
    words: Vec<Word>,
    images: Vec<Element>,
    by_image: HashMap<Element, Vec<usize>>,
}

impl Representatives {
    fn new(ts: &TableSpec, max_len: usize, limits: &Limits) -> Result<Representatives> {
        let mut words = ts.combing.enumerate(max_len, limits)?;
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let images = words.iter().map(|w| ts.group.evaluate(w)).collect::<Result<Vec<_>>>()?;
        let mut by_image: HashMap<Element, Vec<usize>> = HashMap::new();
        for (i, x) in images.iter().enumerate() {
            by_image.entry(x.clone()).or_default().push(i);
        }
        Ok(Representatives { words, images, by_image })
    }

    /// Representatives of `x` of length at most `max_len`.
    fn of(&self, x: &Element, max_len: usize) -> impl Iterator<Item = &Word> + '_ {
        self.by_image
            .get(x)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&i| &self.words[i])
            .take_while(move |w| w.len() <= max_len)
    }
}

/// All table words of total length at most `maxlen`, sorted.
pub fn enumerate_table(ts: &TableSpec, maxlen: usize, limits: &Limits) -> Result<Vec<Word>> {
    if maxlen < 2 {
        return Ok(Vec::new());
    }
    let budget = maxlen - 2;
    let reps = Representatives::new(ts, budget, limits)?;
    let g = &ts.group;
    let chunks: Vec<Vec<Word>> = (0..reps.words.len())
        .into_par_iter()
        .map(|i| {
            let u = &reps.words[i];
            let mut out = Vec::new();
            for (j, v) in reps.words.iter().enumerate() {
                if u.len() + v.len() > budget {
                    break;
                }
                let target = g.inverse(&g.mul(&reps.images[i], &reps.images[j]));
                for w in reps.of(&target, budget - u.len() - v.len()) {
                    out.push(crate::words::join_with_hash(&[u, v, w]));
                }
            }
            out
        })
        .collect();
    let total: usize = chunks.iter().map(Vec::len).sum();
    if total > limits.output {
        return Err(Error::OutputBudgetExceeded(limits.output));
    }
    let mut out: Vec<Word> = chunks.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

/// Acceptor for the word problem `W = {w ∈ Σ* : w̄ = 1}` of a finite group.
pub fn word_problem_fsa(spec: &GroupSpec, limits: &Limits) -> Result<Fsa> {
    if !spec.is_finite() {
        return Err(Error::NotFinite);
    }
    let mut index: HashMap<Element, usize> = HashMap::new();
    let mut elems = vec![spec.identity()];
    index.insert(spec.identity(), 0);
    let mut a = Fsa::new(spec.alphabet().clone(), 1).with_initial(0);
    a.set_terminal(0, true);
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i].clone();
        for l in spec.alphabet().letters() {
            let y = spec.mul_letter(&x, l);
            let to = match index.get(&y) {
                Some(&q) => q,
                None => {
                    if elems.len() >= limits.states {
                        return Err(Error::StateBudgetExceeded(limits.states));
                    }
                    let q = a.add_state();
                    index.insert(y.clone(), q);
                    elems.push(y);
                    q
                }
            };
            a.add_edge(i, Word::from(vec![l]), to);
        }
        i += 1;
    }
    Ok(a)
}

/// Acceptor for the table of a finite group over the combing `r`.
/// States are `(R-state, element, markers read)`.
pub fn finite_table_fsa(spec: &GroupSpec, r: &Fsa, limits: &Limits) -> Result<Fsa> {
    if !spec.is_finite() {
        return Err(Error::NotFinite);
    }
    if r.uses_hash() {
        return Err(Error::MarkerInInput);
    }
    let d = r.to_dfa(limits)?.minimize();
    type Key = (usize, Element, u8);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut a = Fsa::new(spec.alphabet().clone(), 0);
    let mut intern = |a: &mut Fsa, keys: &mut Vec<Key>, key: Key| -> Result<usize> {
        if let Some(&q) = index.get(&key) {
            return Ok(q);
        }
        if keys.len() >= limits.states {
            return Err(Error::StateBudgetExceeded(limits.states));
        }
        let q = a.add_state();
        a.set_terminal(q, key.2 == 2 && d.is_accepting(key.0) && spec.is_identity(&key.1));
        index.insert(key.clone(), q);
        keys.push(key);
        Ok(q)
    };
    let start = intern(&mut a, &mut keys, (0, spec.identity(), 0))?;
    a.set_initial(start);
    let mut i = 0;
    while i < keys.len() {
        let (q, x, phase) = keys[i].clone();
        for l in spec.alphabet().letters() {
            if let Some(q2) = d.step(q, l) {
                let to = intern(&mut a, &mut keys, (q2, spec.mul_letter(&x, l), phase))?;
                a.add_edge(i, Word::from(vec![l]), to);
            }
        }
        if phase < 2 && d.is_accepting(q) {
            let to = intern(&mut a, &mut keys, (0, x, phase + 1))?;
            a.add_edge(i, Word::hash(), to);
        }
        i += 1;
    }
    Ok(a)
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripReport {
    pub group: String,
    pub word_problem_states: usize,
    pub table_states: usize,
    /// `M` built directly equals `f⁻¹(W) ∩ Σ*#Σ*#Σ*`.
    pub table_from_word_problem: bool,
    /// `W` equals `f(M ∩ Σ*##)`.
    pub word_problem_from_table: bool,
}

/// Builds `W` and `M` for `R = Σ*` and checks both reductions between them
/// by minimized-automaton equality.
pub fn sigma_star_roundtrip(spec: &GroupSpec, limits: &Limits) -> Result<RoundTripReport> {
    let al = spec.alphabet().clone();
    let w = word_problem_fsa(spec, limits)?;
    let m = finite_table_fsa(spec, &Fsa::sigma_star(al.clone()), limits)?;
    let m_via = w.inverse_homomorphism_hash()?.intersect(&Fsa::two_marker_frame(al.clone()), limits)?;
    let w_back = m.intersect(&Fsa::trailing_markers(al), limits)?.image_homomorphism_hash();
    let md = m.to_dfa(limits)?.minimize();
    let wd = w.to_dfa(limits)?.minimize();
    Ok(RoundTripReport {
        group: spec.name().to_string(),
        word_problem_states: wd.num_states(),
        table_states: md.num_states(),
        table_from_word_problem: md == m_via.to_dfa(limits)?.minimize(),
        word_problem_from_table: wd == w_back.to_dfa(limits)?.minimize(),
    })
}

/// Words `u#w` of length at most `maxlen` with `u, w ∈ R` and `ū g w̄ = 1`.
pub fn column_language(cs: &ColumnSpec, maxlen: usize, limits: &Limits) -> Result<Vec<Word>> {
    if maxlen < 1 {
        return Ok(Vec::new());
    }
    let budget = maxlen - 1;
    let reps = Representatives::new(&cs.table, budget, limits)?;
    let g = &cs.table.group;
    let mut out = Vec::new();
    for (i, u) in reps.words.iter().enumerate() {
        let target = g.inverse(&g.mul(&reps.images[i], &cs.g));
        for w in reps.of(&target, budget - u.len()) {
            out.push(crate::words::join_with_hash(&[u, w]));
            if out.len() > limits.output {
                return Err(Error::OutputBudgetExceeded(limits.output));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Image of a letter or the empty word.
pub fn letter_image(spec: &GroupSpec, a: Option<Symbol>) -> Element {
    match a {
        Some(l) => spec.mul_letter(&spec.identity(), l),
        None => spec.identity(),
    }
}

pub fn render_letter(alphabet: &Alphabet, a: Option<Symbol>) -> String {
    match a {
        Some(l) => alphabet.name(l).to_string(),
        None => "ε".to_string(),
    }
}

/// Pairs of the comparator `ρ_a = {(u, w) : u, w ∈ R, ūā = w̄}` with both
/// words of length at most `maxlen`, sorted.
pub fn comparator(ts: &TableSpec, a: Option<Symbol>, maxlen: usize, limits: &Limits) -> Result<Vec<(Word, Word)>> {
    let reps = Representatives::new(ts, maxlen, limits)?;
    let g = &ts.group;
    let abar = letter_image(g, a);
    let mut out = Vec::new();
    for (i, u) in reps.words.iter().enumerate() {
        let target = g.mul(&reps.images[i], &abar);
        for w in reps.of(&target, maxlen) {
            out.push((u.clone(), w.clone()));
            if out.len() > limits.output {
                return Err(Error::OutputBudgetExceeded(limits.output));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `ρ_a` for the free group over reduced words: a copier that holds back
/// one letter, then appends `a` or cancels against it at the end.
pub fn free_comparator_transducer(rank: usize, a: Option<Symbol>) -> Transducer {
    let al = Alphabet::standard(rank);
    let n = al.num_letters();
    // 0 = start, 1 + code = buffered letter, n + 1 = final
    let fin = n + 1;
    let mut t = Transducer::new(al.clone(), n + 2);
    t.set_initial(0);
    t.set_terminal(fin, true);
    let one = |s: Symbol| Word::from(vec![s]);
    let tail = |y: Option<Symbol>| -> Word {
        let mut v: Vec<Symbol> = y.into_iter().collect();
        match a {
            Some(l) if v.last().copied() == l.inverse() => {
                v.pop();
            }
            Some(l) => v.push(l),
            None => {}
        }
        Word::from(v)
    };
    t.add_edge(0, Word::empty(), tail(None), fin);
    for x in al.letters() {
        let bx = 1 + x.code() as usize;
        t.add_edge(0, one(x), Word::empty(), bx);
        t.add_edge(bx, Word::empty(), tail(Some(x)), fin);
        for y in al.letters() {
            if Some(y) != x.inverse() {
                t.add_edge(bx, one(y), one(x), 1 + y.code() as usize);
            }
        }
    }
    t
}

/// `ρ_a` for a free product of finite groups over the combing of all
/// geodesic words: syllables are read whole and rewritten to any geodesic of
/// the same factor element, and the last syllable absorbs `a`.
pub fn free_product_comparator_transducer(spec: &GroupSpec, a: Option<Symbol>) -> Result<Transducer> {
    let Backend::FreeProduct(factors) = spec.backend() else {
        return Err(Error::UnsupportedBackend(spec.backend_kind()));
    };
    let k = factors.len();
    let fin = k + 1;
    // 0 = start, 1 + i = last syllable from factor i
    let mut t = Transducer::new(spec.alphabet().clone(), k + 2);
    t.set_initial(0);
    t.set_terminal(fin, true);
    let a_owner = a.map(|l| owner_of(spec, l));
    let mut geodesics: Vec<Vec<Vec<Word>>> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let Backend::FiniteTable(tab) = f.backend() else { unreachable!() };
        let off = spec.factor_offset(i);
        geodesics.push(
            (0..tab.order() as u32)
                .map(|e| {
                    factor_geodesics(f.alphabet(), tab, e)
                        .into_iter()
                        .map(|w| w.iter().map(|s| Symbol::letter(s.code() + off)).collect())
                        .collect()
                })
                .collect(),
        );
    }
    for (i, f) in factors.iter().enumerate() {
        let Backend::FiniteTable(tab) = f.backend() else { unreachable!() };
        let froms: Vec<usize> = (0..=k).filter(|&q| q != i + 1).collect();
        for e in 0..tab.order() as u32 {
            if e == tab.identity() {
                continue;
            }
            for x in &geodesics[i][e as usize] {
                for &from in &froms {
                    for y in &geodesics[i][e as usize] {
                        t.add_edge(from, x.clone(), y.clone(), i + 1);
                    }
                    if let Some((ai, local)) = a_owner {
                        if ai == i {
                            let prod = tab.mul(e, tab.generator(local));
                            for y in &geodesics[i][prod as usize] {
                                t.add_edge(from, x.clone(), y.clone(), fin);
                            }
                        }
                    }
                }
            }
        }
    }
    match a_owner {
        None => {
            for q in 0..=k {
                t.add_edge(q, Word::empty(), Word::empty(), fin);
            }
        }
        Some((ai, local)) => {
            let Backend::FiniteTable(tab) = factors[ai].backend() else { unreachable!() };
            let g = tab.generator(local);
            for q in (0..=k).filter(|&q| q != ai + 1) {
                for y in &geodesics[ai][g as usize] {
                    t.add_edge(q, Word::empty(), y.clone(), fin);
                }
            }
        }
    }
    Ok(t)
}

fn owner_of(spec: &GroupSpec, l: Symbol) -> (usize, Symbol) {
    let mut code = l.code();
    for (i, f) in spec.factors().iter().enumerate() {
        let n = f.alphabet().num_letters() as u16;
        if code < n {
            return (i, Symbol::letter(code));
        }
        code -= n;
    }
    unreachable!("letter outside the product alphabet")
}

/// The linear grammar of `ρ ∩ (R × R)`; for inverse-closed `R` and
/// `ρ = ρ_a` it generates the column `C(ā)`.
pub fn column_cfg_from_comparator(t: &Transducer, r: &Fsa, limits: &Limits) -> Result<Cfg> {
    if !r.reverse_invert()?.equivalent(r, limits)? {
        return Err(Error::NotInverseClosed);
    }
    Ok(t.restrict(r, r, limits)?.to_linear_grammar()?.prune())
}

#[derive(Clone, Debug, Serialize)]
pub struct LetterReport {
    pub letter: String,
    /// Bound on rank-zero subwords, `1 + max |u_A|`.
    pub k: usize,
    pub linear_productions: usize,
    pub transducer_states: usize,
    pub combined_states: usize,
    pub pairs_related: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiReport {
    pub group: String,
    pub maxlen: usize,
    pub seed: u64,
    /// Which implication was checked.
    pub direction: String,
    pub letters: Vec<LetterReport>,
    pub inputs_checked: usize,
    pub counterexamples: Vec<String>,
}

impl BiReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// `Err(VerificationFailed)` listing the counterexamples, if any.
    pub fn verified(self) -> Result<BiReport> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::VerificationFailed(self.counterexamples))
        }
    }
}

/// From column grammars to comparators: each CNF column grammar is cut
/// down to a linear grammar (rank-zero children replaced by their words of
/// length at most `K`), read as a transducer `τ_a`, restricted to
/// `R × R⁻¹`, and combined with `μ = τ_ε⁻¹` into
/// `τ_a ∪ τ_a∘μ ∪ μ∘τ_a ∪ μ∘τ_a∘μ`. The result is compared with
/// `{(u, v) ∈ R' × R' : ūā = v̄}`, `R' = R ∪ R⁻¹`, on all words of length at
/// most `maxlen`. Missing grammars count as empty.
pub fn theorem_bi_pipeline(
    ts: &TableSpec,
    column_grammars: &BTreeMap<Option<Symbol>, Cfg>,
    maxlen: usize,
    seed: u64,
    limits: &Limits,
) -> Result<BiReport> {
    let g = &ts.group;
    let al = g.alphabet().clone();
    let r = &ts.combing;
    let r_inv = r.reverse_invert()?;
    let mut taus: BTreeMap<Option<Symbol>, (Transducer, usize, usize)> = BTreeMap::new();
    let letters: Vec<Option<Symbol>> = std::iter::once(None).chain(al.letters().map(Some)).collect();
    for &a in &letters {
        let entry = match column_grammars.get(&a) {
            Some(cfg) => linear_transducer(g, cfg, a, seed, limits)?,
            None => (Transducer::empty(al.clone()), 0, 0),
        };
        let (tau, k, n) = entry;
        taus.insert(a, (tau.restrict(r, &r_inv, limits)?, k, n));
    }
    let mu = taus[&None].0.inverse_relation();

    let mut r_prime: BTreeSet<Word> = r.enumerate(maxlen, limits)?.into_iter().collect();
    r_prime.extend(r_inv.enumerate(maxlen, limits)?);
    let inputs: Vec<(Word, Element)> =
        r_prime.iter().map(|w| Ok((w.clone(), g.evaluate(w)?))).collect::<Result<Vec<_>>>()?;
    let mut by_image: HashMap<&Element, Vec<&Word>> = HashMap::new();
    for (w, x) in &inputs {
        by_image.entry(x).or_default().push(w);
    }

    let mut reports = Vec::new();
    let mut counterexamples = Vec::new();
    for &a in &letters {
        let (tau, k, linear_productions) = &taus[&a];
        let combined = tau
            .union(&tau.compose(&mu, limits)?)
            .union(&mu.compose(tau, limits)?)
            .union(&mu.compose(&tau.compose(&mu, limits)?, limits)?);
        let abar = letter_image(g, a);
        let name = render_letter(&al, a);
        let results: Vec<Result<(usize, Vec<String>)>> = inputs
            .par_iter()
            .map(|(u, x)| {
                let got: BTreeSet<Word> = combined.image_of(u, maxlen, limits)?.into_iter().collect();
                let want: BTreeSet<Word> =
                    by_image.get(&g.mul(x, &abar)).into_iter().flatten().map(|w| (*w).clone()).collect();
                let mut bad = Vec::new();
                for v in want.difference(&got) {
                    bad.push(format!("{name}: ({}, {}) missing", al.display(u), al.display(v)));
                }
                for v in got.difference(&want) {
                    bad.push(format!("{name}: ({}, {}) unexpected", al.display(u), al.display(v)));
                }
                Ok((got.len(), bad))
            })
            .collect();
        let mut related = 0;
        for res in results {
            let (n, bad) = res?;
            related += n;
            counterexamples.extend(bad);
        }
        reports.push(LetterReport {
            letter: name,
            k: *k,
            linear_productions: *linear_productions,
            transducer_states: tau.num_states(),
            combined_states: combined.num_states(),
            pairs_related: related,
        });
    }
    Ok(BiReport {
        group: g.name().to_string(),
        maxlen,
        seed,
        direction: "both directions, all pairs of R ∪ R⁻¹ words up to maxlen".into(),
        letters: reports,
        inputs_checked: inputs.len(),
        counterexamples,
    })
}

// Column grammar -> (τ_a, K, number of linear productions).
fn linear_transducer(
    g: &GroupSpec,
    cfg: &Cfg,
    a: Option<Symbol>,
    seed: u64,
    limits: &Limits,
) -> Result<(Transducer, usize, usize)> {
    let al = g.alphabet().clone();
    let pruned = cfg.prune();
    if pruned.productions().is_empty() {
        return Ok((Transducer::empty(al), 0, 0));
    }
    let cnf = pruned.to_cnf()?;
    let options = RankOptions { marker: Some(letter_image(g, a)), seed, ..RankOptions::default() };
    let ranks = rank_analysis(&cnf, g, &options)?;
    let rank = |n: usize| ranks.rank(n).unwrap_or(usize::MAX);
    for n in 0..cnf.num_nonterminals() {
        if rank(n) > 1 || (n == cnf.start() && rank(n) != 1) {
            return Err(Error::RankInconsistent(cnf.name(n).to_string()));
        }
    }
    let k = ranks.k;
    let words = enumerate_nonterminals(&cnf, k, limits)?;
    let mut lin = Cfg::new(al, cnf.name(cnf.start()));
    let ids: Vec<usize> = (0..cnf.num_nonterminals()).map(|n| lin.nonterminal(cnf.name(n))).collect();
    for p in cnf.productions() {
        if rank(p.lhs) != 1 {
            continue;
        }
        match p.rhs.as_slice() {
            [GSym::T(t)] if t.is_hash() => {
                lin.add_production(ids[p.lhs], vec![GSym::T(*t)]);
            }
            [GSym::N(b), GSym::N(c)] if rank(*b) == 1 => {
                for y in &words[*c] {
                    let mut rhs = vec![GSym::N(ids[*b])];
                    rhs.extend(y.iter().map(|&s| GSym::T(s)));
                    lin.add_production(ids[p.lhs], rhs);
                }
            }
            [GSym::N(b), GSym::N(c)] => {
                for x in &words[*b] {
                    let mut rhs: Vec<GSym> = x.iter().map(|&s| GSym::T(s)).collect();
                    rhs.push(GSym::N(ids[*c]));
                    lin.add_production(ids[p.lhs], rhs);
                }
            }
            _ => return Err(Error::NotLinearNormalForm(cnf.render_production(p))),
        }
    }
    let n = lin.productions().len();
    Ok((Transducer::from_linear_grammar(&lin)?.trim(), k, n))
}

//! Triangles, widths, triangulations of cycles and grammars for the table.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::automata::Fsa;
use crate::error::{Error, Result};
use crate::grammars::{cyk_parse, rank_analysis, Cfg, GSym, ParseTree, RankOptions, RankTable};
use crate::groups::{Element, GroupSpec};
use crate::limits::Limits;
use crate::table::{enumerate_table, TableSpec};
use crate::transducers::Transducer;
use crate::words::{split_on_hash, Symbol, Word};

/// Three vertices and three sides; side `i` runs from vertex `i` to vertex
/// `i + 1 mod 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [Element; 3],
    pub sides: [Word; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleMetrics {
    /// Largest distance from a point on one side to the other two sides.
    pub width: usize,
    /// Largest distance between two vertices.
    pub norm: usize,
}

/// The triangle of `u#v#w` based at the identity: vertices `1, ū, ūv̄`.
pub fn triangle_from_table_word(spec: &GroupSpec, t: &Word) -> Result<Triangle> {
    let parts = split_on_hash(t);
    let bad = || Error::NotATableWord(spec.alphabet().display(t));
    let [u, v, w]: [Word; 3] = parts.try_into().map_err(|_| bad())?;
    if !spec.is_identity(&spec.evaluate(t)?) {
        return Err(bad());
    }
    let one = spec.identity();
    let b = spec.evaluate(&u)?;
    let c = spec.mul(&b, &spec.evaluate(&v)?);
    Ok(Triangle { vertices: [one, b, c], sides: [u, v, w] })
}

/// Width by breadth-first search from the points of the other two sides,
/// within the ball of radius equal to the perimeter.
pub fn triangle_width(spec: &GroupSpec, tri: &Triangle, limits: &Limits) -> Result<TriangleMetrics> {
    let points: Vec<Vec<Element>> =
        (0..3).map(|i| spec.path_points(&tri.vertices[i], &tri.sides[i])).collect::<Result<_>>()?;
    let cap: usize = tri.sides.iter().map(Word::len).sum();
    let mut width = 0;
    for i in 0..3 {
        let sources = points[(i + 1) % 3].iter().chain(&points[(i + 2) % 3]);
        width = width.max(farthest_from(spec, sources, &points[i], cap, limits)?);
    }
    let mut norm = 0;
    for i in 0..3 {
        norm = norm.max(spec.word_distance(&tri.vertices[i], &tri.vertices[(i + 1) % 3]));
    }
    Ok(TriangleMetrics { width, norm })
}

// max over targets of the distance to the nearest source
fn farthest_from<'a>(
    spec: &GroupSpec,
    sources: impl Iterator<Item = &'a Element>,
    targets: &[Element],
    cap: usize,
    limits: &Limits,
) -> Result<usize> {
    let mut pending: HashSet<&Element> = targets.iter().collect();
    let mut seen: HashSet<Element> = HashSet::new();
    let mut frontier: Vec<Element> = Vec::new();
    for s in sources {
        if seen.insert(s.clone()) {
            frontier.push(s.clone());
        }
    }
    let mut d = 0;
    loop {
        for x in &frontier {
            pending.remove(x);
        }
        if pending.is_empty() {
            return Ok(d);
        }
        if d == cap || frontier.is_empty() {
            return Err(Error::BudgetExceeded(limits.elements));
        }
        let mut next = Vec::new();
        for x in &frontier {
            for l in spec.alphabet().letters() {
                let y = spec.mul_letter(x, l);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if seen.len() > limits.elements {
            return Err(Error::BudgetExceeded(limits.elements));
        }
        frontier = next;
        d += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScatterPoint {
    pub norm: usize,
    pub width: usize,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlabbyReport {
    pub group: String,
    pub maxlen: usize,
    pub slope: f64,
    pub triangles: usize,
    pub max_width: usize,
    /// `max (δ(T) − slope·|T|)` over the enumerated triangles.
    pub c_emp: f64,
    pub scatter: Vec<ScatterPoint>,
}

/// Widths of all `R`-triangles from table words of length at most `maxlen`.
pub fn flabby_check(spec: &GroupSpec, r: &Fsa, maxlen: usize, slope: f64, limits: &Limits) -> Result<FlabbyReport> {
    let ts = TableSpec { group: spec.clone(), combing: r.clone(), closed_under_inverses: false };
    let words = enumerate_table(&ts, maxlen, limits)?;
    let metrics: Vec<TriangleMetrics> = words
        .par_iter()
        .map(|t| triangle_width(spec, &triangle_from_table_word(spec, t)?, limits))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for m in &metrics {
        *counts.entry((m.norm, m.width)).or_default() += 1;
    }
    let c_emp = metrics.iter().map(|m| m.width as f64 - slope * m.norm as f64).fold(f64::NEG_INFINITY, f64::max);
    Ok(FlabbyReport {
        group: spec.name().to_string(),
        maxlen,
        slope,
        triangles: metrics.len(),
        max_width: metrics.iter().map(|m| m.width).max().unwrap_or(0),
        c_emp,
        scatter: counts.into_iter().map(|((norm, width), count)| ScatterPoint { norm, width, count }).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangulationPolicy {
    /// `k` minimizing `max(d(g_i, g_k), d(g_j, g_k))`, smallest `k` on ties.
    Greedy,
    /// `k` nearest to the midpoint of a geodesic from `g_i` to `g_j`.
    Paper,
}

impl FromStr for TriangulationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(TriangulationPolicy::Greedy),
            "paper" => Ok(TriangulationPolicy::Paper),
            other => Err(Error::Parse { line: 0, message: format!("unknown policy {other:?}") }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Diagonal {
    pub i: usize,
    pub j: usize,
    pub length: usize,
}

/// Diagonals between the vertices `g_1, ..., g_n` of a cycle, where `g_k` is
/// the image of the length-`k` prefix (so `g_n = 1`).
#[derive(Clone, Debug, Serialize)]
pub struct PolygonTriangulation {
    pub n: usize,
    pub diagonals: Vec<Diagonal>,
}

impl PolygonTriangulation {
    /// `n − 3` pairwise non-crossing diagonals, none of them a polygon edge.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        if n <= 3 {
            return self.diagonals.is_empty();
        }
        if self.diagonals.len() != n - 3 {
            return false;
        }
        let mut seen = HashSet::new();
        for d in &self.diagonals {
            let (a, b) = (d.i.min(d.j), d.i.max(d.j));
            if a < 1 || b > n || b - a < 2 || (a == 1 && b == n) || !seen.insert((a, b)) {
                return false;
            }
        }
        let chords: Vec<(usize, usize)> = seen.into_iter().collect();
        for (x, &(a, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[x + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_length(&self) -> usize {
        self.diagonals.iter().map(|d| d.length).max().unwrap_or(0)
    }

    /// `max (length − n/6)` over the diagonals; 0 without diagonals.
    pub fn excess(&self) -> f64 {
        self.diagonals.iter().map(|d| d.length as f64 - self.n as f64 / 6.0).fold(0.0, f64::max)
    }
}

pub fn triangulate_cycle(spec: &GroupSpec, cycle: &Word, policy: TriangulationPolicy) -> Result<PolygonTriangulation> {
    let n = cycle.len();
    let display = || spec.alphabet().display(cycle);
    if n == 0 || cycle.contains_hash() || !spec.is_identity(&spec.evaluate(cycle)?) {
        return Err(Error::NotACycle(display()));
    }
    if n <= 3 {
        return Ok(PolygonTriangulation { n, diagonals: Vec::new() });
    }
    // g[k] for k = 0..=n; g[0] = g[n] = 1
    let g = spec.path_points(&spec.identity(), cycle)?;
    let dist = |i: usize, j: usize| spec.word_distance(&g[i], &g[j]);
    let mut diagonals = vec![Diagonal { i: n, j: 2, length: dist(n, 2) }];
    let mut work = vec![(2usize, n)];
    while let Some((i, j)) = work.pop() {
        if j - i < 3 {
            continue;
        }
        let k = match policy {
            TriangulationPolicy::Greedy => (i + 1..j).min_by_key(|&k| (dist(i, k).max(dist(j, k)), k)).unwrap(),
            TriangulationPolicy::Paper => {
                let nf = spec.normal_form(&spec.mul(&spec.inverse(&g[i]), &g[j]));
                let h = spec.mul(&g[i], &spec.evaluate(&nf.slice(0, nf.len() / 2))?);
                (i + 1..j).min_by_key(|&k| (spec.word_distance(&h, &g[k]), k)).unwrap()
            }
        };
        if k > i + 1 {
            diagonals.push(Diagonal { i, j: k, length: dist(i, k) });
            work.push((i, k));
        }
        if k < j - 1 {
            diagonals.push(Diagonal { i: k, j, length: dist(k, j) });
            work.push((k, j));
        }
    }
    Ok(PolygonTriangulation { n, diagonals })
}

#[derive(Clone, Debug, Serialize)]
pub struct Proximity {
    pub n: usize,
    /// Largest distance from a point of `v0` to the path `w`.
    pub v0_to_w: usize,
    /// Largest distance from a point of `w` to the path `v0`.
    pub w_to_v0: usize,
    /// `v0_to_w − n/36`.
    pub d_from_v0: f64,
    /// `(w_to_v0 − n/18) / 2`.
    pub d_from_w: f64,
}

/// Distances between two paths from the identity with the same endpoint.
pub fn combing_proximity(spec: &GroupSpec, w: &Word, v0: &Word) -> Result<Proximity> {
    if spec.evaluate(w)? != spec.evaluate(v0)? {
        return Err(Error::EndpointMismatch);
    }
    let pw = spec.path_points(&spec.identity(), w)?;
    let pv = spec.path_points(&spec.identity(), v0)?;
    let spread = |from: &[Element], to: &[Element]| {
        from.iter().map(|p| to.iter().map(|q| spec.word_distance(p, q)).min().unwrap_or(0)).max().unwrap_or(0)
    };
    let n = w.len();
    let v0_to_w = spread(&pv, &pw);
    let w_to_v0 = spread(&pw, &pv);
    Ok(Proximity {
        n,
        v0_to_w,
        w_to_v0,
        d_from_v0: v0_to_w as f64 - n as f64 / 36.0,
        d_from_w: (w_to_v0 as f64 - n as f64 / 18.0) / 2.0,
    })
}

/// `b_0 = n`, `b_{k+1} = (1 + b_k)/2`, up to the first term `≤ 2`.
pub fn bk_sequence(n: u64) -> Vec<f64> {
    let mut out = vec![n as f64];
    while *out.last().unwrap() > 2.0 {
        let b = *out.last().unwrap();
        out.push((1.0 + b) / 2.0);
    }
    out
}

/// Exact check of `b_k ≤ 1 + n/2^k` for every emitted term and of
/// termination within `⌈log₂ n⌉ + 1` steps. With `b_k = c_k / 2^k` the
/// recurrence reads `c_{k+1} = c_k + 2^k`.
pub fn bk_bound_holds(n: u64) -> bool {
    let n = n as u128;
    let mut c = n;
    let mut k = 0u32;
    let ceil_log = if n <= 1 { 0 } else { 128 - (n - 1).leading_zeros() };
    loop {
        let p = 1u128 << k;
        if c > p + n {
            return false;
        }
        if c <= 2 * p {
            return k <= ceil_log + 1;
        }
        c += p;
        k += 1;
        if k > 120 {
            return false;
        }
    }
}

fn nonterminal_name(spec: &GroupSpec, w: &Word) -> String {
    format!("X[{}]", spec.alphabet().render(w))
}

struct Vocabulary {
    symbols: Vec<GSym>,
    images: Vec<Element>,
    by_image: HashMap<Element, Vec<usize>>,
    ball: HashSet<Element>,
}

// Nonterminals X_w for |w| ≤ δ over Σ_#, plus the terminals Σ_#.
fn vocabulary(spec: &GroupSpec, delta: usize, g: &mut Cfg, limits: &Limits) -> Result<Vocabulary> {
    let al = spec.alphabet().clone();
    let sym: Vec<Symbol> = al.symbols_with_hash().collect();
    let mut words = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..delta {
        let mut next = Vec::new();
        for w in &layer {
            for &s in &sym {
                next.push(w.append(s));
            }
        }
        words.extend(next.iter().cloned());
        if words.len() > limits.elements {
            return Err(Error::BudgetExceeded(limits.elements));
        }
        layer = next;
    }
    let mut symbols = Vec::new();
    let mut images = Vec::new();
    for w in &words {
        symbols.push(GSym::N(g.nonterminal(&nonterminal_name(spec, w))));
        images.push(spec.evaluate(w)?);
    }
    let ball: HashSet<Element> = images.iter().cloned().collect();
    for &s in &sym {
        symbols.push(GSym::T(s));
        images.push(spec.evaluate(&Word::from(vec![s]))?);
    }
    let mut by_image: HashMap<Element, Vec<usize>> = HashMap::new();
    for (i, x) in images.iter().enumerate() {
        if matches!(symbols[i], GSym::N(_)) {
            by_image.entry(x.clone()).or_default().push(i);
        }
    }
    Ok(Vocabulary { symbols, images, by_image, ball })
}

const MAX_RHS: usize = 5;

fn synthesize(spec: &GroupSpec, delta: usize, irreducible: bool, limits: &Limits) -> Result<Cfg> {
    if delta == 0 {
        return Err(Error::InvalidGroup("grammar synthesis needs delta >= 1".into()));
    }
    let mut g = Cfg::new(spec.alphabet().clone(), &nonterminal_name(spec, &Word::empty()));
    let voc = vocabulary(spec, delta, &mut g, limits)?;
    let v = voc.symbols.len();
    // depth-first over right-hand sides with prefix images
    let mut rhs: Vec<usize> = Vec::new();
    let mut prefix: Vec<Element> = vec![spec.identity()];
    let mut next: Vec<usize> = vec![0];
    let mut visited = 0usize;
    while let Some(top) = next.last_mut() {
        if *top == v || rhs.len() == MAX_RHS {
            next.pop();
            if rhs.pop().is_some() {
                prefix.pop();
            }
            continue;
        }
        let s = *top;
        *top += 1;
        let m = rhs.len();
        let image = spec.mul(&prefix[m], &voc.images[s]);
        if irreducible && m >= 1 {
            // every block that stops being the whole word, or ends at the new
            // symbol with length 2..=m, must leave the δ-ball
            let whole_old = m >= 2 && voc.ball.contains(&prefix[m]);
            let short_block = (1..m).any(|start| voc.ball.contains(&spec.mul(&spec.inverse(&prefix[start]), &image)));
            if whole_old || short_block {
                continue;
            }
        }
        visited += 1;
        if visited > limits.search {
            return Err(Error::BudgetExceeded(limits.search));
        }
        rhs.push(s);
        prefix.push(image.clone());
        if let Some(lhs) = voc.by_image.get(&image) {
            for &x in lhs {
                if rhs.len() == 1 && rhs[0] == x {
                    continue;
                }
                let GSym::N(nt) = voc.symbols[x] else { unreachable!() };
                g.add_production(nt, rhs.iter().map(|&i| voc.symbols[i]).collect());
            }
        }
        next.push(0);
    }
    Ok(g)
}

/// Every production `X → α` with `X` a nonterminal `X_w` (`|w| ≤ δ`), `α` a
/// nonempty word of length at most 5 over nonterminals and `Σ_#`, and
/// `X̄ = ᾱ`. Start symbol `X_ε`.
pub fn synthesize_table_grammar(spec: &GroupSpec, delta: usize, limits: &Limits) -> Result<Cfg> {
    synthesize(spec, delta, false, limits)
}

/// The productions of [`synthesize_table_grammar`] with no proper block
/// `β`, `2 ≤ |β| < |α|`, whose image lies in the δ-ball. A dropped
/// production is derivable by `X → α[β := Z]` followed by `Z → β`, so the
/// language is unchanged.
pub fn synthesize_irreducible_table_grammar(spec: &GroupSpec, delta: usize, limits: &Limits) -> Result<Cfg> {
    synthesize(spec, delta, true, limits)
}

/// `L ∩ R#R#R` for the irreducible synthesized grammar `L`, pruned.
pub fn table_grammar(spec: &GroupSpec, r: &Fsa, delta: usize, limits: &Limits) -> Result<Cfg> {
    let l = synthesize_irreducible_table_grammar(spec, delta, limits)?;
    l.intersect_regular(&Fsa::hash_sandwich(r), limits)
}

/// `R' = R − ρ⁻¹(R)` for `ρ` the union of the substitutions `x → y`.
pub fn refine_subcombing(r: &Fsa, pairs: &[(Word, Word)], limits: &Limits) -> Result<Fsa> {
    let al = r.alphabet().clone();
    for (x, y) in pairs {
        if y.len() >= x.len() {
            return Err(Error::PairNotShrinking(format!("({}, {})", al.display(x), al.display(y))));
        }
    }
    // a pair whose x is not a factor of some R-word removes nothing
    let dfa = r.to_dfa(limits)?.trim();
    let live: Vec<&(Word, Word)> =
        pairs.iter().filter(|(x, _)| (0..dfa.num_states()).any(|q| dfa.run_from(q, x.symbols()).is_some())).collect();
    if live.is_empty() {
        return Ok(r.clone());
    }
    let mut rho = Transducer::empty(al.clone());
    for (x, y) in live {
        rho = rho.union(&Transducer::context_embed(al.clone(), x, y));
    }
    let reducible = rho.inverse_relation().apply_to_regular(r, limits)?;
    let out = r.difference(&reducible, limits)?;
    Ok(out.to_dfa(limits)?.minimize().to_fsa())
}

#[derive(Clone, Debug, Serialize)]
pub struct ThinnessRecord {
    pub word: String,
    pub norm: usize,
    pub width: usize,
    /// `max |x_B| + |u_A|` over the letters of the word.
    pub bound: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThinnessReport {
    pub group: String,
    pub maxlen: usize,
    pub k: usize,
    pub records: Vec<ThinnessRecord>,
    /// Table words the grammar does not derive.
    pub uncovered: Vec<String>,
    pub max_bound: usize,
    pub max_width: usize,
    /// Every bound is at least the true width.
    pub certified: bool,
}

/// Width bounds read off CNF derivations: for each letter `b`, `A` is the
/// last positive-rank node above it and `B` the rank-zero child of `A`
/// deriving `b`; the letter lies within `|x_B| + |u_A|` of another side.
pub fn thinness_certificate(spec: &GroupSpec, g_cnf: &Cfg, r: &Fsa, maxlen: usize, limits: &Limits) -> Result<ThinnessReport> {
    g_cnf.check_cnf()?;
    let ranks = rank_analysis(g_cnf, spec, &RankOptions::default())?;
    let ts = TableSpec { group: spec.clone(), combing: r.clone(), closed_under_inverses: false };
    let words = enumerate_table(&ts, maxlen, limits)?;
    let al = spec.alphabet();
    let results: Vec<Result<std::result::Result<ThinnessRecord, String>>> = words
        .par_iter()
        .map(|t| {
            let Some(tree) = cyk_parse(g_cnf, t)? else { return Ok(Err(al.display(t))) };
            let m = triangle_width(spec, &triangle_from_table_word(spec, t)?, limits)?;
            Ok(Ok(ThinnessRecord { word: al.display(t), norm: m.norm, width: m.width, bound: derivation_bound(&tree, &ranks) }))
        })
        .collect();
    let mut records = Vec::new();
    let mut uncovered = Vec::new();
    for r in results {
        match r? {
            Ok(rec) => records.push(rec),
            Err(w) => uncovered.push(w),
        }
    }
    Ok(ThinnessReport {
        group: spec.name().to_string(),
        maxlen,
        k: ranks.k,
        max_bound: records.iter().map(|r| r.bound).max().unwrap_or(0),
        max_width: records.iter().map(|r| r.width).max().unwrap_or(0),
        certified: records.iter().all(|r| r.bound >= r.width),
        records,
        uncovered,
    })
}

fn derivation_bound(tree: &ParseTree, ranks: &RankTable) -> usize {
    let rank = |t: &ParseTree| ranks.rank(t.nonterminal()).unwrap_or(0);
    let mut best = 0;
    let mut stack = vec![tree];
    while let Some(node) = stack.pop() {
        let ParseTree::Node { nt, left, right } = node else { continue };
        if rank(node) == 0 {
            continue;
        }
        let ua = ranks.get(*nt).map_or(0, |e| e.witness.len());
        for child in [left.as_ref(), right.as_ref()] {
            if rank(child) == 0 {
                best = best.max(child.len() + ua);
            } else {
                stack.push(child);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammars::{cyk_member, enumerate_cfg};
    use crate::groups::{geodesic_combing, shortlex_combing};
    use crate::words::Alphabet;

    fn lim() -> Limits {
        Limits::default()
    }

    fn w(spec: &GroupSpec, s: &str) -> Word {
        spec.alphabet().parse(s).unwrap()
    }

    #[test]
    fn triangles_from_words() {
        let z3 = GroupSpec::cyclic(3);
        let t = triangle_from_table_word(&z3, &w(&z3, "a#a#a")).unwrap();
        assert_eq!(t.vertices[1], z3.evaluate(&w(&z3, "a")).unwrap());
        assert_eq!(t.vertices[2], z3.evaluate(&w(&z3, "aa")).unwrap());
        let f2 = GroupSpec::free(2);
        let t = triangle_from_table_word(&f2, &w(&f2, "a#A#")).unwrap();
        assert_eq!(t.vertices[0], t.vertices[2]);
        let t = triangle_from_table_word(&f2, &w(&f2, "ab#BA#")).unwrap();
        assert_eq!(t.vertices, [f2.identity(), f2.evaluate(&w(&f2, "ab")).unwrap(), f2.identity()]);
        assert!(matches!(triangle_from_table_word(&f2, &w(&f2, "a#a#")), Err(Error::NotATableWord(_))));
        assert!(matches!(triangle_from_table_word(&f2, &w(&f2, "a#A")), Err(Error::NotATableWord(_))));
    }

    #[test]
    fn width_examples() {
        let f2 = GroupSpec::free(2);
        let tri = Triangle {
            vertices: [f2.identity(), f2.evaluate(&w(&f2, "a")).unwrap(), f2.identity()],
            sides: [w(&f2, "a"), w(&f2, "A"), Word::empty()],
        };
        assert_eq!(triangle_width(&f2, &tri, &lim()).unwrap().width, 0);
        // geodesic triangle on 1, ab, aB
        let t = triangle_from_table_word(&f2, &w(&f2, "ab#BB#bA")).unwrap();
        assert_eq!(triangle_width(&f2, &t, &lim()).unwrap(), TriangleMetrics { width: 0, norm: 2 });
        let z2 = GroupSpec::z_squared();
        let t = triangle_from_table_word(&z2, &w(&z2, "aa#bb#AABB")).unwrap();
        assert_eq!(triangle_width(&z2, &t, &lim()).unwrap(), TriangleMetrics { width: 2, norm: 4 });
    }

    #[test]
    fn flabby_examples() {
        let f2 = GroupSpec::free(2);
        let r = geodesic_combing(&f2).unwrap().fsa;
        let rep = flabby_check(&f2, &r, 8, 1.0 / 75.0, &lim()).unwrap();
        assert_eq!(rep.max_width, 0);
        assert_eq!(rep.c_emp, 0.0);
        let z3 = GroupSpec::cyclic(3);
        let rep = flabby_check(&z3, &shortlex_combing(&z3).unwrap().fsa, 9, 1.0 / 75.0, &lim()).unwrap();
        assert!(rep.c_emp <= 2.0);
    }

    #[test]
    fn small_triangulations() {
        let f2 = GroupSpec::free(2);
        let t = triangulate_cycle(&f2, &w(&f2, "aAa"), TriangulationPolicy::Greedy);
        assert!(matches!(t, Err(Error::NotACycle(_))));
        let t = triangulate_cycle(&f2, &w(&f2, "abB"), TriangulationPolicy::Greedy);
        assert!(t.is_err());
        let t = triangulate_cycle(&f2, &w(&f2, "aAbB"), TriangulationPolicy::Greedy).unwrap();
        assert_eq!(t.diagonals.len(), 1);
        assert_eq!((t.diagonals[0].i, t.diagonals[0].j), (4, 2));
        assert!(t.diagonals[0].length <= 2 && t.is_valid());
        let t = triangulate_cycle(&f2, &w(&f2, "aAA"), TriangulationPolicy::Greedy);
        assert!(t.is_err());
        let z3 = GroupSpec::cyclic(3);
        assert!(triangulate_cycle(&z3, &w(&z3, "aaa"), TriangulationPolicy::Paper).unwrap().diagonals.is_empty());
    }

    #[test]
    fn longer_triangulations_are_valid() {
        let f2 = GroupSpec::free(2);
        for s in ["abABbaBA", "aabbBBAAabBA", "abBAbaAB", "aaaAAAbbbBBB"] {
            let Ok(c) = f2.alphabet().parse(s) else { continue };
            for policy in [TriangulationPolicy::Greedy, TriangulationPolicy::Paper] {
                let t = triangulate_cycle(&f2, &c, policy).unwrap();
                assert!(t.is_valid(), "{s} {policy:?}");
                assert!(t.excess() <= 3.0);
            }
        }
    }

    #[test]
    fn validity_rejects_crossings() {
        let bad = PolygonTriangulation {
            n: 6,
            diagonals: vec![Diagonal { i: 1, j: 4, length: 0 }, Diagonal { i: 2, j: 5, length: 0 }, Diagonal { i: 1, j: 3, length: 0 }],
        };
        assert!(!bad.is_valid());
    }

    #[test]
    fn proximity_examples() {
        let f2 = GroupSpec::free(2);
        let p = combing_proximity(&f2, &w(&f2, "ab"), &w(&f2, "ab")).unwrap();
        assert_eq!((p.v0_to_w, p.w_to_v0), (0, 0));
        // the spur aA backtracks onto v0 itself, so both maxima are 0
        let p = combing_proximity(&f2, &w(&f2, "aAab"), &w(&f2, "ab")).unwrap();
        assert_eq!((p.v0_to_w, p.w_to_v0), (0, 0));
        let p = combing_proximity(&f2, &w(&f2, "bBab"), &w(&f2, "ab")).unwrap();
        assert_eq!((p.v0_to_w, p.w_to_v0), (0, 1));
        let z2 = GroupSpec::z_squared();
        let p = combing_proximity(&z2, &w(&z2, "ab"), &w(&z2, "ba")).unwrap();
        assert_eq!((p.v0_to_w, p.w_to_v0), (1, 1));
        assert_eq!(combing_proximity(&f2, &w(&f2, "a"), &w(&f2, "b")).unwrap_err(), Error::EndpointMismatch);
    }

    #[test]
    fn bk_examples() {
        assert_eq!(bk_sequence(0), vec![0.0]);
        assert_eq!(bk_sequence(2), vec![2.0]);
        assert_eq!(bk_sequence(8), vec![8.0, 4.5, 2.75, 1.875]);
        for n in 0..2000 {
            assert!(bk_bound_holds(n));
            let seq = bk_sequence(n);
            for (k, b) in seq.iter().enumerate() {
                assert!(*b <= 1.0 + n as f64 / 2f64.powi(k as i32));
            }
        }
    }

    #[test]
    fn synthesized_grammars_are_sound() {
        for spec in [GroupSpec::cyclic(2), GroupSpec::free(1)] {
            let g = synthesize_table_grammar(&spec, 1, &lim()).unwrap();
            for p in g.productions() {
                assert!(!p.rhs.is_empty() && p.rhs.len() <= 5);
            }
            for word in enumerate_cfg(&g, 6, &lim()).unwrap() {
                assert!(spec.is_identity(&spec.evaluate(&word).unwrap()));
            }
        }
    }

    #[test]
    fn f1_grammar_contains_example() {
        let f1 = GroupSpec::free(1);
        let g = synthesize_table_grammar(&f1, 1, &lim()).unwrap();
        assert!(cyk_member(&g.to_cnf().unwrap(), &w(&f1, "a#A#")).unwrap());
    }

    #[test]
    fn irreducible_grammar_has_the_same_language() {
        for spec in [GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::free(1)] {
            let full = synthesize_table_grammar(&spec, 1, &lim()).unwrap();
            let small = synthesize_irreducible_table_grammar(&spec, 1, &lim()).unwrap();
            assert!(small.productions().len() < full.productions().len());
            assert_eq!(enumerate_cfg(&full, 6, &lim()).unwrap(), enumerate_cfg(&small, 6, &lim()).unwrap(), "{}", spec.name());
        }
    }

    #[test]
    fn refine_examples() {
        let f1 = GroupSpec::free(1);
        let al = f1.alphabet().clone();
        let sigma = Fsa::sigma_star(al.clone());
        assert!(refine_subcombing(&sigma, &[], &lim()).unwrap().equivalent(&sigma, &lim()).unwrap());
        let r = refine_subcombing(&sigma, &[(w(&f1, "aAa"), w(&f1, "a"))], &lim()).unwrap();
        let letters: Vec<Symbol> = al.letters().collect();
        let want: Vec<Word> = crate::words::words_up_to(&letters, 5)
            .into_iter()
            .filter(|u| !u.symbols().windows(3).any(|x| al.render(&Word::from(x)) == "aAa"))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(r.enumerate(5, &lim()).unwrap(), want);
        assert!(matches!(refine_subcombing(&sigma, &[(w(&f1, "a"), w(&f1, "aA"))], &lim()), Err(Error::PairNotShrinking(_))));
    }

    #[test]
    fn thinness_on_f2() {
        let f2 = GroupSpec::free(2);
        let r = geodesic_combing(&f2).unwrap().fsa;
        let m = table_grammar(&f2, &r, 1, &lim()).unwrap().to_cnf().unwrap();
        let rep = thinness_certificate(&f2, &m, &r, 8, &lim()).unwrap();
        assert!(rep.uncovered.is_empty());
        assert!(rep.certified);
        let hh = rep.records.iter().find(|r| r.word == "##").unwrap();
        assert_eq!((hh.width, hh.bound), (0, 0));
    }

    #[test]
    fn alphabet_used_by_vocabulary() {
        let f1 = GroupSpec::free(1);
        let g = synthesize_irreducible_table_grammar(&f1, 1, &lim()).unwrap();
        assert_eq!(g.name(g.start()), "X[]");
        assert!(g.find("X[#]").is_some());
        let _ = Alphabet::standard(1);
    }
}

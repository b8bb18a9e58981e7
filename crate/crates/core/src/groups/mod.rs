//! Concrete group backends: the surjection `Σ* → G`, normal forms,
//! Cayley-graph distances and balls.

pub(crate) mod combing;
mod file;
mod finite;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

pub use combing::{
    geodesic_combing, is_surjective_at_radius, representative_lengths, shortlex_combing, surjectivity_gaps, Combing,
};
pub use file::{parse_group_file, render_group_file};
pub use finite::FiniteTable;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{free_reduce, Alphabet, Symbol, Word};

/// A group element in the backend's canonical encoding.
///
/// Finite tables use element ids, free groups the freely reduced word, free
/// products the list of nontrivial syllables `(factor, id)` from alternating
/// factors, direct products the tuple of factor elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Element {
    Finite(u32),
    Free(Word),
    FreeProduct(Vec<(u16, u32)>),
    Product(Vec<Element>),
}

#[derive(Clone, Debug)]
pub enum Backend {
    FiniteTable(FiniteTable),
    Free { rank: usize },
    /// Factors are finite-table groups over disjoint sub-alphabets.
    FreeProduct(Vec<GroupSpec>),
    DirectProduct(Vec<GroupSpec>),
}

/// A choice of generators: an alphabet with formal inverses and a backend
/// realizing the homomorphism onto the group.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    name: String,
    alphabet: Arc<Alphabet>,
    backend: Backend,
    // for product backends: global letter -> (factor, local letter)
    owners: Vec<(usize, Symbol)>,
}

impl GroupSpec {
    pub fn finite(name: &str, alphabet: Arc<Alphabet>, table: FiniteTable) -> GroupSpec {
        GroupSpec { name: name.into(), alphabet, backend: Backend::FiniteTable(table), owners: Vec::new() }
    }

    pub fn from_table(name: &str, alphabet: Arc<Alphabet>, rows: Vec<Vec<u32>>, gens: Vec<u32>) -> Result<GroupSpec> {
        let table = FiniteTable::new(&alphabet, rows, gens)?;
        Ok(GroupSpec::finite(name, alphabet, table))
    }

    /// `Z/n` on letters `a`, `A`.
    pub fn cyclic(n: u32) -> GroupSpec {
        GroupSpec::cyclic_named(n, ('a', 'A'))
    }

    pub fn cyclic_named(n: u32, pair: (char, char)) -> GroupSpec {
        assert!(n >= 1);
        let alphabet = Arc::new(Alphabet::from_pairs(&[pair]).expect("valid pair"));
        let rows = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let gens = vec![1 % n, (n - 1) % n];
        let name = if n == 1 { "trivial".to_string() } else { format!("Z/{n}") };
        GroupSpec::from_table(&name, alphabet, rows, gens).expect("cyclic table is a group")
    }

    /// The trivial group presented on `a`, `A` with both letters mapping to 1.
    pub fn trivial() -> GroupSpec {
        GroupSpec::cyclic(1)
    }

    /// The symmetric group on three points, generated by a transposition
    /// (letters `s`, `S`) and a 3-cycle (letters `r`, `R`).
    pub fn symmetric3() -> GroupSpec {
        let perms: Vec<[u8; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let id = |p: [u8; 3]| perms.iter().position(|&q| q == p).unwrap() as u32;
        // (p * q)(x) = q(p(x)): apply p first, matching right multiplication by letters.
        let rows = perms
            .iter()
            .map(|p| perms.iter().map(|q| id([q[p[0] as usize], q[p[1] as usize], q[p[2] as usize]])).collect())
            .collect();
        let swap = id([1, 0, 2]);
        let rot = id([1, 2, 0]);
        let rot_inv = id([2, 0, 1]);
        let alphabet = Arc::new(Alphabet::from_pairs(&[('s', 'S'), ('r', 'R')]).unwrap());
        GroupSpec::from_table("S3", alphabet, rows, vec![swap, swap, rot, rot_inv]).expect("S3 is a group")
    }

    /// Free group on `rank` generators named `a A`, `b B`, ...
    pub fn free(rank: usize) -> GroupSpec {
        GroupSpec {
            name: format!("F{rank}"),
            alphabet: Alphabet::standard(rank),
            backend: Backend::Free { rank },
            owners: Vec::new(),
        }
    }

    pub fn free_named(pairs: &[(char, char)]) -> Result<GroupSpec> {
        let alphabet = Arc::new(Alphabet::from_pairs(pairs)?);
        Ok(GroupSpec {
            name: format!("F{}", pairs.len()),
            alphabet,
            backend: Backend::Free { rank: pairs.len() },
            owners: Vec::new(),
        })
    }

    pub fn free_product(factors: Vec<GroupSpec>) -> Result<GroupSpec> {
        if factors.iter().any(|f| !matches!(f.backend, Backend::FiniteTable(_))) {
            return Err(Error::InvalidGroup("free product factors must be finite tables".into()));
        }
        let name = factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("*");
        GroupSpec::combine(name, factors, Backend::FreeProduct)
    }

    pub fn direct_product(factors: Vec<GroupSpec>) -> Result<GroupSpec> {
        let name = factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("x");
        GroupSpec::combine(name, factors, Backend::DirectProduct)
    }

    fn combine(name: String, factors: Vec<GroupSpec>, make: fn(Vec<GroupSpec>) -> Backend) -> Result<GroupSpec> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("product of no factors".into()));
        }
        let mut pairs = Vec::new();
        let mut owners = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            pairs.extend(f.alphabet.pairs());
            owners.extend(f.alphabet.letters().map(|l| (i, l)));
        }
        let alphabet = Arc::new(Alphabet::from_pairs(&pairs)?);
        Ok(GroupSpec { name, alphabet, backend: make(factors), owners })
    }

    /// Infinite dihedral group `Z/2 * Z/2` on letters `a A` and `b B`.
    pub fn infinite_dihedral() -> GroupSpec {
        GroupSpec::free_product(vec![GroupSpec::cyclic_named(2, ('a', 'A')), GroupSpec::cyclic_named(2, ('b', 'B'))])
            .expect("valid factors")
    }

    /// `Z²` as a direct product of two infinite cyclic groups on `a A`, `b B`.
    pub fn z_squared() -> GroupSpec {
        let mut g = GroupSpec::direct_product(vec![
            GroupSpec::free_named(&[('a', 'A')]).unwrap(),
            GroupSpec::free_named(&[('b', 'B')]).unwrap(),
        ])
        .expect("valid factors");
        g.name = "Z^2".into();
        g
    }

    /// Looks up one of the named example groups.
    pub fn builtin(name: &str) -> Option<GroupSpec> {
        Some(match name {
            "trivial" => GroupSpec::trivial(),
            "z2" => GroupSpec::cyclic(2),
            "z3" => GroupSpec::cyclic(3),
            "z4" => GroupSpec::cyclic(4),
            "s3" => GroupSpec::symmetric3(),
            "f1" | "z" => GroupSpec::free(1),
            "f2" => GroupSpec::free(2),
            "f3" => GroupSpec::free(3),
            "dinf" | "z2*z2" => GroupSpec::infinite_dihedral(),
            "z2xz2" => GroupSpec::direct_product(vec![
                GroupSpec::cyclic_named(2, ('a', 'A')),
                GroupSpec::cyclic_named(2, ('b', 'B')),
            ])
            .unwrap(),
            "zsq" | "z^2" => GroupSpec::z_squared(),
            _ => return None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> GroupSpec {
        self.name = name.into();
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn backend_kind(&self) -> &'static str {
        match self.backend {
            Backend::FiniteTable(_) => "finite",
            Backend::Free { .. } => "free",
            Backend::FreeProduct(_) => "free_product",
            Backend::DirectProduct(_) => "direct_product",
        }
    }

    pub fn factors(&self) -> &[GroupSpec] {
        match &self.backend {
            Backend::FreeProduct(f) | Backend::DirectProduct(f) => f,
            _ => &[],
        }
    }

    /// Offset of factor `i`'s letters inside the product alphabet.
    pub fn factor_offset(&self, i: usize) -> u16 {
        self.factors()[..i].iter().map(|f| f.alphabet.num_letters() as u16).sum()
    }

    pub fn is_finite(&self) -> bool {
        match &self.backend {
            Backend::FiniteTable(_) => true,
            Backend::Free { rank } => *rank == 0,
            Backend::FreeProduct(f) => {
                let nontrivial = f.iter().filter(|g| g.order().unwrap_or(2) > 1).count();
                nontrivial <= 1
            }
            Backend::DirectProduct(f) => f.iter().all(GroupSpec::is_finite),
        }
    }

    /// Group order for finite-table backends.
    pub fn order(&self) -> Option<usize> {
        match &self.backend {
            Backend::FiniteTable(t) => Some(t.order()),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        match &self.backend {
            Backend::FiniteTable(t) => Element::Finite(t.identity()),
            Backend::Free { .. } => Element::Free(Word::empty()),
            Backend::FreeProduct(_) => Element::FreeProduct(Vec::new()),
            Backend::DirectProduct(f) => Element::Product(f.iter().map(GroupSpec::identity).collect()),
        }
    }

    fn check_letter(&self, s: Symbol) -> Result<()> {
        if s.is_hash() || (s.code() as usize) < self.alphabet.num_letters() {
            Ok(())
        } else {
            Err(Error::UnknownSymbol(format!("letter code {}", s.code())))
        }
    }

    /// `x · ā`; the marker acts as the identity.
    pub fn mul_letter(&self, x: &Element, s: Symbol) -> Element {
        if s.is_hash() {
            return x.clone();
        }
        match (&self.backend, x) {
            (Backend::FiniteTable(t), Element::Finite(e)) => Element::Finite(t.mul(*e, t.generator(s))),
            (Backend::Free { .. }, Element::Free(w)) => {
                let mut v = w.symbols().to_vec();
                if v.last().copied() == s.inverse() {
                    v.pop();
                } else {
                    v.push(s);
                }
                Element::Free(Word::from(v))
            }
            (Backend::FreeProduct(f), Element::FreeProduct(syl)) => {
                let (fi, local) = self.owners[s.code() as usize];
                let Backend::FiniteTable(t) = &f[fi].backend else { unreachable!() };
                let mut syl = syl.clone();
                push_syllable(&mut syl, fi as u16, t.generator(local), t);
                Element::FreeProduct(syl)
            }
            (Backend::DirectProduct(f), Element::Product(parts)) => {
                let (fi, local) = self.owners[s.code() as usize];
                let mut parts = parts.clone();
                parts[fi] = f[fi].mul_letter(&parts[fi], local);
                Element::Product(parts)
            }
            _ => panic!("element does not belong to group {}", self.name),
        }
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (&self.backend, x, y) {
            (Backend::FiniteTable(t), Element::Finite(a), Element::Finite(b)) => Element::Finite(t.mul(*a, *b)),
            (Backend::Free { .. }, Element::Free(a), Element::Free(b)) => {
                Element::Free(free_reduce(&a.concat(b)).expect("free elements are marker-free"))
            }
            (Backend::FreeProduct(f), Element::FreeProduct(a), Element::FreeProduct(b)) => {
                let mut syl = a.clone();
                for &(fi, e) in b {
                    let Backend::FiniteTable(t) = &f[fi as usize].backend else { unreachable!() };
                    push_syllable(&mut syl, fi, e, t);
                }
                Element::FreeProduct(syl)
            }
            (Backend::DirectProduct(f), Element::Product(a), Element::Product(b)) => {
                Element::Product(f.iter().zip(a.iter().zip(b)).map(|(g, (p, q))| g.mul(p, q)).collect())
            }
            _ => panic!("elements do not belong to group {}", self.name),
        }
    }

    pub fn inverse(&self, x: &Element) -> Element {
        match (&self.backend, x) {
            (Backend::FiniteTable(t), Element::Finite(a)) => Element::Finite(t.inverse(*a)),
            (Backend::Free { .. }, Element::Free(w)) => {
                Element::Free(crate::words::formal_inverse(w).expect("free elements are marker-free"))
            }
            (Backend::FreeProduct(f), Element::FreeProduct(syl)) => Element::FreeProduct(
                syl.iter()
                    .rev()
                    .map(|&(fi, e)| {
                        let Backend::FiniteTable(t) = &f[fi as usize].backend else { unreachable!() };
                        (fi, t.inverse(e))
                    })
                    .collect(),
            ),
            (Backend::DirectProduct(f), Element::Product(parts)) => {
                Element::Product(f.iter().zip(parts).map(|(g, p)| g.inverse(p)).collect())
            }
            _ => panic!("element does not belong to group {}", self.name),
        }
    }

    /// The extended homomorphism `Σ_#* → G` with `#̄ = 1`.
    pub fn evaluate(&self, w: &Word) -> Result<Element> {
        self.evaluate_symbols(w.symbols())
    }

    pub fn evaluate_symbols(&self, w: &[Symbol]) -> Result<Element> {
        let mut x = self.identity();
        for &s in w {
            self.check_letter(s)?;
            x = self.mul_letter(&x, s);
        }
        Ok(x)
    }

    /// Evaluation with the marker mapped to `marker` instead of the identity.
    pub fn evaluate_with_marker(&self, w: &[Symbol], marker: &Element) -> Result<Element> {
        let mut x = self.identity();
        for &s in w {
            self.check_letter(s)?;
            x = if s.is_hash() { self.mul(&x, marker) } else { self.mul_letter(&x, s) };
        }
        Ok(x)
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    /// A normal-form word for `x`: shortlex for finite tables, the reduced
    /// word for free groups, syllable-wise shortlex for free products and
    /// the concatenation of factor normal forms for direct products.
    pub fn normal_form(&self, x: &Element) -> Word {
        match (&self.backend, x) {
            (Backend::FiniteTable(t), Element::Finite(e)) => t.shortlex(*e).clone(),
            (Backend::Free { .. }, Element::Free(w)) => w.clone(),
            (Backend::FreeProduct(f), Element::FreeProduct(syl)) => {
                let mut v = Vec::new();
                for &(fi, e) in syl {
                    let Backend::FiniteTable(t) = &f[fi as usize].backend else { unreachable!() };
                    let off = self.factor_offset(fi as usize);
                    v.extend(t.shortlex(e).iter().map(|s| Symbol::letter(s.code() + off)));
                }
                Word::from(v)
            }
            (Backend::DirectProduct(f), Element::Product(parts)) => {
                let mut v = Vec::new();
                for (i, (g, p)) in f.iter().zip(parts).enumerate() {
                    let off = self.factor_offset(i);
                    v.extend(g.normal_form(p).iter().map(|s| Symbol::letter(s.code() + off)));
                }
                Word::from(v)
            }
            _ => panic!("element does not belong to group {}", self.name),
        }
    }

    /// Word length of `x`: the distance from the identity in the Cayley
    /// graph, read off the canonical encoding.
    pub fn word_norm(&self, x: &Element) -> usize {
        match (&self.backend, x) {
            (Backend::FiniteTable(t), Element::Finite(e)) => t.shortlex(*e).len(),
            (Backend::Free { .. }, Element::Free(w)) => w.len(),
            (Backend::FreeProduct(f), Element::FreeProduct(syl)) => syl
                .iter()
                .map(|&(fi, e)| {
                    let Backend::FiniteTable(t) = &f[fi as usize].backend else { unreachable!() };
                    t.shortlex(e).len()
                })
                .sum(),
            (Backend::DirectProduct(f), Element::Product(parts)) => {
                f.iter().zip(parts).map(|(g, p)| g.word_norm(p)).sum()
            }
            _ => panic!("element does not belong to group {}", self.name),
        }
    }

    /// `d(g, h) = |g⁻¹h|`.
    pub fn word_distance(&self, g: &Element, h: &Element) -> usize {
        self.word_norm(&self.mul(&self.inverse(g), h))
    }

    /// Complete distance table of the ball of `radius` around the identity.
    pub fn cayley_ball(&self, radius: usize, limits: &Limits) -> Result<CayleyBall> {
        let center = self.identity();
        let mut table = HashMap::new();
        table.insert(center.clone(), 0usize);
        let mut frontier = vec![center.clone()];
        for d in 1..=radius {
            let mut next = Vec::new();
            for x in &frontier {
                for l in self.alphabet.letters() {
                    let y = self.mul_letter(x, l);
                    if !table.contains_key(&y) {
                        table.insert(y.clone(), d);
                        next.push(y);
                        if table.len() > limits.elements {
                            return Err(Error::BudgetExceeded(limits.elements));
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(CayleyBall { center, radius, table })
    }

    /// `d(g, h)` if at most `cap`, found by BFS from the identity towards `g⁻¹h`.
    pub fn distance(&self, g: &Element, h: &Element, cap: usize, limits: &Limits) -> Result<Distance> {
        let target = self.mul(&self.inverse(g), h);
        Ok(match self.geodesic_to(&target, cap, limits)? {
            Some(w) => Distance::Finite(w.len()),
            None => Distance::Unreachable,
        })
    }

    /// Shortlex-least geodesic word from `g` to `h`, if `d(g, h) ≤ cap`.
    pub fn geodesic_between(&self, g: &Element, h: &Element, cap: usize, limits: &Limits) -> Result<Option<Word>> {
        let target = self.mul(&self.inverse(g), h);
        self.geodesic_to(&target, cap, limits)
    }

    fn geodesic_to(&self, target: &Element, cap: usize, limits: &Limits) -> Result<Option<Word>> {
        let start = self.identity();
        if *target == start {
            return Ok(Some(Word::empty()));
        }
        let mut parent: HashMap<Element, (Element, Symbol)> = HashMap::new();
        let mut queue = VecDeque::from([(start.clone(), 0usize)]);
        parent.insert(start.clone(), (start.clone(), Symbol::HASH));
        while let Some((x, d)) = queue.pop_front() {
            if d == cap {
                continue;
            }
            for l in self.alphabet.letters() {
                let y = self.mul_letter(&x, l);
                if parent.contains_key(&y) {
                    continue;
                }
                parent.insert(y.clone(), (x.clone(), l));
                if parent.len() > limits.elements {
                    return Err(Error::BudgetExceeded(limits.elements));
                }
                if y == *target {
                    let mut word = Vec::new();
                    let mut cur = y;
                    while cur != start {
                        let (p, l) = parent[&cur].clone();
                        word.push(l);
                        cur = p;
                    }
                    word.reverse();
                    return Ok(Some(Word::from(word)));
                }
                queue.push_back((y, d + 1));
            }
        }
        Ok(None)
    }

    /// The group elements visited by the path labelled `w` starting at `start`.
    pub fn path_points(&self, start: &Element, w: &Word) -> Result<Vec<Element>> {
        let mut pts = Vec::with_capacity(w.len() + 1);
        let mut x = start.clone();
        pts.push(x.clone());
        for &s in w {
            self.check_letter(s)?;
            if s.is_hash() {
                continue;
            }
            x = self.mul_letter(&x, s);
            pts.push(x.clone());
        }
        Ok(pts)
    }
}

fn push_syllable(syl: &mut Vec<(u16, u32)>, factor: u16, e: u32, t: &FiniteTable) {
    if e == t.identity() {
        return;
    }
    match syl.last_mut() {
        Some((f, last)) if *f == factor => {
            let m = t.mul(*last, e);
            if m == t.identity() {
                syl.pop();
            } else {
                *last = m;
            }
        }
        _ => syl.push((factor, e)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

/// Distances from `center` to every element within `radius`.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub center: Element,
    pub radius: usize,
    pub table: HashMap<Element, usize>,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, x: &Element) -> Option<usize> {
        self.table.get(x).copied()
    }

    /// Elements sorted by distance then canonical encoding.
    pub fn sorted_elements(&self) -> Vec<(Element, usize)> {
        let mut v: Vec<_> = self.table.iter().map(|(e, &d)| (e.clone(), d)).collect();
        v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        v
    }
}

/// Answers `d(g, h)` from a precomputed ball around the identity, falling
/// back to a capped BFS for pairs farther apart than the ball radius.
pub struct DistanceOracle<'a> {
    spec: &'a GroupSpec,
    ball: CayleyBall,
    limits: Limits,
}

impl<'a> DistanceOracle<'a> {
    pub fn new(spec: &'a GroupSpec, radius: usize, limits: &Limits) -> Result<DistanceOracle<'a>> {
        Ok(DistanceOracle { spec, ball: spec.cayley_ball(radius, limits)?, limits: *limits })
    }

    pub fn radius(&self) -> usize {
        self.ball.radius
    }

    /// Exact distance; `cap` bounds the fallback search.
    pub fn distance(&self, g: &Element, h: &Element, cap: usize) -> Result<Distance> {
        let x = self.spec.mul(&self.spec.inverse(g), h);
        if let Some(d) = self.ball.get(&x) {
            return Ok(Distance::Finite(d));
        }
        if cap <= self.ball.radius {
            return Ok(Distance::Unreachable);
        }
        self.spec.distance(&self.spec.identity(), &x, cap, &self.limits)
    }
}

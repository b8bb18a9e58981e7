use multab::automata::Fsa;
use multab::grammars::pumping_pairs;
use multab::groups::{geodesic_combing, is_surjective_at_radius, representative_lengths, shortlex_combing, GroupSpec};
use multab::hyperbolicity::{
    bk_bound_holds, bk_sequence, flabby_check, refine_subcombing, synthesize_irreducible_table_grammar, table_grammar,
    thinness_certificate, triangulate_cycle, TriangulationPolicy,
};
use multab::table::{column_language, comparator, enumerate_table, letter_image, ColumnSpec, TableSpec};
use multab::words::{hash_erase, Symbol, Word};
use multab::Limits;
use proptest::prelude::*;

fn lim() -> Limits {
    Limits::default()
}

// Brute force over triples of combing words.
fn table_oracle(ts: &TableSpec, maxlen: usize) -> Vec<Word> {
    let r = ts.combing.enumerate(maxlen.saturating_sub(2), &lim()).unwrap();
    let mut out = Vec::new();
    for u in &r {
        for v in &r {
            for w in &r {
                if u.len() + v.len() + w.len() + 2 > maxlen {
                    continue;
                }
                let t = u.append(Symbol::HASH).concat(v).append(Symbol::HASH).concat(w);
                if ts.group.is_identity(&ts.group.evaluate(&t).unwrap()) {
                    out.push(t);
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn enumerated_tables_match_brute_force() {
    let groups = [GroupSpec::free(1), GroupSpec::free(2), GroupSpec::symmetric3(), GroupSpec::infinite_dihedral()];
    for g in groups {
        let ts = TableSpec::with_default_combing(g.clone(), &lim()).unwrap();
        let got = enumerate_table(&ts, 7, &lim()).unwrap();
        assert_eq!(got, table_oracle(&ts, 7), "{}", g.name());
        assert!(got.iter().all(|t| ts.is_table_word(t).unwrap()));
    }
}

#[test]
fn columns_and_comparators() {
    let f2 = GroupSpec::free(2);
    let ts = TableSpec::with_default_combing(f2.clone(), &lim()).unwrap();
    let a = f2.alphabet().parse("a").unwrap()[0];
    let g = letter_image(&f2, Some(a));
    let column = column_language(&ColumnSpec { table: ts.clone(), g: g.clone() }, 6, &lim()).unwrap();
    for w in &column {
        assert_eq!(w.hash_count(), 1);
    }
    // u#w in C(ā) iff (u, w⁻¹) in ρ_a, for reduced words
    let pairs = comparator(&ts, Some(a), 5, &lim()).unwrap();
    for (u, v) in &pairs {
        let uv = f2.mul(&f2.evaluate(u).unwrap(), &g);
        assert_eq!(uv, f2.evaluate(v).unwrap());
    }
    assert!(pairs.iter().any(|(u, v)| u.is_empty() && v.len() == 1));
}

fn random_cycle(g: &GroupSpec, letters: &[u16]) -> Option<Word> {
    let w: Word = letters.iter().map(|&c| Symbol::letter(c % g.alphabet().num_letters() as u16)).collect();
    // close the path with a geodesic back to the identity
    let back = g.normal_form(&g.inverse(&g.evaluate(&w).ok()?));
    let cycle = w.concat(&back);
    (cycle.len() >= 3).then_some(cycle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangulations_are_valid(letters in prop::collection::vec(0u16..4, 2..14), which in 0usize..4) {
        let g = [GroupSpec::free(2), GroupSpec::infinite_dihedral(), GroupSpec::z_squared(), GroupSpec::symmetric3()][which].clone();
        if let Some(cycle) = random_cycle(&g, &letters) {
            let points = g.path_points(&g.identity(), &cycle).unwrap();
            for policy in [TriangulationPolicy::Greedy, TriangulationPolicy::Paper] {
                let tri = triangulate_cycle(&g, &cycle, policy).unwrap();
                prop_assert!(tri.is_valid());
                prop_assert_eq!(tri.n, cycle.len());
                prop_assert_eq!(tri.diagonals.len(), cycle.len() - 3);
                for d in &tri.diagonals {
                    let bfs = g.distance(&points[d.i], &points[d.j], cycle.len(), &lim()).unwrap().finite();
                    prop_assert_eq!(bfs, Some(d.length));
                }
            }
        }
    }

    #[test]
    fn table_words_satisfy_the_definition(i in 0usize..64, j in 0usize..64, which in 0usize..3) {
        let g = [GroupSpec::free(2), GroupSpec::cyclic(3), GroupSpec::infinite_dihedral()][which].clone();
        let ts = TableSpec::with_default_combing(g.clone(), &lim()).unwrap();
        let r = ts.combing.enumerate(4, &lim()).unwrap();
        let (u, v) = (&r[i % r.len()], &r[j % r.len()]);
        let target = g.inverse(&g.mul(&g.evaluate(u).unwrap(), &g.evaluate(v).unwrap()));
        let w = r.iter().find(|w| g.evaluate(w).unwrap() == target);
        if let Some(w) = w {
            let t = u.append(Symbol::HASH).concat(v).append(Symbol::HASH).concat(w);
            prop_assert!(ts.is_table_word(&t).unwrap());
            prop_assert!(g.is_identity(&g.evaluate(&hash_erase(&t)).unwrap()));
        }
        let bad = u.append(Symbol::HASH).concat(v);
        prop_assert!(!ts.is_table_word(&bad).unwrap());
    }
}

#[test]
fn bk_bound_on_all_small_n() {
    for n in 1..=1u64 << 16 {
        assert!(bk_bound_holds(n), "n = {n}");
    }
    let b = bk_sequence(100);
    assert_eq!(b[0], 100.0);
    for (k, x) in b.iter().enumerate() {
        assert!(*x <= 1.0 + 100.0 / (1u64 << k) as f64 + 1e-9);
    }
}

// On Σ* over Z the pumping pairs of the synthesized grammar really cut the
// combing down; minimal representatives must survive.
#[test]
fn refinement_keeps_minimal_representatives() {
    let z = GroupSpec::free(1);
    let sigma = Fsa::sigma_star(z.alphabet().clone());
    let cnf = synthesize_irreducible_table_grammar(&z, 1, &lim()).unwrap().to_cnf().unwrap();
    let pairs: Vec<(Word, Word)> =
        pumping_pairs(&cnf, Some(4), &lim()).unwrap().into_iter().filter(|(x, _)| !x.contains_hash()).collect();
    assert!(!pairs.is_empty());
    let refined = refine_subcombing(&sigma, &pairs, &lim()).unwrap();
    let before = sigma.enumerate(6, &lim()).unwrap();
    let after = refined.enumerate(6, &lim()).unwrap();
    assert!(after.len() < before.len());
    assert!(is_surjective_at_radius(&z, &refined, 4, &lim()).unwrap());
    let ball = z.cayley_ball(4, &lim()).unwrap();
    let a = representative_lengths(&z, &sigma, 4, None, &lim()).unwrap();
    let b = representative_lengths(&z, &refined, 4, None, &lim()).unwrap();
    for (x, d) in ball.sorted_elements() {
        assert_eq!(a[&x], d);
        assert_eq!(b[&x], d);
    }
    // every surviving word avoids every pumped factor
    for w in &after {
        for (x, _) in &pairs {
            assert!(!w.symbols().windows(x.len()).any(|s| s == x.symbols()));
        }
    }
}

#[test]
fn refinement_rejects_growing_pairs() {
    let z = GroupSpec::free(1);
    let sigma = Fsa::sigma_star(z.alphabet().clone());
    let a = z.alphabet().parse("a").unwrap();
    assert!(refine_subcombing(&sigma, &[(a.clone(), a)], &lim()).is_err());
}

#[test]
fn thinness_certificates_bound_widths() {
    for g in [GroupSpec::free(1), GroupSpec::cyclic(3)] {
        let r = shortlex_combing(&g).unwrap().fsa;
        let cnf = table_grammar(&g, &r, 1, &lim()).unwrap().to_cnf().unwrap();
        let report = thinness_certificate(&g, &cnf, &r, 8, &lim()).unwrap();
        assert!(report.uncovered.is_empty(), "{}: {:?}", g.name(), report.uncovered);
        assert!(report.certified);
        assert!(report.records.iter().all(|rec| rec.bound >= rec.width));
    }
}

#[test]
fn finite_group_widths_stay_below_diameter() {
    for g in [GroupSpec::cyclic(3), GroupSpec::symmetric3()] {
        let r = geodesic_combing(&g).unwrap().fsa;
        let report = flabby_check(&g, &r, 9, 1.0 / 75.0, &lim()).unwrap();
        assert!(report.max_width <= 3, "{}", g.name());
        let total: usize = report.scatter.iter().map(|p| p.count).sum();
        assert_eq!(total, report.triangles);
    }
}

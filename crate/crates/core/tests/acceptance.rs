//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use multab::automata::Fsa;
use multab::grammars::{enumerate_cfg, pumping_pairs, Cfg};
use multab::groups::{geodesic_combing, is_surjective_at_radius, representative_lengths, GroupSpec};
use multab::hyperbolicity::{
    bk_bound_holds, flabby_check, synthesize_irreducible_table_grammar, synthesize_table_grammar, table_grammar,
    triangle_from_table_word, triangle_width, triangulate_cycle, TriangulationPolicy,
};
use multab::table::{
    column_cfg_from_comparator, enumerate_table, finite_table_fsa, free_comparator_transducer,
    free_product_comparator_transducer, sigma_star_roundtrip, theorem_bi_pipeline, TableSpec,
};
use multab::transducers::Transducer;
use multab::words::{formal_inverse, hash_erase, words_up_to, Symbol, Word};
use multab::Limits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn lim() -> Limits {
    Limits::default()
}

fn err(e: multab::Error) -> String {
    e.to_string()
}

fn within(elapsed: Duration, budget: Duration, detail: String) -> Outcome {
    if elapsed <= budget {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {:.2}s, budget {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()))
    }
}

fn finite_table_regularity() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for g in [GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::symmetric3()] {
        let al = g.alphabet().clone();
        let m = finite_table_fsa(&g, &Fsa::sigma_star(al.clone()), &lim()).map_err(err)?.to_dfa(&lim()).map_err(err)?;
        let symbols: Vec<Symbol> = al.symbols_with_hash().collect();
        for w in words_up_to(&symbols, 8) {
            let want = w.hash_count() == 2 && g.is_identity(&g.evaluate(&hash_erase(&w)).map_err(err)?);
            if m.accepts(&w) != want {
                return Err(format!("{}: mismatch on {}", g.name(), al.display(&w)));
            }
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(10), format!("{checked} words, 0 mismatches"))
}

fn forward_at_desk_scale() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    for (g, maxlen) in [(GroupSpec::free(2), 10), (GroupSpec::free(1), 12)] {
        let ts = TableSpec::with_default_combing(g.clone(), &lim()).map_err(err)?;
        let m = table_grammar(&g, &ts.combing, 1, &lim()).map_err(err)?;
        let got = enumerate_cfg(&m, maxlen, &lim()).map_err(err)?;
        let want = enumerate_table(&ts, maxlen, &lim()).map_err(err)?;
        if got != want {
            let a: BTreeSet<_> = got.iter().collect();
            let b: BTreeSet<_> = want.iter().collect();
            let extra = a.difference(&b).next().map(|w| g.alphabet().display(w));
            let missing = b.difference(&a).next().map(|w| g.alphabet().display(w));
            return Err(format!("{}: {} vs {} words, extra {extra:?}, missing {missing:?}", g.name(), got.len(), want.len()));
        }
        detail.push(format!("{} ≤{}: {} words", g.name(), maxlen, want.len()));
    }
    within(start.elapsed(), Duration::from_secs(300), detail.join(", "))
}

fn grammar_soundness() -> Outcome {
    let mut total = 0;
    let groups = [GroupSpec::free(1), GroupSpec::free(2), GroupSpec::cyclic(2), GroupSpec::cyclic(3)];
    for g in &groups {
        let grammars: Vec<Cfg> = vec![
            synthesize_table_grammar(g, 1, &lim()).map_err(err)?,
            synthesize_irreducible_table_grammar(g, 1, &lim()).map_err(err)?,
        ];
        for cfg in grammars {
            for w in enumerate_cfg(&cfg, 8, &lim()).map_err(err)? {
                if !g.is_identity(&g.evaluate(&w).map_err(err)?) {
                    return Err(format!("{}: {} does not evaluate to 1", g.name(), g.alphabet().display(&w)));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} words over {} groups, 0 exceptions", groups.len()))
}

// Cayley distance in Z² is the L1 metric on lattice points.
fn l1_width(sides: &[&str; 3]) -> usize {
    let mut paths: Vec<Vec<(i64, i64)>> = Vec::new();
    let mut at = (0i64, 0i64);
    for side in sides {
        let mut pts = vec![at];
        for c in side.chars() {
            match c {
                'a' => at.0 += 1,
                'A' => at.0 -= 1,
                'b' => at.1 += 1,
                'B' => at.1 -= 1,
                _ => unreachable!(),
            }
            pts.push(at);
        }
        paths.push(pts);
    }
    let d = |p: (i64, i64), q: (i64, i64)| ((p.0 - q.0).abs() + (p.1 - q.1).abs()) as usize;
    let mut width = 0;
    for i in 0..3 {
        for &p in &paths[i] {
            let near = paths[(i + 1) % 3].iter().chain(&paths[(i + 2) % 3]).map(|&q| d(p, q)).min().unwrap();
            width = width.max(near);
        }
    }
    width
}

fn tree_thinness() -> Outcome {
    let f2 = GroupSpec::free(2);
    let r = geodesic_combing(&f2).map_err(err)?.fsa;
    let report = flabby_check(&f2, &r, 12, 0.0, &lim()).map_err(err)?;
    if report.max_width != 0 {
        return Err(format!("F2 triangle of width {}", report.max_width));
    }
    let z2 = GroupSpec::z_squared();
    let al = z2.alphabet().clone();
    for n in 1..=4 {
        let sides = ["a".repeat(n), "b".repeat(n), "A".repeat(n) + &"B".repeat(n)];
        let t = al.parse(&sides.join("#")).map_err(err)?;
        let tri = triangle_from_table_word(&z2, &t).map_err(err)?;
        let width = triangle_width(&z2, &tri, &lim()).map_err(err)?.width;
        let oracle = l1_width(&[&sides[0], &sides[1], &sides[2]]);
        if width != n || oracle != n {
            return Err(format!("Z² n={n}: width {width}, L1 oracle {oracle}"));
        }
    }
    Ok(format!("{} F2 triangles of width 0; Z² widths 1,2,3,4", report.triangles))
}

fn flabby_consistency() -> Outcome {
    let slope = 1.0 / 75.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for g in [GroupSpec::free(2), GroupSpec::cyclic(3), GroupSpec::z_squared()] {
        let r = geodesic_combing(&g).map_err(err)?.fsa;
        let mut c = Vec::new();
        for maxlen in 8..=12 {
            c.push(flabby_check(&g, &r, maxlen, slope, &lim()).map_err(err)?.c_emp);
        }
        let hyperbolic = g.name() != GroupSpec::z_squared().name();
        let good = c.iter().all(|x| x.is_finite())
            && if hyperbolic {
                c.windows(2).all(|w| w[1] <= w[0])
            } else {
                // widths are integers, so growth comes in steps
                c.windows(2).all(|w| w[1] >= w[0]) && c[c.len() - 1] > c[0]
            };
        ok &= good;
        let shown: Vec<String> = c.iter().map(|x| format!("{x:.3}")).collect();
        lines.push(format!("{} [{}]", g.name(), shown.join(" ")));
    }
    let detail = format!("C_emp at maxlen 8..12: {}", lines.join("; "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Random walk on the reduced word that must return to the identity.
fn random_cycle(rng: &mut ChaCha8Rng, letters: &[Symbol], n: usize) -> Word {
    let mut out = Vec::with_capacity(n);
    let mut stack: Vec<Symbol> = Vec::new();
    for step in 0..n {
        let remaining = n - step;
        let pop = !stack.is_empty() && (stack.len() == remaining || rng.gen_bool(0.5));
        let s = if pop { stack.last().unwrap().inverse().unwrap() } else { letters[rng.gen_range(0..letters.len())] };
        if stack.last().and_then(|t| t.inverse()) == Some(s) {
            stack.pop();
        } else {
            stack.push(s);
        }
        out.push(s);
    }
    Word::from(out)
}

fn triangulation() -> Outcome {
    let f2 = GroupSpec::free(2);
    let letters: Vec<Symbol> = f2.alphabet().letters().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut k_emp: f64 = 0.0;
    for _ in 0..200 {
        let n = 2 * rng.gen_range(2..=12);
        let cycle = random_cycle(&mut rng, &letters, n);
        let show = f2.alphabet().display(&cycle);
        if !f2.is_identity(&f2.evaluate(&cycle).map_err(err)?) {
            return Err(format!("generator produced a non-cycle {show}"));
        }
        let points = f2.path_points(&f2.identity(), &cycle).map_err(err)?;
        for policy in [TriangulationPolicy::Greedy, TriangulationPolicy::Paper] {
            let tri = triangulate_cycle(&f2, &cycle, policy).map_err(err)?;
            if !tri.is_valid() {
                return Err(format!("{policy:?}: invalid triangulation of {show}"));
            }
            for d in &tri.diagonals {
                let bfs = f2.distance(&points[d.i], &points[d.j % n], 2 * n, &lim()).map_err(err)?.finite();
                if bfs != Some(d.length) {
                    return Err(format!("{policy:?}: diagonal ({}, {}) of {show} has length {}, BFS {bfs:?}", d.i, d.j, d.length));
                }
            }
            if n == 4 && tri.diagonals[0].length > 2 {
                return Err(format!("{policy:?}: first diagonal of {show} longer than 2"));
            }
            k_emp = k_emp.max(tri.excess());
        }
    }
    let detail = format!("200 cycles, both policies valid, K_emp = {k_emp:.2}");
    if k_emp <= 3.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bk_bound() -> Outcome {
    let start = Instant::now();
    let n_max = 1u64 << 16;
    if let Some(n) = (1..=n_max).find(|&n| !bk_bound_holds(n)) {
        return Err(format!("fails at n = {n}"));
    }
    within(start.elapsed(), Duration::from_secs(1), format!("n ≤ {n_max}, all k"))
}

fn random_transducer(rng: &mut ChaCha8Rng, letters: &[Symbol]) -> Transducer {
    let al = multab::groups::GroupSpec::free(2).alphabet().clone();
    let states = rng.gen_range(1..=4);
    let mut t = Transducer::new(al, states);
    t.set_initial(0);
    for q in 0..states {
        t.set_terminal(q, rng.gen_bool(0.4));
    }
    t.set_terminal(rng.gen_range(0..states), true);
    let label = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(0..=2);
        Word::from((0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect::<Vec<_>>())
    };
    for _ in 0..rng.gen_range(1..=2 * states + 2) {
        let (from, to) = (rng.gen_range(0..states), rng.gen_range(0..states));
        let (x, y) = (label(rng), label(rng));
        t.add_edge(from, x, y, to);
    }
    t
}

fn transducer_round_trips() -> Outcome {
    let letters: Vec<Symbol> = GroupSpec::free(2).alphabet().letters().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs_checked = 0;
    for i in 0..50 {
        let t = random_transducer(&mut rng, &letters);
        let base: BTreeSet<(Word, Word)> = t.bounded_pairs(4, 4, &lim()).map_err(err)?.into_iter().collect();
        let want: BTreeSet<(Word, Word)> = base
            .iter()
            .map(|(u, v)| Ok((formal_inverse(u)?, formal_inverse(v)?)))
            .collect::<multab::Result<_>>()
            .map_err(err)?;
        let inv: BTreeSet<(Word, Word)> =
            t.invert_both().map_err(err)?.bounded_pairs(4, 4, &lim()).map_err(err)?.into_iter().collect();
        if inv != want {
            return Err(format!("transducer {i}: inverted relation differs"));
        }
        let back = Transducer::from_linear_grammar(&t.to_linear_grammar().map_err(err)?).map_err(err)?;
        let round: BTreeSet<(Word, Word)> = back.bounded_pairs(4, 4, &lim()).map_err(err)?.into_iter().collect();
        if round != base {
            return Err(format!("transducer {i}: linear grammar round trip differs"));
        }
        pairs_checked += base.len();
    }
    Ok(format!("50 transducers, {pairs_checked} related pairs, 0 mismatches"))
}

fn pipeline() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    for g in [GroupSpec::free(2), GroupSpec::infinite_dihedral()] {
        let ts = TableSpec::with_default_combing(g.clone(), &lim()).map_err(err)?;
        let letters: Vec<Option<Symbol>> = std::iter::once(None).chain(g.alphabet().letters().map(Some)).collect();
        let mut grammars = BTreeMap::new();
        for a in letters {
            let rho = if g.name() == GroupSpec::free(2).name() {
                free_comparator_transducer(2, a)
            } else {
                free_product_comparator_transducer(&g, a).map_err(err)?
            };
            grammars.insert(a, column_cfg_from_comparator(&rho, &ts.combing, &lim()).map_err(err)?);
        }
        let report = theorem_bi_pipeline(&ts, &grammars, 5, 0, &lim()).map_err(err)?;
        if !report.passed() {
            return Err(format!("{}: {} counterexamples, first {}", g.name(), report.counterexamples.len(), report.counterexamples[0]));
        }
        detail.push(format!("{}: {} inputs", g.name(), report.inputs_checked));
    }
    within(start.elapsed(), Duration::from_secs(120), format!("{}, 0 counterexamples", detail.join(", ")))
}

fn sigma_star() -> Outcome {
    let start = Instant::now();
    for g in [GroupSpec::cyclic(2), GroupSpec::cyclic(3)] {
        let rep = sigma_star_roundtrip(&g, &lim()).map_err(err)?;
        if !(rep.table_from_word_problem && rep.word_problem_from_table) {
            return Err(format!("{}: {rep:?}", g.name()));
        }
    }
    within(start.elapsed(), Duration::from_secs(5), "Z/2, Z/3 minimized machines equal".into())
}

fn refinement() -> Outcome {
    let f2 = GroupSpec::free(2);
    let r = geodesic_combing(&f2).map_err(err)?.fsa;
    let cnf = synthesize_irreducible_table_grammar(&f2, 1, &lim()).map_err(err)?.to_cnf().map_err(err)?;
    let pairs = pumping_pairs(&cnf, Some(8), &lim()).map_err(err)?;
    let refined = multab::hyperbolicity::refine_subcombing(&r, &pairs, &lim()).map_err(err)?;
    if !is_surjective_at_radius(&f2, &refined, 3, &lim()).map_err(err)? {
        return Err("refined combing misses part of the radius-3 ball".into());
    }
    let ball = f2.cayley_ball(3, &lim()).map_err(err)?;
    let before = representative_lengths(&f2, &r, 3, None, &lim()).map_err(err)?;
    let after = representative_lengths(&f2, &refined, 3, None, &lim()).map_err(err)?;
    for (x, _) in ball.sorted_elements() {
        if before.get(&x) != after.get(&x) {
            return Err(format!("{x:?}: {:?} before, {:?} after", before.get(&x), after.get(&x)));
        }
    }
    Ok(format!("{} pumping pairs, {} ball elements unchanged", pairs.len(), ball.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("finite-table regularity", finite_table_regularity),
        ("table grammar equals enumerated table", forward_at_desk_scale),
        ("synthesized grammar soundness", grammar_soundness),
        ("tree thinness and Z² witness", tree_thinness),
        ("flabby bound consistency", flabby_consistency),
        ("cycle triangulation", triangulation),
        ("b_k bound", bk_bound),
        ("transducer round trips", transducer_round_trips),
        ("comparators from column grammars", pipeline),
        ("Σ* combing round trip", sigma_star),
        ("subcombing refinement", refinement),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

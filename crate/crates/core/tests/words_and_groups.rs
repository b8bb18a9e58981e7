use multab::groups::{Distance, GroupSpec};
use multab::words::{formal_inverse, free_reduce, hash_erase, is_freely_reduced, split_on_hash, Alphabet, Symbol, Word};
use multab::Limits;
use proptest::prelude::*;

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..(2 * rank) as u16, 0..=max).prop_map(|v| v.into_iter().map(Symbol::letter).collect())
}

fn hash_word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    let n = (2 * rank) as u16;
    prop::collection::vec(0..=n, 0..=max)
        .prop_map(move |v| v.into_iter().map(|c| if c == n { Symbol::HASH } else { Symbol::letter(c) }).collect())
}

// Cancels pairs at positions chosen by `picks` until none remain.
fn reduce_by_strategy(w: &Word, picks: &[usize]) -> Word {
    let mut s: Vec<Symbol> = w.symbols().to_vec();
    let mut k = 0;
    loop {
        let spots: Vec<usize> = (0..s.len().saturating_sub(1)).filter(|&i| s[i].inverse() == Some(s[i + 1])).collect();
        if spots.is_empty() {
            return Word::from(s);
        }
        let i = spots[picks.get(k).copied().unwrap_or(0) % spots.len()];
        s.drain(i..i + 2);
        k += 1;
    }
}

proptest! {
    #[test]
    fn formal_inverse_is_involutive(w in word(3, 12)) {
        prop_assert_eq!(formal_inverse(&formal_inverse(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn free_reduce_is_confluent(w in word(2, 12), picks in prop::collection::vec(any::<usize>(), 12)) {
        let r = free_reduce(&w).unwrap();
        prop_assert!(is_freely_reduced(r.symbols()));
        prop_assert_eq!(free_reduce(&r).unwrap(), r.clone());
        prop_assert_eq!(reduce_by_strategy(&w, &picks), r);
    }

    #[test]
    fn split_then_concat_erases_markers(w in hash_word(2, 12)) {
        let parts = split_on_hash(&w);
        prop_assert_eq!(parts.len(), w.hash_count() + 1);
        let joined = parts.iter().fold(Word::empty(), |acc, p| acc.concat(p));
        prop_assert_eq!(joined, hash_erase(&w));
    }

    #[test]
    fn free_evaluation_is_reduction(w in word(2, 12)) {
        let f2 = GroupSpec::free(2);
        let x = f2.evaluate(&w).unwrap();
        prop_assert_eq!(f2.normal_form(&x), free_reduce(&w).unwrap());
    }

    #[test]
    fn evaluation_is_a_homomorphism(u in word(1, 8), v in word(1, 8), which in 0usize..4) {
        let g = [GroupSpec::free(1), GroupSpec::infinite_dihedral(), GroupSpec::z_squared(), GroupSpec::cyclic(3)][which].clone();
        let al = g.alphabet().clone();
        let map = |w: &Word| -> Word { w.iter().map(|s| Symbol::letter(s.code() % al.num_letters() as u16)).collect() };
        let (u, v) = (map(&u), map(&v));
        let uv = g.evaluate(&u.concat(&v)).unwrap();
        prop_assert_eq!(uv, g.mul(&g.evaluate(&u).unwrap(), &g.evaluate(&v).unwrap()));
        let ui = g.evaluate(&formal_inverse(&u).unwrap()).unwrap();
        prop_assert_eq!(ui, g.inverse(&g.evaluate(&u).unwrap()));
    }
}

// word_norm is closed-form per backend; the oracle is breadth-first search.
#[test]
fn word_norm_matches_cayley_distance() {
    let lim = Limits::default();
    let groups = [
        GroupSpec::free(2),
        GroupSpec::cyclic(4),
        GroupSpec::symmetric3(),
        GroupSpec::infinite_dihedral(),
        GroupSpec::z_squared(),
    ];
    for g in groups {
        let ball = g.cayley_ball(5, &lim).unwrap();
        for (x, d) in ball.sorted_elements() {
            assert_eq!(g.word_norm(&x), d, "{}: {:?}", g.name(), x);
            assert_eq!(g.distance(&g.identity(), &x, 5, &lim).unwrap(), Distance::Finite(d));
            assert_eq!(g.normal_form(&x).len(), d);
        }
    }
}

#[test]
fn alphabet_rejects_clashes() {
    assert!(Alphabet::from_pairs(&[('a', 'A'), ('a', 'B')]).is_err());
    assert!(Alphabet::from_pairs(&[('a', 'a')]).is_err());
    assert!(Alphabet::from_pairs(&[('#', 'x')]).is_err());
}

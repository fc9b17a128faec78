mod common;

use common::{brute_members, evaluate, rank, w};
use engulf_core::finite_index::{coset_enumerate, Presentation};
use engulf_core::stallings::CoreGraph;
use engulf_core::word::{reduced_words_up_to, Letter, Word};
use proptest::prelude::*;

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..4usize, 1..=max_len)
        .prop_map(|s| Word::from_letters(&s.into_iter().map(Letter::from_slot).collect::<Vec<_>>()))
}

fn gens() -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word(5), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generators_and_products_are_members(g in gens(), i in 0usize..3, j in 0usize..3) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        for x in &g {
            prop_assert!(h.contains(x));
        }
        let (x, y) = (&g[i % g.len()], &g[j % g.len()]);
        prop_assert!(h.contains(&x.mul(&y.inverse())));
    }

    #[test]
    fn invariant_under_nielsen_moves(g in gens()) {
        let a = rank(2);
        let h = CoreGraph::fold(a, &g).unwrap();
        let mut rev = g.clone();
        rev.reverse();
        prop_assert_eq!(CoreGraph::fold(a, &rev).unwrap(), h.clone());
        let mut moved = g.clone();
        moved[0] = moved[0].inverse();
        if moved.len() > 1 {
            moved[0] = moved[0].mul(&moved[1]);
        }
        prop_assert_eq!(CoreGraph::fold(a, &moved).unwrap(), h);
    }

    #[test]
    fn basis_rewriting(g in gens(), x in word(8)) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        let basis = h.basis();
        prop_assert_eq!(basis.len(), h.subgroup_rank());
        prop_assert_eq!(CoreGraph::fold(rank(2), &basis).unwrap(), h.clone());
        match h.rewrite_in_basis(&x).unwrap() {
            Some(r) => prop_assert_eq!(evaluate(&r, &basis), x.clone()),
            None => prop_assert!(!h.contains(&x)),
        }
    }

    #[test]
    fn rank_formula(g in gens()) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        let e = h.edges().len();
        prop_assert_eq!(h.subgroup_rank() + h.vertex_count(), e + 1);
    }

    #[test]
    fn intersection_membership(g in gens(), k in gens(), x in word(8)) {
        let a = rank(2);
        let h = CoreGraph::fold(a, &g).unwrap();
        let kk = CoreGraph::fold(a, &k).unwrap();
        let both = h.intersect(&kk).unwrap();
        prop_assert_eq!(both.contains(&x), h.contains(&x) && kk.contains(&x));
        prop_assert!(both.is_subgroup_of(&h) && both.is_subgroup_of(&kk));
    }

    #[test]
    fn conjugation_membership(g in gens(), c in word(4), x in word(6)) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        let hc = h.conjugate(&c).unwrap();
        prop_assert_eq!(hc.contains(&x.conjugate_by(&c)), h.contains(&x));
    }

    #[test]
    fn finite_index_agrees_with_enumeration(g in gens()) {
        let a = rank(2);
        let h = CoreGraph::fold(a, &g).unwrap();
        let free = Presentation::free(a);
        match h.index() {
            Some(n) => {
                prop_assert_eq!(coset_enumerate(&free, &g, 64).unwrap().size(), n);
                prop_assert!(!h.is_proper_limit_set());
            }
            None => {
                prop_assert!(h.is_proper_limit_set());
                prop_assert!(!h.is_complete());
            }
        }
    }

    #[test]
    fn json_round_trip(g in gens()) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        prop_assert_eq!(CoreGraph::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn limit_set_contains_fixed_points(g in gens()) {
        let h = CoreGraph::fold(rank(2), &g).unwrap();
        for x in &g {
            if let Ok((p, m)) = engulf_core::boundary::fixed_points(x) {
                prop_assert!(h.limit_set_contains(&p) && h.limit_set_contains(&m));
            }
        }
    }
}

#[test]
fn membership_matches_brute_force() {
    let a = rank(2);
    for g in [vec![w("aa"), w("b")], vec![w("ab"), w("ba")], vec![w("aab")], vec![w("abAB"), w("bb")]] {
        let h = CoreGraph::fold(a, &g).unwrap();
        let brute = brute_members(&g, 6, 12);
        for x in reduced_words_up_to(a, 6) {
            assert_eq!(h.contains(&x), brute.contains(&x), "{x} in {g:?}");
        }
    }
}

#[test]
fn documented_examples() {
    let a = rank(2);
    let h = CoreGraph::fold(a, &[w("aa"), w("b"), w("abA")]).unwrap();
    assert_eq!(h.index(), Some(2));
    assert!(!h.is_proper_limit_set());
    let cyclic = CoreGraph::fold(a, &[w("a")]).unwrap();
    assert_eq!(cyclic.index(), None);
    assert!(cyclic.is_proper_limit_set());
    assert!(!cyclic.stem_meets_limit_set(&w("b")));
    assert!(cyclic.stem_meets_limit_set(&w("aaa")));
    assert!(CoreGraph::fold(a, &[]).unwrap().is_trivial());
    assert!(CoreGraph::fold(a, &[w("c")]).is_err());
    assert_eq!(CoreGraph::trivial(a).index(), None);
}

mod common;

use common::{rank, subgroup_count_by_actions, w};
use engulf_core::finite_index::{
    coset_enumerate, engulf, hall_witness, low_index, power_lemma_check, profinite_closure,
    relative_index, residual_core, CosetTable, Presentation,
};
use engulf_core::stallings::CoreGraph;
use engulf_core::word::{reduced_words_up_to, Word};

fn z2() -> Presentation {
    Presentation::parse("gens: a b\nrel: abAB").unwrap()
}

#[test]
fn presentation_file_format() {
    let p = Presentation::parse("# the symmetric group\ngens: a b\nrel: aa, bbb\nrel: abab\n").unwrap();
    assert_eq!(p.rank(), 2);
    assert_eq!(p.relators().len(), 3);
    assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
    // Relators are stored cyclically reduced.
    let q = Presentation::parse("gens: a b\nrel: bAAB").unwrap();
    assert_eq!(q.relators(), &[w("AA")]);
    assert!(Presentation::parse("rel: ab").is_err());
    assert!(Presentation::parse("gens: a b\nrel: ac").is_err());
}

#[test]
fn todd_coxeter_examples() {
    assert_eq!(coset_enumerate(&z2(), &[w("a"), w("bb")], 100).unwrap().size(), 2);
    let free = Presentation::free(rank(2));
    assert_eq!(coset_enumerate(&free, &[w("a"), w("b")], 10).unwrap().size(), 1);
    assert!(coset_enumerate(&z2(), &[w("a")], 50).unwrap_err().is_bounded_search());
    let s3 = Presentation::parse("gens: a b\nrel: aa\nrel: bbb\nrel: abab").unwrap();
    assert_eq!(coset_enumerate(&s3, &[], 100).unwrap().size(), 6);
    assert_eq!(coset_enumerate(&s3, &[w("a")], 100).unwrap().size(), 3);
    let a5 = Presentation::parse("gens: a b\nrel: aa, bbb, ababababab").unwrap();
    assert_eq!(coset_enumerate(&a5, &[], 200).unwrap().size(), 60);
}

#[test]
fn tables_are_valid_and_round_trip() {
    let s3 = Presentation::parse("gens: a b\nrel: aa, bbb, abab").unwrap();
    let t = coset_enumerate(&s3, &[], 100).unwrap();
    t.validate().unwrap();
    assert_eq!(t.standardize(), t);
    assert_eq!(CosetTable::from_json(&t.to_json()).unwrap(), t);
    assert!(t.is_normal());
    assert_eq!(t.image_order(1000).unwrap(), 6);
    assert_eq!(t.element_order(&w("ab")), 2);
    assert_eq!(t.element_order(&w("b")), 3);
    let bad = r#"{"rank":1,"relators":[],"size":2,"action":[[0,"a",0],[1,"a",0]]}"#;
    assert!(CosetTable::from_json(bad).is_err());
}

#[test]
fn low_index_matches_permutation_count() {
    let free = Presentation::free(rank(2));
    let tables = low_index(&free, 3).unwrap();
    for n in 1..=3 {
        let found = tables.iter().filter(|t| t.size() == n).count();
        assert_eq!(found, subgroup_count_by_actions(n), "index {n}");
    }
    for t in &tables {
        t.validate().unwrap();
        assert_eq!(t.to_core_graph().index(), Some(t.size()));
    }
    assert!(tables.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn low_index_of_quotients() {
    let s3 = Presentation::parse("gens: a b\nrel: aa, bbb, abab").unwrap();
    let sizes: Vec<usize> = low_index(&s3, 6).unwrap().iter().map(|t| t.size()).collect();
    // Subgroups of S3: itself, A3, three of order 2, trivial.
    assert_eq!(sizes, vec![1, 2, 3, 3, 3, 6]);
}

#[test]
fn engulf_is_minimal() {
    let free = Presentation::free(rank(2));
    let r = engulf(&free, &[w("aa"), w("bb")], 2).unwrap();
    let t = r.witness.unwrap();
    assert_eq!(t.size(), 2);
    assert!(t.stabilizes(&w("aa")) && t.stabilizes(&w("bb")));
    assert!(engulf(&free, &[w("a"), w("b")], 6).unwrap().witness.is_none());
    let gens = [w("ab"), w("bbb")];
    let found = engulf(&free, &gens, 4).unwrap().witness.unwrap();
    let smallest = low_index(&free, 4)
        .unwrap()
        .into_iter()
        .filter(|t| t.size() >= 2 && gens.iter().all(|g| t.stabilizes(g)))
        .map(|t| t.size())
        .min();
    assert_eq!(Some(found.size()), smallest);
    assert!(engulf(&free, &[], 1).is_err());
}

#[test]
fn hall_witnesses_separate() {
    let a = rank(2);
    for (gens, excluded) in [
        (vec![w("a")], w("b")),
        (vec![w("aa"), w("b")], w("a")),
        (vec![w("ab"), w("bA")], w("a")),
        (vec![w("abAB")], w("ab")),
    ] {
        let h = CoreGraph::fold(a, &gens).unwrap();
        let t = hall_witness(&h, &excluded).unwrap();
        t.validate().unwrap();
        assert!(gens.iter().all(|g| t.stabilizes(g)));
        assert!(!t.stabilizes(&excluded));
    }
    let h = CoreGraph::fold(a, &[w("aa"), w("b")]).unwrap();
    assert_eq!(hall_witness(&h, &w("a")).unwrap().size(), 2);
    let cyclic = CoreGraph::fold(a, &[w("a")]).unwrap();
    assert!(hall_witness(&cyclic, &w("a")).is_err());
}

#[test]
fn closure_examples() {
    let a = rank(2);
    let free = Presentation::free(a);
    let closed = profinite_closure(&free, &[w("aa"), w("b"), w("abA")], 2).unwrap();
    let h = CoreGraph::fold(a, &[w("aa"), w("b"), w("abA")]).unwrap();
    assert_eq!(closed.graph(), Some(&h));
    let c = profinite_closure(&free, &[w("a")], 2).unwrap();
    assert!(c.contains(&w("a")) && !c.contains(&w("b")));
    // Decreasing in the index bound.
    let c3 = profinite_closure(&free, &[w("a")], 3).unwrap();
    assert!(profinite_closure(&free, &[w("a")], 4).unwrap_err().is_bounded_search());
    for x in reduced_words_up_to(a, 5) {
        if c3.contains(&x) {
            assert!(c.contains(&x), "{x}");
        }
    }
    let z = Presentation::free(rank(1));
    let c = profinite_closure(&z, &[], 3).unwrap();
    assert!(c.contains(&w("aaaaaa")) && !c.contains(&w("aaa")) && !c.contains(&w("aa")));
}

#[test]
fn residual_core_examples() {
    let z = Presentation::free(rank(1));
    let core = residual_core(&z, 3).unwrap();
    assert!(core.contains(&w("aaaaaa")) && !core.contains(&w("aaaa")));
    let z5 = Presentation::parse("gens: a\nrel: aaaaa").unwrap();
    let core = residual_core(&z5, 5).unwrap();
    assert!(!core.contains(&w("a")));
    let any = residual_core(&z2(), 1).unwrap();
    assert!(any.contains(&w("ab")));
    // Shrinks as the bound grows.
    let free = Presentation::free(rank(2));
    let c2 = residual_core(&free, 2).unwrap();
    let c3 = residual_core(&free, 3).unwrap();
    let shrinks = reduced_words_up_to(rank(2), 4)
        .into_iter()
        .any(|x: Word| c2.contains(&x) && !c3.contains(&x));
    assert!(shrinks);
}

#[test]
fn power_lemma_examples() {
    let a = rank(2);
    let h = CoreGraph::fold(a, &[w("a"), w("b")]).unwrap();
    let even = CoreGraph::fold(a, &[w("aa"), w("ab"), w("aB")]).unwrap();
    let r = power_lemma_check(&h, &even, 6).unwrap();
    assert!(r.passed() && r.t == 2);
    let h = CoreGraph::fold(a, &[w("a")]).unwrap();
    let a3 = CoreGraph::fold(a, &[w("aaa")]).unwrap();
    let r = power_lemma_check(&h, &a3, 9).unwrap();
    assert!(r.passed() && r.t == 3 && r.checked == 19);
    let whole = CoreGraph::fold(a, &[w("a"), w("b")]).unwrap();
    let a2 = CoreGraph::fold(a, &[w("aa")]).unwrap();
    assert!(relative_index(&whole, &a2).is_err());
    assert!(power_lemma_check(&a2, &whole, 3).is_err());
}

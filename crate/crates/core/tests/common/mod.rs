#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use engulf_core::word::{reduced_words_up_to, Alphabet, Word};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn w(s: &str) -> Word {
    Word::parse_any(s).unwrap()
}

pub fn rank(n: usize) -> Alphabet {
    Alphabet::new(n).unwrap()
}

/// Elements of `<gens>` reachable by right multiplication by generators
/// through words of length at most `cap`, restricted to length `max_len`.
pub fn brute_members(gens: &[Word], max_len: usize, cap: usize) -> BTreeSet<Word> {
    let steps: Vec<Word> = gens
        .iter()
        .filter(|g| !g.is_identity())
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let mut seen: HashSet<Word> = HashSet::from([Word::identity()]);
    let mut queue = VecDeque::from([Word::identity()]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = x.mul(s);
            if y.len() <= cap && seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().filter(|x| x.len() <= max_len).collect()
}

/// Deduplicated generating sets of at most `max_gens` words of length
/// `1..=max_len`, drawn deterministically.
pub fn sample_generating_sets(
    alphabet: Alphabet,
    count: usize,
    max_gens: usize,
    max_len: usize,
    seed: u64,
) -> Vec<Vec<Word>> {
    let pool: Vec<Word> = reduced_words_up_to(alphabet, max_len)
        .into_iter()
        .filter(|x| !x.is_identity())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let k = rand::Rng::gen_range(&mut rng, 1..=max_gens);
        let mut set: Vec<Word> = pool.choose_multiple(&mut rng, k).cloned().collect();
        set.sort();
        if seen.insert(set.clone()) {
            out.push(set);
        }
    }
    out
}

/// Substitutes `elements[i]` for generator `i + 1` of an abstract word.
pub fn evaluate(abstract_word: &Word, elements: &[Word]) -> Word {
    abstract_word.letters().iter().fold(Word::identity(), |acc, l| {
        let e = &elements[l.generator_index() - 1];
        acc.mul(&if l.is_inverse() { e.inverse() } else { e.clone() })
    })
}

/// Whether every non-trivial reduced word of length at most `len` in the
/// elements evaluates to a non-trivial element.
pub fn freely_independent(elements: &[Word], len: usize) -> bool {
    let abstract_alphabet = Alphabet::new(elements.len()).unwrap();
    reduced_words_up_to(abstract_alphabet, len)
        .iter()
        .filter(|x| !x.is_identity())
        .all(|x| !evaluate(x, elements).is_identity())
}

/// Number of subgroups of index `n` in the free group of rank 2, counted
/// from transitive actions on `{0..n}`: each subgroup appears `(n-1)!` times.
pub fn subgroup_count_by_actions(n: usize) -> usize {
    let perms = permutations(n);
    let mut transitive = 0;
    for s in &perms {
        for t in &perms {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(c) = stack.pop() {
                for p in [s, t] {
                    let d = p[c];
                    let e = p.iter().position(|&x| x == c).unwrap();
                    for x in [d, e] {
                        if !seen[x] {
                            seen[x] = true;
                            stack.push(x);
                        }
                    }
                }
            }
            if seen.iter().all(|&b| b) {
                transitive += 1;
            }
        }
    }
    transitive / (1..n).product::<usize>().max(1)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

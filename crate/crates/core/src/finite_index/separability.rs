//! Engulfing, Hall witnesses, profinite closures and the power check.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::low_index::low_index;
use super::table::{lcm, CosetTable, Presentation};
use super::todd_coxeter::coset_enumerate;
use crate::error::{Error, Result};
use crate::stallings::CoreGraph;
use crate::word::{Alphabet, Letter, Word};

/// Outcome of an engulfing search: the least proper subgroup of index at
/// most `searched_to` containing the given elements, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngulfResult {
    pub witness: Option<CosetTable>,
    pub searched_to: usize,
}

pub fn engulf(p: &Presentation, subgens: &[Word], max_index: usize) -> Result<EngulfResult> {
    if max_index < 2 {
        return Err(Error::invalid("engulfing needs max_index >= 2"));
    }
    for w in subgens {
        p.alphabet().check(w)?;
    }
    let witness = low_index(p, max_index)?
        .into_iter()
        .find(|t| t.size() >= 2 && subgens.iter().all(|w| t.stabilizes(w)));
    Ok(EngulfResult {
        witness,
        searched_to: max_index,
    })
}

/// A finite-index subgroup containing `h` but not `excluded`: the folded
/// graph of `h` with the path of `excluded` attached, completed to a cover
/// by pairing the free ends of each letter in order.
pub fn hall_witness(h: &CoreGraph, excluded: &Word) -> Result<CosetTable> {
    let alphabet = h.alphabet();
    alphabet.check(excluded)?;
    if h.contains(excluded) {
        return Err(Error::precondition(format!(
            "{excluded} is a member of the subgroup"
        )));
    }
    let (n, mut adj, ends) = h.fold_with_paths(std::slice::from_ref(excluded));
    complete_cover(alphabet, n, &mut adj);
    let table = CosetTable::new(&Presentation::free(alphabet), n, adj.into_iter().map(Option::unwrap).collect())?;
    debug_assert_ne!(ends[0], 0);
    let table = table.standardize();
    if table.stabilizes(excluded) || !h.basis().iter().all(|b| table.stabilizes(b)) {
        return Err(Error::precondition("completion failed to separate"));
    }
    Ok(table)
}

/// Adds edges so each letter acts as a permutation: the vertices missing an
/// outgoing edge are paired in order with those missing an incoming one.
pub(crate) fn complete_cover(alphabet: Alphabet, n: usize, adj: &mut [Option<usize>]) {
    let slots = alphabet.slots();
    for g in 1..=alphabet.rank() {
        let s = Letter::generator(g).slot();
        let lacking_out: Vec<usize> = (0..n).filter(|&v| adj[v * slots + s].is_none()).collect();
        let lacking_in: Vec<usize> = (0..n).filter(|&v| adj[v * slots + (s ^ 1)].is_none()).collect();
        for (&u, &v) in lacking_out.iter().zip(&lacking_in) {
            adj[u * slots + s] = Some(v);
            adj[v * slots + (s ^ 1)] = Some(u);
        }
    }
}

/// The subgroup obtained by intersecting finitely many finite-index
/// subgroups. Free presentations give an explicit Stallings graph; general
/// presentations give the coset table of the diagonal action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Closure {
    Graph { graph: CoreGraph, tables: usize },
    Table { table: CosetTable, tables: usize },
}

impl Closure {
    pub fn contains(&self, w: &Word) -> bool {
        match self {
            Closure::Graph { graph, .. } => graph.contains(w),
            Closure::Table { table, .. } => table.stabilizes(w),
        }
    }

    pub fn graph(&self) -> Option<&CoreGraph> {
        match self {
            Closure::Graph { graph, .. } => Some(graph),
            Closure::Table { .. } => None,
        }
    }

    /// Number of subgroups intersected.
    pub fn table_count(&self) -> usize {
        match self {
            Closure::Graph { tables, .. } | Closure::Table { tables, .. } => *tables,
        }
    }
}

/// Coset table of the intersection of the subgroups of `tables`: the orbit
/// of the base tuple under the diagonal action.
pub fn intersection_table(
    p: &Presentation,
    tables: &[CosetTable],
    max_cosets: usize,
) -> Result<CosetTable> {
    let slots = p.alphabet().slots();
    let start = vec![0usize; tables.len()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut action: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for s in 0..slots {
            let l = Letter::from_slot(s);
            let next: Vec<usize> = states[i]
                .iter()
                .zip(tables)
                .map(|(&c, t)| t.image(c, l))
                .collect();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_cosets {
                        return Err(Error::bounded("diagonal action orbit", max_cosets));
                    }
                    let id = states.len();
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            action.push(id);
        }
        i += 1;
    }
    Ok(CosetTable::new(p, states.len(), action)?.standardize())
}

pub const DEFAULT_ORBIT_BUDGET: usize = 200_000;

/// Intersection of every subgroup of index at most `max_index` containing
/// `<subgens>`.
pub fn profinite_closure(p: &Presentation, subgens: &[Word], max_index: usize) -> Result<Closure> {
    for w in subgens {
        p.alphabet().check(w)?;
    }
    let tables: Vec<CosetTable> = low_index(p, max_index)?
        .into_iter()
        .filter(|t| subgens.iter().all(|w| t.stabilizes(w)))
        .collect();
    closure_of_tables(p, &tables)
}

fn closure_of_tables(p: &Presentation, tables: &[CosetTable]) -> Result<Closure> {
    let table = intersection_table(p, tables, DEFAULT_ORBIT_BUDGET)?;
    let count = tables.len();
    Ok(if p.is_free() {
        Closure::Graph {
            graph: table.to_core_graph(),
            tables: count,
        }
    } else {
        Closure::Table {
            table,
            tables: count,
        }
    })
}

/// Approximation of the intersection of all finite-index subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ResidualCore {
    /// An explicit subgroup: the whole group, or `<a^m>` in rank 1.
    Graph { graph: CoreGraph },
    /// The intersection of the listed subgroups, kept implicit because its
    /// rank grows quickly.
    Intersection { tables: Vec<CosetTable> },
    /// The diagonal action of the intersection, for general presentations.
    Table { table: CosetTable },
}

impl ResidualCore {
    pub fn contains(&self, w: &Word) -> bool {
        match self {
            ResidualCore::Graph { graph } => graph.contains(w),
            ResidualCore::Intersection { tables } => tables.iter().all(|t| t.stabilizes(w)),
            ResidualCore::Table { table } => table.stabilizes(w),
        }
    }
}

pub fn residual_core(p: &Presentation, max_index: usize) -> Result<ResidualCore> {
    let tables = low_index(p, max_index)?;
    if !p.is_free() {
        return Ok(ResidualCore::Table {
            table: intersection_table(p, &tables, DEFAULT_ORBIT_BUDGET)?,
        });
    }
    if tables.len() == 1 {
        return Ok(ResidualCore::Graph {
            graph: CoreGraph::fold(p.alphabet(), &p.alphabet().generators())?,
        });
    }
    if p.rank() == 1 {
        let m = tables.iter().map(CosetTable::size).fold(1, lcm);
        let a = Word::from_letter(Letter::generator(1));
        return Ok(ResidualCore::Graph {
            graph: CoreGraph::fold(p.alphabet(), &[a.pow(m as i64)])?,
        });
    }
    Ok(ResidualCore::Intersection { tables })
}

/// Result of checking `h^t ∈ A` for short `h ∈ H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerLemmaReport {
    /// Index of `A` in `H`.
    pub t: usize,
    /// Index found by coset enumeration of `A` inside `H` on its basis.
    pub enumerated_index: usize,
    pub word_bound: usize,
    pub checked: usize,
    pub violations: Vec<Word>,
}

impl PowerLemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.t == self.enumerated_index
    }
}

/// `A` inside `H` rewritten on the basis of `H`: the ambient alphabet of
/// `H`'s basis and the rewritten generators of `A`.
fn relative_subgroup(h: &CoreGraph, a: &CoreGraph) -> Result<Option<(Alphabet, Vec<Word>)>> {
    for x in a.basis() {
        if !h.contains(&x) {
            return Err(Error::precondition(format!(
                "A is not contained in H: {x} is not a member"
            )));
        }
    }
    let m = h.subgroup_rank();
    if m == 0 {
        return Ok(None);
    }
    let alphabet = Alphabet::new(m)?;
    let gens = a
        .basis()
        .iter()
        .map(|x| Ok(h.rewrite_in_basis(x)?.expect("checked membership")))
        .collect::<Result<Vec<Word>>>()?;
    Ok(Some((alphabet, gens)))
}

/// Index of `A` in `H`, after checking `A ≤ H` and normality.
pub fn relative_index(h: &CoreGraph, a: &CoreGraph) -> Result<usize> {
    let Some((alphabet, gens)) = relative_subgroup(h, a)? else {
        return Ok(1);
    };
    for x in h.basis() {
        for y in a.basis() {
            for c in [y.conjugate_by(&x), y.conjugate_by(&x.inverse())] {
                if !a.contains(&c) {
                    return Err(Error::precondition(format!(
                        "A is not normal in H: {c} is not a member"
                    )));
                }
            }
        }
    }
    CoreGraph::fold(alphabet, &gens)?
        .index()
        .ok_or_else(|| Error::precondition("A has infinite index in H"))
}

pub fn power_lemma_check(h: &CoreGraph, a: &CoreGraph, word_bound: usize) -> Result<PowerLemmaReport> {
    let t = relative_index(h, a)?;
    let enumerated_index = match relative_subgroup(h, a)? {
        None => 1,
        Some((alphabet, gens)) => coset_enumerate(&Presentation::free(alphabet), &gens, t.max(1))?.size(),
    };
    let mut checked = 0;
    let mut violations = Vec::new();
    for x in h.elements_up_to(word_bound) {
        checked += 1;
        if !a.contains(&x.pow(t as i64)) {
            violations.push(x);
        }
    }
    Ok(PowerLemmaReport {
        t,
        enumerated_index,
        word_bound,
        checked,
        violations,
    })
}

/// Breadth-first word ball of radius `r` in the generators.
pub(crate) fn ball(alphabet: Alphabet, r: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = VecDeque::from([Word::identity()]);
    while let Some(w) = frontier.pop_front() {
        if w.len() == r {
            continue;
        }
        for l in alphabet.letters() {
            if w.last() != Some(l.inverse()) {
                let x = w.append(l);
                out.push(x.clone());
                frontier.push_back(x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse_any(s).unwrap()
    }

    fn ws(list: &[&str]) -> Vec<Word> {
        list.iter().map(|s| w(s)).collect()
    }

    fn f2() -> Presentation {
        Presentation::free(Alphabet::new(2).unwrap())
    }

    fn fold2(list: &[&str]) -> CoreGraph {
        CoreGraph::fold(Alphabet::new(2).unwrap(), &ws(list)).unwrap()
    }

    #[test]
    fn engulf_examples() {
        let r = engulf(&f2(), &ws(&["aa", "bb"]), 2).unwrap();
        let t = r.witness.unwrap();
        assert_eq!(t.size(), 2);
        assert!(t.stabilizes(&w("aa")) && t.stabilizes(&w("bb")));
        let none = engulf(&f2(), &ws(&["a", "b"]), 8).unwrap();
        assert_eq!((none.witness, none.searched_to), (None, 8));
        assert_eq!(engulf(&f2(), &[], 2).unwrap().witness.unwrap().size(), 2);
    }

    #[test]
    fn hall_examples() {
        let k = hall_witness(&fold2(&["a"]), &w("b")).unwrap();
        assert_eq!(k.size(), 2);
        assert!(k.stabilizes(&w("a")) && !k.stabilizes(&w("b")));
        let k = hall_witness(&fold2(&["aa", "b"]), &w("a")).unwrap();
        assert_eq!(k.to_core_graph(), fold2(&["aa", "b", "abA"]));
        assert!(matches!(
            hall_witness(&fold2(&["a"]), &w("a")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let h = fold2(&["aa", "b", "abA"]);
        let c = profinite_closure(&f2(), &ws(&["aa", "b", "abA"]), 2).unwrap();
        assert_eq!(c.graph(), Some(&h));
        let c = profinite_closure(&f2(), &ws(&["a"]), 2).unwrap();
        assert!(c.contains(&w("a")) && !c.contains(&w("b")));
        let z = Presentation::free(Alphabet::new(1).unwrap());
        let c = profinite_closure(&z, &[], 3).unwrap();
        let a6 = CoreGraph::fold(Alphabet::new(1).unwrap(), &[w("aaaaaa")]).unwrap();
        assert_eq!(c.graph(), Some(&a6));
    }

    #[test]
    fn residual_core_examples() {
        let z = Presentation::free(Alphabet::new(1).unwrap());
        let a6 = CoreGraph::fold(Alphabet::new(1).unwrap(), &[w("aaaaaa")]).unwrap();
        assert_eq!(residual_core(&z, 3).unwrap(), ResidualCore::Graph { graph: a6 });
        let z5 = Presentation::parse("gens: a\nrel: aaaaa").unwrap();
        let ResidualCore::Table { table } = residual_core(&z5, 5).unwrap() else {
            panic!("general presentations give a table");
        };
        assert_eq!(table.size(), coset_enumerate(&z5, &[], 10).unwrap().size());
        let whole = residual_core(&f2(), 1).unwrap();
        assert!(whole.contains(&w("a")) && whole.contains(&w("b")));
    }

    #[test]
    fn power_lemma_examples() {
        let all = fold2(&["a", "b"]);
        let even = fold2(&["aa", "ab", "aB"]);
        let r = power_lemma_check(&all, &even, 6).unwrap();
        assert_eq!((r.t, r.enumerated_index), (2, 2));
        assert!(r.passed() && r.checked > 1000);
        let r = power_lemma_check(&fold2(&["a"]), &fold2(&["aaa"]), 9).unwrap();
        assert_eq!(r.t, 3);
        assert!(r.passed());
        assert!(matches!(
            power_lemma_check(&all, &fold2(&["aa"]), 6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn diagonal_matches_graph_intersection() {
        let tables: Vec<CosetTable> = low_index(&f2(), 3)
            .unwrap()
            .into_iter()
            .filter(|t| t.stabilizes(&w("ab")))
            .collect();
        let Closure::Graph { graph, .. } = closure_of_tables(&f2(), &tables).unwrap() else {
            panic!()
        };
        let table = intersection_table(&f2(), &tables, 10_000).unwrap();
        assert_eq!(table.to_core_graph(), graph);
    }
}

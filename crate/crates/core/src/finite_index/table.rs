//! Presentations and complete coset tables.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stallings::CoreGraph;
use crate::word::{Alphabet, Letter, Word};

/// A finite presentation `<a, b, ... | relators>`; no relators means free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Relators are replaced by their cyclically reduced cores.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let mut out = Vec::with_capacity(relators.len());
        for r in relators {
            alphabet.check(&r)?;
            let core = r
                .cyclic_decompose()
                .map_err(|_| Error::invalid("relators must be non-trivial"))?
                .core;
            out.push(core);
        }
        Ok(Presentation {
            alphabet,
            relators: out,
        })
    }

    pub fn free(alphabet: Alphabet) -> Self {
        Presentation {
            alphabet,
            relators: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    /// Reads the text format: a `gens: a b` line followed by any number of
    /// `rel: abAB` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut relators = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("line {}: expected 'key: value'", n + 1)))?;
            match key.trim() {
                "gens" => {
                    if alphabet.is_some() {
                        return Err(Error::invalid("duplicate gens line"));
                    }
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    for (i, name) in names.iter().enumerate() {
                        let expected = Letter::generator(i + 1).to_char().to_string();
                        if *name != expected {
                            return Err(Error::invalid(format!(
                                "generators must be a, b, c, ... in order; found {name:?} at position {}",
                                i + 1
                            )));
                        }
                    }
                    alphabet = Some(Alphabet::new(names.len())?);
                }
                "rel" => {
                    let alphabet =
                        alphabet.ok_or_else(|| Error::invalid("rel line before gens line"))?;
                    for part in rest.split(',') {
                        if !part.trim().is_empty() {
                            relators.push(Word::parse(part, alphabet)?);
                        }
                    }
                }
                other => {
                    return Err(Error::invalid(format!(
                        "line {}: unknown key {other:?}",
                        n + 1
                    )))
                }
            }
        }
        let alphabet = alphabet.ok_or_else(|| Error::invalid("missing gens line"))?;
        Presentation::new(alphabet, relators)
    }

    pub fn to_text(&self) -> String {
        let gens: Vec<String> = (1..=self.rank())
            .map(|g| Letter::generator(g).to_char().to_string())
            .collect();
        let mut out = format!("gens: {}\n", gens.join(" "));
        for r in &self.relators {
            out.push_str(&format!("rel: {r}\n"));
        }
        out
    }
}

/// A complete coset table: the transitive permutation action on the cosets
/// of a finite-index subgroup. Coset 0 is the subgroup itself.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CosetTable {
    rank: usize,
    relators: Vec<Word>,
    size: usize,
    /// Image of coset `c` under slot `s`, at `c * 2 * rank + s`.
    action: Vec<usize>,
}

impl CosetTable {
    /// Builds and validates a table from its flattened action.
    pub fn new(presentation: &Presentation, size: usize, action: Vec<usize>) -> Result<Self> {
        let t = CosetTable {
            rank: presentation.rank(),
            relators: presentation.relators().to_vec(),
            size,
            action,
        };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn new_unchecked(
        presentation: &Presentation,
        size: usize,
        action: Vec<usize>,
    ) -> Self {
        let t = CosetTable {
            rank: presentation.rank(),
            relators: presentation.relators().to_vec(),
            size,
            action,
        };
        debug_assert_eq!(t.validate(), Ok(()));
        t
    }

    /// The regular action of a complete Stallings graph.
    pub fn from_core_graph(g: &CoreGraph) -> Result<Self> {
        if !g.is_complete() {
            return Err(Error::precondition("core graph is not a finite cover"));
        }
        let slots = 2 * g.rank();
        let mut action = vec![0; g.vertex_count() * slots];
        for v in 0..g.vertex_count() {
            for s in 0..slots {
                action[v * slots + s] = g.target(v, Letter::from_slot(s)).unwrap();
            }
        }
        CosetTable::new(&Presentation::free(g.alphabet()), g.vertex_count(), action)
    }

    /// The index-1 table.
    pub fn whole(presentation: &Presentation) -> Self {
        CosetTable::new_unchecked(presentation, 1, vec![0; presentation.alphabet().slots()])
    }

    pub fn presentation(&self) -> Presentation {
        Presentation {
            alphabet: self.alphabet(),
            relators: self.relators.clone(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("valid rank")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn index(&self) -> usize {
        self.size
    }

    fn slots(&self) -> usize {
        2 * self.rank
    }

    pub fn image(&self, coset: usize, l: Letter) -> usize {
        self.action[coset * self.slots() + l.slot()]
    }

    /// Flattened rows, the key of the canonical order.
    pub fn rows(&self) -> &[usize] {
        &self.action
    }

    pub fn act(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, l| self.image(c, *l))
    }

    /// Whether `w` lies in the subgroup, i.e. fixes coset 0.
    pub fn stabilizes(&self, w: &Word) -> bool {
        w.max_generator() <= self.rank && self.act(0, w) == 0
    }

    pub fn validate(&self) -> Result<()> {
        let slots = self.slots();
        if self.size == 0 {
            return Err(Error::invalid("coset table must have at least one coset"));
        }
        if self.action.len() != self.size * slots {
            return Err(Error::invalid("coset table has the wrong number of entries"));
        }
        for c in 0..self.size {
            for s in 0..slots {
                let d = self.action[c * slots + s];
                if d >= self.size {
                    return Err(Error::invalid(format!("entry ({c}, {s}) out of range")));
                }
                if self.action[d * slots + (s ^ 1)] != c {
                    return Err(Error::invalid(format!(
                        "letter {} does not act as a permutation at coset {c}",
                        Letter::from_slot(s).to_char()
                    )));
                }
            }
            for r in &self.relators {
                if self.act(c, r) != c {
                    return Err(Error::invalid(format!("relator {r} moves coset {c}")));
                }
            }
        }
        if self.coset_reps().len() != self.size {
            return Err(Error::invalid("action is not transitive from coset 0"));
        }
        Ok(())
    }

    /// Shortlex-least representative word of every reachable coset, in
    /// coset order.
    pub fn coset_reps(&self) -> Vec<Word> {
        self.reps_by_coset().into_iter().flatten().collect()
    }

    fn reps_by_coset(&self) -> Vec<Option<Word>> {
        let mut reps: Vec<Option<Word>> = vec![None; self.size];
        reps[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let w = reps[c].clone().unwrap();
            for s in 0..self.slots() {
                let d = self.action[c * self.slots() + s];
                if reps[d].is_none() {
                    reps[d] = Some(w.append(Letter::from_slot(s)));
                    queue.push_back(d);
                }
            }
        }
        reps
    }

    /// Renumbers cosets in breadth-first order from coset 0.
    pub fn standardize(&self) -> CosetTable {
        let slots = self.slots();
        let mut order = vec![usize::MAX; self.size];
        let mut seen = vec![0usize];
        order[0] = 0;
        let mut i = 0;
        while i < seen.len() {
            let c = seen[i];
            for s in 0..slots {
                let d = self.action[c * slots + s];
                if order[d] == usize::MAX {
                    order[d] = seen.len();
                    seen.push(d);
                }
            }
            i += 1;
        }
        let mut action = vec![0; self.size * slots];
        for (new, &old) in seen.iter().enumerate() {
            for s in 0..slots {
                action[new * slots + s] = order[self.action[old * slots + s]];
            }
        }
        CosetTable {
            rank: self.rank,
            relators: self.relators.clone(),
            size: self.size,
            action,
        }
    }

    /// Schreier generators of the subgroup, reduced, non-trivial and deduplicated.
    pub fn schreier_generators(&self) -> Vec<Word> {
        let reps = self.coset_reps();
        let mut out = Vec::new();
        for c in 0..self.size {
            for g in 1..=self.rank {
                let l = Letter::generator(g);
                let d = self.image(c, l);
                let w = reps[c].append(l).mul(&reps[d].inverse());
                if !w.is_identity() {
                    out.push(w);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Shortlex-least word carrying coset 0 to `coset`.
    pub fn representative(&self, coset: usize) -> Word {
        self.reps_by_coset()[coset].clone().expect("table is transitive")
    }

    /// Normal iff the subgroup fixes every coset.
    pub fn is_normal(&self) -> bool {
        let gens = self.schreier_generators();
        (0..self.size).all(|c| gens.iter().all(|h| self.act(c, h) == c))
    }

    /// The Stallings graph of the preimage subgroup in the free group on the
    /// generators.
    pub fn to_core_graph(&self) -> CoreGraph {
        let edges: Vec<(usize, Letter, usize)> = (0..self.size)
            .flat_map(|c| {
                (1..=self.rank).map(move |g| {
                    let l = Letter::generator(g);
                    (c, l, self.image(c, l))
                })
            })
            .collect();
        CoreGraph::from_edges(self.alphabet(), self.size, 0, &edges)
            .expect("table entries are in range")
    }

    /// Permutation of the cosets induced by `w`.
    pub fn permutation(&self, w: &Word) -> Vec<usize> {
        (0..self.size).map(|c| self.act(c, w)).collect()
    }

    /// Elements of the permutation group generated by the letters, each with
    /// its shortlex-least word. Fails beyond `limit` elements.
    pub fn image_group(&self, limit: usize) -> Result<Vec<(Vec<usize>, Word)>> {
        let gens: Vec<(Letter, Vec<usize>)> = (0..self.slots())
            .map(|s| {
                let l = Letter::from_slot(s);
                (l, self.permutation(&Word::from_letter(l)))
            })
            .collect();
        closure_of(self.size, &gens, limit)
    }

    pub fn image_order(&self, limit: usize) -> Result<usize> {
        Ok(self.image_group(limit)?.len())
    }

    /// Whether the permutations of `words` generate the whole image group.
    pub fn generated_by(&self, words: &[Word], limit: usize) -> Result<bool> {
        let full = self.image_order(limit)?;
        let gens: Vec<(Letter, Vec<usize>)> = words
            .iter()
            .flat_map(|w| {
                let p = self.permutation(w);
                let q = self.permutation(&w.inverse());
                [(Letter::generator(1), p), (Letter::generator(1), q)]
            })
            .collect();
        Ok(closure_of(self.size, &gens, limit)?.len() == full)
    }

    /// Order of the permutation induced by `w`.
    pub fn element_order(&self, w: &Word) -> usize {
        let p = self.permutation(w);
        let mut order = 1;
        let mut seen = vec![false; self.size];
        for start in 0..self.size {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                c = p[c];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("coset table JSON: {e}")))
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Group generated by permutations, as (permutation, word) pairs in
/// breadth-first order. Words are built from the letters attached to the
/// generators.
fn closure_of(
    n: usize,
    gens: &[(Letter, Vec<usize>)],
    limit: usize,
) -> Result<Vec<(Vec<usize>, Word)>> {
    let id: Vec<usize> = (0..n).collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id.clone(), 0)]);
    let mut out = vec![(id, Word::identity())];
    let mut i = 0;
    while i < out.len() {
        for (l, g) in gens {
            let (p, w) = &out[i];
            // Right multiplication: first p, then g.
            let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
            if !index.contains_key(&q) {
                if out.len() >= limit {
                    return Err(Error::bounded("permutation group elements", limit));
                }
                let w = w.append(*l);
                index.insert(q.clone(), out.len());
                out.push((q, w));
            }
        }
        i += 1;
    }
    Ok(out)
}

impl fmt::Debug for CosetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetTable(size {}", self.size)?;
        for g in 1..=self.rank {
            let l = Letter::generator(g);
            let p: Vec<usize> = (0..self.size).map(|c| self.image(c, l)).collect();
            write!(f, ", {}: {:?}", l.to_char(), p)?;
        }
        write!(f, ")")
    }
}

impl PartialOrd for CosetTable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by size, then lexicographically on flattened rows.
impl Ord for CosetTable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rank, self.size, &self.action, &self.relators).cmp(&(
            other.rank,
            other.size,
            &other.action,
            &other.relators,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    rank: usize,
    relators: Vec<Word>,
    size: usize,
    action: Vec<(usize, String, usize)>,
}

impl Serialize for CosetTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut action = Vec::new();
        for c in 0..self.size {
            for g in 1..=self.rank {
                let l = Letter::generator(g);
                action.push((c, l.to_char().to_string(), self.image(c, l)));
            }
        }
        TableJson {
            rank: self.rank,
            relators: self.relators.clone(),
            size: self.size,
            action,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CosetTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let t = TableJson::deserialize(d)?;
        let alphabet = Alphabet::new(t.rank).map_err(D::Error::custom)?;
        let p = Presentation::new(alphabet, t.relators).map_err(D::Error::custom)?;
        let slots = alphabet.slots();
        let mut action = vec![usize::MAX; t.size * slots];
        for (c, l, e) in t.action {
            let letter = match (l.chars().next(), l.chars().count()) {
                (Some(ch), 1) => Letter::from_char(ch),
                _ => None,
            }
            .filter(|x| !x.is_inverse() && alphabet.contains(*x))
            .ok_or_else(|| D::Error::custom(format!("bad action letter {l:?}")))?;
            if c >= t.size || e >= t.size {
                return Err(D::Error::custom(format!("action entry ({c}, {e}) out of range")));
            }
            action[c * slots + letter.slot()] = e;
            action[e * slots + letter.inverse().slot()] = c;
        }
        if action.contains(&usize::MAX) {
            return Err(D::Error::custom("incomplete action"));
        }
        CosetTable::new(&p, t.size, action).map_err(D::Error::custom)
    }
}

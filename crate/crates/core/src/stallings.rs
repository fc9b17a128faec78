//! Finitely generated subgroups as folded core graphs.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

/// Union-find based Stallings folding.
struct Folder {
    slots: usize,
    parent: Vec<usize>,
    adj: Vec<Vec<Option<usize>>>,
    pending: VecDeque<(usize, usize, usize)>,
}

impl Folder {
    fn new(slots: usize) -> Self {
        let mut f = Folder {
            slots,
            parent: Vec::new(),
            adj: Vec::new(),
            pending: VecDeque::new(),
        };
        f.add_vertex();
        f
    }

    fn add_vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(vec![None; self.slots]);
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn add_edge(&mut self, u: usize, slot: usize, v: usize) {
        self.pending.push_back((u, slot, v));
        while let Some((u, s, v)) = self.pending.pop_front() {
            let (u, v) = (self.find(u), self.find(v));
            self.set_half(u, s, v);
            self.set_half(v, s ^ 1, u);
        }
    }

    fn set_half(&mut self, u: usize, s: usize, v: usize) {
        match self.adj[u][s] {
            None => self.adj[u][s] = Some(v),
            Some(w) => {
                let w = self.find(w);
                if w != v {
                    self.merge(v, w);
                }
            }
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        for s in 0..self.slots {
            if let Some(t) = self.adj[gone][s].take() {
                self.pending.push_back((keep, s, t));
            }
        }
    }

    fn add_loop(&mut self, w: &Word) {
        let letters = w.letters();
        if letters.is_empty() {
            return;
        }
        let mut cur = 0;
        for (i, l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                0
            } else {
                self.add_vertex()
            };
            self.add_edge(cur, l.slot(), next);
            cur = next;
        }
    }

    fn add_path(&mut self, w: &Word) -> usize {
        let mut cur = 0;
        for l in w.letters() {
            let next = self.add_vertex();
            self.add_edge(cur, l.slot(), next);
            cur = next;
        }
        cur
    }

    /// Folded graph without trimming, base 0, vertices in breadth-first order.
    fn finish_untrimmed(mut self, ends: &[usize]) -> (usize, Vec<Option<usize>>, Vec<usize>) {
        let slots = self.slots;
        let base = self.find(0);
        let mut order = vec![usize::MAX; self.parent.len()];
        let mut seen = vec![base];
        order[base] = 0;
        let mut i = 0;
        while i < seen.len() {
            let v = seen[i];
            for s in 0..slots {
                if let Some(t) = self.adj[v][s] {
                    let t = self.find(t);
                    if order[t] == usize::MAX {
                        order[t] = seen.len();
                        seen.push(t);
                    }
                }
            }
            i += 1;
        }
        let mut adj = vec![None; seen.len() * slots];
        for (new, &old) in seen.iter().enumerate() {
            for s in 0..slots {
                if let Some(t) = self.adj[old][s] {
                    adj[new * slots + s] = Some(order[self.find(t)]);
                }
            }
        }
        let ends = ends.iter().map(|&e| order[self.find(e)]).collect();
        (seen.len(), adj, ends)
    }

    fn finish(mut self, rank: usize) -> CoreGraph {
        let n = self.parent.len();
        let mut adj = vec![None; n * self.slots];
        for v in 0..n {
            if self.find(v) != v {
                continue;
            }
            for s in 0..self.slots {
                if let Some(t) = self.adj[v][s] {
                    adj[v * self.slots + s] = Some(self.find(t));
                }
            }
        }
        let base = self.find(0);
        CoreGraph::from_folded(rank, n, base, adj)
    }
}

/// A folded core graph with base vertex 0 in canonical breadth-first numbering.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoreGraph {
    rank: usize,
    vertex_count: usize,
    /// Target of the edge leaving `v` with signed letter slot `s`, at `v * 2 * rank + s`.
    adj: Vec<Option<usize>>,
}

/// Cylinders meeting the limit set, up to a fixed depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitSetApprox {
    pub depth: usize,
    /// Non-empty stems in shortlex order.
    pub stems: Vec<Word>,
}

impl LimitSetApprox {
    pub fn contains(&self, stem: &Word) -> bool {
        self.stems.binary_search(stem).is_ok()
    }
}

impl CoreGraph {
    pub fn fold(alphabet: Alphabet, generators: &[Word]) -> Result<CoreGraph> {
        let mut f = Folder::new(alphabet.slots());
        for g in generators {
            alphabet.check(g)?;
            f.add_loop(g);
        }
        Ok(f.finish(alphabet.rank()))
    }

    /// Folds the loops of `self` together with open paths from the base,
    /// without trimming. Returns the vertex count, flattened adjacency and
    /// the endpoint of each path.
    pub(crate) fn fold_with_paths(&self, paths: &[Word]) -> (usize, Vec<Option<usize>>, Vec<usize>) {
        let slots = self.slots();
        let mut f = Folder::new(slots);
        for _ in 1..self.vertex_count {
            f.add_vertex();
        }
        for (u, l, v) in self.edges() {
            f.add_edge(u, l.slot(), v);
        }
        let ends: Vec<usize> = paths.iter().map(|w| f.add_path(w)).collect();
        f.finish_untrimmed(&ends)
    }

    pub fn trivial(alphabet: Alphabet) -> CoreGraph {
        CoreGraph {
            rank: alphabet.rank(),
            vertex_count: 1,
            adj: vec![None; alphabet.slots()],
        }
    }

    /// Builds a graph from an arbitrary labelled edge list, folding, trimming
    /// and renumbering it.
    pub fn from_edges(
        alphabet: Alphabet,
        vertex_count: usize,
        base: usize,
        edges: &[(usize, Letter, usize)],
    ) -> Result<CoreGraph> {
        if base >= vertex_count.max(1) {
            return Err(Error::invalid(format!("base {base} is not a vertex")));
        }
        let mut f = Folder::new(alphabet.slots());
        for _ in 1..vertex_count {
            f.add_vertex();
        }
        // Swap 0 and base so the folder's base is vertex 0.
        let relabel = |v: usize| {
            if v == base {
                0
            } else if v == 0 {
                base
            } else {
                v
            }
        };
        for &(u, l, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::invalid(format!("edge ({u}, {v}) uses a missing vertex")));
            }
            if !alphabet.contains(l) {
                return Err(Error::AlphabetMismatch(format!(
                    "edge letter {} lies outside rank {}",
                    l.to_char(),
                    alphabet.rank()
                )));
            }
            f.add_edge(relabel(u), l.slot(), relabel(v));
        }
        Ok(f.finish(alphabet.rank()))
    }

    /// Trims a folded involutive graph to its core and renumbers it.
    pub(crate) fn from_folded(rank: usize, n: usize, base: usize, mut adj: Vec<Option<usize>>) -> CoreGraph {
        let slots = 2 * rank;
        let mut present: Vec<bool> = (0..n)
            .map(|v| v == base || adj[v * slots..(v + 1) * slots].iter().any(Option::is_some))
            .collect();
        let degree = |adj: &Vec<Option<usize>>, v: usize| {
            adj[v * slots..(v + 1) * slots].iter().filter(|t| t.is_some()).count()
        };
        let mut stack: Vec<usize> = (0..n).filter(|&v| present[v] && v != base).collect();
        while let Some(v) = stack.pop() {
            if !present[v] || v == base || degree(&adj, v) > 1 {
                continue;
            }
            present[v] = false;
            for s in 0..slots {
                if let Some(t) = adj[v * slots + s].take() {
                    adj[t * slots + (s ^ 1)] = None;
                    stack.push(t);
                }
            }
        }
        let mut order = vec![usize::MAX; n];
        let mut queue = VecDeque::from([base]);
        order[base] = 0;
        let mut seen = vec![base];
        while let Some(v) = queue.pop_front() {
            for s in 0..slots {
                if let Some(t) = adj[v * slots + s] {
                    if order[t] == usize::MAX {
                        order[t] = seen.len();
                        seen.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        let m = seen.len();
        let mut out = vec![None; m * slots];
        for (new, &old) in seen.iter().enumerate() {
            for s in 0..slots {
                out[new * slots + s] = adj[old * slots + s].map(|t| order[t]);
            }
        }
        CoreGraph {
            rank,
            vertex_count: m,
            adj: out,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("graph rank is valid")
    }

    fn slots(&self) -> usize {
        2 * self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        self.adj[v * self.slots() + l.slot()]
    }

    fn target_slot(&self, v: usize, s: usize) -> Option<usize> {
        self.adj[v * self.slots() + s]
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.slots()).filter(|&s| self.target_slot(v, s).is_some()).count()
    }

    /// Edges with positive letters, sorted.
    pub fn edges(&self) -> Vec<(usize, Letter, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count {
            for g in 1..=self.rank {
                let l = Letter::generator(g);
                if let Some(t) = self.target(v, l) {
                    out.push((v, l, t));
                }
            }
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.vertex_count == 1 && self.degree(0) == 0
    }

    /// Endpoint of the path labelled `w` from `v`, if it exists.
    pub fn read_from(&self, v: usize, w: &Word) -> Option<usize> {
        w.letters()
            .iter()
            .try_fold(v, |cur, l| self.target(cur, *l))
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.max_generator() <= self.rank && self.read_from(0, w) == Some(0)
    }

    pub fn is_complete(&self) -> bool {
        self.adj.iter().all(Option::is_some)
    }

    /// `Some(vertex_count)` for a complete cover, `None` for infinite index.
    pub fn index(&self) -> Option<usize> {
        self.is_complete().then_some(self.vertex_count)
    }

    /// `alive[v * slots + s]`: some infinite reduced path leaves `v` through
    /// slot `s`.
    fn alive_edges(&self) -> Vec<bool> {
        let slots = self.slots();
        let mut alive: Vec<bool> = self.adj.iter().map(Option::is_some).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..self.vertex_count {
                for s in 0..slots {
                    let i = v * slots + s;
                    if !alive[i] {
                        continue;
                    }
                    let t = self.adj[i].unwrap();
                    let ok = (0..slots).any(|s2| s2 != (s ^ 1) && alive[t * slots + s2]);
                    if !ok {
                        alive[i] = false;
                        changed = true;
                    }
                }
            }
        }
        alive
    }

    /// Stems read from the base that continue to infinite reduced paths.
    pub fn limit_set(&self, depth: usize) -> LimitSetApprox {
        let slots = self.slots();
        let alive = self.alive_edges();
        let mut stems = Vec::new();
        let mut frontier: Vec<(Word, usize)> = vec![(Word::identity(), 0)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (w, v) in &frontier {
                for s in 0..slots {
                    let l = Letter::from_slot(s);
                    if w.last() == Some(l.inverse()) || !alive[v * slots + s] {
                        continue;
                    }
                    let t = self.adj[v * slots + s].unwrap();
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push((Word::from_reduced_unchecked(letters), t));
                }
            }
            stems.extend(next.iter().map(|(w, _)| w.clone()));
            frontier = next;
        }
        stems.sort();
        LimitSetApprox { depth, stems }
    }

    pub fn default_limit_depth(&self) -> usize {
        self.vertex_count + 1
    }

    /// Whether `C(stem)` meets the limit set.
    pub fn stem_meets_limit_set(&self, stem: &Word) -> bool {
        let slots = self.slots();
        let Some((&last, init)) = stem.letters().split_last() else {
            return !self.is_trivial();
        };
        if stem.max_generator() > self.rank {
            return false;
        }
        let Some(v) = init.iter().try_fold(0, |cur, l| self.target(cur, *l)) else {
            return false;
        };
        self.alive_edges()[v * slots + last.slot()]
    }

    /// Whether the boundary point lies in the limit set.
    pub fn limit_set_contains(&self, p: &BoundaryPoint) -> bool {
        if p.prefix().max_generator() > self.rank || p.period().max_generator() > self.rank {
            return false;
        }
        let Some(mut v) = self.read_from(0, p.prefix()) else {
            return false;
        };
        // Reading the period repeatedly: the start vertex must recur.
        let mut seen = vec![false; self.vertex_count];
        while !seen[v] {
            seen[v] = true;
            match self.read_from(v, p.period()) {
                Some(t) => v = t,
                None => return false,
            }
        }
        true
    }

    /// Exact properness test of the limit set: every reduced path of length
    /// at most `vertex_count + 1` from the base continues in every direction.
    pub fn is_proper_limit_set(&self) -> bool {
        let slots = self.slots();
        let alive = self.alive_edges();
        let bound = self.default_limit_depth();
        // States are (vertex, slot entered by), with slots + 1 meaning "start".
        let width = slots + 1;
        let mut dist = vec![usize::MAX; self.vertex_count * width];
        let mut queue = VecDeque::from([(0usize, slots)]);
        dist[slots] = 0;
        let mut proper = false;
        while let Some((v, entered)) = queue.pop_front() {
            let d = dist[v * width + entered];
            if d >= bound {
                continue;
            }
            for s in 0..slots {
                if entered < slots && s == (entered ^ 1) {
                    continue;
                }
                if !alive[v * slots + s] {
                    proper = true;
                    continue;
                }
                let t = self.adj[v * slots + s].unwrap();
                let st = t * width + s;
                if dist[st] == usize::MAX {
                    dist[st] = d + 1;
                    queue.push_back((t, s));
                }
            }
        }
        debug_assert_eq!(proper, self.index().is_none());
        proper
    }

    /// Labels of the breadth-first spanning tree paths from the base.
    fn tree_labels(&self) -> (Vec<Word>, Vec<Option<(usize, usize)>>) {
        let slots = self.slots();
        let mut label = vec![None::<Word>; self.vertex_count];
        let mut tree_edge = vec![None; self.vertex_count];
        label[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for s in 0..slots {
                if let Some(t) = self.target_slot(v, s) {
                    if label[t].is_none() {
                        label[t] = Some(label[v].as_ref().unwrap().append(Letter::from_slot(s)));
                        tree_edge[t] = Some((v, s));
                        queue.push_back(t);
                    }
                }
            }
        }
        (label.into_iter().map(Option::unwrap).collect(), tree_edge)
    }

    /// Free basis from the breadth-first spanning tree, one element per
    /// positively labelled non-tree edge in edge order.
    pub fn basis(&self) -> Vec<Word> {
        self.basis_edges()
            .into_iter()
            .map(|(_, _, _, w)| w)
            .collect()
    }

    fn basis_edges(&self) -> Vec<(usize, usize, usize, Word)> {
        let (label, tree_edge) = self.tree_labels();
        let mut out = Vec::new();
        for (u, l, v) in self.edges() {
            let s = l.slot();
            let in_tree = tree_edge[v] == Some((u, s)) || tree_edge[u] == Some((v, s ^ 1));
            if !in_tree {
                let w = label[u].append(l).mul(&label[v].inverse());
                out.push((u, s, v, w));
            }
        }
        out
    }

    pub fn subgroup_rank(&self) -> usize {
        self.basis_edges().len()
    }

    /// `w` as a word in [`CoreGraph::basis`], with basis element `i` written
    /// as generator `i + 1`. `None` when `w` is not a member.
    pub fn rewrite_in_basis(&self, w: &Word) -> Result<Option<Word>> {
        let basis = self.basis_edges();
        if basis.len() > crate::word::MAX_RANK {
            return Err(Error::invalid(format!(
                "subgroup rank {} exceeds the largest supported alphabet",
                basis.len()
            )));
        }
        if !self.contains(w) {
            return Ok(None);
        }
        let mut raw = Vec::new();
        let mut v = 0;
        for l in w.letters() {
            let s = l.slot();
            let t = self.target_slot(v, s).expect("member path exists");
            for (i, (bu, bs, bv, _)) in basis.iter().enumerate() {
                if *bu == v && *bs == s && *bv == t {
                    raw.push(Letter::generator(i + 1));
                } else if *bv == v && (*bs ^ 1) == s && *bu == t {
                    raw.push(Letter::inverse_of_generator(i + 1));
                }
            }
            v = t;
        }
        Ok(Some(crate::word::reduce(raw)))
    }

    /// The core graph of `g H g^-1`.
    pub fn conjugate(&self, g: &Word) -> Result<CoreGraph> {
        let alphabet = self.alphabet();
        alphabet.check(g)?;
        let gens: Vec<Word> = self.basis().iter().map(|b| b.conjugate_by(g)).collect();
        CoreGraph::fold(alphabet, &gens)
    }

    pub fn intersect(&self, other: &CoreGraph) -> Result<CoreGraph> {
        if self.rank != other.rank {
            return Err(Error::AlphabetMismatch(format!(
                "ranks {} and {} differ",
                self.rank, other.rank
            )));
        }
        let slots = self.slots();
        let mut index = std::collections::HashMap::new();
        let mut pairs = vec![(0usize, 0usize)];
        index.insert((0, 0), 0usize);
        let mut adj: Vec<Option<usize>> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (u, v) = pairs[i];
            adj.extend(std::iter::repeat_n(None, slots));
            for s in 0..slots {
                if let (Some(a), Some(b)) = (self.target_slot(u, s), other.target_slot(v, s)) {
                    let next = pairs.len();
                    let id = *index.entry((a, b)).or_insert_with(|| {
                        pairs.push((a, b));
                        next
                    });
                    adj[i * slots + s] = Some(id);
                }
            }
            i += 1;
        }
        Ok(CoreGraph::from_folded(self.rank, pairs.len(), 0, adj))
    }

    /// Whether `self ⊆ other` as subgroups.
    pub fn is_subgroup_of(&self, other: &CoreGraph) -> bool {
        self.rank == other.rank && self.basis().iter().all(|b| other.contains(b))
    }

    /// Reduced closed paths at the base of exactly `len` letters, shortlex.
    pub fn closed_words(&self, len: usize) -> Vec<Word> {
        if len == 0 {
            return vec![Word::identity()];
        }
        let slots = self.slots();
        let dist = self.distances_to_base();
        let mut out = Vec::new();
        let mut path: Vec<Letter> = Vec::with_capacity(len);
        fn go(
            g: &CoreGraph,
            v: usize,
            len: usize,
            slots: usize,
            dist: &[usize],
            path: &mut Vec<Letter>,
            out: &mut Vec<Word>,
        ) {
            if path.len() == len {
                if v == 0 {
                    out.push(Word::from_reduced_unchecked(path.clone()));
                }
                return;
            }
            let remaining = len - path.len();
            for s in 0..slots {
                let l = Letter::from_slot(s);
                if path.last() == Some(&l.inverse()) {
                    continue;
                }
                if let Some(t) = g.target_slot(v, s) {
                    if dist[t] < remaining {
                        path.push(l);
                        go(g, t, len, slots, dist, path, out);
                        path.pop();
                    }
                }
            }
        }
        go(self, 0, len, slots, &dist, &mut path, &mut out);
        out
    }

    /// [`CoreGraph::closed_words`] rotated by `seed` within the length class.
    pub fn closed_words_rotated(&self, len: usize, seed: u64) -> Vec<Word> {
        let mut v = self.closed_words(len);
        if !v.is_empty() {
            let k = (seed % v.len() as u64) as usize;
            v.rotate_left(k);
        }
        v
    }

    /// All members of length at most `len`, shortlex.
    pub fn elements_up_to(&self, len: usize) -> Vec<Word> {
        (0..=len).flat_map(|l| self.closed_words(l)).collect()
    }

    fn distances_to_base(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for s in 0..self.slots() {
                if let Some(t) = self.target_slot(v, s) {
                    if dist[t] == usize::MAX {
                        dist[t] = dist[v] + 1;
                        queue.push_back(t);
                    }
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<CoreGraph> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("core graph JSON: {e}")))
    }

    /// Letters that occur as outgoing labels at the base.
    pub fn base_letters(&self) -> BTreeSet<Letter> {
        (0..self.slots())
            .filter(|&s| self.target_slot(0, s).is_some())
            .map(Letter::from_slot)
            .collect()
    }
}

impl std::fmt::Debug for CoreGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoreGraph(rank {}, {} vertices,", self.rank, self.vertex_count)?;
        for (u, l, v) in self.edges() {
            write!(f, " {u}-{}->{v}", l.to_char())?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    rank: usize,
    vertex_count: usize,
    base: usize,
    edges: Vec<(usize, String, usize)>,
}

impl Serialize for CoreGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            rank: self.rank,
            vertex_count: self.vertex_count,
            base: 0,
            edges: self
                .edges()
                .into_iter()
                .map(|(u, l, v)| (u, l.to_char().to_string(), v))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoreGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let g = GraphJson::deserialize(d)?;
        let alphabet = Alphabet::new(g.rank).map_err(D::Error::custom)?;
        let mut edges = Vec::with_capacity(g.edges.len());
        for (u, l, v) in g.edges {
            let mut chars = l.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(D::Error::custom(format!("edge label {l:?} is not one letter")));
            };
            let letter = Letter::from_char(c)
                .ok_or_else(|| D::Error::custom(format!("edge label {c:?} is not a letter")))?;
            edges.push((u, letter, v));
        }
        CoreGraph::from_edges(alphabet, g.vertex_count, g.base, &edges).map_err(D::Error::custom)
    }
}

/// Membership of `w` in the subgroup generated by `generators`.
pub fn membership(h: &CoreGraph, w: &Word) -> bool {
    h.contains(w)
}

//! The region bookkeeping behind the almost-separability argument: a compact
//! set `C` off the limit set, absorbing pairs inside it, and the trace of a
//! point under an alternating product of pair elements and members of `A`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boundary::{children, plays_ping_pong, AbsorbingPair, BoundaryPoint, Cylinder, CylinderSet};
use crate::error::{Error, Result};
use crate::finite_index::relative_index;
use crate::stallings::CoreGraph;
use crate::word::{Alphabet, Word};

/// A clopen set `C` (finite union of cylinders) and absorbing pairs strictly
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinballRegions {
    pub c: Vec<Cylinder>,
    pub pairs: Vec<AbsorbingPair>,
}

impl PinballRegions {
    pub fn new(c: Vec<Cylinder>, pairs: Vec<AbsorbingPair>) -> Result<Self> {
        let r = PinballRegions { c, pairs };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.is_empty() {
            return Err(Error::invalid("region C must contain a cylinder"));
        }
        let cyls: Vec<&Cylinder> = self.pairs.iter().flat_map(|p| p.cylinders()).collect();
        for (i, u) in cyls.iter().enumerate() {
            if !self.c.iter().any(|c| u.strictly_inside(c)) {
                return Err(Error::precondition(format!(
                    "pair cylinder {u} is not strictly inside C"
                )));
            }
            for v in &cyls[i + 1..] {
                if !u.is_disjoint(v) {
                    return Err(Error::precondition(format!(
                        "pair cylinders {u} and {v} overlap"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn c_set(&self) -> CylinderSet {
        CylinderSet::from_cylinders(&self.c)
    }

    pub fn u_set(&self) -> CylinderSet {
        CylinderSet::from_cylinders(self.pairs.iter().flat_map(|p| p.cylinders()))
    }

    pub fn max_stem_len(&self) -> usize {
        self.c
            .iter()
            .chain(self.pairs.iter().flat_map(|p| p.cylinders()))
            .map(|c| c.stem().len())
            .max()
            .unwrap_or(0)
    }

    /// Shortlex-first cylinder of `C - ∪U` no deeper than one letter past
    /// the deepest region stem.
    pub fn start_cylinder(&self, alphabet: Alphabet) -> Option<Cylinder> {
        let u = self.u_set();
        let max = self.max_stem_len();
        let mut c: Vec<&Cylinder> = self.c.iter().collect();
        c.sort();
        for cs in c {
            let mut level = vec![cs.stem().clone()];
            for _ in cs.stem().len()..=max {
                if let Some(x) = level
                    .iter()
                    .find(|x| !u.intersects(&CylinderSet::from_stems([(*x).clone()])))
                {
                    return Cylinder::new(x.clone()).ok();
                }
                level = level.iter().flat_map(|x| children(alphabet, x)).collect();
            }
        }
        None
    }

    pub fn classify(&self, p: &BoundaryPoint) -> Region {
        for (i, pair) in self.pairs.iter().enumerate() {
            if pair.plus.contains_point(p) {
                return Region::Plus(i);
            }
            if pair.minus.contains_point(p) {
                return Region::Minus(i);
            }
        }
        if self.c.iter().any(|c| c.contains_point(p)) {
            Region::InsideC
        } else {
            Region::OutsideC
        }
    }

    fn region_set(&self, alphabet: Alphabet, r: Region) -> CylinderSet {
        match r {
            Region::Plus(i) => CylinderSet::from_cylinders([&self.pairs[i].plus]),
            Region::Minus(i) => CylinderSet::from_cylinders([&self.pairs[i].minus]),
            Region::OutsideC => self.c_set().complement(alphabet),
            Region::InsideC => self.c_set(),
        }
    }
}

/// Where a point sits relative to the regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// In `C` but in no pair cylinder.
    InsideC,
    OutsideC,
    Plus(usize),
    Minus(usize),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::InsideC => write!(f, "C-U"),
            Region::OutsideC => write!(f, "outside-C"),
            Region::Plus(i) => write!(f, "U{}+", i + 1),
            Region::Minus(i) => write!(f, "U{}-", i + 1),
        }
    }
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C-U" => Ok(Region::InsideC),
            "outside-C" => Ok(Region::OutsideC),
            _ => {
                let bad = || Error::invalid(format!("unknown region {s:?}"));
                let body = s.strip_prefix('U').ok_or_else(bad)?;
                let (num, sign) = body.split_at(body.len().saturating_sub(1));
                let i: usize = num.parse().map_err(|_| bad())?;
                if i == 0 {
                    return Err(bad());
                }
                match sign {
                    "+" => Ok(Region::Plus(i - 1)),
                    "-" => Ok(Region::Minus(i - 1)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `s_i^{±1}` in an alternating word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLetter {
    pub index: usize,
    pub inverse: bool,
}

/// One `s^ε a` block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub s: Option<PairLetter>,
    pub a: Word,
}

/// `s_{i1}^{ε1} a_1 ... s_{ik}^{εk} a_k` where only `s_{i1}` and `a_k` may
/// be trivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingWord {
    pub blocks: Vec<Block>,
}

impl AlternatingWord {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let w = AlternatingWord { blocks };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.blocks.len();
        if k == 0 || (k == 1 && self.blocks[0].s.is_none() && self.blocks[0].a.is_identity()) {
            return Err(Error::invalid("alternating word is the identity"));
        }
        for (j, b) in self.blocks.iter().enumerate() {
            if j > 0 && b.s.is_none() {
                return Err(Error::invalid(format!("block {} lacks its pair element", j + 1)));
            }
            if j + 1 < k && b.a.is_identity() {
                return Err(Error::invalid(format!("block {} has a trivial A-element", j + 1)));
            }
        }
        Ok(())
    }

    /// The product in the ambient group.
    pub fn evaluate(&self, s_elements: &[Word]) -> Result<Word> {
        let mut out = Word::identity();
        for b in &self.blocks {
            if let Some(p) = b.s {
                let s = s_elements
                    .get(p.index)
                    .ok_or_else(|| Error::invalid(format!("no pair element {}", p.index + 1)))?;
                out = out.mul(&if p.inverse { s.inverse() } else { s.clone() });
            }
            out = out.mul(&b.a);
        }
        Ok(out)
    }

    /// The region the four-case analysis predicts for the image of a point
    /// of `C - ∪U`.
    pub fn predicted_region(&self) -> Region {
        match self.blocks[0].s {
            Some(PairLetter {
                index,
                inverse: false,
            }) => Region::Plus(index),
            Some(PairLetter {
                index,
                inverse: true,
            }) => Region::Minus(index),
            None => Region::OutsideC,
        }
    }

    /// Which of the four cases applies: (first pair element present, last
    /// A-element present).
    pub fn case(&self) -> (bool, bool) {
        (
            self.blocks[0].s.is_some(),
            !self.blocks.last().unwrap().a.is_identity(),
        )
    }

    /// A random alternating word with at most `max_blocks` blocks, each
    /// A-element a product of one or two basis elements of `a_basis`.
    pub fn random<R: Rng>(
        rng: &mut R,
        pairs: usize,
        a_basis: &[Word],
        max_blocks: usize,
    ) -> AlternatingWord {
        loop {
            let k = rng.gen_range(1..=max_blocks.max(1));
            let first_s = rng.gen_bool(0.5);
            let last_a = rng.gen_bool(0.5);
            let mut blocks = Vec::with_capacity(k);
            for j in 0..k {
                let s = (j > 0 || first_s).then(|| PairLetter {
                    index: rng.gen_range(0..pairs),
                    inverse: rng.gen_bool(0.5),
                });
                let a = if j + 1 < k || last_a {
                    random_nontrivial(rng, a_basis)
                } else {
                    Word::identity()
                };
                blocks.push(Block { s, a });
            }
            let w = AlternatingWord { blocks };
            if w.validate().is_ok() {
                return w;
            }
        }
    }
}

fn random_nontrivial<R: Rng>(rng: &mut R, basis: &[Word]) -> Word {
    if basis.is_empty() {
        return Word::identity();
    }
    loop {
        let n = rng.gen_range(1..=2);
        let mut w = Word::identity();
        for _ in 0..n {
            let b = &basis[rng.gen_range(0..basis.len())];
            w = w.mul(&if rng.gen_bool(0.5) { b.inverse() } else { b.clone() });
        }
        if !w.is_identity() {
            return w;
        }
    }
}

/// The orbit of a start cylinder under an alternating word, applied right
/// to left.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinballTrace {
    pub word: AlternatingWord,
    pub product: Word,
    pub start: Cylinder,
    /// Region of the representative point after each non-trivial step.
    pub region_sequence: Vec<Region>,
    /// Whether the whole image set lies in the expected region at each step.
    pub set_steps_hold: Vec<bool>,
    pub final_region: Region,
    pub predicted: Region,
}

impl PinballTrace {
    pub fn matches(&self) -> bool {
        self.final_region == self.predicted && self.set_steps_hold.iter().all(|b| *b)
    }
}

pub fn pinball_trace(
    alphabet: Alphabet,
    word: &AlternatingWord,
    regions: &PinballRegions,
    s_elements: &[Word],
    start: &Cylinder,
) -> Result<PinballTrace> {
    word.validate()?;
    regions.validate()?;
    if s_elements.len() != regions.pairs.len() {
        return Err(Error::invalid("one pair element per absorbing pair is required"));
    }
    let start_set = CylinderSet::from_cylinders([start]);
    if !start_set.is_subset_of(alphabet, &regions.c_set()) || start_set.intersects(&regions.u_set())
    {
        return Err(Error::precondition(format!(
            "start cylinder {start} is not inside C - ∪U"
        )));
    }
    let product = word.evaluate(s_elements)?;
    let mut point = BoundaryPoint::representative(start);
    let mut set = start_set;
    let mut region_sequence = Vec::new();
    let mut set_steps_hold = Vec::new();
    for b in word.blocks.iter().rev() {
        if !b.a.is_identity() {
            point = point.act(&b.a);
            set = set.image(alphabet, &b.a);
            region_sequence.push(regions.classify(&point));
            let expected = regions.region_set(alphabet, Region::OutsideC);
            set_steps_hold.push(set.is_subset_of(alphabet, &expected));
        }
        if let Some(p) = b.s {
            let s = if p.inverse {
                s_elements[p.index].inverse()
            } else {
                s_elements[p.index].clone()
            };
            point = point.act(&s);
            set = set.image(alphabet, &s);
            region_sequence.push(regions.classify(&point));
            let target = if p.inverse {
                Region::Minus(p.index)
            } else {
                Region::Plus(p.index)
            };
            set_steps_hold.push(set.is_subset_of(alphabet, &regions.region_set(alphabet, target)));
        }
    }
    debug_assert_eq!(point, BoundaryPoint::representative(start).act(&product));
    Ok(PinballTrace {
        word: word.clone(),
        product,
        start: start.clone(),
        final_region: *region_sequence.last().expect("non-trivial word"),
        region_sequence,
        set_steps_hold,
        predicted: word.predicted_region(),
    })
}

/// Non-trivial members of `H` of length at most `length_bound` carrying
/// `C` onto itself somewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperDiscontinuity {
    pub elements: Vec<Word>,
    pub length_bound: usize,
    /// Bound past which the list no longer grows.
    pub threshold: usize,
}

pub fn discontinuity_threshold(h: &CoreGraph, c: &[Cylinder]) -> usize {
    let max_stem = c.iter().map(|x| x.stem().len()).max().unwrap_or(0);
    2 * max_stem + 2 * h.vertex_count()
}

pub fn proper_discontinuity_set(
    h: &CoreGraph,
    c: &[Cylinder],
    length_bound: usize,
) -> Result<ProperDiscontinuity> {
    let alphabet = h.alphabet();
    for x in c {
        alphabet.check(x.stem())?;
        if h.stem_meets_limit_set(x.stem()) {
            return Err(Error::precondition(format!(
                "cylinder {x} meets the limit set"
            )));
        }
    }
    let set = CylinderSet::from_cylinders(c);
    let elements = h
        .elements_up_to(length_bound)
        .into_iter()
        .filter(|w| !w.is_identity() && set.image(alphabet, w).intersects(&set))
        .collect();
    Ok(ProperDiscontinuity {
        elements,
        length_bound,
        threshold: discontinuity_threshold(h, c),
    })
}

/// The subgroup generated by the `s_i = y_i g_i y_i` and a basis of `A`,
/// with a cover of its limit set by the regions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BCertificate {
    pub s_elements: Vec<Word>,
    pub a_basis: Vec<Word>,
    pub generators: Vec<Word>,
    pub graph: CoreGraph,
    /// Depth at which the limit set stems were classified.
    pub depth: usize,
    pub stems_in_pairs: usize,
    pub stems_outside_c: usize,
    pub proper: bool,
}

/// Counts of limit-set stems of `graph` at `depth` inside a pair cylinder,
/// outside `C`, and neither.
pub(crate) fn classify_limit_stems(
    graph: &CoreGraph,
    regions: &PinballRegions,
    depth: usize,
) -> (usize, usize, usize) {
    let u = regions.u_set();
    let c = regions.c_set();
    let (mut inside, mut outside, mut bad) = (0, 0, 0);
    for s in graph.limit_set(depth).stems.iter().filter(|s| s.len() == depth) {
        if u.stems().iter().any(|x| x.is_prefix_of(s)) {
            inside += 1;
        } else if !c.stems().iter().any(|x| x.is_prefix_of(s) || s.is_prefix_of(x)) {
            outside += 1;
        } else {
            bad += 1;
        }
    }
    (inside, outside, bad)
}

pub fn build_b(
    alphabet: Alphabet,
    h: &CoreGraph,
    a: &CoreGraph,
    ambient_gens: &[Word],
    regions: &PinballRegions,
    y: &[Word],
) -> Result<BCertificate> {
    if !a.is_trivial() {
        relative_index(h, a)?;
    }
    regions.validate()?;
    if y.len() != ambient_gens.len() || y.len() != regions.pairs.len() {
        return Err(Error::invalid(format!(
            "need one y and one pair per generator: {} generators, {} y, {} pairs",
            ambient_gens.len(),
            y.len(),
            regions.pairs.len()
        )));
    }
    let mut s_elements = Vec::with_capacity(y.len());
    for (i, ((yi, gi), pair)) in y.iter().zip(ambient_gens).zip(&regions.pairs).enumerate() {
        let s = yi.mul(gi).mul(yi);
        if s.is_identity() || !plays_ping_pong(alphabet, &s, pair)? {
            return Err(Error::precondition(format!(
                "s_{} = y g y does not play ping-pong on its pair",
                i + 1
            )));
        }
        s_elements.push(s);
    }
    let a_basis = a.basis();
    let generators: Vec<Word> = s_elements.iter().chain(&a_basis).cloned().collect();
    let graph = CoreGraph::fold(alphabet, &generators)?;
    let depth = regions.max_stem_len().max(1);
    let (stems_in_pairs, stems_outside_c, bad) = classify_limit_stems(&graph, regions, depth);
    if bad > 0 {
        return Err(Error::precondition(format!(
            "{bad} limit set stems of B lie in C outside the pairs"
        )));
    }
    Ok(BCertificate {
        s_elements,
        a_basis,
        generators,
        proper: graph.is_proper_limit_set(),
        graph,
        depth,
        stems_in_pairs,
        stems_outside_c,
    })
}

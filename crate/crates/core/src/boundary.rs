//! The boundary of a free group as the space of infinite reduced words.
//!
//! Only eventually periodic points are represented, and open sets are finite
//! unions of cylinders, so every containment and disjointness question here
//! is a finite prefix computation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stallings::CoreGraph;
use crate::word::{Alphabet, Letter, Word};

/// An eventually periodic boundary point `prefix · period^∞` in canonical form:
/// the period is cyclically reduced and primitive, the infinite word is
/// reduced, and the prefix is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    prefix: Word,
    period: Word,
}

impl BoundaryPoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        let split = period
            .cyclic_decompose()
            .map_err(|_| Error::invalid("boundary point period must be non-trivial"))?;
        let mut pre = prefix.mul(&split.conjugator).letters().to_vec();
        let mut per = split.core.letters().to_vec();
        while pre.last().is_some_and(|l| *l == per[0].inverse()) {
            pre.pop();
            per.rotate_left(1);
        }
        while pre.last().is_some_and(|l| l == per.last().unwrap()) {
            pre.pop();
            per.rotate_right(1);
        }
        let period = Word::from_reduced_unchecked(per).primitive_root();
        Ok(BoundaryPoint {
            prefix: Word::from_reduced_unchecked(pre),
            period,
        })
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        let p = self.prefix.letters();
        if i < p.len() {
            p[i]
        } else {
            let q = self.period.letters();
            q[(i - p.len()) % q.len()]
        }
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Word {
        Word::from_reduced_unchecked((0..n).map(|i| self.letter_at(i)).collect())
    }

    /// `g · self`.
    pub fn act(&self, g: &Word) -> BoundaryPoint {
        BoundaryPoint::new(g.mul(&self.prefix), self.period.clone())
            .expect("period stays non-trivial")
    }

    /// A representative point of a cylinder: the stem followed by its last
    /// letter repeated forever.
    pub fn representative(cylinder: &Cylinder) -> BoundaryPoint {
        let last = cylinder.stem().last().expect("cylinder stems are non-empty");
        BoundaryPoint::new(cylinder.stem().clone(), Word::from_letter(last))
            .expect("single-letter period")
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_identity() {
            write!(f, "{}", self.prefix)?;
        }
        write!(f, "({})", self.period)
    }
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryPoint({self})")
    }
}

impl FromStr for BoundaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::invalid(format!("boundary point {s:?} lacks '(period)'")))?;
        if !s.ends_with(')') {
            return Err(Error::invalid(format!("boundary point {s:?} must end with ')'")));
        }
        let prefix = Word::parse_any(&s[..open])?;
        let period = Word::parse_any(&s[open + 1..s.len() - 1])?;
        BoundaryPoint::new(prefix, period)
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// The basic open set of infinite reduced words beginning with `stem`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    stem: Word,
}

impl Cylinder {
    pub fn new(stem: Word) -> Result<Self> {
        if stem.is_identity() {
            return Err(Error::invalid("cylinder stem must be non-empty"));
        }
        Ok(Cylinder { stem })
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        Cylinder::new(Word::parse(text, alphabet)?)
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn contains_point(&self, p: &BoundaryPoint) -> bool {
        p.take(self.stem.len()) == self.stem
    }

    pub fn contains(&self, other: &Cylinder) -> bool {
        self.stem.is_prefix_of(&other.stem)
    }

    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.stem.is_prefix_of(&other.stem) && !other.stem.is_prefix_of(&self.stem)
    }

    /// Contained in `other` with at least one extra letter of margin.
    pub fn strictly_inside(&self, other: &Cylinder) -> bool {
        other.contains(self) && self.stem.len() > other.stem.len()
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.stem)
    }
}

impl fmt::Debug for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({})", self.stem)
    }
}

impl Serialize for Cylinder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.stem)
    }
}

impl<'de> Deserialize<'de> for Cylinder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let stem = Word::deserialize(d)?;
        Cylinder::new(stem).map_err(serde::de::Error::custom)
    }
}

/// Reduced one-letter extensions of a stem.
pub fn children(alphabet: Alphabet, stem: &Word) -> impl Iterator<Item = Word> + '_ {
    alphabet
        .letters()
        .filter(move |l| stem.last() != Some(l.inverse()))
        .map(move |l| {
            let mut v = stem.letters().to_vec();
            v.push(l);
            Word::from_reduced_unchecked(v)
        })
}

/// A finite union of cylinders, kept sorted with no stem extending another.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CylinderSet {
    stems: Vec<Word>,
}

impl CylinderSet {
    pub fn empty() -> Self {
        CylinderSet::default()
    }

    pub fn from_stems(stems: impl IntoIterator<Item = Word>) -> Self {
        let mut stems: Vec<Word> = stems.into_iter().filter(|s| !s.is_identity()).collect();
        stems.sort();
        stems.dedup();
        let mut kept: Vec<Word> = Vec::with_capacity(stems.len());
        for s in stems {
            if !kept.iter().any(|k| k.is_prefix_of(&s)) {
                kept.push(s);
            }
        }
        CylinderSet { stems: kept }
    }

    pub fn from_cylinders<'a>(cs: impl IntoIterator<Item = &'a Cylinder>) -> Self {
        CylinderSet::from_stems(cs.into_iter().map(|c| c.stem.clone()))
    }

    pub fn stems(&self) -> &[Word] {
        &self.stems
    }

    pub fn cylinders(&self) -> Vec<Cylinder> {
        self.stems
            .iter()
            .map(|s| Cylinder { stem: s.clone() })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        CylinderSet::from_stems(self.stems.iter().chain(&other.stems).cloned())
    }

    pub fn contains_point(&self, p: &BoundaryPoint) -> bool {
        self.stems.iter().any(|s| p.take(s.len()) == *s)
    }

    fn has_prefix_of(&self, t: &Word) -> bool {
        self.stems.iter().any(|s| s.is_prefix_of(t))
    }

    fn has_extension_of(&self, t: &Word) -> bool {
        self.stems.iter().any(|s| t.is_prefix_of(s))
    }

    /// Whether the cylinder `C(t)` lies inside this union.
    pub fn covers(&self, alphabet: Alphabet, t: &Word) -> bool {
        if self.has_prefix_of(t) {
            return true;
        }
        if !self.has_extension_of(t) {
            return false;
        }
        children(alphabet, t).all(|c| self.covers(alphabet, &c))
    }

    pub fn is_subset_of(&self, alphabet: Alphabet, other: &CylinderSet) -> bool {
        self.stems.iter().all(|t| other.covers(alphabet, t))
    }

    pub fn intersects(&self, other: &CylinderSet) -> bool {
        self.stems.iter().any(|s| {
            other
                .stems
                .iter()
                .any(|t| s.is_prefix_of(t) || t.is_prefix_of(s))
        })
    }

    pub fn complement(&self, alphabet: Alphabet) -> CylinderSet {
        let mut out = Vec::new();
        let mut stack: Vec<Word> = children(alphabet, &Word::identity()).collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            if self.has_prefix_of(&t) {
                continue;
            }
            if !self.has_extension_of(&t) {
                out.push(t);
                continue;
            }
            let mut kids: Vec<Word> = children(alphabet, &t).collect();
            kids.reverse();
            stack.extend(kids);
        }
        CylinderSet::from_stems(out)
    }

    /// The image `g · self`.
    pub fn image(&self, alphabet: Alphabet, g: &Word) -> CylinderSet {
        let mut out = CylinderSet::empty();
        for s in &self.stems {
            out = out.union(&cylinder_image(alphabet, g, s));
        }
        out
    }
}

/// `g · C(s)`: a cylinder when some of `s` survives cancellation, otherwise
/// the complement of `C(g · s')` where `s'` drops the last letter of `s`.
pub fn cylinder_image(alphabet: Alphabet, g: &Word, s: &Word) -> CylinderSet {
    if g.cancellation_with(s) < s.len() {
        CylinderSet::from_stems([g.mul(s)])
    } else {
        let shorter = g.mul(&s.prefix(s.len() - 1));
        CylinderSet::from_stems([shorter]).complement(alphabet)
    }
}

/// Neighbourhoods `(U+, U-)` of the attracting and repelling fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbsorbingPair {
    pub plus: Cylinder,
    pub minus: Cylinder,
}

impl AbsorbingPair {
    pub fn new(plus: Cylinder, minus: Cylinder) -> Result<Self> {
        if !plus.is_disjoint(&minus) {
            return Err(Error::precondition(format!(
                "pair cylinders {plus} and {minus} are not disjoint"
            )));
        }
        Ok(AbsorbingPair { plus, minus })
    }

    pub fn union(&self) -> CylinderSet {
        CylinderSet::from_cylinders([&self.plus, &self.minus])
    }

    pub fn cylinders(&self) -> [&Cylinder; 2] {
        [&self.plus, &self.minus]
    }
}

/// `(∂g+, ∂g-) = (w·c^∞, w·(c^-1)^∞)` for `g = w c w^-1`.
pub fn fixed_points(g: &Word) -> Result<(BoundaryPoint, BoundaryPoint)> {
    let d = g.cyclic_decompose()?;
    let plus = BoundaryPoint::new(d.conjugator.clone(), d.core.clone())?;
    let minus = BoundaryPoint::new(d.conjugator, d.core.inverse())?;
    Ok((plus, minus))
}

pub fn act(g: &Word, p: &BoundaryPoint) -> BoundaryPoint {
    p.act(g)
}

fn ensure_pair_valid(g: &Word, pair: &AbsorbingPair) -> Result<()> {
    if g.is_identity() {
        return Err(Error::NoAxis);
    }
    if !pair.plus.is_disjoint(&pair.minus) {
        return Err(Error::precondition("absorbing pair cylinders overlap"));
    }
    Ok(())
}

/// Whether `g^r` sends every point outside `plus ∪ minus` into `plus` and
/// `g^-r` sends it into `minus`.
///
/// The outside region is the finite set of reduced stems of length at most
/// `max(|plus|, |minus|)` that avoid both cylinders; the image of each such
/// cylinder is computed exactly.
pub fn check_absorbing(
    alphabet: Alphabet,
    g: &Word,
    pair: &AbsorbingPair,
    r: u32,
) -> Result<bool> {
    ensure_pair_valid(g, pair)?;
    if r == 0 {
        return Err(Error::invalid("power must be positive"));
    }
    let h = g.pow(i64::from(r));
    let outside = pair.union().complement(alphabet);
    let plus = CylinderSet::from_cylinders([&pair.plus]);
    let minus = CylinderSet::from_cylinders([&pair.minus]);
    Ok(outside.image(alphabet, &h).is_subset_of(alphabet, &plus)
        && outside
            .image(alphabet, &h.inverse())
            .is_subset_of(alphabet, &minus))
}

/// The ping-pong condition `g(∂ - U-) ⊆ U+` and `g^-1(∂ - U+) ⊆ U-`.
///
/// It implies absorbing at power 1 and that the pair is carried into itself
/// by every non-zero power of `g`.
pub fn plays_ping_pong(alphabet: Alphabet, g: &Word, pair: &AbsorbingPair) -> Result<bool> {
    ensure_pair_valid(g, pair)?;
    let plus = CylinderSet::from_cylinders([&pair.plus]);
    let minus = CylinderSet::from_cylinders([&pair.minus]);
    Ok(minus
        .complement(alphabet)
        .image(alphabet, g)
        .is_subset_of(alphabet, &plus)
        && plus
            .complement(alphabet)
            .image(alphabet, &g.inverse())
            .is_subset_of(alphabet, &minus))
}

/// Minimal `r <= max_r` for which `pair` is absorbing for `g^r`.
pub fn absorbing_power(
    alphabet: Alphabet,
    g: &Word,
    pair: &AbsorbingPair,
    max_r: u32,
) -> Result<u32> {
    let (plus_pt, minus_pt) = fixed_points(g)?;
    if !pair.plus.contains_point(&plus_pt) {
        return Err(Error::precondition(format!(
            "attracting fixed point {plus_pt} lies outside {}",
            pair.plus
        )));
    }
    if !pair.minus.contains_point(&minus_pt) {
        return Err(Error::precondition(format!(
            "repelling fixed point {minus_pt} lies outside {}",
            pair.minus
        )));
    }
    for r in 1..=max_r {
        if check_absorbing(alphabet, g, pair, r)? {
            return Ok(r);
        }
    }
    Err(Error::bounded("absorbing power", max_r as usize))
}

/// A verified ping-pong certificate: the elements freely generate a free
/// group of rank `elements.len()` with limit set inside the closure of the
/// union of the pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchottkySystem {
    pub elements: Vec<Word>,
    pub pairs: Vec<AbsorbingPair>,
    /// First cylinder (shortlex) missing every pair, when one exists.
    pub basepoint_witness: Option<Cylinder>,
}

impl SchottkySystem {
    pub fn cylinders(&self) -> Vec<&Cylinder> {
        self.pairs.iter().flat_map(|p| p.cylinders()).collect()
    }

    pub fn region(&self) -> CylinderSet {
        CylinderSet::from_cylinders(self.cylinders())
    }
}

pub fn schottky_certify(
    alphabet: Alphabet,
    elements: &[Word],
    pairs: &[AbsorbingPair],
) -> Result<SchottkySystem> {
    if elements.is_empty() || elements.len() != pairs.len() {
        return Err(Error::invalid(format!(
            "need matching non-empty lists, got {} elements and {} pairs",
            elements.len(),
            pairs.len()
        )));
    }
    for e in elements {
        alphabet.check(e)?;
    }
    let cyls: Vec<&Cylinder> = pairs.iter().flat_map(|p| p.cylinders()).collect();
    for i in 0..cyls.len() {
        for j in i + 1..cyls.len() {
            if !cyls[i].is_disjoint(cyls[j]) {
                return Err(Error::precondition(format!(
                    "cylinders {} and {} overlap",
                    cyls[i], cyls[j]
                )));
            }
        }
    }
    for (i, (g, pair)) in elements.iter().zip(pairs).enumerate() {
        if !check_absorbing(alphabet, g, pair, 1)? {
            return Err(Error::precondition(format!(
                "pair {i} is not absorbing for {g} at power 1"
            )));
        }
        if !plays_ping_pong(alphabet, g, pair)? {
            return Err(Error::precondition(format!(
                "{g} does not carry the complement of {} into {}",
                pair.minus, pair.plus
            )));
        }
    }
    let outside = CylinderSet::from_cylinders(cyls.iter().copied()).complement(alphabet);
    Ok(SchottkySystem {
        elements: elements.to_vec(),
        pairs: pairs.to_vec(),
        basepoint_witness: outside.cylinders().into_iter().next(),
    })
}

/// Constraints for choosing cylinder neighbourhoods of a pair of fixed points.
#[derive(Clone, Copy, Default)]
pub(crate) struct PairConstraints<'a> {
    pub forbidden: &'a [Cylinder],
    /// Each cylinder must sit strictly inside one of these.
    pub container: Option<&'a [Cylinder]>,
    /// `g^{±1} U ∩ U = ∅` for `U = U+ ∪ U-`.
    pub mover: Option<&'a Word>,
    /// Cylinders must miss the limit set of this subgroup.
    pub off_limit_set: Option<&'a CoreGraph>,
    /// Points neither cylinder may contain.
    pub avoid_points: &'a [BoundaryPoint],
    pub min_depth: usize,
    pub max_depth: usize,
}

/// Shallowest pair of cylinders around `(plus, minus)` meeting the constraints.
pub(crate) fn choose_pair(
    alphabet: Alphabet,
    plus: &BoundaryPoint,
    minus: &BoundaryPoint,
    c: PairConstraints<'_>,
) -> Option<AbsorbingPair> {
    'depth: for d in c.min_depth.max(1)..=c.max_depth {
        let up = Cylinder { stem: plus.take(d) };
        let um = Cylinder { stem: minus.take(d) };
        if !up.is_disjoint(&um) {
            continue;
        }
        for u in [&up, &um] {
            if c.forbidden.iter().any(|f| !f.is_disjoint(u))
                || c.avoid_points.iter().any(|p| u.contains_point(p))
            {
                continue 'depth;
            }
            if let Some(container) = c.container {
                if !container.iter().any(|k| u.strictly_inside(k)) {
                    continue 'depth;
                }
            }
            if let Some(graph) = c.off_limit_set {
                if graph.stem_meets_limit_set(u.stem()) {
                    continue 'depth;
                }
            }
        }
        let pair = AbsorbingPair {
            plus: up,
            minus: um,
        };
        if let Some(g) = c.mover.filter(|g| !g.is_identity()) {
            let u = pair.union();
            if u.image(alphabet, g).intersects(&u) || u.image(alphabet, &g.inverse()).intersects(&u)
            {
                continue;
            }
        }
        return Some(pair);
    }
    None
}

/// Smallest `r <= max_power` such that `pair` plays ping-pong for
/// `y^r g y^r`.
pub(crate) fn sandwich_power(
    alphabet: Alphabet,
    y: &Word,
    g: &Word,
    pair: &AbsorbingPair,
    max_power: u32,
) -> Result<Option<u32>> {
    for r in 1..=max_power {
        let x = y.pow(i64::from(r));
        let s = x.mul(g).mul(&x);
        if !s.is_identity() && plays_ping_pong(alphabet, &s, pair)? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Output of the free-subgroup construction around a full-limit-set subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorFreeGens {
    pub generators: Vec<Word>,
    /// The chosen `y_i`, before raising to powers.
    pub elements: Vec<Word>,
    pub powers: Vec<u32>,
    /// `x_i = y_i^{r_i}`.
    pub conjugators: Vec<Word>,
    /// `x_i g_i x_i`.
    pub new_generators: Vec<Word>,
    pub system: SchottkySystem,
    pub avoided_region: Cylinder,
}

#[derive(Clone, Copy, Debug)]
pub struct TorFreeGensOptions {
    pub max_power: u32,
    /// Longest element of `N` tried as a `y_i`.
    pub max_candidate_len: usize,
    pub max_pair_depth: usize,
    /// Rotates the search order within each length class.
    pub seed: u64,
}

impl Default for TorFreeGensOptions {
    fn default() -> Self {
        TorFreeGensOptions {
            max_power: 16,
            max_candidate_len: 12,
            max_pair_depth: 64,
            seed: 0,
        }
    }
}

/// Picks `x_i ∈ N` so that the `x_i g_i x_i` freely generate a subgroup
/// whose limit set misses `avoid`.
pub fn torfreegens(
    alphabet: Alphabet,
    generators: &[Word],
    n: &CoreGraph,
    avoid: &Cylinder,
    opts: TorFreeGensOptions,
) -> Result<TorFreeGens> {
    if alphabet.rank() < 2 {
        return Err(Error::hypothesis(
            "the free group of rank 1 is elementary: its boundary is two points",
        ));
    }
    if n.rank() != alphabet.rank() {
        return Err(Error::AlphabetMismatch(format!(
            "subgroup graph has rank {}, alphabet has rank {}",
            n.rank(),
            alphabet.rank()
        )));
    }
    for g in generators {
        alphabet.check(g)?;
    }
    alphabet.check(avoid.stem())?;
    if n.is_proper_limit_set() {
        return Err(Error::hypothesis(
            "N has a proper limit set (infinite index), so its fixed points are not dense",
        ));
    }
    let generator_fixed: Vec<BoundaryPoint> = generators
        .iter()
        .filter(|g| !g.is_identity())
        .flat_map(|g| {
            let (p, m) = fixed_points(g).expect("non-identity");
            [p, m]
        })
        .collect();

    let mut pairs: Vec<AbsorbingPair> = Vec::new();
    let mut forbidden: Vec<Cylinder> = vec![avoid.clone()];
    let mut elements = Vec::new();
    let mut powers = Vec::new();
    let mut conjugators = Vec::new();
    let mut new_generators = Vec::new();

    for g in generators {
        let mut chosen = None;
        'len: for len in 1..=opts.max_candidate_len {
            for y in n.closed_words_rotated(len, opts.seed) {
                let (p, m) = fixed_points(&y)?;
                if forbidden
                    .iter()
                    .any(|f| f.contains_point(&p) || f.contains_point(&m))
                {
                    continue;
                }
                if generator_fixed.iter().any(|q| *q == p || *q == m) {
                    continue;
                }
                let constraints = PairConstraints {
                    forbidden: &forbidden,
                    mover: Some(g),
                    max_depth: opts.max_pair_depth,
                    ..Default::default()
                };
                let Some(pair) = choose_pair(alphabet, &p, &m, constraints) else {
                    continue;
                };
                match sandwich_power(alphabet, &y, g, &pair, opts.max_power)? {
                    Some(r) => {
                        chosen = Some((y, pair, r));
                        break 'len;
                    }
                    None => {
                        return Err(Error::bounded(
                            format!("power search for y = {y} around generator {g}"),
                            opts.max_power as usize,
                        ))
                    }
                }
            }
        }
        let Some((y, pair, r)) = chosen else {
            return Err(Error::bounded(
                format!("element of N with suitable fixed points for generator {g}"),
                opts.max_candidate_len,
            ));
        };
        let x = y.pow(i64::from(r));
        debug_assert!(n.contains(&x));
        new_generators.push(x.mul(g).mul(&x));
        forbidden.push(pair.plus.clone());
        forbidden.push(pair.minus.clone());
        pairs.push(pair);
        elements.push(y);
        powers.push(r);
        conjugators.push(x);
    }
    let system = if new_generators.is_empty() {
        SchottkySystem {
            elements: Vec::new(),
            pairs: Vec::new(),
            basepoint_witness: Some(avoid.clone()),
        }
    } else {
        schottky_certify(alphabet, &new_generators, &pairs)?
    };
    Ok(TorFreeGens {
        generators: generators.to_vec(),
        elements,
        powers,
        conjugators,
        new_generators,
        system,
        avoided_region: avoid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse_any(s).unwrap()
    }

    fn cyl(s: &str) -> Cylinder {
        Cylinder::new(w(s)).unwrap()
    }

    fn pair(p: &str, m: &str) -> AbsorbingPair {
        AbsorbingPair::new(cyl(p), cyl(m)).unwrap()
    }

    fn rank2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn pt(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    #[test]
    fn fixed_point_examples() {
        let (p, m) = fixed_points(&w("ab")).unwrap();
        assert_eq!((p.to_string(), m.to_string()), ("(ab)".into(), "(BA)".into()));
        let (p, m) = fixed_points(&w("abA")).unwrap();
        assert_eq!((p.to_string(), m.to_string()), ("a(b)".into(), "a(B)".into()));
        assert_eq!(fixed_points(&Word::identity()), Err(Error::NoAxis));
    }

    #[test]
    fn act_examples() {
        assert_eq!(act(&w("a"), &pt("(b)")), pt("a(b)"));
        assert_eq!(act(&w("A"), &pt("a(b)")), pt("(b)"));
        let (p, _) = fixed_points(&w("ab")).unwrap();
        assert_eq!(act(&w("ab"), &p), p);
    }

    #[test]
    fn canonical_form() {
        // b·(ab)^∞ = (ba)^∞
        assert_eq!(pt("b(ab)"), pt("(ba)"));
        assert_eq!(pt("(abab)"), pt("(ab)"));
        // A·(ab)^∞ cancels into (ba)^∞
        assert_eq!(pt("A(ab)"), pt("(ba)"));
        assert_eq!(pt("ab(abA)").to_string(), "aba(b)");
    }

    #[test]
    fn cylinder_images() {
        let a = rank2();
        assert_eq!(cylinder_image(a, &w("a"), &w("b")).stems(), &[w("ab")]);
        // A·C(a) is everything except C(A).
        let img = cylinder_image(a, &w("A"), &w("a"));
        assert_eq!(img, CylinderSet::from_stems([w("A")]).complement(a));
        assert_eq!(img.stems(), &[w("a"), w("b"), w("B")]);
    }

    #[test]
    fn complement_covers_everything_once() {
        let a = rank2();
        let s = CylinderSet::from_stems([w("ab"), w("BA")]);
        let c = s.complement(a);
        assert!(!c.intersects(&s));
        let all = CylinderSet::from_stems(a.letters().map(Word::from_letter));
        assert!(all.is_subset_of(a, &c.union(&s)));
    }

    #[test]
    fn absorbing_examples() {
        let a = rank2();
        let p = pair("ab", "BA");
        assert!(check_absorbing(a, &w("ab"), &p, 2).unwrap());
        assert!(!check_absorbing(a, &w("ab"), &p, 1).unwrap());
        assert!(!check_absorbing(a, &w("a"), &pair("b", "B"), 3).unwrap());
        assert_eq!(absorbing_power(a, &w("ab"), &p, 16), Ok(2));
        assert_eq!(absorbing_power(a, &w("a"), &pair("a", "A"), 16), Ok(1));
        assert!(matches!(
            absorbing_power(a, &w("ab"), &pair("ba", "AB"), 16),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn schottky_examples() {
        let a = rank2();
        let sys = schottky_certify(
            a,
            &[w("aa"), w("bb")],
            &[pair("a", "A"), pair("b", "B")],
        )
        .unwrap();
        assert_eq!(sys.basepoint_witness, None);
        assert!(AbsorbingPair::new(cyl("ab"), cyl("ab")).is_err());
        let bad = AbsorbingPair {
            plus: cyl("ab"),
            minus: cyl("ab"),
        };
        assert!(matches!(
            schottky_certify(a, &[w("ab")], &[bad]),
            Err(Error::Precondition(_))
        ));
        let err = schottky_certify(a, &[w("a"), w("Aba")], &[pair("a", "A"), pair("Ab", "AB")])
            .unwrap_err();
        assert!(err.to_string().contains("A and Ab"), "{err}");
    }
}

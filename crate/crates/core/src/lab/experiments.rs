//! Executable replays of the residual-finiteness and almost-separability
//! arguments, each producing a certificate that can be re-checked without
//! searching.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::pinball::{
    build_b, discontinuity_threshold, pinball_trace, proper_discontinuity_set, AlternatingWord,
    BCertificate, PinballRegions, PinballTrace,
};
use crate::boundary::{
    absorbing_power, choose_pair, fixed_points, sandwich_power, schottky_certify, torfreegens,
    AbsorbingPair, BoundaryPoint, Cylinder, PairConstraints, TorFreeGens, TorFreeGensOptions,
};
use crate::error::{Error, Result};
use crate::finite_index::{
    ball, engulf, hall_witness, low_index, power_lemma_check, relative_index, CosetTable,
    PowerLemmaReport, Presentation,
};
use crate::report::{Certificate, Check, Report};
use crate::stallings::CoreGraph;
use crate::word::{Alphabet, Letter, Word};

/// A proper finite-index subgroup containing a given subgroup, and how it
/// was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngulfingWitness {
    pub table: CosetTable,
    /// `low_index` when found by the bounded engulfing search, otherwise
    /// `hall_completion` (excluding `excluded`).
    pub source: String,
    pub searched_to: usize,
    pub excluded: Option<Word>,
}

/// Engulfing search with a Hall-completion fallback for subgroups of
/// infinite index that no subgroup of index at most `max_index` contains.
pub fn engulfing_witness(
    alphabet: Alphabet,
    graph: &CoreGraph,
    max_index: usize,
) -> Result<EngulfingWitness> {
    let gens = graph.basis();
    let found = engulf(&Presentation::free(alphabet), &gens, max_index)?;
    if let Some(table) = found.witness {
        return Ok(EngulfingWitness {
            table,
            source: "low_index".into(),
            searched_to: max_index,
            excluded: None,
        });
    }
    let excluded = first_non_member(alphabet, graph)
        .ok_or_else(|| Error::precondition("subgroup is the whole group, so nothing engulfs it"))?;
    Ok(EngulfingWitness {
        table: hall_witness(graph, &excluded)?,
        source: "hall_completion".into(),
        searched_to: max_index,
        excluded: Some(excluded),
    })
}

fn first_non_member(alphabet: Alphabet, graph: &CoreGraph) -> Option<Word> {
    if graph.index() == Some(1) {
        return None;
    }
    (1..)
        .flat_map(|n| crate::word::reduced_words_of_length(alphabet, n))
        .find(|w| !graph.contains(w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResfinCertificate {
    pub rank: usize,
    pub generators: Vec<Word>,
    pub n_graph: CoreGraph,
    pub avoid: Cylinder,
    pub torfree: TorFreeGens,
    pub h_graph: CoreGraph,
    pub engulfing: EngulfingWitness,
    pub join_index: Option<usize>,
}

impl ResfinCertificate {
    pub fn checks(&self) -> Result<Vec<Check>> {
        let alphabet = Alphabet::new(self.rank)?;
        let tf = &self.torfree;
        let in_n = tf.conjugators.iter().all(|x| self.n_graph.contains(x));
        let products_ok = tf
            .conjugators
            .iter()
            .zip(&self.generators)
            .zip(&tf.new_generators)
            .all(|((x, g), s)| x.mul(g).mul(x) == *s);
        let schottky = if tf.new_generators.is_empty() {
            Ok(())
        } else {
            schottky_certify(alphabet, &tf.new_generators, &tf.system.pairs).map(|_| ())
        };
        let pairs_avoid = tf
            .system
            .pairs
            .iter()
            .flat_map(|p| p.cylinders())
            .all(|c| c.is_disjoint(&self.avoid));
        let h = CoreGraph::fold(alphabet, &tf.new_generators)?;
        let proper = h == self.h_graph && h.is_proper_limit_set();
        let misses_avoid = !h.stem_meets_limit_set(self.avoid.stem());
        let l = &self.engulfing.table;
        let engulfs = l.size() >= 2 && tf.new_generators.iter().all(|s| l.stabilizes(s));
        let join_gens: Vec<Word> = h.basis().into_iter().chain(self.n_graph.basis()).collect();
        let join = CoreGraph::fold(alphabet, &join_gens)?.index();
        Ok(vec![
            Check::new("x_in_n", in_n, format!("{} conjugators checked by core-graph membership", tf.conjugators.len())),
            Check::new("products", products_ok, "each new generator equals x g x"),
            Check::new(
                "schottky_system",
                schottky.is_ok() && pairs_avoid,
                match &schottky {
                    Ok(()) => format!("{} disjoint absorbing pairs, all missing {}", tf.system.pairs.len(), self.avoid),
                    Err(e) => e.to_string(),
                },
            ),
            Check::new(
                "proper_limit_set",
                proper && misses_avoid,
                format!("H has {} vertices; limit set misses {}: {misses_avoid}", h.vertex_count(), self.avoid),
            ),
            Check::new(
                "engulfing_witness",
                engulfs,
                format!("index {} subgroup via {}", l.size(), self.engulfing.source),
            ),
            Check::new(
                "join_whole_group",
                join == Some(1) && self.join_index == join,
                format!("<H, N> has index {join:?}"),
            ),
        ])
    }
}

pub fn resfin_experiment(
    alphabet: Alphabet,
    generators: &[Word],
    n: &CoreGraph,
    max_index: usize,
    seed: u64,
) -> Result<Report> {
    let avoid_stem = Word::from_letter(Letter::generator(alphabet.rank()));
    let avoid = Cylinder::new(avoid_stem)?;
    let opts = TorFreeGensOptions {
        seed,
        ..Default::default()
    };
    let torfree = torfreegens(alphabet, generators, n, &avoid, opts)?;
    let h_graph = CoreGraph::fold(alphabet, &torfree.new_generators)?;
    let engulfing = engulfing_witness(alphabet, &h_graph, max_index)?;
    let join_gens: Vec<Word> = h_graph.basis().into_iter().chain(n.basis()).collect();
    let join_index = CoreGraph::fold(alphabet, &join_gens)?.index();
    let cert = ResfinCertificate {
        rank: alphabet.rank(),
        generators: generators.to_vec(),
        n_graph: n.clone(),
        avoid,
        torfree,
        h_graph,
        engulfing,
        join_index,
    };
    Report::new(
        "resfin",
        seed,
        "N is taken of finite index: a finitely generated subgroup of a free group with full limit set has finite index, so the residual-core hypothesis cannot be realised literally; every other step of the argument is replayed",
        json!({
            "rank": alphabet.rank(),
            "generators": generators,
            "n": n,
            "max_index": max_index,
        }),
        Certificate::Resfin(Box::new(cert)),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallEntry {
    pub excluded: Word,
    pub witness: CosetTable,
}

/// The replay of the argument pushing the limit set of a conjugate of `H`
/// into a region `C` and building the subgroup `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Machinery {
    pub k: Word,
    pub k_pair: AbsorbingPair,
    pub r: u32,
    pub c: Vec<Cylinder>,
    /// Conjugator `k^{r+j}` used for each `y_i`.
    pub conjugators: Vec<Word>,
    pub y: Vec<Word>,
    pub t: usize,
    pub a_basis: Vec<Word>,
    pub discontinuity: Vec<Word>,
    pub discontinuity_bound: usize,
    pub powers: Vec<u32>,
    pub y_final: Vec<Word>,
    pub regions: PinballRegions,
    pub b: BCertificate,
    pub k_witness: EngulfingWitness,
    pub join_index: Option<usize>,
    pub traces: Vec<PinballTrace>,
    pub power_lemma: PowerLemmaReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgpsepCertificate {
    pub rank: usize,
    pub h_generators: Vec<Word>,
    pub h_graph: CoreGraph,
    pub max_index: usize,
    pub depth: usize,
    /// `Λ(H) = ∂G`: the statement is immediate.
    pub full_limit_set: bool,
    /// Every subgroup of index at most `max_index` containing `H`.
    pub closure_tables: Vec<CosetTable>,
    /// Words of the ball lying in every such subgroup but not in `H`; empty
    /// when the bound already separates `H` on the ball.
    pub closure_excess: Vec<Word>,
    pub hall_witnesses: Vec<HallEntry>,
    pub machinery: Option<Machinery>,
}

pub const POWER_LEMMA_BOUND: usize = 6;

fn closure_excess(h: &CoreGraph, tables: &[CosetTable], ball_words: &[Word]) -> Vec<Word> {
    ball_words
        .iter()
        .filter(|w| !h.contains(w) && tables.iter().all(|t| t.stabilizes(w)))
        .cloned()
        .collect()
}

impl SubgpsepCertificate {
    /// Whether the bounded closure already equals `H` on the ball.
    pub fn closure_equals_h_on_ball(&self) -> bool {
        self.closure_excess.is_empty()
    }

    pub fn checks(&self) -> Result<Vec<Check>> {
        let alphabet = Alphabet::new(self.rank)?;
        let h = CoreGraph::fold(alphabet, &self.h_generators)?;
        let mut checks = vec![Check::new(
            "h_graph",
            h == self.h_graph && h.is_proper_limit_set() != self.full_limit_set,
            format!("H folds to {} vertices; full limit set: {}", h.vertex_count(), self.full_limit_set),
        )];
        let tables_ok = self
            .closure_tables
            .iter()
            .all(|t| t.size() <= self.max_index && h.basis().iter().all(|b| t.stabilizes(b)));
        let ball_words = ball(alphabet, self.depth);
        let excess = closure_excess(&h, &self.closure_tables, &ball_words);
        checks.push(Check::new(
            "closure_on_ball",
            tables_ok && excess == self.closure_excess,
            format!(
                "{} subgroups of index <= {}; {} of {} words of length <= {} lie in all of them but not in H",
                self.closure_tables.len(),
                self.max_index,
                excess.len(),
                ball_words.len(),
                self.depth
            ),
        ));
        let hall_ok = self.hall_witnesses.iter().all(|e| {
            !e.witness.stabilizes(&e.excluded)
                && h.basis().iter().all(|b| e.witness.stabilizes(b))
        });
        let expected: Vec<&Word> = ball_words.iter().filter(|w| !h.contains(w)).collect();
        let covered = expected.len() == self.hall_witnesses.len()
            && expected
                .iter()
                .zip(&self.hall_witnesses)
                .all(|(w, e)| **w == e.excluded);
        checks.push(Check::new(
            "hall_witnesses",
            hall_ok && covered,
            format!(
                "{} non-members separated, largest index {}",
                self.hall_witnesses.len(),
                self.hall_witnesses.iter().map(|e| e.witness.size()).max().unwrap_or(1)
            ),
        ));
        if let Some(m) = &self.machinery {
            checks.extend(m.checks(alphabet, &h, self.h_generators.len().max(1))?);
        }
        Ok(checks)
    }
}

impl Machinery {
    fn checks(&self, alphabet: Alphabet, h: &CoreGraph, _n: usize) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        let gens = alphabet.generators();
        // k pushes Λ(H) into U+.
        let (kp, km) = fixed_points(&self.k)?;
        let pair_ok = self.k_pair.plus.contains_point(&kp)
            && self.k_pair.minus.contains_point(&km)
            && self.k_pair.cylinders().iter().all(|c| !h.stem_meets_limit_set(c.stem()));
        let absorbing = absorbing_power(alphabet, &self.k, &self.k_pair, self.r).ok() == Some(self.r);
        let conj = h.conjugate(&self.k.pow(i64::from(self.r)))?;
        let plus_len = self.k_pair.plus.stem().len();
        let pushed = conj
            .limit_set(plus_len)
            .stems
            .iter()
            .filter(|s| s.len() == plus_len)
            .all(|s| s == self.k_pair.plus.stem());
        out.push(Check::new(
            "k_pushes_limit_set",
            pair_ok && absorbing && pushed,
            format!("k = {}, r = {}, limit set of k^r H k^-r inside {}", self.k, self.r, self.k_pair.plus),
        ));
        let c_off = self.c.iter().all(|c| !h.stem_meets_limit_set(c.stem()));
        out.push(Check::new(
            "c_avoids_limit_set",
            c_off && self.regions.c == self.c,
            format!("C = {:?}", self.c.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        ));
        let mut y_ok = self.y.len() == gens.len() && self.conjugators.len() == self.y.len();
        let mut fixed: Vec<BoundaryPoint> = Vec::new();
        for (y, k) in self.y.iter().zip(&self.conjugators) {
            let hk = h.conjugate(k)?;
            let (p, m) = fixed_points(y)?;
            y_ok &= hk.contains(y)
                && self.c.iter().any(|c| c.contains_point(&p))
                && self.c.iter().any(|c| c.contains_point(&m))
                && !fixed.contains(&p);
            fixed.push(p);
            fixed.push(m);
        }
        out.push(Check::new(
            "y_in_conjugates",
            y_ok,
            format!("{} elements with distinct fixed points in C", self.y.len()),
        ));
        let a = CoreGraph::fold(alphabet, &self.a_basis)?;
        let t = relative_index(h, &a);
        let threshold = discontinuity_threshold(h, &self.c);
        let pds = proper_discontinuity_set(h, &self.c, self.discontinuity_bound)?;
        let pds_next = proper_discontinuity_set(h, &self.c, self.discontinuity_bound + 2)?;
        let avoids = pds.elements.iter().all(|x| !a.contains(x));
        out.push(Check::new(
            "a_normal_avoiding_discontinuity",
            t.as_ref().ok() == Some(&self.t)
                && pds.elements == self.discontinuity
                && pds_next.elements == pds.elements
                && self.discontinuity_bound >= threshold
                && avoids,
            format!(
                "A normal of index {} in H; {} elements of H move C onto itself up to length {}",
                self.t,
                self.discontinuity.len(),
                self.discontinuity_bound
            ),
        ));
        let powers_ok = self
            .y
            .iter()
            .zip(&self.powers)
            .zip(&self.y_final)
            .all(|((y, r), f)| y.pow((self.t as i64) * i64::from(*r)) == *f);
        let b = build_b(alphabet, h, &a, &gens, &self.regions, &self.y_final);
        let b_ok = powers_ok && b.as_ref().ok() == Some(&self.b);
        out.push(Check::new(
            "b_limit_set_cover",
            b_ok,
            match &b {
                Ok(b) => format!(
                    "limit set stems at depth {}: {} in pairs, {} outside C",
                    b.depth, b.stems_in_pairs, b.stems_outside_c
                ),
                Err(e) => e.to_string(),
            },
        ));
        out.push(Check::new(
            "b_proper",
            self.b.proper && self.b.graph.is_proper_limit_set(),
            format!("B folds to {} vertices", self.b.graph.vertex_count()),
        ));
        let kt = &self.k_witness.table;
        out.push(Check::new(
            "k_engulfs_b",
            kt.size() >= 2 && self.b.generators.iter().all(|g| kt.stabilizes(g)),
            format!("index {} via {}", kt.size(), self.k_witness.source),
        ));
        let join_gens: Vec<Word> = kt.to_core_graph().basis().into_iter().chain(self.y_final.iter().cloned()).collect();
        let join = CoreGraph::fold(alphabet, &join_gens)?.index();
        out.push(Check::new(
            "join_whole_group",
            join == Some(1) && self.join_index == join,
            "K together with the y_i contains every generator",
        ));
        let start = self
            .regions
            .start_cylinder(alphabet)
            .ok_or_else(|| Error::precondition("C - ∪U is empty"))?;
        let mut mismatches = 0;
        for tr in &self.traces {
            let again = pinball_trace(alphabet, &tr.word, &self.regions, &self.b.s_elements, &start)?;
            if again != *tr || !again.matches() {
                mismatches += 1;
            }
        }
        out.push(Check::new(
            "pinball_traces",
            mismatches == 0 && self.traces.len() >= MIN_TRACES,
            format!("{} traces, {} mismatches", self.traces.len(), mismatches),
        ));
        let pl = power_lemma_check(h, &a, POWER_LEMMA_BOUND)?;
        out.push(Check::new(
            "power_lemma",
            pl.passed() && pl == self.power_lemma,
            format!(
                "h^{} in A for {} elements of H up to length {}",
                pl.t, pl.checked, pl.word_bound
            ),
        ));
        Ok(out)
    }
}

pub const MIN_TRACES: usize = 50;

#[derive(Clone, Copy, Debug)]
pub struct SubgpsepOptions {
    pub max_index: usize,
    pub depth: usize,
    pub seed: u64,
    pub max_power: u32,
    pub traces: usize,
    /// Smallest index of `A` in `H` tried.
    pub min_t: usize,
    pub max_t: usize,
}

impl Default for SubgpsepOptions {
    fn default() -> Self {
        SubgpsepOptions {
            max_index: 4,
            depth: 4,
            seed: 0,
            max_power: 16,
            traces: 64,
            min_t: 2,
            max_t: 4,
        }
    }
}

pub fn subgpsep_experiment(
    alphabet: Alphabet,
    h_gens: &[Word],
    opts: SubgpsepOptions,
) -> Result<Report> {
    let p = Presentation::free(alphabet);
    let h = CoreGraph::fold(alphabet, h_gens)?;
    let full = !h.is_proper_limit_set();
    let closure_tables: Vec<CosetTable> = low_index(&p, opts.max_index)?
        .into_iter()
        .filter(|t| h.basis().iter().all(|b| t.stabilizes(b)))
        .collect();
    let ball_words = ball(alphabet, opts.depth);
    let closure_excess = closure_excess(&h, &closure_tables, &ball_words);
    let mut hall_witnesses = Vec::new();
    for w in ball_words {
        if !h.contains(&w) {
            hall_witnesses.push(HallEntry {
                witness: hall_witness(&h, &w)?,
                excluded: w,
            });
        }
    }
    let machinery = if full || h.is_trivial() {
        None
    } else {
        Some(machinery(alphabet, &h, opts)?)
    };
    let note = if full {
        "the limit set of H is the whole boundary, so the statement is immediate; only the closure is certified"
    } else if h.is_trivial() {
        "H is trivial; only the closure is certified"
    } else {
        "conjugates of H stand in for the profinite closure, which in a free group coincides with H"
    };
    let cert = SubgpsepCertificate {
        rank: alphabet.rank(),
        h_generators: h_gens.to_vec(),
        h_graph: h,
        max_index: opts.max_index,
        depth: opts.depth,
        full_limit_set: full,
        closure_tables,
        closure_excess,
        hall_witnesses,
        machinery,
    };
    Report::new(
        "subgpsep",
        opts.seed,
        note,
        json!({
            "rank": alphabet.rank(),
            "h_generators": h_gens,
            "max_index": opts.max_index,
            "depth": opts.depth,
            "max_power": opts.max_power,
            "traces": opts.traces,
        }),
        Certificate::Subgpsep(Box::new(cert)),
    )
}

const MAX_PAIR_DEPTH: usize = 64;
const MAX_K_LEN: usize = 8;
const MAX_Y_LEN: usize = 12;

fn machinery(alphabet: Alphabet, h: &CoreGraph, opts: SubgpsepOptions) -> Result<Machinery> {
    let gens = alphabet.generators();
    let gen_fixed: Vec<BoundaryPoint> = gens
        .iter()
        .flat_map(|g| {
            let (p, m) = fixed_points(g).expect("generators are non-trivial");
            [p, m]
        })
        .collect();

    // k with an absorbing pair off Λ(H) and off the generators' fixed points.
    let mut chosen_k = None;
    'k: for len in 1..=MAX_K_LEN {
        for k in crate::word::reduced_words_of_length(alphabet, len) {
            let (p, m) = fixed_points(&k)?;
            if h.limit_set_contains(&p) || h.limit_set_contains(&m) {
                continue;
            }
            let constraints = PairConstraints {
                off_limit_set: Some(h),
                avoid_points: &gen_fixed,
                max_depth: MAX_PAIR_DEPTH,
                ..Default::default()
            };
            if let Some(pair) = choose_pair(alphabet, &p, &m, constraints) {
                if let Ok(r) = absorbing_power(alphabet, &k, &pair, opts.max_power) {
                    chosen_k = Some((k, pair, r));
                    break 'k;
                }
            }
        }
    }
    let (k, k_pair, r) =
        chosen_k.ok_or_else(|| Error::bounded("element k with an absorbing pair off the limit set", MAX_K_LEN))?;
    let c = vec![k_pair.plus.clone()];

    // y_i in conjugates k^{r+j} H k^{-(r+j)}, with distinct fixed points in C.
    let elementary = h.subgroup_rank() <= 1;
    let mut ys: Vec<Word> = Vec::new();
    let mut conjugators: Vec<Word> = Vec::new();
    let mut used: Vec<BoundaryPoint> = Vec::new();
    let mut j = 0u32;
    while ys.len() < gens.len() {
        if j > 4 * gens.len() as u32 + 8 {
            return Err(Error::bounded("conjugates supplying y elements", j as usize));
        }
        let conj = k.pow(i64::from(r + j));
        let conj_inv = conj.inverse();
        j += 1;
        'len: for len in 1..=MAX_Y_LEN {
            for x in h.closed_words_rotated(len, opts.seed) {
                let y = conj.mul(&x).mul(&conj_inv);
                let (p, m) = fixed_points(&y)?;
                if used.contains(&p) || used.contains(&m) || gen_fixed.contains(&p) || gen_fixed.contains(&m) {
                    continue;
                }
                if !c.iter().any(|x| x.contains_point(&p)) || !c.iter().any(|x| x.contains_point(&m)) {
                    continue;
                }
                used.push(p);
                used.push(m);
                ys.push(y);
                conjugators.push(conj.clone());
                if elementary || ys.len() == gens.len() {
                    break 'len;
                }
            }
        }
    }

    // A: a normal subgroup of H of small index missing the elements that
    // move C onto itself.
    let threshold = discontinuity_threshold(h, &c);
    let pds = proper_discontinuity_set(h, &c, threshold)?;
    let m = h.subgroup_rank();
    let habstract = Presentation::free(Alphabet::new(m)?);
    let rewritten: Vec<Word> = pds
        .elements
        .iter()
        .map(|x| Ok(h.rewrite_in_basis(x)?.expect("member")))
        .collect::<Result<_>>()?;
    let a_table = low_index(&habstract, opts.max_t)?
        .into_iter()
        .filter(|t| t.size() >= opts.min_t && t.is_normal())
        .find(|t| rewritten.iter().all(|x| !t.stabilizes(x)))
        .ok_or_else(|| Error::bounded("normal subgroup of H avoiding the discontinuity set", opts.max_t))?;
    let t = a_table.size();
    let hbasis = h.basis();
    let a_gens: Vec<Word> = a_table
        .schreier_generators()
        .iter()
        .map(|x| substitute(x, &hbasis))
        .collect();
    let a = CoreGraph::fold(alphabet, &a_gens)?;
    let a_basis = a.basis();

    // Pairs inside C, then powers making each s_i play ping-pong.
    let mut pairs: Vec<AbsorbingPair> = Vec::new();
    let mut forbidden: Vec<Cylinder> = Vec::new();
    let mut powers = Vec::new();
    let mut y_final = Vec::new();
    for (i, (y, g)) in ys.iter().zip(&gens).enumerate() {
        let (p, mpt) = fixed_points(y)?;
        let others: Vec<BoundaryPoint> = used
            .iter()
            .filter(|q| **q != p && **q != mpt)
            .cloned()
            .collect();
        let constraints = PairConstraints {
            forbidden: &forbidden,
            container: Some(&c),
            mover: Some(g),
            avoid_points: &others,
            max_depth: MAX_PAIR_DEPTH,
            ..Default::default()
        };
        let pair = choose_pair(alphabet, &p, &mpt, constraints)
            .ok_or_else(|| Error::bounded(format!("absorbing pair for y_{}", i + 1), MAX_PAIR_DEPTH))?;
        let yt = y.pow(t as i64);
        let ri = sandwich_power(alphabet, &yt, g, &pair, opts.max_power)?
            .ok_or_else(|| Error::bounded(format!("power of y_{}", i + 1), opts.max_power as usize))?;
        forbidden.push(pair.plus.clone());
        forbidden.push(pair.minus.clone());
        pairs.push(pair);
        powers.push(ri);
        y_final.push(yt.pow(i64::from(ri)));
    }
    let regions = PinballRegions::new(c.clone(), pairs)?;
    let b = build_b(alphabet, h, &a, &gens, &regions, &y_final)?;
    let k_witness = engulfing_witness(alphabet, &b.graph, opts.max_index)?;
    let join_gens: Vec<Word> = k_witness
        .table
        .to_core_graph()
        .basis()
        .into_iter()
        .chain(y_final.iter().cloned())
        .collect();
    let join_index = CoreGraph::fold(alphabet, &join_gens)?.index();

    let start = regions
        .start_cylinder(alphabet)
        .ok_or_else(|| Error::precondition("C - ∪U is empty"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut traces = Vec::with_capacity(opts.traces);
    for _ in 0..opts.traces.max(MIN_TRACES) {
        let word = AlternatingWord::random(&mut rng, regions.pairs.len(), &a_basis, 4);
        traces.push(pinball_trace(alphabet, &word, &regions, &b.s_elements, &start)?);
    }
    let power_lemma = power_lemma_check(h, &a, POWER_LEMMA_BOUND)?;
    Ok(Machinery {
        k,
        k_pair,
        r,
        c,
        conjugators,
        y: ys,
        t,
        a_basis,
        discontinuity: pds.elements,
        discontinuity_bound: threshold,
        powers,
        y_final,
        regions,
        b,
        k_witness,
        join_index,
        traces,
        power_lemma,
    })
}

/// Evaluates a word in generators `1..` by substituting `basis`.
pub(crate) fn substitute(x: &Word, basis: &[Word]) -> Word {
    x.letters().iter().fold(Word::identity(), |acc, l| {
        let b = &basis[l.generator_index() - 1];
        acc.mul(&if l.is_inverse() { b.inverse() } else { b.clone() })
    })
}

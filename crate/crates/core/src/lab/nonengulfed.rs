//! Stages of a free subgroup that surjects onto a family of finite quotients
//! while its limit set misses a fixed cylinder, so no proper subgroup of
//! the family's indices engulfs it.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::boundary::{
    choose_pair, fixed_points, sandwich_power, schottky_certify, AbsorbingPair, BoundaryPoint,
    Cylinder, PairConstraints, SchottkySystem,
};
use crate::error::{Error, Result};
use crate::finite_index::{low_index, CosetTable, Presentation};
use crate::report::{Certificate, Check, Report};
use crate::stallings::CoreGraph;
use crate::word::{reduced_words_of_length, Alphabet, Word};

/// Largest quotient whose elements are enumerated.
pub const IMAGE_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct NonEngulfedOptions {
    pub max_power: u32,
    pub max_candidate_len: usize,
    pub max_pair_depth: usize,
}

impl Default for NonEngulfedOptions {
    fn default() -> Self {
        NonEngulfedOptions {
            max_power: 16,
            max_candidate_len: 10,
            max_pair_depth: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonEngulfedStage {
    pub rank: usize,
    pub stage: usize,
    /// Normal subgroups whose quotients the generators map onto.
    pub kernels: Vec<CosetTable>,
    /// For each generator, the kernel it was built for.
    pub kernel_of: Vec<usize>,
    /// Shortlex representative of the quotient element each generator hits.
    pub coset_reps: Vec<Word>,
    /// `y_i`, lying in its kernel.
    pub elements: Vec<Word>,
    pub powers: Vec<u32>,
    /// `y_i^{r_i} g_i y_i^{r_i}`.
    pub generators: Vec<Word>,
    pub schottky: Option<SchottkySystem>,
    pub avoid: Cylinder,
}

/// Normal subgroups of index `2..=max_index` of the free group, in
/// canonical order.
pub fn normal_family(alphabet: Alphabet, max_index: usize) -> Result<Vec<CosetTable>> {
    Ok(low_index(&Presentation::free(alphabet), max_index)?
        .into_iter()
        .filter(|t| t.size() >= 2 && t.is_normal())
        .collect())
}

/// Shallowest depth with at least eight cylinders per element to place.
fn min_pair_depth(alphabet: Alphabet, total: usize) -> usize {
    let k = alphabet.slots();
    let mut count = k;
    let mut d = 1;
    while count < 8 * total {
        count *= k - 1;
        d += 1;
    }
    d
}

pub fn nonengulfed_stage(
    alphabet: Alphabet,
    family: &[CosetTable],
    stage: usize,
    avoid: &Cylinder,
    opts: NonEngulfedOptions,
) -> Result<NonEngulfedStage> {
    if alphabet.rank() < 2 {
        return Err(Error::hypothesis("rank 1 has no non-elementary free subgroups"));
    }
    alphabet.check(avoid.stem())?;
    for t in family {
        if t.rank() != alphabet.rank() || !t.relators().is_empty() {
            return Err(Error::precondition("family tables must be over the free group of the same rank"));
        }
        if t.size() < 2 {
            return Err(Error::precondition("family members must be proper subgroups"));
        }
        if !t.is_normal() {
            return Err(Error::precondition("family members must be normal"));
        }
    }
    if stage > family.len() {
        return Err(Error::invalid(format!(
            "stage {stage} exceeds the family size {}",
            family.len()
        )));
    }
    let images: Vec<Vec<Word>> = family
        .iter()
        .map(|t| Ok(t.image_group(IMAGE_LIMIT)?.into_iter().map(|(_, w)| w).collect()))
        .collect::<Result<_>>()?;
    let min_depth = min_pair_depth(alphabet, images.iter().map(Vec::len).sum());

    let mut out = NonEngulfedStage {
        rank: alphabet.rank(),
        stage,
        kernels: family[..stage].to_vec(),
        kernel_of: Vec::new(),
        coset_reps: Vec::new(),
        elements: Vec::new(),
        powers: Vec::new(),
        generators: Vec::new(),
        schottky: None,
        avoid: avoid.clone(),
    };
    let mut pairs: Vec<AbsorbingPair> = Vec::new();
    let mut forbidden = vec![avoid.clone()];
    for (ki, (table, reps)) in family[..stage].iter().zip(&images).enumerate() {
        for g in reps {
            let g_fixed: Vec<BoundaryPoint> = if g.is_identity() {
                Vec::new()
            } else {
                let (p, m) = fixed_points(g)?;
                vec![p, m]
            };
            let mut chosen = None;
            'len: for len in 1..=opts.max_candidate_len {
                for w in reduced_words_of_length(alphabet, len) {
                    let (p, m) = fixed_points(&w)?;
                    if forbidden.iter().any(|f| f.contains_point(&p) || f.contains_point(&m))
                        || g_fixed.iter().any(|q| *q == p || *q == m)
                    {
                        continue;
                    }
                    let constraints = PairConstraints {
                        forbidden: &forbidden,
                        mover: Some(g),
                        min_depth,
                        max_depth: opts.max_pair_depth,
                        ..Default::default()
                    };
                    let Some(pair) = choose_pair(alphabet, &p, &m, constraints) else {
                        continue;
                    };
                    let y = w.pow(table.element_order(&w) as i64);
                    if let Some(r) = sandwich_power(alphabet, &y, g, &pair, opts.max_power)? {
                        chosen = Some((y, pair, r));
                        break 'len;
                    }
                }
            }
            let (y, pair, r) = chosen.ok_or_else(|| {
                Error::bounded(
                    format!("kernel element with free fixed points for quotient element {g}"),
                    opts.max_candidate_len,
                )
            })?;
            let x = y.pow(i64::from(r));
            out.generators.push(x.mul(g).mul(&x));
            forbidden.push(pair.plus.clone());
            forbidden.push(pair.minus.clone());
            pairs.push(pair);
            out.kernel_of.push(ki);
            out.coset_reps.push(g.clone());
            out.elements.push(y);
            out.powers.push(r);
        }
    }
    if !out.generators.is_empty() {
        out.schottky = Some(schottky_certify(alphabet, &out.generators, &pairs)?);
    }
    Ok(out)
}

impl NonEngulfedStage {
    pub fn pairs(&self) -> &[AbsorbingPair] {
        self.schottky.as_ref().map_or(&[], |s| &s.pairs)
    }

    pub fn graph(&self) -> Result<CoreGraph> {
        CoreGraph::fold(Alphabet::new(self.rank)?, &self.generators)
    }

    pub fn checks(&self) -> Result<Vec<Check>> {
        let alphabet = Alphabet::new(self.rank)?;
        let n = self.generators.len();
        let shape = [
            self.kernel_of.len(),
            self.coset_reps.len(),
            self.elements.len(),
            self.powers.len(),
        ]
        .iter()
        .all(|&l| l == n)
            && self.kernels.len() == self.stage
            && self.kernel_of.iter().all(|&k| k < self.kernels.len());
        let mut in_kernel = shape;
        let mut products = shape;
        if shape {
            for i in 0..n {
                let t = &self.kernels[self.kernel_of[i]];
                in_kernel &= t.permutation(&self.elements[i]) == (0..t.size()).collect::<Vec<_>>();
                let x = self.elements[i].pow(i64::from(self.powers[i]));
                products &= x.mul(&self.coset_reps[i]).mul(&x) == self.generators[i];
            }
        }
        let schottky = match &self.schottky {
            None => Ok(n == 0),
            Some(s) => schottky_certify(alphabet, &self.generators, &s.pairs)
                .map(|again| again == *s && s.elements == self.generators),
        };
        let pairs_avoid = self
            .pairs()
            .iter()
            .flat_map(|p| p.cylinders())
            .all(|c| c.is_disjoint(&self.avoid));
        let mut surjects = shape;
        for (k, t) in self.kernels.iter().enumerate().filter(|_| shape) {
            let mine: Vec<Word> = (0..n)
                .filter(|&i| self.kernel_of[i] == k)
                .map(|i| self.generators[i].clone())
                .collect();
            surjects &= t.generated_by(&mine, IMAGE_LIMIT)?;
        }
        let graph = self.graph()?;
        let proper = graph.is_proper_limit_set();
        let misses = !graph.stem_meets_limit_set(self.avoid.stem());
        Ok(vec![
            Check::new("y_in_kernels", in_kernel, format!("{n} elements act trivially on their quotient")),
            Check::new("products", products, "each generator equals y^r g y^r"),
            Check::new(
                "schottky_system",
                matches!(schottky, Ok(true)) && pairs_avoid,
                match &schottky {
                    Ok(_) => format!("{n} disjoint absorbing pairs, all missing {}", self.avoid),
                    Err(e) => e.to_string(),
                },
            ),
            Check::new(
                "surjects_onto_quotients",
                surjects,
                format!("onto {} quotients", self.kernels.len()),
            ),
            Check::new(
                "proper_limit_set",
                proper || n == 0,
                format!("graph has {} vertices", graph.vertex_count()),
            ),
            Check::new(
                "avoids_cylinder",
                misses,
                format!("limit set misses {}", self.avoid),
            ),
        ])
    }
}

pub fn nonengulfed_experiment(
    alphabet: Alphabet,
    max_index: usize,
    stage: Option<usize>,
    avoid: &Cylinder,
) -> Result<Report> {
    let family = normal_family(alphabet, max_index)?;
    let stage = stage.unwrap_or(family.len());
    let cert = nonengulfed_stage(alphabet, &family, stage, avoid, NonEngulfedOptions::default())?;
    Report::new(
        "nonengulfed",
        0,
        "the family is every normal subgroup of index at most max_index; the stage maps onto each quotient while its limit set misses the avoided cylinder",
        json!({
            "rank": alphabet.rank(),
            "max_index": max_index,
            "stage": stage,
            "avoid": avoid,
        }),
        Certificate::Nonengulfed(Box::new(cert)),
    )
}

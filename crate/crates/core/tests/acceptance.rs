//! One line per acceptance criterion, each with its time limit.

mod common;

use std::time::{Duration, Instant};

use common::{brute_members, freely_independent, rank, sample_generating_sets, subgroup_count_by_actions, w};
use engulf_core::boundary::{
    absorbing_power, check_absorbing, schottky_certify, torfreegens, AbsorbingPair, Cylinder,
    SchottkySystem, TorFreeGensOptions,
};
use engulf_core::finite_index::{coset_enumerate, hall_witness, low_index, power_lemma_check, Presentation};
use engulf_core::lab::{
    nonengulfed_experiment, nonengulfed_stage, normal_family, resfin_experiment,
    subgpsep_experiment, NonEngulfedOptions, SubgpsepOptions, MIN_TRACES,
};
use engulf_core::report::{verify, Certificate, Report};
use engulf_core::stallings::CoreGraph;
use engulf_core::word::{reduced_words_of_length, reduced_words_up_to, Alphabet, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sample() -> Vec<Vec<Word>> {
    sample_generating_sets(rank(2), 500, 3, 4, 1)
}

fn stallings_oracle() -> Outcome {
    let a = rank(2);
    let words = reduced_words_up_to(a, 6);
    let sets = sample();
    let mut mismatches = 0;
    for g in &sets {
        let h = CoreGraph::fold(a, g).map_err(err)?;
        let brute = brute_members(g, 6, 12);
        mismatches += words.iter().filter(|x| h.contains(x) != brute.contains(*x)).count();
    }
    ensure(mismatches == 0, format!("{mismatches} disagreements"))?;
    Ok(format!("{} generating sets x {} words, 0 disagreements", sets.len(), words.len()))
}

fn limit_set_dichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut finite, mut infinite) = (0, 0);
    for i in 0..200 {
        let a = rank(2 + i % 2);
        let k = rng.gen_range(1..=4);
        let gens: Vec<Word> = (0..k)
            .map(|_| {
                let len = rng.gen_range(1..=5);
                let pool = reduced_words_of_length(a, len);
                pool[rng.gen_range(0..pool.len())].clone()
            })
            .collect();
        let h = CoreGraph::fold(a, &gens).map_err(err)?;
        let proper = h.is_proper_limit_set();
        // Independent views: full stem coverage one level past the vertex
        // count, and whether coset enumeration closes.
        let depth = h.vertex_count() + 1;
        let stems = h.limit_set(depth).stems.iter().filter(|s| s.len() == depth).count() as u128;
        let full_cover = stems == a.reduced_count(depth);
        let enumerated = coset_enumerate(&Presentation::free(a), &gens, 64 * h.vertex_count().max(1));
        let infinite_index = h.index().is_none();
        ensure(proper == infinite_index, format!("dichotomy fails for {gens:?}"))?;
        ensure(proper != full_cover, format!("stem cover disagrees for {gens:?}"))?;
        match enumerated {
            Ok(t) => ensure(!proper && Some(t.size()) == h.index(), format!("enumeration disagrees for {gens:?}"))?,
            Err(e) => ensure(proper && e.is_bounded_search(), format!("enumeration disagrees for {gens:?}"))?,
        }
        if proper {
            infinite += 1;
        } else {
            finite += 1;
        }
    }
    Ok(format!("200 subgroups ({finite} finite index, {infinite} infinite), all agree"))
}

fn absorbing_exactness() -> Outcome {
    let a = rank(2);
    let pair = AbsorbingPair::new(Cylinder::new(w("ab")).map_err(err)?, Cylinder::new(w("BA")).map_err(err)?)
        .map_err(err)?;
    let r = absorbing_power(a, &w("ab"), &pair, 8).map_err(err)?;
    ensure(r == 2, format!("absorbing power {r}"))?;
    ensure(!check_absorbing(a, &w("ab"), &pair, 1).map_err(err)?, "absorbing at r = 1")?;
    // Prefix oracle: every outside length-3 prefix, extended far enough that
    // the image prefix is determined.
    let oracle = |r: i64| {
        let g = w("ab").pow(r);
        reduced_words_of_length(a, 3)
            .into_iter()
            .filter(|p| !w("ab").is_prefix_of(p) && !w("BA").is_prefix_of(p))
            .all(|p| {
                reduced_words_of_length(a, 3 + g.len() + 2)
                    .iter()
                    .filter(|x| p.is_prefix_of(x))
                    .all(|x| w("ab").is_prefix_of(&g.mul(x)) && w("BA").is_prefix_of(&g.inverse().mul(x)))
            })
    };
    ensure(!oracle(1) && oracle(2), "prefix oracle disagrees")?;
    Ok("power 2, fails at 1, confirmed on all outside length-3 prefixes".into())
}

fn schottky_fixtures() -> Result<Vec<(String, SchottkySystem)>, String> {
    let a = rank(2);
    let c = |s: &str| Cylinder::new(w(s)).unwrap();
    let pair = |p: &str, m: &str| AbsorbingPair::new(c(p), c(m)).unwrap();
    let mut out = Vec::new();
    let mut push = |name: &str, s: SchottkySystem| out.push((name.to_string(), s));
    push("a,b", schottky_certify(a, &[w("a"), w("b")], &[pair("a", "A"), pair("b", "B")]).map_err(err)?);
    push("aa,bb", schottky_certify(a, &[w("aa"), w("bb")], &[pair("a", "A"), pair("b", "B")]).map_err(err)?);
    push("abab", schottky_certify(a, &[w("abab")], &[pair("ab", "BA")]).map_err(err)?);
    let avoid = c("b");
    for (name, n) in [
        ("even kernel", vec![w("aa"), w("ab"), w("aB")]),
        ("<aa,b,abA>", vec![w("aa"), w("b"), w("abA")]),
        ("index 3", vec![w("aaa"), w("b"), w("abA"), w("aabAA")]),
    ] {
        let n = CoreGraph::fold(a, &n).map_err(err)?;
        for seed in [0, 1] {
            let opts = TorFreeGensOptions { seed, ..Default::default() };
            let t = torfreegens(a, &a.generators(), &n, &avoid, opts).map_err(err)?;
            push(&format!("torfreegens {name} seed {seed}"), t.system);
        }
    }
    let a3 = rank(3);
    let n3 = CoreGraph::fold(a3, &[w("aa"), w("b"), w("c"), w("abA"), w("acA")]).map_err(err)?;
    let t = torfreegens(a3, &a3.generators(), &n3, &Cylinder::new(w("c")).map_err(err)?, TorFreeGensOptions::default())
        .map_err(err)?;
    push("torfreegens rank 3", t.system);
    let family = normal_family(a, 2).map_err(err)?;
    for stage in [1, 2] {
        let s = nonengulfed_stage(a, &family, stage, &avoid, NonEngulfedOptions::default()).map_err(err)?;
        push(&format!("nonengulfed stage {stage}"), s.schottky.ok_or("empty stage")?);
    }
    Ok(out)
}

fn schottky_soundness() -> Outcome {
    let fixtures = schottky_fixtures()?;
    let mut words = 0;
    for (name, sys) in &fixtures {
        ensure(freely_independent(&sys.elements, 6), format!("relation among {name}"))?;
        let k = Alphabet::new(sys.elements.len()).map_err(err)?;
        words += reduced_words_up_to(k, 6).len() - 1;
    }
    ensure(fixtures.len() >= 10, "fewer than 10 fixtures")?;
    Ok(format!("{} certificates, {words} words checked, 0 relations", fixtures.len()))
}

fn torfreegens_replay() -> Outcome {
    let a = rank(2);
    let n = CoreGraph::fold(a, &[w("aa"), w("ab"), w("aB")]).map_err(err)?;
    let t = torfreegens(a, &a.generators(), &n, &Cylinder::new(w("b")).map_err(err)?, TorFreeGensOptions::default())
        .map_err(err)?;
    ensure(t.conjugators.iter().all(|x| n.contains(x)), "x_i not in N")?;
    schottky_certify(a, &t.new_generators, &t.system.pairs).map_err(err)?;
    let h = CoreGraph::fold(a, &t.new_generators).map_err(err)?;
    ensure(h.is_proper_limit_set(), "limit set is full")?;
    let join: Vec<Word> = t.conjugators.iter().chain(&t.new_generators).cloned().collect();
    let idx = CoreGraph::fold(a, &join).map_err(err)?.index();
    ensure(idx == Some(1), format!("join has index {idx:?}"))?;
    Ok(format!("x = {:?}, new generators {:?}", t.conjugators.iter().map(|x| x.to_string()).collect::<Vec<_>>(), t.new_generators.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

fn hall_separability() -> Outcome {
    let a = rank(2);
    let candidates = reduced_words_up_to(a, 4);
    let mut count = 0;
    for g in sample() {
        let h = CoreGraph::fold(a, &g).map_err(err)?;
        for x in candidates.iter().filter(|x| !h.contains(x)) {
            let t = hall_witness(&h, x).map_err(err)?;
            t.validate().map_err(err)?;
            ensure(g.iter().all(|y| t.stabilizes(y)) && !t.stabilizes(x), format!("witness fails for {g:?}, {x}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} (H, w) pairs separated"))
}

fn resfin_machinery() -> Outcome {
    let a = rank(2);
    let n = CoreGraph::fold(a, &[w("aa"), w("ab"), w("aB")]).map_err(err)?;
    let r = resfin_experiment(a, &a.generators(), &n, 4, 0).map_err(err)?;
    for name in ["proper_limit_set", "engulfing_witness", "join_whole_group"] {
        let c = r.check(name).ok_or(format!("missing {name}"))?;
        ensure(c.pass, format!("{name}: {}", c.detail))?;
    }
    ensure(r.passed(), "another check failed")?;
    Ok(format!("{} checks pass", r.checks.len()))
}

fn subgpsep_machinery() -> Outcome {
    let a = rank(2);
    let r = subgpsep_experiment(a, &[w("b")], SubgpsepOptions { max_index: 4, ..Default::default() }).map_err(err)?;
    let Certificate::Subgpsep(c) = &r.certificate else { return Err("wrong certificate".into()) };
    ensure(c.closure_equals_h_on_ball(), "closure differs from H on the ball")?;
    if let Some(x) = r.checks.iter().find(|x| !x.pass) {
        return Err(format!("{}: {}", x.name, x.detail));
    }
    let m = c.machinery.as_ref().ok_or("no machinery")?;
    let mismatches = m.traces.iter().filter(|t| !t.matches()).count();
    ensure(m.traces.len() >= MIN_TRACES && mismatches == 0, "pinball mismatch")?;
    // Power lemma fixtures with t <= 4 at bound 6.
    let mut fixtures: Vec<(CoreGraph, CoreGraph)> = vec![
        (CoreGraph::fold(a, &[w("a")]).map_err(err)?, CoreGraph::fold(a, &[w("aaa")]).map_err(err)?),
        (CoreGraph::fold(a, &[w("b")]).map_err(err)?, CoreGraph::fold(a, &[w("bbbb")]).map_err(err)?),
    ];
    let whole = CoreGraph::fold(a, &a.generators()).map_err(err)?;
    for t in normal_family(a, 4).map_err(err)? {
        fixtures.push((whole.clone(), t.to_core_graph()));
    }
    let h = CoreGraph::fold(a, &[w("ab"), w("bA")]).map_err(err)?;
    fixtures.push((h.clone(), CoreGraph::fold(a, &[w("abab"), w("bAbA"), w("abbA"), w("bAab")]).map_err(err)?));
    let mut checked = 0;
    for (h, sub) in &fixtures {
        let rep = power_lemma_check(h, sub, 6).map_err(err)?;
        ensure(rep.passed() && rep.t <= 4, format!("power lemma fails at t = {}", rep.t))?;
        checked += rep.checked;
    }
    Ok(format!(
        "closure = H on the radius-{} ball, {} traces, power lemma on {} fixtures ({checked} elements)",
        c.depth,
        m.traces.len(),
        fixtures.len()
    ))
}

fn nonengulfed_construction() -> Outcome {
    let a = rank(2);
    let r = nonengulfed_experiment(a, 6, None, &Cylinder::new(w("b")).map_err(err)?).map_err(err)?;
    if let Some(x) = r.checks.iter().find(|x| !x.pass) {
        return Err(format!("{}: {}", x.name, x.detail));
    }
    let Certificate::Nonengulfed(s) = &r.certificate else { return Err("wrong certificate".into()) };
    let tables = low_index(&Presentation::free(a), 6).map_err(err)?;
    let engulfing = tables
        .iter()
        .filter(|t| t.size() >= 2 && s.generators.iter().all(|g| t.stabilizes(g)))
        .count();
    ensure(engulfing == 0, format!("{engulfing} proper subgroups contain the stage"))?;
    Ok(format!(
        "{} quotients, {} generators, none of {} proper subgroups of index <= 6 contains them",
        s.kernels.len(),
        s.generators.len(),
        tables.len() - 1
    ))
}

fn low_index_counts() -> Outcome {
    let free = Presentation::free(rank(2));
    let tables = low_index(&free, 3).map_err(err)?;
    let count = |n| tables.iter().filter(|t| t.size() == n).count();
    ensure(count(2) == 3, format!("{} subgroups of index 2", count(2)))?;
    let brute = subgroup_count_by_actions(3);
    ensure(count(3) == brute, format!("index 3: {} vs {brute}", count(3)))?;
    Ok(format!("index 2: 3, index 3: {} (brute force {brute})", count(3)))
}

fn reports() -> Result<Vec<Report>, String> {
    let a = rank(2);
    let n = CoreGraph::fold(a, &[w("aa"), w("ab"), w("aB")]).map_err(err)?;
    let mut out = Vec::new();
    for seed in [0, 5] {
        out.push(resfin_experiment(a, &a.generators(), &n, 4, seed).map_err(err)?);
    }
    for h in [vec![w("b")], vec![w("ab"), w("bA")], vec![w("a"), w("b")]] {
        out.push(subgpsep_experiment(a, &h, SubgpsepOptions { seed: 3, ..Default::default() }).map_err(err)?);
    }
    out.push(nonengulfed_experiment(a, 4, None, &Cylinder::new(w("b")).map_err(err)?).map_err(err)?);
    Ok(out)
}

fn determinism() -> Outcome {
    let first = reports()?;
    let second = reports()?;
    for (x, y) in first.iter().zip(&second) {
        ensure(x.to_json() == y.to_json(), format!("{} differs between runs", x.experiment))?;
        let back = Report::from_json(&x.to_json()).map_err(err)?;
        ensure(verify(&back).map_err(err)?.valid, format!("{} fails verification", x.experiment))?;
    }
    Ok(format!("{} reports byte-identical and verified", first.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("stallings oracle equivalence", 60, stallings_oracle),
        ("limit-set dichotomy", 10, limit_set_dichotomy),
        ("absorbing-pair exactness", 1, absorbing_exactness),
        ("schottky soundness", 30, schottky_soundness),
        ("torfreegens replay", 5, torfreegens_replay),
        ("hall separability", 60, hall_separability),
        ("resfin machinery", 5, resfin_machinery),
        ("subgpsep machinery", 60, subgpsep_machinery),
        ("nonengulfed construction", 120, nonengulfed_construction),
        ("low-index counts", 30, low_index_counts),
        ("determinism", 30, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let within = elapsed < Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit}s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("acceptance {:>2} {status} {name} ({:.2}s < {limit}s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance summary: {} of 11 passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

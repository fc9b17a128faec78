//! `engulf`: command-line access to words, boundary dynamics, Stallings
//! graphs, coset enumeration and the experiment replays.
//!
//! Exit status: 0 on success (including negative verdicts), 2 when a bounded
//! search runs out of budget, 1 on usage or precondition errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use engulf_core::boundary::{
    absorbing_power, check_absorbing, fixed_points, schottky_certify, torfreegens, AbsorbingPair,
    Cylinder, TorFreeGensOptions,
};
use engulf_core::finite_index::{
    coset_enumerate, engulf, hall_witness, low_index, power_lemma_check, profinite_closure,
    residual_core, Closure, CosetTable, Presentation, ResidualCore,
};
use engulf_core::lab::{
    nonengulfed_experiment, resfin_experiment, subgpsep_experiment, AlternatingWord, Machinery,
    SubgpsepOptions,
};
use engulf_core::report::{verify, Certificate, Report};
use engulf_core::stallings::CoreGraph;
use engulf_core::word::{parse_word_list, Alphabet, Letter, Word};
use engulf_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "engulf", version, about = "Engulfing, separability and boundary dynamics in free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Rank of the free group (inferred from the words when absent).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=26))]
    rank: Option<u64>,
    /// Comma-separated words.
    #[arg(long, global = true)]
    gens: Option<String>,
    /// Presentation file ("gens: a b" then "rel: ..." lines).
    #[arg(long, global = true)]
    pres: Option<PathBuf>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_index: Option<u64>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_cosets: Option<u64>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    max_power: Option<u32>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit a single JSON object.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Freely reduce words.
    Reduce { words: Vec<String> },
    /// Fold the generators into a Stallings core graph.
    Fold,
    /// Subgroup membership of a word.
    Member { word: String },
    /// Index of the subgroup (core graph, or coset enumeration with --pres).
    Index,
    /// Limit-set stems at a depth, and whether the limit set is proper.
    Limitset,
    /// Attracting and repelling fixed points on the boundary.
    Fixed { word: String },
    /// Least power for which a pair of cylinders is absorbing.
    Absorb {
        word: String,
        #[arg(long)]
        plus: String,
        #[arg(long)]
        minus: String,
    },
    /// Certify that elements play ping-pong on disjoint absorbing pairs.
    Schottky {
        /// Pairs as "plus/minus" stems, comma-separated, one per element.
        #[arg(long)]
        pairs: String,
    },
    /// Replace generators g by x g x with x in N so they freely generate.
    Torfreegens {
        /// Generators of N.
        #[arg(long)]
        normal: String,
        /// Cylinder stem the limit set must miss.
        #[arg(long, default_value = "")]
        avoid: String,
    },
    /// Todd–Coxeter coset enumeration.
    Enum,
    /// All subgroups of index at most --max-index.
    Lowindex,
    /// Least proper subgroup of bounded index containing the generators.
    Engulf,
    /// Finite-index subgroup containing the generators but not a word.
    Hall { word: String },
    /// Intersection of the bounded-index subgroups containing the generators.
    Closure,
    /// Intersection of all subgroups of bounded index.
    Core,
    /// Check h^t in A for short h in H, where t = [H : A].
    Powerlemma {
        /// Generators of A.
        #[arg(long)]
        sub: String,
    },
    /// Pinball traces of random alternating words for the subgroup.
    Pinball {
        #[arg(long, default_value_t = 64)]
        count: usize,
    },
    /// The subgroup B with its limit-set certificate.
    BuildB,
    /// Run an experiment and emit its report.
    Experiment {
        name: ExperimentName,
        /// Generators of N for resfin.
        #[arg(long)]
        normal: Option<String>,
        /// Stage for nonengulfed (default: whole family).
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        avoid: Option<String>,
    },
    /// Replay the checks of a report without searching.
    Verify { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    Resfin,
    Subgpsep,
    Nonengulfed,
}

/// What a command prints: a text rendering and a JSON object.
struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output {
            text: text.into(),
            json,
            code: 0,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (rendered, code) = match run(&cli) {
        Ok(out) => {
            let r = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("json") + "\n"
            } else {
                out.text
            };
            (r, out.code)
        }
        Err(f) => {
            let (kind, message, searched_to, code) = match &f {
                Failure::Usage(m) => ("usage", m.clone(), None, 1),
                Failure::Lib(e) => {
                    let s = match e {
                        Error::BoundedSearch { searched_to, .. } => Some(*searched_to),
                        _ => None,
                    };
                    (error_kind(e), e.to_string(), s, if e.is_bounded_search() { 2 } else { 1 })
                }
            };
            if cli.json {
                let v = json!({"error": kind, "message": message, "searched_to": searched_to});
                (serde_json::to_string_pretty(&v).expect("json") + "\n", code)
            } else {
                eprintln!("error: {message}");
                (String::new(), code)
            }
        }
    };
    if !rendered.is_empty() {
        match &cli.out {
            Some(path) => {
                if let Err(e) = fs::write(path, &rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => print!("{rendered}"),
        }
    }
    ExitCode::from(code)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::Invalid(_) => "invalid",
        Error::AlphabetMismatch(_) => "alphabet_mismatch",
        Error::NoAxis => "no_axis",
        Error::Precondition(_) => "precondition",
        Error::Hypothesis(_) => "hypothesis",
        Error::BoundedSearch { .. } => "bounded_search",
    }
}

/// Highest generator named in any of the texts.
fn max_letter(texts: &[&str]) -> usize {
    texts
        .iter()
        .flat_map(|t| t.chars())
        .filter_map(Letter::from_char)
        .map(Letter::generator_index)
        .max()
        .unwrap_or(0)
}

impl Cli {
    fn presentation_file(&self) -> Res<Option<Presentation>> {
        let Some(path) = &self.pres else { return Ok(None) };
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let p = Presentation::parse(&text)?;
        if let Some(r) = self.rank {
            if r as usize != p.rank() {
                return Err(usage(format!("--rank {r} disagrees with the presentation's rank {}", p.rank())));
            }
        }
        Ok(Some(p))
    }

    /// The alphabet: the presentation's, --rank, or the largest letter used
    /// (at least 2).
    fn alphabet(&self, extra: &[&str]) -> Res<Alphabet> {
        if let Some(p) = self.presentation_file()? {
            return Ok(p.alphabet());
        }
        let rank = match self.rank {
            Some(r) => r as usize,
            None => {
                let mut texts: Vec<&str> = extra.to_vec();
                texts.extend(self.gens.as_deref());
                max_letter(&texts).max(2)
            }
        };
        Ok(Alphabet::new(rank)?)
    }

    fn presentation(&self, extra: &[&str]) -> Res<Presentation> {
        match self.presentation_file()? {
            Some(p) => Ok(p),
            None => Ok(Presentation::free(self.alphabet(extra)?)),
        }
    }

    fn gens(&self, alphabet: Alphabet) -> Res<Vec<Word>> {
        Ok(parse_word_list(self.gens.as_deref().unwrap_or(""), alphabet)?)
    }

    fn required_gens(&self, alphabet: Alphabet) -> Res<Vec<Word>> {
        if self.gens.is_none() {
            return Err(usage("--gens is required"));
        }
        self.gens(alphabet)
    }

    fn max_index(&self, default: usize) -> usize {
        self.max_index.map_or(default, |n| n as usize)
    }

    fn depth(&self, default: usize) -> usize {
        self.depth.map_or(default, |n| n as usize)
    }

    fn max_power(&self, default: u32) -> u32 {
        self.max_power.unwrap_or(default)
    }
}

fn words_json(ws: &[Word]) -> Value {
    json!(ws.iter().map(Word::to_string).collect::<Vec<_>>())
}

fn join(ws: &[Word]) -> String {
    if ws.is_empty() {
        return "(none)".into();
    }
    ws.iter().map(Word::to_string).collect::<Vec<_>>().join(", ")
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn graph_text(g: &CoreGraph) -> String {
    let mut s = String::new();
    let index = g.index().map_or("infinite".to_string(), |n| n.to_string());
    let _ = writeln!(s, "vertices: {}", g.vertex_count());
    let _ = writeln!(s, "subgroup rank: {}", g.subgroup_rank());
    let _ = writeln!(s, "index: {index}");
    let _ = writeln!(s, "basis: {}", join(&g.basis()));
    for (u, l, v) in g.edges() {
        let _ = writeln!(s, "  {u} -{}-> {v}", l.to_char());
    }
    s
}

fn table_text(t: &CosetTable) -> String {
    let a = t.alphabet();
    let perms: Vec<String> = a
        .generators()
        .iter()
        .map(|g| {
            let p = t.permutation(g);
            format!("{}=[{}]", g, p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        })
        .collect();
    format!("index {}: {}", t.size(), perms.join(" "))
}

fn cylinder(text: &str, a: Alphabet) -> Res<Cylinder> {
    Ok(Cylinder::parse(text, a)?)
}

fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Reduce { words } => {
            if words.is_empty() {
                return Err(usage("reduce needs at least one word"));
            }
            let reduced: Vec<Word> = words
                .iter()
                .map(|w| Word::parse_any(w))
                .collect::<engulf_core::Result<_>>()?;
            let text = reduced.iter().map(|w| w.to_string() + "\n").collect::<String>();
            Ok(Output::new(text, json!({"input": words, "reduced": words_json(&reduced)})))
        }
        Command::Fold => {
            let a = cli.alphabet(&[])?;
            let g = CoreGraph::fold(a, &cli.required_gens(a)?)?;
            let mut v = to_value(&g);
            v["index"] = json!(g.index());
            v["basis"] = words_json(&g.basis());
            Ok(Output::new(graph_text(&g), v))
        }
        Command::Member { word } => {
            let a = cli.alphabet(&[word])?;
            let g = CoreGraph::fold(a, &cli.gens(a)?)?;
            let w = Word::parse(word, a)?;
            let m = g.contains(&w);
            let coords = g.rewrite_in_basis(&w)?;
            Ok(Output::new(
                if m { "yes\n" } else { "no\n" },
                json!({"word": w, "member": m, "in_basis": coords, "basis": words_json(&g.basis())}),
            ))
        }
        Command::Index => {
            if let Some(p) = cli.presentation_file()? {
                let gens = cli.gens(p.alphabet())?;
                let t = coset_enumerate(&p, &gens, cli.max_cosets.map_or(1000, |n| n as usize))?;
                return Ok(Output::new(
                    format!("{}\n", t.size()),
                    json!({"index": t.size(), "method": "coset_enumeration"}),
                ));
            }
            let a = cli.alphabet(&[])?;
            let g = CoreGraph::fold(a, &cli.gens(a)?)?;
            let text = g.index().map_or("infinite\n".to_string(), |n| format!("{n}\n"));
            Ok(Output::new(text, json!({"index": g.index(), "method": "core_graph"})))
        }
        Command::Limitset => {
            let a = cli.alphabet(&[])?;
            let g = CoreGraph::fold(a, &cli.gens(a)?)?;
            let depth = cli.depth(g.default_limit_depth());
            let approx = g.limit_set(depth);
            let stems: Vec<Word> = approx.stems.iter().filter(|s| s.len() == depth).cloned().collect();
            let proper = g.is_proper_limit_set();
            let text = format!(
                "proper: {proper}\ndepth: {depth}\nstems ({} of {}): {}\n",
                stems.len(),
                a.reduced_count(depth),
                join(&stems)
            );
            Ok(Output::new(
                text,
                json!({"proper": proper, "depth": depth, "stems": words_json(&stems), "total": a.reduced_count(depth).to_string()}),
            ))
        }
        Command::Fixed { word } => {
            let a = cli.alphabet(&[word])?;
            let w = Word::parse(word, a)?;
            let (p, m) = fixed_points(&w)?;
            Ok(Output::new(
                format!("+ {p}\n- {m}\n"),
                json!({"word": w, "attracting": p, "repelling": m}),
            ))
        }
        Command::Absorb { word, plus, minus } => {
            let a = cli.alphabet(&[word, plus, minus])?;
            let w = Word::parse(word, a)?;
            let pair = AbsorbingPair::new(cylinder(plus, a)?, cylinder(minus, a)?)?;
            let max = cli.max_power(16);
            let r = absorbing_power(a, &w, &pair, max)?;
            let at_one = check_absorbing(a, &w, &pair, 1)?;
            Ok(Output::new(
                format!("{r}\n"),
                json!({"word": w, "pair": pair, "power": r, "absorbing_at_1": at_one, "max_power": max}),
            ))
        }
        Command::Schottky { pairs } => {
            let a = cli.alphabet(&[pairs])?;
            let elements = cli.required_gens(a)?;
            let pairs = parse_pairs(pairs, a)?;
            let sys = schottky_certify(a, &elements, &pairs)?;
            let text = format!(
                "certified: {} elements freely generate\nbasepoint: {}\n",
                sys.elements.len(),
                sys.basepoint_witness.as_ref().map_or("none".into(), |c| c.to_string())
            );
            Ok(Output::new(text, to_value(&sys)))
        }
        Command::Torfreegens { normal, avoid } => {
            let a = cli.alphabet(&[normal, avoid])?;
            let gens = match &cli.gens {
                Some(_) => cli.gens(a)?,
                None => a.generators(),
            };
            let n = CoreGraph::fold(a, &parse_word_list(normal, a)?)?;
            let avoid = if avoid.is_empty() {
                Cylinder::new(Word::from_letter(Letter::generator(a.rank())))?
            } else {
                cylinder(avoid, a)?
            };
            let opts = TorFreeGensOptions {
                max_power: cli.max_power(16),
                seed: cli.seed,
                ..Default::default()
            };
            let t = torfreegens(a, &gens, &n, &avoid, opts)?;
            let text = format!(
                "x: {}\nnew generators: {}\n",
                join(&t.conjugators),
                join(&t.new_generators)
            );
            Ok(Output::new(text, to_value(&t)))
        }
        Command::Enum => {
            let p = cli.presentation(&[])?;
            let gens = cli.gens(p.alphabet())?;
            let t = coset_enumerate(&p, &gens, cli.max_cosets.map_or(1000, |n| n as usize))?;
            Ok(Output::new(table_text(&t) + "\n", to_value(&t)))
        }
        Command::Lowindex => {
            let p = cli.presentation(&[])?;
            let n = cli.max_index(3);
            let tables = low_index(&p, n)?;
            let text = tables.iter().map(|t| table_text(t) + "\n").collect::<String>();
            Ok(Output::new(
                text,
                json!({"max_index": n, "count": tables.len(), "tables": to_value(&tables)}),
            ))
        }
        Command::Engulf => {
            let p = cli.presentation(&[])?;
            let gens = cli.gens(p.alphabet())?;
            let r = engulf(&p, &gens, cli.max_index(4))?;
            let text = match &r.witness {
                Some(t) => table_text(t) + "\n",
                None => format!("none up to index {}\n", r.searched_to),
            };
            Ok(Output::new(text, to_value(&r)))
        }
        Command::Hall { word } => {
            let a = cli.alphabet(&[word])?;
            let h = CoreGraph::fold(a, &cli.gens(a)?)?;
            let w = Word::parse(word, a)?;
            let t = hall_witness(&h, &w)?;
            Ok(Output::new(
                table_text(&t) + "\n",
                json!({"excluded": w, "witness": to_value(&t)}),
            ))
        }
        Command::Closure => {
            let p = cli.presentation(&[])?;
            let gens = cli.gens(p.alphabet())?;
            let c = profinite_closure(&p, &gens, cli.max_index(3))?;
            let text = match &c {
                Closure::Graph { graph, tables } => format!("tables intersected: {tables}\n{}", graph_text(graph)),
                Closure::Table { table, tables } => format!("tables intersected: {tables}\n{}\n", table_text(table)),
            };
            Ok(Output::new(text, to_value(&c)))
        }
        Command::Core => {
            let p = cli.presentation(&[])?;
            let c = residual_core(&p, cli.max_index(3))?;
            let text = match &c {
                ResidualCore::Graph { graph } => graph_text(graph),
                ResidualCore::Intersection { tables } => format!("intersection of {} subgroups\n", tables.len()),
                ResidualCore::Table { table } => table_text(table) + "\n",
            };
            Ok(Output::new(text, to_value(&c)))
        }
        Command::Powerlemma { sub } => {
            let a = cli.alphabet(&[sub])?;
            let h = CoreGraph::fold(a, &cli.required_gens(a)?)?;
            let sub = CoreGraph::fold(a, &parse_word_list(sub, a)?)?;
            let r = power_lemma_check(&h, &sub, cli.depth(6))?;
            let text = format!(
                "t: {}\nchecked: {} elements up to length {}\nviolations: {}\n",
                r.t,
                r.checked,
                r.word_bound,
                join(&r.violations)
            );
            Ok(Output::new(text, to_value(&r)))
        }
        Command::Pinball { count } => {
            let mut m = machinery(cli, *count)?;
            m.traces.truncate(*count);
            let mut text = String::new();
            for t in &m.traces {
                let _ = writeln!(
                    text,
                    "{} -> {} (predicted {}) {}",
                    alternating_text(&t.word),
                    t.final_region,
                    t.predicted,
                    if t.matches() { "ok" } else { "MISMATCH" }
                );
            }
            let mismatches = m.traces.iter().filter(|t| !t.matches()).count();
            let _ = writeln!(text, "{} traces, {mismatches} mismatches", m.traces.len());
            Ok(Output::new(
                text,
                json!({"regions": to_value(&m.regions), "s_elements": words_json(&m.b.s_elements), "traces": to_value(&m.traces), "mismatches": mismatches}),
            ))
        }
        Command::BuildB => {
            let m = machinery(cli, 0)?;
            let b = &m.b;
            let text = format!(
                "s: {}\nA basis: {}\nproper: {}\nlimit stems at depth {}: {} in pairs, {} outside C\n",
                join(&b.s_elements),
                join(&b.a_basis),
                b.proper,
                b.depth,
                b.stems_in_pairs,
                b.stems_outside_c
            );
            Ok(Output::new(text, json!({"regions": to_value(&m.regions), "b": to_value(b)})))
        }
        Command::Experiment { name, normal, stage, avoid } => {
            let report = experiment(cli, *name, normal.as_deref(), *stage, avoid.as_deref())?;
            let mut out = report_output(&report);
            if !report.passed() {
                out.code = 1;
            }
            Ok(out)
        }
        Command::Verify { file } => {
            let text = fs::read_to_string(file)
                .map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
            let report = Report::from_json(&text)?;
            let v = verify(&report)?;
            let mut s = String::new();
            for c in &v.checks {
                let _ = writeln!(s, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let _ = writeln!(s, "consistent: {}\nvalid: {}", v.consistent, v.valid);
            let mut out = Output::new(s, to_value(&v));
            if !v.valid {
                out.code = 1;
            }
            Ok(out)
        }
    }
}

fn parse_pairs(text: &str, a: Alphabet) -> Res<Vec<AbsorbingPair>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (p, m) = s
                .split_once('/')
                .ok_or_else(|| usage(format!("pair {s:?} is not of the form plus/minus")))?;
            Ok(AbsorbingPair::new(cylinder(p, a)?, cylinder(m, a)?)?)
        })
        .collect()
}

fn alternating_text(w: &AlternatingWord) -> String {
    let mut parts = Vec::new();
    for b in &w.blocks {
        if let Some(p) = b.s {
            parts.push(format!("s{}{}", p.index + 1, if p.inverse { "^-1" } else { "" }));
        }
        if !b.a.is_identity() {
            parts.push(format!("[{}]", b.a));
        }
    }
    parts.join(" ")
}

fn subgpsep_options(cli: &Cli, traces: usize) -> SubgpsepOptions {
    SubgpsepOptions {
        max_index: cli.max_index(4),
        depth: cli.depth(4),
        seed: cli.seed,
        max_power: cli.max_power(16),
        traces,
        ..Default::default()
    }
}

fn machinery(cli: &Cli, traces: usize) -> Res<Machinery> {
    let a = cli.alphabet(&[])?;
    let h = cli.required_gens(a)?;
    let report = subgpsep_experiment(a, &h, subgpsep_options(cli, traces))?;
    let Certificate::Subgpsep(c) = report.certificate else {
        unreachable!("subgpsep reports carry subgpsep certificates")
    };
    c.machinery
        .ok_or_else(|| Failure::Lib(Error::precondition("H has full limit set or is trivial: no regions to build")))
}

fn experiment(
    cli: &Cli,
    name: ExperimentName,
    normal: Option<&str>,
    stage: Option<usize>,
    avoid: Option<&str>,
) -> Res<Report> {
    let extra: Vec<&str> = normal.into_iter().chain(avoid).collect();
    let a = cli.alphabet(&extra)?;
    Ok(match name {
        ExperimentName::Resfin => {
            let gens = match &cli.gens {
                Some(_) => cli.gens(a)?,
                None => a.generators(),
            };
            let n_text = normal.ok_or_else(|| usage("resfin needs --normal"))?;
            let n = CoreGraph::fold(a, &parse_word_list(n_text, a)?)?;
            resfin_experiment(a, &gens, &n, cli.max_index(4), cli.seed)?
        }
        ExperimentName::Subgpsep => {
            let h = cli.required_gens(a)?;
            subgpsep_experiment(a, &h, subgpsep_options(cli, 64))?
        }
        ExperimentName::Nonengulfed => {
            let avoid = cylinder(avoid.unwrap_or("b"), a)?;
            nonengulfed_experiment(a, cli.max_index(4), stage, &avoid)?
        }
    })
}

fn report_output(r: &Report) -> Output {
    let mut s = String::new();
    let _ = writeln!(s, "experiment: {} (seed {})", r.experiment, r.seed);
    let _ = writeln!(s, "note: {}", r.note);
    for c in &r.checks {
        let _ = writeln!(s, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let _ = writeln!(s, "passed: {}", r.passed());
    Output::new(s, to_value(r))
}

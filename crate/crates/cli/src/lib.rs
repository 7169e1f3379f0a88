//! File formats, reports and subcommands behind the `cascade` binary.

pub mod dot;
pub mod error;
pub mod formats;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cascade_core::components::{boolean_realization, decompose, detect_cascade, recompose, ComponentRule};
use cascade_core::failure::{
    is_prime, maximal_weaknesses_with_cap, min_seed, WeaknessSet, DEFAULT_ENUMERATION_CAP,
};
use cascade_core::laws::{check_laws_with_cap, enumerate_systems_with_cap, DEFAULT_LAW_CAP};
use cascade_core::metrics::{metric_report_from, murank};
use cascade_core::models::realize_monotone;
use cascade_core::recovery::{min_rank_kernel, KernelOperator, OrbitEnd, ProtectedPair};
use cascade_core::{ElemId, Lattice, Measure, ModelSpec, System};
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::formats::{
    base_dir, elems, parse_json, read, ElemRef, LatticeFile, MeasureFile, ModelFile, SystemFile,
};
use crate::report::{rational, AnalysisReport};

/// Largest lattice for which a whole map is printed when no state is given.
const FULL_MAP_CAP: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "cascade", version, about = "Analyse cascading systems as closure operators on finite lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(clap::Args, Debug)]
pub struct Inputs {
    /// Model file (M0..M3); may be repeated.
    #[arg(long, global = true)]
    pub model: Vec<PathBuf>,
    /// System file; may be repeated. Models come before systems.
    #[arg(long, global = true)]
    pub system: Vec<PathBuf>,
    /// Lattice file, for `laws` and `enumerate`.
    #[arg(long, global = true)]
    pub lattice: Option<PathBuf>,
    /// Measure file, or the word `counting` (the default).
    #[arg(long, global = true)]
    pub measure: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Raise the enumeration cap (states for weaknesses, lattice size for laws).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Seed for sampling in `enumerate --sample`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fixed points of the system.
    FixedPoints,
    /// Apply the system to states (all states when none are given).
    Apply {
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// The least fixed point.
    Eval,
    /// `+` of all inputs.
    Combine,
    /// `·` of all inputs.
    Project,
    /// Parts `f·e_I` for every component of a boolean lattice.
    Decompose,
    /// Compare each local rule with how the combined system acts on its component.
    CascadeDetect,
    /// Maximal weaknesses with their μ-ranks and minimal shocks.
    Weaknesses,
    /// Minimal failing shocks.
    Shocks,
    /// Smallest set of initially failed nodes that fails the whole system.
    MinSeed,
    /// μ-rank, fragility and resilience.
    Metrics,
    /// Verdicts on the lattice of systems over `--lattice`.
    Laws,
    /// All systems over `--lattice`.
    Enumerate {
        /// Report only this many systems, drawn with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// A monotone (M3) model realizing the system.
    RealizeM3,
    /// Recovery followed by evolution, from a kernel file or a kernel search.
    Recover {
        /// Kernel file: a system file with `"dual": true`.
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long = "state")]
        states: Vec<String>,
        /// Kernel search: states below this height ...
        #[arg(long, requires = "target_height", conflicts_with = "kernel")]
        source_height: Option<usize>,
        /// ... must end below this height.
        #[arg(long, requires = "source_height")]
        target_height: Option<usize>,
    },
    /// The system in system-file form.
    Export,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FixedPoints => "fixed-points",
            Command::Apply { .. } => "apply",
            Command::Eval => "eval",
            Command::Combine => "combine",
            Command::Project => "project",
            Command::Decompose => "decompose",
            Command::CascadeDetect => "cascade-detect",
            Command::Weaknesses => "weaknesses",
            Command::Shocks => "shocks",
            Command::MinSeed => "min-seed",
            Command::Metrics => "metrics",
            Command::Laws => "laws",
            Command::Enumerate { .. } => "enumerate",
            Command::RealizeM3 => "realize-m3",
            Command::Recover { .. } => "recover",
            Command::Export => "export",
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// What a command produced, in every output format it supports.
struct Output {
    results: Value,
    text: Vec<String>,
    dot: Option<String>,
}

impl Output {
    fn new(results: Value, text: Vec<String>) -> Self {
        Output { results, text, dot: None }
    }
}

/// An input system, with its model when it came from a model file.
struct Loaded {
    system: System,
    model: Option<ModelSpec>,
}

struct Session<'a> {
    inputs: &'a Inputs,
    /// `(role, bytes)` of every file read, for the digest.
    read: Vec<(String, Vec<u8>)>,
}

impl Session<'_> {
    fn load(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = read(path)?;
        self.read.push((role.to_string(), bytes.clone()));
        Ok(bytes)
    }

    fn cap(&self, default: usize) -> usize {
        self.inputs.cap.unwrap_or(default)
    }

    /// All `--model` then all `--system` inputs, over one shared lattice.
    fn systems(&mut self) -> Result<Vec<Loaded>, CliError> {
        let mut out: Vec<Loaded> = Vec::new();
        let mut shared: Option<Lattice> = None;
        for path in &self.inputs.model.clone() {
            let bytes = self.load("model", path)?;
            let spec = parse_json::<ModelFile>(path, &bytes)?.to_spec()?;
            let system = match &shared {
                Some(l) => {
                    if l.boolean_labels() != Some(&spec.ground[..]) {
                        return Err(CliError::invalid(format!(
                            "{}: ground set differs from the first input",
                            path.display()
                        )));
                    }
                    spec.build_on(l)?
                }
                None => spec.build()?,
            };
            shared.get_or_insert_with(|| system.lattice().clone());
            out.push(Loaded { system, model: Some(spec) });
        }
        for path in &self.inputs.system.clone() {
            let bytes = self.load("system", path)?;
            let file: SystemFile = parse_json(path, &bytes)?;
            let own = file.build(&base_dir(path), &mut |p| self.load("lattice", p))?;
            let system = match &shared {
                Some(l) => rehome(&own, l, path)?,
                None => own,
            };
            shared.get_or_insert_with(|| system.lattice().clone());
            out.push(Loaded { system, model: None });
        }
        if out.is_empty() {
            return Err(CliError::invalid("no input: give --model or --system"));
        }
        Ok(out)
    }

    fn one(&mut self) -> Result<Loaded, CliError> {
        let mut all = self.systems()?;
        if all.len() != 1 {
            return Err(CliError::invalid(format!("expected one input system, got {}", all.len())));
        }
        Ok(all.remove(0))
    }

    fn lattice(&mut self) -> Result<Lattice, CliError> {
        let path = self
            .inputs
            .lattice
            .clone()
            .ok_or_else(|| CliError::invalid("this command needs --lattice"))?;
        let bytes = self.load("lattice", &path)?;
        parse_json::<LatticeFile>(&path, &bytes)?.build()
    }

    fn measure(&mut self, l: &Lattice) -> Result<Measure, CliError> {
        match self.inputs.measure.clone() {
            None => Ok(Measure::counting(l)),
            Some(m) if m == "counting" => Ok(Measure::counting(l)),
            Some(m) => {
                let path = PathBuf::from(m);
                let bytes = self.load("measure", &path)?;
                parse_json::<MeasureFile>(&path, &bytes)?.build(l)
            }
        }
    }

    fn states(&self, l: &Lattice, given: &[String]) -> Result<Vec<ElemId>, CliError> {
        if given.is_empty() {
            if l.size() > FULL_MAP_CAP {
                return Err(CliError::Capability(format!(
                    "listing all {} states exceeds the limit of {FULL_MAP_CAP}; pass --state",
                    l.size()
                )));
            }
            return Ok(l.elements().collect());
        }
        given.iter().map(|s| Ok(l.parse(s)?)).collect()
    }
}

/// The same system over a structurally equal lattice instance.
fn rehome(f: &System, target: &Lattice, path: &Path) -> Result<System, CliError> {
    if !f.lattice().structurally_equal(target) {
        return Err(CliError::invalid(format!(
            "{}: lattice differs from the first input",
            path.display()
        )));
    }
    let points = f
        .fixed_points()?
        .into_iter()
        .map(|e| target.elem(e.index()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(System::from_fixed_points(target, points)?)
}

fn label(l: &Lattice, e: ElemId) -> String {
    l.label(e).expect("own element")
}

fn labels(l: &Lattice, points: &[ElemId]) -> String {
    points.iter().map(|&e| label(l, e)).collect::<Vec<_>>().join(" ")
}

fn elem(l: &Lattice, e: ElemId) -> Value {
    serde_json::to_value(ElemRef::of(l, e)).expect("element serializes")
}

fn elem_list(l: &Lattice, points: &[ElemId]) -> Value {
    serde_json::to_value(elems(l, points)).expect("elements serialize")
}

fn members(l: &Lattice, set: &cascade_core::BitSet) -> Result<Vec<ElemId>, CliError> {
    Ok(set.iter().map(|i| l.elem(i)).collect::<Result<Vec<_>, _>>()?)
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut s = Session { inputs: &cli.inputs, read: Vec::new() };
    let out = dispatch(&cli.command, &mut s)?;
    match cli.inputs.format {
        Format::Json => Ok(AnalysisReport::new(cli.command.name(), &s.read, out.results).to_json()),
        Format::Text => {
            let mut text = out.text.join("\n");
            text.push('\n');
            Ok(text)
        }
        Format::Dot => out.dot.ok_or_else(|| {
            CliError::invalid(format!("`{}` has no dot output", cli.command.name()))
        }),
    }
}

fn dispatch(command: &Command, s: &mut Session) -> Result<Output, CliError> {
    match command {
        Command::FixedPoints => fixed_points(s),
        Command::Apply { states } => apply(s, states),
        Command::Eval => {
            let f = s.one()?.system;
            let l = f.lattice();
            let e = f.eval();
            Ok(Output::new(json!({ "eval": elem(l, e) }), vec![format!("eval: {}", label(l, e))]))
        }
        Command::Combine => fold(s, "+"),
        Command::Project => fold(s, "·"),
        Command::Decompose => decompose_cmd(s),
        Command::CascadeDetect => cascade(s),
        Command::Weaknesses => weaknesses(s),
        Command::Shocks => shocks(s),
        Command::MinSeed => {
            let f = s.one()?.system;
            let l = f.lattice();
            let (size, witness) = min_seed(&f)?;
            Ok(Output::new(
                json!({ "size": size, "witness": elem(l, witness) }),
                vec![format!("min seed: {size} ({})", label(l, witness))],
            ))
        }
        Command::Metrics => metrics(s),
        Command::Laws => laws(s),
        Command::Enumerate { sample } => enumerate(s, *sample),
        Command::RealizeM3 => realize(s),
        Command::Recover {
            kernel,
            states,
            source_height,
            target_height,
        } => recover(s, kernel.as_deref(), states, source_height.zip(*target_height)),
        Command::Export => {
            let loaded = s.one()?;
            let file = SystemFile::describe(&loaded.system)?;
            let mut results = json!({ "system": file });
            if let Some(spec) = &loaded.model {
                results["model"] = serde_json::to_value(ModelFile::describe(spec)).expect("model serializes");
            }
            let text = serde_json::to_string_pretty(&file).expect("system serializes");
            Ok(Output::new(results, vec![text]))
        }
    }
}

fn fixed_points(s: &mut Session) -> Result<Output, CliError> {
    let loaded = s.one()?;
    let f = &loaded.system;
    let l = f.lattice();
    let points = f.fixed_points()?;
    let results = json!({
        "fixed_points": elem_list(l, &points),
        "count": points.len(),
        "states": l.size(),
        "rank": l.size() - points.len(),
        "model": loaded.model.as_ref().map(|m| m.tag()),
    });
    let text = vec![
        format!("fixed points ({} of {}): {}", points.len(), l.size(), labels(l, &points)),
        format!("rank: {}", l.size() - points.len()),
    ];
    let mut out = Output::new(results, text);
    out.dot = Some(dot::lattice(l, &points)?);
    Ok(out)
}

fn apply(s: &mut Session, given: &[String]) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let l = f.lattice();
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for a in s.states(l, given)? {
        let fa = f.apply(a)?;
        rows.push(json!({ "state": elem(l, a), "image": elem(l, fa) }));
        text.push(format!("{} -> {}", label(l, a), label(l, fa)));
    }
    Ok(Output::new(json!({ "map": rows }), text))
}

fn fold(s: &mut Session, op: &str) -> Result<Output, CliError> {
    let all = s.systems()?;
    if all.len() < 2 {
        return Err(CliError::invalid(format!("`{op}` needs at least two inputs")));
    }
    let mut acc = all[0].system.clone();
    for next in &all[1..] {
        acc = if op == "+" {
            acc.combine(&next.system)?
        } else {
            acc.project(&next.system)?
        };
    }
    let l = acc.lattice();
    let points = acc.fixed_points()?;
    let results = json!({
        "operator": op,
        "operands": all.len(),
        "fixed_points": elem_list(l, &points),
        "system": SystemFile::describe(&acc)?,
    });
    Ok(Output::new(results, vec![format!("fixed points: {}", labels(l, &points))]))
}

fn model_rules(spec: &ModelSpec) -> Vec<ComponentRule> {
    vec![ComponentRule::Model(spec.clone()); spec.ground.len()]
}

fn decompose_cmd(s: &mut Session) -> Result<Output, CliError> {
    let loaded = s.one()?;
    let f = &loaded.system;
    let l = f.lattice();
    let r = boolean_realization(l)?;
    let parts = decompose(f, &r)?;
    let flags: Option<Vec<bool>> = match &loaded.model {
        Some(spec) => Some(
            detect_cascade(&model_rules(spec), &r)?
                .components
                .iter()
                .map(|c| c.cascade)
                .collect(),
        ),
        None => None,
    };
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let points = part.fixed_points()?;
        let cascade = flags.as_ref().map(|v| v[i]);
        rows.push(json!({
            "label": r.factor_labels()[i],
            "fixed_points": elem_list(l, &points),
            "cascade": cascade,
        }));
        let flag = match cascade {
            Some(true) => " [cascade]",
            _ => "",
        };
        text.push(format!("{}: {}{flag}", r.factor_labels()[i], labels(l, &points)));
    }
    let recomposes = recompose(l, &parts)? == *f;
    text.push(format!("sum of parts equals f: {recomposes}"));
    Ok(Output::new(json!({ "components": rows, "recomposes": recomposes }), text))
}

fn cascade(s: &mut Session) -> Result<Output, CliError> {
    let all = s.systems()?;
    let l = all[0].system.lattice().clone();
    let r = boolean_realization(&l)?;
    let rules: Vec<ComponentRule> = match (&all[..], &all[0].model) {
        ([_], Some(spec)) => model_rules(spec),
        _ => all.iter().map(|x| ComponentRule::System(x.system.clone())).collect(),
    };
    let report = detect_cascade(&rules, &r)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for c in &report.components {
        let (rule, projected) = (c.rule.fixed_points()?, c.projected.fixed_points()?);
        rows.push(json!({
            "label": c.label,
            "rule_fixed_points": elem_list(&l, &rule),
            "projected_fixed_points": elem_list(&l, &projected),
            "cascade": c.cascade,
        }));
        text.push(format!(
            "{}: rule {} | combined {}{}",
            c.label,
            labels(&l, &rule),
            labels(&l, &projected),
            if c.cascade { " [cascade]" } else { "" }
        ));
    }
    let combined = report.combined.fixed_points()?;
    let cascading = report.cascading_labels();
    text.push(format!("cascading: {}", cascading.join(" ")));
    let results = json!({
        "components": rows,
        "cascading": cascading,
        "combined_fixed_points": elem_list(&l, &combined),
    });
    Ok(Output::new(results, text))
}

fn weakness_set(s: &Session, f: &System) -> Result<WeaknessSet, CliError> {
    Ok(maximal_weaknesses_with_cap(f, s.cap(DEFAULT_ENUMERATION_CAP))?)
}

fn weaknesses(s: &mut Session) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let l = f.lattice();
    let mu = s.measure(l)?;
    let ws = weakness_set(s, &f)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for ((t, w), shock) in ws.non_fixed.iter().zip(&ws.weaknesses).zip(&ws.minimal_shocks) {
        let non_fixed = members(l, t)?;
        let r = murank(w, &mu)?;
        rows.push(json!({
            "non_fixed": elem_list(l, &non_fixed),
            "murank": rational(&r),
            "minimal_shock": elem_list(l, &shock.fixed_points()?),
        }));
        text.push(format!("weakness: {} (rank {})", labels(l, &non_fixed), r));
    }
    let results = json!({ "count": ws.len(), "prime": is_prime(&f)?, "weaknesses": rows });
    Ok(Output::new(results, text))
}

fn shocks(s: &mut Session) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let l = f.lattice();
    let mu = s.measure(l)?;
    let ws = weakness_set(s, &f)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for shock in &ws.minimal_shocks {
        let points = shock.fixed_points()?;
        let r = murank(shock, &mu)?;
        rows.push(json!({ "fixed_points": elem_list(l, &points), "murank": rational(&r) }));
        text.push(format!("shock: {} (rank {})", labels(l, &points), r));
    }
    let unique = match &ws.minimal_shocks[..] {
        [only] => Some(elem_list(l, &only.fixed_points()?)),
        _ => None,
    };
    let report = metric_report_from(&f, &ws, &mu)?;
    let results = json!({
        "minimal_shocks": rows,
        "prime": is_prime(&f)?,
        "unique_minimal_shock": unique,
        "resilience": rational(&report.resilience),
    });
    Ok(Output::new(results, text))
}

fn metrics(s: &mut Session) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let l = f.lattice();
    let mu = s.measure(l)?;
    let ws = weakness_set(s, &f)?;
    let r = metric_report_from(&f, &ws, &mu)?;
    let results = json!({
        "rank": rational(&r.rank),
        "fragility": rational(&r.fragility),
        "resilience": rational(&r.resilience),
        "rank_of_top": rational(&r.rank_of_top),
        "identity_holds": r.identity_holds,
        "gap": rational(&r.gap),
        "top_weight_ignored": r.top_weight_ignored,
        "prime": is_prime(&f)?,
        "weakness_count": ws.len(),
        "measure": if mu.is_counting() { "counting" } else { "explicit" },
    });
    let text = vec![
        format!("rank: {}", r.rank),
        format!("fragility: {}", r.fragility),
        format!("resilience: {}", r.resilience),
        format!("rank of top: {}", r.rank_of_top),
        format!("fragility + resilience = rank of top: {}", r.identity_holds),
    ];
    Ok(Output::new(results, text))
}

fn fixed_list(f: &System) -> Result<Value, CliError> {
    Ok(elem_list(f.lattice(), &f.fixed_points()?))
}

fn laws(s: &mut Session) -> Result<Output, CliError> {
    let l = s.lattice()?;
    let cap = s.cap(DEFAULT_LAW_CAP);
    let r = check_laws_with_cap(&l, cap)?;
    let triple = |w: &Option<[System; 3]>| -> Result<Value, CliError> {
        match w {
            Some(t) => Ok(Value::Array(t.iter().map(fixed_list).collect::<Result<_, _>>()?)),
            None => Ok(Value::Null),
        }
    };
    let results = json!({
        "system_count": r.system_count,
        "semimodular": r.semimodular,
        "state_lattice_is_chain": r.state_lattice_is_chain,
        "distributive": r.distributive,
        "modular": r.modular,
        "graded": r.graded,
        "coatomistic": r.coatomistic,
        "join_generated": r.join_generated,
        "join_irreducibles_from_covers": r.join_irreducibles_from_covers,
        "join_irreducible_count": r.join_irreducible_count,
        "fixed_point_isomorphism": r.fixed_point_isomorphism,
        "rank_inequality": r.rank_inequality,
        "non_prime": r.non_prime.iter().map(fixed_list).collect::<Result<Vec<_>, _>>()?,
        "non_modular_pairs": r
            .non_modular_pairs
            .iter()
            .map(|(a, b)| Ok(json!([fixed_list(a)?, fixed_list(b)?])))
            .collect::<Result<Vec<_>, CliError>>()?,
        "distributivity_witness": triple(&r.distributivity_witness)?,
        "modularity_witness": triple(&r.modularity_witness)?,
    });
    let pass = |b: bool| if b { "pass" } else { "fail" };
    let mut text = vec![
        format!("systems: {}", r.system_count),
        format!("semimodular: {}", pass(r.semimodular)),
        format!("graded: {}", pass(r.graded)),
        format!("coatomistic: {}", pass(r.coatomistic)),
        format!("join-generated: {}", pass(r.join_generated)),
        format!("distributive: {}", pass(r.distributive)),
        format!("modular: {}", pass(r.modular)),
        format!("rank inequality: {}", pass(r.rank_inequality)),
    ];
    for f in &r.non_prime {
        text.push(format!("non-prime: {}", dot::system_label(f)?));
    }
    for (a, b) in &r.non_modular_pairs {
        text.push(format!("non-modular pair: {} {}", dot::system_label(a)?, dot::system_label(b)?));
    }
    let mut out = Output::new(results, text);
    out.dot = Some(dot::systems(&enumerate_systems_with_cap(&l, cap)?)?);
    Ok(out)
}

fn enumerate(s: &mut Session, sample: Option<usize>) -> Result<Output, CliError> {
    let l = s.lattice()?;
    let all = enumerate_systems_with_cap(&l, s.cap(DEFAULT_LAW_CAP))?;
    let mut picked: Vec<usize> = (0..all.len()).collect();
    if let Some(n) = sample {
        let mut rng = ChaCha8Rng::seed_from_u64(s.inputs.seed);
        picked.shuffle(&mut rng);
        picked.truncate(n);
        picked.sort_unstable();
    }
    let systems = picked.iter().map(|&i| fixed_list(&all[i])).collect::<Result<Vec<_>, _>>()?;
    let text = picked
        .iter()
        .map(|&i| dot::system_label(&all[i]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut results = json!({ "count": all.len(), "systems": systems });
    if sample.is_some() {
        results["seed"] = json!(s.inputs.seed);
    }
    let mut out = Output::new(results, text);
    out.dot = Some(dot::systems(&picked.iter().map(|&i| all[i].clone()).collect::<Vec<_>>())?);
    Ok(out)
}

fn realize(s: &mut Session) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let spec = realize_monotone(&f)?;
    let round_trip = spec.build_on(f.lattice())? == f;
    let file = ModelFile::describe(&spec);
    let text = serde_json::to_string_pretty(&file).expect("model serializes");
    Ok(Output::new(json!({ "model": file, "round_trip": round_trip }), vec![text]))
}

fn recover(
    s: &mut Session,
    kernel: Option<&Path>,
    given: &[String],
    search: Option<(usize, usize)>,
) -> Result<Output, CliError> {
    let f = s.one()?.system;
    let l = f.lattice().clone();
    let mu = s.measure(&l)?;
    let k = match (kernel, search) {
        (Some(path), _) => {
            let bytes = s.load("kernel", path)?;
            let file: SystemFile = parse_json(path, &bytes)?;
            let own = file.build_kernel(&base_dir(path), &mut |p| s.load("lattice", p))?;
            if !own.lattice().structurally_equal(&l) {
                return Err(CliError::invalid(format!(
                    "{}: kernel lattice differs from the system's",
                    path.display()
                )));
            }
            let points = own
                .fixed_points()?
                .into_iter()
                .map(|e| l.elem(e.index()))
                .collect::<Result<Vec<_>, _>>()?;
            KernelOperator::from_fixed_points(&l, points)?
        }
        (None, Some((source, target))) => match min_rank_kernel(&f, &mu, source, target)? {
            Some((k, _)) => k,
            None => {
                return Ok(Output::new(
                    json!({ "kernel": null, "source_height": source, "target_height": target }),
                    vec!["no kernel meets the height budget".into()],
                ))
            }
        },
        (None, None) => KernelOperator::identity(&l),
    };
    let rank = k.murank(&mu)?;
    let kernel_file = SystemFile::describe_kernel(&k)?;
    let pair = ProtectedPair::new(k.clone(), f)?;
    let mut rows = Vec::new();
    let mut text = vec![format!("kernel keeps: {}", labels(&l, &k.fixed_points()?))];
    for a in s.states(&l, given)? {
        let orbit = pair.orbit(a)?;
        let end = match orbit.end {
            OrbitEnd::FixedPoint => json!("fixed-point"),
            OrbitEnd::Cycle { start, period } => json!({ "cycle": { "start": start, "period": period } }),
        };
        rows.push(json!({
            "state": elem(&l, a),
            "recovered": elem(&l, k.apply(a)?),
            "next": elem(&l, pair.apply(a)?),
            "orbit": elem_list(&l, &orbit.states),
            "end": end,
        }));
        text.push(format!("{}: {}", label(&l, a), labels(&l, &orbit.states).replace(' ', " -> ")));
    }
    let mut results = json!({
        "kernel": kernel_file,
        "kernel_murank": rational(&rank),
        "transitions": rows,
    });
    if let Some((source, target)) = search {
        results["source_height"] = json!(source);
        results["target_height"] = json!(target);
    }
    Ok(Output::new(results, text))
}

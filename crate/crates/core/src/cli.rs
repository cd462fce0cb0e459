//! Command-line interface: phase mapping, region extraction, dataset
//! generation, solving, translation, prompting, statistics and the k-SAT
//! baseline.
//!
//! [`run`] returns the process exit code: 0 success, 1 usage error, 2 data
//! error, 3 resource or time budget exhausted. Logs go to standard error;
//! data goes to files or standard output. Every file artifact carries the
//! resolved configuration (and its hash) in a header or sidecar, and
//! `--config <file>` accepts either a flat JSON object keyed by flag name
//! or such an artifact, so runs can be repeated exactly.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::datagen::{
    self, build_dataset, dataset_report, read_jsonl, write_jsonl, write_prompts, zero_shot_dataset, zero_shot_prompt,
    DataError, GenConfig, LabeledInstance, N1Law, PromptStyle,
};
use crate::grammar::{parse, split_sentences, FragmentTag, GrammarError, Vocabulary};
use crate::logic::{render_fol, to_smtlib, translate, Formula, LogicError, Signature};
use crate::phasemap::{
    crossing, extract_region, ksat_psat, load_grid, load_region, map_region, write_grid, write_region, Axis, GridSpec,
    PhaseError, Sampler,
};
use crate::solver::{solve_sentences, Branching, CnfOptions, Outcome, SolveOptions, SolverError};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GrammarError> for CliError {
    fn from(e: GrammarError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LogicError> for CliError {
    fn from(e: LogicError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Timeout | SolverError::ResourceLimit(_) => CliError::Budget(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PhaseError> for CliError {
    fn from(e: PhaseError) -> Self {
        match e {
            PhaseError::Budget(_) => CliError::Budget(e.to_string()),
            PhaseError::Solver(s) => s.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::QuotaUnreachable { .. } => CliError::Budget(e.to_string()),
            DataError::Solver(s) => s.into(),
            DataError::Phase(p) => p.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Inclusive integer range written `lo:hi` (or a single value).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub struct IntRange(pub usize, pub usize);

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad integer {t:?} in range {s:?}"));
        let r = match s.split_once(':') {
            Some((a, b)) => IntRange(num(a)?, num(b)?),
            None => IntRange(num(s)?, num(s)?),
        };
        if r.0 > r.1 {
            return Err(format!("empty range {s:?}"));
        }
        Ok(r)
    }
}

impl From<IntRange> for String {
    fn from(r: IntRange) -> String {
        format!("{}:{}", r.0, r.1)
    }
}

/// Real interval `min:max`, with an optional third `:step` part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "String")]
pub struct Span {
    pub min: f64,
    pub max: f64,
    pub step: Option<f64>,
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in {s:?}")))
            .collect::<Result<_, _>>()?;
        let span = match parts[..] {
            [min, max] => Span { min, max, step: None },
            [min, max, step] => Span { min, max, step: Some(step) },
            _ => return Err(format!("expected min:max or min:max:step, got {s:?}")),
        };
        if span.min.is_nan()
            || span.max.is_nan()
            || span.min > span.max
            || span.step.is_some_and(|st| st.is_nan() || st <= 0.0)
        {
            return Err(format!("invalid interval {s:?}"));
        }
        Ok(span)
    }
}

impl From<Span> for String {
    fn from(s: Span) -> String {
        match s.step {
            Some(step) => format!("{}:{}:{}", s.min, s.max, step),
            None => format!("{}:{}", s.min, s.max),
        }
    }
}

fn fragment_arg(s: &str) -> Result<FragmentTag, String> {
    s.parse().map_err(|e: GrammarError| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LawArg {
    Uniform,
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Target {
    Fol,
    Smtlib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StyleArg {
    Satisfiable,
    Truefalse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BranchArg {
    Lowest,
    Shortest,
}

#[derive(Debug, Parser)]
#[command(
    name = "fragsat",
    version,
    about = "Satisfiability of controlled English fragments",
    max_term_width = 100,
    args_override_self = true
)]
struct Cli {
    /// Flat JSON object of flag values, or an artifact whose header embeds one; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores); results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate P(sat) over an (alpha, beta) grid
    #[command(args_override_self = true)]
    PhaseMap(PhaseMapArgs),
    /// Extract the cells of a grid whose P(sat) lies in [lo, hi]
    #[command(args_override_self = true)]
    Region(RegionArgs),
    /// Generate a labeled, balanced dataset inside a region
    #[command(args_override_self = true)]
    Gen(GenArgs),
    /// Decide satisfiability of sentence sets
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Translate sentence sets to first-order logic or SMT-LIB
    #[command(args_override_self = true)]
    Translate(TranslateArgs),
    /// Render zero-shot prompts for a dataset split
    #[command(args_override_self = true)]
    Prompt(PromptArgs),
    /// Dataset statistics as aligned text or CSV
    #[command(args_override_self = true)]
    Stats(StatsArgs),
    /// P(sat) of random k-CNF against the clause/variable ratio
    #[command(args_override_self = true)]
    Ksat(KsatArgs),
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct PhaseMapArgs {
    /// Fragment: S, W, V, Z or A
    #[arg(long, value_parser = fragment_arg)]
    fragment: FragmentTag,
    /// Noun-count range lo:hi
    #[arg(long)]
    n1: IntRange,
    /// Verb-count range lo:hi (fragments with transitive verbs)
    #[arg(long)]
    n2: Option<IntRange>,
    /// alpha = m/n1 interval min:max
    #[arg(long)]
    alpha: Span,
    /// beta = m/n2 interval min:max (fragments with transitive verbs)
    #[arg(long)]
    beta: Option<Span>,
    /// Grid step on both axes
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    /// Samples per grid cell
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver node budget per instance
    #[arg(long, default_value_t = 10_000_000)]
    node_budget: u64,
    /// Output grid CSV
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct RegionArgs {
    /// Grid CSV written by phase-map
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 0.35)]
    lo: f64,
    #[arg(long, default_value_t = 0.65)]
    hi: f64,
    /// Output region CSV
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct GenArgs {
    /// Fragment: S, W, V, Z or A
    #[arg(long, value_parser = fragment_arg)]
    fragment: FragmentTag,
    /// Region CSV written by the region command
    #[arg(long)]
    region: PathBuf,
    #[arg(long, default_value_t = 0)]
    train: usize,
    #[arg(long, default_value_t = 0)]
    eval: usize,
    #[arg(long, default_value_t = 0)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noun-count range (default 6:16 for S/W, 3:8 otherwise)
    #[arg(long)]
    n1: Option<IntRange>,
    /// Verb-count range (default 3:8)
    #[arg(long)]
    n2: Option<IntRange>,
    /// Noun-count law (default normal for S/W, uniform otherwise)
    #[arg(long, value_enum)]
    n1_law: Option<LawArg>,
    /// Forbid repeating a noun or verb within one sentence
    #[arg(long)]
    distinct_slots: bool,
    /// Solver node budget per instance
    #[arg(long, default_value_t = 10_000_000)]
    node_budget: u64,
    /// Candidates tried per requested instance before giving up
    #[arg(long, default_value_t = 200)]
    candidate_factor: usize,
    /// Store a model with every satisfiable record
    #[arg(long)]
    keep_models: bool,
    /// Record solver wall time in solver_ms (output becomes machine-dependent)
    #[arg(long)]
    timing: bool,
    /// Emit the zero-shot layout (200 per n = n1 + n2, n in 5..=10) instead of splits
    #[arg(long)]
    zero_shot: bool,
    /// Instances per n in the zero-shot layout
    #[arg(long, default_value_t = 200)]
    per_n: usize,
    /// Output directory
    #[arg(long)]
    #[serde(skip)]
    out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct SolveArgs {
    /// JSONL records, or plain text with one sentence per line and blank lines between sets
    #[serde(rename = "in")]
    #[arg(long = "in", conflicts_with = "text", required_unless_present = "text")]
    input: Option<PathBuf>,
    /// Sentences separated by full stops
    #[arg(long)]
    text: Option<String>,
    /// Fragment (required for plain text)
    #[arg(long, value_parser = fragment_arg)]
    fragment: Option<FragmentTag>,
    /// Print a model after every sat verdict
    #[arg(long)]
    emit_model: bool,
    #[arg(long, default_value_t = 10_000_000)]
    node_budget: u64,
    /// Wall-clock budget per set in seconds (0 disables)
    #[arg(long, default_value_t = 30.0)]
    wall_secs: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct TranslateArgs {
    /// JSONL records, or plain text with one sentence per line and blank lines between sets
    #[serde(rename = "in")]
    #[arg(long = "in")]
    input: PathBuf,
    /// Fragment (required for plain text)
    #[arg(long, value_parser = fragment_arg)]
    fragment: Option<FragmentTag>,
    #[arg(long, value_enum, default_value_t = Target::Fol)]
    to: Target,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct PromptArgs {
    /// Dataset JSONL
    #[serde(rename = "in")]
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    style: StyleArg,
    /// Record used as the labeled example of the truefalse style
    #[arg(long)]
    example_id: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct StatsArgs {
    /// Dataset JSONL
    #[serde(rename = "in")]
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; CSV when it ends in .csv, aligned text otherwise
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct KsatArgs {
    /// Literals per clause
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Variables
    #[arg(long, default_value_t = 150)]
    n: usize,
    /// Clause/variable ratios min:max:step
    #[arg(long, default_value = "3.5:5.0:0.1")]
    ratios: Span,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// DPLL branching rule
    #[arg(long, value_enum, default_value_t = BranchArg::Shortest)]
    branching: BranchArg,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

/// Header embedded in artifacts: the command, its resolved flags and their hash.
#[derive(Serialize)]
struct Provenance<'a, T: Serialize> {
    command: &'a str,
    config: &'a T,
    hash: String,
}

fn provenance<T: Serialize>(command: &str, config: &T) -> Result<String, CliError> {
    let json = serde_json::to_string(config)?;
    let hash = hex::encode(&Sha256::digest(json.as_bytes())[..8]);
    Ok(serde_json::to_string(&Provenance { command, config, hash })?)
}

/// Files created by the current command, deleted again if it fails.
#[derive(Default)]
struct Outputs(Vec<PathBuf>);

impl Outputs {
    fn create(&mut self, path: &Path) -> Result<BufWriter<File>, CliError> {
        let file = File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        self.0.push(path.to_path_buf());
        Ok(BufWriter::new(file))
    }

    fn register(&mut self, path: &Path) {
        self.0.push(path.to_path_buf());
    }

    fn discard(&self) {
        for p in &self.0 {
            let _ = fs::remove_file(p);
        }
    }
}

/// Expands `--config FILE` into flags placed before the explicit ones, so
/// explicit flags override file values.
fn expand_config(argv: &[String]) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut rest = Vec::new();
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let first = text.lines().next().unwrap_or_default();
    let value: serde_json::Value = match first.trim_start_matches(['#', ';', ' ']) {
        header if first.starts_with(['#', ';']) => {
            let v: serde_json::Value =
                serde_json::from_str(header).map_err(|e| CliError::Usage(format!("{path}: unreadable header: {e}")))?;
            v.get("config").cloned().ok_or_else(|| CliError::Usage(format!("{path}: header has no config")))?
        }
        _ => serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?,
    };
    let serde_json::Value::Object(map) = value else {
        return Err(CliError::Usage(format!("{path}: config must be a JSON object")));
    };
    let mut flags = Vec::new();
    for (key, v) in map {
        match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => {}
            serde_json::Value::Bool(true) => flags.push(format!("--{key}")),
            serde_json::Value::String(s) => flags.extend([format!("--{key}"), s]),
            serde_json::Value::Number(n) => flags.extend([format!("--{key}"), n.to_string()]),
            _ => return Err(CliError::Usage(format!("{path}: value of {key} must be a scalar"))),
        }
    }
    // program name, then the subcommand, then file flags, then explicit flags
    let sub = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1);
    let Some(sub) = sub else {
        return Ok(rest);
    };
    let mut out: Vec<String> = rest[..=sub].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[sub + 1..]);
    Ok(out)
}

/// Runs the command line `argv` (including the program name) and returns
/// the exit code.
pub fn run(argv: &[String]) -> i32 {
    run_with_output(argv, &mut io::stdout())
}

/// Like [`run`], writing standard output (including `--help`) into `stdout`.
pub fn run_with_output<W: Write + Send>(argv: &[String], stdout: &mut W) -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let cli = match expand_config(argv).and_then(|argv| {
        Cli::try_parse_from(&argv).map_err(|e| {
            if e.use_stderr() {
                let _ = e.print();
                CliError::Usage(String::new())
            } else {
                let _ = write!(stdout, "{}", e.render());
                CliError::Usage("help".into())
            }
        })
    }) {
        Ok(cli) => cli,
        Err(CliError::Usage(m)) if m == "help" => return 0,
        Err(e) => {
            if !e.to_string().is_empty() {
                eprintln!("error: {e}");
            }
            return e.code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut outputs = Outputs::default();
    match pool.install(|| execute(cli.command, &mut outputs, stdout)) {
        Ok(()) => 0,
        Err(e) => {
            outputs.discard();
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn execute<W: Write>(command: Command, outputs: &mut Outputs, stdout: &mut W) -> Result<(), CliError> {
    match command {
        Command::PhaseMap(a) => phase_map(&a, outputs),
        Command::Region(a) => region(&a, outputs),
        Command::Gen(a) => gen(&a, outputs),
        Command::Solve(a) => solve_cmd(&a, stdout),
        Command::Translate(a) => translate_cmd(&a, outputs),
        Command::Prompt(a) => prompt(&a, outputs),
        Command::Stats(a) => stats(&a, outputs),
        Command::Ksat(a) => ksat(&a, outputs),
    }
}

fn phase_map(a: &PhaseMapArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let beta = match (a.fragment.has_verbs(), a.beta) {
        (true, None) => return Err(CliError::Usage(format!("fragment {} needs --beta", a.fragment))),
        (false, Some(_)) => return Err(CliError::Usage(format!("fragment {} takes no --beta", a.fragment))),
        (_, b) => b.map(|b| Axis::new(b.min, b.max, a.step)),
    };
    let n2 = match (a.fragment.has_verbs(), a.n2) {
        (true, None) => return Err(CliError::Usage(format!("fragment {} needs --n2", a.fragment))),
        (true, Some(r)) => (r.0, r.1),
        (false, _) => (0, 0),
    };
    let spec = GridSpec {
        fragment: a.fragment,
        alpha: Axis::new(a.alpha.min, a.alpha.max, a.step),
        beta,
        n1: (a.n1.0, a.n1.1),
        n2,
        samples: a.samples,
        seed: a.seed,
    };
    let mut sampler = Sampler::default();
    sampler.solve.node_budget = a.node_budget;
    info!("phase-map {} spec {}", a.fragment, spec.hash());
    let grid = map_region(&spec, &sampler)?;
    write_grid(outputs.create(&a.out)?, &grid)?;
    info!("{} cells written to {}", grid.cells.len(), a.out.display());
    Ok(())
}

fn region(a: &RegionArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let grid = load_grid(&a.grid)?;
    let region = extract_region(&grid, a.lo, a.hi)?;
    if region.is_empty() {
        log::warn!("no cell of {} has P(sat) in [{}, {}]", a.grid.display(), a.lo, a.hi);
    }
    write_region(outputs.create(&a.out)?, &region)?;
    info!("{} region cells written to {}", region.cells.len(), a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct GenMeta<'a> {
    provenance: serde_json::Value,
    config: &'a GenConfig,
    config_hash: String,
    region: String,
    stats: Option<datagen::GenStats>,
    files: Vec<(String, usize)>,
}

fn gen(a: &GenArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let region = load_region(&a.region)?;
    let vocab = Vocabulary::default_english();
    let mut config = GenConfig::new(a.fragment, a.train, a.eval, a.test, a.seed);
    if let Some(r) = a.n1 {
        config.n1 = (r.0, r.1);
    }
    if let Some(r) = a.n2 {
        config.n2 = (r.0, r.1);
    }
    if let Some(law) = a.n1_law {
        config.n1_law = match law {
            LawArg::Uniform => N1Law::Uniform,
            LawArg::Normal => N1Law::DiscretizedNormal,
        };
    }
    config.distinct_slots = a.distinct_slots;
    config.node_budget = a.node_budget;
    config.candidate_factor = a.candidate_factor;
    config.keep_models = a.keep_models;
    config.record_timing = a.timing;
    config.validate()?;
    if region.fragment != a.fragment {
        return Err(DataError::RegionMismatch { expected: a.fragment, found: region.fragment }.into());
    }
    fs::create_dir_all(&a.out_dir)?;
    let mut files = Vec::new();
    let mut stats = None;
    if a.zero_shot {
        let instances = zero_shot_dataset(a.fragment, &region, &vocab, a.per_n, a.seed)?;
        let path = a.out_dir.join("zero_shot.jsonl");
        outputs.register(&path);
        write_jsonl(&path, &instances)?;
        files.push(("zero_shot.jsonl".to_string(), instances.len()));
    } else {
        if config.total() == 0 {
            return Err(CliError::Usage("nothing to generate: give --train, --eval or --test".into()));
        }
        let (splits, s) = build_dataset(&config, &region, &vocab)?;
        for (name, part) in splits.iter() {
            let file = format!("{name}.jsonl");
            let path = a.out_dir.join(&file);
            outputs.register(&path);
            write_jsonl(&path, part)?;
            files.push((file, part.len()));
        }
        stats = Some(s);
    }
    let meta = GenMeta {
        provenance: serde_json::from_str(&provenance("gen", a)?)?,
        config_hash: config.hash(),
        config: &config,
        region: region.spec.hash(),
        stats,
        files,
    };
    let mut out = outputs.create(&a.out_dir.join("meta.json"))?;
    serde_json::to_writer_pretty(&mut out, &meta)?;
    out.write_all(b"\n")?;
    out.flush()?;
    info!("dataset written to {}", a.out_dir.display());
    Ok(())
}

/// One sentence set from an input file, with the fragment it declares.
struct SentenceSet {
    id: String,
    fragment: FragmentTag,
    sentences: Vec<String>,
}

fn read_sets(path: &Path, fragment: Option<FragmentTag>) -> Result<Vec<SentenceSet>, CliError> {
    let mut text = String::new();
    File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?.read_to_string(&mut text)?;
    if text.trim_start().starts_with('{') {
        let records = datagen::load_jsonl(text.as_bytes())?;
        return Ok(records
            .into_iter()
            .map(|r| SentenceSet { id: r.id, fragment: fragment.unwrap_or(r.fragment), sentences: r.sentences })
            .collect());
    }
    let fragment = fragment.ok_or_else(|| CliError::Usage("plain-text input needs --fragment".into()))?;
    let mut sets = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for line in text.lines().chain(std::iter::once("")) {
        if line.trim().is_empty() {
            if !current.is_empty() {
                sets.push(SentenceSet {
                    id: format!("{}", sets.len()),
                    fragment,
                    sentences: std::mem::take(&mut current),
                });
            }
        } else if !line.trim_start().starts_with('#') {
            current.extend(split_sentences(line));
        }
    }
    Ok(sets)
}

fn formulas_of(set: &SentenceSet, vocab: &Vocabulary) -> Result<Vec<Formula>, CliError> {
    set.sentences.iter().map(|s| Ok(translate(&parse(s, set.fragment, vocab)?, vocab)?)).collect()
}

fn solve_cmd<W: Write>(a: &SolveArgs, stdout: &mut W) -> Result<(), CliError> {
    let sets = match (&a.input, &a.text) {
        (Some(path), _) => read_sets(path, a.fragment)?,
        (None, Some(text)) => {
            let fragment = a.fragment.ok_or_else(|| CliError::Usage("--text needs --fragment".into()))?;
            vec![SentenceSet { id: "0".into(), fragment, sentences: split_sentences(text) }]
        }
        (None, None) => return Err(CliError::Usage("give --in or --text".into())),
    };
    let vocab = Vocabulary::default_english();
    let options = SolveOptions {
        node_budget: a.node_budget,
        wall_budget: (a.wall_secs > 0.0).then(|| Duration::from_secs_f64(a.wall_secs)),
        cnf: CnfOptions::default(),
    };
    let many = sets.len() > 1 || a.input.is_some();
    let mut timeouts = 0;
    for set in &sets {
        let parsed = set.sentences.iter().map(|s| parse(s, set.fragment, &vocab)).collect::<Result<Vec<_>, _>>()?;
        let verdict = solve_sentences(set.fragment, &parsed, &vocab, &options)?;
        let word = match &verdict.outcome {
            Outcome::Sat(_) => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Timeout => {
                timeouts += 1;
                "timeout"
            }
        };
        if many {
            writeln!(stdout, "{}\t{word}", set.id)?;
        } else {
            writeln!(stdout, "{word}")?;
        }
        if let (true, Some(c)) = (a.emit_model, verdict.certificate()) {
            writeln!(stdout, "{}", serde_json::to_string(&c.structure.element_atoms())?)?;
        }
    }
    if timeouts > 0 {
        return Err(CliError::Budget(format!("{timeouts} of {} sets exhausted the solver budget", sets.len())));
    }
    Ok(())
}

fn translate_cmd(a: &TranslateArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let sets = read_sets(&a.input, a.fragment)?;
    let vocab = Vocabulary::default_english();
    let comment = match a.to {
        Target::Fol => "#",
        Target::Smtlib => ";",
    };
    let mut out = outputs.create(&a.out)?;
    writeln!(out, "{comment} {}", provenance("translate", a)?)?;
    for set in &sets {
        let formulas = formulas_of(set, &vocab)?;
        writeln!(out, "\n{comment} {}", set.id)?;
        match a.to {
            Target::Fol => {
                for f in &formulas {
                    writeln!(out, "{}", render_fol(f))?;
                }
            }
            Target::Smtlib => write!(out, "{}", to_smtlib(&formulas, &Signature::from_formulas(&formulas)))?,
        }
    }
    out.flush()?;
    Ok(())
}

fn prompt(a: &PromptArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let instances = read_jsonl(&a.input)?;
    let style = match a.style {
        StyleArg::Satisfiable => PromptStyle::Satisfiable,
        StyleArg::Truefalse => PromptStyle::TrueFalse,
    };
    let example: Option<&LabeledInstance> = match &a.example_id {
        Some(id) => Some(
            instances
                .iter()
                .find(|i| &i.id == id)
                .ok_or_else(|| CliError::Data(format!("no record with id {id:?}")))?,
        ),
        None => None,
    };
    let records = instances
        .iter()
        .filter(|i| example.is_none_or(|e| e.id != i.id))
        .map(|i| zero_shot_prompt(i, style, example))
        .collect::<Result<Vec<_>, _>>()?;
    outputs.register(&a.out);
    write_prompts(&a.out, &records, Some(&provenance("prompt", a)?))?;
    info!("{} prompts written to {}", records.len(), a.out.display());
    Ok(())
}

fn stats(a: &StatsArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let instances = read_jsonl(&a.input)?;
    if instances.is_empty() {
        return Err(CliError::Data(format!("{} holds no records", a.input.display())));
    }
    let report = dataset_report(&instances)?;
    let csv = a.out.extension().is_some_and(|e| e == "csv");
    let mut out = outputs.create(&a.out)?;
    writeln!(out, "# {}", provenance("stats", a)?)?;
    out.write_all(if csv { report.to_csv() } else { report.to_text() }.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn ksat(a: &KsatArgs, outputs: &mut Outputs) -> Result<(), CliError> {
    let step = a.ratios.step.unwrap_or(0.1);
    let ratios = Axis::new(a.ratios.min, a.ratios.max, step).values();
    let branching = match a.branching {
        BranchArg::Lowest => Branching::Lowest,
        BranchArg::Shortest => Branching::ShortestClauses,
    };
    let options = CnfOptions { branching, ..CnfOptions::default() };
    let curve = ksat_psat(a.k, a.n, &ratios, a.samples, a.seed, &options)?;
    let mut out = outputs.create(&a.out)?;
    writeln!(out, "# {}", provenance("ksat", a)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ratio", "m", "samples", "sat", "phat", "ci_lo", "ci_hi"]).map_err(csv_error)?;
    for p in &curve {
        w.write_record([
            p.ratio.to_string(),
            p.m.to_string(),
            p.samples.to_string(),
            p.sat.to_string(),
            format!("{:.6}", p.phat),
            format!("{:.6}", p.ci_lo),
            format!("{:.6}", p.ci_hi),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    match crossing(&curve, 0.5) {
        Some(x) => info!("P(sat) = 0.5 at m/n = {x:.3}"),
        None => info!("no 0.5 crossing inside the scanned ratios"),
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Data(e.to_string())
}

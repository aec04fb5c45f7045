//! `gt`: generate, verify and decode group-testing query sequences.

mod experiment;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gt_core::feedbacks::{build_bcc_with, doubling_width_search, DEFAULT_RESTARTS, DEFAULT_SUBSET_CAP};
use gt_core::generators::{
    gen_binary, gen_full, gen_general, gen_small, gen_telescope, gen_trivial_selector, GeneratorConfig,
};
use gt_core::subset::Subset;
use gt_core::verify::{
    decode_with, f1_counterexample, simulate_feedback, sparsity, verify_prop2_with, verify_sequence_with, Caps,
    DEFAULT_PAIR_CAP,
};
use gt_core::{AdversaryModel, DecodeResult, FeedbackKind, FeedbackSpec, FeedbackWord, Params, QuerySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stable process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const UNSOLVED: u8 = 1;
    pub const ERROR: u8 = 2;
    pub const AMBIGUOUS: u8 = 3;
    pub const NO_CANDIDATE: u8 = 4;
}

#[derive(Parser)]
#[command(name = "gt", version, about = "Non-adaptive group testing with limited-capacity feedback")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Global {
    /// Maximum number of subsets any enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_SUBSET_CAP)]
    cap_subsets: u128,
    /// Maximum number of (pair, position) checks per verification.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_CAP)]
    cap_pairs: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Global {
    fn caps(&self) -> Caps {
        Caps {
            subsets: self.cap_subsets,
            pair_positions: self.cap_pairs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a query sequence and write it as JSON.
    Generate(GenerateArgs),
    /// Check a sequence exhaustively and write the report.
    Verify(VerifyArgs),
    /// Recover the hidden set from an observed feedback vector.
    Decode(DecodeArgs),
    /// Produce the feedback vector an adversary returns for a hidden set.
    Simulate(SimulateArgs),
    /// Search for a code whose subset XORs are all distinct.
    Bcc(BccArgs),
    /// Look for two sets the fixed-order two-minima feedback cannot separate.
    #[command(name = "counterexample-f1")]
    CounterexampleF1(CounterexampleArgs),
    /// Estimate the separation probability of a random parity query.
    Separation(SeparationArgs),
    /// Run a grid of constructions and write one CSV row per point.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Telescope,
    Small,
    Binary,
    Full,
    Selector,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Def6,
    Prop2,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    #[arg(long)]
    n: usize,
    /// Hidden-set bound; the selector ignores it.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: usize,
    /// Feedback width; required by the general construction.
    #[arg(long)]
    beta: Option<usize>,
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long, env = "GT_SEED", default_value_t = 0)]
    seed: u64,
    /// Restarts per code search in the general construction.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    code_restarts: usize,
    /// Output path; the JSON goes to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeedbackArgs {
    /// Query sequence JSON.
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    feedback: FeedbackKind,
    /// Capacity; defaults to the sequence's alpha.
    #[arg(long)]
    alpha: Option<usize>,
    /// Code JSON for the syndrome feedback; defaults to the code recorded in
    /// the sequence provenance.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, default_value = "malicious")]
    adversary: AdversaryModel,
    /// Hidden-set bound; defaults to the sequence's k.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    fb: FeedbackArgs,
    #[arg(long, value_enum, default_value_t = CriterionArg::Def6)]
    criterion: CriterionArg,
    /// Report path; the JSON goes to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    fb: FeedbackArgs,
    /// JSON list of feedback bitstrings, one per query.
    #[arg(long)]
    observed: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Choice {
    First,
    Last,
    Random,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    fb: FeedbackArgs,
    /// Comma-separated members of the hidden set.
    #[arg(long, value_delimiter = ',')]
    hidden: Vec<usize>,
    /// How the adversary picks among the values it may return.
    #[arg(long, value_enum, default_value_t = Choice::First)]
    choice: Choice,
    #[arg(long, env = "GT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BccArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    gamma: usize,
    /// Width budget; doubles from 1 until a code is found when omitted.
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, env = "GT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
}

#[derive(Args)]
struct SeparationArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: usize,
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, env = "GT_SEED", default_value_t = 0)]
    seed: u64,
    /// CSV path; appended to, with a header when new.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment grid JSON.
    spec: PathBuf,
    /// CSV path; overrides the one named in the spec, stdout when neither is set.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::ERROR);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = cli.global;
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a, &g),
        Command::Decode(a) => decode_cmd(a, &g),
        Command::Simulate(a) => simulate(a, &g),
        Command::Bcc(a) => bcc(a),
        Command::CounterexampleF1(a) => counterexample(a),
        Command::Separation(a) => separation(a),
        Command::Experiment(a) => experiment::run(&a.spec, a.out.as_deref(), &g.caps()),
    }
}

/// Builds a sequence and, for the general construction, its matching feedback.
pub fn build_sequence(
    construction: Construction,
    params: Params,
    delta: usize,
    seed: u64,
    code_restarts: usize,
) -> Result<(QuerySequence, Option<FeedbackSpec>)> {
    let cfg = || GeneratorConfig::new(params, delta, seed);
    Ok(match construction {
        Construction::Telescope => (gen_telescope(&cfg()?)?, None),
        Construction::Small => (gen_small(&params, seed)?, None),
        Construction::Binary => (gen_binary(&cfg()?)?, None),
        Construction::Full => (gen_full(&params, seed)?, None),
        Construction::Selector => (gen_trivial_selector(params.n, params.alpha)?, None),
        Construction::General => {
            let (s, spec) = gen_general(&params, code_restarts, seed)?;
            (s, Some(spec))
        }
    })
}

fn generate(a: GenerateArgs) -> Result<u8> {
    let k = match (a.construction, a.k) {
        (_, Some(k)) => k,
        (Construction::Selector, None) => a.n,
        _ => bail!("--k is required for this construction"),
    };
    let beta = match (a.construction, a.beta) {
        (_, Some(b)) => b,
        (Construction::General, None) => bail!("--beta is required for the general construction"),
        _ => 1,
    };
    let params = Params {
        n: a.n,
        k,
        alpha: a.alpha,
        beta,
    };
    let (seq, _) = build_sequence(a.construction, params, a.delta, a.seed, a.code_restarts)?;
    io::write_output(a.out.as_deref(), &seq.to_json())?;
    let m = sparsity(&seq);
    let mut line = format!("length={} w={} rho={}", seq.len(), m.w, m.rho);
    let notes = &seq.provenance().notes;
    for key in ["beta_prime", "code_width", "delta"] {
        if let Some(v) = notes.get(key) {
            line.push_str(&format!(" {key}={v}"));
        }
    }
    eprintln!("{line}");
    Ok(exit::SUCCESS)
}

fn load(fb: &FeedbackArgs) -> Result<(QuerySequence, FeedbackSpec, usize)> {
    let seq = io::read_sequence(&fb.seq)?;
    let n = seq.params().n;
    let alpha = fb.alpha.unwrap_or(seq.params().alpha);
    let code = if fb.feedback == FeedbackKind::GenFeed {
        Some(match &fb.code {
            Some(path) => io::read_code(path)?,
            None => io::code_from_provenance(&seq)?,
        })
    } else {
        None
    };
    let spec = FeedbackSpec::new(fb.feedback, n, alpha, code)?;
    if let Some(id) = fb.adversary.avoided() {
        if id == 0 || id > n {
            bail!("avoided element {id} outside universe [1..{n}]");
        }
    }
    let k = fb.k.unwrap_or(seq.params().k);
    Ok((seq, spec, k))
}

fn verify(a: VerifyArgs, g: &Global) -> Result<u8> {
    let (seq, spec, k) = load(&a.fb)?;
    let report = match a.criterion {
        CriterionArg::Def6 => verify_sequence_with(&seq, &spec, &a.fb.adversary, k, &g.caps())?,
        CriterionArg::Prop2 => verify_prop2_with(&seq, &spec, k, &g.caps())?,
    };
    io::write_output(a.report.as_deref(), &report.to_json())?;
    match &report.witness {
        None => {
            eprintln!("solved ({} pairs checked)", report.pairs_checked);
            Ok(exit::SUCCESS)
        }
        Some(w) => {
            eprintln!("unsolved: witness K1={} K2={} ({})", w.k1, w.k2, w.note);
            Ok(exit::UNSOLVED)
        }
    }
}

/// Space-separated members, or `{}` for the empty set.
fn members(s: Subset) -> String {
    if s.is_empty() {
        return "{}".into();
    }
    s.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
}

fn decode_cmd(a: DecodeArgs, g: &Global) -> Result<u8> {
    let (seq, spec, k) = load(&a.fb)?;
    let observed = io::read_observed(&a.observed)?;
    match decode_with(&seq, &spec, &a.fb.adversary, &observed, k, &g.caps())? {
        DecodeResult::Unique(s) => {
            println!("{}", members(s));
            Ok(exit::SUCCESS)
        }
        DecodeResult::Ambiguous(sets) => {
            println!("AMBIGUOUS");
            for s in sets {
                println!("{}", members(s));
            }
            Ok(exit::AMBIGUOUS)
        }
        DecodeResult::NoCandidate => {
            println!("NO_CANDIDATE");
            Ok(exit::NO_CANDIDATE)
        }
    }
}

fn simulate(a: SimulateArgs, g: &Global) -> Result<u8> {
    let (seq, spec, _) = load(&a.fb)?;
    let hidden = Subset::from_ids(a.hidden.iter().copied(), seq.params().n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let words = simulate_feedback(&seq, &spec, &a.fb.adversary, hidden, g.cap_subsets, |_, vs| {
        let vals: Vec<FeedbackWord> = vs.values().iter().copied().collect();
        match a.choice {
            Choice::First => vals[0],
            Choice::Last => vals[vals.len() - 1],
            Choice::Random => vals[rng.random_range(0..vals.len())],
        }
    })?;
    io::write_output(a.out.as_deref(), &io::observed_json(&words))?;
    Ok(exit::SUCCESS)
}

fn bcc(a: BccArgs) -> Result<u8> {
    let code = match a.width {
        Some(w) => build_bcc_with(a.n, a.gamma, w, a.seed, a.restarts)?,
        None => doubling_width_search(a.n, a.gamma, a.seed)?,
    };
    if !code.is_injective() {
        bail!("emitted code failed the injectivity check");
    }
    io::write_output(a.out.as_deref(), &code.to_json())?;
    eprintln!("n={} gamma={} width={}", code.n(), code.gamma(), code.width());
    Ok(exit::SUCCESS)
}

fn counterexample(a: CounterexampleArgs) -> Result<u8> {
    let seq = io::read_sequence(&a.seq)?;
    let k = a.k.unwrap_or(seq.params().k);
    let alpha = a.alpha.unwrap_or(seq.params().alpha);
    match f1_counterexample(&seq, k, alpha) {
        Some((k1, k2)) => {
            let pair = serde_json::json!({ "K1": k1, "K2": k2 });
            println!("{}", serde_json::to_string(&pair).context("serializing pair")?);
            Ok(exit::SUCCESS)
        }
        None => {
            eprintln!("no counterexample found");
            Ok(exit::UNSOLVED)
        }
    }
}

fn separation(a: SeparationArgs) -> Result<u8> {
    let est = gt_core::analysis::estimate_separation(a.n, a.k, a.alpha, a.delta, a.samples, a.seed)?;
    io::append_csv_row(a.out.as_deref(), gt_core::analysis::SeparationEstimate::CSV_HEADER, &est.csv_row())?;
    eprintln!(
        "empirical={:.6} bound={:.6} se={:.6} passed={}",
        est.empirical_prob, est.paper_lower_bound, est.standard_error, est.passed
    );
    Ok(if est.passed { exit::SUCCESS } else { exit::UNSOLVED })
}

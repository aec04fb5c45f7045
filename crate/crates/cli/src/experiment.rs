//! Grid sweeps over constructions, feedbacks and adversaries.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use gt_core::generators::{max_delta, retry_until_verified};
use gt_core::verify::{sparsity, verify_prop2_with, verify_sequence_with, Caps};
use gt_core::{bar_alpha, validate_instance, AdversaryModel, FeedbackKind, FeedbackSpec, GtError, Params};
use serde::{Deserialize, Serialize};

use crate::{build_sequence, exit, io as cli_io, Construction, CriterionArg};

fn default_beta() -> Vec<usize> {
    vec![1]
}

fn default_feedback() -> Vec<String> {
    vec!["auto".into()]
}

fn default_adversary() -> Vec<String> {
    vec!["malicious".into()]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_delta() -> usize {
    1
}

fn default_retries() -> usize {
    5
}

fn default_criterion() -> String {
    "def6".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub alpha: Vec<usize>,
    #[serde(default = "default_beta")]
    pub beta: Vec<usize>,
    pub construction: Vec<String>,
    /// Feedback names, or `auto` for the one each construction targets.
    #[serde(default = "default_feedback")]
    pub feedback: Vec<String>,
    #[serde(default = "default_adversary")]
    pub adversary: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
}

/// A sweep: the cartesian product of the grid, run once per seed.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub grid: Grid,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_delta")]
    pub delta: usize,
    /// Generation attempts per point before it is reported unverified.
    #[serde(default = "default_retries")]
    pub retries: usize,
    #[serde(default = "default_criterion")]
    pub criterion: String,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    construction: Construction,
    params: Params,
    feedback: Option<FeedbackKind>,
    adversary: AdversaryModel,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct Row {
    construction: String,
    n: usize,
    k: usize,
    alpha: usize,
    beta: usize,
    delta: usize,
    feedback: String,
    adversary: String,
    seed: u64,
    length: usize,
    verified: bool,
    attempts: usize,
    w: usize,
    rho: usize,
    runtime_ms: u128,
}

fn target_feedback(c: Construction) -> FeedbackKind {
    match c {
        Construction::Full | Construction::Selector => FeedbackKind::Full,
        Construction::General => FeedbackKind::GenFeed,
        _ => FeedbackKind::Par,
    }
}

fn parse_construction(s: &str) -> Result<Construction> {
    Construction::from_str(s, true).map_err(|e| anyhow::anyhow!("construction {s:?}: {e}"))
}

impl ExperimentSpec {
    /// Expands the grid, checking every point before anything runs.
    fn points(&self) -> Result<Vec<Point>> {
        let g = &self.grid;
        let mut out = Vec::new();
        for c in &g.construction {
            let construction = parse_construction(c)?;
            for fb in &g.feedback {
                let feedback = match fb.as_str() {
                    "auto" => None,
                    other => Some(other.parse::<FeedbackKind>()?),
                };
                match (construction, feedback) {
                    (Construction::General, Some(f)) if f != FeedbackKind::GenFeed => {
                        bail!("the general construction picks its own feedback, got {f}")
                    }
                    (c, Some(FeedbackKind::GenFeed)) if c != Construction::General => {
                        bail!("genfeed needs the code chosen by the general construction")
                    }
                    _ => {}
                }
                for adv in &g.adversary {
                    let adversary: AdversaryModel = adv.parse()?;
                    for (&n, &k, &alpha, &beta) in grid_product(&g.n, &g.k, &g.alpha, &g.beta) {
                        let params = Params { n, k, alpha, beta };
                        if construction == Construction::General {
                            validate_instance(&Params {
                                beta: beta.min(bar_alpha(n, alpha)?),
                                ..params
                            })?;
                        } else {
                            validate_instance(&params)?;
                        }
                        if matches!(construction, Construction::Telescope | Construction::Binary)
                            && self.delta > max_delta(k, alpha)
                        {
                            return Err(GtError::InvalidDelta {
                                delta: self.delta,
                                max: max_delta(k, alpha),
                            }
                            .into());
                        }
                        for &seed in &self.seeds {
                            out.push(Point {
                                construction,
                                params,
                                feedback,
                                adversary,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn grid_product<'a>(
    a: &'a [usize],
    b: &'a [usize],
    c: &'a [usize],
    d: &'a [usize],
) -> impl Iterator<Item = (&'a usize, &'a usize, &'a usize, &'a usize)> {
    a.iter().flat_map(move |x| {
        b.iter()
            .flat_map(move |y| c.iter().flat_map(move |z| d.iter().map(move |w| (x, y, z, w))))
    })
}

fn run_point(p: &Point, spec: &ExperimentSpec, criterion: CriterionArg, caps: &Caps) -> Result<Row> {
    let start = Instant::now();
    let build = |seed: u64| -> gt_core::Result<(gt_core::QuerySequence, FeedbackSpec)> {
        let (seq, own) = build_sequence(p.construction, p.params, spec.delta, seed, 0)
            .map_err(|e| match e.downcast::<GtError>() {
                Ok(g) => g,
                Err(other) => GtError::PreconditionViolated(other.to_string()),
            })?;
        let fb = match own {
            Some(f) => f,
            None => FeedbackSpec::new(
                p.feedback.unwrap_or(target_feedback(p.construction)),
                p.params.n,
                p.params.alpha,
                None,
            )?,
        };
        Ok((seq, fb))
    };
    let check = |(seq, fb): &(gt_core::QuerySequence, FeedbackSpec)| match criterion {
        CriterionArg::Def6 => verify_sequence_with(seq, fb, &p.adversary, p.params.k, caps),
        CriterionArg::Prop2 => verify_prop2_with(seq, fb, p.params.k, caps),
    };
    let (seq, fb, verified, attempts) = match retry_until_verified(build, check, p.seed, spec.retries) {
        Ok(o) => (o.value.0, o.value.1, true, o.attempts),
        Err(GtError::AttemptsExhausted { attempts, .. }) => {
            // lengths do not depend on the seed
            let (seq, fb) = build(p.seed)?;
            (seq, fb, false, attempts)
        }
        Err(e) => return Err(e.into()),
    };
    let m = sparsity(&seq);
    Ok(Row {
        construction: format!("{:?}", p.construction).to_lowercase(),
        n: p.params.n,
        k: p.params.k,
        alpha: p.params.alpha,
        beta: p.params.beta,
        delta: spec.delta,
        feedback: fb.kind().name().to_string(),
        adversary: match criterion {
            CriterionArg::Def6 => p.adversary.to_string(),
            CriterionArg::Prop2 => "prop2".into(),
        },
        seed: p.seed,
        length: seq.len(),
        verified,
        attempts,
        w: m.w,
        rho: m.rho,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Runs every grid point in order, flushing each row as it completes.
pub fn run(spec_path: &Path, out: Option<&Path>, caps: &Caps) -> Result<u8> {
    let spec: ExperimentSpec = serde_json::from_str(&cli_io::read_text(spec_path)?)
        .with_context(|| format!("parsing {}", spec_path.display()))?;
    let criterion = CriterionArg::from_str(&spec.criterion, true)
        .map_err(|e| anyhow::anyhow!("criterion {:?}: {e}", spec.criterion))?;
    if spec.retries == 0 {
        bail!("retries must be at least 1");
    }
    let points = spec.points()?;
    let target = out.map(Path::to_path_buf).or_else(|| spec.outputs.csv.clone());
    let sink: Box<dyn Write> = match &target {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for p in &points {
        match run_point(p, &spec, criterion, caps) {
            Ok(row) => {
                w.serialize(&row)?;
                w.flush()?;
            }
            Err(e) => {
                w.flush()?;
                eprintln!(
                    "error at n={} k={} alpha={} seed={}: {e:#}",
                    p.params.n, p.params.k, p.params.alpha, p.seed
                );
                return Ok(exit::ERROR);
            }
        }
    }
    eprintln!("{} rows written", points.len());
    Ok(exit::SUCCESS)
}

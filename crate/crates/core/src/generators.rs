//! Randomized query-sequence constructions and the retry-until-verified wrapper.
//!
//! Every length formula uses base-2 logarithms and rounds up. Each generator
//! draws from one `ChaCha8Rng` seeded with the caller's seed, so equal
//! `(construction, params, seed)` give bit-identical sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::feedbacks::{build_bcc_with, BccCode, FeedbackSpec, DEFAULT_RESTARTS, DEFAULT_SUBSET_CAP};
use crate::instance::{bar_alpha, validate_instance, Params, Part, Provenance, Query, QuerySequence};
use crate::subset::{count_upto, Subset};
use crate::verify::VerificationReport;

/// Multipliers and divisors appearing in the length and probability formulas.
///
/// The defaults are the values from the existence proofs. Anything else is
/// reported as "tuned" in provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Telescope length factor: `⌈c·k²/(αδ)·log₂(4n/k)⌉`.
    pub telescope_length: f64,
    /// Telescope inclusion probability divisor: `α/(c·k)`.
    pub telescope_inclusion: f64,
    /// Small-set length factor: `⌈c·k·log₂(4n/k)⌉`.
    pub small_length: f64,
    /// Isolation length factor: `⌈c·h·k²/α²⌉`.
    pub full_length: f64,
    /// Isolation repetition factor: `h = ⌈c·log₂(3n)⌉`.
    pub full_h: f64,
    /// Isolation inclusion probability divisor: `α/(c·k)`.
    pub full_inclusion: f64,
    /// Replaces the computed `h` when set.
    pub h_override: Option<usize>,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            telescope_length: 150.0,
            telescope_inclusion: 16.0,
            small_length: 3.0,
            full_length: 6.0,
            full_h: 16.0,
            full_inclusion: 6.0,
            h_override: None,
        }
    }
}

impl Constants {
    pub fn is_default(&self) -> bool {
        *self == Constants::default()
    }

    fn record(&self, prov: &mut Provenance) {
        prov.note("log_base", 2);
        prov.note("constants", if self.is_default() { "verbatim" } else { "tuned" });
        if !self.is_default() {
            prov.note(
                "constants_values",
                serde_json::to_string(self).expect("serializable"),
            );
        }
    }
}

/// Inputs shared by the parity-feedback constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub params: Params,
    /// Symmetric-difference threshold the sequence must handle.
    pub delta: usize,
    pub seed: u64,
    /// Maximum attempts for [`retry_until_verified`].
    pub retry_budget: usize,
    pub constants: Constants,
}

/// Largest admissible `delta`: `max(⌊k/alpha⌋, 1)`.
pub fn max_delta(k: usize, alpha: usize) -> usize {
    (k / alpha).max(1)
}

impl GeneratorConfig {
    pub fn new(params: Params, delta: usize, seed: u64) -> Result<Self> {
        validate_instance(&params)?;
        let max = max_delta(params.k, params.alpha);
        if delta == 0 || delta > max {
            return Err(GtError::InvalidDelta { delta, max });
        }
        Ok(GeneratorConfig {
            params,
            delta,
            seed,
            retry_budget: 5,
            constants: Constants::default(),
        })
    }

    pub fn with_constants(mut self, constants: Constants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_retry_budget(mut self, budget: usize) -> Self {
        self.retry_budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn ceil_formula(x: f64) -> usize {
    x.ceil().max(0.0) as usize
}

/// `⌈c·k²/(αδ)·log₂(4n/k)⌉`.
pub fn telescope_length(n: usize, k: usize, alpha: usize, delta: usize, c: &Constants) -> usize {
    let (n, k, a, d) = (n as f64, k as f64, alpha as f64, delta as f64);
    ceil_formula(c.telescope_length * k * k / (a * d) * (4.0 * n / k).log2())
}

/// `α/(c·k)`.
pub fn telescope_probability(k: usize, alpha: usize, c: &Constants) -> f64 {
    (alpha as f64 / (c.telescope_inclusion * k as f64)).min(1.0)
}

/// `⌈c·k·log₂(4n/k)⌉`.
pub fn small_length(n: usize, k: usize, c: &Constants) -> usize {
    let (n, k) = (n as f64, k as f64);
    ceil_formula(c.small_length * k * (4.0 * n / k).log2())
}

/// `⌈c·log₂(3n)⌉`, or the override.
pub fn full_h(n: usize, c: &Constants) -> usize {
    c.h_override
        .unwrap_or_else(|| ceil_formula(c.full_h * (3.0 * n as f64).log2()))
}

/// `⌈c·h·k²/α²⌉`.
pub fn full_length(n: usize, k: usize, alpha: usize, c: &Constants) -> usize {
    let h = full_h(n, c) as f64;
    let (k, a) = (k as f64, alpha as f64);
    ceil_formula(c.full_length * h * k * k / (a * a))
}

/// `α/(c·k)`, capped at 1.
pub fn full_probability(k: usize, alpha: usize, c: &Constants) -> f64 {
    (alpha as f64 / (c.full_inclusion * k as f64)).min(1.0)
}

/// Whether `alpha ≥ 9·log₂ k`, the hypothesis under which the isolation
/// family is guaranteed to exist.
pub fn full_hypothesis_holds(k: usize, alpha: usize) -> bool {
    alpha as f64 >= 9.0 * (k as f64).log2()
}

/// The telescope levels used by [`gen_binary`]: `(i, k')` with `k'` the
/// rounded-up power of two divided by `2^i`, for `i = 0..⌊log₂(k_pow/α)⌋`.
pub fn binary_levels(k: usize, alpha: usize) -> Vec<(usize, usize)> {
    let k_pow = k.next_power_of_two();
    let mut out = Vec::new();
    let mut i = 0;
    while alpha << i <= k_pow {
        out.push((i, k_pow >> i));
        i += 1;
    }
    out
}

fn bernoulli_queries(n: usize, p: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Query> {
    (0..count)
        .map(|_| {
            let mut bits = 0u64;
            for i in 0..n {
                if rng.random_bool(p) {
                    bits |= 1 << i;
                }
            }
            Subset::from_bits(bits)
        })
        .collect()
}

fn sequence(params: Params, parts: Vec<(String, Vec<Query>)>, mut prov: Provenance) -> Result<QuerySequence> {
    let mut queries = Vec::new();
    for (name, qs) in parts {
        prov.parts.push(Part {
            name,
            length: qs.len(),
        });
        queries.extend(qs);
    }
    QuerySequence::new(params, queries, prov)
}

fn check_telescope_delta(k: usize, alpha: usize, delta: usize) -> Result<()> {
    let max = max_delta(k, alpha);
    if delta == 0 || delta > max {
        return Err(GtError::InvalidDelta { delta, max });
    }
    Ok(())
}

/// Queries that separate, with constant probability each, pairs whose
/// symmetric difference is at least `delta`, using parity feedback.
pub fn gen_telescope(cfg: &GeneratorConfig) -> Result<QuerySequence> {
    let p = cfg.params;
    validate_instance(&p)?;
    check_telescope_delta(p.k, p.alpha, cfg.delta)?;
    let c = &cfg.constants;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let len = telescope_length(p.n, p.k, p.alpha, cfg.delta, c);
    let prob = telescope_probability(p.k, p.alpha, c);
    let mut prov = Provenance::new("telescope", cfg.seed);
    c.record(&mut prov);
    prov.note("delta", cfg.delta);
    prov.note("inclusion_probability", prob);
    let qs = bernoulli_queries(p.n, prob, len, &mut rng);
    sequence(p, vec![("telescope".into(), qs)], prov)
}

/// Half-density random queries for sets that differ in few elements.
pub fn gen_small(params: &Params, seed: u64) -> Result<QuerySequence> {
    gen_small_with(params, seed, &Constants::default())
}

pub fn gen_small_with(params: &Params, seed: u64, c: &Constants) -> Result<QuerySequence> {
    validate_instance(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prov = Provenance::new("small", seed);
    c.record(&mut prov);
    prov.note("inclusion_probability", 0.5);
    let qs = bernoulli_queries(params.n, 0.5, small_length(params.n, params.k, c), &mut rng);
    sequence(*params, vec![("small".into(), qs)], prov)
}

fn binary_parts(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng, prov: &mut Provenance) -> Vec<(String, Vec<Query>)> {
    let p = cfg.params;
    let c = &cfg.constants;
    let mut parts = vec![(
        "small".to_string(),
        bernoulli_queries(p.n, 0.5, small_length(p.n, p.k, c), rng),
    )];
    let levels = binary_levels(p.k, p.alpha);
    prov.note("k_rounded", p.k.next_power_of_two());
    for &(i, ki) in &levels {
        let delta = cfg.delta.min(max_delta(ki, p.alpha));
        let len = telescope_length(p.n, ki, p.alpha, delta, c);
        let prob = telescope_probability(ki, p.alpha, c);
        parts.push((
            format!("telescope[i={i},k={ki},delta={delta}]"),
            bernoulli_queries(p.n, prob, len, rng),
        ));
    }
    parts
}

/// Small-set queries followed by telescopes for `k, k/2, k/4, ...` down to `alpha`.
pub fn gen_binary(cfg: &GeneratorConfig) -> Result<QuerySequence> {
    let p = cfg.params;
    validate_instance(&p)?;
    check_telescope_delta(p.k, p.alpha, cfg.delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut prov = Provenance::new("binary", cfg.seed);
    cfg.constants.record(&mut prov);
    prov.note("delta", cfg.delta);
    let parts = binary_parts(cfg, &mut rng, &mut prov);
    sequence(p, parts, prov)
}

fn full_part(n: usize, k: usize, alpha: usize, c: &Constants, rng: &mut ChaCha8Rng, prov: &mut Provenance) -> (String, Vec<Query>) {
    let h = full_h(n, c);
    let len = full_length(n, k, alpha, c);
    let prob = full_probability(k, alpha, c);
    prov.note("h", h);
    prov.note("full_inclusion_probability", prob);
    prov.note(
        "full_hypothesis",
        if full_hypothesis_holds(k, alpha) { "satisfied" } else { "violated" },
    );
    prov.note("full_length_formula", "ceil(6*h*k^2/alpha^2), stray factor x taken as 1");
    (format!("full[k={k}]"), bernoulli_queries(n, prob, len, rng))
}

/// Isolation queries for the full-identity feedback.
pub fn gen_full(params: &Params, seed: u64) -> Result<QuerySequence> {
    gen_full_with(params, seed, &Constants::default())
}

pub fn gen_full_with(params: &Params, seed: u64, c: &Constants) -> Result<QuerySequence> {
    validate_instance(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prov = Provenance::new("full", seed);
    c.record(&mut prov);
    let part = full_part(params.n, params.k, params.alpha, c, &mut rng, &mut prov);
    sequence(*params, vec![part], prov)
}

/// `⌈n/alpha⌉` consecutive blocks of `alpha` elements.
///
/// The recorded params use `k = n` and `beta = bar_alpha(n, alpha)`, since
/// the sequence works for every hidden-set size under the full feedback.
pub fn gen_trivial_selector(n: usize, alpha: usize) -> Result<QuerySequence> {
    let beta = bar_alpha(n, alpha)?;
    let params = Params {
        n,
        k: n,
        alpha,
        beta,
    };
    let qs: Vec<Query> = (0..n.div_ceil(alpha))
        .map(|b| {
            let lo = b * alpha + 1;
            let hi = ((b + 1) * alpha).min(n);
            Subset::from_ids(lo..=hi, n).expect("block within range")
        })
        .collect();
    let prov = Provenance::new("selector", 0);
    sequence(params, vec![("selector".into(), qs)], prov)
}

/// Parity concatenated with a BCC syndrome: picks the largest code order
/// that fits in `beta - 1` bits and sizes the sequence accordingly.
///
/// Falls back to the parity construction with a plain parity feedback when
/// not even an order-one code fits.
pub fn gen_general(params: &Params, code_restarts: usize, seed: u64) -> Result<(QuerySequence, FeedbackSpec)> {
    gen_general_with(params, code_restarts, seed, &Constants::default())
}

pub fn gen_general_with(
    params: &Params,
    code_restarts: usize,
    seed: u64,
    c: &Constants,
) -> Result<(QuerySequence, FeedbackSpec)> {
    // beta above bar_alpha is allowed here: the feedback width comes from the
    // code actually found, and extra budget only raises the code order
    let ba = bar_alpha(params.n, params.alpha)?;
    let checked = Params {
        beta: params.beta.min(ba),
        ..*params
    };
    validate_instance(&checked)?;
    if params.beta < 2 {
        return Err(GtError::PreconditionViolated(format!(
            "general construction needs beta >= 2, got {}",
            params.beta
        )));
    }
    let restarts = if code_restarts == 0 { DEFAULT_RESTARTS } else { code_restarts };
    let budget = params.beta - 1;
    let mut code: Option<BccCode> = None;
    for gamma in (1..=params.alpha.min(params.n)).rev() {
        if count_upto(params.n, gamma) > DEFAULT_SUBSET_CAP {
            continue;
        }
        if let Ok(found) = build_bcc_with(params.n, gamma, budget, seed, restarts) {
            code = Some(found);
            break;
        }
    }

    let mut prov = Provenance::new("general", seed);
    c.record(&mut prov);
    if params.beta > ba {
        prov.note("beta_exceeds_bar_alpha", format!("{} > {ba}", params.beta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(code) = code else {
        prov.note("beta_prime", 0);
        prov.note("fallback", "parity feedback");
        let cfg = GeneratorConfig::new(checked, 1, seed)?.with_constants(*c);
        prov.note("delta", 1);
        let parts = binary_parts(&cfg, &mut rng, &mut prov);
        let seq = sequence(*params, parts, prov)?;
        return Ok((seq, FeedbackSpec::par(params.n, params.alpha)?));
    };

    let beta_prime = code.gamma();
    let delta = beta_prime.min(max_delta(params.k, params.alpha));
    let cfg = GeneratorConfig::new(checked, delta, seed)?.with_constants(*c);
    prov.note("beta_prime", beta_prime);
    prov.note("code_width", code.width());
    prov.note("delta", delta);
    prov.note("code", serde_json::to_string(&crate::feedbacks::BccFile::from(&code)).expect("serializable"));
    let mut parts = binary_parts(&cfg, &mut rng, &mut prov);
    let binary_len: usize = parts.iter().map(|(_, q)| q.len()).sum();
    let full = full_part(params.n, 2 * params.k, params.alpha, c, &mut rng, &mut prov);
    prov.note("binary_length", binary_len);
    prov.note("full_length", full.1.len());
    parts.push(full);
    let seq = sequence(*params, parts, prov)?;
    let spec = FeedbackSpec::genfeed(params.n, params.alpha, code)?;
    Ok((seq, spec))
}

/// A verified construction and the attempt that produced it.
#[derive(Debug, Clone)]
pub struct RetryOutcome<T> {
    pub value: T,
    /// 1-based number of the accepted attempt.
    pub attempts: usize,
    pub seed: u64,
    pub report: VerificationReport,
}

/// Runs `generate(seed + attempt)` for `attempt = 0, 1, ...` until `verify`
/// reports a solved instance.
///
/// Fails with `attempts-exhausted`, carrying the last witness, once
/// `max_attempts` generations have been rejected.
pub fn retry_until_verified<T, G, V>(
    mut generate: G,
    mut verify: V,
    seed: u64,
    max_attempts: usize,
) -> Result<RetryOutcome<T>>
where
    G: FnMut(u64) -> Result<T>,
    V: FnMut(&T) -> Result<VerificationReport>,
{
    let mut witness = None;
    for attempt in 0..max_attempts {
        let child = seed.wrapping_add(attempt as u64);
        let value = generate(child)?;
        let report = verify(&value)?;
        if report.solved {
            return Ok(RetryOutcome {
                value,
                attempts: attempt + 1,
                seed: child,
                report,
            });
        }
        witness = report.witness.as_ref().map(|w| (w.k1, w.k2));
    }
    Err(GtError::AttemptsExhausted {
        attempts: max_attempts,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, alpha: usize) -> Params {
        Params::new(n, k, alpha, 1).unwrap()
    }

    #[test]
    fn telescope_lengths() {
        let c = Constants::default();
        assert_eq!(telescope_length(16, 4, 2, 1, &c), 4800);
        assert_eq!(telescope_length(16, 4, 2, 2, &c), 2400);
        let cfg = GeneratorConfig::new(params(16, 4, 2), 2, 3).unwrap();
        let seq = gen_telescope(&cfg).unwrap();
        assert_eq!(seq.len(), 2400);
        assert_eq!(seq, gen_telescope(&cfg).unwrap());
    }

    #[test]
    fn delta_out_of_range_is_rejected() {
        assert!(matches!(
            GeneratorConfig::new(params(16, 4, 2), 3, 0),
            Err(GtError::InvalidDelta { delta: 3, max: 2 })
        ));
        assert!(GeneratorConfig::new(params(16, 4, 4), 1, 0).is_ok());
    }

    #[test]
    fn small_lengths() {
        let c = Constants::default();
        assert_eq!(small_length(16, 4, &c), 48);
        assert_eq!(small_length(8, 8, &c), 48);
        assert_eq!(gen_small(&params(16, 4, 2), 1).unwrap().len(), 48);
    }

    #[test]
    fn full_lengths() {
        let c = Constants::default();
        assert_eq!(full_h(16, &c), 90);
        assert_eq!(full_length(16, 4, 4, &c), 540);
        assert!((full_probability(4, 4, &c) - 1.0 / 6.0).abs() < 1e-15);
        let seq = gen_full(&params(16, 4, 4), 9).unwrap();
        assert_eq!(seq.len(), 540);
        assert_eq!(seq.provenance().notes["full_hypothesis"], "violated");
    }

    #[test]
    fn binary_structure() {
        assert_eq!(binary_levels(4, 4), vec![(0, 4)]);
        assert_eq!(binary_levels(5, 2), vec![(0, 8), (1, 4), (2, 2)]);
        assert_eq!(binary_levels(8, 2).len(), 3);
        let cfg = GeneratorConfig::new(params(16, 5, 2), 1, 4).unwrap();
        let seq = gen_binary(&cfg).unwrap();
        let names: Vec<&str> = seq.provenance().parts.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names.len(), 4);
        assert_eq!(names[0], "small");
        assert!(names[3].starts_with("telescope[i=2,k=2"));
    }

    #[test]
    fn selector_blocks() {
        let seq = gen_trivial_selector(7, 3).unwrap();
        let ids: Vec<Vec<usize>> = seq.queries().iter().map(|q| q.ids()).collect();
        assert_eq!(ids, vec![vec![1, 2, 3], vec![4, 5, 6], vec![7]]);
        assert_eq!(gen_trivial_selector(4, 4).unwrap().len(), 1);
    }

    #[test]
    fn general_picks_largest_fitting_order() {
        // n = 12: an order-1 code needs 4 bits, order 2 needs 7
        let p = Params::new(12, 4, 4, 5).unwrap();
        let (seq, spec) = gen_general(&p, 0, 1).unwrap();
        assert_eq!(seq.provenance().notes["beta_prime"], "1");
        assert_eq!(spec.code().unwrap().gamma(), 1);
        // bar_alpha(12, 4) = 10, so 9 code bits; order 3 needs 299 <= 512 words
        let p = Params::new(12, 4, 4, 10).unwrap();
        let (seq, spec) = gen_general(&p, 0, 1).unwrap();
        let bp: usize = seq.provenance().notes["beta_prime"].parse().unwrap();
        assert!(bp >= 2);
        assert!(spec.code().unwrap().width() <= 9);
        // a budget beyond bar_alpha reaches the full order
        let p = Params { n: 12, k: 4, alpha: 4, beta: 16 };
        let (seq, spec) = gen_general(&p, 0, 1).unwrap();
        assert_eq!(seq.provenance().notes["beta_prime"], "4");
        assert!(spec.code().unwrap().width() <= 15);
        let p = Params::new(12, 4, 4, 3).unwrap();
        let (seq, spec) = gen_general(&p, 0, 1).unwrap();
        assert_eq!(seq.provenance().notes["beta_prime"], "0");
        assert_eq!(spec.kind(), crate::feedbacks::FeedbackKind::Par);
    }

    #[test]
    fn retry_with_zero_budget_fails_immediately() {
        let mut calls = 0;
        let r = retry_until_verified(
            |_| {
                calls += 1;
                Ok(())
            },
            |_| unreachable!(),
            0,
            0,
        );
        assert!(matches!(r, Err(GtError::AttemptsExhausted { attempts: 0, witness: None })));
        assert_eq!(calls, 0);
    }
}

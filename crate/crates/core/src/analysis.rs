//! Probability facts behind the parity constructions, with independent
//! cross-checks, and a Monte-Carlo estimate of the separation probability.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::feedbacks::FeedbackSpec;
use crate::generators::max_delta;
use crate::instance::HiddenSet;
use crate::subset::{binom, Subset, MAX_N};

/// Probability that a `Bin(n, p)` variable is odd, in closed form.
pub fn parity_prob_closed(n: usize, p: f64) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(n as i32)) / 2.0
}

/// The same probability by dynamic programming over the number of trials.
pub fn parity_prob_oracle(n: usize, p: f64) -> f64 {
    let (mut odd, mut even) = (0.0f64, 1.0f64);
    for _ in 0..n {
        (odd, even) = (odd * (1.0 - p) + even * p, even * (1.0 - p) + odd * p);
    }
    odd
}

/// Whether `(1-x)^n ≤ 1 - nx + n(n-1)x²/2` holds at `(x, n)`, allowing for
/// floating-point rounding where the two sides coincide.
pub fn bernoulli_upper_check(x: f64, n: usize) -> bool {
    let nf = n as f64;
    let lhs = (1.0 - x).powi(n as i32);
    let rhs = 1.0 - nf * x + nf * (nf - 1.0) * x * x / 2.0;
    lhs <= rhs + 1e-12 * rhs.abs().max(1.0)
}

/// Attempts needed so that independent attempts, each failing with
/// probability at most `failure`, all fail with probability at most `target`.
pub fn repetitions_needed(failure: f64, target: f64) -> usize {
    assert!(failure > 0.0 && failure < 1.0 && target > 0.0 && target < 1.0);
    // the epsilon keeps exact ratios such as log₃ 9 from rounding up
    ((1.0 / target).ln() / (1.0 / failure).ln() - 1e-9).ceil() as usize
}

/// Per-attempt failure bound of the parity construction (sum over the levels).
pub const BINARY_FAILURE_BOUND: f64 = 107.0 / 108.0;
/// Per-attempt failure bound of the isolation construction.
pub const FULL_FAILURE_BOUND: f64 = 1.0 / 3.0;

/// The separation lower bound `αδ/(50k)`.
pub fn separation_bound(k: usize, alpha: usize, delta: usize) -> f64 {
    (alpha * delta) as f64 / (50 * k) as f64
}

/// Exact probability that one random query with inclusion probability
/// `α/(16k)` separates `k1` from `k2` under parity: both intersections within
/// capacity and of different parity.
pub fn separation_exact(k: usize, alpha: usize, k1: HiddenSet, k2: HiddenSet) -> f64 {
    let p = alpha as f64 / (16 * k) as f64;
    let common = k1.intersect(k2).len();
    let only1 = k1.difference(k2).len();
    let only2 = k2.difference(k1).len();
    let pmf = |m: usize, i: usize| binom(m, i) as f64 * p.powi(i as i32) * (1.0 - p).powi((m - i) as i32);
    let mut total = 0.0;
    for x in 0..=common.min(alpha) {
        let px = pmf(common, x);
        for y in 0..=only1.min(alpha - x) {
            let py = pmf(only1, y);
            for z in 0..=only2.min(alpha - x) {
                if (y + z) % 2 == 1 {
                    total += px * py * pmf(only2, z);
                }
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeparationEstimate {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub delta: usize,
    pub samples: u64,
    pub empirical_prob: f64,
    pub paper_lower_bound: f64,
    pub standard_error: f64,
    /// `empirical_prob ≥ bound − 3·standard_error`.
    pub passed: bool,
}

impl SeparationEstimate {
    pub const CSV_HEADER: &'static str = "n,k,alpha,delta,samples,empirical,bound,passed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n, self.k, self.alpha, self.delta, self.samples, self.empirical_prob, self.paper_lower_bound, self.passed
        )
    }
}

/// Number of workers the samples are split across; fixed so results do not
/// depend on the thread pool.
pub const SEPARATION_WORKERS: u64 = 16;

/// Largest symmetric difference reachable from a set of size `s`: at most
/// `s` removals and `n - s` additions, with removals rounded up.
fn max_sym_diff(n: usize, s: usize) -> usize {
    (2 * s).min(2 * (n - s) + 1)
}

/// Draws an admissible pair: `|K1|` uniform among feasible sizes in
/// `[⌈k/2⌉, k]`, `d` uniform in `[delta, max]`, then `⌈d/2⌉` members of `K1`
/// removed and `⌊d/2⌋` non-members added.
pub fn sample_pair(n: usize, sizes: &[usize], delta: usize, rng: &mut ChaCha8Rng) -> (HiddenSet, HiddenSet) {
    let s = sizes[rng.random_range(0..sizes.len())];
    let d = rng.random_range(delta..=max_sym_diff(n, s));
    let members: Vec<usize> = index::sample(rng, n, s).into_iter().map(|i| i + 1).collect();
    let k1 = Subset::from_ids(members.iter().copied(), n).expect("in range");
    let removed = index::sample(rng, s, d.div_ceil(2)).into_iter().map(|i| members[i]);
    let outside: Vec<usize> = Subset::universe(n).difference(k1).iter().collect();
    let added = index::sample(rng, outside.len(), d / 2).into_iter().map(|i| outside[i]);
    let mut k2 = k1;
    for x in removed {
        k2 = k2.without(x);
    }
    for x in added {
        k2 = k2.with(x);
    }
    (k1, k2)
}

/// Monte-Carlo estimate of the probability that a random telescope query
/// separates a random admissible pair.
pub fn estimate_separation(
    n: usize,
    k: usize,
    alpha: usize,
    delta: usize,
    samples: u64,
    seed: u64,
) -> Result<SeparationEstimate> {
    if delta == 0 {
        return Err(GtError::InfeasibleConstraints("delta must be at least 1".into()));
    }
    if n == 0 || k == 0 || alpha == 0 || samples == 0 {
        return Err(GtError::InfeasibleConstraints(
            "n, k, alpha and samples must be positive".into(),
        ));
    }
    if n > MAX_N || k > n || alpha > k {
        return Err(GtError::InfeasibleConstraints(format!(
            "need alpha <= k <= n <= {MAX_N}, got n={n} k={k} alpha={alpha}"
        )));
    }
    if delta > max_delta(k, alpha) {
        return Err(GtError::InvalidDelta {
            delta,
            max: max_delta(k, alpha),
        });
    }
    let sizes: Vec<usize> = (k.div_ceil(2)..=k).filter(|&s| max_sym_diff(n, s) >= delta).collect();
    if sizes.is_empty() {
        return Err(GtError::InfeasibleConstraints(format!(
            "no pair with |K1| in [{}, {k}] and symmetric difference >= {delta}",
            k.div_ceil(2)
        )));
    }
    let spec = FeedbackSpec::par(n, alpha)?;
    let p = alpha as f64 / (16 * k) as f64;
    let hits: u64 = (0..SEPARATION_WORKERS)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w);
            let quota = samples / SEPARATION_WORKERS + u64::from(w < samples % SEPARATION_WORKERS);
            let mut hits = 0u64;
            for _ in 0..quota {
                let (k1, k2) = sample_pair(n, &sizes, delta, &mut rng);
                let mut q = 0u64;
                for i in 0..n {
                    if rng.random_bool(p) {
                        q |= 1 << i;
                    }
                }
                let q = Subset::from_bits(q);
                let (x1, x2) = (q.intersect(k1), q.intersect(k2));
                if x1.len() <= alpha && x2.len() <= alpha && (x1.len() + x2.len()) % 2 == 1 {
                    assert_ne!(spec.eval_bits(x1), spec.eval_bits(x2), "separating event without differing parity");
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let prob = hits as f64 / samples as f64;
    let se = (prob * (1.0 - prob) / samples as f64).sqrt();
    let bound = separation_bound(k, alpha, delta);
    Ok(SeparationEstimate {
        n,
        k,
        alpha,
        delta,
        samples,
        empirical_prob: prob,
        paper_lower_bound: bound,
        standard_error: se,
        passed: prob >= bound - 3.0 * se,
    })
}

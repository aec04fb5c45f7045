//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use gt_core::feedbacks::doubling_width_search;
use gt_core::subset::Subset;
use gt_core::{FeedbackKind, FeedbackSpec, Params, QuerySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A sequence with the feedback and hidden-set bound it is checked against.
pub struct Fixture {
    pub seq: QuerySequence,
    pub spec: FeedbackSpec,
    pub k: usize,
}

fn random_query(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Subset {
    let mut s = Subset::EMPTY;
    for id in 1..=n {
        if rng.random_bool(p) {
            s = s.with(id);
        }
    }
    s
}

/// Deterministic mix of block partitions, sparse random and dense random
/// sequences over all five feedbacks, with `n <= 10` and `k <= 3`.
pub fn corpus(count: usize, seed: u64) -> Vec<Fixture> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let n = rng.random_range(3..=10usize);
            let k = rng.random_range(1..=3usize.min(n));
            let alpha = rng.random_range(1..=k);
            let kind = FeedbackKind::ALL[i % 5];
            let mut queries = Vec::new();
            match (i / 5) % 4 {
                0 => {
                    // consecutive blocks, then a few sparse extras
                    for b in 0..n.div_ceil(alpha) {
                        let ids = (b * alpha + 1)..=((b + 1) * alpha).min(n);
                        queries.push(Subset::from_ids(ids, n).unwrap());
                    }
                    for _ in 0..rng.random_range(0..3) {
                        queries.push(random_query(n, 0.3, &mut rng));
                    }
                }
                1 => {
                    let p = (alpha as f64 / (2 * k) as f64).min(0.5);
                    for _ in 0..rng.random_range(n..=3 * n) {
                        queries.push(random_query(n, p, &mut rng));
                    }
                }
                2 => {
                    for _ in 0..rng.random_range(2..=8) {
                        queries.push(random_query(n, 0.5, &mut rng));
                    }
                }
                _ => {
                    let order: Vec<usize> = (1..=n).collect();
                    for &id in order.iter().take(rng.random_range(1..=n)) {
                        queries.push(Subset::from_ids([id], n).unwrap());
                    }
                    for _ in 0..rng.random_range(0..2 * n) {
                        queries.push(random_query(n, 0.25, &mut rng));
                    }
                }
            }
            let code = (kind == FeedbackKind::GenFeed)
                .then(|| doubling_width_search(n, alpha.min(2), seed.wrapping_add(i as u64)).unwrap());
            let spec = FeedbackSpec::new(kind, n, alpha, code).unwrap();
            let params = Params {
                n,
                k,
                alpha,
                beta: spec.width().min(gt_core::bar_alpha(n, alpha).unwrap()),
            };
            Fixture {
                seq: QuerySequence::manual(params, queries).unwrap(),
                spec,
                k,
            }
        })
        .collect()
}

/// Every subset of `[1..n]` of size at most `max`, built by recursion rather
/// than the library's enumerator.
pub fn all_subsets_upto(n: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(next: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for id in next..=n {
            cur.push(id);
            go(id + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, max, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient in floating point, by the multiplicative formula.
pub fn binom_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

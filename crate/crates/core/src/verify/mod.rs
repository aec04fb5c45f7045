//! Exhaustive solvability checks over all pairs of candidate hidden sets.
//!
//! Hidden sets of size at most `k_bound` are enumerated by size, then
//! lexicographically. Pairs `(a, b)` with `a < b` in that order are scanned
//! lexicographically and the first failing pair is the reported witness,
//! written with the later (larger) set as `K1`.

mod counterexample;
mod decode;
mod sparsity;

pub use counterexample::f1_counterexample;
pub use decode::{decode, decode_with, enumerate_realizations, realization_count, simulate_feedback, DecodeResult};
pub use sparsity::{sparsity, w_scaling_ratio, SparsityMetrics};

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{induced, AdversaryKind, AdversaryModel};
use crate::error::{GtError, Result};
use crate::feedbacks::{FeedbackSpec, DEFAULT_SUBSET_CAP};
use crate::instance::{HiddenSet, QuerySequence};
use crate::subset::{count_upto, subsets_upto};

/// Default cap on pair-position evaluations per verification.
pub const DEFAULT_PAIR_CAP: u64 = 1_000_000_000;

/// Enumeration limits for the exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of hidden sets (and feedback inputs) enumerated.
    pub subsets: u128,
    /// Maximum number of (pair, position) evaluations.
    pub pair_positions: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            subsets: DEFAULT_SUBSET_CAP,
            pair_positions: DEFAULT_PAIR_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Criterion {
    /// Per-position value sets must be disjoint somewhere.
    Definition6,
    /// Some position is within capacity for both sets and their feedbacks differ.
    Proposition2,
}

/// A pair of hidden sets the sequence fails to tell apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(rename = "K1")]
    pub k1: HiddenSet,
    #[serde(rename = "K2")]
    pub k2: HiddenSet,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub solved: bool,
    pub criterion: Criterion,
    pub pairs_checked: u64,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn prepare(seq: &QuerySequence, spec: &FeedbackSpec, k_bound: usize, caps: &Caps) -> Result<Vec<HiddenSet>> {
    let n = seq.params().n;
    if n != spec.n() {
        return Err(GtError::UniverseMismatch {
            sequence: n,
            feedback: spec.n(),
        });
    }
    if k_bound > n {
        return Err(GtError::PreconditionViolated(format!(
            "k bound {k_bound} exceeds n = {n}"
        )));
    }
    let count = count_upto(n, k_bound);
    if count > caps.subsets {
        return Err(GtError::ResourceLimit {
            what: "hidden sets",
            count,
            cap: caps.subsets,
        });
    }
    Ok(subsets_upto(n, k_bound))
}

/// The image of the feedback, needed only when the adversary may feed anything.
fn reachable_for(spec: &FeedbackSpec, adv: &AdversaryModel, caps: &Caps) -> Result<Arc<HashSet<u64>>> {
    match adv.kind() {
        AdversaryKind::Malicious => spec.reachable_bits(caps.subsets),
        _ => Ok(Arc::new(HashSet::new())),
    }
}

fn distinguished_def6(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    reachable: &HashSet<u64>,
    a: HiddenSet,
    b: HiddenSet,
) -> (bool, u64) {
    for (i, &q) in seq.queries().iter().enumerate() {
        let va = induced(spec, adv, q, a);
        let vb = induced(spec, adv, q, b);
        if va.is_disjoint(&vb, reachable) {
            return (true, i as u64 + 1);
        }
    }
    (false, seq.len() as u64)
}

fn distinguished_prop2(seq: &QuerySequence, spec: &FeedbackSpec, a: HiddenSet, b: HiddenSet) -> (bool, u64) {
    let alpha = spec.alpha();
    for (i, &q) in seq.queries().iter().enumerate() {
        let (xa, xb) = (q.intersect(a), q.intersect(b));
        if xa.len() <= alpha && xb.len() <= alpha && spec.eval_bits(xa) != spec.eval_bits(xb) {
            return (true, i as u64 + 1);
        }
    }
    (false, seq.len() as u64)
}

/// Scans all pairs in canonical order; `check` returns (distinguished, positions used).
fn scan_pairs<F>(sets: &[HiddenSet], cap: u64, criterion: Criterion, note: &str, check: F) -> Result<VerificationReport>
where
    F: Fn(HiddenSet, HiddenSet) -> (bool, u64) + Sync,
{
    let m = sets.len();
    let used = AtomicU64::new(0);
    let exceeded = AtomicBool::new(false);
    let found = (0..m).into_par_iter().find_map_first(|a| {
        for b in a + 1..m {
            if exceeded.load(Ordering::Relaxed) {
                return None;
            }
            let (ok, cost) = check(sets[a], sets[b]);
            if used.fetch_add(cost, Ordering::Relaxed) + cost > cap {
                exceeded.store(true, Ordering::Relaxed);
                return None;
            }
            if !ok {
                return Some((a, b));
            }
        }
        None
    });
    if exceeded.load(Ordering::Relaxed) {
        return Err(GtError::ResourceLimit {
            what: "pair-position checks",
            count: used.load(Ordering::Relaxed) as u128,
            cap: cap as u128,
        });
    }
    let total = (m as u64) * (m as u64).saturating_sub(1) / 2;
    Ok(match found {
        None => VerificationReport {
            solved: true,
            criterion,
            pairs_checked: total,
            witness: None,
        },
        Some((a, b)) => {
            let m = m as u64;
            let (a64, b64) = (a as u64, b as u64);
            // pairs (i, j) with i < a, plus those (a, j) with a < j < b
            let before = a64 * m - a64 * (a64 + 1) / 2 + (b64 - a64 - 1);
            VerificationReport {
                solved: false,
                criterion,
                pairs_checked: before + 1,
                witness: Some(Witness {
                    k1: sets[b],
                    k2: sets[a],
                    note: note.to_string(),
                }),
            }
        }
    })
}

/// Exact solvability check: every pair of distinct hidden sets of size at
/// most `k_bound` must have disjoint value sets at some position.
pub fn verify_sequence(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    k_bound: usize,
) -> Result<VerificationReport> {
    verify_sequence_with(seq, spec, adv, k_bound, &Caps::default())
}

pub fn verify_sequence_with(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    k_bound: usize,
    caps: &Caps,
) -> Result<VerificationReport> {
    let sets = prepare(seq, spec, k_bound, caps)?;
    let reachable = reachable_for(spec, adv, caps)?;
    scan_pairs(
        &sets,
        caps.pair_positions,
        Criterion::Definition6,
        &format!("no position separates the {adv} value sets"),
        |a, b| distinguished_def6(seq, spec, adv, &reachable, a, b),
    )
}

/// The sufficient criterion: each pair needs a within-capacity position with
/// different feedback values.
pub fn verify_prop2(seq: &QuerySequence, spec: &FeedbackSpec, k_bound: usize) -> Result<VerificationReport> {
    verify_prop2_with(seq, spec, k_bound, &Caps::default())
}

pub fn verify_prop2_with(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    k_bound: usize,
    caps: &Caps,
) -> Result<VerificationReport> {
    let sets = prepare(seq, spec, k_bound, caps)?;
    scan_pairs(
        &sets,
        caps.pair_positions,
        Criterion::Proposition2,
        "no within-capacity query with different feedback",
        |a, b| distinguished_prop2(seq, spec, a, b),
    )
}

/// Whether some position separates `k1` and `k2` under the adversary.
pub fn check_pair(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    k1: HiddenSet,
    k2: HiddenSet,
) -> Result<bool> {
    let caps = Caps::default();
    prepare(seq, spec, 0, &caps)?;
    let reachable = reachable_for(spec, adv, &caps)?;
    Ok(distinguished_def6(seq, spec, adv, &reachable, k1, k2).0)
}

/// Whether some within-capacity position gives `k1` and `k2` different feedback.
pub fn check_pair_prop2(seq: &QuerySequence, spec: &FeedbackSpec, k1: HiddenSet, k2: HiddenSet) -> Result<bool> {
    prepare(seq, spec, 0, &Caps::default())?;
    Ok(distinguished_prop2(seq, spec, k1, k2).0)
}

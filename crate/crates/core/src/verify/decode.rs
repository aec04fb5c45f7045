use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prepare, reachable_for, Caps};
use crate::adversaries::{induced, position_value_set, AdversaryModel, PositionValueSet};
use crate::error::{GtError, Result};
use crate::feedbacks::FeedbackSpec;
use crate::instance::{FeedbackWord, HiddenSet, QuerySequence};

/// Hidden sets consistent with an observed feedback vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "sets", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DecodeResult {
    Unique(HiddenSet),
    /// Every consistent candidate, in canonical order.
    Ambiguous(Vec<HiddenSet>),
    NoCandidate,
}

/// Finds every `K` with `|K| ≤ k_bound` whose possible feedback vectors
/// include `observed`.
pub fn decode(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    observed: &[FeedbackWord],
    k_bound: usize,
) -> Result<DecodeResult> {
    decode_with(seq, spec, adv, observed, k_bound, &Caps::default())
}

pub fn decode_with(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    observed: &[FeedbackWord],
    k_bound: usize,
    caps: &Caps,
) -> Result<DecodeResult> {
    if observed.len() != seq.len() {
        return Err(GtError::LengthMismatch {
            observed: observed.len(),
            expected: seq.len(),
        });
    }
    if let Some(w) = observed.iter().find(|w| w.width() != spec.width()) {
        return Err(GtError::PreconditionViolated(format!(
            "observed word {w} has {} bits, feedback has {}",
            w.width(),
            spec.width()
        )));
    }
    let sets = prepare(seq, spec, k_bound, caps)?;
    let reachable = reachable_for(spec, adv, caps)?;
    let mut found: Vec<HiddenSet> = sets
        .par_iter()
        .copied()
        .filter(|&k| {
            seq.queries()
                .iter()
                .zip(observed)
                .all(|(&q, w)| induced(spec, adv, q, k).contains(w.bits(), &reachable))
        })
        .collect();
    Ok(match found.len() {
        0 => DecodeResult::NoCandidate,
        1 => DecodeResult::Unique(found.pop().expect("one element")),
        _ => DecodeResult::Ambiguous(found),
    })
}

/// Produces the feedback vector seen when `hidden` is the hidden set and the
/// adversary picks `choose(position, value_set)` at every position.
pub fn simulate_feedback<F>(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    hidden: HiddenSet,
    subset_cap: u128,
    mut choose: F,
) -> Result<Vec<FeedbackWord>>
where
    F: FnMut(usize, &PositionValueSet) -> FeedbackWord,
{
    seq.queries()
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let vs = position_value_set(spec, adv, q, hidden, subset_cap)?;
            let w = choose(i, &vs);
            if !vs.contains(w) {
                return Err(GtError::PreconditionViolated(format!(
                    "position {i}: chosen word {w} is not inducible"
                )));
            }
            Ok(w)
        })
        .collect()
}

/// Number of distinct feedback vectors the adversary can produce for `hidden`
/// (saturating).
pub fn realization_count(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    hidden: HiddenSet,
    subset_cap: u128,
) -> Result<u128> {
    let mut total: u128 = 1;
    for &q in seq.queries() {
        let vs = position_value_set(spec, adv, q, hidden, subset_cap)?;
        total = total.saturating_mul(vs.values().len() as u128);
    }
    Ok(total)
}

/// All feedback vectors the adversary can produce for `hidden`, or `None`
/// when there are more than `limit`.
pub fn enumerate_realizations(
    seq: &QuerySequence,
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    hidden: HiddenSet,
    limit: u128,
    subset_cap: u128,
) -> Result<Option<Vec<Vec<FeedbackWord>>>> {
    let mut choices = Vec::with_capacity(seq.len());
    let mut total: u128 = 1;
    for &q in seq.queries() {
        let vs = position_value_set(spec, adv, q, hidden, subset_cap)?;
        total = total.saturating_mul(vs.values().len() as u128);
        if total > limit {
            return Ok(None);
        }
        choices.push(vs.values().iter().copied().collect::<Vec<_>>());
    }
    let mut out: Vec<Vec<FeedbackWord>> = vec![Vec::with_capacity(seq.len())];
    for opts in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&w| {
                    let mut v = prefix.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    Ok(Some(out))
}

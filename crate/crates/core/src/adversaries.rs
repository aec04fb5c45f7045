//! Adversary models, described by the set of feedback values they can induce
//! at a single query position.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::feedbacks::{FeedbackKind, FeedbackSpec};
use crate::instance::{FeedbackWord, HiddenSet, Query};
use crate::subset::{for_each_subset_of_size, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Malicious,
    Honest,
    HonestAvoiding,
}

/// How the feedback input is chosen when `|query ∩ hidden| > alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdversaryModel {
    kind: AdversaryKind,
    avoided: Option<usize>,
    allow_smaller: bool,
}

impl AdversaryModel {
    pub fn malicious() -> Self {
        AdversaryModel {
            kind: AdversaryKind::Malicious,
            avoided: None,
            allow_smaller: false,
        }
    }

    /// Feeds exactly `alpha` elements of the true intersection.
    pub fn honest() -> Self {
        AdversaryModel {
            kind: AdversaryKind::Honest,
            avoided: None,
            allow_smaller: false,
        }
    }

    /// Honest, but leaves `avoided` out whenever that still leaves `alpha` elements.
    pub fn honest_avoiding(avoided: usize, n: usize) -> Result<Self> {
        if avoided == 0 || avoided > n {
            return Err(GtError::ElementOutOfRange { id: avoided, n });
        }
        Ok(AdversaryModel {
            kind: AdversaryKind::HonestAvoiding,
            avoided: Some(avoided),
            allow_smaller: false,
        })
    }

    /// Lets honest adversaries feed any subset of size at most `alpha` instead
    /// of exactly `alpha`. No effect on the malicious model.
    pub fn relaxed(mut self) -> Self {
        self.allow_smaller = true;
        self
    }

    pub fn kind(&self) -> AdversaryKind {
        self.kind
    }

    pub fn avoided(&self) -> Option<usize> {
        self.avoided
    }

    pub fn allows_smaller(&self) -> bool {
        self.allow_smaller
    }
}

impl fmt::Display for AdversaryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.avoided) {
            (AdversaryKind::Malicious, _) => write!(f, "malicious")?,
            (AdversaryKind::Honest, _) => write!(f, "honest")?,
            (AdversaryKind::HonestAvoiding, Some(x)) => write!(f, "honest-avoiding:{x}")?,
            (AdversaryKind::HonestAvoiding, None) => write!(f, "honest-avoiding")?,
        }
        if self.allow_smaller {
            write!(f, "+relaxed")?;
        }
        Ok(())
    }
}

impl FromStr for AdversaryModel {
    type Err = GtError;

    /// Accepts `malicious`, `honest`, `honest-avoiding:<id>`, optionally
    /// suffixed with `+relaxed`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (base, relaxed) = match lower.strip_suffix("+relaxed") {
            Some(b) => (b, true),
            None => (lower.as_str(), false),
        };
        let model = match base {
            "malicious" => AdversaryModel::malicious(),
            "honest" => AdversaryModel::honest(),
            other => {
                let id = other
                    .strip_prefix("honest-avoiding:")
                    .or_else(|| other.strip_prefix("honest_avoiding:"))
                    .and_then(|x| x.parse::<usize>().ok())
                    .ok_or_else(|| GtError::Parse(format!("unknown adversary {s:?}")))?;
                AdversaryModel::honest_avoiding(id, usize::MAX)?
            }
        };
        Ok(if relaxed { model.relaxed() } else { model })
    }
}

/// Values the adversary can make the feedback return at one position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionValueSet {
    values: BTreeSet<FeedbackWord>,
    determined: bool,
}

impl PositionValueSet {
    pub fn values(&self) -> &BTreeSet<FeedbackWord> {
        &self.values
    }

    /// True iff the intersection was within capacity, leaving no choice.
    pub fn is_determined(&self) -> bool {
        self.determined
    }

    pub fn contains(&self, w: FeedbackWord) -> bool {
        self.values.contains(&w)
    }

    pub fn is_disjoint(&self, other: &PositionValueSet) -> bool {
        self.values.is_disjoint(&other.values)
    }
}

/// Compact per-position value set used on the verification hot path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Induced {
    Determined(u64),
    /// Sorted, deduplicated honest choices.
    Choice(Vec<u64>),
    /// The whole image of the feedback.
    Anything,
}

impl Induced {
    pub(crate) fn is_disjoint(&self, other: &Induced, reachable: &HashSet<u64>) -> bool {
        use Induced::*;
        match (self, other) {
            (Determined(a), Determined(b)) => a != b,
            (Determined(a), Choice(c)) | (Choice(c), Determined(a)) => c.binary_search(a).is_err(),
            (Determined(a), Anything) | (Anything, Determined(a)) => !reachable.contains(a),
            (Choice(c), Anything) | (Anything, Choice(c)) => !c.iter().any(|v| reachable.contains(v)),
            (Choice(a), Choice(b)) => sorted_disjoint(a, b),
            (Anything, Anything) => reachable.is_empty(),
        }
    }

    pub(crate) fn contains(&self, word: u64, reachable: &HashSet<u64>) -> bool {
        match self {
            Induced::Determined(a) => *a == word,
            Induced::Choice(c) => c.binary_search(&word).is_ok(),
            Induced::Anything => reachable.contains(&word),
        }
    }
}

fn sorted_disjoint(a: &[u64], b: &[u64]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// The sets an honest adversary may feed for an over-capacity intersection `x`.
pub(crate) fn honest_inputs(adv: &AdversaryModel, alpha: usize, x: Subset) -> Vec<Subset> {
    let ground = match adv.avoided {
        Some(a) if x.contains(a) && x.without(a).len() >= alpha => x.without(a),
        _ => x,
    };
    let mut out = Vec::new();
    let sizes = if adv.allow_smaller { 0..=alpha } else { alpha..=alpha };
    for size in sizes {
        for_each_subset_of_size(ground, size, |s| out.push(s));
    }
    out
}

pub(crate) fn induced(spec: &FeedbackSpec, adv: &AdversaryModel, query: Query, hidden: HiddenSet) -> Induced {
    let x = query.intersect(hidden);
    if x.len() <= spec.alpha() {
        return Induced::Determined(spec.eval_bits(x));
    }
    match adv.kind {
        AdversaryKind::Malicious => Induced::Anything,
        AdversaryKind::Honest | AdversaryKind::HonestAvoiding => {
            let mut vals: Vec<u64> = honest_inputs(adv, spec.alpha(), x)
                .into_iter()
                .map(|a| spec.eval_bits(a))
                .collect();
            vals.sort_unstable();
            vals.dedup();
            Induced::Choice(vals)
        }
    }
}

/// Feedback values inducible at a position with query `query` when the hidden set is `hidden`.
pub fn position_value_set(
    spec: &FeedbackSpec,
    adv: &AdversaryModel,
    query: Query,
    hidden: HiddenSet,
    subset_cap: u128,
) -> Result<PositionValueSet> {
    let universe = Subset::universe(spec.n());
    for s in [query, hidden] {
        if let Some(bad) = s.difference(universe).min() {
            return Err(GtError::ElementOutOfRange { id: bad, n: spec.n() });
        }
    }
    let width = spec.width();
    let word = |b: u64| FeedbackWord::new(b, width);
    Ok(match induced(spec, adv, query, hidden) {
        Induced::Determined(b) => PositionValueSet {
            values: BTreeSet::from([word(b)]),
            determined: true,
        },
        Induced::Choice(c) => PositionValueSet {
            values: c.into_iter().map(word).collect(),
            determined: false,
        },
        Induced::Anything => PositionValueSet {
            values: spec.reachable_values(subset_cap)?,
            determined: false,
        },
    })
}

/// The honest choice that makes `sets.0` and `sets.1` look alike under F1:
/// the lexicographically smallest `alpha`-subset of their common part of `query`.
pub fn theorem7_strategy(spec: &FeedbackSpec, query: Query, sets: (HiddenSet, HiddenSet)) -> Result<Subset> {
    if spec.kind() != FeedbackKind::F1 {
        return Err(GtError::PreconditionViolated(format!(
            "strategy is defined for F1, got {}",
            spec.kind()
        )));
    }
    let common = query.intersect(sets.0).intersect(sets.1);
    if common.len() < spec.alpha() {
        return Err(GtError::PreconditionViolated(format!(
            "common intersection {common} has fewer than alpha = {} elements",
            spec.alpha()
        )));
    }
    Ok(common.smallest(spec.alpha()))
}

//! Deterministic `(alpha, beta)`-feedback functions.
//!
//! Five kinds are provided: the parity bit (`Par`), the full set identity
//! (`Full`), parity concatenated with a BCC syndrome (`GenFeed`), and two
//! "two smallest identifiers" feedbacks (`F1` in fixed order, `F2` with the
//! order encoding parity).

mod bcc;
mod canonical;

pub use bcc::{
    build_bcc, build_bcc_with, doubling_width_search, search_bcc_exhaustive, BccCode, BccFile, DEFAULT_RESTARTS,
};
pub use canonical::{canonicalize_feedback, CanonicalFeedback};

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::instance::{bar_alpha, FeedbackWord};
use crate::subset::{canonical_rank, ceil_log2, count_upto, for_each_subset_of_size, Subset, MAX_N};

/// Default cap on the number of subsets any single enumeration may visit.
pub const DEFAULT_SUBSET_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackKind {
    Par,
    Full,
    GenFeed,
    F1,
    F2,
}

impl FeedbackKind {
    pub const ALL: [FeedbackKind; 5] = [
        FeedbackKind::Par,
        FeedbackKind::Full,
        FeedbackKind::GenFeed,
        FeedbackKind::F1,
        FeedbackKind::F2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeedbackKind::Par => "par",
            FeedbackKind::Full => "full",
            FeedbackKind::GenFeed => "genfeed",
            FeedbackKind::F1 => "f1",
            FeedbackKind::F2 => "f2",
        }
    }
}

impl fmt::Display for FeedbackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeedbackKind {
    type Err = GtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "par" | "parity" => Ok(FeedbackKind::Par),
            "full" => Ok(FeedbackKind::Full),
            "genfeed" | "general" => Ok(FeedbackKind::GenFeed),
            "f1" => Ok(FeedbackKind::F1),
            "f2" => Ok(FeedbackKind::F2),
            other => Err(GtError::Parse(format!("unknown feedback {other:?}"))),
        }
    }
}

/// Bits per identifier in F1/F2 words: enough to write `n` itself.
pub fn id_width(n: usize) -> usize {
    ceil_log2(n as u128 + 1).max(1)
}

/// A fully specified feedback function over the universe `[1..n]`.
#[derive(Debug, Clone)]
pub struct FeedbackSpec {
    kind: FeedbackKind,
    n: usize,
    alpha: usize,
    code: Option<Arc<BccCode>>,
    id_width: usize,
    width: usize,
    reachable: OnceLock<Arc<HashSet<u64>>>,
}

impl FeedbackSpec {
    pub fn new(kind: FeedbackKind, n: usize, alpha: usize, code: Option<BccCode>) -> Result<Self> {
        if n == 0 {
            return Err(GtError::ZeroField("n"));
        }
        if alpha == 0 {
            return Err(GtError::ZeroField("alpha"));
        }
        if n > MAX_N {
            return Err(GtError::UniverseTooLarge { n, max: MAX_N });
        }
        if alpha > n {
            return Err(GtError::AlphaExceedsN { alpha, n });
        }
        let idw = id_width(n);
        let width = match kind {
            FeedbackKind::Par => 1,
            FeedbackKind::Full => bar_alpha(n, alpha)?,
            FeedbackKind::GenFeed => {
                let c = code.as_ref().ok_or(GtError::MissingCode)?;
                if c.n() != n {
                    return Err(GtError::InvalidCode(format!(
                        "code is for n = {}, feedback for n = {n}",
                        c.n()
                    )));
                }
                if c.gamma() == 0 {
                    return Err(GtError::InvalidCode("gamma must be at least 1".into()));
                }
                1 + c.width()
            }
            FeedbackKind::F1 | FeedbackKind::F2 => 2 * idw,
        };
        let code = match kind {
            FeedbackKind::GenFeed => code.map(Arc::new),
            _ => None,
        };
        Ok(FeedbackSpec {
            kind,
            n,
            alpha,
            code,
            id_width: idw,
            width,
            reachable: OnceLock::new(),
        })
    }

    pub fn par(n: usize, alpha: usize) -> Result<Self> {
        Self::new(FeedbackKind::Par, n, alpha, None)
    }

    pub fn full(n: usize, alpha: usize) -> Result<Self> {
        Self::new(FeedbackKind::Full, n, alpha, None)
    }

    pub fn genfeed(n: usize, alpha: usize, code: BccCode) -> Result<Self> {
        Self::new(FeedbackKind::GenFeed, n, alpha, Some(code))
    }

    pub fn f1(n: usize, alpha: usize) -> Result<Self> {
        Self::new(FeedbackKind::F1, n, alpha, None)
    }

    pub fn f2(n: usize, alpha: usize) -> Result<Self> {
        Self::new(FeedbackKind::F2, n, alpha, None)
    }

    pub fn kind(&self) -> FeedbackKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn code(&self) -> Option<&BccCode> {
        self.code.as_deref()
    }

    pub fn id_width(&self) -> usize {
        self.id_width
    }

    /// Output width in bits.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Evaluates the feedback on a set of at most `alpha` elements.
    pub fn eval(&self, input: Subset) -> Result<FeedbackWord> {
        if input.len() > self.alpha {
            return Err(GtError::CapacityExceeded {
                size: input.len(),
                alpha: self.alpha,
            });
        }
        if let Some(bad) = input.difference(Subset::universe(self.n)).min() {
            return Err(GtError::ElementOutOfRange { id: bad, n: self.n });
        }
        Ok(FeedbackWord::new(self.eval_bits(input), self.width))
    }

    /// Raw output bits; the caller guarantees `|input| <= alpha` and `input ⊆ [1..n]`.
    pub(crate) fn eval_bits(&self, input: Subset) -> u64 {
        debug_assert!(input.len() <= self.alpha);
        match self.kind {
            FeedbackKind::Par => (input.len() & 1) as u64,
            FeedbackKind::Full => canonical_rank(input, self.n) as u64,
            FeedbackKind::GenFeed => {
                let code = self.code.as_ref().expect("validated at construction");
                let parity = (input.len() & 1) as u64;
                (parity << code.width()) | code.syndrome(input)
            }
            FeedbackKind::F1 | FeedbackKind::F2 => {
                let first = input.min().unwrap_or(0) as u64;
                let second = input.without_min().min().unwrap_or(0) as u64;
                let swap = self.kind == FeedbackKind::F2 && input.len() >= 2 && input.len().is_multiple_of(2);
                let (hi, lo) = if swap { (second, first) } else { (first, second) };
                (hi << self.id_width) | lo
            }
        }
    }

    /// Number of inputs in the feedback domain, `Σ_{i≤alpha} C(n, i)`.
    pub fn domain_size(&self) -> u128 {
        count_upto(self.n, self.alpha)
    }

    /// Image of the feedback over its whole domain, cached after the first call.
    pub fn reachable_values(&self, cap: u128) -> Result<BTreeSet<FeedbackWord>> {
        Ok(self
            .reachable_bits(cap)?
            .iter()
            .map(|&b| FeedbackWord::new(b, self.width))
            .collect())
    }

    pub(crate) fn reachable_bits(&self, cap: u128) -> Result<Arc<HashSet<u64>>> {
        if let Some(set) = self.reachable.get() {
            return Ok(Arc::clone(set));
        }
        let count = self.domain_size();
        if count > cap {
            return Err(GtError::ResourceLimit {
                what: "feedback domain",
                count,
                cap,
            });
        }
        let set = self.reachable.get_or_init(|| {
            let mut image = HashSet::new();
            let universe = Subset::universe(self.n);
            for size in 0..=self.alpha {
                for_each_subset_of_size(universe, size, |s| {
                    image.insert(self.eval_bits(s));
                });
            }
            Arc::new(image)
        });
        Ok(Arc::clone(set))
    }
}

impl Subset {
    pub(crate) fn without_min(self) -> Subset {
        Subset::from_bits(self.bits() & self.bits().wrapping_sub(1))
    }
}

/// Parity of `|input|` read back from an F2 word alone.
///
/// A zero second identifier means the input had at most one element, and the
/// first identifier is zero exactly for the empty input. Otherwise the two
/// identifiers appear in ascending order for odd sizes and swapped for even.
pub fn f2_parity(word: FeedbackWord, id_width: usize) -> bool {
    let mask = (1u64 << id_width) - 1;
    let hi = word.bits() >> id_width;
    let lo = word.bits() & mask;
    if lo == 0 {
        hi != 0
    } else {
        hi < lo
    }
}

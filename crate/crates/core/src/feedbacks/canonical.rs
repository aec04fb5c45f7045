use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{GtError, Result};
use crate::instance::FeedbackWord;
use crate::subset::{canonical_rank, ceil_log2, count_upto, subsets_upto, Subset, MAX_N};

/// A feedback relabelled onto at most `bar_alpha` bits.
///
/// Labels are assigned to value classes in first-seen order over the
/// canonical subset enumeration, so the empty set always gets label 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFeedback {
    n: usize,
    alpha: usize,
    width: usize,
    classes: usize,
    labels: Vec<u64>,
}

impl CanonicalFeedback {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Label width: `⌈log₂ classes⌉`, at least one bit.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn label(&self, input: Subset) -> Result<u64> {
        if input.len() > self.alpha {
            return Err(GtError::CapacityExceeded {
                size: input.len(),
                alpha: self.alpha,
            });
        }
        if let Some(bad) = input.difference(Subset::universe(self.n)).min() {
            return Err(GtError::ElementOutOfRange { id: bad, n: self.n });
        }
        Ok(self.labels[canonical_rank(input, self.n) as usize])
    }

    pub fn eval(&self, input: Subset) -> Result<FeedbackWord> {
        Ok(FeedbackWord::new(self.label(input)?, self.width))
    }
}

/// Partitions the feedback domain into classes of equal `feedback` value and
/// labels each class.
pub fn canonicalize_feedback<V, F>(
    feedback: F,
    n: usize,
    alpha: usize,
    cap: u128,
) -> Result<CanonicalFeedback>
where
    V: Eq + Hash,
    F: Fn(Subset) -> V,
{
    if n == 0 || alpha == 0 {
        return Err(GtError::ZeroField(if n == 0 { "n" } else { "alpha" }));
    }
    if n > MAX_N {
        return Err(GtError::UniverseTooLarge { n, max: MAX_N });
    }
    if alpha > n {
        return Err(GtError::AlphaExceedsN { alpha, n });
    }
    let count = count_upto(n, alpha);
    if count > cap {
        return Err(GtError::ResourceLimit {
            what: "feedback domain",
            count,
            cap,
        });
    }
    let mut class_of: HashMap<V, u64> = HashMap::new();
    let mut labels = Vec::with_capacity(count as usize);
    for s in subsets_upto(n, alpha) {
        let next = class_of.len() as u64;
        labels.push(*class_of.entry(feedback(s)).or_insert(next));
    }
    let classes = class_of.len();
    Ok(CanonicalFeedback {
        n,
        alpha,
        width: ceil_log2(classes as u128).max(1),
        classes,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedbacks::{FeedbackSpec, DEFAULT_SUBSET_CAP};
    use crate::instance::bar_alpha;

    #[test]
    fn constant_feedback_collapses_to_zero() {
        let c = canonicalize_feedback(|_| (), 6, 3, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(c.classes(), 1);
        for s in subsets_upto(6, 3) {
            assert_eq!(c.label(s).unwrap(), 0);
        }
    }

    #[test]
    fn identity_uses_bar_alpha_bits() {
        for (n, a) in [(4, 4), (5, 2), (7, 3), (9, 1)] {
            let c = canonicalize_feedback(|s| s, n, a, DEFAULT_SUBSET_CAP).unwrap();
            assert_eq!(c.classes() as u128, count_upto(n, a));
            assert_eq!(c.width(), bar_alpha(n, a).unwrap());
            let mut seen: Vec<u64> = subsets_upto(n, a).iter().map(|&s| c.label(s).unwrap()).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len() as u128, count_upto(n, a));
        }
    }

    #[test]
    fn parity_gives_two_classes() {
        let par = FeedbackSpec::par(5, 2).unwrap();
        let c = canonicalize_feedback(|s| par.eval(s).unwrap(), 5, 2, DEFAULT_SUBSET_CAP).unwrap();
        assert_eq!(c.classes(), 2);
        for s in subsets_upto(5, 2) {
            assert_eq!(c.label(s).unwrap(), (s.len() % 2) as u64);
        }
    }
}

use super::check_pair;
use crate::adversaries::AdversaryModel;
use crate::feedbacks::FeedbackSpec;
use crate::instance::{HiddenSet, QuerySequence};
use crate::subset::Subset;

/// Searches for two hidden sets that an honest adversary can make look alike
/// under the fixed-order two-minima feedback.
///
/// Candidates are built by the counting argument over per-query minima and
/// each one is confirmed with the exact pair check before it is returned.
pub fn f1_counterexample(seq: &QuerySequence, k_bound: usize, alpha: usize) -> Option<(HiddenSet, HiddenSet)> {
    let n = seq.params().n;
    if k_bound == 0 || alpha == 0 || alpha > n || k_bound > n {
        return None;
    }
    let spec = FeedbackSpec::f1(n, alpha).ok()?;
    let adv = AdversaryModel::honest();
    let confirmed = |s: HiddenSet, s2: HiddenSet| match check_pair(seq, &spec, &adv, s, s2) {
        Ok(false) => Some((s, s2)),
        _ => None,
    };
    let queries = seq.queries();

    // an element outside every query is never seen
    let covered = queries.iter().fold(Subset::EMPTY, |acc, &q| acc.union(q));
    if let Some(x) = Subset::universe(n).difference(covered).min() {
        return confirmed(Subset::EMPTY.with(x), Subset::EMPTY);
    }

    // few queries against a large hidden set: some member is never a minimum
    if 2 * k_bound >= n && 2 * queries.len() < k_bound {
        let k = Subset::universe(k_bound);
        let revealed = queries.iter().fold(Subset::EMPTY, |acc, &q| {
            let x = q.intersect(k);
            acc.union(x.smallest(2))
        });
        if let Some(x) = k.difference(revealed).min() {
            if let Some(pair) = confirmed(k, k.without(x)) {
                return Some(pair);
            }
        }
    }

    // elements that are never among the two smallest of a query
    let minima = queries.iter().fold(Subset::EMPTY, |acc, &q| acc.union(q.smallest(2)));
    let mut rest: Vec<usize> = Subset::universe(n).difference(minima).ids();
    rest.reverse();
    if rest.len() < k_bound {
        return None;
    }
    let j_max = (k_bound / 2).max(1);
    for j in 1..=j_max {
        let r_1j = Subset::from_ids(rest[..j].iter().copied(), n).ok()?;
        for i in 1..=j {
            let r_i = rest[i - 1];
            let r_tail = Subset::from_ids(rest[i..j].iter().copied(), n).ok()?;
            let mut a = Subset::EMPTY;
            let mut b = Subset::EMPTY;
            let (mut a_count, mut b_count) = (0usize, 0usize);
            for &q in queries.iter().filter(|q| q.len() > 1 && q.contains(r_i)) {
                match q.intersect(r_tail).len() {
                    0 => {
                        a_count += 1;
                        a = a.union(q.smallest(2));
                    }
                    1 => {
                        b_count += 1;
                        b = b.union(q.smallest(1));
                    }
                    _ => {}
                }
            }
            if 2 * a_count + b_count > k_bound - j {
                continue;
            }
            let s = r_1j.union(a).union(b);
            if s.len() > k_bound {
                continue;
            }
            if let Some(pair) = confirmed(s, s.without(r_i)) {
                return Some(pair);
            }
        }
    }
    None
}

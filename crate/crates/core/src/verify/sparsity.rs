use serde::{Deserialize, Serialize};

use crate::instance::QuerySequence;

/// Per-element load and per-query size of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityMetrics {
    /// Maximum number of queries containing a single element.
    pub w: usize,
    /// Maximum query size.
    pub rho: usize,
}

pub fn sparsity(seq: &QuerySequence) -> SparsityMetrics {
    let n = seq.params().n;
    let mut load = vec![0usize; n + 1];
    let mut rho = 0;
    for q in seq.queries() {
        rho = rho.max(q.len());
        for id in q.iter() {
            load[id] += 1;
        }
    }
    SparsityMetrics {
        w: load.into_iter().max().unwrap_or(0),
        rho,
    }
}

/// `w / (k·log₂(n/k))`, the measured load against its expected scaling.
pub fn w_scaling_ratio(w: usize, n: usize, k: usize) -> f64 {
    w as f64 / (k as f64 * (n as f64 / k as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_trivial_selector;
    use crate::instance::Params;

    #[test]
    fn selector_and_empty() {
        let s = sparsity(&gen_trivial_selector(7, 3).unwrap());
        assert_eq!(s, SparsityMetrics { w: 1, rho: 3 });
        let p = Params { n: 5, k: 1, alpha: 1, beta: 1 };
        let empty = QuerySequence::manual(p, vec![]).unwrap();
        assert_eq!(sparsity(&empty), SparsityMetrics { w: 0, rho: 0 });
    }
}

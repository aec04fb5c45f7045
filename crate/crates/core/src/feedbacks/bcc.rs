//! Codes whose XOR over any set of at most `gamma` codewords is unique.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::subset::{count_upto, for_each_subset_of_size, Subset, MAX_N};

/// Restart cap for the randomized greedy search.
pub const DEFAULT_RESTARTS: usize = 1000;

/// Widths up to this size shuffle the whole word space at each greedy step.
const FULL_SCAN_WIDTH: usize = 12;
/// Random draws per greedy step for wider codes.
const DRAWS_PER_STEP: usize = 2048;

/// An `[n, width, gamma]` code: `codewords[i]` belongs to element `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BccCode {
    n: usize,
    gamma: usize,
    width: usize,
    codewords: Vec<u64>,
}

impl BccCode {
    /// Wraps explicit codewords after checking shape and the injectivity property.
    pub fn new(n: usize, gamma: usize, width: usize, codewords: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(GtError::InvalidCode(format!("n = {n} outside [1, {MAX_N}]")));
        }
        if width == 0 || width > 63 {
            return Err(GtError::InvalidCode(format!("width = {width} outside [1, 63]")));
        }
        if gamma == 0 || gamma > n {
            return Err(GtError::InvalidCode(format!("gamma = {gamma} outside [1, n]")));
        }
        if codewords.len() != n {
            return Err(GtError::InvalidCode(format!(
                "expected {n} codewords, got {}",
                codewords.len()
            )));
        }
        if let Some(c) = codewords.iter().find(|&&c| c >> width != 0) {
            return Err(GtError::InvalidCode(format!(
                "codeword {c:#b} wider than {width} bits"
            )));
        }
        let code = BccCode {
            n,
            gamma,
            width,
            codewords,
        };
        if let Some((a, b)) = code.find_collision() {
            return Err(GtError::InvalidCode(format!(
                "subsets {a} and {b} have equal XOR"
            )));
        }
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn codewords(&self) -> &[u64] {
        &self.codewords
    }

    pub fn codeword(&self, id: usize) -> u64 {
        self.codewords[id - 1]
    }

    /// XOR of the codewords of `set`; zero for the empty set.
    pub fn syndrome(&self, set: Subset) -> u64 {
        set.iter().fold(0, |acc, id| acc ^ self.codewords[id - 1])
    }

    /// Exhaustively hashes every subset XOR of size `<= gamma`; returns the
    /// first colliding pair if the code is not injective.
    pub fn find_collision(&self) -> Option<(Subset, Subset)> {
        let mut seen: HashMap<u64, Subset> = HashMap::new();
        let mut hit = None;
        for size in 0..=self.gamma {
            for_each_subset_of_size(Subset::universe(self.n), size, |s| {
                if hit.is_some() {
                    return;
                }
                let x = self.syndrome(s);
                if let Some(prev) = seen.insert(x, s) {
                    hit = Some((prev, s));
                }
            });
            if hit.is_some() {
                break;
            }
        }
        hit
    }

    pub fn is_injective(&self) -> bool {
        self.find_collision().is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BccFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: BccFile = serde_json::from_str(text).map_err(|e| GtError::Parse(e.to_string()))?;
        f.try_into()
    }
}

/// On-disk form: codewords as MSB-first bit strings, index `i` for element `i + 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BccFile {
    pub n: usize,
    pub gamma: usize,
    pub width: usize,
    pub codewords: Vec<String>,
}

impl From<&BccCode> for BccFile {
    fn from(c: &BccCode) -> Self {
        BccFile {
            n: c.n,
            gamma: c.gamma,
            width: c.width,
            codewords: c
                .codewords
                .iter()
                .map(|&w| format!("{w:0width$b}", width = c.width))
                .collect(),
        }
    }
}

impl TryFrom<BccFile> for BccCode {
    type Error = GtError;

    fn try_from(f: BccFile) -> Result<Self> {
        let words = f
            .codewords
            .iter()
            .map(|s| {
                if s.len() != f.width {
                    return Err(GtError::Parse(format!(
                        "codeword {s:?} is not {} bits",
                        f.width
                    )));
                }
                u64::from_str_radix(s, 2).map_err(|e| GtError::Parse(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        BccCode::new(f.n, f.gamma, f.width, words)
    }
}

/// Randomized greedy search for an injective code of width at most `width_budget`.
///
/// Budgets below the counting bound `2^width < Σ_{i≤gamma} C(n, i)` are
/// rejected without searching (`attempts = 0`).
pub fn build_bcc(n: usize, gamma: usize, width_budget: usize, seed: u64) -> Result<BccCode> {
    build_bcc_with(n, gamma, width_budget, seed, DEFAULT_RESTARTS)
}

/// [`build_bcc`] with an explicit restart cap.
pub fn build_bcc_with(
    n: usize,
    gamma: usize,
    width_budget: usize,
    seed: u64,
    restarts: usize,
) -> Result<BccCode> {
    if gamma == 0 {
        return Err(GtError::ZeroField("gamma"));
    }
    if gamma > n {
        return Err(GtError::PreconditionViolated(format!(
            "gamma = {gamma} exceeds n = {n}"
        )));
    }
    let width = width_budget.min(63);
    if width == 0 {
        return Err(GtError::ZeroField("width_budget"));
    }
    if (1u128 << width) < count_upto(n, gamma) {
        return Err(GtError::BudgetInfeasible {
            n,
            gamma,
            width,
            attempts: 0,
        });
    }
    search_bcc_exhaustive(n, gamma, width, seed, restarts)
}

/// The greedy search itself, without the counting-bound shortcut.
pub fn search_bcc_exhaustive(
    n: usize,
    gamma: usize,
    width: usize,
    seed: u64,
    restarts: usize,
) -> Result<BccCode> {
    if n == 0 || n > MAX_N || width == 0 || width > 63 || gamma == 0 || gamma > n {
        return Err(GtError::PreconditionViolated(format!(
            "bad code shape n={n} gamma={gamma} width={width}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=restarts {
        if let Some(words) = greedy_attempt(n, gamma, width, &mut rng) {
            let code = BccCode {
                n,
                gamma,
                width,
                codewords: words,
            };
            debug_assert!(code.is_injective(), "greedy search broke injectivity on attempt {attempt}");
            return Ok(code);
        }
    }
    Err(GtError::BudgetInfeasible {
        n,
        gamma,
        width,
        attempts: restarts,
    })
}

fn greedy_attempt(n: usize, gamma: usize, width: usize, rng: &mut ChaCha8Rng) -> Option<Vec<u64>> {
    // layers[j] holds XORs of all j-subsets of the chosen words
    let mut layers: Vec<Vec<u64>> = vec![Vec::new(); gamma + 1];
    layers[0].push(0);
    let mut all: HashSet<u64> = HashSet::from([0]);
    let mut words = Vec::with_capacity(n);
    let top = (1u64 << width) - 1;

    let admissible = |c: u64, layers: &[Vec<u64>], all: &HashSet<u64>| {
        layers[..gamma].iter().flatten().all(|&v| !all.contains(&(v ^ c)))
    };

    for _ in 0..n {
        let pick = if width <= FULL_SCAN_WIDTH {
            let mut space: Vec<u64> = (1..=top).collect();
            space.shuffle(rng);
            space.into_iter().find(|&c| admissible(c, &layers, &all))
        } else {
            (0..DRAWS_PER_STEP)
                .map(|_| rng.random_range(1..=top))
                .find(|&c| admissible(c, &layers, &all))
        };
        let c = pick?;
        for j in (0..gamma).rev() {
            let fresh: Vec<u64> = layers[j].iter().map(|&v| v ^ c).collect();
            all.extend(fresh.iter().copied());
            layers[j + 1].extend(fresh);
        }
        words.push(c);
    }
    Some(words)
}

/// Tries widths `1, 2, 4, 8, ...` until the search succeeds.
pub fn doubling_width_search(n: usize, gamma: usize, seed: u64) -> Result<BccCode> {
    let mut width = 1;
    loop {
        match build_bcc(n, gamma, width, seed) {
            Ok(code) => return Ok(code),
            Err(GtError::BudgetInfeasible { .. }) if width < 63 => width = (width * 2).min(63),
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_are_injective_for_gamma_two() {
        // all 7 subset XORs of {001, 010, 100} are distinct
        let code = BccCode::new(3, 2, 3, vec![0b001, 0b010, 0b100]).unwrap();
        let mut xs: Vec<u64> = crate::subset::subsets_upto(3, 2)
            .into_iter()
            .map(|s| code.syndrome(s))
            .collect();
        xs.sort();
        assert_eq!(xs, vec![0b000, 0b001, 0b010, 0b011, 0b100, 0b101, 0b110]);
    }

    #[test]
    fn rejects_collisions() {
        // 1 ^ 2 == 3
        assert!(BccCode::new(3, 2, 2, vec![1, 2, 3]).is_err());
        assert!(BccCode::new(3, 1, 2, vec![1, 2, 3]).is_ok());
        // zero codeword collides with the empty set
        assert!(BccCode::new(2, 1, 2, vec![0, 1]).is_err());
    }

    #[test]
    fn gamma_one_needs_only_distinct_nonzero_words() {
        for n in 1..=20 {
            let width = crate::subset::ceil_log2(n as u128 + 1);
            let code = build_bcc(n, 1, width, 11).unwrap();
            assert!(code.width() <= width);
            let mut ws = code.codewords().to_vec();
            ws.sort();
            ws.dedup();
            assert_eq!(ws.len(), n);
            assert!(!ws.contains(&0));
        }
    }

    #[test]
    fn counting_bound_and_exhausted_search_agree() {
        // 2^2 = 4 < 1 + 8 + 28 = 37
        assert_eq!(count_upto(8, 2), 37);
        assert!(matches!(
            build_bcc(8, 2, 2, 0),
            Err(GtError::BudgetInfeasible { attempts: 0, .. })
        ));
        assert!(matches!(
            search_bcc_exhaustive(8, 2, 2, 0, DEFAULT_RESTARTS),
            Err(GtError::BudgetInfeasible { attempts: DEFAULT_RESTARTS, .. })
        ));
    }

    #[test]
    fn search_is_deterministic() {
        let a = build_bcc(10, 2, 9, 42).unwrap();
        let b = build_bcc(10, 2, 9, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let code = build_bcc(6, 2, 6, 1).unwrap();
        let back = BccCode::from_json(&code.to_json()).unwrap();
        assert_eq!(code, back);
        let text = r#"{"n":3,"gamma":2,"width":3,"codewords":["001","010","100"]}"#;
        let parsed = BccCode::from_json(text).unwrap();
        assert_eq!(parsed.codeword(3), 0b100);
    }
}

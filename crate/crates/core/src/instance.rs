//! Problem instances, query sequences and feedback words.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GtError, Result};
use crate::subset::{ceil_log2, count_upto, Subset, MAX_N};

/// A single query is an arbitrary subset of the universe.
pub type Query = Subset;
/// The unknown set the decoder must identify.
pub type HiddenSet = Subset;

/// Name of the pseudo-random generator every randomized construction uses.
pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

/// A 1-based element identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(usize);

impl Element {
    pub fn new(id: usize, n: usize) -> Result<Self> {
        if id == 0 || id > n {
            return Err(GtError::ElementOutOfRange { id, n });
        }
        Ok(Element(id))
    }

    pub fn id(self) -> usize {
        self.0
    }
}

/// An `(n, k)` group-testing instance with an `(alpha, beta)` feedback budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl Params {
    /// Validated constructor.
    pub fn new(n: usize, k: usize, alpha: usize, beta: usize) -> Result<Self> {
        let p = Params { n, k, alpha, beta };
        validate_instance(&p)?;
        Ok(p)
    }
}

/// `⌈log₂ Σ_{i≤alpha} C(n, i)⌉`: bits needed to name every subset of size at most `alpha`.
pub fn bar_alpha(n: usize, alpha: usize) -> Result<usize> {
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
    Ok(ceil_log2(count_upto(n, alpha)))
}

/// Checks `1 ≤ alpha ≤ k ≤ n ≤ 64` and `1 ≤ beta ≤ bar_alpha(n, alpha)`.
pub fn validate_instance(p: &Params) -> Result<()> {
    for (name, v) in [("n", p.n), ("k", p.k), ("alpha", p.alpha), ("beta", p.beta)] {
        if v == 0 {
            return Err(GtError::ZeroField(name));
        }
    }
    if p.n > MAX_N {
        return Err(GtError::UniverseTooLarge { n: p.n, max: MAX_N });
    }
    if p.alpha > p.k {
        return Err(GtError::CapacityExceedsK {
            alpha: p.alpha,
            k: p.k,
        });
    }
    if p.k > p.n {
        return Err(GtError::KExceedsN { k: p.k, n: p.n });
    }
    let ba = bar_alpha(p.n, p.alpha)?;
    if p.beta > ba {
        return Err(GtError::BetaExceedsBarAlpha {
            beta: p.beta,
            bar_alpha: ba,
        });
    }
    Ok(())
}

/// A fixed-width word returned by a feedback function, at most 64 bits.
///
/// Bit strings are written most significant bit first, so for a word built as
/// `a ∥ b` the bits of `a` come first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeedbackWord {
    bits: u64,
    width: u8,
}

impl FeedbackWord {
    pub fn new(bits: u64, width: usize) -> Self {
        assert!((1..=64).contains(&width), "feedback width {width} out of range");
        debug_assert!(width == 64 || bits >> width == 0);
        FeedbackWord {
            bits,
            width: width as u8,
        }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Bit `i` counted from the most significant end (`0` is the leftmost).
    pub fn bit(self, i: usize) -> bool {
        (self.bits >> (self.width() - 1 - i)) & 1 == 1
    }

    pub fn to_bitstring(self) -> String {
        (0..self.width())
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > 64 {
            return Err(GtError::Parse(format!("bad bitstring length in {s:?}")));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(GtError::Parse(format!("bad bit {c:?} in {s:?}"))),
                };
        }
        Ok(FeedbackWord::new(bits, s.len()))
    }
}

impl fmt::Debug for FeedbackWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeedbackWord({})", self.to_bitstring())
    }
}

impl fmt::Display for FeedbackWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl Serialize for FeedbackWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for FeedbackWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FeedbackWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One contiguous block of a concatenated sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub length: usize,
}

/// How a sequence was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub seed: u64,
    pub rng: String,
    pub parts: Vec<Part>,
    /// Free-form construction facts (log base, chosen parameters, flags).
    pub notes: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>, seed: u64) -> Self {
        Provenance {
            construction: construction.into(),
            seed,
            rng: RNG_NAME.to_string(),
            parts: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.insert(key.to_string(), value.to_string());
    }
}

/// An ordered, non-adaptive list of queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySequence {
    params: Params,
    queries: Vec<Query>,
    provenance: Provenance,
}

impl QuerySequence {
    /// Checks that every query lies in `[1..n]` and that the recorded part
    /// lengths add up to the sequence length.
    pub fn new(params: Params, queries: Vec<Query>, provenance: Provenance) -> Result<Self> {
        let universe = Subset::universe(params.n.min(MAX_N));
        for q in &queries {
            if let Some(bad) = q.difference(universe).min() {
                return Err(GtError::ElementOutOfRange {
                    id: bad,
                    n: params.n,
                });
            }
        }
        let recorded: usize = provenance.parts.iter().map(|p| p.length).sum();
        if recorded != queries.len() {
            return Err(GtError::PartLengthMismatch {
                actual: queries.len(),
                recorded,
            });
        }
        Ok(QuerySequence {
            params,
            queries,
            provenance,
        })
    }

    /// A hand-written sequence recorded as a single part.
    pub fn manual(params: Params, queries: Vec<Query>) -> Result<Self> {
        let mut prov = Provenance::new("manual", 0);
        prov.parts.push(Part {
            name: "manual".into(),
            length: queries.len(),
        });
        Self::new(params, queries, prov)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Concatenates two sequences over the same universe, keeping both part lists.
    pub fn concat(mut self, other: QuerySequence, provenance: Provenance) -> Result<Self> {
        if other.params.n != self.params.n {
            return Err(GtError::UniverseMismatch {
                sequence: self.params.n,
                feedback: other.params.n,
            });
        }
        self.queries.extend(other.queries);
        QuerySequence::new(self.params, self.queries, provenance)
    }

    /// Appends queries as a new `manual` part.
    pub fn with_appended(&self, extra: &[Query]) -> Result<Self> {
        let mut prov = self.provenance.clone();
        prov.parts.push(Part {
            name: "appended".into(),
            length: extra.len(),
        });
        let mut queries = self.queries.clone();
        queries.extend_from_slice(extra);
        QuerySequence::new(self.params, queries, prov)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SequenceFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SequenceFile =
            serde_json::from_str(text).map_err(|e| GtError::Parse(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk form of a [`QuerySequence`].
///
/// The first seven fields are the interchange format; `rng`, `parts` and
/// `notes` carry the rest of the provenance and may be omitted on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
    pub construction: String,
    pub seed: u64,
    pub queries: Vec<Subset>,
    #[serde(default)]
    pub rng: Option<String>,
    #[serde(default)]
    pub parts: Option<Vec<Part>>,
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl From<&QuerySequence> for SequenceFile {
    fn from(seq: &QuerySequence) -> Self {
        let p = seq.params;
        SequenceFile {
            n: p.n,
            k: p.k,
            alpha: p.alpha,
            beta: p.beta,
            construction: seq.provenance.construction.clone(),
            seed: seq.provenance.seed,
            queries: seq.queries.clone(),
            rng: Some(seq.provenance.rng.clone()),
            parts: Some(seq.provenance.parts.clone()),
            notes: seq.provenance.notes.clone(),
        }
    }
}

impl TryFrom<SequenceFile> for QuerySequence {
    type Error = GtError;

    fn try_from(f: SequenceFile) -> Result<Self> {
        let params = Params {
            n: f.n,
            k: f.k,
            alpha: f.alpha,
            beta: f.beta,
        };
        if f.n == 0 || f.n > MAX_N {
            return Err(GtError::UniverseTooLarge { n: f.n, max: MAX_N });
        }
        let parts = f.parts.unwrap_or_else(|| {
            vec![Part {
                name: f.construction.clone(),
                length: f.queries.len(),
            }]
        });
        let provenance = Provenance {
            construction: f.construction,
            seed: f.seed,
            rng: f.rng.unwrap_or_else(|| RNG_NAME.to_string()),
            parts,
            notes: f.notes,
        };
        QuerySequence::new(params, f.queries, provenance)
    }
}

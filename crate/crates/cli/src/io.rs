use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use gt_core::{BccCode, FeedbackWord, QuerySequence};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes `text` plus a trailing newline to `path`, or to stdout.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn read_sequence(path: &Path) -> Result<QuerySequence> {
    QuerySequence::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_code(path: &Path) -> Result<BccCode> {
    BccCode::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// The code the general construction stored alongside its sequence.
pub fn code_from_provenance(seq: &QuerySequence) -> Result<BccCode> {
    let text = seq
        .provenance()
        .notes
        .get("code")
        .ok_or_else(|| anyhow!("sequence records no code; pass --code"))?;
    BccCode::from_json(text).context("parsing the recorded code")
}

/// Reads a JSON list of bitstrings, most significant bit first.
pub fn read_observed(path: &Path) -> Result<Vec<FeedbackWord>> {
    let words: Vec<String> =
        serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    words
        .iter()
        .map(|w| FeedbackWord::parse(w).map_err(Into::into))
        .collect()
}

pub fn observed_json(words: &[FeedbackWord]) -> String {
    let strings: Vec<String> = words.iter().map(|w| w.to_bitstring()).collect();
    serde_json::to_string_pretty(&strings).expect("serializable")
}

/// Appends one CSV row, writing the header first when the file is new or empty.
pub fn append_csv_row(path: Option<&Path>, header: &str, row: &str) -> Result<()> {
    match path {
        Some(p) => {
            let fresh = fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true);
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("opening {}", p.display()))?;
            if fresh {
                writeln!(f, "{header}")?;
            }
            writeln!(f, "{row}")?;
        }
        None => {
            println!("{header}");
            println!("{row}");
        }
    }
    Ok(())
}

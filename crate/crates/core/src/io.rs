//! Sample and histogram file formats.
//!
//! # Sample files
//!
//! Two encodings are accepted by [`read_samples`], told apart by the first
//! non-blank character:
//!
//! * **Bit-string text**: one shot per line, each line made only of `0` and
//!   `1`. The first line fixes `n`; every other line must have the same
//!   length. Blank lines are ignored. The leftmost character is qubit 0,
//!   the most significant bit of the index.
//!
//! * **Counts document** (starts with `{`): a JSON object
//!   `{"n": 2, "counts": {"01": 3, "11": 5}}` mapping bit strings of length
//!   `n` to nonnegative integer counts. Optional keys `seed`,
//!   `lambda_claim` and `partition` (`{"n": .., "a_bits": [..]}`) carry
//!   metadata.
//!
//! # Histogram CSV
//!
//! Header `x_lo,x_hi,density`, one row per bin with values written to 12
//! significant digits, then a trailer `# count=<total> overflow=<o>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::Partition;
use crate::stats::Histogram;
use crate::xeb::{SampleMeta, SampleSet};

/// Renders index `j` as an `n`-character bit string, qubit 0 first.
pub fn format_bits(j: u64, n: u32) -> String {
    (0..n)
        .map(|q| {
            if (j >> (n - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses a bit string, qubit 0 first.
pub fn parse_bits(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 63 {
        return None;
    }
    s.bytes().try_fold(0u64, |acc, c| match c {
        b'0' => Some(acc << 1),
        b'1' => Some((acc << 1) | 1),
        _ => None,
    })
}

#[derive(Serialize, Deserialize)]
struct CountsDocument {
    n: u32,
    counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_claim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partition: Option<Partition>,
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples(&text)
}

/// Parses either sample encoding from a string.
pub fn parse_samples(text: &str) -> Result<SampleSet> {
    if text.trim_start().starts_with('{') {
        parse_counts_document(text)
    } else {
        parse_bitstring_lines(text)
    }
}

fn parse_bitstring_lines(text: &str) -> Result<SampleSet> {
    let mut set: Option<SampleSet> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let j = parse_bits(line).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected a bit string of '0'/'1' (at most 63), got {line:?}"),
        })?;
        let set = match &mut set {
            Some(s) => s,
            None => set.insert(SampleSet::new(line.len() as u32)?),
        };
        if line.len() as u32 != set.n() {
            return Err(Error::Format(format!(
                "line {line_no} has {} bits, expected {}",
                line.len(),
                set.n()
            )));
        }
        set.add(j, 1)?;
    }
    set.ok_or(Error::Parse {
        line: 0,
        msg: "no bit strings found".into(),
    })
}

fn parse_counts_document(text: &str) -> Result<SampleSet> {
    let doc: CountsDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let mut set = SampleSet::new(doc.n)?;
    for (bits, count) in &doc.counts {
        let j = parse_bits(bits)
            .ok_or_else(|| Error::Format(format!("invalid bit string key {bits:?}")))?;
        if bits.len() as u32 != doc.n {
            return Err(Error::Format(format!(
                "key {bits:?} has {} bits but n = {}",
                bits.len(),
                doc.n
            )));
        }
        set.add(j, *count)?;
    }
    if let Some(part) = &doc.partition {
        if part.n() != doc.n {
            return Err(Error::Format(format!(
                "partition is over {} qubits but n = {}",
                part.n(),
                doc.n
            )));
        }
    }
    set.meta = SampleMeta {
        seed: doc.seed,
        lambda_claim: doc.lambda_claim,
        partition: doc.partition,
    };
    Ok(set)
}

/// Serializes a sample set as a counts document.
pub fn samples_to_json(set: &SampleSet) -> String {
    let doc = CountsDocument {
        n: set.n(),
        counts: set
            .counts()
            .iter()
            .map(|(&j, &c)| (format_bits(j, set.n()), c))
            .collect(),
        seed: set.meta.seed,
        lambda_claim: set.meta.lambda_claim,
        partition: set.meta.partition.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("counts document serializes");
    s.push('\n');
    s
}

pub fn write_samples(set: &SampleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, samples_to_json(set)).map_err(|e| Error::io(path, e))
}

/// Twelve significant digits in scientific notation.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn histogram_to_csv(h: &Histogram) -> String {
    let mut out = String::from("x_lo,x_hi,density\n");
    for (w, d) in h.edges.windows(2).zip(&h.densities) {
        let _ = writeln!(out, "{},{},{}", sig12(w[0]), sig12(w[1]), sig12(*d));
    }
    let _ = writeln!(out, "# count={} overflow={}", h.count, h.overflow);
    out
}

pub fn write_histogram_csv(h: &Histogram, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, histogram_to_csv(h)).map_err(|e| Error::io(path, e))
}

pub fn read_histogram_csv(path: impl AsRef<Path>) -> Result<Histogram> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_histogram_csv(&text)
}

pub fn parse_histogram_csv(text: &str) -> Result<Histogram> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "x_lo,x_hi,density")) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header x_lo,x_hi,density".into(),
            })
        }
    }
    let mut edges = Vec::new();
    let mut densities = Vec::new();
    let mut trailer = None;
    for (i, line) in lines {
        let line_no = i + 1;
        let bad = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        if let Some(rest) = line.strip_prefix('#') {
            let mut count = None;
            let mut overflow = None;
            for field in rest.split_whitespace() {
                match field.split_once('=') {
                    Some(("count", v)) => count = v.parse::<u64>().ok(),
                    Some(("overflow", v)) => overflow = v.parse::<u64>().ok(),
                    _ => {}
                }
            }
            trailer = Some((
                count.ok_or_else(|| bad("missing count"))?,
                overflow.ok_or_else(|| bad("missing overflow"))?,
            ));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("non-numeric field"))?;
        let [lo, hi, d] = fields[..] else {
            return Err(bad("expected three fields"));
        };
        if edges.is_empty() {
            edges.push(lo);
        }
        edges.push(hi);
        densities.push(d);
    }
    let (count, overflow) = trailer.ok_or(Error::Parse {
        line: 0,
        msg: "missing '# count=.. overflow=..' trailer".into(),
    })?;
    if densities.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "histogram has no bins".into(),
        });
    }
    Ok(Histogram {
        edges,
        densities,
        count,
        overflow,
    })
}

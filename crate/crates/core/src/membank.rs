//! Online memory bank of labelled precedents with arrival-order causality
//! and top-k cosine retrieval over hashed bigram-bag embeddings.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::fnv1a64;
use crate::vocab::{Token, BOS};

pub const EMBED_DIM: usize = 64;

/// Cold-start threshold: below this many visible entries the draft-verify
/// harness falls back to a direct single pass.
pub const DEFAULT_COLD_START: usize = 10;

/// Unit-norm embedding of a token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn cosine(&self, other: &Embedding) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// Hashed bag of token bigrams, L2-normalized. A leading sentinel guarantees
/// at least one bigram for single-token inputs.
pub fn embed(seq: &[Token]) -> Result<Embedding> {
    if seq.is_empty() {
        return Err(Error::Precondition("cannot embed an empty sequence".into()));
    }
    let mut counts = vec![0.0_f64; EMBED_DIM];
    let mut prev = BOS;
    for &t in seq {
        let mut bytes = [0u8; 8];
        bytes[..4].copy_from_slice(&prev.to_le_bytes());
        bytes[4..].copy_from_slice(&t.to_le_bytes());
        let bucket = (fnv1a64(&bytes) % EMBED_DIM as u64) as usize;
        counts[bucket] += 1.0;
        prev = t;
    }
    let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut counts {
        *c /= norm;
    }
    Ok(Embedding(counts))
}

#[derive(Debug, Clone)]
pub struct BankEntry {
    pub x: Vec<Token>,
    pub label: Vec<Token>,
    pub embedding: Embedding,
    pub arrival: usize,
}

#[derive(Debug, Clone)]
pub struct MemoryBank {
    entries: Vec<BankEntry>,
    cold_start_threshold: usize,
}

impl Default for MemoryBank {
    fn default() -> Self {
        Self::new(DEFAULT_COLD_START)
    }
}

impl MemoryBank {
    pub fn new(cold_start_threshold: usize) -> Self {
        MemoryBank {
            entries: Vec::new(),
            cold_start_threshold,
        }
    }

    pub fn cold_start_threshold(&self) -> usize {
        self.cold_start_threshold
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    /// Append an entry; returns its arrival index.
    pub fn insert(&mut self, x: &[Token], label: &[Token]) -> Result<usize> {
        let arrival = self.entries.len();
        self.entries.push(BankEntry {
            x: x.to_vec(),
            label: label.to_vec(),
            embedding: embed(x)?,
            arrival,
        });
        Ok(arrival)
    }

    fn visible(&self, visible_before: usize) -> &[BankEntry] {
        &self.entries[..visible_before.min(self.entries.len())]
    }

    pub fn visible_count(&self, visible_before: usize) -> usize {
        visible_before.min(self.entries.len())
    }

    /// Top-k visible entries by cosine similarity; ties broken by lower
    /// arrival index. Entries at or past `visible_before` are never returned.
    pub fn top_k(&self, query: &Embedding, k: usize, visible_before: usize) -> Vec<&BankEntry> {
        let mut scored: Vec<(f64, &BankEntry)> = self
            .visible(visible_before)
            .iter()
            .map(|e| (query.cosine(&e.embedding), e))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.arrival.cmp(&b.1.arrival)));
        scored.into_iter().take(k).map(|(_, e)| e).collect()
    }

    /// Confirmers share the draft label, challengers do not; each list is
    /// independently sorted like `top_k`.
    pub fn confirmers_challengers(
        &self,
        query: &Embedding,
        draft_label: &[Token],
        k_plus: usize,
        k_minus: usize,
        visible_before: usize,
    ) -> (Vec<&BankEntry>, Vec<&BankEntry>) {
        let mut same: Vec<(f64, &BankEntry)> = Vec::new();
        let mut diff: Vec<(f64, &BankEntry)> = Vec::new();
        for e in self.visible(visible_before) {
            let scored = (query.cosine(&e.embedding), e);
            if e.label == draft_label {
                same.push(scored);
            } else {
                diff.push(scored);
            }
        }
        let order = |a: &(f64, &BankEntry), b: &(f64, &BankEntry)| {
            b.0.total_cmp(&a.0).then(a.1.arrival.cmp(&b.1.arrival))
        };
        same.sort_by(order);
        diff.sort_by(order);
        (
            same.into_iter().take(k_plus).map(|(_, e)| e).collect(),
            diff.into_iter().take(k_minus).map(|(_, e)| e).collect(),
        )
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        for e in &self.entries {
            let rec = BankRecord {
                arrival: e.arrival,
                x: e.x.clone(),
                y: e.label.clone(),
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Restore from a dump; embeddings are recomputed.
    pub fn load(path: &Path, cold_start_threshold: usize) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut bank = MemoryBank::new(cold_start_threshold);
        for (i, line) in f.lines().enumerate() {
            let rec: BankRecord = serde_json::from_str(&line?)?;
            if rec.arrival != i {
                return Err(Error::Config(format!(
                    "bank dump arrival index {} at line {i} out of order",
                    rec.arrival
                )));
            }
            bank.insert(&rec.x, &rec.y)?;
        }
        Ok(bank)
    }
}

#[derive(Serialize, Deserialize)]
struct BankRecord {
    arrival: usize,
    x: Vec<Token>,
    y: Vec<Token>,
}

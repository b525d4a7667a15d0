//! Item memory: symbols mapped to random seed vectors, plus nearest-neighbor
//! cleanup for denoising vectors decoded out of superpositions.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{dims, Error, Result};
use crate::hv::{Dimension, Hypervector};
use crate::io;
use crate::rng::RandomSource;

const CODEBOOK_MAGIC: &[u8; 4] = b"HDCB";

/// One cleanup result: the matched symbol and its Hamming similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub symbol: String,
    pub similarity: f64,
}

/// Ordered map from symbol to seed vector. Entries are generated from the
/// codebook's own random stream, so two codebooks built with the same seed and
/// the same insertion order hold identical vectors regardless of symbol names.
#[derive(Debug, Clone)]
pub struct Codebook {
    dim: Dimension,
    seed: u64,
    entries: Vec<(String, Hypervector)>,
    index: HashMap<String, usize>,
    rng: RandomSource,
}

impl Codebook {
    pub fn new(dim: Dimension, seed: u64) -> Self {
        Codebook {
            dim,
            seed,
            entries: Vec::new(),
            index: HashMap::new(),
            rng: RandomSource::new(seed),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Draw a fresh seed vector for a new symbol.
    pub fn assign(&mut self, symbol: &str) -> Result<&Hypervector> {
        if self.index.contains_key(symbol) {
            return Err(Error::DuplicateSymbol(symbol.to_string()));
        }
        let v = Hypervector::random(self.dim, &mut self.rng);
        self.index.insert(symbol.to_string(), self.entries.len());
        self.entries.push((symbol.to_string(), v));
        Ok(&self.entries.last().unwrap().1)
    }

    /// Lookup, assigning on first sight.
    pub fn get_or_assign(&mut self, symbol: &str) -> &Hypervector {
        if let Some(&i) = self.index.get(symbol) {
            return &self.entries[i].1;
        }
        self.assign(symbol).expect("symbol checked absent")
    }

    pub fn get(&self, symbol: &str) -> Option<&Hypervector> {
        self.index.get(symbol).map(|&i| &self.entries[i].1)
    }

    pub fn require(&self, symbol: &str) -> Result<&Hypervector> {
        self.get(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &Hypervector)> {
        self.entries.iter().map(|(s, v)| (s.as_str(), v))
    }

    /// Nearest stored vector by Hamming similarity. Ties go to the earliest
    /// inserted entry.
    pub fn cleanup(&self, noisy: &Hypervector) -> Result<Match> {
        let mut best = self.top_k(noisy, 1)?;
        Ok(best.remove(0))
    }

    /// The `k` best matches, sorted by similarity descending, then insertion
    /// order. Returns everything if the codebook has fewer than `k` entries.
    pub fn top_k(&self, query: &Hypervector, k: usize) -> Result<Vec<Match>> {
        if k == 0 {
            return Err(Error::InvalidConfig("top_k needs k >= 1".into()));
        }
        if self.entries.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        if query.dim() != self.dim {
            return Err(dims(self.dim.get(), query.dim().get()));
        }
        // (distance, insertion index): ascending distance is descending
        // similarity, and the index settles ties deterministically.
        let mut scored: Vec<(u64, usize)> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, (_, v))| (query.hamming_distance(v).expect("dims checked"), i))
            .collect();
        scored.sort();
        scored.truncate(k);
        let d = self.dim.get() as f64;
        Ok(scored
            .into_iter()
            .map(|(dist, i)| Match {
                symbol: self.entries[i].0.clone(),
                similarity: (d - dist as f64) / d,
            })
            .collect())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, CODEBOOK_MAGIC)?;
        io::write_u64(w, self.seed)?;
        io::write_u64(w, self.dim.get() as u64)?;
        io::write_u64(w, self.entries.len() as u64)?;
        for (symbol, v) in &self.entries {
            io::write_u32(w, symbol.len() as u32)?;
            w.write_all(symbol.as_bytes())?;
            w.write_all(&v.to_packed_bytes())?;
        }
        Ok(())
    }

    /// Load a codebook. The random stream is fast-forwarded past the loaded
    /// entries, so assigning more symbols afterwards yields exactly what the
    /// original codebook would have produced.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::expect_magic(r, CODEBOOK_MAGIC)?;
        let seed = io::read_u64(r)?;
        let dim = Dimension::new(io::read_u64(r)? as usize)?;
        let count = io::read_u64(r)? as usize;
        let mut cb = Codebook::new(dim, seed);
        for _ in 0..count {
            let sym_len = io::read_u32(r)? as usize;
            let sym_bytes = io::read_exact_vec(r, sym_len)?;
            let symbol = String::from_utf8(sym_bytes)
                .map_err(|_| Error::Format("codebook symbol is not UTF-8".into()))?;
            let packed = io::read_exact_vec(r, dim.bytes())?;
            let v = Hypervector::from_packed_bytes(dim, &packed)?;
            if cb.index.contains_key(&symbol) {
                return Err(Error::DuplicateSymbol(symbol));
            }
            // Keep the stream in the post-draw state even though the vector
            // itself comes from the file.
            let _ = Hypervector::random(dim, &mut cb.rng);
            cb.index.insert(symbol.clone(), cb.entries.len());
            cb.entries.push((symbol, v));
        }
        Ok(cb)
    }
}

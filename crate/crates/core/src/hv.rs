//! Dense binary hypervectors and the integer accumulator.
//!
//! Vectors are bit-packed into `u64` words, LSB first: coordinate `i` lives in
//! word `i / 64` at bit `i % 64`. Any bits past the dimension in the last word
//! are kept zero; every constructor and operation preserves that invariant so
//! popcount-based distance never sees garbage.

use std::io::{Read, Write};

use crate::error::{dims, Error, Result};
use crate::io;
use crate::rng::RandomSource;

const HDV_MAGIC: &[u8; 4] = b"HDV1";
const ACC_MAGIC: &[u8; 4] = b"ACC1";

/// Number of coordinates in a hypervector. Validated once at construction so
/// the rest of the crate can assume it is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension(usize);

impl Dimension {
    /// Default width used throughout the tools.
    pub const DEFAULT: Dimension = Dimension(10_000);

    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Packed width in 64-bit words.
    pub fn words(self) -> usize {
        self.0.div_ceil(64)
    }

    /// Packed width in bytes.
    pub fn bytes(self) -> usize {
        self.0.div_ceil(8)
    }

    /// Mask selecting the in-range bits of the final word.
    fn tail_mask(self) -> u64 {
        match self.0 % 64 {
            0 => !0,
            r => (1u64 << r) - 1,
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense binary vector with `dim` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypervector {
    dim: Dimension,
    words: Vec<u64>,
}

impl Hypervector {
    /// All-zero vector.
    pub fn zeros(dim: Dimension) -> Self {
        Hypervector {
            dim,
            words: vec![0; dim.words()],
        }
    }

    /// Uniformly random vector: each coordinate is an independent fair bit.
    pub fn random(dim: Dimension, rng: &mut RandomSource) -> Self {
        let mut words: Vec<u64> = (0..dim.words()).map(|_| rng.next_u64()).collect();
        if let Some(last) = words.last_mut() {
            *last &= dim.tail_mask();
        }
        Hypervector { dim, words }
    }

    pub fn from_bits(dim: Dimension, bits: &[bool]) -> Result<Self> {
        if bits.len() != dim.get() {
            return Err(dims(dim.get(), bits.len()));
        }
        let mut v = Hypervector::zeros(dim);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        Ok(v)
    }

    /// Parse a string of `0`/`1` characters, coordinate 0 first. Test helper.
    pub fn from_bitstr(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("bit string has '{other}'"))),
            })
            .collect::<Result<_>>()?;
        let dim = Dimension::new(bits.len())?;
        Hypervector::from_bits(dim, &bits)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.dim.get());
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim.get()).map(|i| self.bit(i)).collect()
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn set_bit(&mut self, i: usize) {
        debug_assert!(i < self.dim.get());
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    /// Overwrite with another vector's contents, for scratch-buffer reuse.
    pub(crate) fn copy_from(&mut self, src: &Hypervector) {
        debug_assert_eq!(self.dim, src.dim);
        self.words.copy_from_slice(&src.words);
    }

    /// Coordinatewise XOR. Binding is its own inverse: `a.bind(b).bind(b) == a`.
    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector> {
        if self.dim != other.dim {
            return Err(dims(self.dim.get(), other.dim.get()));
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Hypervector {
            dim: self.dim,
            words,
        })
    }

    /// In-place XOR, for hot loops that reuse a scratch vector.
    pub(crate) fn bind_assign(&mut self, other: &Hypervector) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Cyclic coordinate shift: output bit `(i + shift) mod d` equals input
    /// bit `i`. Negative shifts undo positive ones, and shifts compose by
    /// addition, so this is a true permutation with an exact inverse.
    pub fn permute(&self, shift: i64) -> Hypervector {
        let d = self.dim.get();
        let s = shift.rem_euclid(d as i64) as usize;
        if s == 0 {
            return self.clone();
        }
        let mut out = Hypervector::zeros(self.dim);
        for i in 0..d {
            if self.bit(i) {
                let j = i + s;
                let j = if j >= d { j - d } else { j };
                out.words[j / 64] |= 1u64 << (j % 64);
            }
        }
        out
    }

    /// Flip every coordinate.
    pub fn complement(&self) -> Hypervector {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= self.dim.tail_mask();
        }
        Hypervector {
            dim: self.dim,
            words,
        }
    }

    /// Number of coordinates where the two vectors differ.
    pub fn hamming_distance(&self, other: &Hypervector) -> Result<u64> {
        if self.dim != other.dim {
            return Err(dims(self.dim.get(), other.dim.get()));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// Fraction of agreeing coordinates, in `[0, 1]`. Unrelated random vectors
    /// score near 0.5; identical vectors score 1.
    pub fn hamming_similarity(&self, other: &Hypervector) -> Result<f64> {
        let dist = self.hamming_distance(other)?;
        let d = self.dim.get() as f64;
        Ok((d - dist as f64) / d)
    }

    /// Packed little-endian bytes, `dim.bytes()` long, padding bits zero.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.dim.bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(self.dim.bytes());
        out
    }

    /// Inverse of [`to_packed_bytes`]. Rejects wrong lengths and nonzero
    /// padding bits so corrupt input cannot smuggle in out-of-range state.
    ///
    /// [`to_packed_bytes`]: Hypervector::to_packed_bytes
    pub fn from_packed_bytes(dim: Dimension, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != dim.bytes() {
            return Err(Error::Format(format!(
                "packed vector is {} bytes, dimension {} needs {}",
                bytes.len(),
                dim,
                dim.bytes()
            )));
        }
        let mut words = vec![0u64; dim.words()];
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        if let Some(&last) = words.last() {
            if last & !dim.tail_mask() != 0 {
                return Err(Error::Format(
                    "packed vector has nonzero padding bits".into(),
                ));
            }
        }
        Ok(Hypervector { dim, words })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, HDV_MAGIC)?;
        io::write_u64(w, self.dim.get() as u64)?;
        w.write_all(&self.to_packed_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::expect_magic(r, HDV_MAGIC)?;
        let d = io::read_u64(r)? as usize;
        let dim = Dimension::new(d)?;
        let bytes = io::read_exact_vec(r, dim.bytes())?;
        Hypervector::from_packed_bytes(dim, &bytes)
    }

    /// FNV-1a over the packed bytes. Stable fingerprint for logs.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_packed_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// Coordinatewise majority of the inputs. Each output bit is the value held by
/// more than half of the inputs; exact ties (possible only for an even count)
/// are broken by a fresh random bit, drawn in coordinate order.
pub fn bundle(items: &[Hypervector], rng: &mut RandomSource) -> Result<Hypervector> {
    let first = items.first().ok_or(Error::Empty("bundle of no vectors"))?;
    let dim = first.dim;
    for v in items {
        if v.dim != dim {
            return Err(dims(dim.get(), v.dim.get()));
        }
    }
    let n = items.len();
    let mut out = Hypervector::zeros(dim);
    let n_words = dim.words();
    for wi in 0..n_words {
        let bits_here = if wi + 1 == n_words && dim.get() % 64 != 0 {
            dim.get() % 64
        } else {
            64
        };
        let mut word = 0u64;
        for b in 0..bits_here {
            let ones: usize = items
                .iter()
                .map(|v| ((v.words[wi] >> b) & 1) as usize)
                .sum();
            let bit = match (2 * ones).cmp(&n) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => rng.next_bit(),
            };
            if bit {
                word |= 1u64 << b;
            }
        }
        out.words[wi] = word;
    }
    Ok(out)
}

/// Integer counter vector for incremental majorities. Adding a hypervector
/// adds +1 to each coordinate where it has a 1 and -1 where it has a 0, so the
/// counter sign tracks which bit value leads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accumulator {
    dim: Dimension,
    counts: Vec<i32>,
    n_added: u64,
}

impl Accumulator {
    pub fn new(dim: Dimension) -> Self {
        Accumulator {
            dim,
            counts: vec![0; dim.get()],
            n_added: 0,
        }
    }

    /// Rebuild from raw counters, e.g. when loading from disk. Validates the
    /// length and that no counter exceeds the claimed number of additions.
    pub fn from_counts(dim: Dimension, counts: Vec<i32>, n_added: u64) -> Result<Self> {
        if counts.len() != dim.get() {
            return Err(dims(dim.get(), counts.len()));
        }
        if n_added > i32::MAX as u64 {
            return Err(Error::CounterOverflow);
        }
        if counts
            .iter()
            .any(|&c| (c.unsigned_abs() as u64) > n_added)
        {
            return Err(Error::Format(
                "accumulator counter exceeds its addition count".into(),
            ));
        }
        Ok(Accumulator {
            dim,
            counts,
            n_added,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn n_added(&self) -> u64 {
        self.n_added
    }

    pub fn counts(&self) -> &[i32] {
        &self.counts
    }

    /// Add one vector with weight 1.
    pub fn add(&mut self, v: &Hypervector) -> Result<()> {
        self.add_weighted(v, 1)
    }

    /// Add one vector `weight` times. Counters stay exact: since every
    /// counter is bounded by the total weight added, refusing to let that
    /// total pass `i32::MAX` rules out overflow without per-coordinate checks.
    pub fn add_weighted(&mut self, v: &Hypervector, weight: u32) -> Result<()> {
        if v.dim != self.dim {
            return Err(dims(self.dim.get(), v.dim.get()));
        }
        let total = self
            .n_added
            .checked_add(weight as u64)
            .ok_or(Error::CounterOverflow)?;
        if total > i32::MAX as u64 {
            return Err(Error::CounterOverflow);
        }
        self.add_words(&v.words, weight as i32);
        self.n_added = total;
        Ok(())
    }

    // Hot path: one pass per stored trigram when profiling text. Branchless
    // and chunked so the compiler can vectorize it.
    fn add_words(&mut self, words: &[u64], weight: i32) {
        for (chunk, &w) in self.counts.chunks_mut(64).zip(words) {
            for (b, c) in chunk.iter_mut().enumerate() {
                *c += (((w >> b) & 1) as i32 * 2 - 1) * weight;
            }
        }
    }

    /// Pool another accumulator into this one.
    pub fn merge(&mut self, other: &Accumulator) -> Result<()> {
        if other.dim != self.dim {
            return Err(dims(self.dim.get(), other.dim.get()));
        }
        let total = self
            .n_added
            .checked_add(other.n_added)
            .ok_or(Error::CounterOverflow)?;
        if total > i32::MAX as u64 {
            return Err(Error::CounterOverflow);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_added = total;
        Ok(())
    }

    /// Collapse to a binary vector by counter sign. Zero counters are ties and
    /// are broken by fresh random bits in coordinate order, matching what
    /// [`bundle`] does for an even number of inputs.
    pub fn threshold(&self, rng: &mut RandomSource) -> Hypervector {
        let mut out = Hypervector::zeros(self.dim);
        for (i, &c) in self.counts.iter().enumerate() {
            let bit = match c.cmp(&0) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => rng.next_bit(),
            };
            if bit {
                out.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        let sq: i128 = self.counts.iter().map(|&c| (c as i128) * (c as i128)).sum();
        (sq as f64).sqrt()
    }

    /// Cosine of the angle between two counter vectors. Errors if either has
    /// all-zero counters, since the angle is undefined there.
    pub fn cosine(&self, other: &Accumulator) -> Result<f64> {
        if other.dim != self.dim {
            return Err(dims(self.dim.get(), other.dim.get()));
        }
        let mut dot: i128 = 0;
        let mut na: i128 = 0;
        let mut nb: i128 = 0;
        for (&a, &b) in self.counts.iter().zip(&other.counts) {
            dot += (a as i128) * (b as i128);
            na += (a as i128) * (a as i128);
            nb += (b as i128) * (b as i128);
        }
        if na == 0 || nb == 0 {
            return Err(Error::ZeroNorm);
        }
        Ok(dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt()))
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, ACC_MAGIC)?;
        io::write_u64(w, self.dim.get() as u64)?;
        io::write_u64(w, self.n_added)?;
        for &c in &self.counts {
            io::write_i32(w, c)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::expect_magic(r, ACC_MAGIC)?;
        let d = io::read_u64(r)? as usize;
        let dim = Dimension::new(d)?;
        let n_added = io::read_u64(r)?;
        let mut counts = Vec::with_capacity(dim.get());
        for _ in 0..dim.get() {
            counts.push(io::read_i32(r)?);
        }
        Accumulator::from_counts(dim, counts, n_added)
    }
}

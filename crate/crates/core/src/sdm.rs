//! Sparse distributed memory: a fixed set of random hard-location addresses,
//! signed counter rows as contents, Hamming-radius activation, superposed
//! writes, and majority reads with optional iterative (autoassociative)
//! recall.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{dims, Error, Result};
use crate::hv::{Dimension, Hypervector};
use crate::io;
use crate::rng::RandomSource;

const SDM_MAGIC: &[u8; 4] = b"SDM1";

/// Location count above which the activation scan runs in parallel. The scan
/// is a pure filter, so parallelism cannot change the result.
const PAR_SCAN_THRESHOLD: usize = 4096;

/// Storage width for location counters. Counters saturate at the symmetric
/// bound `2^(bits-1) - 1` instead of wrapping, which is what keeps recall
/// degrading gently under overload rather than collapsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterWidth {
    W8,
    W16,
    W32,
}

impl CounterWidth {
    pub fn bound(self) -> i32 {
        match self {
            CounterWidth::W8 => i8::MAX as i32,
            CounterWidth::W16 => i16::MAX as i32,
            CounterWidth::W32 => i32::MAX,
        }
    }

    pub fn bits(self) -> u8 {
        match self {
            CounterWidth::W8 => 8,
            CounterWidth::W16 => 16,
            CounterWidth::W32 => 32,
        }
    }

    fn from_bits(bits: u8) -> Result<Self> {
        match bits {
            8 => Ok(CounterWidth::W8),
            16 => Ok(CounterWidth::W16),
            32 => Ok(CounterWidth::W32),
            other => Err(Error::Format(format!("unsupported counter width {other}"))),
        }
    }
}

/// Geometry of a memory: one shared width for addresses and data words, a
/// location count, and the activation radius in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdmConfig {
    pub dim: Dimension,
    pub locations: usize,
    pub radius: u32,
    pub counter_width: CounterWidth,
}

impl SdmConfig {
    fn validate(&self) -> Result<()> {
        if self.locations == 0 {
            return Err(Error::InvalidConfig("memory needs at least 1 location".into()));
        }
        if self.radius as usize > self.dim.get() {
            return Err(Error::InvalidConfig(format!(
                "radius {} exceeds dimension {}",
                self.radius, self.dim
            )));
        }
        Ok(())
    }
}

/// Decompose a finite positive f64 into `mantissa * 2^exponent`, exactly.
fn f64_parts(p: f64) -> (u64, i64) {
    let bits = p.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    }
}

/// `ceil(target_p * 2^d)` as an exact integer.
fn ceil_scaled(target_p: f64, d: usize) -> BigUint {
    let (mant, exp) = f64_parts(target_p);
    let mant = BigUint::from(mant);
    let shift = exp + d as i64;
    if shift >= 0 {
        mant << shift as usize
    } else {
        let s = (-shift) as usize;
        let low_mask = (BigUint::one() << s) - BigUint::one();
        let floor = &mant >> s;
        if (&mant & low_mask).is_zero() {
            floor
        } else {
            floor + BigUint::one()
        }
    }
}

/// Smallest radius r with `CDF(r; d, 1/2) >= target_p`, where the CDF is the
/// probability that a random address lands within r bits of a probe. The sum
/// is done in exact integer arithmetic, because the individual terms underflow
/// f64 long before d reaches 10,000. The location count takes no part in the
/// radius; it is accepted for sanity checking alongside the probability.
pub fn choose_radius(dim: Dimension, locations: usize, target_p: f64) -> u32 {
    debug_assert!(locations >= 1);
    assert!(
        target_p > 0.0 && target_p < 1.0,
        "target probability must be in (0, 1), got {target_p}"
    );
    let d = dim.get();
    let threshold = ceil_scaled(target_p, d);
    let mut coeff = BigUint::one();
    let mut cum = BigUint::one();
    let mut r = 0u32;
    while cum < threshold && (r as usize) < d {
        let k = r as usize;
        coeff = coeff * ((d - k) as u64) / ((k + 1) as u64);
        cum += &coeff;
        r += 1;
    }
    r
}

/// Probability that one random location activates under the given radius,
/// i.e. `CDF(radius; d, 1/2)` evaluated exactly and rounded to f64.
pub fn activation_probability(dim: Dimension, radius: u32) -> f64 {
    let d = dim.get();
    let r = (radius as usize).min(d);
    let mut coeff = BigUint::one();
    let mut cum = BigUint::one();
    for k in 0..r {
        coeff = coeff * ((d - k) as u64) / ((k + 1) as u64);
        cum += &coeff;
    }
    let scaled = (cum << 64u32) >> d;
    match scaled.to_u128() {
        Some(q) if q < 1u128 << 64 => q as f64 / (1u128 << 64) as f64,
        _ => 1.0,
    }
}

/// Result of a single read: either a majority vector with a confidence score,
/// or the flagged case where locations activated but held nothing (all column
/// sums zero). No activation at all is an error, not a variant.
#[derive(Debug, Clone, PartialEq)]
pub enum SdmRead {
    Recall {
        vector: Hypervector,
        /// Mean |column sum| per activated location, in [0, counter bound].
        confidence: f64,
        activated: usize,
    },
    Empty {
        activated: usize,
    },
}

/// Result of iterated recall.
#[derive(Debug, Clone, PartialEq)]
pub enum IterativeRead {
    /// An iteration reproduced its own probe exactly: a fixed point.
    Converged {
        vector: Hypervector,
        iterations: usize,
    },
    /// Budget exhausted; `vector` is the last output.
    NotConverged {
        vector: Hypervector,
        iterations: usize,
    },
    /// An iteration hit untouched territory (all column sums zero).
    Empty { iterations: usize },
}

/// Load summary for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SdmStats {
    pub writes: u64,
    pub mean_activated: f64,
    pub counter_histogram: BTreeMap<i32, u64>,
    pub saturation_fraction: f64,
}

/// The memory itself. Addresses are immutable after construction; all state
/// change goes through the counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Sdm {
    config: SdmConfig,
    seed: u64,
    addresses: Vec<Hypervector>,
    /// Row-major: location i owns `counters[i*d .. (i+1)*d]`.
    counters: Vec<i32>,
    writes: u64,
    total_activated: u64,
}

impl Sdm {
    pub fn new(config: SdmConfig, rng: &mut RandomSource) -> Result<Self> {
        config.validate()?;
        let addresses = (0..config.locations)
            .map(|_| Hypervector::random(config.dim, rng))
            .collect();
        Ok(Sdm {
            config,
            seed: rng.seed(),
            addresses,
            counters: vec![0; config.locations * config.dim.get()],
            writes: 0,
            total_activated: 0,
        })
    }

    pub fn config(&self) -> &SdmConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn address(&self, i: usize) -> &Hypervector {
        &self.addresses[i]
    }

    /// Indices of all locations within `radius` bits of the probe, ascending.
    pub fn activate(&self, probe: &Hypervector) -> Result<Vec<usize>> {
        if probe.dim() != self.config.dim {
            return Err(dims(self.config.dim.get(), probe.dim().get()));
        }
        let radius = self.config.radius as u64;
        let within = |a: &Hypervector| a.hamming_distance(probe).expect("dims checked") <= radius;
        let mut hits: Vec<usize> = if self.addresses.len() >= PAR_SCAN_THRESHOLD {
            self.addresses
                .par_iter()
                .enumerate()
                .filter(|(_, a)| within(a))
                .map(|(i, _)| i)
                .collect()
        } else {
            self.addresses
                .iter()
                .enumerate()
                .filter(|(_, a)| within(a))
                .map(|(i, _)| i)
                .collect()
        };
        hits.sort_unstable();
        Ok(hits)
    }

    /// Superpose `data` into every location activated by `addr`. Returns the
    /// activation count; zero activations is a valid (reported) outcome.
    pub fn write(&mut self, addr: &Hypervector, data: &Hypervector) -> Result<usize> {
        if data.dim() != self.config.dim {
            return Err(dims(self.config.dim.get(), data.dim().get()));
        }
        let active = self.activate(addr)?;
        let d = self.config.dim.get();
        let bound = self.config.counter_width.bound();
        for &loc in &active {
            let row = &mut self.counters[loc * d..(loc + 1) * d];
            for (wi, &w) in data.words().iter().enumerate() {
                let base = wi * 64;
                let bits_here = 64.min(d - base);
                for b in 0..bits_here {
                    let delta = if (w >> b) & 1 == 1 { 1 } else { -1 };
                    let c = &mut row[base + b];
                    *c = c.saturating_add(delta).clamp(-bound, bound);
                }
            }
        }
        self.writes += 1;
        self.total_activated += active.len() as u64;
        Ok(active.len())
    }

    /// Majority read over the activated locations. Column sums of zero are
    /// ties, broken by fresh random bits in coordinate order; all columns zero
    /// is the `Empty` variant.
    pub fn read(&self, addr: &Hypervector, rng: &mut RandomSource) -> Result<SdmRead> {
        let active = self.activate(addr)?;
        if active.is_empty() {
            return Err(Error::NoActiveLocation);
        }
        let d = self.config.dim.get();
        let mut sums = vec![0i64; d];
        for &loc in &active {
            let row = &self.counters[loc * d..(loc + 1) * d];
            for (s, &c) in sums.iter_mut().zip(row) {
                *s += c as i64;
            }
        }
        if sums.iter().all(|&s| s == 0) {
            return Ok(SdmRead::Empty {
                activated: active.len(),
            });
        }
        let mut vector = Hypervector::zeros(self.config.dim);
        let mut mass = 0f64;
        for (i, &s) in sums.iter().enumerate() {
            mass += s.unsigned_abs() as f64;
            let bit = match s.cmp(&0) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => rng.next_bit(),
            };
            if bit {
                vector.set_bit(i);
            }
        }
        Ok(SdmRead::Recall {
            vector,
            confidence: mass / d as f64 / active.len() as f64,
            activated: active.len(),
        })
    }

    /// Feed each read's output back in as the next probe until a fixed point
    /// or the iteration budget. Converging onto a stored pattern this way is
    /// what pulls a noisy probe into its basin of attraction.
    pub fn read_iterative(
        &self,
        probe: &Hypervector,
        max_iters: usize,
        rng: &mut RandomSource,
    ) -> Result<IterativeRead> {
        if max_iters == 0 {
            return Err(Error::InvalidConfig("iterative read needs max_iters >= 1".into()));
        }
        let mut prev = probe.clone();
        for it in 1..=max_iters {
            match self.read(&prev, rng)? {
                SdmRead::Recall { vector, .. } => {
                    if vector == prev {
                        return Ok(IterativeRead::Converged {
                            vector,
                            iterations: it,
                        });
                    }
                    prev = vector;
                }
                SdmRead::Empty { .. } => return Ok(IterativeRead::Empty { iterations: it }),
            }
        }
        Ok(IterativeRead::NotConverged {
            vector: prev,
            iterations: max_iters,
        })
    }

    pub fn stats(&self) -> SdmStats {
        let bound = self.config.counter_width.bound();
        let mut histogram = BTreeMap::new();
        let mut saturated = 0u64;
        for &c in &self.counters {
            *histogram.entry(c).or_insert(0u64) += 1;
            if c == bound || c == -bound {
                saturated += 1;
            }
        }
        SdmStats {
            writes: self.writes,
            mean_activated: if self.writes == 0 {
                0.0
            } else {
                self.total_activated as f64 / self.writes as f64
            },
            counter_histogram: histogram,
            saturation_fraction: saturated as f64 / self.counters.len() as f64,
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        io::write_magic(w, SDM_MAGIC)?;
        io::write_u64(w, self.config.dim.get() as u64)?;
        io::write_u64(w, self.config.locations as u64)?;
        io::write_u32(w, self.config.radius)?;
        w.write_all(&[self.config.counter_width.bits()])?;
        io::write_u64(w, self.seed)?;
        io::write_u64(w, self.writes)?;
        io::write_u64(w, self.total_activated)?;
        for a in &self.addresses {
            w.write_all(&a.to_packed_bytes())?;
        }
        match self.config.counter_width {
            CounterWidth::W8 => {
                for &c in &self.counters {
                    w.write_all(&[(c as i8) as u8])?;
                }
            }
            CounterWidth::W16 => {
                for &c in &self.counters {
                    w.write_all(&(c as i16).to_le_bytes())?;
                }
            }
            CounterWidth::W32 => {
                for &c in &self.counters {
                    io::write_i32(w, c)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        io::expect_magic(r, SDM_MAGIC)?;
        let dim = Dimension::new(io::read_u64(r)? as usize)?;
        let locations = io::read_u64(r)? as usize;
        let radius = io::read_u32(r)?;
        let counter_width = CounterWidth::from_bits(io::read_u8(r)?)?;
        let config = SdmConfig {
            dim,
            locations,
            radius,
            counter_width,
        };
        config.validate()?;
        let seed = io::read_u64(r)?;
        let writes = io::read_u64(r)?;
        let total_activated = io::read_u64(r)?;
        let mut addresses = Vec::with_capacity(locations);
        for _ in 0..locations {
            let packed = io::read_exact_vec(r, dim.bytes())?;
            addresses.push(Hypervector::from_packed_bytes(dim, &packed)?);
        }
        let n_counters = locations * dim.get();
        let mut counters = Vec::with_capacity(n_counters);
        match counter_width {
            CounterWidth::W8 => {
                let bytes = io::read_exact_vec(r, n_counters)?;
                counters.extend(bytes.iter().map(|&b| b as i8 as i32));
            }
            CounterWidth::W16 => {
                let bytes = io::read_exact_vec(r, n_counters * 2)?;
                counters.extend(
                    bytes
                        .chunks_exact(2)
                        .map(|c| i16::from_le_bytes([c[0], c[1]]) as i32),
                );
            }
            CounterWidth::W32 => {
                for _ in 0..n_counters {
                    counters.push(io::read_i32(r)?);
                }
            }
        }
        let bound = counter_width.bound();
        if counters.iter().any(|&c| c < -bound || c > bound) {
            return Err(Error::Format("counter outside saturation bound".into()));
        }
        Ok(Sdm {
            config,
            seed,
            addresses,
            counters,
            writes,
            total_activated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn tiny(d: usize, m: usize, radius: u32, seed: u64) -> Sdm {
        let config = SdmConfig {
            dim: dim(d),
            locations: m,
            radius,
            counter_width: CounterWidth::W8,
        };
        Sdm::new(config, &mut RandomSource::new(seed)).unwrap()
    }

    #[test]
    fn radius_for_median_is_half() {
        assert_eq!(choose_radius(dim(1000), 10, 0.5), 500);
    }

    #[test]
    fn radius_small_dimension_hand_check() {
        // CDF(r; 4, 1/2) = 1/16, 5/16, 11/16, 15/16, 1.
        let d = dim(4);
        assert_eq!(choose_radius(d, 1, 0.0625), 0);
        assert_eq!(choose_radius(d, 1, 0.07), 1);
        assert_eq!(choose_radius(d, 1, 0.3), 1);
        assert_eq!(choose_radius(d, 1, 0.3126), 2);
        assert_eq!(choose_radius(d, 1, 0.99), 4);
    }

    #[test]
    fn radius_grows_with_target_probability() {
        let d = dim(256);
        let mut last = 0;
        for p in [1e-30, 1e-9, 0.001, 0.1, 0.5, 0.9, 0.999999999999] {
            let r = choose_radius(d, 100, p);
            assert!(r >= last, "radius shrank at p={p}");
            assert!(r as usize <= d.get());
            last = r;
        }
        // The radius approaches the full dimension only in the limit p -> 1:
        // the final CDF increments are ~2^-248, far below f64 resolution, so
        // even the largest representable p below 1 stops well short of 256.
        let r_max = choose_radius(d, 100, 1.0_f64.next_down());
        assert!(r_max >= last);
        assert!((r_max as usize) < d.get());
        assert!(r_max > 128);
    }

    #[test]
    fn activation_probability_matches_radius_choice() {
        let d = dim(1000);
        for p in [0.001, 0.01, 0.25] {
            let r = choose_radius(d, 10_000, p);
            assert!(activation_probability(d, r) >= p);
            assert!(activation_probability(d, r - 1) < p);
        }
        assert_eq!(activation_probability(d, 1000), 1.0);
    }

    #[test]
    fn fresh_memory_is_all_zero() {
        let sdm = tiny(64, 8, 64, 1);
        assert!(sdm.counters.iter().all(|&c| c == 0));
        let stats = sdm.stats();
        assert_eq!(stats.writes, 0);
        assert_eq!(stats.saturation_fraction, 0.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut rng = RandomSource::new(0);
        let bad_m = SdmConfig {
            dim: dim(64),
            locations: 0,
            radius: 10,
            counter_width: CounterWidth::W8,
        };
        assert!(Sdm::new(bad_m, &mut rng).is_err());
        let bad_r = SdmConfig {
            dim: dim(64),
            locations: 4,
            radius: 65,
            counter_width: CounterWidth::W8,
        };
        assert!(Sdm::new(bad_r, &mut rng).is_err());
    }

    #[test]
    fn activate_full_radius_hits_everything() {
        let sdm = tiny(64, 12, 64, 3);
        let mut rng = RandomSource::new(5);
        let probe = Hypervector::random(dim(64), &mut rng);
        assert_eq!(sdm.activate(&probe).unwrap(), (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn activate_own_address_at_radius_zero() {
        let sdm = tiny(256, 6, 0, 7);
        let probe = sdm.address(3).clone();
        assert_eq!(sdm.activate(&probe).unwrap(), vec![3]);
    }

    #[test]
    fn write_then_read_single_item_exact() {
        let mut sdm = tiny(128, 5, 128, 11);
        let mut rng = RandomSource::new(13);
        let addr = Hypervector::random(dim(128), &mut rng);
        let data = Hypervector::random(dim(128), &mut rng);
        assert_eq!(sdm.write(&addr, &data).unwrap(), 5);
        match sdm.read(&addr, &mut rng).unwrap() {
            SdmRead::Recall {
                vector,
                confidence,
                activated,
            } => {
                assert_eq!(vector, data);
                assert_eq!(activated, 5);
                assert!((confidence - 1.0).abs() < 1e-12);
            }
            other => panic!("expected recall, got {other:?}"),
        }
    }

    #[test]
    fn complement_write_cancels_to_empty() {
        let mut sdm = tiny(64, 4, 64, 17);
        let mut rng = RandomSource::new(19);
        let addr = Hypervector::random(dim(64), &mut rng);
        let data = Hypervector::random(dim(64), &mut rng);
        sdm.write(&addr, &data).unwrap();
        sdm.write(&addr, &data.complement()).unwrap();
        assert!(matches!(
            sdm.read(&addr, &mut rng).unwrap(),
            SdmRead::Empty { activated: 4 }
        ));
    }

    #[test]
    fn untouched_memory_reads_empty() {
        let sdm = tiny(64, 4, 64, 23);
        let mut rng = RandomSource::new(29);
        let probe = Hypervector::random(dim(64), &mut rng);
        assert!(matches!(
            sdm.read(&probe, &mut rng).unwrap(),
            SdmRead::Empty { .. }
        ));
    }

    #[test]
    fn no_activation_is_an_error() {
        let sdm = tiny(256, 3, 0, 31);
        let mut rng = RandomSource::new(37);
        let probe = Hypervector::random(dim(256), &mut rng);
        // At radius 0 only an exact address match activates; a fresh random
        // probe misses all 3 addresses.
        assert!(matches!(
            sdm.read(&probe, &mut rng),
            Err(Error::NoActiveLocation)
        ));
    }

    #[test]
    fn iterative_read_fixed_point_in_one() {
        let mut sdm = tiny(128, 6, 128, 41);
        let mut rng = RandomSource::new(43);
        let v = Hypervector::random(dim(128), &mut rng);
        sdm.write(&v, &v).unwrap();
        match sdm.read_iterative(&v, 10, &mut rng).unwrap() {
            IterativeRead::Converged { vector, iterations } => {
                assert_eq!(vector, v);
                assert_eq!(iterations, 1);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
        assert!(sdm.read_iterative(&v, 0, &mut rng).is_err());
    }

    #[test]
    fn counters_saturate_at_width_bound() {
        let mut sdm = tiny(32, 1, 32, 47);
        let mut rng = RandomSource::new(53);
        let addr = Hypervector::random(dim(32), &mut rng);
        let data = Hypervector::random(dim(32), &mut rng);
        for _ in 0..200 {
            sdm.write(&addr, &data).unwrap();
        }
        assert!(sdm.counters.iter().all(|&c| c.abs() == 127));
        let stats = sdm.stats();
        assert_eq!(stats.writes, 200);
        assert_eq!(stats.saturation_fraction, 1.0);
        assert_eq!(stats.mean_activated, 1.0);
    }

    #[test]
    fn stats_histogram_counts_everything() {
        let sdm = tiny(16, 3, 16, 59);
        let stats = sdm.stats();
        assert_eq!(stats.counter_histogram.get(&0), Some(&48));
    }

    #[test]
    fn file_roundtrip_all_widths() {
        for width in [CounterWidth::W8, CounterWidth::W16, CounterWidth::W32] {
            let config = SdmConfig {
                dim: dim(96),
                locations: 7,
                radius: 96,
                counter_width: width,
            };
            let mut rng = RandomSource::new(61);
            let mut sdm = Sdm::new(config, &mut rng).unwrap();
            for _ in 0..3 {
                let a = Hypervector::random(dim(96), &mut rng);
                let v = Hypervector::random(dim(96), &mut rng);
                sdm.write(&a, &v).unwrap();
            }
            let mut buf = Vec::new();
            sdm.write_to(&mut buf).unwrap();
            let back = Sdm::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back, sdm);
        }
    }

    #[test]
    fn addresses_survive_writes_untouched() {
        let mut sdm = tiny(64, 5, 64, 67);
        let before: Vec<Hypervector> = sdm.addresses.clone();
        let mut rng = RandomSource::new(71);
        for _ in 0..20 {
            let a = Hypervector::random(dim(64), &mut rng);
            let v = Hypervector::random(dim(64), &mut rng);
            sdm.write(&a, &v).unwrap();
        }
        assert_eq!(sdm.addresses, before);
    }
}

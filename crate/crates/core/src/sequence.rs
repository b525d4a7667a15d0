//! Sequences over the memory: history as a linked list (each moment stored at
//! the previous moment's address), next-moment prediction, novelty detection
//! through autoassociative recall, and order-tagged n-gram/chunk codes.

use crate::codebook::{Codebook, Match};
use crate::error::{Error, Result};
use crate::hv::{Accumulator, Dimension, Hypervector};
use crate::rng::RandomSource;
use crate::sdm::{Sdm, SdmRead};

/// Working-memory capacity: the longest sequence a single vector can hold and
/// still give back its members.
pub const CHUNK_LIMIT: usize = 10;

/// Default novelty thresholds. Random-pair similarity concentrates at 0.5 and
/// clean recall sits near 1.0, so the band between 0.6 and 0.9 separates
/// "seen before" from "new" with room on both sides.
pub const DEFAULT_NOVELTY_LOW: f64 = 0.6;
pub const DEFAULT_NOVELTY_HIGH: f64 = 0.9;

/// An ordered run of focus states, one per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrace {
    moments: Vec<Hypervector>,
}

impl MomentTrace {
    pub fn new(moments: Vec<Hypervector>) -> Result<Self> {
        let first = moments.first().ok_or(Error::Empty("moment trace"))?;
        let dim = first.dim();
        for m in &moments {
            if m.dim() != dim {
                return Err(crate::error::dims(dim.get(), m.dim().get()));
            }
        }
        Ok(MomentTrace { moments })
    }

    pub fn dim(&self) -> Dimension {
        self.moments[0].dim()
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    /// Always false: construction rejects empty traces.
    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn moments(&self) -> &[Hypervector] {
        &self.moments
    }
}

/// One recalled next moment.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub vector: Hypervector,
    pub confidence: f64,
    /// Nearest known state, when a codebook was supplied.
    pub cleaned: Option<Match>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoveltyKind {
    Known,
    SimilarWithDelta,
    Novel,
}

/// Outcome of asking the memory whether a moment has been seen before.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyVerdict {
    pub kind: NoveltyKind,
    /// Similarity of the recalled vector to the probe; 0 when nothing came
    /// back at all.
    pub similarity: f64,
    pub recalled: Option<Hypervector>,
}

/// Store a trace as a linked list: each moment is written at the address of
/// the moment before it. Returns the number of writes (trace length - 1).
pub fn record_history(sdm: &mut Sdm, trace: &MomentTrace) -> Result<usize> {
    if trace.len() < 2 {
        return Err(Error::InvalidConfig(
            "history needs at least 2 moments to link".into(),
        ));
    }
    let moments = trace.moments();
    for pair in moments.windows(2) {
        sdm.write(&pair[0], &pair[1])?;
    }
    Ok(moments.len() - 1)
}

/// Read the memory at the current moment: whatever was stored there is the
/// recalled (predicted) next moment. `None` when the activated locations hold
/// nothing. A codebook, when given, cleans the raw recall to the nearest
/// known state.
pub fn predict_next(
    sdm: &Sdm,
    current: &Hypervector,
    cb: Option<&Codebook>,
    rng: &mut RandomSource,
) -> Result<Option<Prediction>> {
    match sdm.read(current, rng)? {
        SdmRead::Recall {
            vector, confidence, ..
        } => {
            let cleaned = match cb {
                Some(cb) => Some(cb.cleanup(&vector)?),
                None => None,
            };
            Ok(Some(Prediction {
                vector,
                confidence,
                cleaned,
            }))
        }
        SdmRead::Empty { .. } => Ok(None),
    }
}

/// Store a moment at its own address. Repeated moments reinforce themselves,
/// and a later read probed with a noisy version can settle back onto the
/// stored original.
pub fn record_autoassociative(sdm: &mut Sdm, moment: &Hypervector) -> Result<usize> {
    sdm.write(moment, moment)
}

/// Probe the autoassociative memory at `moment` and classify what comes back:
/// recall at or above `high` means the moment is known, at or below `low`
/// (or nothing at all) means it is novel, and the band between means a known
/// pattern with a difference worth analyzing.
pub fn detect_novelty(
    sdm: &Sdm,
    moment: &Hypervector,
    low: f64,
    high: f64,
    rng: &mut RandomSource,
) -> Result<NoveltyVerdict> {
    assert!(
        0.0 <= low && low < high && high <= 1.0,
        "novelty thresholds need 0 <= low < high <= 1, got ({low}, {high})"
    );
    match sdm.read(moment, rng)? {
        SdmRead::Recall { vector, .. } => {
            let similarity = vector.hamming_similarity(moment)?;
            let kind = if similarity >= high {
                NoveltyKind::Known
            } else if similarity <= low {
                NoveltyKind::Novel
            } else {
                NoveltyKind::SimilarWithDelta
            };
            Ok(NoveltyVerdict {
                kind,
                similarity,
                recalled: Some(vector),
            })
        }
        SdmRead::Empty { .. } => Ok(NoveltyVerdict {
            kind: NoveltyKind::Novel,
            similarity: 0.0,
            recalled: None,
        }),
    }
}

/// Order-tagged product code: the first element is rotated most, the last not
/// at all, and everything is bound together. A window of three seed vectors
/// a, b, c becomes rotate²(a) * rotate(b) * c. Distinct windows land
/// quasi-orthogonal, which is what makes these usable as profile keys.
pub fn encode_ngram(window: &[Hypervector]) -> Result<Hypervector> {
    let n = window.len();
    if n == 0 {
        return Err(Error::Empty("n-gram window"));
    }
    if n > CHUNK_LIMIT {
        return Err(Error::ChunkTooLarge {
            len: n,
            limit: CHUNK_LIMIT,
        });
    }
    let dim = window[0].dim();
    let mut out = window[0].permute((n - 1) as i64);
    for (i, v) in window.iter().enumerate().skip(1) {
        if v.dim() != dim {
            return Err(crate::error::dims(dim.get(), v.dim().get()));
        }
        out.bind_assign(&v.permute((n - 1 - i) as i64));
    }
    Ok(out)
}

/// Order-tagged sum code: elements are rotated by position like the n-gram,
/// but bundled instead of bound, so each position can be read back out with
/// [`decode_chunk`]. Capacity is [`CHUNK_LIMIT`].
pub fn encode_chunk(items: &[Hypervector], rng: &mut RandomSource) -> Result<Hypervector> {
    let k = items.len();
    if k == 0 {
        return Err(Error::Empty("chunk"));
    }
    if k > CHUNK_LIMIT {
        return Err(Error::ChunkTooLarge {
            len: k,
            limit: CHUNK_LIMIT,
        });
    }
    let dim = items[0].dim();
    let mut acc = Accumulator::new(dim);
    for (i, v) in items.iter().enumerate() {
        acc.add(&v.permute((k - 1 - i) as i64))?;
    }
    Ok(acc.threshold(rng))
}

/// Un-rotate the chunk for each position and clean the result against the
/// codebook. `k` must be the length the chunk was encoded with; a wrong `k`
/// leaves every position at chance similarity.
pub fn decode_chunk(chunk: &Hypervector, k: usize, cb: &Codebook) -> Result<Vec<Match>> {
    if k == 0 {
        return Err(Error::Empty("chunk"));
    }
    if k > CHUNK_LIMIT {
        return Err(Error::ChunkTooLarge {
            len: k,
            limit: CHUNK_LIMIT,
        });
    }
    (0..k)
        .map(|i| cb.cleanup(&chunk.permute(-((k - 1 - i) as i64))))
        .collect()
}

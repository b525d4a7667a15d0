//! The focus: one vector summarizing the present moment, composed from
//! importance-weighted channels and stepped against the long-term memory.

use crate::error::{Error, Result};
use crate::hv::{Accumulator, Hypervector};
use crate::rng::RandomSource;
use crate::sdm::Sdm;
use crate::sequence::{
    self, NoveltyVerdict, Prediction, CHUNK_LIMIT, DEFAULT_NOVELTY_HIGH, DEFAULT_NOVELTY_LOW,
};

/// One input stream into the focus. The weight is an integer importance: the
/// channel's vector is added to the majority that many times.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub weight: u32,
    pub current: Hypervector,
}

impl Channel {
    pub fn new(name: impl Into<String>, weight: u32, current: Hypervector) -> Self {
        Channel {
            name: name.into(),
            weight,
            current,
        }
    }
}

/// The working-memory state between steps: exactly one vector and a tick.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusState {
    pub vector: Hypervector,
    pub tick: u64,
}

impl FocusState {
    pub fn new(vector: Hypervector) -> Self {
        FocusState { vector, tick: 0 }
    }
}

/// What to do with the memory on each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Write history (old focus -> new focus) and autoassociate the new focus.
    Record,
    /// Read a prediction at the new focus and judge its novelty.
    Predict,
    /// Predict first, then record. The order matters: recording first would
    /// make every moment look already known.
    Both,
}

/// Result of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: FocusState,
    pub prediction: Option<Prediction>,
    pub novelty: Option<NoveltyVerdict>,
}

/// Integer-weighted majority over the channel vectors. A channel of weight w
/// counts as w copies in the vote; zero-weight channels are ignored, and a
/// vote with no positive weight at all is refused.
pub fn compose_focus(channels: &[Channel], rng: &mut RandomSource) -> Result<Hypervector> {
    if channels.len() > CHUNK_LIMIT {
        return Err(Error::ChunkTooLarge {
            len: channels.len(),
            limit: CHUNK_LIMIT,
        });
    }
    let first = channels
        .iter()
        .find(|c| c.weight > 0)
        .ok_or(Error::ZeroWeights)?;
    let mut acc = Accumulator::new(first.current.dim());
    for c in channels {
        if c.weight > 0 {
            acc.add_weighted(&c.current, c.weight)?;
        }
    }
    Ok(acc.threshold(rng))
}

/// Advance the focus one tick: compose the new focus from the channels, then
/// exchange with the memory per `mode`. Novelty uses the default thresholds.
pub fn step(
    state: &FocusState,
    channels: &[Channel],
    sdm: &mut Sdm,
    mode: StepMode,
    rng: &mut RandomSource,
) -> Result<StepOutcome> {
    let next = compose_focus(channels, rng)?;

    let (prediction, novelty) = match mode {
        StepMode::Record => (None, None),
        StepMode::Predict | StepMode::Both => {
            let p = sequence::predict_next(sdm, &next, None, rng)?;
            let n = sequence::detect_novelty(
                sdm,
                &next,
                DEFAULT_NOVELTY_LOW,
                DEFAULT_NOVELTY_HIGH,
                rng,
            )?;
            (p, Some(n))
        }
    };

    if matches!(mode, StepMode::Record | StepMode::Both) {
        sdm.write(&state.vector, &next)?;
        sequence::record_autoassociative(sdm, &next)?;
    }

    Ok(StepOutcome {
        state: FocusState {
            vector: next,
            tick: state.tick + 1,
        },
        prediction,
        novelty,
    })
}

//! Binary hypervector computing: a 10,000-bit algebra (XOR binding, majority
//! bundling, rotation), item cleanup memory, sparse distributed memory,
//! sequence prediction over moment traces, and trigram-profile language
//! identification built on top of it all.

mod error;
mod io;

pub mod codebook;
pub mod focus;
pub mod hv;
pub mod langid;
pub mod rng;
pub mod sdm;
pub mod sequence;

pub use codebook::{Codebook, Match};
pub use error::{Error, Result};
pub use focus::{compose_focus, step, Channel, FocusState, StepMode, StepOutcome};
pub use hv::{bundle, Accumulator, Dimension, Hypervector};
pub use langid::{
    build_profile, classify, cluster_profiles, evaluate, letter_codebook, load_test_dir,
    normalize, profile_text, read_profiles, similarity_matrix, train_dir, write_profiles,
    ClassificationReport, ClassifyOutcome, Dendrogram, LanguageProfile, NormalizePolicy,
    NormalizedText, TrigramEncoder, ALPHABET_SIZE, SPACE,
};
pub use rng::RandomSource;
pub use sdm::{activation_probability, choose_radius, CounterWidth, IterativeRead, Sdm, SdmConfig, SdmRead, SdmStats};
pub use sequence::{
    decode_chunk, detect_novelty, encode_chunk, encode_ngram, predict_next, record_autoassociative,
    record_history, MomentTrace, NoveltyKind, NoveltyVerdict, Prediction, CHUNK_LIMIT,
    DEFAULT_NOVELTY_HIGH, DEFAULT_NOVELTY_LOW,
};

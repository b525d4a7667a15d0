//! Language identification from letter trigrams: normalize text to a
//! 27-symbol alphabet, encode each trigram as a product of rotated letter
//! vectors, sum them into one profile per language, and classify test
//! sentences by cosine against the profiles.

mod cluster;
pub mod synth;

pub use cluster::{cluster_profiles, Dendrogram, Merge};

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::error::{dims, Error, Result};
use crate::hv::{Accumulator, Dimension, Hypervector};
use crate::io;

const PROFILE_MAGIC: &[u8; 4] = b"LPRF";

/// 26 letters plus the space.
pub const ALPHABET_SIZE: usize = 27;

/// Symbol code for the space. Letters are 0..=25 for a..=z.
pub const SPACE: u8 = 26;

/// How characters outside a-z are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizePolicy {
    /// Everything that is not an ASCII letter becomes a space.
    #[default]
    StripToSpace,
    /// Common Latin diacritics fold to their base letters (plus the ligature
    /// expansions ss/ae/oe) before the strip rule applies.
    FoldDiacritics,
}

impl NormalizePolicy {
    pub fn name(self) -> &'static str {
        match self {
            NormalizePolicy::StripToSpace => "strip",
            NormalizePolicy::FoldDiacritics => "fold",
        }
    }
}

impl std::str::FromStr for NormalizePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strip" => Ok(NormalizePolicy::StripToSpace),
            "fold" => Ok(NormalizePolicy::FoldDiacritics),
            other => Err(Error::InvalidConfig(format!(
                "unknown normalize policy {other:?}, expected strip or fold"
            ))),
        }
    }
}

/// Text reduced to the 27-symbol alphabet: only a-z and single separating
/// spaces, with no space at either end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    syms: Vec<u8>,
}

impl NormalizedText {
    /// Wrap a raw symbol sequence, enforcing the alphabet and spacing rules.
    pub fn from_symbols(syms: Vec<u8>) -> Result<Self> {
        for (i, &s) in syms.iter().enumerate() {
            if s as usize >= ALPHABET_SIZE {
                return Err(Error::UnknownSymbol(format!("code {s}")));
            }
            if s == SPACE {
                let at_edge = i == 0 || i + 1 == syms.len();
                let doubled = i > 0 && syms[i - 1] == SPACE;
                if at_edge || doubled {
                    return Err(Error::InvalidConfig(
                        "normalized text cannot start, end, or double a space".into(),
                    ));
                }
            }
        }
        Ok(NormalizedText { syms })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.syms {
            let c = if s == SPACE { ' ' } else { (b'a' + s) as char };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Fold one lowercase character to its base letters, if it has a mapping.
fn fold_char(c: char) -> Option<&'static [u8]> {
    let s: &[u8] = match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'ā' | 'ă' | 'ą' => b"a",
        'ç' | 'ć' | 'č' => b"c",
        'ď' | 'đ' => b"d",
        'è' | 'é' | 'ê' | 'ë' | 'ē' | 'ė' | 'ę' | 'ě' => b"e",
        'ğ' => b"g",
        'ì' | 'í' | 'î' | 'ï' | 'ī' | 'į' | 'ı' => b"i",
        'ł' => b"l",
        'ñ' | 'ń' | 'ň' => b"n",
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' | 'ō' => b"o",
        'ř' => b"r",
        'š' | 'ś' | 'ş' | 'ș' => b"s",
        'ť' | 'ţ' | 'ț' => b"t",
        'ù' | 'ú' | 'û' | 'ü' | 'ū' | 'ů' => b"u",
        'ý' | 'ÿ' => b"y",
        'ž' | 'ź' | 'ż' => b"z",
        'ß' => b"ss",
        'æ' => b"ae",
        'œ' => b"oe",
        _ => return None,
    };
    Some(s)
}

/// Reduce arbitrary text to the 27-symbol alphabet: ASCII letters are kept
/// (case-folded), everything else becomes a space per the policy, and space
/// runs collapse to single separators with none at the ends.
pub fn normalize(raw: &str, policy: NormalizePolicy) -> NormalizedText {
    let mut syms = Vec::with_capacity(raw.len());
    let mut space_pending = false;
    let emit = |letter: u8, syms: &mut Vec<u8>, space_pending: &mut bool| {
        if *space_pending && !syms.is_empty() {
            syms.push(SPACE);
        }
        *space_pending = false;
        syms.push(letter);
    };
    for ch in raw.chars() {
        match ch {
            'a'..='z' => emit(ch as u8 - b'a', &mut syms, &mut space_pending),
            'A'..='Z' => emit(ch as u8 - b'A', &mut syms, &mut space_pending),
            _ => {
                let mut handled = false;
                if policy == NormalizePolicy::FoldDiacritics {
                    for lc in ch.to_lowercase() {
                        if let Some(letters) = fold_char(lc) {
                            for &l in letters {
                                emit(l - b'a', &mut syms, &mut space_pending);
                            }
                            handled = true;
                        } else if lc.is_ascii_lowercase() {
                            emit(lc as u8 - b'a', &mut syms, &mut space_pending);
                            handled = true;
                        }
                    }
                }
                if !handled {
                    space_pending = true;
                }
            }
        }
    }
    NormalizedText { syms }
}

/// The canonical 27-entry codebook: letters a..z in order, then the space.
/// Entry order is fixed, so one seed pins down every letter vector.
pub fn letter_codebook(dim: Dimension, seed: u64) -> Codebook {
    let mut cb = Codebook::new(dim, seed);
    for l in b'a'..=b'z' {
        cb.assign(std::str::from_utf8(&[l]).unwrap())
            .expect("letters are distinct");
    }
    cb.assign(" ").expect("space is distinct");
    cb
}

/// Trigram composer with the rotations precomputed: the first letter's vector
/// rotated twice, the second's rotated once, the third's as is, all bound
/// together. Precomputing the 27 rotated tables once makes profiling a pure
/// stream of XORs.
pub struct TrigramEncoder {
    dim: Dimension,
    rot2: Vec<Hypervector>,
    rot1: Vec<Hypervector>,
    base: Vec<Hypervector>,
}

impl TrigramEncoder {
    /// Build from a codebook holding all 27 alphabet symbols.
    pub fn new(cb: &Codebook) -> Result<Self> {
        let mut base = Vec::with_capacity(ALPHABET_SIZE);
        for code in 0..ALPHABET_SIZE as u8 {
            let sym = symbol_name(code);
            base.push(cb.require(&sym)?.clone());
        }
        Ok(TrigramEncoder {
            dim: cb.dim(),
            rot2: base.iter().map(|v| v.permute(2)).collect(),
            rot1: base.iter().map(|v| v.permute(1)).collect(),
            base,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn letter(&self, code: u8) -> &Hypervector {
        &self.base[code as usize]
    }

    /// The trigram vector for symbol codes (a, b, c).
    pub fn trigram(&self, a: u8, b: u8, c: u8) -> Hypervector {
        let mut out = self.rot2[a as usize].clone();
        out.bind_assign(&self.rot1[b as usize]);
        out.bind_assign(&self.base[c as usize]);
        out
    }
}

/// The codebook symbol for an alphabet code.
fn symbol_name(code: u8) -> String {
    if code == SPACE {
        " ".to_string()
    } else {
        ((b'a' + code) as char).to_string()
    }
}

/// Accumulate every consecutive trigram of the text into one profile, in a
/// single streaming pass. Texts shorter than one window produce an empty
/// accumulator.
pub fn profile_text(text: &NormalizedText, enc: &TrigramEncoder) -> Result<Accumulator> {
    let mut acc = Accumulator::new(enc.dim);
    let mut scratch = Hypervector::zeros(enc.dim);
    for w in text.symbols().windows(3) {
        let (a, b, c) = (w[0] as usize, w[1] as usize, w[2] as usize);
        if a >= ALPHABET_SIZE || b >= ALPHABET_SIZE || c >= ALPHABET_SIZE {
            return Err(Error::UnknownSymbol(format!("code {}", w.iter().max().unwrap())));
        }
        scratch.copy_from(&enc.rot2[a]);
        scratch.bind_assign(&enc.rot1[b]);
        scratch.bind_assign(&enc.base[c]);
        acc.add(&scratch)?;
    }
    Ok(acc)
}

/// One language's trained profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    pub label: String,
    pub profile: Accumulator,
    pub source_bytes: u64,
}

/// Profile one raw training text.
pub fn build_profile(
    label: &str,
    raw_text: &str,
    enc: &TrigramEncoder,
    policy: NormalizePolicy,
) -> Result<LanguageProfile> {
    let text = normalize(raw_text, policy);
    Ok(LanguageProfile {
        label: label.to_string(),
        profile: profile_text(&text, enc)?,
        source_bytes: raw_text.len() as u64,
    })
}

/// Train one profile per `<label>.txt` file in the directory. Labels are the
/// file stems, processed in sorted order; per-language builds run in parallel
/// but share nothing mutable, so thread count cannot change the result.
pub fn train_dir(
    dir: &Path,
    enc: &TrigramEncoder,
    policy: NormalizePolicy,
) -> Result<Vec<LanguageProfile>> {
    let mut files = list_label_files(dir)?;
    if files.is_empty() {
        return Err(Error::Empty("training directory"));
    }
    files.sort();
    files
        .par_iter()
        .map(|(label, path)| {
            let raw = std::fs::read_to_string(path)?;
            build_profile(label, &raw, enc, policy)
        })
        .collect()
}

fn list_label_files(dir: &Path) -> Result<Vec<(String, std::path::PathBuf)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push((stem.to_string(), path.clone()));
            }
        }
    }
    Ok(out)
}

/// Winner plus the full ranking for one classified sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOutcome {
    pub label: String,
    pub cosine: f64,
    /// Every language with its cosine, best first; ties ordered by label.
    pub ranking: Vec<(String, f64)>,
}

/// Cosine argmax of the sentence profile over the language profiles. Ties are
/// broken toward the lexicographically smaller label.
pub fn classify(sentence: &Accumulator, profiles: &[LanguageProfile]) -> Result<ClassifyOutcome> {
    if profiles.is_empty() {
        return Err(Error::Empty("language profiles"));
    }
    let mut ranking: Vec<(String, f64)> = profiles
        .iter()
        .map(|p| Ok((p.label.clone(), sentence.cosine(&p.profile)?)))
        .collect::<Result<_>>()?;
    ranking.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosines are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(ClassifyOutcome {
        label: ranking[0].0.clone(),
        cosine: ranking[0].1,
        ranking,
    })
}

/// One sentence's evaluation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceOutcome {
    pub true_label: String,
    pub predicted: String,
    pub cosine: f64,
}

/// Aggregate quality of a profile set on a labeled test set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Sorted label order; defines the confusion matrix axes.
    pub labels: Vec<String>,
    pub sentences: Vec<SentenceOutcome>,
    pub accuracy: f64,
    pub n_test: usize,
    pub per_language: BTreeMap<String, PerLanguage>,
    /// `confusion[t][p]`: sentences of true label `t` predicted as `p`.
    pub confusion: Vec<Vec<u64>>,
    /// Sentences with fewer than 3 symbols after normalization; excluded
    /// from every other figure.
    pub skipped_short: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerLanguage {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Classify every (true label, sentence) pair and tabulate. Sentences too
/// short to hold one trigram are counted as skipped, not as errors.
pub fn evaluate(
    profiles: &[LanguageProfile],
    test_set: &[(String, String)],
    enc: &TrigramEncoder,
    policy: NormalizePolicy,
) -> Result<ClassificationReport> {
    if test_set.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let mut labels: Vec<String> = profiles.iter().map(|p| p.label.clone()).collect();
    labels.sort();
    let index: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    for (true_label, _) in test_set {
        if !index.contains_key(true_label.as_str()) {
            return Err(Error::UnknownLabel(true_label.clone()));
        }
    }

    let outcomes: Vec<Option<SentenceOutcome>> = test_set
        .par_iter()
        .map(|(true_label, raw)| {
            let text = normalize(raw, policy);
            if text.len() < 3 {
                return Ok(None);
            }
            let p = profile_text(&text, enc)?;
            let got = classify(&p, profiles)?;
            Ok(Some(SentenceOutcome {
                true_label: true_label.clone(),
                predicted: got.label,
                cosine: got.cosine,
            }))
        })
        .collect::<Result<_>>()?;

    let mut confusion = vec![vec![0u64; labels.len()]; labels.len()];
    let mut sentences = Vec::new();
    let mut skipped_short = 0usize;
    for o in outcomes {
        match o {
            Some(s) => {
                confusion[index[s.true_label.as_str()]][index[s.predicted.as_str()]] += 1;
                sentences.push(s);
            }
            None => skipped_short += 1,
        }
    }
    if sentences.is_empty() {
        return Err(Error::Empty("test set after skipping short sentences"));
    }

    let n_test = sentences.len();
    let mut per_language = BTreeMap::new();
    let mut correct_total = 0usize;
    for (i, label) in labels.iter().enumerate() {
        let n: u64 = confusion[i].iter().sum();
        let correct = confusion[i][i];
        correct_total += correct as usize;
        if n > 0 {
            per_language.insert(
                label.clone(),
                PerLanguage {
                    n: n as usize,
                    correct: correct as usize,
                    accuracy: correct as f64 / n as f64,
                },
            );
        }
    }
    Ok(ClassificationReport {
        labels,
        sentences,
        accuracy: correct_total as f64 / n_test as f64,
        n_test,
        per_language,
        confusion,
        skipped_short,
    })
}

/// Read a test directory of `<label>.txt` files, one sentence per line.
/// Blank lines are ignored. Pairs come back grouped by label in sorted
/// order, preserving line order within each file.
pub fn load_test_dir(dir: &Path) -> Result<Vec<(String, String)>> {
    let mut files = list_label_files(dir)?;
    files.sort();
    let mut out = Vec::new();
    for (label, path) in files {
        let raw = std::fs::read_to_string(&path)?;
        for line in raw.lines() {
            if !line.trim().is_empty() {
                out.push((label.clone(), line.to_string()));
            }
        }
    }
    Ok(out)
}

/// All pairwise profile cosines: symmetric with a unit diagonal, rows and
/// columns in the given profile order.
pub fn similarity_matrix(profiles: &[LanguageProfile]) -> Result<Vec<Vec<f64>>> {
    if profiles.len() < 2 {
        return Err(Error::InvalidConfig(
            "similarity matrix needs at least 2 profiles".into(),
        ));
    }
    let n = profiles.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0;
        for j in i + 1..n {
            let c = profiles[i].profile.cosine(&profiles[j].profile)?;
            m[i][j] = c;
            m[j][i] = c;
        }
    }
    Ok(m)
}

/// Store a profile set: dimension, codebook seed, then each labeled profile.
pub fn write_profiles<W: Write>(
    w: &mut W,
    dim: Dimension,
    seed: u64,
    profiles: &[LanguageProfile],
) -> Result<()> {
    io::write_magic(w, PROFILE_MAGIC)?;
    io::write_u64(w, dim.get() as u64)?;
    io::write_u64(w, seed)?;
    io::write_u64(w, profiles.len() as u64)?;
    for p in profiles {
        if p.profile.dim() != dim {
            return Err(dims(dim.get(), p.profile.dim().get()));
        }
        io::write_u32(w, p.label.len() as u32)?;
        w.write_all(p.label.as_bytes())?;
        io::write_u64(w, p.source_bytes)?;
        p.profile.write_to(w)?;
    }
    Ok(())
}

/// Load a stored profile set, returning the dimension and codebook seed it
/// was trained with alongside the profiles.
pub fn read_profiles<R: Read>(r: &mut R) -> Result<(Dimension, u64, Vec<LanguageProfile>)> {
    io::expect_magic(r, PROFILE_MAGIC)?;
    let dim = Dimension::new(io::read_u64(r)? as usize)?;
    let seed = io::read_u64(r)?;
    let count = io::read_u64(r)? as usize;
    let mut profiles = Vec::with_capacity(count);
    for _ in 0..count {
        let label_len = io::read_u32(r)? as usize;
        let label = String::from_utf8(io::read_exact_vec(r, label_len)?)
            .map_err(|_| Error::Format("profile label is not UTF-8".into()))?;
        let source_bytes = io::read_u64(r)?;
        let profile = Accumulator::read_from(r)?;
        if profile.dim() != dim {
            return Err(dims(dim.get(), profile.dim().get()));
        }
        profiles.push(LanguageProfile {
            label,
            profile,
            source_bytes,
        });
    }
    Ok((dim, seed, profiles))
}

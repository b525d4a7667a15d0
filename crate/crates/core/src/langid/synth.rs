//! Synthetic languages with controllable relatedness, for tests and the
//! self-test command. Each language is a first-order Markov chain over its
//! own letter inventory; giving languages disjoint inventories makes their
//! trigram sets disjoint too, so profiles are near-orthogonal by
//! construction.

use crate::rng::RandomSource;

/// One generated language: a training text plus held-out test sentences.
#[derive(Debug, Clone)]
pub struct SynthLanguage {
    pub label: String,
    pub train_text: String,
    pub test_sentences: Vec<String>,
}

struct Chain {
    letters: Vec<u8>,
    /// weights[i][j]: unnormalized chance that letters[i] is followed by
    /// letters[j].
    weights: Vec<Vec<u64>>,
    totals: Vec<u64>,
}

impl Chain {
    fn new(letters: Vec<u8>, rng: &mut RandomSource) -> Self {
        let k = letters.len();
        let weights: Vec<Vec<u64>> = (0..k)
            .map(|_| (0..k).map(|_| 1 + rng.next_below(9)).collect())
            .collect();
        let totals = weights.iter().map(|row| row.iter().sum()).collect();
        Chain {
            letters,
            weights,
            totals,
        }
    }

    fn step(&self, state: usize, rng: &mut RandomSource) -> usize {
        let mut pick = rng.next_below(self.totals[state]);
        for (j, &w) in self.weights[state].iter().enumerate() {
            if pick < w {
                return j;
            }
            pick -= w;
        }
        unreachable!("weights sum to the total");
    }

    fn word(&self, rng: &mut RandomSource) -> String {
        let len = 2 + rng.next_below(6) as usize;
        let mut state = rng.next_below(self.letters.len() as u64) as usize;
        let mut w = String::with_capacity(len);
        w.push(self.letters[state] as char);
        for _ in 1..len {
            state = self.step(state, rng);
            w.push(self.letters[state] as char);
        }
        w
    }

    fn sentence(&self, rng: &mut RandomSource) -> String {
        let n = 4 + rng.next_below(6) as usize;
        let words: Vec<String> = (0..n).map(|_| self.word(rng)).collect();
        words.join(" ")
    }
}

fn build_language(
    label: String,
    letters: Vec<u8>,
    train_sentences: usize,
    test_sentences: usize,
    rng: &mut RandomSource,
) -> SynthLanguage {
    let chain = Chain::new(letters, rng);
    let train: Vec<String> = (0..train_sentences).map(|_| chain.sentence(rng)).collect();
    let test = (0..test_sentences).map(|_| chain.sentence(rng)).collect();
    SynthLanguage {
        label,
        train_text: train.join("\n"),
        test_sentences: test,
    }
}

/// `n` unrelated languages (n <= 26): the alphabet is dealt round-robin so
/// inventories are disjoint, and every trigram of a sentence contains a
/// letter, so trigram sets are disjoint across languages too. Each language
/// draws from its own derived stream; changing `n` does not disturb the
/// texts of earlier languages.
pub fn generate_languages(
    n: usize,
    train_sentences: usize,
    test_sentences: usize,
    seed: u64,
) -> Vec<SynthLanguage> {
    assert!(n >= 1 && n <= 26, "need 1..=26 languages, got {n}");
    (0..n)
        .map(|i| {
            let letters: Vec<u8> = (0..26)
                .filter(|l| l % n == i)
                .map(|l| b'a' + l as u8)
                .collect();
            let mut rng = RandomSource::new(seed).substream(i as u64);
            build_language(
                format!("synth{:02}", i),
                letters,
                train_sentences,
                test_sentences,
                &mut rng,
            )
        })
        .collect()
}

/// `pairs` related pairs (pairs <= 13). The two members of a pair share one
/// letter inventory but have independently drawn transition weights, so
/// within-pair profiles stay far closer than cross-pair ones. Labels are
/// `famNN-a` / `famNN-b`.
pub fn generate_paired_languages(
    pairs: usize,
    train_sentences: usize,
    test_sentences: usize,
    seed: u64,
) -> Vec<SynthLanguage> {
    assert!(pairs >= 1 && pairs <= 13, "need 1..=13 pairs, got {pairs}");
    let mut out = Vec::with_capacity(pairs * 2);
    for p in 0..pairs {
        let letters: Vec<u8> = (0..26)
            .filter(|l| l % pairs == p)
            .map(|l| b'a' + l as u8)
            .collect();
        for (half, tag) in ["a", "b"].iter().enumerate() {
            let mut rng = RandomSource::new(seed).substream((p * 2 + half) as u64);
            out.push(build_language(
                format!("fam{:02}-{}", p, tag),
                letters.clone(),
                train_sentences,
                test_sentences,
                &mut rng,
            ));
        }
    }
    out
}

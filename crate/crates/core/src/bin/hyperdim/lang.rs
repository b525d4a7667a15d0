//! Language-identification pipeline: train profiles from a corpus
//! directory, evaluate them on a labeled test directory, classify ad-hoc
//! text, and cluster the trained profiles by similarity.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Subcommand;
use hyperdim::{
    classify, cluster_profiles, evaluate, letter_codebook, load_test_dir, normalize,
    profile_text, read_profiles, similarity_matrix, train_dir, write_profiles, Dimension, Error,
    LanguageProfile, NormalizePolicy, Result, TrigramEncoder,
};
use serde_json::json;

use crate::{check_stored_dim, create_writer, effective_dim, open_reader, write_report};

#[derive(Subcommand)]
pub enum LangidCmd {
    /// Build one profile per <label>.txt in the corpus directory.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// How non-letter characters are handled: strip or fold.
        #[arg(long, default_value = "strip")]
        normalize: NormalizePolicy,
        /// Optional JSON training report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score a profile store against a test directory (one sentence per line).
    Eval {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value = "strip")]
        normalize: NormalizePolicy,
        /// JSON report path (falls back to --out).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify one text against a profile store.
    Classify {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        text: String,
        #[arg(long, default_value = "strip")]
        normalize: NormalizePolicy,
    },
    /// Merge profiles bottom-up by cosine distance and print the tree.
    Cluster {
        #[arg(long)]
        profiles: PathBuf,
        /// Also report the partition into this many clusters.
        #[arg(long)]
        clusters: Option<usize>,
    },
}

pub fn run(
    cmd: LangidCmd,
    dim_flag: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    match cmd {
        LangidCmd::Train {
            corpus,
            normalize,
            report,
        } => train(&corpus, dim_flag, seed, normalize, out, report.as_deref(), started),
        LangidCmd::Eval {
            profiles,
            test,
            normalize,
            report,
        } => {
            let report_path = report.as_deref().or(out);
            eval(&profiles, &test, dim_flag, normalize, report_path, started)
        }
        LangidCmd::Classify {
            profiles,
            text,
            normalize,
        } => classify_text(&profiles, &text, dim_flag, normalize, out, started),
        LangidCmd::Cluster { profiles, clusters } => {
            cluster(&profiles, dim_flag, clusters, out, started)
        }
    }
}

/// Rebuild the letter encoder a stored profile set was trained with.
fn stored_encoder(
    path: &Path,
    dim_flag: Option<usize>,
) -> Result<(Dimension, u64, Vec<LanguageProfile>, TrigramEncoder)> {
    let (dim, seed, profiles) = read_profiles(&mut open_reader(path)?)?;
    check_stored_dim(dim_flag, dim)?;
    let enc = TrigramEncoder::new(&letter_codebook(dim, seed))?;
    Ok((dim, seed, profiles, enc))
}

fn train(
    corpus: &Path,
    dim_flag: Option<usize>,
    seed: u64,
    policy: NormalizePolicy,
    out: Option<&Path>,
    report: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let out = out.ok_or_else(|| {
        Error::InvalidConfig("langid train writes the profile store to --out".into())
    })?;
    let dim = effective_dim(dim_flag)?;
    let enc = TrigramEncoder::new(&letter_codebook(dim, seed))?;
    let profiles = train_dir(corpus, &enc, policy)?;
    let mut w = create_writer(out)?;
    write_profiles(&mut w, dim, seed, &profiles)?;
    std::io::Write::flush(&mut w)?;

    let total_bytes: u64 = profiles.iter().map(|p| p.source_bytes).sum();
    let secs = started.elapsed().as_secs_f64();
    for p in &profiles {
        println!(
            "  {:<12} {:>9} bytes, {:>8} trigrams",
            p.label,
            p.source_bytes,
            p.profile.n_added()
        );
    }
    println!(
        "langid train: {} profiles (dim {}, seed {seed}, normalize {}) -> {}; {} bytes in {secs:.2}s ({:.1} MB/min)",
        profiles.len(),
        dim.get(),
        policy.name(),
        out.display(),
        total_bytes,
        total_bytes as f64 / 1e6 / (secs / 60.0),
    );

    let report_json = json!({
        "command": "langid-train",
        "config": {
            "dim": dim.get(),
            "seed": seed,
            "normalize": policy.name(),
            "corpus": corpus.display().to_string(),
            "out": out.display().to_string(),
        },
        "languages": profiles.iter().map(|p| json!({
            "label": p.label,
            "source_bytes": p.source_bytes,
            "trigrams": p.profile.n_added(),
        })).collect::<Vec<_>>(),
        "total_source_bytes": total_bytes,
        "wall_clock_seconds": secs,
    });
    write_report(report, &report_json)?;
    Ok(true)
}

fn eval(
    profiles_path: &Path,
    test: &Path,
    dim_flag: Option<usize>,
    policy: NormalizePolicy,
    report_path: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let (dim, seed, profiles, enc) = stored_encoder(profiles_path, dim_flag)?;
    let test_set = load_test_dir(test)?;
    let r = evaluate(&profiles, &test_set, &enc, policy)?;

    for (label, pl) in &r.per_language {
        println!(
            "  {:<12} {:>5}/{:<5} correct ({:.1}%)",
            label,
            pl.correct,
            pl.n,
            100.0 * pl.accuracy
        );
    }
    for (i, row) in r.confusion.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            if i != j && n > 0 {
                println!("  confused {} -> {}: {}", r.labels[i], r.labels[j], n);
            }
        }
    }
    println!(
        "langid eval: accuracy {:.4} on {} sentences ({} skipped as too short; dim {}, seed {seed}, normalize {})",
        r.accuracy,
        r.n_test,
        r.skipped_short,
        dim.get(),
        policy.name(),
    );

    let report = json!({
        "command": "langid-eval",
        "config": {
            "dim": dim.get(),
            "seed": seed,
            "normalize": policy.name(),
            "profiles": profiles_path.display().to_string(),
            "test": test.display().to_string(),
        },
        "accuracy": r.accuracy,
        "n_test": r.n_test,
        "per_language": r.per_language.iter().map(|(l, pl)| (l.clone(), json!({
            "n": pl.n,
            "correct": pl.correct,
            "accuracy": pl.accuracy,
        }))).collect::<serde_json::Map<_, _>>(),
        "labels": r.labels,
        "confusion": r.confusion,
        "skipped_short": r.skipped_short,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(report_path, &report)?;
    Ok(true)
}

fn classify_text(
    profiles_path: &Path,
    text: &str,
    dim_flag: Option<usize>,
    policy: NormalizePolicy,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let (dim, seed, profiles, enc) = stored_encoder(profiles_path, dim_flag)?;
    let normalized = normalize(text, policy);
    if normalized.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "text reduces to {} symbols under the {} policy; classification needs at least 3",
            normalized.len(),
            policy.name(),
        )));
    }
    let sentence = profile_text(&normalized, &enc)?;
    let got = classify(&sentence, &profiles)?;

    println!("langid classify: {} (cosine {:.4})", got.label, got.cosine);
    for (label, cos) in &got.ranking {
        println!("  {label:<12} {cos:+.4}");
    }

    let report = json!({
        "command": "langid-classify",
        "config": {
            "dim": dim.get(),
            "seed": seed,
            "normalize": policy.name(),
            "profiles": profiles_path.display().to_string(),
        },
        "label": got.label,
        "cosine": got.cosine,
        "ranking": got.ranking.iter().map(|(l, c)| json!({"label": l, "cosine": c})).collect::<Vec<_>>(),
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

fn cluster(
    profiles_path: &Path,
    dim_flag: Option<usize>,
    clusters: Option<usize>,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let (dim, seed, profiles, _) = stored_encoder(profiles_path, dim_flag)?;
    let tree = cluster_profiles(&profiles)?;
    let matrix = {
        let mut sorted = profiles.clone();
        sorted.sort_by(|a, b| a.label.cmp(&b.label));
        similarity_matrix(&sorted)?
    };

    let node_name = |id: usize| -> String {
        if id < tree.labels.len() {
            tree.labels[id].clone()
        } else {
            format!("#{}", id - tree.labels.len())
        }
    };
    for (i, m) in tree.merges.iter().enumerate() {
        println!(
            "  merge #{i}: {} + {} at distance {:.4}",
            node_name(m.a),
            node_name(m.b),
            m.distance
        );
    }
    let cut = match clusters {
        Some(k) => {
            let named = tree.named(&tree.cut(k)?);
            for (i, c) in named.iter().enumerate() {
                println!("  cluster {i}: {}", c.join(", "));
            }
            Some(named)
        }
        None => None,
    };
    println!(
        "langid cluster: {} profiles, {} merges (dim {}, seed {seed})",
        tree.labels.len(),
        tree.merges.len(),
        dim.get(),
    );

    let report = json!({
        "command": "langid-cluster",
        "config": {
            "dim": dim.get(),
            "seed": seed,
            "profiles": profiles_path.display().to_string(),
            "clusters": clusters,
        },
        "labels": tree.labels,
        "similarity": matrix,
        "merges": tree.merges.iter().map(|m| json!({
            "a": m.a, "b": m.b, "distance": m.distance,
        })).collect::<Vec<_>>(),
        "clusters": cut,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

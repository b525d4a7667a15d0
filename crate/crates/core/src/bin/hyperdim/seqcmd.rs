//! Moment-sequence demos over a stored memory: record a trace as successor
//! links and self-associations, then replay it asking for predictions or
//! novelty verdicts. Traces are JSON lists of moments, each a base64-packed
//! vector or a symbol resolved through a codebook.

use std::path::{Path, PathBuf};
use std::time::Instant;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use clap::{Subcommand, ValueEnum};
use hyperdim::{
    choose_radius, detect_novelty, predict_next, record_autoassociative, record_history,
    Codebook, CounterWidth, Dimension, Error, Hypervector, MomentTrace, NoveltyKind,
    RandomSource, Result, Sdm, SdmConfig, DEFAULT_NOVELTY_HIGH, DEFAULT_NOVELTY_LOW,
};
use serde::Deserialize;
use serde_json::json;

use crate::{check_stored_dim, counter_width, create_writer, open_reader, read_json_file, write_report};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecordMode {
    /// Write successor links between consecutive moments.
    Links,
    /// Self-associate each moment.
    Auto,
    /// Links plus self-associations.
    Both,
}

impl RecordMode {
    fn name(self) -> &'static str {
        match self {
            RecordMode::Links => "links",
            RecordMode::Auto => "auto",
            RecordMode::Both => "both",
        }
    }
}

#[derive(Subcommand)]
pub enum SeqCmd {
    /// Write a trace into a memory and save the memory.
    Record {
        #[arg(long)]
        trace: PathBuf,
        /// Where the written memory goes.
        #[arg(long)]
        memory_out: PathBuf,
        /// Start from this stored memory instead of a fresh one.
        #[arg(long)]
        memory: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RecordMode::Links)]
        mode: RecordMode,
        #[arg(long, default_value_t = 10_000)]
        locations: usize,
        #[arg(long, default_value_t = 0.001)]
        target_p: f64,
        #[arg(long, default_value_t = 8)]
        counter_bits: u8,
        /// Resolve trace symbols through this stored codebook.
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Save the codebook (with any symbols the trace added) here.
        #[arg(long)]
        save_codebook: Option<PathBuf>,
    },
    /// Read the predicted successor of every moment in a trace.
    Predict {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        memory: PathBuf,
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// Classify every moment in a trace as known, similar, or novel.
    Novelty {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        memory: PathBuf,
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NOVELTY_LOW)]
        low: f64,
        #[arg(long, default_value_t = DEFAULT_NOVELTY_HIGH)]
        high: f64,
    },
}

#[derive(Deserialize)]
struct TraceFile {
    dim: Option<usize>,
    moments: Vec<MomentSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentSpec {
    b64: Option<String>,
    symbol: Option<String>,
}

struct LoadedTrace {
    dim: Dimension,
    moments: Vec<Hypervector>,
    /// Symbol name per moment, where the trace gave one.
    symbols: Vec<Option<String>>,
    codebook: Codebook,
}

fn load_trace(
    path: &Path,
    dim_flag: Option<usize>,
    seed: u64,
    codebook_path: Option<&Path>,
) -> Result<LoadedTrace> {
    let file: TraceFile = read_json_file(path)?;
    if file.moments.is_empty() {
        return Err(Error::Empty("trace"));
    }

    let mut codebook = match codebook_path {
        Some(p) => Some(Codebook::read_from(&mut open_reader(p)?)?),
        None => None,
    };

    // Dimension: flag, trace header, and codebook must agree where present;
    // whatever is present wins, the default fills in otherwise.
    let mut dim_val = dim_flag;
    for candidate in [file.dim, codebook.as_ref().map(|cb| cb.dim().get())] {
        match (dim_val, candidate) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::DimensionMismatch { left: a, right: b })
            }
            (None, Some(b)) => dim_val = Some(b),
            _ => {}
        }
    }
    let dim = crate::effective_dim(dim_val)?;
    let mut cb = codebook.take().unwrap_or_else(|| Codebook::new(dim, seed));

    let mut moments = Vec::with_capacity(file.moments.len());
    let mut symbols = Vec::with_capacity(file.moments.len());
    for (i, spec) in file.moments.iter().enumerate() {
        let v = match (&spec.b64, &spec.symbol) {
            (Some(b64), None) => {
                let bytes = B64
                    .decode(b64)
                    .map_err(|e| Error::Format(format!("moment {i}: bad base64: {e}")))?;
                Hypervector::from_packed_bytes(dim, &bytes)?
            }
            (None, Some(sym)) => cb.get_or_assign(sym).clone(),
            _ => {
                return Err(Error::Format(format!(
                    "moment {i} must have exactly one of \"b64\" or \"symbol\""
                )))
            }
        };
        symbols.push(spec.symbol.clone());
        moments.push(v);
    }
    Ok(LoadedTrace {
        dim,
        moments,
        symbols,
        codebook: cb,
    })
}

pub fn run(
    cmd: SeqCmd,
    dim_flag: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    match cmd {
        SeqCmd::Record {
            trace,
            memory_out,
            memory,
            mode,
            locations,
            target_p,
            counter_bits,
            codebook,
            save_codebook,
        } => record(
            &trace,
            &memory_out,
            memory.as_deref(),
            mode,
            locations,
            target_p,
            counter_width(counter_bits)?,
            codebook.as_deref(),
            save_codebook.as_deref(),
            dim_flag,
            seed,
            out,
            started,
        ),
        SeqCmd::Predict {
            trace,
            memory,
            codebook,
        } => predict(&trace, &memory, codebook.as_deref(), dim_flag, seed, out, started),
        SeqCmd::Novelty {
            trace,
            memory,
            codebook,
            low,
            high,
        } => novelty(&trace, &memory, codebook.as_deref(), low, high, dim_flag, seed, out, started),
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    trace_path: &Path,
    memory_out: &Path,
    memory_in: Option<&Path>,
    mode: RecordMode,
    locations: usize,
    target_p: f64,
    width: CounterWidth,
    codebook_path: Option<&Path>,
    save_codebook: Option<&Path>,
    dim_flag: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let loaded = load_trace(trace_path, dim_flag, seed, codebook_path)?;
    let mut rng = RandomSource::new(seed);
    let mut sdm = match memory_in {
        Some(p) => {
            let sdm = Sdm::read_from(&mut open_reader(p)?)?;
            check_stored_dim(Some(loaded.dim.get()), sdm.config().dim)?;
            sdm
        }
        None => {
            let radius = choose_radius(loaded.dim, locations, target_p);
            Sdm::new(
                SdmConfig {
                    dim: loaded.dim,
                    locations,
                    radius,
                    counter_width: width,
                },
                &mut rng,
            )?
        }
    };

    let writes_before = sdm.stats().writes;
    let mut links = 0;
    let mut autos = 0;
    if matches!(mode, RecordMode::Links | RecordMode::Both) {
        let trace = MomentTrace::new(loaded.moments.clone())?;
        links = record_history(&mut sdm, &trace)?;
    }
    if matches!(mode, RecordMode::Auto | RecordMode::Both) {
        for m in &loaded.moments {
            record_autoassociative(&mut sdm, m)?;
            autos += 1;
        }
    }
    let stats = sdm.stats();

    let mut w = create_writer(memory_out)?;
    sdm.write_to(&mut w)?;
    std::io::Write::flush(&mut w)?;
    if let Some(p) = save_codebook {
        let mut w = create_writer(p)?;
        loaded.codebook.write_to(&mut w)?;
        std::io::Write::flush(&mut w)?;
    }

    println!(
        "seq record: {} moments ({} links, {autos} self-associations) -> {}; \
         {} writes total, mean {:.1} locations/write, saturation {:.4}",
        loaded.moments.len(),
        links,
        memory_out.display(),
        stats.writes,
        stats.mean_activated,
        stats.saturation_fraction,
    );

    let report = json!({
        "command": "seq-record",
        "config": {
            "dim": loaded.dim.get(),
            "seed": seed,
            "mode": mode.name(),
            "trace": trace_path.display().to_string(),
            "memory_out": memory_out.display().to_string(),
            "memory_in": memory_in.map(|p| p.display().to_string()),
            "locations": sdm.config().locations,
            "radius": sdm.config().radius,
            "counter_bits": sdm.config().counter_width.bits(),
        },
        "moments": loaded.moments.len(),
        "links_written": links,
        "autos_written": autos,
        "writes_before": writes_before,
        "writes_total": stats.writes,
        "mean_activated": stats.mean_activated,
        "saturation_fraction": stats.saturation_fraction,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

fn predict(
    trace_path: &Path,
    memory_path: &Path,
    codebook_path: Option<&Path>,
    dim_flag: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let loaded = load_trace(trace_path, dim_flag, seed, codebook_path)?;
    let sdm = Sdm::read_from(&mut open_reader(memory_path)?)?;
    check_stored_dim(Some(loaded.dim.get()), sdm.config().dim)?;
    let mut rng = RandomSource::new(seed);
    // Cleanup only makes sense against a codebook that actually names the
    // moments.
    let cb = loaded
        .symbols
        .iter()
        .any(Option::is_some)
        .then_some(&loaded.codebook);

    let mut entries = Vec::with_capacity(loaded.moments.len());
    let mut predicted = 0usize;
    let mut match_sum = 0.0;
    let mut match_n = 0usize;
    let mut cleanup_hits = 0usize;
    let mut cleanup_scored = 0usize;
    for (i, m) in loaded.moments.iter().enumerate() {
        let mut entry = serde_json::Map::new();
        entry.insert("index".into(), json!(i));
        if let Some(sym) = &loaded.symbols[i] {
            entry.insert("symbol".into(), json!(sym));
        }
        match predict_next(&sdm, m, cb, &mut rng) {
            Ok(Some(p)) => {
                predicted += 1;
                entry.insert("predicted".into(), json!(true));
                entry.insert("confidence".into(), json!(p.confidence));
                if let Some(c) = &p.cleaned {
                    entry.insert("cleaned_symbol".into(), json!(c.symbol));
                    entry.insert("cleaned_similarity".into(), json!(c.similarity));
                    if let Some(Some(next_sym)) = loaded.symbols.get(i + 1) {
                        cleanup_scored += 1;
                        if *next_sym == c.symbol {
                            cleanup_hits += 1;
                        }
                    }
                }
                if i + 1 < loaded.moments.len() {
                    let s = p.vector.hamming_similarity(&loaded.moments[i + 1])?;
                    entry.insert("match_next".into(), json!(s));
                    match_sum += s;
                    match_n += 1;
                }
            }
            Ok(None) => {
                entry.insert("predicted".into(), json!(false));
            }
            Err(Error::NoActiveLocation) => {
                entry.insert("predicted".into(), json!(false));
                entry.insert("error".into(), json!("no location activated"));
            }
            Err(e) => return Err(e),
        }
        entries.push(serde_json::Value::Object(entry));
    }

    let mean_match = if match_n > 0 {
        Some(match_sum / match_n as f64)
    } else {
        None
    };
    print!(
        "seq predict: {predicted}/{} moments returned a prediction",
        loaded.moments.len()
    );
    if let Some(m) = mean_match {
        print!("; mean similarity to actual next moment {m:.4} over {match_n}");
    }
    if cleanup_scored > 0 {
        print!("; cleanup named the true successor {cleanup_hits}/{cleanup_scored}");
    }
    println!();

    let report = json!({
        "command": "seq-predict",
        "config": {
            "dim": loaded.dim.get(),
            "seed": seed,
            "trace": trace_path.display().to_string(),
            "memory": memory_path.display().to_string(),
        },
        "moments": entries,
        "predicted": predicted,
        "mean_match_next": mean_match,
        "cleanup_hits": cleanup_hits,
        "cleanup_scored": cleanup_scored,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn novelty(
    trace_path: &Path,
    memory_path: &Path,
    codebook_path: Option<&Path>,
    low: f64,
    high: f64,
    dim_flag: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    if !(0.0 <= low && low < high && high <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need 0 <= low < high <= 1, got low {low}, high {high}"
        )));
    }
    let loaded = load_trace(trace_path, dim_flag, seed, codebook_path)?;
    let sdm = Sdm::read_from(&mut open_reader(memory_path)?)?;
    check_stored_dim(Some(loaded.dim.get()), sdm.config().dim)?;
    let mut rng = RandomSource::new(seed);

    let mut entries = Vec::with_capacity(loaded.moments.len());
    let (mut known, mut similar, mut novel, mut errors) = (0usize, 0usize, 0usize, 0usize);
    for (i, m) in loaded.moments.iter().enumerate() {
        let mut entry = serde_json::Map::new();
        entry.insert("index".into(), json!(i));
        if let Some(sym) = &loaded.symbols[i] {
            entry.insert("symbol".into(), json!(sym));
        }
        match detect_novelty(&sdm, m, low, high, &mut rng) {
            Ok(v) => {
                let kind = match v.kind {
                    NoveltyKind::Known => {
                        known += 1;
                        "known"
                    }
                    NoveltyKind::SimilarWithDelta => {
                        similar += 1;
                        "similar-with-delta"
                    }
                    NoveltyKind::Novel => {
                        novel += 1;
                        "novel"
                    }
                };
                entry.insert("kind".into(), json!(kind));
                entry.insert("similarity".into(), json!(v.similarity));
            }
            Err(Error::NoActiveLocation) => {
                errors += 1;
                entry.insert("error".into(), json!("no location activated"));
            }
            Err(e) => return Err(e),
        }
        entries.push(serde_json::Value::Object(entry));
    }

    println!(
        "seq novelty: {known} known, {similar} similar-with-delta, {novel} novel{} \
         (thresholds {low}/{high})",
        if errors > 0 {
            format!(", {errors} activated nothing")
        } else {
            String::new()
        }
    );

    let report = json!({
        "command": "seq-novelty",
        "config": {
            "dim": loaded.dim.get(),
            "seed": seed,
            "low": low,
            "high": high,
            "trace": trace_path.display().to_string(),
            "memory": memory_path.display().to_string(),
        },
        "moments": entries,
        "known": known,
        "similar_with_delta": similar,
        "novel": novel,
        "no_activation": errors,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

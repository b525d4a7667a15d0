//! Scripted focus loop: a scenario file names weighted channels, assigns
//! them symbols tick by tick, and replays the tick script in one or more
//! passes. Record passes write the focus trajectory into the memory (links
//! always, self-associations when asked); predict passes read the expected
//! successor at each focus and score the previous prediction against the
//! focus that actually formed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hyperdim::{
    choose_radius, compose_focus, detect_novelty, predict_next, Channel, Codebook, CounterWidth,
    Error, Hypervector, NoveltyKind, RandomSource, Result, Sdm, SdmConfig,
};
use serde::Deserialize;
use serde_json::json;

use crate::{effective_dim, read_json_file, write_report};

pub struct DemoArgs {
    pub scenario: PathBuf,
    pub dim_flag: Option<usize>,
    pub seed: u64,
    pub locations: usize,
    pub target_p: f64,
    pub counter_width: CounterWidth,
    pub low: f64,
    pub high: f64,
}

#[derive(Deserialize)]
struct Scenario {
    dim: Option<usize>,
    channels: Vec<ChannelSpec>,
    /// Each tick maps channel names to symbols; a channel keeps its last
    /// value when a tick leaves it out.
    ticks: Vec<BTreeMap<String, String>>,
    passes: Vec<PassSpec>,
}

#[derive(Deserialize)]
struct ChannelSpec {
    name: String,
    weight: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PassSpec {
    mode: String,
    autoassociate: Option<bool>,
}

#[derive(Clone, Copy, PartialEq)]
enum PassMode {
    Record,
    Predict,
    Both,
}

impl PassMode {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "record" => Ok(PassMode::Record),
            "predict" => Ok(PassMode::Predict),
            "both" => Ok(PassMode::Both),
            other => Err(Error::Format(format!(
                "pass mode must be record, predict, or both, got {other:?}"
            ))),
        }
    }

    fn records(self) -> bool {
        matches!(self, PassMode::Record | PassMode::Both)
    }

    fn predicts(self) -> bool {
        matches!(self, PassMode::Predict | PassMode::Both)
    }

    fn name(self) -> &'static str {
        match self {
            PassMode::Record => "record",
            PassMode::Predict => "predict",
            PassMode::Both => "both",
        }
    }
}

fn validate(s: &Scenario) -> Result<()> {
    if s.channels.is_empty() {
        return Err(Error::Format("scenario has no channels".into()));
    }
    if s.ticks.is_empty() {
        return Err(Error::Format("scenario has no ticks".into()));
    }
    if s.passes.is_empty() {
        return Err(Error::Format("scenario has no passes".into()));
    }
    let names: Vec<&str> = s.channels.iter().map(|c| c.name.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::Format(format!("duplicate channel {n:?}")));
        }
    }
    for name in &names {
        if !s.ticks[0].contains_key(*name) {
            return Err(Error::Format(format!(
                "channel {name:?} has no value at the first tick"
            )));
        }
    }
    for (t, tick) in s.ticks.iter().enumerate() {
        for key in tick.keys() {
            if !names.contains(&key.as_str()) {
                return Err(Error::Format(format!(
                    "tick {t} assigns unknown channel {key:?}"
                )));
            }
        }
    }
    Ok(())
}

pub fn run(args: DemoArgs, out: Option<&Path>, started: Instant) -> Result<bool> {
    if !(0.0 <= args.low && args.low < args.high && args.high <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need 0 <= low < high <= 1, got low {}, high {}",
            args.low, args.high
        )));
    }
    let scenario: Scenario = read_json_file(&args.scenario)?;
    validate(&scenario)?;

    let mut dim_val = args.dim_flag;
    if let (Some(a), Some(b)) = (dim_val, scenario.dim) {
        if a != b {
            return Err(Error::DimensionMismatch { left: a, right: b });
        }
    }
    dim_val = dim_val.or(scenario.dim);
    let dim = effective_dim(dim_val)?;

    let mut cb = Codebook::new(dim, args.seed);
    let mut rng = RandomSource::new(args.seed).substream(1);
    let radius = choose_radius(dim, args.locations, args.target_p);
    let mut sdm = Sdm::new(
        SdmConfig {
            dim,
            locations: args.locations,
            radius,
            counter_width: args.counter_width,
        },
        &mut rng,
    )?;

    // The focus the first link write anchors at; everything later chains
    // from composed channel states.
    let mut prev_focus = Hypervector::random(dim, &mut rng);
    let mut channels: Vec<Channel> = Vec::new();

    let mut log: Vec<serde_json::Value> = Vec::new();
    let mut pass_rows = Vec::new();
    for (p, pass) in scenario.passes.iter().enumerate() {
        let mode = PassMode::parse(&pass.mode)?;
        let autoassociate = pass.autoassociate.unwrap_or(false);
        if autoassociate && !mode.records() {
            return Err(Error::Format(format!(
                "pass {p} asks for autoassociation but does not record"
            )));
        }
        let mut last_prediction: Option<Hypervector> = None;
        let mut scored = 0usize;
        let mut match_sum = 0.0;
        let mut match_min = f64::INFINITY;
        let mut novelty_counts: BTreeMap<&'static str, usize> = BTreeMap::new();

        for (t, assignments) in scenario.ticks.iter().enumerate() {
            for (name, symbol) in assignments {
                let vector = cb.get_or_assign(symbol).clone();
                match channels.iter_mut().find(|c| c.name == *name) {
                    Some(c) => c.current = vector,
                    None => {
                        let weight = scenario
                            .channels
                            .iter()
                            .find(|c| c.name == *name)
                            .expect("validated channel")
                            .weight;
                        channels.push(Channel::new(name.clone(), weight, vector));
                    }
                }
            }
            let focus = compose_focus(&channels, &mut rng)?;

            let mut entry = serde_json::Map::new();
            entry.insert("pass".into(), json!(p));
            entry.insert("tick".into(), json!(t));
            entry.insert("focus".into(), json!(format!("{:016x}", focus.digest())));

            if mode.predicts() {
                if let Some(pred) = last_prediction.take() {
                    let s = pred.hamming_similarity(&focus)?;
                    entry.insert("prediction_match".into(), json!(s));
                    scored += 1;
                    match_sum += s;
                    match_min = match_min.min(s);
                }
                match predict_next(&sdm, &focus, None, &mut rng) {
                    Ok(Some(pred)) => {
                        entry.insert("predicted".into(), json!(true));
                        entry.insert("confidence".into(), json!(pred.confidence));
                        last_prediction = Some(pred.vector);
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
                match detect_novelty(&sdm, &focus, args.low, args.high, &mut rng) {
                    Ok(v) => {
                        let kind = match v.kind {
                            NoveltyKind::Known => "known",
                            NoveltyKind::SimilarWithDelta => "similar-with-delta",
                            NoveltyKind::Novel => "novel",
                        };
                        *novelty_counts.entry(kind).or_insert(0) += 1;
                        entry.insert(
                            "novelty".into(),
                            json!({"kind": kind, "similarity": v.similarity}),
                        );
                    }
                    Err(Error::NoActiveLocation) => {
                        entry.insert("novelty".into(), serde_json::Value::Null);
                    }
                    Err(e) => return Err(e),
                }
            }
            if mode.records() {
                sdm.write(&prev_focus, &focus)?;
                if autoassociate {
                    sdm.write(&focus, &focus)?;
                }
            }
            prev_focus = focus;
            log.push(serde_json::Value::Object(entry));
        }

        let mean = if scored > 0 {
            Some(match_sum / scored as f64)
        } else {
            None
        };
        let min = if scored > 0 { Some(match_min) } else { None };
        let mut line = format!("pass {p} ({})", mode.name());
        if mode.records() {
            line.push_str(if autoassociate {
                ": recorded links + self-associations"
            } else {
                ": recorded links"
            });
        }
        if let (Some(mean), Some(min)) = (mean, min) {
            line.push_str(&format!(
                "; prediction match mean {mean:.4}, min {min:.4} over {scored} ticks"
            ));
        }
        if !novelty_counts.is_empty() {
            let parts: Vec<String> = novelty_counts
                .iter()
                .map(|(k, n)| format!("{n} {k}"))
                .collect();
            line.push_str(&format!("; novelty: {}", parts.join(", ")));
        }
        println!("{line}");
        pass_rows.push(json!({
            "pass": p,
            "mode": mode.name(),
            "autoassociate": mode.records().then_some(autoassociate),
            "scored_ticks": scored,
            "mean_prediction_match": mean,
            "min_prediction_match": min,
            "novelty": novelty_counts,
        }));
    }

    println!(
        "focus-demo: {} channels, {} ticks x {} passes (dim {}, seed {}, {} locations, radius {radius})",
        scenario.channels.len(),
        scenario.ticks.len(),
        scenario.passes.len(),
        dim.get(),
        args.seed,
        args.locations,
    );

    let report = json!({
        "command": "focus-demo",
        "config": {
            "dim": dim.get(),
            "seed": args.seed,
            "scenario": args.scenario.display().to_string(),
            "locations": args.locations,
            "radius": radius,
            "target_p": args.target_p,
            "counter_bits": args.counter_width.bits(),
            "novelty_low": args.low,
            "novelty_high": args.high,
        },
        "passes": pass_rows,
        "log": log,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

//! Load-versus-recall benchmark: fill one memory with random address/data
//! pairs in stages and, at each stage, read every stored pair back. The
//! emitted curve is the raw material for degradation analysis.

use std::path::Path;
use std::time::Instant;

use hyperdim::{
    choose_radius, CounterWidth, Dimension, Error, Hypervector, RandomSource, Result, Sdm,
    SdmConfig, SdmRead,
};
use serde_json::json;

use crate::write_report;

pub struct BenchArgs {
    pub dim: Dimension,
    pub seed: u64,
    pub locations: usize,
    pub target_p: f64,
    pub items: usize,
    pub trials: usize,
    pub counter_width: CounterWidth,
}

struct LoadPoint {
    items: usize,
    mean_similarity: f64,
    min_similarity: f64,
    mean_activated: f64,
    saturation_fraction: f64,
    missed_reads: usize,
}

pub fn run(args: BenchArgs, out: Option<&Path>, started: Instant) -> Result<bool> {
    if args.trials == 0 {
        return Err(Error::InvalidConfig("--trials must be at least 1".into()));
    }
    if !(args.target_p > 0.0 && args.target_p < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "--target-p must be in (0, 1), got {}",
            args.target_p
        )));
    }
    let radius = choose_radius(args.dim, args.locations, args.target_p);
    let config = SdmConfig {
        dim: args.dim,
        locations: args.locations,
        radius,
        counter_width: args.counter_width,
    };

    let grid = load_grid(args.items);
    let mut per_trial: Vec<Vec<LoadPoint>> = Vec::with_capacity(args.trials);
    let root = RandomSource::new(args.seed);
    for t in 0..args.trials {
        let mut rng = root.substream(t as u64);
        per_trial.push(run_trial(config, args.items, &grid, &mut rng)?);
    }

    // Averaged curve: mean of per-trial means, worst of per-trial minima.
    let curve: Vec<LoadPoint> = (0..grid.len())
        .map(|i| {
            let points: Vec<&LoadPoint> = per_trial.iter().map(|t| &t[i]).collect();
            let n = points.len() as f64;
            LoadPoint {
                items: grid[i],
                mean_similarity: points.iter().map(|p| p.mean_similarity).sum::<f64>() / n,
                min_similarity: points
                    .iter()
                    .map(|p| p.min_similarity)
                    .fold(f64::INFINITY, f64::min),
                mean_activated: points.iter().map(|p| p.mean_activated).sum::<f64>() / n,
                saturation_fraction: points.iter().map(|p| p.saturation_fraction).sum::<f64>()
                    / n,
                missed_reads: points.iter().map(|p| p.missed_reads).sum(),
            }
        })
        .collect();

    for p in &curve {
        println!(
            "{:>6} items: mean {:.4}, min {:.4}, activated {:.1}, saturated {:.4}{}",
            p.items,
            p.mean_similarity,
            p.min_similarity,
            p.mean_activated,
            p.saturation_fraction,
            if p.missed_reads > 0 {
                format!(", {} reads activated nothing", p.missed_reads)
            } else {
                String::new()
            }
        );
    }
    if curve.is_empty() {
        println!("sdm-bench: no items requested, empty curve");
    } else {
        println!(
            "sdm-bench: dim {}, {} locations, radius {radius} (p={}), {} trial(s), fit slope {:+.3e}/item",
            args.dim.get(),
            args.locations,
            args.target_p,
            args.trials,
            fit_slope(&curve)
        );
    }

    let report = json!({
        "command": "sdm-bench",
        "config": {
            "dim": args.dim.get(),
            "seed": args.seed,
            "locations": args.locations,
            "target_p": args.target_p,
            "radius": radius,
            "counter_bits": args.counter_width.bits(),
            "items": args.items,
            "trials": args.trials,
        },
        "curve": curve.iter().map(|p| json!({
            "items": p.items,
            "mean_similarity": p.mean_similarity,
            "min_similarity": p.min_similarity,
            "mean_activated": p.mean_activated,
            "saturation_fraction": p.saturation_fraction,
            "missed_reads": p.missed_reads,
        })).collect::<Vec<_>>(),
        "fit_slope_per_item": if curve.is_empty() { serde_json::Value::Null } else { json!(fit_slope(&curve)) },
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(true)
}

/// Grid from 50 up to `items` in roughly 16 steps, always ending at `items`.
fn load_grid(items: usize) -> Vec<usize> {
    if items == 0 {
        return Vec::new();
    }
    let step = (items.saturating_sub(50)).div_ceil(16).max(1);
    let step = step.div_ceil(25) * 25;
    let mut grid: Vec<usize> = (0..)
        .map(|k| 50 + k * step)
        .take_while(|&n| n < items)
        .collect();
    grid.push(items);
    grid
}

fn run_trial(
    config: SdmConfig,
    items: usize,
    grid: &[usize],
    rng: &mut RandomSource,
) -> Result<Vec<LoadPoint>> {
    let mut sdm = Sdm::new(config, rng)?;
    let pairs: Vec<(Hypervector, Hypervector)> = (0..items)
        .map(|_| {
            (
                Hypervector::random(config.dim, rng),
                Hypervector::random(config.dim, rng),
            )
        })
        .collect();

    let mut curve = Vec::with_capacity(grid.len());
    let mut written = 0;
    for &load in grid {
        while written < load {
            sdm.write(&pairs[written].0, &pairs[written].1)?;
            written += 1;
        }
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut activated_sum = 0usize;
        let mut missed = 0usize;
        for (addr, data) in &pairs[..written] {
            // A probe that activates nothing (or hits only zeroed counters)
            // recalls nothing; score it as 0 rather than aborting the curve.
            let sim = match sdm.read(addr, rng) {
                Ok(SdmRead::Recall {
                    vector, activated, ..
                }) => {
                    activated_sum += activated;
                    vector.hamming_similarity(data)?
                }
                Ok(SdmRead::Empty { .. }) | Err(Error::NoActiveLocation) => {
                    missed += 1;
                    0.0
                }
                Err(e) => return Err(e),
            };
            sum += sim;
            min = min.min(sim);
        }
        let stats = sdm.stats();
        curve.push(LoadPoint {
            items: load,
            mean_similarity: sum / written as f64,
            min_similarity: min,
            mean_activated: activated_sum as f64 / written as f64,
            saturation_fraction: stats.saturation_fraction,
            missed_reads: missed,
        });
    }
    Ok(curve)
}

/// Least-squares slope of mean similarity against item count.
fn fit_slope(curve: &[LoadPoint]) -> f64 {
    if curve.len() < 2 {
        return 0.0;
    }
    let n = curve.len() as f64;
    let mx = curve.iter().map(|p| p.items as f64).sum::<f64>() / n;
    let my = curve.iter().map(|p| p.mean_similarity).sum::<f64>() / n;
    let num: f64 = curve
        .iter()
        .map(|p| (p.items as f64 - mx) * (p.mean_similarity - my))
        .sum();
    let den: f64 = curve.iter().map(|p| (p.items as f64 - mx).powi(2)).sum();
    num / den
}

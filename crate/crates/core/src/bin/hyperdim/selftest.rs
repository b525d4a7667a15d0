//! Property suites runnable at any dimension: exact algebraic laws always,
//! statistical concentration checks only where the dimension gives them
//! teeth (smaller dimensions skip those with an explicit notice).

use std::path::Path;
use std::time::Instant;

use hyperdim::{
    bundle, decode_chunk, encode_chunk, Codebook, Dimension, Hypervector, RandomSource, Result,
};
use serde_json::json;

use crate::write_report;

enum Status {
    Pass,
    Fail,
    Skip,
}

struct CheckResult {
    name: &'static str,
    status: Status,
    cases: usize,
    detail: String,
}

fn pass(name: &'static str, cases: usize, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        status: Status::Pass,
        cases,
        detail: detail.into(),
    }
}

fn fail(name: &'static str, cases: usize, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        status: Status::Fail,
        cases,
        detail: detail.into(),
    }
}

fn skip(name: &'static str, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        status: Status::Skip,
        cases: 0,
        detail: detail.into(),
    }
}

pub fn run(
    dim: Dimension,
    seed: u64,
    cases: usize,
    out: Option<&Path>,
    started: Instant,
) -> Result<bool> {
    let root = RandomSource::new(seed);
    let checks = vec![
        bind_laws(dim, &mut root.substream(1), cases)?,
        bind_distance(dim, &mut root.substream(2), cases)?,
        permutation_laws(dim, &mut root.substream(3), cases),
        permute_distributivity(dim, &mut root.substream(4), cases)?,
        orthogonality(dim, &mut root.substream(5)),
        bound_pair_decoding(dim, seed, &mut root.substream(6))?,
        chunk_roundtrip(dim, seed)?,
    ];

    let mut passed = 0;
    let mut failed = 0;
    let mut skipped = 0;
    for c in &checks {
        let tag = match c.status {
            Status::Pass => {
                passed += 1;
                "PASS"
            }
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => {
                skipped += 1;
                "SKIP"
            }
        };
        println!("{tag} {:<28} {}", c.name, c.detail);
    }
    println!(
        "selftest: {passed} passed, {failed} failed, {skipped} skipped \
         (dim {}, seed {seed}, {cases} cases per law)",
        dim.get()
    );

    let report = json!({
        "command": "selftest",
        "config": {"dim": dim.get(), "seed": seed, "cases": cases},
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "status": match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skip => "skipped",
            },
            "cases": c.cases,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "passed": passed,
        "failed": failed,
        "skipped": skipped,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_report(out, &report)?;
    Ok(failed == 0)
}

fn bind_laws(dim: Dimension, rng: &mut RandomSource, cases: usize) -> Result<CheckResult> {
    let name = "bind-self-inverse";
    let zero = Hypervector::zeros(dim);
    for i in 0..cases {
        let a = Hypervector::random(dim, rng);
        let b = Hypervector::random(dim, rng);
        let ab = a.bind(&b)?;
        if ab.bind(&b)? != a {
            return Ok(fail(name, i, "bind(bind(a,b),b) != a"));
        }
        if ab != b.bind(&a)? {
            return Ok(fail(name, i, "bind is not commutative"));
        }
        if a.bind(&a)? != zero {
            return Ok(fail(name, i, "bind(a,a) != 0"));
        }
    }
    Ok(pass(name, cases, "unbinding recovers, commutes, self-annihilates"))
}

fn bind_distance(dim: Dimension, rng: &mut RandomSource, cases: usize) -> Result<CheckResult> {
    let name = "bind-distance-preservation";
    for i in 0..cases {
        let x = Hypervector::random(dim, rng);
        let a = Hypervector::random(dim, rng);
        let b = Hypervector::random(dim, rng);
        let before = a.hamming_distance(&b)?;
        let after = x.bind(&a)?.hamming_distance(&x.bind(&b)?)?;
        if before != after {
            return Ok(fail(name, i, format!("distance moved {before} -> {after}")));
        }
    }
    Ok(pass(name, cases, "binding with x preserves every pair distance"))
}

fn permutation_laws(dim: Dimension, rng: &mut RandomSource, cases: usize) -> CheckResult {
    let name = "permutation-laws";
    let d = dim.get() as i64;
    for i in 0..cases {
        let v = Hypervector::random(dim, rng);
        let s = rng.next_below(6 * d as u64) as i64 - 3 * d;
        let t = rng.next_below(6 * d as u64) as i64 - 3 * d;
        if v.permute(s).permute(t) != v.permute(s + t) {
            return fail(name, i, format!("composition broke at shifts {s}, {t}"));
        }
        if v.permute(0) != v || v.permute(d) != v {
            return fail(name, i, "identity or full-cycle shift moved bits");
        }
        if v.permute(s).permute(-s) != v {
            return fail(name, i, format!("inverse shift {s} did not undo"));
        }
    }
    pass(name, cases, "shifts compose additively, invert, cycle at d")
}

fn permute_distributivity(
    dim: Dimension,
    rng: &mut RandomSource,
    cases: usize,
) -> Result<CheckResult> {
    let name = "permute-distributivity";
    let d = dim.get() as i64;
    for i in 0..cases {
        let a = Hypervector::random(dim, rng);
        let b = Hypervector::random(dim, rng);
        let c = Hypervector::random(dim, rng);
        let k = rng.next_below(2 * d as u64) as i64 - d;
        if a.bind(&b)?.permute(k) != a.permute(k).bind(&b.permute(k))? {
            return Ok(fail(name, i, format!("bind distributivity broke at shift {k}")));
        }
        // Majority of 3 has no ties, so the two tie rngs stay untouched and
        // the comparison is exact.
        let maj = bundle(&[a.clone(), b.clone(), c.clone()], &mut RandomSource::new(0))?;
        let maj_rot = bundle(
            &[a.permute(k), b.permute(k), c.permute(k)],
            &mut RandomSource::new(0),
        )?;
        if maj.permute(k) != maj_rot {
            return Ok(fail(
                name,
                i,
                format!("majority distributivity broke at shift {k}"),
            ));
        }
    }
    Ok(pass(name, cases, "rotation distributes over bind and majority"))
}

fn orthogonality(dim: Dimension, rng: &mut RandomSource) -> CheckResult {
    let name = "orthogonality-concentration";
    let d = dim.get();
    if d < 256 {
        return skip(
            name,
            format!("dimension {d} too small for concentration bands (needs >= 256)"),
        );
    }
    let pairs = 1000;
    let sigma = 0.5 / (d as f64).sqrt();
    let sample_band = 5.0 * sigma;
    let mean_band = (5.0 * sigma / (pairs as f64).sqrt()).max(0.005);
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..pairs {
        let a = Hypervector::random(dim, rng);
        let b = Hypervector::random(dim, rng);
        let s = a.hamming_similarity(&b).expect("same dimension");
        sum += s;
        worst = worst.max((s - 0.5).abs());
        if (s - 0.5).abs() > sample_band {
            return fail(
                name,
                i,
                format!("pair similarity {s:.4} outside 0.5 +/- {sample_band:.4}"),
            );
        }
    }
    let mean = sum / pairs as f64;
    if (mean - 0.5).abs() > mean_band {
        return fail(
            name,
            pairs,
            format!("mean {mean:.5} outside 0.5 +/- {mean_band:.5}"),
        );
    }
    pass(
        name,
        pairs,
        format!("mean {mean:.5}, worst deviation {worst:.4} (band {sample_band:.4})"),
    )
}

fn bound_pair_decoding(dim: Dimension, seed: u64, rng: &mut RandomSource) -> Result<CheckResult> {
    let name = "bound-pair-decoding";
    let d = dim.get();
    if d < 64 {
        return Ok(skip(
            name,
            format!("dimension {d} risks codebook collisions (needs >= 64)"),
        ));
    }
    let cb = symbol_codebook(dim, seed);
    let symbols: Vec<String> = cb.entries().map(|(s, _)| s.to_string()).collect();
    let cases = 100;
    for i in 0..cases {
        let x = Hypervector::random(dim, rng);
        let sym = &symbols[rng.next_below(symbols.len() as u64) as usize];
        let a = cb.get(sym).expect("known symbol");
        let unbound = x.bind(&x.bind(a)?)?;
        let m = cb.cleanup(&unbound)?;
        if m.symbol != *sym || m.similarity != 1.0 {
            return Ok(fail(
                name,
                i,
                format!("got {} at {}, wanted {} at 1.0", m.symbol, m.similarity, sym),
            ));
        }
    }
    Ok(pass(name, cases, "x*(x*a) cleans up to a at exactly 1.0"))
}

fn chunk_roundtrip(dim: Dimension, seed: u64) -> Result<CheckResult> {
    let name = "chunk-roundtrip";
    let d = dim.get();
    if d < 4096 {
        return Ok(skip(
            name,
            format!("dimension {d} too small for reliable chunk decoding (needs >= 4096)"),
        ));
    }
    let cb = symbol_codebook(dim, seed);
    let symbols: Vec<String> = cb.entries().map(|(s, _)| s.to_string()).collect();
    let mut rng = RandomSource::new(seed).substream(7);
    let trials = 10;
    let mut cases = 0;
    for k in 1..=5usize {
        for trial in 0..trials {
            let mut picked: Vec<String> = Vec::with_capacity(k);
            while picked.len() < k {
                let s = &symbols[rng.next_below(symbols.len() as u64) as usize];
                if !picked.contains(s) {
                    picked.push(s.clone());
                }
            }
            let items: Vec<Hypervector> = picked
                .iter()
                .map(|s| cb.get(s).expect("known symbol").clone())
                .collect();
            let chunk = encode_chunk(&items, &mut rng)?;
            let decoded = decode_chunk(&chunk, k, &cb)?;
            for (want, got) in picked.iter().zip(&decoded) {
                if got.symbol != *want {
                    return Ok(fail(
                        name,
                        cases,
                        format!("k={k} trial {trial}: decoded {} for {}", got.symbol, want),
                    ));
                }
            }
            cases += 1;
        }
    }
    Ok(pass(
        name,
        cases,
        format!("stored and recovered ordered chunks up to k=5, {trials} trials each"),
    ))
}

/// 27 random symbols named s00..s26, assigned in fixed order.
fn symbol_codebook(dim: Dimension, seed: u64) -> Codebook {
    let mut cb = Codebook::new(dim, seed);
    for i in 0..27 {
        cb.assign(&format!("s{i:02}")).expect("names are distinct");
    }
    cb
}

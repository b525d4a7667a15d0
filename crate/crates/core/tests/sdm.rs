//! Sparse distributed memory against independent oracles: the activation
//! radius against a plain f64 binomial CDF, write linearity, recall behavior,
//! and the persistence format.

mod common;

use common::naive;
use hyperdim::{
    activation_probability, choose_radius, CounterWidth, Dimension, Error, Hypervector,
    IterativeRead, RandomSource, Sdm, SdmConfig, SdmRead,
};

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn config(d: usize, locations: usize, target_p: f64) -> SdmConfig {
    SdmConfig {
        dim: dim(d),
        locations,
        radius: choose_radius(dim(d), locations, target_p),
        counter_width: CounterWidth::W8,
    }
}

#[test]
fn radius_matches_f64_binomial_oracle() {
    // The library computes the CDF in exact big-integer arithmetic; the
    // oracle recomputes it in f64, trustworthy up to d=1000. None of these
    // probabilities sits close enough to a CDF step for f64 error to matter.
    for d in [64usize, 256, 1000] {
        for p in [1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9] {
            let got = choose_radius(dim(d), 10_000, p);
            let want = naive::choose_radius(d, p);
            assert_eq!(got, want, "d={d} p={p}");
        }
    }
}

#[test]
fn activation_probability_matches_cdf_oracle() {
    for d in [64usize, 256, 1000] {
        for r in [0, 1, d as u32 / 4, d as u32 / 2, d as u32] {
            let got = activation_probability(dim(d), r);
            let want = naive::binomial_cdf(d, r as usize);
            assert!(
                (got - want).abs() < 1e-9,
                "d={d} r={r}: {got} vs {want}"
            );
        }
    }
    assert_eq!(activation_probability(dim(1000), 1000), 1.0);
}

#[test]
fn radius_is_monotone_in_target_probability() {
    let d = dim(1000);
    let mut last = 0;
    for p in [1e-6, 1e-4, 1e-2, 0.25, 0.5, 0.75, 0.999] {
        let r = choose_radius(d, 10_000, p);
        assert!(r >= last, "radius must grow with target probability");
        last = r;
    }
}

#[test]
fn write_order_does_not_change_state() {
    let cfg = config(256, 500, 0.01);
    let mut rng = RandomSource::new(5);
    let mut a = Sdm::new(cfg.clone(), &mut rng.substream(0)).unwrap();
    let mut b = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    let pairs: Vec<(Hypervector, Hypervector)> = (0..8)
        .map(|_| {
            (
                Hypervector::random(dim(256), &mut rng),
                Hypervector::random(dim(256), &mut rng),
            )
        })
        .collect();
    for (addr, data) in &pairs {
        a.write(addr, data).unwrap();
    }
    for (addr, data) in pairs.iter().rev() {
        b.write(addr, data).unwrap();
    }
    assert_eq!(a, b);
    // Reads agree too, including the rng-free confidence figure.
    let mut r1 = RandomSource::new(77);
    let mut r2 = RandomSource::new(77);
    for (addr, _) in &pairs {
        assert_eq!(a.read(addr, &mut r1).unwrap(), b.read(addr, &mut r2).unwrap());
    }
}

#[test]
fn repeated_write_doubles_counters() {
    let cfg = config(128, 200, 0.05);
    let mut rng = RandomSource::new(11);
    let mut once = Sdm::new(cfg.clone(), &mut rng.substream(0)).unwrap();
    let mut twice = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    let v = Hypervector::random(dim(128), &mut rng);
    once.write(&v, &v).unwrap();
    twice.write(&v, &v).unwrap();
    twice.write(&v, &v).unwrap();
    let h_once = once.stats().counter_histogram;
    let h_twice = twice.stats().counter_histogram;
    for (value, count) in h_once {
        if value == 0 {
            continue;
        }
        assert_eq!(
            h_twice.get(&(value * 2)).copied().unwrap_or(0),
            count,
            "counter value {value} must double"
        );
    }
}

#[test]
fn empty_and_unreachable_reads_are_distinguished() {
    // One location, radius 0: only its own address activates it.
    let mut rng = RandomSource::new(3);
    let cfg = SdmConfig {
        dim: dim(64),
        locations: 1,
        radius: 0,
        counter_width: CounterWidth::W8,
    };
    let sdm = Sdm::new(cfg, &mut rng).unwrap();
    let own = sdm.address(0).clone();
    // At the address: activated but never written.
    match sdm.read(&own, &mut rng).unwrap() {
        SdmRead::Empty { activated } => assert_eq!(activated, 1),
        other => panic!("expected Empty, got {other:?}"),
    }
    // Anywhere else: no location at all.
    match sdm.read(&own.complement(), &mut rng) {
        Err(Error::NoActiveLocation) => {}
        other => panic!("expected NoActiveLocation, got {other:?}"),
    }
}

#[test]
fn recall_reproduces_stored_data_under_light_load() {
    let cfg = config(500, 2000, 0.01);
    let mut rng = RandomSource::new(21);
    let mut sdm = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    let pairs: Vec<(Hypervector, Hypervector)> = (0..20)
        .map(|_| {
            (
                Hypervector::random(dim(500), &mut rng),
                Hypervector::random(dim(500), &mut rng),
            )
        })
        .collect();
    for (addr, data) in &pairs {
        sdm.write(addr, data).unwrap();
    }
    for (addr, data) in &pairs {
        match sdm.read(addr, &mut rng).unwrap() {
            SdmRead::Recall {
                vector,
                confidence,
                activated,
            } => {
                assert!(activated >= 1);
                assert!(confidence > 0.0);
                let sim = vector.hamming_similarity(data).unwrap();
                assert!(sim >= 0.95, "recall similarity {sim} too low");
            }
            other => panic!("expected recall, got {other:?}"),
        }
    }
}

#[test]
fn iterative_recall_settles_onto_a_reinforced_pattern() {
    let cfg = config(256, 2000, 0.01);
    let mut rng = RandomSource::new(31);
    let mut sdm = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    let stored = Hypervector::random(dim(256), &mut rng);
    // Reinforce the self-mapping so the fixed point is sharp.
    for _ in 0..3 {
        sdm.write(&stored, &stored).unwrap();
    }
    // Corrupt 12 of 256 bits and let the readback walk home.
    let mut bits = stored.bits();
    for b in bits.iter_mut().take(12) {
        *b = !*b;
    }
    let probe = naive::hv(dim(256), &bits);
    match sdm.read_iterative(&probe, 10, &mut rng).unwrap() {
        IterativeRead::Converged { vector, iterations } => {
            assert_eq!(vector, stored);
            assert!(iterations <= 10);
        }
        other => panic!("expected convergence, got {other:?}"),
    }
}

#[test]
fn persistence_roundtrip_is_bit_exact() {
    let cfg = config(300, 400, 0.02);
    let mut rng = RandomSource::new(8);
    let mut sdm = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    for _ in 0..10 {
        let a = Hypervector::random(dim(300), &mut rng);
        let d = Hypervector::random(dim(300), &mut rng);
        sdm.write(&a, &d).unwrap();
    }
    let mut bytes = Vec::new();
    sdm.write_to(&mut bytes).unwrap();
    let loaded = Sdm::read_from(&mut bytes.as_slice()).unwrap();
    assert_eq!(loaded, sdm);
    let mut again = Vec::new();
    loaded.write_to(&mut again).unwrap();
    assert_eq!(bytes, again);
}

#[test]
fn corrupted_store_is_rejected() {
    let cfg = config(64, 10, 0.1);
    let mut rng = RandomSource::new(1);
    let sdm = Sdm::new(cfg, &mut rng).unwrap();
    let mut bytes = Vec::new();
    sdm.write_to(&mut bytes).unwrap();
    bytes[0] ^= 0xff;
    assert!(matches!(
        Sdm::read_from(&mut bytes.as_slice()),
        Err(Error::Format(_))
    ));
    // Truncation is also a format error, not a panic.
    let sdm2 = {
        let mut rng = RandomSource::new(1);
        Sdm::new(config(64, 10, 0.1), &mut rng).unwrap()
    };
    let mut full = Vec::new();
    sdm2.write_to(&mut full).unwrap();
    full.truncate(full.len() / 2);
    assert!(Sdm::read_from(&mut full.as_slice()).is_err());
}

#[test]
fn saturation_clamps_at_the_width_bound() {
    let mut rng = RandomSource::new(17);
    let cfg = SdmConfig {
        dim: dim(64),
        locations: 50,
        radius: choose_radius(dim(64), 50, 0.2),
        counter_width: CounterWidth::W8,
    };
    let mut sdm = Sdm::new(cfg, &mut rng.substream(0)).unwrap();
    let v = Hypervector::random(dim(64), &mut rng);
    for _ in 0..200 {
        sdm.write(&v, &v).unwrap();
    }
    let stats = sdm.stats();
    let bound = CounterWidth::W8.bound();
    assert!(stats.counter_histogram.keys().all(|&c| c.abs() <= bound));
    assert!(stats.saturation_fraction > 0.0);
    // The stored pattern still reads back exactly: saturation is lossy for
    // magnitude, not for sign.
    match sdm.read(&v, &mut rng).unwrap() {
        SdmRead::Recall { vector, .. } => assert_eq!(vector, v),
        other => panic!("expected recall, got {other:?}"),
    }
}

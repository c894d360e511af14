mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rm_metrics_core::atypicality::{
    compute_atypicality, null_model_sample, observed_pair_counts, pair_zscores, CitationNetwork,
    JournalPairKey, NullModelConfig, PairCounts,
};
use rm_metrics_core::corpus::Corpus;
use rm_metrics_core::ids::VenueId;

/// Cited pool in four venues, all published in 2000. Forty papers co-cite
/// A and B, thirty cite two X papers, thirty cite two Y papers, and one
/// focal paper is the only one to combine X with Y.
fn toy() -> Corpus {
    let mut works = Vec::new();
    for v in ["A", "B", "X", "Y"] {
        for i in 0..20 {
            works.push(common::work(&format!("{v}{i}"), 2000, Some(v), &["old"], &[], "F0"));
        }
    }
    let mut n = 0;
    let mut citing = |refs: [String; 2], works: &mut Vec<_>| {
        let r = [refs[0].as_str(), refs[1].as_str()];
        works.push(common::work(&format!("C{n}"), 2010, Some("Z"), &["new"], &r, "F0"));
        n += 1;
    };
    for i in 0..40 {
        citing([format!("A{}", i % 20), format!("B{}", (i * 7) % 20)], &mut works);
    }
    for i in 0..30 {
        citing([format!("X{}", i % 20), format!("X{}", (i + 5) % 20)], &mut works);
        citing([format!("Y{}", i % 20), format!("Y{}", (i + 5) % 20)], &mut works);
    }
    citing(["X3".into(), "Y4".into()], &mut works);
    common::build(works)
}

fn venue(corpus: &Corpus, key: &str) -> VenueId {
    VenueId((0..corpus.venues().len()).position(|i| corpus.venues()[i] == key).unwrap() as u32)
}

#[test]
fn rare_pair_is_negative_conventional_pair_positive() {
    let corpus = toy();
    let observed = observed_pair_counts(&corpus, 2010);
    let samples: Vec<PairCounts> = (0..10)
        .map(|i| null_model_sample(&corpus, 2010, 100 + i, 10).0)
        .collect();
    let table = pair_zscores::<f64>(&observed, &samples);
    let key = |a: &str, b: &str| JournalPairKey::new(venue(&corpus, a), venue(&corpus, b), 2010);
    let rare = &table[&key("X", "Y")];
    let conventional = &table[&key("A", "B")];
    assert_eq!(rare.observed, 1);
    assert_eq!(conventional.observed, 40);
    assert!(rare.z.unwrap() < 0.0, "{rare:?}");
    assert!(conventional.z.unwrap() > 0.0, "{conventional:?}");

    let cfg = NullModelConfig {
        seed: 5,
        ..NullModelConfig::default()
    };
    let run = compute_atypicality::<f64>(&corpus, &cfg);
    let focal = corpus.paper_by_key("C100").unwrap();
    let s = &run.scores[focal.index()];
    assert!(s.defined && s.n_pairs == 1 && s.a > 0.0, "{s:?}");
    let ab = corpus.paper_by_key("C0").unwrap();
    assert!(run.scores[ab.index()].a < 0.0);
    // cited papers have no references of their own
    assert!(!run.scores[corpus.paper_by_key("A0").unwrap().index()].defined);
}

fn thousand_edge_network(seed: u64) -> CitationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_cited = 300;
    let cited_year: Vec<i32> = (0..n_cited).map(|_| rng.gen_range(1990..2000)).collect();
    let cited_venue: Vec<VenueId> = (0..n_cited).map(|_| VenueId(rng.gen_range(0..25))).collect();
    let mut refs: Vec<Vec<u32>> = Vec::new();
    let mut edges = 0;
    while edges < 1000 {
        let k = rng.gen_range(1..=(12.min(1000 - edges)));
        let mut list: Vec<u32> = Vec::new();
        while list.len() < k {
            let r = rng.gen_range(0..n_cited as u32);
            if !list.contains(&r) {
                list.push(r);
            }
        }
        edges += k;
        refs.push(list);
    }
    CitationNetwork::new(2005, refs, cited_year, cited_venue)
}

#[test]
fn every_sample_conserves_degrees_and_strata() {
    let base = thousand_edge_network(1);
    assert_eq!(base.n_edges(), 1000);
    let (out, inn, years) = (base.out_degrees(), base.in_degrees(), base.cited_year_profile());
    let mut moved = 0;
    for sample in 0..10u64 {
        let mut net = base.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(sample);
        let diag = net.randomize(&mut rng, 10);
        assert_eq!(net.out_degrees(), out);
        assert_eq!(net.in_degrees(), inn);
        assert_eq!(net.cited_year_profile(), years);
        for list in net.refs() {
            let mut l = list.clone();
            l.sort_unstable();
            l.dedup();
            assert_eq!(l.len(), list.len(), "multi-edge created");
        }
        let attempted: u64 = diag.values().map(|s| s.attempted).sum();
        assert_eq!(attempted, 10_000);
        moved += usize::from(net.refs() != base.refs());
    }
    assert_eq!(moved, 10);
}

#[test]
fn same_seed_same_counts() {
    let run = |seed| {
        let mut net = thousand_edge_network(2);
        net.randomize(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        net.pair_counts()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));

    let corpus = toy();
    let cfg = NullModelConfig::default();
    assert_eq!(
        compute_atypicality::<f64>(&corpus, &cfg),
        compute_atypicality::<f64>(&corpus, &cfg)
    );
}

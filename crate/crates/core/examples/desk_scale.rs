//! Generate a desk-scale synthetic corpus and print what the pipeline
//! measures on it.

use std::time::Instant;

use rm_metrics_core::disruption::{disruption_all, top_percentile_flags, DisruptionOptions};
use rm_metrics_core::inference::{binned_metric_vs_fields, top5_values, CurveMetric, CurveOptions};
use rm_metrics_core::style::{
    build_profiles, fox_fraction_by_cohort, stability_fraction, Cohort, ProfileIndex, StyleOptions,
};
use rm_metrics_core::synth::{synthesize, SynthSpec};
use rm_metrics_core::teams::{generalist_team_share_by_decade, team_records, Composition, TeamFieldRule};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let t = Instant::now();
    let spec = SynthSpec::desk_scale(seed);
    let (synth, truth) = synthesize(&spec).unwrap();
    println!("synth: {} papers in {:?}", synth.papers.len(), t.elapsed());
    println!("planting: {:?}", truth.planting);
    let corpus = synth.to_corpus().unwrap();
    let opts = StyleOptions::default();
    let profiles = build_profiles::<f64>(&corpus, &opts);
    for p in fox_fraction_by_cohort(&profiles, Cohort::FirstPubDecade) {
        println!("fox {} {:.4} n={}", p.decade, p.fraction, p.n);
    }
    let st = stability_fraction(&profiles, &corpus, &opts, 10, 3).unwrap();
    println!("stability {:?}", st);
    let index = ProfileIndex::new(&profiles, corpus.authors().len());
    let records = team_records(&corpus, &index, TeamFieldRule::MemberPrimary).unwrap();
    for p in generalist_team_share_by_decade(&records) {
        println!("gen share {} {:.4} n={}", p.decade, p.fraction, p.n);
    }
    let d = disruption_all::<f64>(&corpus, DisruptionOptions::default());
    let flags = top_percentile_flags(&d, 5.0).unwrap();
    let values = top5_values::<f64, f64>(&d, &flags);
    let curve = binned_metric_vs_fields(&records, CurveMetric::PTop5Disruptive, &values, &CurveOptions::default()).unwrap();
    for b in &curve.bins {
        println!("{:?} {} {:.4} [{:.4},{:.4}] n={}", b.group, b.n_fields, b.mean, b.ci_lo, b.ci_hi, b.n);
    }
    println!("decline {:?}", curve.relative_decline_pct(Composition::Specialist, 3, 10));
    for k in [3usize, 10] {
        let members: Vec<usize> = truth.papers.iter().enumerate()
            .filter(|(_, p)| p.team_size >= 2 && p.group == Composition::Specialist && p.n_fields == k)
            .map(|(i, _)| i).collect();
        let exp = members.iter().filter(|&&i| truth.papers[i].expected_top()).count();
        let fl = members.iter().filter(|&&i| flags[i]).count();
        let rec = members.iter().filter(|&&i| records[i].composition == Composition::Specialist && records[i].n_team_fields == Some(k)).count();
        println!("bin {k}: truth n={} expected={} flagged={} records-agree={}", members.len(), exp, fl, rec);
    }
    let pairs: Vec<(f64, f64)> = truth.papers.iter().zip(&d)
        .filter(|(_, s)| s.defined)
        .map(|(t, s)| (t.disruption_intent, s.d)).collect();
    println!("spearman {:.4}", spearman(&pairs));
    let n = d.len() as f64;
    let c: f64 = d.iter().map(|s| (s.n_i + s.n_j) as f64).sum::<f64>() / n;
    let k: f64 = d.iter().map(|s| s.n_k as f64).sum::<f64>() / n;
    println!("mean citers {c:.2} mean n_k {k:.2}");
    let mut hist = std::collections::BTreeMap::new();
    for t in &truth.papers { *hist.entry((t.disruption_intent * 10.0).round() as i64).or_insert(0) += 1; }
    println!("intent hist {hist:?}");
    let ta = Instant::now();
    let run = rm_metrics_core::atypicality::compute_atypicality::<f64>(&corpus, &Default::default());
    let defined = run.scores.iter().filter(|s| s.defined).count();
    println!("atypicality: {defined} defined in {:?}", ta.elapsed());
    println!("total {:?}", t.elapsed());
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(pairs: &[(f64, f64)]) -> f64 {
    let a = ranks(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let b = ranks(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#![allow(dead_code)]

use rand::Rng;
use rm_metrics_core::corpus::{Corpus, CorpusBuilder, RawAuthorship, RawFieldScore, RawWork};

pub fn work(id: &str, year: i32, venue: Option<&str>, authors: &[&str], refs: &[&str], field: &str) -> RawWork {
    RawWork {
        id: id.to_string(),
        publication_year: year,
        venue: venue.map(String::from),
        authorships: authors
            .iter()
            .enumerate()
            .map(|(i, a)| RawAuthorship {
                author_id: a.to_string(),
                position: i as u32,
            })
            .collect(),
        referenced_works: refs.iter().map(|r| r.to_string()).collect(),
        fields: vec![RawFieldScore {
            id: field.to_string(),
            score: 0.9,
            level: None,
        }],
    }
}

pub fn build(works: Vec<RawWork>) -> Corpus {
    let mut b = CorpusBuilder::new("fixture");
    for (i, w) in works.into_iter().enumerate() {
        b.push(i + 1, w);
    }
    b.build().expect("fixture builds")
}

/// Random citation DAG: paper `i` may cite any earlier-indexed paper whose
/// year does not exceed its own, so same-year citations occur.
pub fn random_works<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<RawWork> {
    let mut years: Vec<i32> = (0..n).map(|_| rng.gen_range(2000..2008)).collect();
    years.sort_unstable();
    (0..n)
        .map(|i| {
            let refs: Vec<String> = (0..i)
                .filter(|&j| years[j] <= years[i] && rng.gen_bool(density))
                .map(|j| format!("P{j}"))
                .collect();
            let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
            let venue = format!("V{}", rng.gen_range(0..4));
            let author = format!("A{}", rng.gen_range(0..n / 3 + 1));
            work(&format!("P{i}"), years[i], Some(&venue), &[&author], &refs, "F0")
        })
        .collect()
}

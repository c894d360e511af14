//! Per-year citation networks and the edge-swap null model.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::ids::{PaperId, VenueId};

/// Unordered venue pair within one citing-year stratum.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JournalPairKey {
    pub venue_lo: VenueId,
    pub venue_hi: VenueId,
    /// Publication year of the citing papers the pair was counted over.
    pub stratum: i32,
}

impl JournalPairKey {
    pub fn new(a: VenueId, b: VenueId, stratum: i32) -> Self {
        Self {
            venue_lo: a.min(b),
            venue_hi: a.max(b),
            stratum,
        }
    }
}

pub type PairCounts = HashMap<JournalPairKey, u32>;

/// Distinct venue pairs of one reference list: every unordered pair of
/// distinct venues plus `(v, v)` for a venue cited at least twice.
pub fn venue_pairs(venues: &mut Vec<VenueId>, stratum: i32, mut emit: impl FnMut(JournalPairKey)) {
    venues.sort_unstable();
    let mut distinct: Vec<(VenueId, u32)> = Vec::with_capacity(venues.len());
    for &v in venues.iter() {
        match distinct.last_mut() {
            Some((last, n)) if *last == v => *n += 1,
            _ => distinct.push((v, 1)),
        }
    }
    for (i, &(u, mult)) in distinct.iter().enumerate() {
        if mult >= 2 {
            emit(JournalPairKey::new(u, u, stratum));
        }
        for &(v, _) in &distinct[i + 1..] {
            emit(JournalPairKey::new(u, v, stratum));
        }
    }
}

/// Bipartite citing -> cited network of one citing year. Only references to
/// papers with a known venue are kept.
///
/// References are stored flat: slot `e` in `offsets[a]..offsets[a + 1]` is
/// one edge of citing node `a`. Swaps exchange the cited nodes of two slots,
/// so out-degrees are structural and each slot keeps its cited-year stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct CitationNetwork {
    pub stratum: i32,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    owner: Vec<u32>,
    cited_year: Vec<i32>,
    cited_venue: Vec<VenueId>,
    /// Slots grouped by cited year.
    strata: Vec<(i32, Vec<u32>)>,
    /// Index into `strata` per slot.
    slot_stratum: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSwaps {
    pub attempted: u64,
    pub accepted: u64,
}

/// Swap bookkeeping keyed by cited-year stratum.
pub type SwapDiagnostics = BTreeMap<i32, StratumSwaps>;

impl CitationNetwork {
    /// Build from explicit reference lists over abstract cited nodes.
    /// Duplicate references are dropped.
    pub fn new(
        stratum: i32,
        refs: Vec<Vec<u32>>,
        cited_year: Vec<i32>,
        cited_venue: Vec<VenueId>,
    ) -> Self {
        assert_eq!(cited_year.len(), cited_venue.len());
        let mut offsets = Vec::with_capacity(refs.len() + 1);
        let mut targets = Vec::new();
        let mut owner = Vec::new();
        offsets.push(0);
        for (a, mut list) in refs.into_iter().enumerate() {
            list.sort_unstable();
            list.dedup();
            owner.extend(std::iter::repeat(a as u32).take(list.len()));
            targets.extend(list);
            offsets.push(targets.len());
        }
        let mut by_year: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
        for (e, &x) in targets.iter().enumerate() {
            by_year.entry(cited_year[x as usize]).or_default().push(e as u32);
        }
        let strata: Vec<(i32, Vec<u32>)> = by_year.into_iter().collect();
        let mut slot_stratum = vec![0u32; targets.len()];
        for (k, (_, slots)) in strata.iter().enumerate() {
            for &e in slots {
                slot_stratum[e as usize] = k as u32;
            }
        }
        Self {
            stratum,
            offsets,
            targets,
            owner,
            cited_year,
            cited_venue,
            strata,
            slot_stratum,
        }
    }

    /// Network of the papers published in `year`, with the citing paper ids
    /// in node order.
    pub fn for_year(corpus: &Corpus, year: i32) -> (Self, Vec<PaperId>) {
        let citing: Vec<PaperId> = corpus
            .papers()
            .iter()
            .filter(|p| p.year == year)
            .map(|p| p.id)
            .collect();
        let mut local: HashMap<PaperId, u32> = HashMap::new();
        let mut cited_year = Vec::new();
        let mut cited_venue = Vec::new();
        let refs = citing
            .iter()
            .map(|&p| {
                corpus
                    .references(p)
                    .iter()
                    .filter_map(|&r| {
                        let rec = corpus.paper(r);
                        let venue = rec.venue?;
                        Some(*local.entry(r).or_insert_with(|| {
                            cited_year.push(rec.year);
                            cited_venue.push(venue);
                            (cited_year.len() - 1) as u32
                        }))
                    })
                    .collect()
            })
            .collect();
        (Self::new(year, refs, cited_year, cited_venue), citing)
    }

    pub fn n_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn n_citing(&self) -> usize {
        self.offsets.len() - 1
    }

    fn refs_of(&self, a: usize) -> &[u32] {
        &self.targets[self.offsets[a]..self.offsets[a + 1]]
    }

    /// Reference lists per citing node, in slot order.
    pub fn refs(&self) -> Vec<Vec<u32>> {
        (0..self.n_citing()).map(|a| self.refs_of(a).to_vec()).collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.cited_year.len()];
        for &x in &self.targets {
            d[x as usize] += 1;
        }
        d
    }

    /// Per citing node, the sorted cited years of its references.
    pub fn cited_year_profile(&self) -> Vec<Vec<i32>> {
        (0..self.n_citing())
            .map(|a| {
                let mut ys: Vec<i32> =
                    self.refs_of(a).iter().map(|&x| self.cited_year[x as usize]).collect();
                ys.sort_unstable();
                ys
            })
            .collect()
    }

    /// Venue pairs of one citing node, packed as `lo << 32 | hi`.
    pub(crate) fn node_pair_codes(&self, a: usize, venues: &mut Vec<VenueId>, out: &mut Vec<u64>) {
        venues.clear();
        venues.extend(self.refs_of(a).iter().map(|&x| self.cited_venue[x as usize]));
        venue_pairs(venues, self.stratum, |k| out.push(pack(k)));
    }

    /// Sorted `(code, count)` pairs over all citing nodes.
    pub(crate) fn pair_code_counts(&self) -> Vec<(u64, u32)> {
        let mut codes = Vec::new();
        let mut venues = Vec::new();
        for a in 0..self.n_citing() {
            self.node_pair_codes(a, &mut venues, &mut codes);
        }
        codes.sort_unstable();
        let mut out: Vec<(u64, u32)> = Vec::new();
        for c in codes {
            match out.last_mut() {
                Some((last, n)) if *last == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    pub fn pair_counts(&self) -> PairCounts {
        self.pair_code_counts()
            .into_iter()
            .map(|(c, n)| (unpack(c, self.stratum), n))
            .collect()
    }

    /// Randomize in place with `swaps_per_edge * edges` attempted swaps.
    ///
    /// An attempt picks an edge uniformly, then a partner edge uniformly from
    /// the same cited-year stratum, and exchanges their cited endpoints
    /// unless that would create a duplicate citation. Out-degrees,
    /// in-degrees and each citing node's multiset of cited years are
    /// preserved.
    pub fn randomize<R: Rng>(&mut self, rng: &mut R, swaps_per_edge: usize) -> SwapDiagnostics {
        let m = self.targets.len();
        let mut tally = vec![StratumSwaps::default(); self.strata.len()];
        for _ in 0..swaps_per_edge * m {
            let e1 = rng.gen_range(0..m);
            let k = self.slot_stratum[e1] as usize;
            let members = &self.strata[k].1;
            tally[k].attempted += 1;
            if members.len() < 2 {
                continue;
            }
            let e2 = members[rng.gen_range(0..members.len())] as usize;
            let (a, b) = (self.owner[e1] as usize, self.owner[e2] as usize);
            let (x, y) = (self.targets[e1], self.targets[e2]);
            if a == b || x == y || self.refs_of(a).contains(&y) || self.refs_of(b).contains(&x) {
                continue;
            }
            self.targets[e1] = y;
            self.targets[e2] = x;
            tally[k].accepted += 1;
        }
        self.strata
            .iter()
            .zip(tally)
            .map(|((y, _), t)| (*y, t))
            .collect()
    }
}

pub(crate) fn pack(k: JournalPairKey) -> u64 {
    (u64::from(k.venue_lo.0) << 32) | u64::from(k.venue_hi.0)
}

pub(crate) fn unpack(code: u64, stratum: i32) -> JournalPairKey {
    JournalPairKey {
        venue_lo: VenueId((code >> 32) as u32),
        venue_hi: VenueId(code as u32),
        stratum,
    }
}

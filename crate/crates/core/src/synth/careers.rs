//! Constructive first-authored field sequences with a known S-score and
//! windowed behaviour.

use rand::seq::SliceRandom;
use rand::Rng;

/// Dominant field on every even position plus enough odd positions to reach
/// `share * n`; the rest cycles through `secondary`. Every window of ten
/// papers holds at least five dominant ones.
pub(crate) fn hedgehog_sequence<R: Rng>(
    rng: &mut R,
    n: usize,
    dominant: u32,
    secondary: &[u32],
    share: f64,
) -> Vec<u32> {
    let even = n.div_ceil(2);
    let target = ((share * n as f64).round() as usize).clamp(even, n);
    let mut odd: Vec<usize> = (1..n).step_by(2).collect();
    odd.shuffle(rng);
    let extra: std::collections::BTreeSet<usize> = odd.into_iter().take(target - even).collect();
    let mut k = 0;
    (0..n)
        .map(|i| {
            if i % 2 == 0 || extra.contains(&i) {
                dominant
            } else {
                k += 1;
                secondary[(k - 1) % secondary.len()]
            }
        })
        .collect()
}

/// Cycle through `pool` (at least four fields) so no field repeats within
/// any four consecutive papers.
pub(crate) fn fox_sequence(n: usize, pool: &[u32]) -> Vec<u32> {
    (0..n).map(|i| pool[i % pool.len()]).collect()
}

/// A block of `dominant` followed by a fox cycle. For a fox the block is ten
/// papers (`n >= 21`), for a hedgehog it is `ceil(n / 2)` (`n >= 20`), so the
/// first window sits on the hedgehog side and the last on the fox side.
pub(crate) fn crossing_sequence(n: usize, hedgehog: bool, dominant: u32, pool: &[u32]) -> Vec<u32> {
    let block = if hedgehog { n.div_ceil(2) } else { 10 };
    let mut seq = vec![dominant; block];
    seq.extend(fox_sequence(n - block, pool));
    seq
}

pub(crate) fn min_crossing_len(hedgehog: bool) -> usize {
    if hedgehog {
        20
    } else {
        21
    }
}

/// Most frequent value, smallest on ties.
pub(crate) fn mode(seq: &[u32]) -> u32 {
    let mut s = seq.to_vec();
    s.sort_unstable();
    let mut best = (0usize, u32::MAX);
    let mut i = 0;
    while i < s.len() {
        let j = s[i..].iter().take_while(|&&v| v == s[i]).count();
        if j > best.0 {
            best = (j, s[i]);
        }
        i += j;
    }
    best.1
}

//! Citation rewiring that plants disruptive and consolidating papers.
//!
//! A planted paper keeps only focal-only citers: no paper citing it also
//! cites one of its references, so `n_j = 0` and `d > 0` once it has a
//! citer. Every other paper is given consolidating citers (citing it and one
//! of its references) until they are at least a target share of its citers,
//! so `n_j >= n_i` and `d <= 0`. Papers are only ever cited by strictly
//! later papers.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ids::PaperId;

pub(crate) struct Graph {
    pub year: Vec<i32>,
    pub refs: Vec<Vec<u32>>,
    pub citers: Vec<Vec<u32>>,
    pub planted: Vec<bool>,
}

impl Graph {
    pub fn new(year: Vec<i32>, refs: Vec<Vec<u32>>, planted: Vec<bool>) -> Self {
        let mut citers = vec![Vec::new(); year.len()];
        for (c, list) in refs.iter().enumerate() {
            for &r in list {
                citers[r as usize].push(c as u32);
            }
        }
        Self {
            year,
            refs,
            citers,
            planted,
        }
    }

    fn add(&mut self, c: u32, r: u32) {
        self.refs[c as usize].push(r);
        self.citers[r as usize].push(c);
    }

    fn remove(&mut self, c: u32, r: u32) {
        let l = &mut self.refs[c as usize];
        if let Some(i) = l.iter().position(|&v| v == r) {
            l.swap_remove(i);
        }
        let l = &mut self.citers[r as usize];
        if let Some(i) = l.iter().position(|&v| v == c) {
            l.swap_remove(i);
        }
    }

    fn cites_any(&self, c: u32, set: &[u32]) -> bool {
        self.refs[c as usize].iter().any(|r| set.contains(r))
    }

    /// Whether `c -> r` can be added without giving any planted paper a
    /// consolidating citer.
    pub fn can_add(&self, c: u32, r: u32) -> bool {
        let (ci, ri) = (c as usize, r as usize);
        if self.year[ci] <= self.year[ri] || self.refs[ci].contains(&r) {
            return false;
        }
        if self.planted[ri] && self.cites_any(c, &self.refs[ri]) {
            return false;
        }
        // a planted citer must not gain a reference its own citers share
        if self.planted[ci] && self.citers[ci].iter().any(|&x| self.refs[x as usize].contains(&r)) {
            return false;
        }
        self.refs[ci]
            .iter()
            .all(|&q| !self.planted[q as usize] || !self.refs[q as usize].contains(&r))
    }

    /// `(n_i, n_j)` over the direct citers of `p`.
    pub fn citer_split(&self, p: u32) -> (usize, usize) {
        let refs = &self.refs[p as usize];
        let j = self.citers[p as usize]
            .iter()
            .filter(|&&c| self.cites_any(c, refs))
            .count();
        (self.citers[p as usize].len() - j, j)
    }

    /// Drop every citer -> reference edge around `p`.
    pub fn make_disruptive(&mut self, p: u32) {
        let refs = self.refs[p as usize].clone();
        let citers = self.citers[p as usize].clone();
        for c in citers {
            for &r in &refs {
                if self.refs[c as usize].contains(&r) {
                    self.remove(c, r);
                }
            }
        }
    }

    /// Turn focal-only citers of `p` into consolidating ones until they make
    /// up at least `share` of its citers (and never fewer than half).
    pub fn consolidate<R: Rng>(&mut self, rng: &mut R, p: u32, share: f64) {
        let refs = self.refs[p as usize].clone();
        if refs.is_empty() {
            return;
        }
        let total = self.citers[p as usize].len();
        let need = ((share * total as f64).ceil() as usize).max(total.div_ceil(2));
        let (_, mut n_j) = self.citer_split(p);
        if n_j >= need {
            return;
        }
        let focal_only: Vec<u32> = self.citers[p as usize]
            .iter()
            .copied()
            .filter(|&c| !self.cites_any(c, &refs))
            .collect();
        for c in focal_only {
            if n_j >= need {
                break;
            }
            let start = rng.gen_range(0..refs.len());
            let pick = (0..refs.len())
                .map(|k| refs[(start + k) % refs.len()])
                .find(|&r| self.can_add(c, r));
            if let Some(r) = pick {
                self.add(c, r);
                n_j += 1;
            }
        }
    }

    /// Give `p` one citer if it has none, preferring a later paper that
    /// already cites one of its references.
    pub fn ensure_citer<R: Rng>(&mut self, rng: &mut R, p: u32) -> Result<()> {
        let pi = p as usize;
        if !self.citers[pi].is_empty() {
            return Ok(());
        }
        let first_later = self.year.partition_point(|&y| y <= self.year[pi]);
        if first_later == self.year.len() {
            return Err(Error::InsufficientCiters(PaperId(p)));
        }
        if !self.planted[pi] {
            let mut cands: Vec<u32> = self.refs[pi]
                .iter()
                .flat_map(|&r| self.citers[r as usize].iter().copied())
                .filter(|&c| self.year[c as usize] > self.year[pi])
                .collect();
            cands.sort_unstable();
            cands.dedup();
            if let Some(&c) = cands.iter().find(|&&c| self.can_add(c, p)) {
                self.add(c, p);
                return Ok(());
            }
        }
        let n = self.year.len();
        for _ in 0..200 {
            let c = rng.gen_range(first_later..n) as u32;
            if self.can_add(c, p) {
                self.add(c, p);
                return Ok(());
            }
        }
        if let Some(c) = (first_later..n).map(|c| c as u32).find(|&c| self.can_add(c, p)) {
            self.add(c, p);
            return Ok(());
        }
        Err(Error::InsufficientCiters(PaperId(p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// 0 (1990) <- 1 (1991) <- citers 2..7 (1992); citers 2,3 also cite 0.
    fn toy() -> Graph {
        let year = vec![1990, 1991, 1992, 1992, 1992, 1992, 1992, 1992];
        let mut refs = vec![vec![], vec![0]];
        refs.extend([vec![1, 0], vec![1, 0], vec![1], vec![1], vec![1], vec![1]]);
        Graph::new(year, refs, vec![false; 8])
    }

    fn d(g: &Graph, p: u32) -> f64 {
        let (ni, nj) = g.citer_split(p);
        let refs = &g.refs[p as usize];
        let nk = (0..g.year.len() as u32)
            .filter(|&c| c != p && g.year[c as usize] >= g.year[p as usize])
            .filter(|&c| !g.refs[c as usize].contains(&p) && g.cites_any(c, refs))
            .count();
        (ni as f64 - nj as f64) / (ni + nj + nk) as f64
    }

    #[test]
    fn disruptive_planting_gives_unit_d() {
        let mut g = toy();
        g.planted[1] = true;
        g.make_disruptive(1);
        assert_eq!(g.citer_split(1), (6, 0));
        assert_eq!(d(&g, 1), 1.0);
    }

    #[test]
    fn equal_split_gives_zero() {
        let mut g = toy();
        g.consolidate(&mut ChaCha8Rng::seed_from_u64(1), 1, 0.5);
        assert_eq!(g.citer_split(1), (3, 3));
        assert_eq!(d(&g, 1), 0.0);
    }

    #[test]
    fn consolidation_respects_planted_papers() {
        // 8 cites planted 1 and must not pick up 1's reference 0.
        let mut g = toy();
        g.year.push(1993);
        g.refs.push(vec![1]);
        g.citers.push(vec![]);
        g.citers[1].push(8);
        g.planted.push(false);
        g.planted[1] = true;
        g.make_disruptive(1);
        assert!(!g.can_add(8, 0));
        assert!(!g.can_add(0, 1));
    }

    #[test]
    fn ensure_citer_errors_without_later_papers() {
        let mut g = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(g.ensure_citer(&mut rng, 7).is_err());
        g.citers[1].clear();
        for r in g.refs.iter_mut() {
            r.retain(|&v| v != 1);
        }
        g.ensure_citer(&mut rng, 1).unwrap();
        assert_eq!(g.citers[1].len(), 1);
    }
}

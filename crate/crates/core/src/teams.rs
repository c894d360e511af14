//! Team composition per paper, derived from the members' career styles.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, PaperRecord};
use crate::error::{Error, Result};
use crate::ids::{FieldId, PaperId};
use crate::style::{decade_of, CohortPoint, ProfileIndex, Style};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Composition {
    /// Every member is a fox.
    Generalist,
    /// Every member is a hedgehog.
    Specialist,
    Mixed,
    /// At least one member has no profile.
    Ineligible,
}

impl Composition {
    pub fn as_str(self) -> &'static str {
        match self {
            Composition::Generalist => "generalist",
            Composition::Specialist => "specialist",
            Composition::Mixed => "mixed",
            Composition::Ineligible => "ineligible",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "generalist" => Some(Composition::Generalist),
            "specialist" => Some(Composition::Specialist),
            "mixed" => Some(Composition::Mixed),
            "ineligible" => Some(Composition::Ineligible),
            _ => None,
        }
    }

    pub fn is_pure(self) -> bool {
        matches!(self, Composition::Generalist | Composition::Specialist)
    }
}

/// How the fields a team covers are counted.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TeamFieldRule {
    /// Distinct primary fields of the members.
    #[default]
    MemberPrimary,
    /// Union of all members' career fields.
    CareerUnion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamRecord {
    pub paper: PaperId,
    pub composition: Composition,
    pub team_size: usize,
    /// `None` for ineligible teams.
    pub n_team_fields: Option<usize>,
    pub mean_career_age: f64,
    /// `None` for ineligible teams.
    pub fully_overlapping: Option<bool>,
    pub year: i32,
}

impl TeamRecord {
    pub fn is_team(&self) -> bool {
        self.team_size >= 2
    }
}

pub fn team_composition<T>(paper: &PaperRecord, profiles: &ProfileIndex<'_, T>) -> Composition {
    let mut fox = false;
    let mut hedgehog = false;
    for &a in &paper.authors {
        match profiles.get(a).map(|p| p.style) {
            None => return Composition::Ineligible,
            Some(Style::Fox) => fox = true,
            Some(Style::Hedgehog) => hedgehog = true,
        }
    }
    match (fox, hedgehog) {
        (true, false) => Composition::Generalist,
        (false, true) => Composition::Specialist,
        _ => Composition::Mixed,
    }
}

pub fn team_field_count<T>(
    paper: &PaperRecord,
    profiles: &ProfileIndex<'_, T>,
    rule: TeamFieldRule,
) -> Result<usize> {
    let mut fields: Vec<FieldId> = Vec::with_capacity(paper.authors.len());
    for &a in &paper.authors {
        let p = profiles.get(a).ok_or(Error::Unprofiled(a))?;
        match rule {
            TeamFieldRule::MemberPrimary => fields.push(p.primary_field),
            TeamFieldRule::CareerUnion => fields.extend_from_slice(&p.field_set),
        }
    }
    fields.sort_unstable();
    fields.dedup();
    Ok(fields.len())
}

pub fn mean_career_age(paper: &PaperRecord, corpus: &Corpus) -> Result<f64> {
    let mut total = 0i64;
    for &a in &paper.authors {
        let first = corpus.author(a).first_pub_year;
        if first > paper.year {
            return Err(Error::ClockSkew {
                paper: paper.id,
                author: a,
                first_pub_year: first,
                year: paper.year,
            });
        }
        total += i64::from(paper.year - first);
    }
    Ok(total as f64 / paper.authors.len() as f64)
}

/// True when every member has exactly the same set of career fields.
pub fn expertise_overlap<T>(paper: &PaperRecord, profiles: &ProfileIndex<'_, T>) -> Result<bool> {
    let mut sets = paper
        .authors
        .iter()
        .map(|&a| profiles.get(a).map(|p| &p.field_set).ok_or(Error::Unprofiled(a)));
    let first = match sets.next() {
        Some(s) => s?,
        None => return Ok(true),
    };
    for s in sets {
        if s? != first {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One record per paper, in paper id order.
pub fn team_records<T: Sync>(
    corpus: &Corpus,
    profiles: &ProfileIndex<'_, T>,
    rule: TeamFieldRule,
) -> Result<Vec<TeamRecord>> {
    corpus
        .papers()
        .par_iter()
        .map(|paper| {
            let composition = team_composition(paper, profiles);
            let eligible = composition != Composition::Ineligible;
            Ok(TeamRecord {
                paper: paper.id,
                composition,
                team_size: paper.team_size(),
                n_team_fields: if eligible {
                    Some(team_field_count(paper, profiles, rule)?)
                } else {
                    None
                },
                mean_career_age: mean_career_age(paper, corpus)?,
                fully_overlapping: if eligible {
                    Some(expertise_overlap(paper, profiles)?)
                } else {
                    None
                },
                year: paper.year,
            })
        })
        .collect()
}

/// Label counts over multi-author papers.
pub fn composition_counts(records: &[TeamRecord]) -> BTreeMap<Composition, usize> {
    let mut out = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_team()) {
        *out.entry(r.composition).or_default() += 1;
    }
    out
}

/// Per decade of publication, the share of generalist teams among pure
/// (all-fox or all-hedgehog) multi-author teams.
pub fn generalist_team_share_by_decade(records: &[TeamRecord]) -> Vec<CohortPoint> {
    let mut tally: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_team() && r.composition.is_pure()) {
        let e = tally.entry(decade_of(r.year)).or_default();
        e.0 += usize::from(r.composition == Composition::Generalist);
        e.1 += 1;
    }
    tally
        .into_iter()
        .map(|(decade, (g, n))| CohortPoint {
            decade,
            fraction: g as f64 / n as f64,
            n,
        })
        .collect()
}

/// Share of generalist teams whose members have identical career field sets.
pub fn generalist_overlap_share(records: &[TeamRecord]) -> Option<f64> {
    let gen: Vec<_> = records
        .iter()
        .filter(|r| r.is_team() && r.composition == Composition::Generalist)
        .collect();
    if gen.is_empty() {
        return None;
    }
    let overlapping = gen.iter().filter(|r| r.fully_overlapping == Some(true)).count();
    Some(overlapping as f64 / gen.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::AuthorId;
    use crate::style::AuthorProfile;

    fn profile(a: u32, style: Style, primary: u32, fields: &[u32]) -> AuthorProfile<f64> {
        AuthorProfile {
            author: AuthorId(a),
            s_score: if style == Style::Fox { 0.3 } else { 0.8 },
            style,
            n_first_authored: 5,
            distinct_fields: fields.len(),
            first_pub_year: 2000,
            primary_field: FieldId(primary),
            field_set: fields.iter().map(|&f| FieldId(f)).collect(),
            active_decades: vec![2000],
        }
    }

    fn paper(authors: &[u32]) -> PaperRecord {
        PaperRecord {
            id: PaperId(0),
            key: "p".into(),
            year: 2005,
            venue: None,
            authors: authors.iter().map(|&a| AuthorId(a)).collect(),
            field_scores: vec![],
            references: vec![],
            external_references: vec![],
        }
    }

    fn fixture() -> Vec<AuthorProfile<f64>> {
        vec![
            profile(0, Style::Fox, 0, &[0, 1]),
            profile(1, Style::Fox, 1, &[0, 1]),
            profile(2, Style::Fox, 2, &[0, 2]),
            profile(3, Style::Hedgehog, 0, &[0]),
            profile(4, Style::Hedgehog, 0, &[0, 3]),
        ]
    }

    #[test]
    fn composition_labels() {
        let ps = fixture();
        let idx = ProfileIndex::new(&ps, 6);
        assert_eq!(team_composition(&paper(&[0, 1, 2]), &idx), Composition::Generalist);
        assert_eq!(team_composition(&paper(&[0, 3]), &idx), Composition::Mixed);
        assert_eq!(team_composition(&paper(&[3, 4]), &idx), Composition::Specialist);
        assert_eq!(team_composition(&paper(&[3, 5]), &idx), Composition::Ineligible);
    }

    #[test]
    fn field_counts() {
        let ps = fixture();
        let idx = ProfileIndex::new(&ps, 6);
        assert_eq!(team_field_count(&paper(&[0, 1, 2]), &idx, TeamFieldRule::MemberPrimary).unwrap(), 3);
        assert_eq!(team_field_count(&paper(&[0, 3, 4]), &idx, TeamFieldRule::MemberPrimary).unwrap(), 1);
        assert_eq!(team_field_count(&paper(&[0, 2]), &idx, TeamFieldRule::CareerUnion).unwrap(), 3);
        assert!(matches!(
            team_field_count(&paper(&[0, 5]), &idx, TeamFieldRule::MemberPrimary),
            Err(Error::Unprofiled(AuthorId(5)))
        ));
    }

    #[test]
    fn overlap_is_set_equality() {
        let ps = fixture();
        let idx = ProfileIndex::new(&ps, 6);
        assert!(expertise_overlap(&paper(&[0, 1]), &idx).unwrap());
        assert!(!expertise_overlap(&paper(&[0, 2]), &idx).unwrap());
    }

    #[test]
    fn decade_share_counts_pure_teams_only() {
        let rec = |c, size, year| TeamRecord {
            paper: PaperId(0),
            composition: c,
            team_size: size,
            n_team_fields: Some(1),
            mean_career_age: 0.0,
            fully_overlapping: Some(false),
            year,
        };
        let records = vec![
            rec(Composition::Generalist, 2, 1961),
            rec(Composition::Specialist, 3, 1965),
            rec(Composition::Mixed, 2, 1966),
            rec(Composition::Generalist, 1, 1967),
            rec(Composition::Specialist, 2, 2011),
        ];
        let s = generalist_team_share_by_decade(&records);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].decade, s[0].fraction, s[0].n), (1960, 0.5, 2));
        assert_eq!((s[1].decade, s[1].fraction, s[1].n), (2010, 0.0, 1));
    }
}

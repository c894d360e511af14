//! Bibliographic data model: papers, authors, venues, a two-level field
//! taxonomy and the citation index in both directions.
//!
//! A [`Corpus`] is immutable once built. External string ids are interned to
//! dense integers in natural order, so `PaperId` comparisons follow the
//! natural order of the original ids and tie-breaks are reproducible across
//! loads.

mod cache;
mod load;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use cache::{cached_checksum, input_checksum, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use load::{
    input_files, load_corpus, write_csv_bundle, write_jsonl, write_taxonomy, CorpusBuilder,
    RawAuthorship, RawFieldScore, RawTaxon, RawWork, AUTHORSHIPS_FILE, FIELD_SCORES_FILE,
    PAPERS_FILE, REFERENCES_FILE, TAXONOMY_FILE, WORKS_FILE,
};

use crate::error::{Error, Result};
use crate::ids::{AuthorId, FieldId, PaperId, VenueId};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaxonomyLevel {
    /// Coarse level (19 disciplines in the reference taxonomy).
    Discipline,
    /// Fine level (292 fields in the reference taxonomy).
    Field,
}

impl TaxonomyLevel {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "field" | "fields" | "field292" | "1" => Some(TaxonomyLevel::Field),
            "discipline" | "disciplines" | "discipline19" | "0" => Some(TaxonomyLevel::Discipline),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaxonomyLevel::Discipline => "discipline",
            TaxonomyLevel::Field => "field",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyEntry {
    pub id: FieldId,
    pub key: String,
    pub name: String,
    pub level: TaxonomyLevel,
    pub parent: Option<FieldId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldTaxonomy {
    entries: Vec<TaxonomyEntry>,
}

impl FieldTaxonomy {
    /// Entries must be indexed by id. Every field-level entry needs exactly
    /// one discipline-level parent when `require_parents` is set.
    pub fn new(entries: Vec<TaxonomyEntry>, require_parents: bool) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.id.index() != i {
                return Err(Error::Taxonomy(format!("entry `{}` is out of id order", e.key)));
            }
        }
        for e in &entries {
            match (e.level, e.parent) {
                (TaxonomyLevel::Field, Some(p)) => {
                    let parent = entries.get(p.index()).ok_or_else(|| {
                        Error::Taxonomy(format!("field `{}` has a dangling parent", e.key))
                    })?;
                    if parent.level != TaxonomyLevel::Discipline {
                        return Err(Error::Taxonomy(format!(
                            "field `{}` has non-discipline parent `{}`",
                            e.key, parent.key
                        )));
                    }
                }
                (TaxonomyLevel::Field, None) if require_parents => {
                    return Err(Error::Taxonomy(format!("field `{}` has no discipline parent", e.key)));
                }
                (TaxonomyLevel::Discipline, Some(_)) => {
                    return Err(Error::Taxonomy(format!("discipline `{}` has a parent", e.key)));
                }
                _ => {}
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[TaxonomyEntry] {
        &self.entries
    }

    pub fn get(&self, id: FieldId) -> &TaxonomyEntry {
        &self.entries[id.index()]
    }

    pub fn level(&self, id: FieldId) -> TaxonomyLevel {
        self.entries[id.index()].level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count_at(&self, level: TaxonomyLevel) -> usize {
        self.entries.iter().filter(|e| e.level == level).count()
    }

    /// Project a taxonomy node onto `level`.
    pub fn at_level(&self, id: FieldId, level: TaxonomyLevel) -> Result<FieldId> {
        let e = self.get(id);
        match (e.level, level) {
            (a, b) if a == b => Ok(id),
            (TaxonomyLevel::Field, TaxonomyLevel::Discipline) => {
                e.parent.ok_or(Error::MissingParent(id))
            }
            // a discipline cannot be refined into a single field
            _ => Err(Error::MissingParent(id)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: PaperId,
    pub key: String,
    pub year: i32,
    pub venue: Option<VenueId>,
    /// Position 0 is the first author.
    pub authors: Vec<AuthorId>,
    pub field_scores: Vec<(FieldId, f64)>,
    /// Resolved in-corpus references, sorted, no self-reference.
    pub references: Vec<PaperId>,
    /// References to works outside the corpus, kept as raw ids.
    pub external_references: Vec<String>,
}

impl PaperRecord {
    pub fn first_author(&self) -> AuthorId {
        self.authors[0]
    }

    pub fn team_size(&self) -> usize {
        self.authors.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorRecord {
    pub id: AuthorId,
    pub key: String,
    /// Ordered by (year, paper id).
    pub papers: Vec<PaperId>,
    pub first_pub_year: i32,
}

/// Counts collected while ingesting; nothing here aborts a load.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub works_read: usize,
    pub papers_kept: usize,
    pub dropped_no_authors: usize,
    pub dropped_no_fields: usize,
    pub dropped_unknown_fields: usize,
    pub self_references_dropped: usize,
    pub duplicate_references_dropped: usize,
    pub duplicate_authorships_dropped: usize,
    pub external_references: usize,
    pub internal_references: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    authors: Vec<AuthorRecord>,
    venues: Vec<String>,
    taxonomy: FieldTaxonomy,
    citer_offsets: Vec<u32>,
    citers: Vec<PaperId>,
    report: IngestReport,
}

impl Corpus {
    pub(crate) fn assemble(
        papers: Vec<PaperRecord>,
        authors: Vec<AuthorRecord>,
        venues: Vec<String>,
        taxonomy: FieldTaxonomy,
        report: IngestReport,
    ) -> Self {
        let mut counts = vec![0u32; papers.len() + 1];
        for p in &papers {
            for r in &p.references {
                counts[r.index() + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut citers = vec![PaperId(0); *counts.last().unwrap() as usize];
        // papers are visited in id order, so each citer list comes out sorted
        for p in &papers {
            for r in &p.references {
                let slot = &mut fill[r.index()];
                citers[*slot as usize] = p.id;
                *slot += 1;
            }
        }
        Self {
            papers,
            authors,
            venues,
            taxonomy,
            citer_offsets: counts,
            citers,
            report,
        }
    }

    /// Load from disk. `format` is `jsonl` or `csv-bundle`.
    pub fn load(path: &Path, format: InputFormat) -> Result<Self> {
        load_corpus(path, format)
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn paper(&self, id: PaperId) -> &PaperRecord {
        &self.papers[id.index()]
    }

    pub fn authors(&self) -> &[AuthorRecord] {
        &self.authors
    }

    pub fn author(&self, id: AuthorId) -> &AuthorRecord {
        &self.authors[id.index()]
    }

    pub fn venues(&self) -> &[String] {
        &self.venues
    }

    pub fn venue_key(&self, id: VenueId) -> &str {
        &self.venues[id.index()]
    }

    pub fn taxonomy(&self) -> &FieldTaxonomy {
        &self.taxonomy
    }

    pub fn ingest_report(&self) -> &IngestReport {
        &self.report
    }

    pub fn references(&self, id: PaperId) -> &[PaperId] {
        &self.papers[id.index()].references
    }

    pub fn citers(&self, id: PaperId) -> &[PaperId] {
        let lo = self.citer_offsets[id.index()] as usize;
        let hi = self.citer_offsets[id.index() + 1] as usize;
        &self.citers[lo..hi]
    }

    pub fn paper_by_key(&self, key: &str) -> Option<PaperId> {
        // keys are stored in natural order
        self.papers
            .binary_search_by(|p| crate::ids::natural_cmp(&p.key, key))
            .ok()
            .map(PaperId::from_index)
    }

    pub fn author_by_key(&self, key: &str) -> Option<AuthorId> {
        self.authors
            .binary_search_by(|a| crate::ids::natural_cmp(&a.key, key))
            .ok()
            .map(AuthorId::from_index)
    }

    pub fn field_by_key(&self, key: &str) -> Option<FieldId> {
        self.taxonomy
            .entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.id)
    }

    pub fn year_range(&self) -> Option<(i32, i32)> {
        let min = self.papers.iter().map(|p| p.year).min()?;
        let max = self.papers.iter().map(|p| p.year).max()?;
        Some((min, max))
    }

    pub fn n_edges(&self) -> usize {
        self.citers.len()
    }

    /// Primary field of a paper at `level`: argmax of its field-level scores
    /// (smallest id on ties), mapped to the parent discipline when the coarse
    /// level is requested. Papers that only carry discipline scores resolve
    /// at the discipline level only.
    pub fn primary_field(&self, paper: &PaperRecord, level: TaxonomyLevel) -> Result<FieldId> {
        primary_field(paper, &self.taxonomy, level)
    }

    /// Primary field for every paper, `None` where it cannot be resolved.
    pub fn primary_fields(&self, level: TaxonomyLevel) -> Vec<Option<FieldId>> {
        self.papers
            .iter()
            .map(|p| primary_field(p, &self.taxonomy, level).ok())
            .collect()
    }

    /// Papers on which the author is listed first, in (year, paper id) order.
    pub fn first_authored_papers(&self, author: AuthorId) -> Vec<PaperId> {
        self.author(author)
            .papers
            .iter()
            .copied()
            .filter(|&p| self.paper(p).first_author() == author)
            .collect()
    }

    /// Authors who started publishing before `start_before` and have at
    /// least `min_papers` papers in total.
    pub fn eligible_authors(&self, min_papers: usize, start_before: i32) -> BTreeSet<AuthorId> {
        self.authors
            .iter()
            .filter(|a| a.first_pub_year < start_before && a.papers.len() >= min_papers)
            .map(|a| a.id)
            .collect()
    }
}

pub fn primary_field(
    paper: &PaperRecord,
    taxonomy: &FieldTaxonomy,
    level: TaxonomyLevel,
) -> Result<FieldId> {
    let best = |want: TaxonomyLevel| {
        paper
            .field_scores
            .iter()
            .filter(|(f, _)| taxonomy.level(*f) == want)
            .fold(None::<(FieldId, f64)>, |acc, &(f, s)| match acc {
                Some((bf, bs)) if bs > s || (bs == s && bf < f) => Some((bf, bs)),
                _ => Some((f, s)),
            })
            .map(|(f, _)| f)
    };
    match best(TaxonomyLevel::Field) {
        Some(f) => taxonomy.at_level(f, level),
        None if level == TaxonomyLevel::Discipline => {
            best(TaxonomyLevel::Discipline).ok_or(Error::NoField(paper.id))
        }
        None => Err(Error::NoField(paper.id)),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputFormat {
    Jsonl,
    CsvBundle,
}

impl InputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" => Some(InputFormat::Jsonl),
            "csv" | "csv-bundle" | "csv_bundle" => Some(InputFormat::CsvBundle),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::Jsonl => "jsonl",
            InputFormat::CsvBundle => "csv-bundle",
        }
    }
}

//! File ingestion: JSONL (one work per line, OpenAlex-like keys) and the
//! four-file CSV bundle, both with an optional `taxonomy.csv`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    AuthorRecord, Corpus, FieldTaxonomy, IngestReport, InputFormat, PaperRecord, TaxonomyEntry,
    TaxonomyLevel,
};
use crate::error::{Error, Result};
use crate::ids::{AuthorId, FieldId, Interner, PaperId, VenueId};

pub const WORKS_FILE: &str = "works.jsonl";
pub const TAXONOMY_FILE: &str = "taxonomy.csv";
pub const PAPERS_FILE: &str = "papers.csv";
pub const AUTHORSHIPS_FILE: &str = "authorships.csv";
pub const REFERENCES_FILE: &str = "references.csv";
pub const FIELD_SCORES_FILE: &str = "field_scores.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawAuthorship {
    pub author_id: String,
    pub position: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawFieldScore {
    pub id: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
}

/// One work as it appears in a JSONL line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawWork {
    pub id: String,
    pub publication_year: i32,
    #[serde(default)]
    pub venue: Option<String>,
    #[serde(default)]
    pub authorships: Vec<RawAuthorship>,
    #[serde(default)]
    pub referenced_works: Vec<String>,
    #[serde(default)]
    pub fields: Vec<RawFieldScore>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTaxon {
    pub id: String,
    pub name: String,
    pub level: String,
    #[serde(default)]
    pub parent: Option<String>,
}

/// Collects raw records (with their source line) and interns them into a
/// [`Corpus`].
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    source: PathBuf,
    works: Vec<(usize, RawWork)>,
    taxonomy: Option<Vec<RawTaxon>>,
}

impl CorpusBuilder {
    pub fn new(source: impl Into<PathBuf>) -> Self {
        Self {
            source: source.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, line: usize, work: RawWork) {
        self.works.push((line, work));
    }

    pub fn taxonomy(&mut self, taxa: Vec<RawTaxon>) {
        self.taxonomy = Some(taxa);
    }

    pub fn build(self) -> Result<Corpus> {
        let CorpusBuilder {
            source,
            works,
            taxonomy,
        } = self;
        let mut report = IngestReport {
            works_read: works.len(),
            ..Default::default()
        };

        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(works.len());
        for (line, w) in &works {
            if seen.insert(w.id.as_str(), *line).is_some() {
                return Err(Error::DuplicatePaper {
                    path: source.clone(),
                    line: *line,
                    id: w.id.clone(),
                });
            }
            for f in &w.fields {
                if !f.score.is_finite() || !(0.0..=1.0).contains(&f.score) {
                    return Err(Error::Parse {
                        path: source.clone(),
                        line: *line,
                        message: format!("field score {} outside [0, 1]", f.score),
                    });
                }
            }
        }
        drop(seen);

        let taxonomy = build_taxonomy(taxonomy, &works)?;
        let field_lookup: HashMap<&str, FieldId> =
            taxonomy.entries().iter().map(|e| (e.key.as_str(), e.id)).collect();

        let mut kept: Vec<RawWork> = Vec::with_capacity(works.len());
        for (_, mut w) in works {
            let before = w.fields.len();
            w.fields.retain(|f| field_lookup.contains_key(f.id.as_str()));
            report.dropped_unknown_fields += before - w.fields.len();
            if w.authorships.is_empty() {
                report.dropped_no_authors += 1;
            } else if w.fields.is_empty() {
                report.dropped_no_fields += 1;
            } else {
                kept.push(w);
            }
        }

        let paper_ids = Interner::from_keys(kept.iter().map(|w| w.id.clone()));
        let author_ids = Interner::from_keys(
            kept.iter()
                .flat_map(|w| w.authorships.iter().map(|a| a.author_id.clone())),
        );
        let venue_ids = Interner::from_keys(kept.iter().filter_map(|w| w.venue.clone()));
        kept.sort_by_key(|w| paper_ids.get(&w.id).unwrap());

        let mut papers = Vec::with_capacity(kept.len());
        for w in kept {
            let id = PaperId(paper_ids.get(&w.id).unwrap());

            let mut auths = w.authorships;
            auths.sort_by_key(|a| a.position);
            let mut authors: Vec<AuthorId> = Vec::with_capacity(auths.len());
            for a in &auths {
                let aid = AuthorId(author_ids.get(&a.author_id).unwrap());
                if authors.contains(&aid) {
                    report.duplicate_authorships_dropped += 1;
                } else {
                    authors.push(aid);
                }
            }

            let mut field_scores: Vec<(FieldId, f64)> = Vec::with_capacity(w.fields.len());
            for f in &w.fields {
                let fid = field_lookup[f.id.as_str()];
                match field_scores.iter_mut().find(|(g, _)| *g == fid) {
                    Some(slot) => slot.1 = slot.1.max(f.score),
                    None => field_scores.push((fid, f.score)),
                }
            }

            let mut references = Vec::with_capacity(w.referenced_works.len());
            let mut external_references = Vec::new();
            for r in &w.referenced_works {
                if *r == w.id {
                    report.self_references_dropped += 1;
                    continue;
                }
                match paper_ids.get(r) {
                    Some(rid) => references.push(PaperId(rid)),
                    None => {
                        if external_references.contains(r) {
                            report.duplicate_references_dropped += 1;
                        } else {
                            external_references.push(r.clone());
                        }
                    }
                }
            }
            references.sort_unstable();
            let n_before = references.len();
            references.dedup();
            report.duplicate_references_dropped += n_before - references.len();
            report.internal_references += references.len();
            report.external_references += external_references.len();

            papers.push(PaperRecord {
                id,
                key: w.id,
                year: w.publication_year,
                venue: w.venue.as_deref().map(|v| VenueId(venue_ids.get(v).unwrap())),
                authors,
                field_scores,
                references,
                external_references,
            });
        }
        report.papers_kept = papers.len();

        let mut author_papers: Vec<Vec<PaperId>> = vec![Vec::new(); author_ids.len()];
        for p in &papers {
            for a in &p.authors {
                author_papers[a.index()].push(p.id);
            }
        }
        let authors = author_ids
            .into_keys()
            .into_iter()
            .zip(author_papers)
            .enumerate()
            .map(|(i, (key, mut ps))| {
                ps.sort_by_key(|p| (papers[p.index()].year, *p));
                let first_pub_year = papers[ps[0].index()].year;
                AuthorRecord {
                    id: AuthorId::from_index(i),
                    key,
                    papers: ps,
                    first_pub_year,
                }
            })
            .collect();

        Ok(Corpus::assemble(
            papers,
            authors,
            venue_ids.into_keys(),
            taxonomy,
            report,
        ))
    }
}

fn build_taxonomy(
    taxa: Option<Vec<RawTaxon>>,
    works: &[(usize, RawWork)],
) -> Result<FieldTaxonomy> {
    match taxa {
        Some(taxa) => {
            let ids = Interner::from_keys(taxa.iter().map(|t| t.id.clone()));
            if ids.len() != taxa.len() {
                return Err(Error::Taxonomy("duplicate taxonomy ids".into()));
            }
            let mut entries: Vec<Option<TaxonomyEntry>> = vec![None; taxa.len()];
            for t in taxa {
                let level = TaxonomyLevel::parse(&t.level).ok_or_else(|| {
                    Error::Taxonomy(format!("unknown level `{}` for `{}`", t.level, t.id))
                })?;
                let parent = match t.parent.as_deref().map(str::trim) {
                    None | Some("") => None,
                    Some(p) => Some(FieldId(ids.get(p).ok_or_else(|| {
                        Error::Taxonomy(format!("`{}` names unknown parent `{p}`", t.id))
                    })?)),
                };
                let id = FieldId(ids.get(&t.id).unwrap());
                entries[id.index()] = Some(TaxonomyEntry {
                    id,
                    key: t.id,
                    name: t.name,
                    level,
                    parent,
                });
            }
            FieldTaxonomy::new(entries.into_iter().map(Option::unwrap).collect(), true)
        }
        None => {
            // no taxonomy file: a flat taxonomy inferred from the works
            let mut levels: HashMap<String, TaxonomyLevel> = HashMap::new();
            for (_, w) in works {
                for f in &w.fields {
                    let level = f
                        .level
                        .as_deref()
                        .and_then(TaxonomyLevel::parse)
                        .unwrap_or(TaxonomyLevel::Field);
                    levels.entry(f.id.clone()).or_insert(level);
                }
            }
            let ids = Interner::from_keys(levels.keys().cloned());
            let entries = ids
                .into_keys()
                .into_iter()
                .enumerate()
                .map(|(i, key)| TaxonomyEntry {
                    id: FieldId::from_index(i),
                    level: levels[&key],
                    name: key.clone(),
                    key,
                    parent: None,
                })
                .collect();
            FieldTaxonomy::new(entries, false)
        }
    }
}

/// Load a corpus from `path`, a directory holding the format's files (or,
/// for JSONL, the works file itself).
pub fn load_corpus(path: &Path, format: InputFormat) -> Result<Corpus> {
    match format {
        InputFormat::Jsonl => load_jsonl(path),
        InputFormat::CsvBundle => load_csv_bundle(path),
    }
}

/// Files a load of `path` would read, in a fixed order.
pub fn input_files(path: &Path, format: InputFormat) -> Vec<PathBuf> {
    let dir = if path.is_dir() {
        path.to_path_buf()
    } else {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    };
    let mut files = match format {
        InputFormat::Jsonl if path.is_dir() => vec![dir.join(WORKS_FILE)],
        InputFormat::Jsonl => vec![path.to_path_buf()],
        InputFormat::CsvBundle => [PAPERS_FILE, AUTHORSHIPS_FILE, REFERENCES_FILE, FIELD_SCORES_FILE]
            .iter()
            .map(|f| dir.join(f))
            .collect(),
    };
    let tax = dir.join(TAXONOMY_FILE);
    if tax.exists() {
        files.push(tax);
    }
    files
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn load_jsonl(path: &Path) -> Result<Corpus> {
    let (works_path, dir) = if path.is_dir() {
        (path.join(WORKS_FILE), path.to_path_buf())
    } else {
        (
            path.to_path_buf(),
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        )
    };
    let mut builder = CorpusBuilder::new(&works_path);
    let reader = BufReader::new(open(&works_path)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(&works_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let work: RawWork = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: works_path.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        builder.push(i + 1, work);
    }
    let tax = dir.join(TAXONOMY_FILE);
    if tax.exists() {
        builder.taxonomy(read_taxonomy(&tax)?);
    }
    builder.build()
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

fn csv_line(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_cell<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    name: &str,
    path: &Path,
) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: csv_line(rec),
        message: format!("bad {name} `{raw}`"),
    })
}

fn string_cell(rec: &csv::StringRecord, idx: usize, name: &str, path: &Path) -> Result<String> {
    match rec.get(idx) {
        Some(s) if !s.is_empty() => Ok(s.to_string()),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            line: csv_line(rec),
            message: format!("missing {name}"),
        }),
    }
}

fn read_taxonomy(path: &Path) -> Result<Vec<RawTaxon>> {
    let mut out = Vec::new();
    for rec in csv_reader(path)?.records() {
        let rec = rec?;
        let parent = rec.get(3).filter(|s| !s.is_empty()).map(String::from);
        out.push(RawTaxon {
            id: string_cell(&rec, 0, "id", path)?,
            name: rec.get(1).unwrap_or("").to_string(),
            level: string_cell(&rec, 2, "level", path)?,
            parent,
        });
    }
    Ok(out)
}

fn load_csv_bundle(dir: &Path) -> Result<Corpus> {
    let papers_path = dir.join(PAPERS_FILE);
    let mut builder = CorpusBuilder::new(&papers_path);
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut works: Vec<(usize, RawWork)> = Vec::new();

    for rec in csv_reader(&papers_path)?.records() {
        let rec = rec?;
        let id = string_cell(&rec, 0, "paper_id", &papers_path)?;
        let year = parse_cell(&rec, 1, "year", &papers_path)?;
        let venue = rec.get(2).filter(|s| !s.is_empty()).map(String::from);
        let line = csv_line(&rec);
        if index.contains_key(&id) {
            return Err(Error::DuplicatePaper {
                path: papers_path,
                line,
                id,
            });
        }
        index.insert(id.clone(), works.len());
        works.push((
            line,
            RawWork {
                id,
                publication_year: year,
                venue,
                authorships: vec![],
                referenced_works: vec![],
                fields: vec![],
            },
        ));
    }

    let lookup = |rec: &csv::StringRecord, path: &Path| -> Result<usize> {
        let id = string_cell(rec, 0, "paper_id", path)?;
        index.get(&id).copied().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: csv_line(rec),
            message: format!("unknown paper `{id}`"),
        })
    };

    let path = dir.join(AUTHORSHIPS_FILE);
    for rec in csv_reader(&path)?.records() {
        let rec = rec?;
        let w = lookup(&rec, &path)?;
        works[w].1.authorships.push(RawAuthorship {
            author_id: string_cell(&rec, 1, "author_id", &path)?,
            position: parse_cell(&rec, 2, "position", &path)?,
        });
    }
    let path = dir.join(REFERENCES_FILE);
    for rec in csv_reader(&path)?.records() {
        let rec = rec?;
        let w = lookup(&rec, &path)?;
        works[w]
            .1
            .referenced_works
            .push(string_cell(&rec, 1, "referenced_id", &path)?);
    }
    let path = dir.join(FIELD_SCORES_FILE);
    for rec in csv_reader(&path)?.records() {
        let rec = rec?;
        let w = lookup(&rec, &path)?;
        works[w].1.fields.push(RawFieldScore {
            id: string_cell(&rec, 1, "field_id", &path)?,
            score: parse_cell(&rec, 2, "score", &path)?,
            level: rec.get(3).filter(|s| !s.is_empty()).map(String::from),
        });
    }

    for (line, w) in works {
        builder.push(line, w);
    }
    let tax = dir.join(TAXONOMY_FILE);
    if tax.exists() {
        builder.taxonomy(read_taxonomy(&tax)?);
    }
    builder.build()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Write works as JSONL plus `taxonomy.csv` into `dir`.
pub fn write_jsonl(dir: &Path, works: &[RawWork], taxonomy: &[RawTaxon]) -> Result<()> {
    let path = dir.join(WORKS_FILE);
    let mut out = create(&path)?;
    for w in works {
        serde_json::to_writer(&mut out, w)?;
        out.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
    }
    out.flush().map_err(|e| Error::io(&path, e))?;
    write_taxonomy(dir, taxonomy)
}

pub fn write_taxonomy(dir: &Path, taxonomy: &[RawTaxon]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(&dir.join(TAXONOMY_FILE))?);
    w.write_record(["id", "name", "level", "parent"])?;
    for t in taxonomy {
        w.write_record([
            t.id.as_str(),
            t.name.as_str(),
            t.level.as_str(),
            t.parent.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir, e))?;
    Ok(())
}

/// Write works as the four-file CSV bundle plus `taxonomy.csv` into `dir`.
pub fn write_csv_bundle(dir: &Path, works: &[RawWork], taxonomy: &[RawTaxon]) -> Result<()> {
    let mut papers = csv::Writer::from_writer(create(&dir.join(PAPERS_FILE))?);
    let mut auths = csv::Writer::from_writer(create(&dir.join(AUTHORSHIPS_FILE))?);
    let mut refs = csv::Writer::from_writer(create(&dir.join(REFERENCES_FILE))?);
    let mut fields = csv::Writer::from_writer(create(&dir.join(FIELD_SCORES_FILE))?);
    papers.write_record(["paper_id", "year", "venue"])?;
    auths.write_record(["paper_id", "author_id", "position"])?;
    refs.write_record(["paper_id", "referenced_id"])?;
    fields.write_record(["paper_id", "field_id", "score", "level"])?;
    for w in works {
        let year = w.publication_year.to_string();
        papers.write_record([&w.id, &year, w.venue.as_deref().unwrap_or("")])?;
        for a in &w.authorships {
            auths.write_record([&w.id, &a.author_id, &a.position.to_string()])?;
        }
        for r in &w.referenced_works {
            refs.write_record([&w.id, r])?;
        }
        for f in &w.fields {
            fields.write_record([
                w.id.as_str(),
                f.id.as_str(),
                &f.score.to_string(),
                f.level.as_deref().unwrap_or(""),
            ])?;
        }
    }
    for w in [&mut papers, &mut auths, &mut refs, &mut fields] {
        w.flush().map_err(|e| Error::io(dir, e))?;
    }
    write_taxonomy(dir, taxonomy)
}

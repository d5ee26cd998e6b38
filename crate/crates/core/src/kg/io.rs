//! TSV ingestion and export.
//!
//! All formats are UTF-8, tab-separated, one record per line. Lines that are
//! blank or start with `#` are skipped. Entity and relation tokens may be
//! arbitrary strings; they are interned to dense 0-based indices. When every
//! token of a vocabulary is a canonical decimal integer the tokens are used
//! as indices directly (so index files round-trip exactly, including gaps);
//! otherwise first-seen order defines the interning.
//!
//! The entity universe of a side is defined by its data files (triples,
//! attributes, visuals). Seed files never extend it: a seed token unknown to
//! the data files is a dangling reference.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::LoadError;

use super::{
    AttributeInstance, EntityId, KnowledgeGraph, RelationTriple, SeedAlignment, Side,
    VisualEmbeddingSet,
};

type LoadResult<T> = std::result::Result<T, LoadError>;

/// Final token-to-index mapping for one vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenTable {
    /// Every token was a canonical decimal integer; tokens map to their
    /// numeric value and the count covers the largest index seen.
    Numeric { count: usize },
    /// Tokens interned in first-seen order.
    Interned {
        tokens: Vec<String>,
        lookup: HashMap<String, usize>,
    },
}

impl TokenTable {
    pub fn numeric(count: usize) -> Self {
        TokenTable::Numeric { count }
    }

    pub fn count(&self) -> usize {
        match self {
            TokenTable::Numeric { count } => *count,
            TokenTable::Interned { tokens, .. } => tokens.len(),
        }
    }

    pub fn resolve(&self, token: &str) -> Option<usize> {
        match self {
            TokenTable::Numeric { count } => {
                let v = parse_canonical_index(token)?;
                (v < *count).then_some(v)
            }
            TokenTable::Interned { lookup, .. } => lookup.get(token).copied(),
        }
    }

    /// Original token for an index (used in report output).
    pub fn token(&self, index: usize) -> String {
        match self {
            TokenTable::Numeric { .. } => index.to_string(),
            TokenTable::Interned { tokens, .. } => tokens
                .get(index)
                .cloned()
                .unwrap_or_else(|| index.to_string()),
        }
    }
}

fn parse_canonical_index(token: &str) -> Option<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if token.len() > 1 && token.starts_with('0') {
        return None;
    }
    token.parse().ok()
}

/// Accumulates tokens for one vocabulary before the mapping is decided.
#[derive(Debug, Default)]
struct VocabBuilder {
    order: Vec<String>,
    seen: HashSet<String>,
    all_numeric: bool,
    max_numeric: usize,
    empty: bool,
}

impl VocabBuilder {
    fn new() -> Self {
        VocabBuilder {
            all_numeric: true,
            empty: true,
            ..Default::default()
        }
    }

    fn add(&mut self, token: &str) {
        self.empty = false;
        if self.all_numeric {
            match parse_canonical_index(token) {
                Some(v) => self.max_numeric = self.max_numeric.max(v),
                None => self.all_numeric = false,
            }
        }
        if !self.seen.contains(token) {
            self.seen.insert(token.to_string());
            self.order.push(token.to_string());
        }
    }

    fn build(self) -> TokenTable {
        if self.empty {
            return TokenTable::Numeric { count: 0 };
        }
        if self.all_numeric {
            TokenTable::Numeric {
                count: self.max_numeric + 1,
            }
        } else {
            let lookup = self
                .order
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i))
                .collect();
            TokenTable::Interned {
                tokens: self.order,
                lookup,
            }
        }
    }
}

/// Iterate data lines of a file with their 1-based line numbers, skipping
/// blanks and `#` comments.
fn read_data_lines(path: &Path) -> LoadResult<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.push((idx + 1, line.to_string()));
    }
    Ok(out)
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn split_fields<'a>(
    path: &Path,
    line_no: usize,
    line: &'a str,
    expected: usize,
) -> LoadResult<Vec<&'a str>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != expected {
        return Err(parse_err(
            path,
            line_no,
            format!("expected {expected} tab-separated fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_finite(path: &Path, line_no: usize, token: &str, what: &str) -> LoadResult<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(path, line_no, format!("{what} `{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(
            path,
            line_no,
            format!("{what} `{token}` is not finite"),
        ));
    }
    Ok(v)
}

fn parse_vector(path: &Path, line_no: usize, field: &str) -> LoadResult<Vec<f64>> {
    field
        .split(',')
        .map(|t| parse_finite(path, line_no, t, "component"))
        .collect()
}

// ---------------------------------------------------------------------------
// Raw per-file parsing (tokens unresolved)
// ---------------------------------------------------------------------------

fn parse_triple_rows(path: &Path) -> LoadResult<Vec<(String, String, String)>> {
    read_data_lines(path)?
        .into_iter()
        .map(|(n, line)| {
            let f = split_fields(path, n, &line, 3)?;
            Ok((f[0].to_string(), f[1].to_string(), f[2].to_string()))
        })
        .collect()
}

fn parse_attr_rows(path: &Path) -> LoadResult<Vec<(String, String, f64)>> {
    read_data_lines(path)?
        .into_iter()
        .map(|(n, line)| {
            let f = split_fields(path, n, &line, 3)?;
            if f[1].is_empty() {
                return Err(parse_err(path, n, "empty attribute name"));
            }
            let value = parse_finite(path, n, f[2], "attribute value")?;
            Ok((f[0].to_string(), f[1].to_string(), value))
        })
        .collect()
}

fn parse_visual_rows(
    path: &Path,
    expected_dim: Option<usize>,
) -> LoadResult<Vec<(String, Vec<f64>)>> {
    let mut rows = Vec::new();
    let mut dim: Option<(usize, usize)> = expected_dim.map(|d| (d, 0));
    for (n, line) in read_data_lines(path)? {
        let f = split_fields(path, n, &line, 2)?;
        let vec = parse_vector(path, n, f[1])?;
        match dim {
            None => dim = Some((vec.len(), n)),
            Some((d, _)) if d != vec.len() => {
                return Err(LoadError::DimensionMismatch {
                    path: path.to_path_buf(),
                    line: n,
                    expected: d,
                    found: vec.len(),
                })
            }
            _ => {}
        }
        rows.push((f[0].to_string(), vec));
    }
    Ok(rows)
}

fn parse_seed_rows(path: &Path) -> LoadResult<Vec<(String, String)>> {
    read_data_lines(path)?
        .into_iter()
        .map(|(n, line)| {
            let f = split_fields(path, n, &line, 2)?;
            Ok((f[0].to_string(), f[1].to_string()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Standalone loaders (single file, self-contained vocabulary)
// ---------------------------------------------------------------------------

/// Triples plus the interning tables built from one file.
#[derive(Debug, Clone)]
pub struct TriplesFile {
    pub triples: Vec<RelationTriple>,
    pub entity_count: usize,
    pub relation_count: usize,
    pub entities: TokenTable,
    pub relations: TokenTable,
}

/// Load a `head \t relation \t tail` file with a vocabulary local to it.
pub fn load_triples(path: impl AsRef<Path>, side: Side) -> LoadResult<TriplesFile> {
    let path = path.as_ref();
    let rows = parse_triple_rows(path)?;
    let mut entities = VocabBuilder::new();
    let mut relations = VocabBuilder::new();
    for (h, r, t) in &rows {
        entities.add(h);
        entities.add(t);
        relations.add(r);
    }
    let entities = entities.build();
    let relations = relations.build();
    let triples = rows
        .iter()
        .map(|(h, r, t)| RelationTriple {
            head: EntityId::new(side, entities.resolve(h).expect("token from same file")),
            relation: relations.resolve(r).expect("token from same file"),
            tail: EntityId::new(side, entities.resolve(t).expect("token from same file")),
        })
        .collect();
    Ok(TriplesFile {
        triples,
        entity_count: entities.count(),
        relation_count: relations.count(),
        entities,
        relations,
    })
}

/// Load an `entity \t name \t value` file. Entity tokens resolve through the
/// given table.
pub fn load_attributes(
    path: impl AsRef<Path>,
    side: Side,
    entities: &TokenTable,
) -> LoadResult<Vec<AttributeInstance>> {
    let path = path.as_ref();
    parse_attr_rows(path)?
        .into_iter()
        .map(|(ent, name, value)| {
            let index = entities.resolve(&ent).ok_or_else(|| {
                parse_err(path, 0, format!("unknown entity token `{ent}`"))
            })?;
            Ok(AttributeInstance {
                entity: EntityId::new(side, index),
                name_token: name,
                value,
            })
        })
        .collect()
}

/// Load an `entity \t v1,v2,...,vd` file, grouping rows by entity.
/// Entities absent from the file simply have no entry in the returned map.
pub fn load_visual_embeddings(
    path: impl AsRef<Path>,
    side: Side,
    entities: &TokenTable,
    expected_dim: Option<usize>,
) -> LoadResult<BTreeMap<usize, VisualEmbeddingSet>> {
    let path = path.as_ref();
    let rows = parse_visual_rows(path, expected_dim)?;
    let mut out: BTreeMap<usize, VisualEmbeddingSet> = BTreeMap::new();
    for (ent, vec) in rows {
        let index = entities
            .resolve(&ent)
            .ok_or_else(|| parse_err(path, 0, format!("unknown entity token `{ent}`")))?;
        out.entry(index)
            .or_insert_with(|| VisualEmbeddingSet {
                entity: EntityId::new(side, index),
                vectors: Vec::new(),
            })
            .vectors
            .push(vec);
    }
    Ok(out)
}

/// Load a `source \t target` seed file. Exact duplicate pairs are dropped,
/// keeping first occurrence order. A token unknown to either side's entity
/// table is a dangling reference and fails the load.
pub fn load_seeds(
    path: impl AsRef<Path>,
    source_entities: &TokenTable,
    target_entities: &TokenTable,
) -> LoadResult<Vec<SeedAlignment>> {
    let path = path.as_ref();
    let rows = parse_seed_rows(path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (s, t) in rows {
        let si = source_entities
            .resolve(&s)
            .ok_or(LoadError::DanglingSeed {
                side: "source",
                token: s.clone(),
            })?;
        let ti = target_entities
            .resolve(&t)
            .ok_or(LoadError::DanglingSeed {
                side: "target",
                token: t.clone(),
            })?;
        if seen.insert((si, ti)) {
            out.push(SeedAlignment::new(si, ti));
        }
    }
    Ok(out)
}

/// Load a `name_token \t f1,f2,...,fd` file of precomputed attribute-name
/// embeddings.
pub fn load_name_embeddings(path: impl AsRef<Path>) -> LoadResult<BTreeMap<String, Vec<f64>>> {
    let path = path.as_ref();
    let mut out = BTreeMap::new();
    let mut dim: Option<usize> = None;
    for (n, line) in read_data_lines(path)? {
        let f = split_fields(path, n, &line, 2)?;
        let vec = parse_vector(path, n, f[1])?;
        match dim {
            None => dim = Some(vec.len()),
            Some(d) if d != vec.len() => {
                return Err(LoadError::DimensionMismatch {
                    path: path.to_path_buf(),
                    line: n,
                    expected: d,
                    found: vec.len(),
                })
            }
            _ => {}
        }
        out.insert(f[0].to_string(), vec);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Whole-dataset loading with shared vocabularies
// ---------------------------------------------------------------------------

/// File locations for one graph pair.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct DatasetPaths {
    pub triples_source: PathBuf,
    pub triples_target: PathBuf,
    #[serde(default)]
    pub attrs_source: Option<PathBuf>,
    #[serde(default)]
    pub attrs_target: Option<PathBuf>,
    #[serde(default)]
    pub visuals_source: Option<PathBuf>,
    #[serde(default)]
    pub visuals_target: Option<PathBuf>,
    pub seeds: PathBuf,
    #[serde(default)]
    pub name_embeddings: Option<PathBuf>,
}

/// A loaded graph pair with its interning tables.
#[derive(Debug, Clone)]
pub struct DatasetFiles {
    pub source: KnowledgeGraph,
    pub target: KnowledgeGraph,
    pub seeds: Vec<SeedAlignment>,
    pub source_entities: TokenTable,
    pub target_entities: TokenTable,
    pub source_relations: TokenTable,
    pub target_relations: TokenTable,
    pub name_embeddings: Option<BTreeMap<String, Vec<f64>>>,
}

impl DatasetFiles {
    /// Load all files of a pair, sharing one entity vocabulary per side
    /// across triples, attributes, and visuals.
    ///
    /// Seeds never extend the vocabularies; a seed token the data files do
    /// not know receives a deliberately out-of-range index so that
    /// validation can report it as dangling instead of aborting the load.
    pub fn load(paths: &DatasetPaths) -> LoadResult<Self> {
        let triples_s = parse_triple_rows(&paths.triples_source)?;
        let triples_t = parse_triple_rows(&paths.triples_target)?;
        let attrs_s = match &paths.attrs_source {
            Some(p) => parse_attr_rows(p)?,
            None => Vec::new(),
        };
        let attrs_t = match &paths.attrs_target {
            Some(p) => parse_attr_rows(p)?,
            None => Vec::new(),
        };
        let visuals_s = match &paths.visuals_source {
            Some(p) => parse_visual_rows(p, None)?,
            None => Vec::new(),
        };
        let visuals_t = match &paths.visuals_target {
            Some(p) => parse_visual_rows(p, None)?,
            None => Vec::new(),
        };
        let seeds = parse_seed_rows(&paths.seeds)?;
        let name_embeddings = match &paths.name_embeddings {
            Some(p) => Some(load_name_embeddings(p)?),
            None => None,
        };

        let build_side = |triples: &[(String, String, String)],
                          attrs: &[(String, String, f64)],
                          visuals: &[(String, Vec<f64>)]|
         -> (TokenTable, TokenTable) {
            let mut entities = VocabBuilder::new();
            let mut relations = VocabBuilder::new();
            for (h, r, t) in triples {
                entities.add(h);
                entities.add(t);
                relations.add(r);
            }
            for (e, _, _) in attrs {
                entities.add(e);
            }
            for (e, _) in visuals {
                entities.add(e);
            }
            (entities.build(), relations.build())
        };

        let (ent_s, rel_s) = build_side(&triples_s, &attrs_s, &visuals_s);
        let (ent_t, rel_t) = build_side(&triples_t, &attrs_t, &visuals_t);

        let source = materialize(Side::Source, &ent_s, &rel_s, &triples_s, &attrs_s, &visuals_s);
        let target = materialize(Side::Target, &ent_t, &rel_t, &triples_t, &attrs_t, &visuals_t);

        // Lenient seed resolution: unknown tokens map past the entity count.
        let mut resolved = Vec::new();
        let mut seen = HashSet::new();
        let mut overflow_s = source.entity_count;
        let mut overflow_t = target.entity_count;
        for (s, t) in &seeds {
            let si = resolve_lenient(&ent_s, s, &mut overflow_s);
            let ti = resolve_lenient(&ent_t, t, &mut overflow_t);
            if seen.insert((si, ti)) {
                resolved.push(SeedAlignment::new(si, ti));
            }
        }

        Ok(DatasetFiles {
            source,
            target,
            seeds: resolved,
            source_entities: ent_s,
            target_entities: ent_t,
            source_relations: rel_s,
            target_relations: rel_t,
            name_embeddings,
        })
    }
}

fn resolve_lenient(table: &TokenTable, token: &str, overflow: &mut usize) -> usize {
    if let Some(i) = table.resolve(token) {
        return i;
    }
    // Numeric tokens keep their value so the report names the real index.
    if let (TokenTable::Numeric { .. }, Some(v)) = (table, parse_canonical_index(token)) {
        return v;
    }
    let i = *overflow;
    *overflow += 1;
    i
}

fn materialize(
    side: Side,
    entities: &TokenTable,
    relations: &TokenTable,
    triples: &[(String, String, String)],
    attrs: &[(String, String, f64)],
    visuals: &[(String, Vec<f64>)],
) -> KnowledgeGraph {
    let resolve = |t: &str| entities.resolve(t).expect("token collected from same files");
    let triples: Vec<RelationTriple> = triples
        .iter()
        .map(|(h, r, t)| RelationTriple {
            head: EntityId::new(side, resolve(h)),
            relation: relations.resolve(r).expect("relation from same files"),
            tail: EntityId::new(side, resolve(t)),
        })
        .collect();
    let attributes = attrs
        .iter()
        .map(|(e, name, value)| AttributeInstance {
            entity: EntityId::new(side, resolve(e)),
            name_token: name.clone(),
            value: *value,
        })
        .collect();
    let mut visual_map: BTreeMap<usize, VisualEmbeddingSet> = BTreeMap::new();
    for (e, vec) in visuals {
        let index = resolve(e);
        visual_map
            .entry(index)
            .or_insert_with(|| VisualEmbeddingSet {
                entity: EntityId::new(side, index),
                vectors: Vec::new(),
            })
            .vectors
            .push(vec.clone());
    }
    KnowledgeGraph {
        side,
        entity_count: entities.count(),
        relation_count: relations.count(),
        triples,
        attributes,
        visuals: visual_map,
    }
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// File names used by the synthetic generator and graph writers.
pub fn side_file_names(side: Side) -> (&'static str, &'static str, &'static str) {
    match side {
        Side::Source => ("source_triples.tsv", "source_attrs.tsv", "source_visuals.tsv"),
        Side::Target => ("target_triples.tsv", "target_attrs.tsv", "target_visuals.tsv"),
    }
}

/// Write one graph's triples, attributes, and visuals under `dir` using
/// numeric tokens, so a reload reproduces the same indices.
pub fn write_graph(dir: &Path, kg: &KnowledgeGraph) -> std::io::Result<()> {
    let (triples_name, attrs_name, visuals_name) = side_file_names(kg.side);

    let mut triples = String::new();
    for t in &kg.triples {
        let _ = writeln!(triples, "{}\t{}\t{}", t.head.index, t.relation, t.tail.index);
    }
    std::fs::write(dir.join(triples_name), triples)?;

    let mut attrs = String::new();
    for a in &kg.attributes {
        let _ = writeln!(attrs, "{}\t{}\t{}", a.entity.index, a.name_token, a.value);
    }
    std::fs::write(dir.join(attrs_name), attrs)?;

    let mut visuals = String::new();
    for set in kg.visuals.values() {
        for vec in &set.vectors {
            let fields: Vec<String> = vec.iter().map(f64::to_string).collect();
            let _ = writeln!(visuals, "{}\t{}", set.entity.index, fields.join(","));
        }
    }
    std::fs::write(dir.join(visuals_name), visuals)?;
    Ok(())
}

pub fn write_seeds(path: &Path, seeds: &[SeedAlignment]) -> std::io::Result<()> {
    let mut out = String::new();
    for s in seeds {
        let _ = writeln!(out, "{}\t{}", s.source.index, s.target.index);
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn triples_parse_with_numeric_entities_and_interned_relations() {
        let f = write_tmp("0\tr0\t1\n1\tr0\t2\n");
        let loaded = load_triples(f.path(), Side::Source).unwrap();
        assert_eq!(loaded.triples.len(), 2);
        assert_eq!(loaded.relation_count, 1);
        assert_eq!(loaded.entity_count, 3);
        assert_eq!(loaded.triples[0].head.index, 0);
        assert_eq!(loaded.triples[1].tail.index, 2);
    }

    #[test]
    fn triples_wrong_field_count_reports_line() {
        let f = write_tmp("0\tr0\n");
        let err = load_triples(f.path(), Side::Source).unwrap_err();
        assert!(err.to_string().contains(":1:"), "{err}");
    }

    #[test]
    fn string_tokens_intern_densely_in_first_seen_order() {
        let f = write_tmp("/m/02x\tborn_in\t/m/07y\n/m/07y\tborn_in\t/m/02x\n/m/0aa\tlives\t/m/02x\n");
        let loaded = load_triples(f.path(), Side::Source).unwrap();
        assert_eq!(loaded.entity_count, 3);
        assert_eq!(loaded.relation_count, 2);
        // independent oracle: unique tokens in first-seen order
        assert_eq!(loaded.entities.resolve("/m/02x"), Some(0));
        assert_eq!(loaded.entities.resolve("/m/07y"), Some(1));
        assert_eq!(loaded.entities.resolve("/m/0aa"), Some(2));
        assert_eq!(loaded.entities.token(1), "/m/07y");
    }

    #[test]
    fn empty_triples_file_is_valid() {
        let f = write_tmp("# only comments\n\n");
        let loaded = load_triples(f.path(), Side::Source).unwrap();
        assert!(loaded.triples.is_empty());
        assert_eq!(loaded.entity_count, 0);
    }

    #[test]
    fn attributes_parse_in_file_order() {
        let f = write_tmp("0\theight\t180.0\n1\twidth\t2.5\n0\tage\t41\n");
        let table = TokenTable::numeric(2);
        let attrs = load_attributes(f.path(), Side::Source, &table).unwrap();
        assert_eq!(attrs.len(), 3);
        assert_eq!(attrs[0].entity.index, 0);
        assert_eq!(attrs[0].name_token, "height");
        assert_eq!(attrs[0].value, 180.0);
        assert_eq!(attrs[2].name_token, "age");
    }

    #[test]
    fn attribute_nan_value_is_rejected() {
        let f = write_tmp("0\theight\tNaN\n");
        let table = TokenTable::numeric(1);
        assert!(load_attributes(f.path(), Side::Source, &table).is_err());
    }

    #[test]
    fn attribute_non_numeric_value_is_rejected() {
        let f = write_tmp("0\theight\ttall\n");
        let table = TokenTable::numeric(1);
        assert!(load_attributes(f.path(), Side::Source, &table).is_err());
    }

    #[test]
    fn visuals_group_by_entity() {
        let f = write_tmp("0\t1.0,0.0,0.0,0.5\n0\t0.0,1.0,0.0,0.5\n1\t0.2,0.2,0.2,0.2\n");
        let table = TokenTable::numeric(2);
        let map = load_visual_embeddings(f.path(), Side::Source, &table, None).unwrap();
        assert_eq!(map[&0].vectors.len(), 2);
        assert_eq!(map[&1].vectors.len(), 1);
    }

    #[test]
    fn visual_dimension_mismatch_names_dims_and_line() {
        let f = write_tmp("0\t1.0,2.0,3.0,4.0\n1\t1.0,2.0,3.0\n");
        let table = TokenTable::numeric(2);
        let err = load_visual_embeddings(f.path(), Side::Source, &table, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('4') && msg.contains('3') && msg.contains(":2"), "{msg}");
    }

    #[test]
    fn seeds_dedup_and_preserve_order() {
        let f = write_tmp("0\t0\n1\t2\n0\t0\n");
        let table = TokenTable::numeric(3);
        let seeds = load_seeds(f.path(), &table, &table).unwrap();
        assert_eq!(seeds.len(), 2);
        assert_eq!(seeds[0], SeedAlignment::new(0, 0));
        assert_eq!(seeds[1], SeedAlignment::new(1, 2));
    }

    #[test]
    fn dangling_seed_is_an_error() {
        let f = write_tmp("999\t0\n");
        let table = TokenTable::numeric(10);
        assert!(matches!(
            load_seeds(f.path(), &table, &table),
            Err(LoadError::DanglingSeed { side: "source", .. })
        ));
    }

    #[test]
    fn graph_write_reload_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let kg = KnowledgeGraph {
            side: Side::Source,
            entity_count: 3,
            relation_count: 2,
            triples: vec![
                RelationTriple {
                    head: EntityId::new(Side::Source, 0),
                    relation: 1,
                    tail: EntityId::new(Side::Source, 2),
                },
                RelationTriple {
                    head: EntityId::new(Side::Source, 2),
                    relation: 0,
                    tail: EntityId::new(Side::Source, 1),
                },
            ],
            attributes: vec![AttributeInstance {
                entity: EntityId::new(Side::Source, 1),
                name_token: "height".into(),
                value: 1.0 / 3.0,
            }],
            visuals: BTreeMap::from([(
                2,
                VisualEmbeddingSet {
                    entity: EntityId::new(Side::Source, 2),
                    vectors: vec![vec![0.1, -0.25], vec![std::f64::consts::PI, 1e-17]],
                },
            )]),
        };
        write_graph(dir.path(), &kg).unwrap();

        let triples = load_triples(dir.path().join("source_triples.tsv"), Side::Source).unwrap();
        let attrs = load_attributes(
            dir.path().join("source_attrs.tsv"),
            Side::Source,
            &TokenTable::numeric(3),
        )
        .unwrap();
        let visuals = load_visual_embeddings(
            dir.path().join("source_visuals.tsv"),
            Side::Source,
            &TokenTable::numeric(3),
            None,
        )
        .unwrap();
        assert_eq!(triples.triples, kg.triples);
        assert_eq!(triples.entity_count, 3);
        assert_eq!(attrs, kg.attributes);
        assert_eq!(visuals, kg.visuals);
    }
}

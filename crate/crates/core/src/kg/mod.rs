//! Knowledge-graph data model, file ingestion, seed splitting, and the
//! synthetic twin-graph generator.

pub mod io;
pub mod split;
pub mod synth;
pub mod validate;

use std::collections::BTreeMap;

pub use io::{
    load_attributes, load_seeds, load_triples, load_visual_embeddings, DatasetFiles,
    DatasetPaths, TokenTable, TriplesFile,
};
pub use split::split_seeds;
pub use synth::{generate_synthetic_pair, SynthConfig};
pub use validate::{validate_pair, ValidationIssue, ValidationReport};

/// Which of the two graphs an id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Source => "source",
            Side::Target => "target",
        }
    }
}

/// Dense, 0-based entity index scoped to one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    pub side: Side,
    pub index: usize,
}

impl EntityId {
    pub fn new(side: Side, index: usize) -> Self {
        EntityId { side, index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationTriple {
    pub head: EntityId,
    pub relation: usize,
    pub tail: EntityId,
}

/// One `(entity, name token, numeric value)` record.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeInstance {
    pub entity: EntityId,
    pub name_token: String,
    pub value: f64,
}

/// All image embeddings attached to one entity. May be empty, which marks
/// the visual modality as missing and triggers neighbor imputation.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualEmbeddingSet {
    pub entity: EntityId,
    pub vectors: Vec<Vec<f64>>,
}

impl VisualEmbeddingSet {
    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    pub side: Side,
    pub entity_count: usize,
    pub relation_count: usize,
    pub triples: Vec<RelationTriple>,
    pub attributes: Vec<AttributeInstance>,
    pub visuals: BTreeMap<usize, VisualEmbeddingSet>,
}

impl KnowledgeGraph {
    pub fn empty(side: Side, entity_count: usize) -> Self {
        KnowledgeGraph {
            side,
            entity_count,
            relation_count: 0,
            triples: Vec::new(),
            attributes: Vec::new(),
            visuals: BTreeMap::new(),
        }
    }

    /// Dimension of visual embeddings, if any entity carries one.
    pub fn visual_dim(&self) -> Option<usize> {
        self.visuals.values().find_map(VisualEmbeddingSet::dim)
    }

    /// Number of entities with at least one image vector.
    pub fn entities_with_visuals(&self) -> usize {
        self.visuals
            .values()
            .filter(|s| !s.vectors.is_empty())
            .count()
    }
}

/// A known ground-truth pair between the two graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeedAlignment {
    pub source: EntityId,
    pub target: EntityId,
}

impl SeedAlignment {
    pub fn new(source_index: usize, target_index: usize) -> Self {
        SeedAlignment {
            source: EntityId::new(Side::Source, source_index),
            target: EntityId::new(Side::Target, target_index),
        }
    }
}

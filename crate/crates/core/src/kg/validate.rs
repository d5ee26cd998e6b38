//! Structural validation of a graph pair and its seeds.

use std::collections::{BTreeMap, HashSet};

use super::{KnowledgeGraph, SeedAlignment, Side};

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    DanglingEntity {
        side: Side,
        index: usize,
        context: String,
    },
    DanglingRelation {
        side: Side,
        relation: usize,
        context: String,
    },
    WrongSide {
        expected: Side,
        found: Side,
        context: String,
    },
    DimensionMismatch {
        side: Side,
        entity: usize,
        expected: usize,
        found: usize,
    },
    NonFiniteValue {
        side: Side,
        context: String,
    },
    EmptyName {
        side: Side,
        entity: usize,
    },
    DuplicateSeed {
        source: usize,
        target: usize,
    },
    DuplicateSeedSource {
        source: usize,
    },
}

impl ValidationIssue {
    pub fn category(&self) -> &'static str {
        match self {
            ValidationIssue::DanglingEntity { .. } | ValidationIssue::DanglingRelation { .. } => {
                "dangling-id"
            }
            ValidationIssue::WrongSide { .. } => "wrong-side",
            ValidationIssue::DimensionMismatch { .. } => "dimension-mismatch",
            ValidationIssue::NonFiniteValue { .. } => "non-finite",
            ValidationIssue::EmptyName { .. } => "empty-name",
            ValidationIssue::DuplicateSeed { .. } | ValidationIssue::DuplicateSeedSource { .. } => {
                "duplicate-seed"
            }
        }
    }
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationIssue::DanglingEntity { side, index, context } => write!(
                f,
                "dangling {} entity {} in {}",
                side.name(),
                index,
                context
            ),
            ValidationIssue::DanglingRelation { side, relation, context } => write!(
                f,
                "dangling {} relation {} in {}",
                side.name(),
                relation,
                context
            ),
            ValidationIssue::WrongSide { expected, found, context } => write!(
                f,
                "id from side {} in a {} graph ({})",
                found.name(),
                expected.name(),
                context
            ),
            ValidationIssue::DimensionMismatch { side, entity, expected, found } => write!(
                f,
                "{} entity {}: visual dimension {} does not match {}",
                side.name(),
                entity,
                found,
                expected
            ),
            ValidationIssue::NonFiniteValue { side, context } => {
                write!(f, "non-finite value on {} side: {}", side.name(), context)
            }
            ValidationIssue::EmptyName { side, entity } => {
                write!(f, "empty attribute name on {} entity {}", side.name(), entity)
            }
            ValidationIssue::DuplicateSeed { source, target } => {
                write!(f, "duplicate seed pair ({source}, {target})")
            }
            ValidationIssue::DuplicateSeedSource { source } => {
                write!(f, "source entity {source} appears in more than one seed")
            }
        }
    }
}

/// Outcome of [`validate_pair`]: empty exactly when all invariants hold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn counts_by_category(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for issue in &self.issues {
            *counts.entry(issue.category()).or_insert(0) += 1;
        }
        counts
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "ok: no validation issues");
        }
        for issue in &self.issues {
            writeln!(f, "error: {issue}")?;
        }
        writeln!(f, "---")?;
        for (category, count) in self.counts_by_category() {
            writeln!(f, "{category}: {count}")?;
        }
        Ok(())
    }
}

fn check_graph(kg: &KnowledgeGraph, report: &mut Vec<ValidationIssue>) {
    let side = kg.side;
    for (i, t) in kg.triples.iter().enumerate() {
        let context = format!("triple {i}");
        for id in [t.head, t.tail] {
            if id.side != side {
                report.push(ValidationIssue::WrongSide {
                    expected: side,
                    found: id.side,
                    context: context.clone(),
                });
            }
            if id.index >= kg.entity_count {
                report.push(ValidationIssue::DanglingEntity {
                    side,
                    index: id.index,
                    context: context.clone(),
                });
            }
        }
        if t.relation >= kg.relation_count {
            report.push(ValidationIssue::DanglingRelation {
                side,
                relation: t.relation,
                context,
            });
        }
    }
    for (i, a) in kg.attributes.iter().enumerate() {
        if a.entity.side != side {
            report.push(ValidationIssue::WrongSide {
                expected: side,
                found: a.entity.side,
                context: format!("attribute {i}"),
            });
        }
        if a.entity.index >= kg.entity_count {
            report.push(ValidationIssue::DanglingEntity {
                side,
                index: a.entity.index,
                context: format!("attribute {i}"),
            });
        }
        if a.name_token.is_empty() {
            report.push(ValidationIssue::EmptyName {
                side,
                entity: a.entity.index,
            });
        }
        if !a.value.is_finite() {
            report.push(ValidationIssue::NonFiniteValue {
                side,
                context: format!("attribute {i} ({})", a.name_token),
            });
        }
    }
    let mut dim: Option<usize> = None;
    for (&index, set) in &kg.visuals {
        if index >= kg.entity_count {
            report.push(ValidationIssue::DanglingEntity {
                side,
                index,
                context: "visual set".into(),
            });
        }
        for vec in &set.vectors {
            match dim {
                None => dim = Some(vec.len()),
                Some(d) if d != vec.len() => report.push(ValidationIssue::DimensionMismatch {
                    side,
                    entity: index,
                    expected: d,
                    found: vec.len(),
                }),
                _ => {}
            }
            if vec.iter().any(|v| !v.is_finite()) {
                report.push(ValidationIssue::NonFiniteValue {
                    side,
                    context: format!("visual vector of entity {index}"),
                });
            }
        }
    }
}

/// Check every graph and seed invariant; the report is the payload, so this
/// never fails.
pub fn validate_pair(
    kg_source: &KnowledgeGraph,
    kg_target: &KnowledgeGraph,
    seeds: &[SeedAlignment],
) -> ValidationReport {
    let mut issues = Vec::new();
    check_graph(kg_source, &mut issues);
    check_graph(kg_target, &mut issues);

    let mut seen_pairs = HashSet::new();
    let mut seen_sources = HashSet::new();
    for s in seeds {
        if s.source.side != Side::Source {
            issues.push(ValidationIssue::WrongSide {
                expected: Side::Source,
                found: s.source.side,
                context: "seed source".into(),
            });
        }
        if s.target.side != Side::Target {
            issues.push(ValidationIssue::WrongSide {
                expected: Side::Target,
                found: s.target.side,
                context: "seed target".into(),
            });
        }
        if s.source.index >= kg_source.entity_count {
            issues.push(ValidationIssue::DanglingEntity {
                side: Side::Source,
                index: s.source.index,
                context: "seed".into(),
            });
        }
        if s.target.index >= kg_target.entity_count {
            issues.push(ValidationIssue::DanglingEntity {
                side: Side::Target,
                index: s.target.index,
                context: "seed".into(),
            });
        }
        if !seen_pairs.insert((s.source.index, s.target.index)) {
            issues.push(ValidationIssue::DuplicateSeed {
                source: s.source.index,
                target: s.target.index,
            });
        }
        if !seen_sources.insert(s.source.index) {
            issues.push(ValidationIssue::DuplicateSeedSource {
                source: s.source.index,
            });
        }
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{AttributeInstance, EntityId, VisualEmbeddingSet};
    use std::collections::BTreeMap;

    fn small_pair() -> (KnowledgeGraph, KnowledgeGraph) {
        let mut s = KnowledgeGraph::empty(Side::Source, 3);
        s.relation_count = 1;
        s.triples.push(crate::kg::RelationTriple {
            head: EntityId::new(Side::Source, 0),
            relation: 0,
            tail: EntityId::new(Side::Source, 1),
        });
        let t = KnowledgeGraph::empty(Side::Target, 3);
        (s, t)
    }

    #[test]
    fn valid_pair_gives_empty_report() {
        let (s, t) = small_pair();
        let seeds = vec![SeedAlignment::new(0, 0), SeedAlignment::new(1, 2)];
        let report = validate_pair(&s, &t, &seeds);
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn dangling_seed_target_is_one_error() {
        let (s, t) = small_pair();
        let seeds = vec![SeedAlignment::new(0, 99)];
        let report = validate_pair(&s, &t, &seeds);
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.counts_by_category()["dangling-id"], 1);
    }

    #[test]
    fn mixed_visual_dims_is_one_dimension_error() {
        let (mut s, t) = small_pair();
        s.visuals.insert(
            0,
            VisualEmbeddingSet {
                entity: EntityId::new(Side::Source, 0),
                vectors: vec![vec![1.0, 2.0], vec![1.0, 2.0, 3.0]],
            },
        );
        let report = validate_pair(&s, &t, &[]);
        assert_eq!(report.counts_by_category()["dimension-mismatch"], 1);
    }

    #[test]
    fn non_finite_attribute_is_reported() {
        let (mut s, t) = small_pair();
        s.attributes.push(AttributeInstance {
            entity: EntityId::new(Side::Source, 0),
            name_token: "height".into(),
            value: f64::INFINITY,
        });
        let report = validate_pair(&s, &t, &[]);
        assert_eq!(report.counts_by_category()["non-finite"], 1);
    }

    #[test]
    fn duplicate_seed_pair_and_source_are_flagged() {
        let (s, t) = small_pair();
        let seeds = vec![
            SeedAlignment::new(0, 0),
            SeedAlignment::new(0, 0),
            SeedAlignment::new(0, 1),
        ];
        let report = validate_pair(&s, &t, &seeds);
        let counts = report.counts_by_category();
        assert_eq!(counts["duplicate-seed"], 3); // dup pair + two extra uses of source 0
        let _ = BTreeMap::from([(0, 0)]);
    }
}

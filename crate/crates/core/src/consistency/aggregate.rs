//! Per-entity aggregation of modality item vectors.

use crate::error::NumericsError;
use crate::kg::KnowledgeGraph;
use crate::numerics::matrix::NumResult;
use crate::numerics::Matrix;

/// One modality's entity-level embedding table plus a presence mask. Rows
/// with `present == false` are zero until imputation fills them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalityTable {
    pub values: Matrix,
    pub present: Vec<bool>,
}

impl ModalityTable {
    pub fn n_missing(&self) -> usize {
        self.present.iter().filter(|p| !**p).count()
    }
}

/// Weighted mean of each entity's item vectors:
/// `row_i = sum_j w_ij x_ij / sum_j w_ij`. Weights default to uniform.
/// Entities without items get a zero row and a false mask.
pub fn aggregate_modality(
    items: &[Vec<Vec<f64>>],
    weights: Option<&[Vec<f64>]>,
    dim: usize,
) -> NumResult<ModalityTable> {
    if let Some(w) = weights {
        if w.len() != items.len() {
            return Err(NumericsError::InvalidArgument {
                op: "aggregate_modality",
                message: format!("{} weight lists for {} entities", w.len(), items.len()),
            });
        }
    }
    let mut values = Matrix::zeros(items.len(), dim);
    let mut present = vec![false; items.len()];
    for (i, entity_items) in items.iter().enumerate() {
        if entity_items.is_empty() {
            continue;
        }
        let mut denom = 0.0;
        let row = values.row_mut(i);
        for (j, item) in entity_items.iter().enumerate() {
            if item.len() != dim {
                return Err(NumericsError::InvalidArgument {
                    op: "aggregate_modality",
                    message: format!(
                        "entity {i} item {j} has dimension {}, expected {dim}",
                        item.len()
                    ),
                });
            }
            let w = match weights {
                Some(w) => {
                    let wij = *w[i].get(j).ok_or(NumericsError::InvalidArgument {
                        op: "aggregate_modality",
                        message: format!("entity {i}: missing weight for item {j}"),
                    })?;
                    if wij <= 0.0 {
                        return Err(NumericsError::InvalidArgument {
                            op: "aggregate_modality",
                            message: format!("entity {i} item {j}: weight {wij} must be positive"),
                        });
                    }
                    wij
                }
                None => 1.0,
            };
            for (acc, &x) in row.iter_mut().zip(item) {
                *acc += w * x;
            }
            denom += w;
        }
        row.iter_mut().for_each(|v| *v /= denom);
        present[i] = true;
    }
    values.check_finite("aggregate_modality")?;
    Ok(ModalityTable { values, present })
}

/// Item lists for the visual modality, indexed by entity.
pub fn visual_items(kg: &KnowledgeGraph) -> Vec<Vec<Vec<f64>>> {
    let mut items = vec![Vec::new(); kg.entity_count];
    for (&i, set) in &kg.visuals {
        if i < kg.entity_count {
            items[i] = set.vectors.clone();
        }
    }
    items
}

/// Item lists for the attribute-name modality: each instance contributes its
/// name-embedding row to its entity.
pub fn name_items(kg: &KnowledgeGraph, name_matrix: &Matrix) -> Vec<Vec<Vec<f64>>> {
    let mut items = vec![Vec::new(); kg.entity_count];
    for (u, a) in kg.attributes.iter().enumerate() {
        if a.entity.index < kg.entity_count {
            items[a.entity.index].push(name_matrix.row(u).to_vec());
        }
    }
    items
}

/// Item lists for the attribute-value modality: raw scalar values as
/// one-dimensional vectors.
pub fn value_items(kg: &KnowledgeGraph) -> Vec<Vec<Vec<f64>>> {
    let mut items = vec![Vec::new(); kg.entity_count];
    for a in &kg.attributes {
        if a.entity.index < kg.entity_count {
            items[a.entity.index].push(vec![a.value]);
        }
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_item_passes_through() {
        let items = vec![vec![vec![1.0, 2.0]], vec![vec![-0.5, 0.5]]];
        let table = aggregate_modality(&items, None, 2).unwrap();
        assert_eq!(table.values.row(0), &[1.0, 2.0]);
        assert_eq!(table.values.row(1), &[-0.5, 0.5]);
        assert_eq!(table.present, vec![true, true]);
    }

    #[test]
    fn uniform_weights_average() {
        let items = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]];
        let table = aggregate_modality(&items, None, 2).unwrap();
        assert_eq!(table.values.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn explicit_weights_match_hand_computed_mean() {
        // weights [3, 1] over [1,0] and [0,1]: (3*[1,0] + 1*[0,1]) / 4
        let items = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]];
        let weights = vec![vec![3.0, 1.0]];
        let table = aggregate_modality(&items, Some(&weights), 2).unwrap();
        assert_eq!(table.values.row(0), &[0.75, 0.25]);
    }

    #[test]
    fn missing_entity_is_masked_zero() {
        let items = vec![vec![], vec![vec![1.0]]];
        let table = aggregate_modality(&items, None, 1).unwrap();
        assert_eq!(table.values.row(0), &[0.0]);
        assert_eq!(table.present, vec![false, true]);
        assert_eq!(table.n_missing(), 1);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let items = vec![vec![vec![1.0]]];
        let weights = vec![vec![-1.0]];
        assert!(aggregate_modality(&items, Some(&weights), 1).is_err());
    }
}

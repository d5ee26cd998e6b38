//! Single-modality similarity matrices.
//!
//! The attribute similarity couples name-embedding affinity with value
//! proximity at the instance level and accumulates instance-pair scores
//! into entity cells through the incidence structure. The visual similarity
//! takes the strongest dot product between any two image embeddings of an
//! entity pair.

use std::collections::BTreeMap;

use crate::error::NumericsError;
use crate::kg::{AttributeInstance, VisualEmbeddingSet};
use crate::numerics::matrix::NumResult;
use crate::numerics::Matrix;

/// Which signal a similarity matrix carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Attribute,
    Visual,
    Entity,
    Fused,
}

/// Dense `n_source x n_target` similarity matrix tagged with its modality.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub values: Matrix,
    pub modality: Modality,
}

impl SimilarityMatrix {
    pub fn new(values: Matrix, modality: Modality) -> Self {
        SimilarityMatrix { values, modality }
    }

    pub fn zeros(rows: usize, cols: usize, modality: Modality) -> Self {
        SimilarityMatrix::new(Matrix::zeros(rows, cols), modality)
    }

    /// Row-major TSV with 17 significant digits, for cross-implementation
    /// diffing.
    pub fn to_tsv(&self) -> String {
        self.values.to_tsv()
    }
}

/// Instance-level incidence of one side: column `u` is the `u`-th attribute
/// instance, owned by exactly one entity.
#[derive(Debug, Clone)]
pub struct AttributeIncidence {
    pub n_entities: usize,
    /// Owning entity of each instance column.
    pub entity_of: Vec<usize>,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl AttributeIncidence {
    pub fn from_instances(instances: &[AttributeInstance], n_entities: usize) -> Self {
        AttributeIncidence {
            n_entities,
            entity_of: instances.iter().map(|a| a.entity.index).collect(),
            names: instances.iter().map(|a| a.name_token.clone()).collect(),
            values: instances.iter().map(|a| a.value).collect(),
        }
    }

    pub fn n_instances(&self) -> usize {
        self.entity_of.len()
    }

    /// Dense 0/1 incidence matrix with one 1 per column.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n_entities, self.n_instances());
        for (u, &e) in self.entity_of.iter().enumerate() {
            m.set(e, u, 1.0);
        }
        m
    }
}

/// Scalar weights of the attribute similarity.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct AttributeSimParams {
    pub name_weight: f64,
    pub value_weight: f64,
    pub epsilon: f64,
}

impl Default for AttributeSimParams {
    fn default() -> Self {
        AttributeSimParams {
            name_weight: 1.0,
            value_weight: 1.0,
            epsilon: 1e-6,
        }
    }
}

impl AttributeSimParams {
    pub fn validate(&self) -> NumResult<()> {
        if self.name_weight < 0.0 || self.value_weight < 0.0 {
            return Err(NumericsError::InvalidArgument {
                op: "attribute_similarity",
                message: "weights must be non-negative".into(),
            });
        }
        if self.epsilon <= 0.0 {
            return Err(NumericsError::InvalidArgument {
                op: "attribute_similarity",
                message: format!("epsilon {} must be positive", self.epsilon),
            });
        }
        Ok(())
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Deterministic fallback encoder for attribute-name tokens: character
/// 3-grams of the boundary-padded token, hashed into `d_name` buckets,
/// counts L2-normalized per row. Identical tokens always map to identical
/// rows.
pub fn hash_name_embedding(token: &str, d_name: usize) -> Vec<f64> {
    let mut chars = Vec::with_capacity(token.chars().count() + 2);
    chars.push('^');
    chars.extend(token.chars());
    chars.push('$');

    let mut counts = vec![0.0; d_name];
    for w in chars.windows(3) {
        let gram: String = w.iter().collect();
        let bucket = (fnv1a(gram.as_bytes()) % d_name as u64) as usize;
        counts[bucket] += 1.0;
    }
    let norm = counts.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        counts.iter_mut().for_each(|v| *v /= norm);
    }
    counts
}

/// Per-instance name-embedding matrix: the provided map when given,
/// otherwise the hashing fallback.
pub fn embed_attribute_names(
    instances: &[AttributeInstance],
    provided: Option<&BTreeMap<String, Vec<f64>>>,
    d_name: usize,
) -> NumResult<Matrix> {
    match provided {
        Some(map) => {
            let mut rows = Vec::with_capacity(instances.len());
            for a in instances {
                let vec = map.get(&a.name_token).ok_or_else(|| {
                    NumericsError::InvalidArgument {
                        op: "embed_attribute_names",
                        message: format!(
                            "no provided embedding for name token `{}`",
                            a.name_token
                        ),
                    }
                })?;
                if vec.len() != d_name {
                    return Err(NumericsError::InvalidArgument {
                        op: "embed_attribute_names",
                        message: format!(
                            "provided embedding for `{}` has dimension {}, expected {d_name}",
                            a.name_token,
                            vec.len()
                        ),
                    });
                }
                rows.push(vec.clone());
            }
            if rows.is_empty() {
                return Ok(Matrix::zeros(0, d_name));
            }
            Matrix::from_rows(&rows)
        }
        None => {
            let mut m = Matrix::zeros(instances.len(), d_name);
            for (u, a) in instances.iter().enumerate() {
                let row = hash_name_embedding(&a.name_token, d_name);
                m.row_mut(u).copy_from_slice(&row);
            }
            Ok(m)
        }
    }
}

/// Entity-level attribute similarity.
///
/// With `M[u][v] = tanh(w_name * <K_s[u], K_t[v]>) * (w_value / (|V_s[u] - V_t[v]| + eps))`
/// over instance pairs, the result is `A_s * M * A_t^T`: each entity cell
/// accumulates the scores of its instance pairs. Entities without instances
/// produce all-zero rows/columns. Entries are not range-normalized; fusion
/// applies min-max scaling.
pub fn attribute_similarity(
    inc_s: &AttributeIncidence,
    inc_t: &AttributeIncidence,
    k_s: &Matrix,
    k_t: &Matrix,
    params: &AttributeSimParams,
) -> NumResult<SimilarityMatrix> {
    params.validate()?;
    let (a_s, a_t) = (inc_s.n_instances(), inc_t.n_instances());
    if k_s.rows() != a_s || k_t.rows() != a_t {
        return Err(NumericsError::Shape {
            op: "attribute_similarity",
            left_rows: k_s.rows(),
            left_cols: a_s,
            right_rows: k_t.rows(),
            right_cols: a_t,
        });
    }
    if a_s == 0 || a_t == 0 {
        return Ok(SimilarityMatrix::zeros(
            inc_s.n_entities,
            inc_t.n_entities,
            Modality::Attribute,
        ));
    }
    if k_s.cols() != k_t.cols() {
        return Err(NumericsError::Shape {
            op: "attribute_similarity",
            left_rows: k_s.rows(),
            left_cols: k_s.cols(),
            right_rows: k_t.rows(),
            right_cols: k_t.cols(),
        });
    }

    let name_affinity = k_s.matmul(&k_t.transpose())?;
    let name_term = name_affinity.scalar_mul(params.name_weight)?.map_tanh();

    let proximity = Matrix::from_fn(a_s, a_t, |u, v| {
        params.value_weight / ((inc_s.values[u] - inc_t.values[v]).abs() + params.epsilon)
    });
    proximity.check_finite("attribute_similarity")?;

    let pair_scores = name_term.hadamard(&proximity)?;
    let values = inc_s
        .to_matrix()
        .matmul(&pair_scores)?
        .matmul(&inc_t.to_matrix().transpose())?;
    Ok(SimilarityMatrix::new(values, Modality::Attribute))
}

/// Visual similarity: strongest inner product between any image embedding of
/// entity `i` and any of entity `j`. With `normalize` (the default) vectors
/// are L2-normalized first so entries are cosines in `[-1, 1]`. Pairs where
/// either entity has no images score 0.
pub fn visual_similarity(
    vis_s: &BTreeMap<usize, VisualEmbeddingSet>,
    n_source: usize,
    vis_t: &BTreeMap<usize, VisualEmbeddingSet>,
    n_target: usize,
    normalize: bool,
) -> NumResult<SimilarityMatrix> {
    let mut dim: Option<usize> = None;
    let mut collect = |map: &BTreeMap<usize, VisualEmbeddingSet>| -> NumResult<Vec<(usize, Vec<Vec<f64>>)>> {
        let mut out = Vec::new();
        for (&i, set) in map {
            let mut vectors = Vec::with_capacity(set.vectors.len());
            for v in &set.vectors {
                match dim {
                    None => dim = Some(v.len()),
                    Some(d) if d != v.len() => {
                        return Err(NumericsError::Shape {
                            op: "visual_similarity",
                            left_rows: 1,
                            left_cols: d,
                            right_rows: 1,
                            right_cols: v.len(),
                        })
                    }
                    _ => {}
                }
                let mut vec = v.clone();
                if normalize {
                    let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        vec.iter_mut().for_each(|x| *x /= norm);
                    } else {
                        vec.iter_mut().for_each(|x| *x = 0.0);
                    }
                }
                vectors.push(vec);
            }
            out.push((i, vectors));
        }
        Ok(out)
    };

    let s_entries = collect(vis_s)?;
    let t_entries = collect(vis_t)?;

    let mut values = Matrix::zeros(n_source, n_target);
    for (i, u_vecs) in &s_entries {
        if u_vecs.is_empty() {
            continue;
        }
        for (j, w_vecs) in &t_entries {
            if w_vecs.is_empty() {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            for u in u_vecs {
                for w in w_vecs {
                    let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                    if dot > best {
                        best = dot;
                    }
                }
            }
            values.set(*i, *j, best);
        }
    }
    values.check_finite("visual_similarity")?;
    Ok(SimilarityMatrix::new(values, Modality::Visual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{EntityId, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn instance(index: usize, name: &str, value: f64) -> AttributeInstance {
        AttributeInstance {
            entity: EntityId::new(Side::Source, index),
            name_token: name.into(),
            value,
        }
    }

    #[test]
    fn identical_tokens_hash_to_identical_rows() {
        let a = hash_name_embedding("height", 16);
        let b = hash_name_embedding("height", 16);
        assert_eq!(a, b);
        let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((cos - 1.0).abs() < 1e-12);
    }

    #[test]
    fn different_tokens_have_cosine_below_one() {
        // "height" and "width" share no padded 3-grams, so their hashed
        // count vectors can only overlap through bucket collisions.
        let a = hash_name_embedding("height", 64);
        let b = hash_name_embedding("width", 64);
        let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!(cos < 1.0 - 1e-6, "cosine {cos}");
    }

    #[test]
    fn provided_embeddings_pass_through_verbatim() {
        let instances = vec![instance(0, "height", 1.0), instance(1, "width", 2.0)];
        let provided = BTreeMap::from([
            ("height".to_string(), vec![1.0, 0.0]),
            ("width".to_string(), vec![0.0, 1.0]),
        ]);
        let m = embed_attribute_names(&instances, Some(&provided), 2).unwrap();
        assert_eq!(m.row(0), &[1.0, 0.0]);
        assert_eq!(m.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn provided_embeddings_must_cover_all_tokens() {
        let instances = vec![instance(0, "height", 1.0)];
        let provided = BTreeMap::from([("width".to_string(), vec![1.0])]);
        assert!(embed_attribute_names(&instances, Some(&provided), 1).is_err());
    }

    #[test]
    fn single_shared_instance_matches_closed_form() {
        let inst = vec![instance(0, "height", 180.0)];
        let inc = AttributeIncidence::from_instances(&inst, 1);
        let k = embed_attribute_names(&inst, None, 8).unwrap();
        let params = AttributeSimParams::default();
        let sim = attribute_similarity(&inc, &inc, &k, &k, &params).unwrap();
        let expected = 1.0f64.tanh() * (1.0 / params.epsilon);
        assert!(
            (sim.values.get(0, 0) - expected).abs() / expected < 1e-12,
            "{} vs {expected}",
            sim.values.get(0, 0)
        );
    }

    #[test]
    fn entity_without_attributes_has_zero_row() {
        let inst_s = vec![instance(1, "height", 1.0)]; // entity 0 has none
        let inst_t = vec![instance(0, "height", 1.0)];
        let inc_s = AttributeIncidence::from_instances(&inst_s, 2);
        let inc_t = AttributeIncidence::from_instances(&inst_t, 1);
        let k_s = embed_attribute_names(&inst_s, None, 8).unwrap();
        let k_t = embed_attribute_names(&inst_t, None, 8).unwrap();
        let sim =
            attribute_similarity(&inc_s, &inc_t, &k_s, &k_t, &AttributeSimParams::default())
                .unwrap();
        assert_eq!(sim.values.get(0, 0), 0.0);
        assert!(sim.values.get(1, 0) > 0.0);
    }

    /// Brute-force oracle: loop every instance pair, accumulate into the
    /// owning entity cell.
    fn attribute_oracle(
        inc_s: &AttributeIncidence,
        inc_t: &AttributeIncidence,
        k_s: &Matrix,
        k_t: &Matrix,
        params: &AttributeSimParams,
    ) -> Matrix {
        let mut out = Matrix::zeros(inc_s.n_entities, inc_t.n_entities);
        for u in 0..inc_s.n_instances() {
            for v in 0..inc_t.n_instances() {
                let dot: f64 = k_s.row(u).iter().zip(k_t.row(v)).map(|(a, b)| a * b).sum();
                let name = (params.name_weight * dot).tanh();
                let value =
                    params.value_weight / ((inc_s.values[u] - inc_t.values[v]).abs() + params.epsilon);
                let cell = (inc_s.entity_of[u], inc_t.entity_of[v]);
                out.set(cell.0, cell.1, out.get(cell.0, cell.1) + name * value);
            }
        }
        out
    }

    #[test]
    fn random_instances_match_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let n_s = rng.gen_range(1..=8);
            let n_t = rng.gen_range(1..=8);
            let a_s = rng.gen_range(0..=12);
            let a_t = rng.gen_range(0..=12);
            let names = ["height", "width", "age", "area"];
            let gen_side = |rng: &mut ChaCha8Rng, n: usize, a: usize| -> Vec<AttributeInstance> {
                (0..a)
                    .map(|_| {
                        instance(
                            rng.gen_range(0..n),
                            names[rng.gen_range(0..names.len())],
                            rng.gen_range(-2.0..2.0),
                        )
                    })
                    .collect()
            };
            let inst_s = gen_side(&mut rng, n_s, a_s);
            let inst_t = gen_side(&mut rng, n_t, a_t);
            let inc_s = AttributeIncidence::from_instances(&inst_s, n_s);
            let inc_t = AttributeIncidence::from_instances(&inst_t, n_t);
            let k_s = embed_attribute_names(&inst_s, None, 12).unwrap();
            let k_t = embed_attribute_names(&inst_t, None, 12).unwrap();
            let params = AttributeSimParams {
                name_weight: rng.gen_range(0.1..2.0),
                value_weight: rng.gen_range(0.1..2.0),
                epsilon: 1e-6,
            };
            let sim = attribute_similarity(&inc_s, &inc_t, &k_s, &k_t, &params).unwrap();
            let oracle = attribute_oracle(&inc_s, &inc_t, &k_s, &k_t, &params);
            for i in 0..n_s {
                for j in 0..n_t {
                    assert!(
                        (sim.values.get(i, j) - oracle.get(i, j)).abs() < 1e-9,
                        "({i},{j}): {} vs {}",
                        sim.values.get(i, j),
                        oracle.get(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn value_proximity_is_monotone_in_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = AttributeSimParams::default();
        for _ in 0..200 {
            let base: f64 = rng.gen_range(-2.0..2.0);
            let near = base + rng.gen_range(0.0..0.5);
            let far = near + rng.gen_range(0.0..2.0);
            let inst = |v: f64| vec![instance(0, "height", v)];
            let inc_base = AttributeIncidence::from_instances(&inst(base), 1);
            let k = embed_attribute_names(&inst(base), None, 8).unwrap();
            let score = |other: f64| {
                let inc_o = AttributeIncidence::from_instances(&inst(other), 1);
                attribute_similarity(&inc_base, &inc_o, &k, &k, &params)
                    .unwrap()
                    .values
                    .get(0, 0)
            };
            assert!(score(near) >= score(far));
        }
    }

    fn visual_set(side: Side, index: usize, vectors: Vec<Vec<f64>>) -> VisualEmbeddingSet {
        VisualEmbeddingSet {
            entity: EntityId::new(side, index),
            vectors,
        }
    }

    #[test]
    fn identical_unit_vector_scores_one() {
        let s = BTreeMap::from([(0, visual_set(Side::Source, 0, vec![vec![0.6, 0.8]]))]);
        let t = BTreeMap::from([(0, visual_set(Side::Target, 0, vec![vec![0.6, 0.8]]))]);
        let sim = visual_similarity(&s, 1, &t, 1, true).unwrap();
        assert!((sim.values.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_image_set_gives_zero_row() {
        let s = BTreeMap::from([(0, visual_set(Side::Source, 0, vec![]))]);
        let t = BTreeMap::from([(0, visual_set(Side::Target, 0, vec![vec![1.0, 0.0]]))]);
        let sim = visual_similarity(&s, 1, &t, 1, true).unwrap();
        assert_eq!(sim.values.get(0, 0), 0.0);
    }

    #[test]
    fn max_over_pairs_matches_all_pairs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let vecs = |rng: &mut ChaCha8Rng, k: usize| -> Vec<Vec<f64>> {
            (0..k)
                .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect()
        };
        let sv = vecs(&mut rng, 3);
        let tv = vecs(&mut rng, 2);
        let s = BTreeMap::from([(0, visual_set(Side::Source, 0, sv.clone()))]);
        let t = BTreeMap::from([(0, visual_set(Side::Target, 0, tv.clone()))]);
        let sim = visual_similarity(&s, 1, &t, 1, false).unwrap();
        let mut best = f64::NEG_INFINITY;
        for u in &sv {
            for w in &tv {
                let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                best = best.max(dot);
            }
        }
        assert!((sim.values.get(0, 0) - best).abs() < 1e-12);
    }

    #[test]
    fn swapping_sides_transposes_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut s = BTreeMap::new();
        let mut t = BTreeMap::new();
        for i in 0..4 {
            let k = rng.gen_range(0..3);
            s.insert(
                i,
                visual_set(
                    Side::Source,
                    i,
                    (0..k)
                        .map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .collect(),
                ),
            );
            let k = rng.gen_range(0..3);
            t.insert(
                i,
                visual_set(
                    Side::Target,
                    i,
                    (0..k)
                        .map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .collect(),
                ),
            );
        }
        let fwd = visual_similarity(&s, 4, &t, 4, true).unwrap();
        let rev = visual_similarity(&t, 4, &s, 4, true).unwrap();
        assert_eq!(fwd.values, rev.values.transpose());
    }

    #[test]
    fn normalized_entries_stay_in_unit_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut s = BTreeMap::new();
        let mut t = BTreeMap::new();
        for i in 0..5 {
            s.insert(
                i,
                visual_set(
                    Side::Source,
                    i,
                    vec![(0..3).map(|_| rng.gen_range(-10.0..10.0)).collect()],
                ),
            );
            t.insert(
                i,
                visual_set(
                    Side::Target,
                    i,
                    vec![(0..3).map(|_| rng.gen_range(-10.0..10.0)).collect()],
                ),
            );
        }
        let sim = visual_similarity(&s, 5, &t, 5, true).unwrap();
        for v in sim.values.data() {
            assert!(*v >= -1.0 - 1e-12 && *v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn mixed_dimensions_error() {
        let s = BTreeMap::from([(0, visual_set(Side::Source, 0, vec![vec![1.0, 0.0]]))]);
        let t = BTreeMap::from([(0, visual_set(Side::Target, 0, vec![vec![1.0, 0.0, 0.0]]))]);
        assert!(visual_similarity(&s, 1, &t, 1, true).is_err());
    }
}

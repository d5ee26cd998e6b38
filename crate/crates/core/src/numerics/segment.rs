//! Contiguous-slice index over a flat edge list, one slice per target row.

use crate::error::NumericsError;

use super::matrix::NumResult;

/// Partition of `0..total` into per-target contiguous slices. Empty slices
/// are allowed; they simply produce no output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentIndex {
    offsets: Vec<usize>,
}

impl SegmentIndex {
    /// Build from per-item segment keys that must be sorted ascending.
    pub fn from_sorted_keys(keys: &[usize], n_segments: usize) -> NumResult<Self> {
        let mut offsets = Vec::with_capacity(n_segments + 1);
        offsets.push(0);
        let mut pos = 0;
        for seg in 0..n_segments {
            while pos < keys.len() && keys[pos] == seg {
                pos += 1;
            }
            if pos < keys.len() && keys[pos] < seg {
                return Err(NumericsError::InvalidArgument {
                    op: "segment_index",
                    message: "keys are not sorted ascending".into(),
                });
            }
            offsets.push(pos);
        }
        if pos != keys.len() {
            return Err(NumericsError::InvalidArgument {
                op: "segment_index",
                message: format!(
                    "key {} out of range for {} segments",
                    keys[pos], n_segments
                ),
            });
        }
        Ok(SegmentIndex { offsets })
    }

    pub fn n_segments(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, segment: usize) -> std::ops::Range<usize> {
        self.offsets[segment]..self.offsets[segment + 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.n_segments()).map(|s| self.range(s))
    }
}

/// Softmax within each segment, stabilized by per-segment max subtraction.
/// Within each non-empty segment outputs are positive and sum to one.
pub fn segment_softmax(scores: &[f64], segments: &SegmentIndex) -> NumResult<Vec<f64>> {
    if segments.total() != scores.len() {
        return Err(NumericsError::InvalidArgument {
            op: "segment_softmax",
            message: format!(
                "{} scores but segments cover {}",
                scores.len(),
                segments.total()
            ),
        });
    }
    let mut out = vec![0.0; scores.len()];
    for range in segments.iter() {
        if range.is_empty() {
            continue;
        }
        let slice = &scores[range.clone()];
        let max = slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for (k, &s) in slice.iter().enumerate() {
            let e = (s - max).exp();
            out[range.start + k] = e;
            denom += e;
        }
        for v in &mut out[range] {
            *v /= denom;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_scores_split_evenly() {
        let seg = SegmentIndex::from_sorted_keys(&[0, 0], 1).unwrap();
        let out = segment_softmax(&[0.0, 0.0], &seg).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn large_scores_do_not_overflow() {
        let seg = SegmentIndex::from_sorted_keys(&[0, 0], 1).unwrap();
        let out = segment_softmax(&[1000.0, 1000.0], &seg).unwrap();
        assert!((out[0] - 0.5).abs() < 1e-15);
        assert!((out[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_exp_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let keys = vec![0, 0, 0, 2, 2, 3];
        let seg = SegmentIndex::from_sorted_keys(&keys, 4).unwrap();
        let scores: Vec<f64> = (0..keys.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let out = segment_softmax(&scores, &seg).unwrap();
        for range in seg.iter() {
            let denom: f64 = scores[range.clone()].iter().map(|s| s.exp()).sum();
            for k in range {
                assert!((out[k] - scores[k].exp() / denom).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_invariance_within_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let keys = vec![0, 0, 1, 1, 1];
        let seg = SegmentIndex::from_sorted_keys(&keys, 2).unwrap();
        let scores: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = scores
            .iter()
            .enumerate()
            .map(|(k, s)| if k < 2 { s + 7.5 } else { s - 3.25 })
            .collect();
        let a = segment_softmax(&scores, &seg).unwrap();
        let b = segment_softmax(&shifted, &seg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_segments_are_allowed() {
        let seg = SegmentIndex::from_sorted_keys(&[1, 1], 3).unwrap();
        assert_eq!(seg.range(0), 0..0);
        assert_eq!(seg.range(1), 0..2);
        assert_eq!(seg.range(2), 2..2);
        let out = segment_softmax(&[1.0, 1.0], &seg).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn rejects_unsorted_keys() {
        assert!(SegmentIndex::from_sorted_keys(&[1, 0], 2).is_err());
    }
}

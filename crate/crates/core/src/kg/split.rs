//! Deterministic train/test splitting of seed alignments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;

use super::SeedAlignment;

/// Partition seeds into train and test by a pseudo-random permutation keyed
/// by `rng_seed`. The train size is `round(train_fraction * n)` with
/// round-half-up; train and test together are exactly the input.
pub fn split_seeds(
    seeds: &[SeedAlignment],
    train_fraction: f64,
    rng_seed: u64,
) -> Result<(Vec<SeedAlignment>, Vec<SeedAlignment>), CoreError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CoreError::config(format!(
            "train_fraction {train_fraction} outside (0, 1)"
        )));
    }
    if seeds.len() < 2 {
        return Err(CoreError::config(format!(
            "need at least 2 seeds to split, got {}",
            seeds.len()
        )));
    }
    let mut order: Vec<usize> = (0..seeds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    order.shuffle(&mut rng);

    let n_train = (train_fraction * seeds.len() as f64 + 0.5).floor() as usize;
    let train = order[..n_train].iter().map(|&i| seeds[i]).collect();
    let test = order[n_train..].iter().map(|&i| seeds[i]).collect();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seeds(n: usize) -> Vec<SeedAlignment> {
        (0..n).map(|i| SeedAlignment::new(i, i)).collect()
    }

    #[test]
    fn twenty_percent_of_ten_is_two_train_eight_test() {
        let (train, test) = split_seeds(&seeds(10), 0.2, 7).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(test.len(), 8);
        for s in &train {
            assert!(!test.contains(s));
        }
    }

    #[test]
    fn same_seed_gives_identical_split() {
        let all = seeds(31);
        let a = split_seeds(&all, 0.4, 99).unwrap();
        let b = split_seeds(&all, 0.4, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round_half_up_on_eleven_seeds() {
        // 0.5 * 11 = 5.5 rounds up to 6 train / 5 test.
        let (train, test) = split_seeds(&seeds(11), 0.5, 3).unwrap();
        assert_eq!((train.len(), test.len()), (6, 5));
    }

    #[test]
    fn rejects_out_of_range_fraction_and_tiny_input() {
        assert!(split_seeds(&seeds(10), 0.0, 1).is_err());
        assert!(split_seeds(&seeds(10), 1.0, 1).is_err());
        assert!(split_seeds(&seeds(1), 0.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_partition(n in 2usize..60, frac in 0.01f64..0.99, seed in 0u64..1000) {
            let all = seeds(n);
            let (train, test) = split_seeds(&all, frac, seed).unwrap();
            let mut merged: Vec<_> = train.iter().chain(test.iter()).cloned().collect();
            merged.sort();
            let mut expected = all.clone();
            expected.sort();
            prop_assert_eq!(merged, expected);
            prop_assert_eq!(train.len(), (frac * n as f64 + 0.5).floor() as usize);
        }
    }
}

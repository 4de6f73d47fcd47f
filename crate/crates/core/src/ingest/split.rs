use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
}

/// Seeded random partition into train, validation and test.
///
/// Ids are sorted before shuffling, so the result depends only on the id
/// set and the seed. Sizes use largest-remainder rounding; ties in the
/// fractional parts go to the earlier split.
pub fn split_dataset(
    ids: &[String],
    seed: u64,
    fractions: (f64, f64, f64),
) -> Result<DatasetSplit, IngestError> {
    let f = [fractions.0, fractions.1, fractions.2];
    if f.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(IngestError::BadFractions(format!(
            "{f:?} must all be positive"
        )));
    }
    let sum: f64 = f.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(IngestError::BadFractions(format!(
            "{f:?} sum to {sum}, not 1"
        )));
    }
    let n = ids.len();
    let quotas: Vec<f64> = f.iter().map(|x| x * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut by_remainder: Vec<usize> = (0..3).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let assigned: usize = sizes.iter().sum();
    for &i in by_remainder.iter().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }

    let mut shuffled = ids.to_vec();
    shuffled.sort();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = shuffled.split_off(sizes[0] + sizes[1]);
    let validation = shuffled.split_off(sizes[0]);
    Ok(DatasetSplit {
        train: shuffled,
        validation,
        test,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i:05}")).collect()
    }

    #[test]
    fn seven_thousand_one_split() {
        let n = 7001.0;
        let s = split_dataset(&ids(7001), 1, (3545.0 / n, 1735.0 / n, 1721.0 / n)).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (3545, 1735, 1721)
        );
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = split_dataset(&ids(10), 42, (0.5, 0.25, 0.25)).unwrap();
        let b = split_dataset(&ids(10), 42, (0.5, 0.25, 0.25)).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (5, 3, 2));
        let mut rev = ids(10);
        rev.reverse();
        assert_eq!(split_dataset(&rev, 42, (0.5, 0.25, 0.25)).unwrap(), a);
    }

    #[test]
    fn bad_fractions() {
        assert!(matches!(
            split_dataset(&ids(10), 1, (0.5, 0.5, 0.5)),
            Err(IngestError::BadFractions(_))
        ));
        assert!(split_dataset(&ids(10), 1, (1.0, 0.0, 0.0)).is_err());
    }
}

//! Stratified fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fold index per row. Each class is shuffled separately and dealt out
/// round-robin, the negatives continuing where the positives stopped, so
/// fold class counts differ by at most one.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClass);
    }
    let minority = pos.len().min(neg.len());
    if minority < k {
        return Err(Error::StratificationInfeasible { folds: k, minority });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for mut class in [pos, neg] {
        class.shuffle(&mut rng);
        for i in class {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<bool> = (0..57).map(|i| i % 3 == 0).collect();
        let f = stratified_folds(&labels, 10, 1).unwrap();
        for k in 0..10 {
            let p = (0..57).filter(|&i| f[i] == k && labels[i]).count();
            assert!(p == 1 || p == 2);
        }
        assert_eq!(f, stratified_folds(&labels, 10, 1).unwrap());
    }

    #[test]
    fn infeasible_stratification() {
        let labels = [true, false, false, false];
        assert!(matches!(
            stratified_folds(&labels, 2, 0),
            Err(Error::StratificationInfeasible { folds: 2, minority: 1 })
        ));
        assert!(matches!(stratified_folds(&[true, true], 2, 0), Err(Error::SingleClass)));
    }
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("cannot split an empty dataset")]
    EmptyDataset,
    #[error("train fraction must lie strictly between 0 and 1")]
    InvalidFraction,
}

/// Seeded shuffle of `0..n`, cut at `floor(train_fraction * n)`.
pub fn split_indices(
    n: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if n == 0 {
        return Err(SplitError::EmptyDataset);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SplitError::InvalidFraction);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (train_fraction * n as f64).floor() as usize;
    let test = idx.split_off(cut);
    Ok((idx, test))
}

pub fn split_dataset<T: Clone>(
    rows: &[T],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), SplitError> {
    let (train, test) = split_indices(rows.len(), train_fraction, seed)?;
    Ok((
        train.iter().map(|&i| rows[i].clone()).collect(),
        test.iter().map(|&i| rows[i].clone()).collect(),
    ))
}

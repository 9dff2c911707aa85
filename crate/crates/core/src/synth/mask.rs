use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{DataMatrixOf, ObservationMask, ObservedMatrixOf};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reveals a uniformly random `m`-subset of rows in every column, drawn
/// independently per column.
pub fn sample_mask(n: usize, s: usize, m: usize, seed: u64) -> Result<ObservationMask> {
    if m > n {
        return Err(Error::Domain(format!(
            "cannot sample {m} entries from columns of length {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(m * s);
    for j in 0..s {
        let mut rows = rand::seq::index::sample(&mut rng, n, m).into_vec();
        rows.sort_unstable();
        pairs.extend(rows.into_iter().map(|i| (i, j)));
    }
    ObservationMask::from_pairs(n, s, pairs)
}

/// `P_Ω(X)`: keeps the entries in `mask`, marking all others missing.
pub fn apply_mask<T: Scalar>(x: &DataMatrixOf<T>, mask: &ObservationMask) -> Result<ObservedMatrixOf<T>> {
    ObservedMatrixOf::from_mask(x, mask)
}

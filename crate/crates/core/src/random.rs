//! Seed derivation and complex Gaussian draws.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::{C64, CMatrix, CVector};

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a sequence of words into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED_0F15_5AC0_0001, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// One draw from CN(0, variance).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * scale, im * scale)
}

pub fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> CVector {
    CVector::from_fn(len, |_, _| complex_normal(rng, variance))
}

/// Matrix of i.i.d. CN(0, variance) entries, filled column by column.
pub fn complex_normal_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMatrix {
    let mut out = CMatrix::zeros(rows, cols);
    for z in out.iter_mut() {
        *z = complex_normal(rng, variance);
    }
    out
}

/// Runs `trials` independent trials in parallel, trial `i` seeded with
/// `derive_seed([seed, i])`. Results come back in trial order, so reductions
/// over them do not depend on the thread count.
pub fn par_trials<T, F>(trials: usize, seed: u64, f: F) -> crate::error::Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> crate::error::Result<T> + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(&[seed, i as u64]));
            f(i, &mut rng)
        })
        .collect()
}

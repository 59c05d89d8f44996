//! Counter-based random streams.
//!
//! Every random quantity is addressed by `(seed, purpose, index)`: the seed and
//! purpose select a ChaCha8 key, the index selects the ChaCha stream. Draw `i`
//! of a strategy is therefore a pure function of its address and does not
//! depend on how many other draws happened before it or on which thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent random purposes within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    UniformSearch = 1,
    SubsetSearch = 2,
    PointSet = 3,
    Measurement = 4,
    Family = 5,
    Adversary = 6,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`. Injective in `index` for a fixed master.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Generator for draw `index` of `purpose` under `seed`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let key = mix64(seed ^ mix64(purpose as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Uniform point in `[0,1)^d`, a pure function of `(seed, purpose, index)`.
pub fn uniform_point(seed: u64, purpose: Purpose, index: u64, d: usize) -> Vec<f64> {
    let mut rng = stream(seed, purpose, index);
    (0..d).map(|_| rng.gen::<f64>()).collect()
}

/// Uniformly random `k`-subset of `0..n` (Floyd's algorithm), sorted.
pub fn floyd_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "subset size {k} exceeds population {n}");
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for j in (n - k)..n {
        let t = rng.gen_range(0..=j);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    chosen
}

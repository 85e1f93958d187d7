//! Seeded random jobs and instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{FixedInstance, Job};

pub const MAX_RANDOM_JOBS: usize = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `u` uniform in `(0, 10]`, `t` uniform in `(0, 2u]`, `p` uniform in `[0, u)`.
pub fn random_job<R: Rng + ?Sized>(rng: &mut R) -> Job {
    let u = 10.0 * (1.0 - rng.gen::<f64>());
    let t = 2.0 * u * (1.0 - rng.gen::<f64>());
    let p = u * rng.gen::<f64>();
    Job::new(u, t, p).expect("sampled job is valid")
}

/// Between 1 and `max_jobs` random jobs on `m` machines.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, m: usize, max_jobs: usize) -> FixedInstance {
    let n = rng.gen_range(1..=max_jobs);
    FixedInstance::new(m, (0..n).map(|_| random_job(rng)).collect()).expect("m >= 1")
}

pub fn random_corpus(seed: u64, m: usize, count: usize) -> Vec<FixedInstance> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| random_instance(&mut rng, m, MAX_RANDOM_JOBS))
        .collect()
}

/// Jobs whose values are multiples of 1/8 in `[0, 8)`, so every partial sum
/// is exact in floating point.
pub fn dyadic_instance<R: Rng + ?Sized>(rng: &mut R, m: usize, max_jobs: usize) -> FixedInstance {
    let n = rng.gen_range(1..=max_jobs);
    let mut grid = || f64::from(rng.gen_range(0u32..64)) / 8.0;
    let jobs = (0..n)
        .map(|_| {
            let (a, b, c) = (grid(), grid(), grid());
            let u = a.max(c);
            Job::new(u, b, a.min(c)).expect("p <= u by construction")
        })
        .collect();
    FixedInstance::new(m, jobs).expect("m >= 1")
}

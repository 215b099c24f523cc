//! Seed derivation for reproducible, order-insensitive parallel trials.
//!
//! Each trial gets `trial_seed(master, index)`; within a trial the generator,
//! channel and tie-breaking draws use distinct ChaCha streams of that seed so
//! that changing one stage's draw count never shifts another stage's numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Stream ids within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Generator = 0,
    Channel = 1,
    Ties = 2,
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(master ^ splitmix64(index))`.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial_index))
}

/// Random stream for one stage of one seed.
pub fn stage_rng(seed: u64, stage: Stage) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage as u64);
    rng
}

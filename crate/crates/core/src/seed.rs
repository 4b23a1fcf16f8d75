//! Per-run seed derivation.
//!
//! Every run draws its randomness from a seed derived from `(master, stream, index)`,
//! so results never depend on the order in which parallel workers pick up runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent seed streams hanging off one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Reference,
    Scoring,
    Probe,
    Repeat(u32),
    Selection,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Reference => 0x5245_4600,
            Stream::Scoring => 0x5343_4f00,
            Stream::Probe => 0x5052_4f00,
            Stream::Selection => 0x5345_4c00,
            Stream::Repeat(r) => 0x5245_5000_0000_0000 | u64::from(r),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes two 64-bit values into one well-distributed seed.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(17))
}

/// Seed of run `index` in `stream`.
pub fn run_seed(master: u64, stream: Stream, index: u64) -> u64 {
    mix(mix(master, stream.tag()), index)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

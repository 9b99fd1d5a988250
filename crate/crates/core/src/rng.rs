//! Reproducible random streams.
//!
//! Every episode owns one root seed. Independent child streams (instance
//! sampling, observation noise, agent randomization) are derived from it by
//! XOR-folding a fixed stream id into the seed and passing the result through
//! the SplitMix64 finalizer:
//!
//! ```text
//! child = splitmix64(root ^ (stream_id * 0x9E37_79B9_7F4A_7C15))
//! ```
//!
//! The child seed then seeds a ChaCha8 generator, whose output is stable across
//! platforms and `rand_chacha` releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used for every stream in the simulator.
pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Named child streams of an episode seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Instance = 1,
    Observation = 2,
    Agent = 3,
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a list of words into one 64-bit seed, order-sensitively.
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

pub fn child_seed(root: u64, stream: Stream) -> u64 {
    splitmix64(root ^ (stream as u64).wrapping_mul(GOLDEN_GAMMA))
}

pub fn stream_rng(root: u64, stream: Stream) -> StreamRng {
    StreamRng::seed_from_u64(child_seed(root, stream))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN_GAMMA), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let root = 42;
        let a: u64 = stream_rng(root, Stream::Instance).random();
        let b: u64 = stream_rng(root, Stream::Observation).random();
        let c: u64 = stream_rng(root, Stream::Agent).random();
        assert!(a != b && b != c && a != c);
        assert_eq!(a, stream_rng(root, Stream::Instance).random::<u64>());
    }

    #[test]
    fn mix_is_order_sensitive() {
        assert_ne!(mix(&[1, 2]), mix(&[2, 1]));
        assert_eq!(mix(&[7, 0, 3]), mix(&[7, 0, 3]));
    }
}

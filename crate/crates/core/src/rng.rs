// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seedable, splittable random streams.
//!
//! A [`RngStream`] is a 64-bit key. Child streams are derived by mixing a
//! role tag and an index into the parent key, so every replicate in a nested
//! Monte Carlo computation owns its own generator and results do not depend
//! on the order in which work items are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Concrete generator handed out by [`RngStream::rng`].
pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    key: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// FNV-1a, stable across platforms and toolchains (unlike `DefaultHasher`).
fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        Self {
            key: splitmix64(&mut s),
        }
    }

    /// Derive the child stream `(self, role, index)`.
    pub fn substream(&self, role: &str, index: u64) -> Self {
        let mut s = self.key ^ tag_hash(role).rotate_left(17);
        let a = splitmix64(&mut s);
        let mut s = a ^ index.wrapping_mul(GOLDEN_GAMMA);
        Self {
            key: splitmix64(&mut s) ^ splitmix64(&mut s).rotate_left(32),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut state = self.key;
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_sequence() {
        let a: Vec<u64> = RngStream::new(7).substream("x", 3).rng().random_iter().take(8).collect();
        let b: Vec<u64> = RngStream::new(7).substream("x", 3).rng().random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_paths_distinct_keys() {
        let root = RngStream::new(0);
        let mut keys = std::collections::HashSet::new();
        for role in ["inner", "outer", "grid", "lambda0", "lambda1"] {
            for i in 0..1000 {
                assert!(keys.insert(root.substream(role, i).key()));
            }
        }
        assert_ne!(RngStream::new(0), RngStream::new(1));
        assert_ne!(root.substream("a", 0).substream("b", 1), root.substream("b", 1).substream("a", 0));
    }
}

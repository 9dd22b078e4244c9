//! Splittable, counter-indexed random streams.
//!
//! Stochastic routines take a [`SeedStream`]. Work item `i` draws from
//! `stream.substream(i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic source of independent random substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream for work item `index`.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Child stream for a named purpose; keeps unrelated consumers apart.
    pub fn labeled(&self, label: &str) -> Self {
        // FNV-1a over the label bytes.
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        self.substream(h)
    }

    /// Generator seeded from this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

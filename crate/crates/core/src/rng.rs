//! Counter-based seed derivation.
//!
//! Every random quantity is a pure function of a root seed and a path of
//! integer labels, so results never depend on iteration order or on how
//! work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(u64);

impl Seed {
    pub const fn new(root: u64) -> Self {
        Seed(root)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Child seed for label `index`.
    #[inline]
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(splitmix64(self.0) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03)))
    }

    pub fn derive2(self, a: u64, b: u64) -> Seed {
        self.derive(a).derive(b)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Uniform in `[0, 1)` addressed by a pair of coordinates.
    #[inline]
    pub fn uniform_at(self, i: u64, j: u64) -> f64 {
        let bits = self.derive2(i, j).0;
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Labels for independent pipeline stages.
pub mod stage {
    pub const HYBRID: u64 = 1;
    pub const L1_ROWS: u64 = 2;
    pub const VECTOR: u64 = 3;
    pub const OUTER_A: u64 = 4;
    pub const OUTER_B: u64 = 5;
    pub const PAIRS: u64 = 6;
    pub const POWER: u64 = 7;
    pub const TRIAL: u64 = 8;
    pub const INSTANCE: u64 = 9;
}

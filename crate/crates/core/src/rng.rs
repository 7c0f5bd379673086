//! Counter-based random substreams.
//!
//! Every random draw in the crate comes from a [`SeedStream`]. A stream is a
//! 256-bit ChaCha key; the root key is expanded from the master seed and every
//! child key is block `index` of ChaCha stream `purpose` under the parent key.
//! Children therefore depend only on the `(purpose, index)` path from the
//! root, never on the order in which they are requested, which makes serial
//! and parallel runs bit-identical.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Labels for the levels of the substream tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Field = 1,
    Fading = 2,
    AliceSymbols = 3,
    Interference = 4,
    Noise = 5,
    Mask = 6,
    Trial = 7,
    Grid = 8,
    Hypothesis = 9,
    Sample = 10,
    Calibration = 11,
    Case = 12,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    key: [u8; 32],
}

impl std::fmt::Debug for SeedStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SeedStream(")?;
        for b in &self.key[..8] {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

impl SeedStream {
    pub fn from_master(master: u64) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(master);
        SeedStream {
            key: rng.get_seed(),
        }
    }

    /// Child stream at `(purpose, index)`.
    pub fn derive(&self, purpose: Purpose, index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(purpose as u64);
        // one 64-byte block (16 words) per index
        rng.set_word_pos(u128::from(index) << 4);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        SeedStream { key }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key)
    }

    pub fn key(&self) -> &[u8; 32] {
        &self.key
    }
}

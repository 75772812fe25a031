use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counter-addressed uniforms `U(seed, stream, channel, k, i)`.
///
/// Every `(channel, k)` pair owns an independent ChaCha8 keystream keyed by
/// `(seed, stream, k, channel)`; index `i` is the position in that keystream.
/// Two consumers reading the same address always see the same variate, which
/// is what the index-based couplings need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseReservoir {
    pub seed: u64,
    pub stream: u64,
}

/// Channel of the per-path "spine" (one variate per time step).
pub const SPINE: u64 = 0;

/// Spine index of time `k`; keeps negative (burn-in) times addressable.
#[inline]
pub fn spine_index(k: i64) -> u64 {
    (k as i128 + (1i128 << 40)) as u64
}

#[inline]
fn to_open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl NoiseReservoir {
    pub fn new(seed: u64, stream: u64) -> Self {
        NoiseReservoir { seed, stream }
    }

    /// Same seed, another stream.
    pub fn with_stream(&self, stream: u64) -> Self {
        NoiseReservoir {
            seed: self.seed,
            stream,
        }
    }

    fn key(&self, channel: u64, k: i64) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        key[16..24].copy_from_slice(&(k as u64).to_le_bytes());
        key[24..32].copy_from_slice(&channel.to_le_bytes());
        key
    }

    /// Sequential reader over row `(channel, k)`, starting at index 0.
    pub fn row(&self, channel: u64, k: i64) -> VariateRow {
        VariateRow {
            rng: ChaCha8Rng::from_seed(self.key(channel, k)),
        }
    }

    /// Single variate `U(channel, k, i)` in `(0, 1)`.
    pub fn uniform(&self, channel: u64, k: i64, i: u64) -> f64 {
        let mut r = self.row(channel, k);
        r.seek(i);
        r.next_uniform()
    }

    /// Reader over the spine of `channel`, positioned at time `k`.
    pub fn spine(&self, channel: u64, k: i64) -> VariateRow {
        let mut r = self.row(channel, 0);
        r.seek(spine_index(k));
        r
    }
}

/// Sequential uniforms from one reservoir row.
#[derive(Debug, Clone)]
pub struct VariateRow {
    rng: ChaCha8Rng,
}

impl VariateRow {
    /// Moves to index `i` (each variate consumes one 64-bit word pair).
    pub fn seek(&mut self, i: u64) {
        self.rng.set_word_pos(2 * i as u128);
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        to_open_unit(self.rng.next_u64())
    }
}

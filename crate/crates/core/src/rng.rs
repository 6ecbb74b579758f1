//! Seeded deterministic generator used for every sampled configuration.
//!
//! The stream is SplitMix64 (Steele, Lea, Flood 2014): the state advances by
//! the golden-ratio increment `0x9E3779B97F4A7C15` and each output is the
//! state passed through the variant-13 finalizer. Same seed, same stream, on
//! every platform.

use crate::rational::{int, Rational};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `lo..=hi` by rejection sampling.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        let zone = u64::MAX - (u64::MAX % span);
        loop {
            let v = self.next_u64();
            if v < zone {
                return lo + (v % span) as i64;
            }
        }
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.range_i64(0, bound as i64 - 1) as usize
    }

    /// Coefficient in `{-9, ..., 9}`.
    pub fn coefficient(&mut self) -> Rational {
        int(self.range_i64(-9, 9))
    }
}

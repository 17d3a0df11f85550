//! Counter-based pseudo-random streams.
//!
//! Everything random in this crate flows through [`Stream`], a SplitMix64
//! generator addressed by `(seed, stream id)`. Stream derivation is fixed:
//! `derive(seed, id)` hashes the pair through the SplitMix64 finalizer, so
//! substreams can be generated in any order (or in parallel) and still match
//! a serial run bit for bit. Matrix fills use one substream per column,
//! which makes the first `r` columns of a draw independent of how many
//! columns were requested.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_SALT: u64 = 0xd1b5_4a32_d192_ed03;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the state of substream `id` of `seed`.
pub fn derive(seed: u64, id: u64) -> u64 {
    mix(seed ^ mix(id.wrapping_mul(GOLDEN) ^ STREAM_SALT))
}

/// A single sequential SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64, id: u64) -> Self {
        Stream {
            state: derive(seed, id),
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform over `0..bound`. Rejection-free modulo bias is irrelevant at
    /// the desk scales used here, but we reject anyway to keep the law exact.
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "next_index bound must be positive");
        let b = bound as u64;
        let zone = u64::MAX - (u64::MAX % b);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % b) as usize;
            }
        }
    }

    /// Random sign, +1.0 or -1.0 with equal probability.
    #[inline]
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via the Marsaglia polar method.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Sample `take` distinct indices from `0..n` without replacement,
    /// in draw order (partial Fisher-Yates).
    pub fn sample_without_replacement(&mut self, n: usize, take: usize) -> Vec<usize> {
        assert!(take <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..take {
            let j = i + self.next_index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(take);
        pool
    }
}

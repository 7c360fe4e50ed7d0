//! Seeded, splittable randomness.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::gf2::BitVec;

/// ChaCha-based stream keyed by a 64-bit seed.
///
/// `split(i)` derives a child stream from `(seed, i)` only, never from how
/// much the parent has consumed, so parallel workers get the same streams
/// regardless of scheduling.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha12Rng,
    buf: u64,
    buf_left: u32,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
            buf: 0,
            buf_left: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream number `index`.
    pub fn split(&self, index: u64) -> Rng {
        Rng::new(splitmix64(self.seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        if self.buf_left == 0 {
            self.buf = self.inner.next_u64();
            self.buf_left = 64;
        }
        let b = self.buf & 1 == 1;
        self.buf >>= 1;
        self.buf_left -= 1;
        b
    }

    /// Uniform vector of `len` bits.
    pub fn bits(&mut self, len: usize) -> BitVec {
        let words = (0..len.div_ceil(64)).map(|_| self.inner.next_u64()).collect();
        BitVec::from_words(len, words)
    }

    /// Uniform in `[0, n)`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }

    /// Uniform random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.shuffle(&mut p);
        p
    }

    /// `count` distinct indices from `0..n`, in random order.
    pub fn sample_indices(&mut self, n: usize, count: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, count).into_vec()
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

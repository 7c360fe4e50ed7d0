use std::fmt;

use crate::error::{Error, Result};

/// Dense bit-packed vector over GF(2).
///
/// Bit `i` lives in word `i / 64` at position `i % 64` (LSB-first). Bits past
/// `len` in the last word are always zero, so word-level equality, hashing and
/// popcounts never see garbage.
#[derive(Clone, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(into = "crate::io::BitVecRepr", try_from = "crate::io::BitVecRepr")]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// The standard basis vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value` (`len <= 64`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & tail_mask(len);
        }
        v
    }

    /// Builds a vector from packed words; bits past `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    #[inline]
    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 bits as an integer; handy for enumerating small outcome spaces.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 needs len <= 64, got {}", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch in and");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitVec {
            len: self.len,
            words,
        }
    }

    /// Standard dot product mod 2.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Copies bits `[start, start + len)` into a fresh vector.
    pub fn extract(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "extract range out of bounds");
        let mut out = BitVec::zeros(len);
        let shift = start % 64;
        let base = start / 64;
        for (i, slot) in out.words.iter_mut().enumerate() {
            let lo = self.words.get(base + i).copied().unwrap_or(0);
            let hi = if shift == 0 {
                0
            } else {
                self.words.get(base + i + 1).copied().unwrap_or(0) << (64 - shift)
            };
            *slot = (lo >> shift) | hi;
        }
        out.clear_tail();
        out
    }

    /// XORs `src` into `self` starting at bit `offset`.
    pub fn xor_at(&mut self, offset: usize, src: &BitVec) {
        assert!(offset + src.len <= self.len, "xor_at range out of bounds");
        let shift = offset % 64;
        let base = offset / 64;
        for (i, &w) in src.words.iter().enumerate() {
            self.words[base + i] ^= w << shift;
            if shift != 0 && base + i + 1 < self.words.len() {
                self.words[base + i + 1] ^= w >> (64 - shift);
            }
        }
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.xor_at(0, self);
        out.xor_at(self.len, other);
        out
    }

    /// Exchanges the two halves of an even-length vector: `(a, b) -> (b, a)`.
    pub fn swap_halves(&self) -> BitVec {
        assert!(self.len.is_multiple_of(2), "swap_halves needs even length");
        let half = self.len / 2;
        let lo = self.extract(0, half);
        let hi = self.extract(half, half);
        hi.concat(&lo)
    }

    /// Lowercase hex of the packed little-endian bytes (`ceil(len/8)` bytes).
    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect()
    }

    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<BitVec> {
        let nbytes = len.div_ceil(8);
        if bytes.len() != nbytes {
            return Err(Error::Format(format!(
                "expected {nbytes} bytes for {len} bits, got {}",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; word_count(len)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let v = BitVec { len, words };
        let mut check = v.clone();
        check.clear_tail();
        if check != v {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        Ok(v)
    }

    pub fn from_hex(len: usize, text: &str) -> Result<BitVec> {
        let bytes = hex::decode(text).map_err(|e| Error::Format(format!("bad hex: {e}")))?;
        Self::from_bytes(len, &bytes)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}](", self.len)?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

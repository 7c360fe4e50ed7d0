//! Strongly uniform public keys: a public key becomes `(seed, b)` where the
//! seed deterministically expands to the isotropic code.
//!
//! [`expand`] builds `Ã` column by column. Step `i` takes the ordered basis of
//! the symplectic dual of the earlier columns (see [`DualTracker`]) and reads
//! the next `d_i` seed bits, in increasing index order, as coefficients. The
//! first `n` independent columns of `Ã` form the code.
//!
//! [`invert`] samples a seed that expands to a given code. Its output is
//! uniform over the preimages that do not hit the zero-padding branch.

use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec, DualTracker, IsotropicCode, SpanTracker};
use crate::pke::{self, Ciphertext, SecretKey};
use crate::rng::Rng;

/// Source of fair coin flips for [`invert`].
pub trait CoinSource {
    fn bit(&mut self) -> bool;
}

impl CoinSource for Rng {
    fn bit(&mut self) -> bool {
        Rng::bit(self)
    }
}

/// Seed length `4n²`.
pub fn seed_len(n: usize) -> usize {
    4 * n * n
}

fn n_from_seed(len: usize) -> Result<usize> {
    let n = ((len / 4) as f64).sqrt().round() as usize;
    if len == 0 || seed_len(n) != len {
        return Err(Error::SeedLength {
            expected: seed_len(n.max(1)),
            got: len,
        });
    }
    Ok(n)
}

/// Expansion output with diagnostics.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub a: BitMat,
    /// Zero columns appended because `Ã` had rank below `n`.
    pub padded: usize,
    /// Seed bits consumed while building `Ã`.
    pub bits_used: usize,
}

/// Deterministic expansion with diagnostics.
pub fn expand_report(seed: &BitVec) -> Result<Expansion> {
    let n = n_from_seed(seed.len())?;
    let dim = 2 * n;
    let mut dual = DualTracker::new(n);
    let mut pos = 0;
    let mut tilde = Vec::with_capacity(dim);
    for _ in 0..dim {
        let d = dual.dual_dim();
        let w = dual.from_coords(&seed.extract(pos, d));
        pos += d;
        dual.add(&w);
        tilde.push(w);
    }
    debug_assert!(pos <= seed.len());
    let mut span = SpanTracker::new(dim);
    let mut cols: Vec<BitVec> = tilde.into_iter().filter(|c| span.insert(c)).collect();
    debug_assert!(cols.len() <= n);
    let padded = n - cols.len();
    cols.resize(n, BitVec::zeros(dim));
    Ok(Expansion {
        a: BitMat::from_cols(dim, &cols)?,
        padded,
        bits_used: pos,
    })
}

/// `𝒜(seed)`: the `2n × n` code matrix encoded by a `4n²`-bit seed.
pub fn expand(seed: &BitVec) -> Result<BitMat> {
    Ok(expand_report(seed)?.a)
}

/// The seed bits that `expand` would consume to rebuild the sampled `Ã`.
/// Padding is left to the caller.
pub fn invert_prefix<C: CoinSource>(coins: &mut C, a: &BitMat) -> Result<BitVec> {
    let code = IsotropicCode::new(a.clone())?;
    let n = code.n();
    if code.k() != n {
        return Err(Error::DimensionMismatch(format!(
            "invert needs a 2n x n matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dim = 2 * n;
    let cols = a.col_vecs();
    let mut taken = 0;
    let mut dual = DualTracker::new(n);
    let mut prefix = Vec::new();
    for _ in 0..dim {
        // A uniform dual vector lands in the span of the `taken` columns with
        // probability 2^taken / 2^d = 2^-(d - taken).
        let d = dual.dual_dim();
        let in_span = (0..d - taken).all(|_| !coins.bit());
        let v = if in_span {
            let mut v = BitVec::zeros(dim);
            for c in &cols[..taken] {
                if coins.bit() {
                    v.xor_assign(c);
                }
            }
            v
        } else {
            taken += 1;
            cols[taken - 1].clone()
        };
        prefix.extend(dual.coords(&v).iter());
        dual.add(&v);
    }
    Ok(BitVec::from_bools(&prefix))
}

/// `ℬ(a)`: a seed whose expansion is `a` (except with tiny probability).
pub fn invert<C: CoinSource>(coins: &mut C, a: &BitMat) -> Result<BitVec> {
    let prefix = invert_prefix(coins, a)?;
    let total = seed_len(a.cols());
    let mut bits: Vec<bool> = prefix.iter().collect();
    while bits.len() < total {
        bits.push(coins.bit());
    }
    Ok(BitVec::from_bools(&bits))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuPublicKey {
    pub n: usize,
    pub p: f64,
    pub seed: BitVec,
    pub b: BitVec,
}

impl SuPublicKey {
    /// Total public key size in bits: `4n² + 2n`.
    pub fn bit_len(&self) -> usize {
        self.seed.len() + self.b.len()
    }
}

pub fn su_gen(rng: &mut Rng, n: usize, p: f64) -> Result<(SuPublicKey, SecretKey)> {
    let seed = rng.bits(seed_len(n));
    let a = expand(&seed)?;
    let (b, sk, _) = pke::gen_with_error(rng, a, p)?;
    Ok((SuPublicKey { n, p, seed, b }, sk))
}

pub fn su_enc(rng: &mut Rng, pk: &SuPublicKey, mu: bool) -> Result<Ciphertext> {
    let a = expand(&pk.seed)?;
    pke::enc_matrix(rng, &a, &pk.b, mu, pk.p)
}

pub fn su_dec(sk: &SecretKey, ct: &Ciphertext) -> Result<bool> {
    pke::dec(sk, ct)
}

#[cfg(feature = "white-box")]
pub mod white_box {
    use super::*;

    /// `su_gen` returning the key error `e`.
    pub fn su_gen_traced(rng: &mut Rng, n: usize, p: f64) -> Result<(SuPublicKey, SecretKey, BitVec)> {
        let seed = rng.bits(seed_len(n));
        let a = expand(&seed)?;
        let (b, sk, e) = pke::gen_with_error(rng, a, p)?;
        Ok((SuPublicKey { n, p, seed, b }, sk, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::is_isotropic;
    use crate::sampling::sample_isotropic;

    #[test]
    fn expansion_is_deterministic_and_isotropic() {
        let mut rng = Rng::new(9);
        let seed = rng.bits(seed_len(6));
        let e = expand_report(&seed).unwrap();
        assert_eq!(e.a, expand(&seed).unwrap());
        assert!(is_isotropic(&e.a).unwrap());
        assert!(e.bits_used <= seed.len());
    }

    #[test]
    fn rejects_bad_seed_length() {
        assert!(matches!(
            expand(&BitVec::zeros(15)),
            Err(Error::SeedLength { .. })
        ));
    }

    #[test]
    fn zero_seed_pads() {
        let e = expand_report(&BitVec::zeros(seed_len(3))).unwrap();
        assert_eq!(e.padded, 3);
        assert!(e.a.is_zero());
    }

    #[test]
    fn invert_round_trips() {
        let mut rng = Rng::new(10);
        let a = sample_isotropic(&mut rng, 8, 8).unwrap();
        let s = invert(&mut rng, &a).unwrap();
        assert_eq!(s.len(), seed_len(8));
        assert_eq!(expand(&s).unwrap(), a);
    }
}

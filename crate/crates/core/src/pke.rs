//! Public-key encryption from low-noise sympLPN.
//!
//! `pk = (A, b = Ax + e)`, `sk = x`. A bit `µ` encrypts to
//! `(f ⊙ A, f ⊙ b + µ)` with `f ~ D_p^{⊗n}`, and `dec` returns `c + u·x`,
//! which equals `µ + f ⊙ e`.

use crate::error::{check_prob, Error, Result};
use crate::gf2::{symp_dot, BitMat, BitVec, IsotropicCode};
use crate::rng::Rng;
use crate::sampling::{sample_depolarizing, sample_isotropic};

#[derive(Clone, Debug, PartialEq)]
pub struct PublicKey {
    pub a: IsotropicCode,
    pub b: BitVec,
    /// Noise rate used by `enc`.
    pub p: f64,
}

impl PublicKey {
    pub fn n(&self) -> usize {
        self.a.n()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub x: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub u: BitVec,
    pub c: bool,
}

/// Key generation that also returns the key error `e`.
pub(crate) fn gen_with_error(
    rng: &mut Rng,
    a: BitMat,
    p: f64,
) -> Result<(BitVec, SecretKey, BitVec)> {
    let n = a.cols();
    let x = rng.bits(n);
    let e = sample_depolarizing(rng, n, p)?.into_bits();
    let b = a.mul_vec(&x).xor(&e);
    Ok((b, SecretKey { x }, e))
}

fn gen_inner(rng: &mut Rng, n: usize, p: f64) -> Result<(PublicKey, SecretKey, BitVec)> {
    check_prob("p", p, 0.0, 1.0)?;
    let a = sample_isotropic(rng, n, n)?;
    let (b, sk, e) = gen_with_error(rng, a.clone(), p)?;
    let pk = PublicKey {
        a: IsotropicCode::new_unchecked(a),
        b,
        p,
    };
    Ok((pk, sk, e))
}

/// Fresh key pair with `A` a uniform full-rank isotropic `2n × n` matrix.
pub fn gen(rng: &mut Rng, n: usize, p: f64) -> Result<(PublicKey, SecretKey)> {
    let (pk, sk, _) = gen_inner(rng, n, p)?;
    Ok((pk, sk))
}

/// Encrypts under an explicit code matrix, given the encryption noise `f`.
pub fn enc_with_noise(a: &BitMat, b: &BitVec, mu: bool, f: &BitVec) -> Result<Ciphertext> {
    if f.len() != a.rows() || b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "noise/key length {}/{} for a {}-row code",
            f.len(),
            b.len(),
            a.rows()
        )));
    }
    // u_j = f ⊙ a_j = swap(f) · a_j, i.e. swap(f)ᵀ A.
    let u = a.vec_mul(&f.swap_halves());
    let c = symp_dot(f, b) ^ mu;
    Ok(Ciphertext { u, c })
}

fn enc_inner(rng: &mut Rng, a: &BitMat, b: &BitVec, mu: bool, p: f64) -> Result<(Ciphertext, BitVec)> {
    check_prob("p", p, 0.0, 1.0)?;
    let f = sample_depolarizing(rng, a.rows() / 2, p)?.into_bits();
    Ok((enc_with_noise(a, b, mu, &f)?, f))
}

pub(crate) fn enc_matrix(rng: &mut Rng, a: &BitMat, b: &BitVec, mu: bool, p: f64) -> Result<Ciphertext> {
    Ok(enc_inner(rng, a, b, mu, p)?.0)
}

/// Encrypts one bit. `p` is the encryption noise rate.
pub fn enc(rng: &mut Rng, pk: &PublicKey, mu: bool, p: f64) -> Result<Ciphertext> {
    enc_matrix(rng, pk.a.matrix(), &pk.b, mu, p)
}

/// Encrypts each bit of `bits` with fresh noise.
pub fn enc_bits(rng: &mut Rng, pk: &PublicKey, bits: &[bool], p: f64) -> Result<Vec<Ciphertext>> {
    bits.iter().map(|&mu| enc(rng, pk, mu, p)).collect()
}

/// `c + u · x`.
pub fn dec(sk: &SecretKey, ct: &Ciphertext) -> Result<bool> {
    if ct.u.len() != sk.x.len() {
        return Err(Error::DimensionMismatch(format!(
            "ciphertext has {} bits, key has {}",
            ct.u.len(),
            sk.x.len()
        )));
    }
    Ok(ct.c ^ ct.u.dot(&sk.x))
}

/// `Pr[f ⊙ e = 0] = ½ + ½(1 − 4p²/3)^n`.
pub fn predict_success(n: usize, p: f64) -> Result<f64> {
    check_prob("p", p, 0.0, 1.0)?;
    Ok(0.5 + 0.5 * (1.0 - 4.0 * p * p / 3.0).powi(n as i32))
}

/// The `p` with `1 − 4p²/3 = (1 − 2q²)²`, i.e. `p = √(3(q² − q⁴))`.
pub fn matched_noise(q: f64) -> Result<f64> {
    check_prob("q", q, 0.0, std::f64::consts::FRAC_1_SQRT_2)?;
    Ok((3.0 * (q * q - q.powi(4))).sqrt())
}

/// Inverts [`predict_success`] on `[0, 3/4]` by bisection.
pub fn pick_p_for_success(n: usize, target: f64) -> Result<f64> {
    if !(target > 0.5 && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target success {target} outside (0.5, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let f = |p: f64| 0.5 + 0.5 * (1.0 - 4.0 * p * p / 3.0).powi(n as i32);
    let (mut lo, mut hi) = (0.0f64, 0.75f64);
    if f(hi) > target {
        return Err(Error::InvalidParameter(format!(
            "target {target} unreachable for n={n} (min success {})",
            f(hi)
        )));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// White-box variants that expose the noise vectors.
#[cfg(feature = "white-box")]
pub mod white_box {
    use super::*;

    /// Key generation returning the key error `e`.
    pub fn gen_traced(rng: &mut Rng, n: usize, p: f64) -> Result<(PublicKey, SecretKey, BitVec)> {
        gen_inner(rng, n, p)
    }

    /// Encryption returning the encryption noise `f`.
    pub fn enc_traced(rng: &mut Rng, pk: &PublicKey, mu: bool, p: f64) -> Result<(Ciphertext, BitVec)> {
        enc_inner(rng, pk.a.matrix(), &pk.b, mu, p)
    }

    /// Encryption under a raw code matrix, returning `f`.
    pub fn enc_matrix_traced(
        rng: &mut Rng,
        a: &BitMat,
        b: &BitVec,
        mu: bool,
        p: f64,
    ) -> Result<(Ciphertext, BitVec)> {
        enc_inner(rng, a, b, mu, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_round_trip() {
        let mut rng = Rng::new(5);
        let (pk, sk) = gen(&mut rng, 16, 0.0).unwrap();
        assert_eq!(pk.a.matrix().mul_vec(&sk.x), pk.b);
        for mu in [false, true] {
            let ct = enc(&mut rng, &pk, mu, 0.0).unwrap();
            assert!(ct.u.is_zero());
            assert_eq!(ct.c, mu);
            assert_eq!(dec(&sk, &ct).unwrap(), mu);
        }
    }

    #[test]
    fn predicted_values() {
        assert_eq!(predict_success(10, 0.0).unwrap(), 1.0);
        assert!((predict_success(1, 0.75).unwrap() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn flipping_c_flips_plaintext() {
        let mut rng = Rng::new(6);
        let (pk, sk) = gen(&mut rng, 12, 0.1).unwrap();
        let ct = enc(&mut rng, &pk, true, 0.1).unwrap();
        let flipped = Ciphertext {
            u: ct.u.clone(),
            c: !ct.c,
        };
        assert_eq!(dec(&sk, &flipped).unwrap(), !dec(&sk, &ct).unwrap());
    }

    #[test]
    fn bisection_inverts() {
        let p = pick_p_for_success(128, 0.75).unwrap();
        assert!((predict_success(128, p).unwrap() - 0.75).abs() < 1e-10);
        assert!(pick_p_for_success(128, 0.5).is_err());
    }
}

//! JSON file formats.
//!
//! Bit vectors are `{len, hex}` and matrices `{rows, cols, hex}`. The hex
//! string is lowercase and encodes the packed little-endian bytes, LSB-first
//! within each byte; matrices are flattened row-major first.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec, IsotropicCode};
use crate::owf::{OwfIndex, OwfInput};
use crate::pke::{Ciphertext, PublicKey, SecretKey};
use crate::supke::{seed_len, SuPublicKey};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BitVecRepr {
    pub len: usize,
    pub hex: String,
}

impl From<BitVec> for BitVecRepr {
    fn from(v: BitVec) -> Self {
        Self {
            len: v.len(),
            hex: v.to_hex(),
        }
    }
}

impl TryFrom<BitVecRepr> for BitVec {
    type Error = Error;

    fn try_from(r: BitVecRepr) -> Result<Self> {
        BitVec::from_hex(r.len, &r.hex)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BitMatRepr {
    pub rows: usize,
    pub cols: usize,
    pub hex: String,
}

impl From<BitMat> for BitMatRepr {
    fn from(m: BitMat) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            hex: m.to_hex(),
        }
    }
}

impl TryFrom<BitMatRepr> for BitMat {
    type Error = Error;

    fn try_from(r: BitMatRepr) -> Result<Self> {
        BitMat::from_hex(r.rows, r.cols, &r.hex)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PublicKeyFile {
    pub n: usize,
    pub p: f64,
    pub a: BitMat,
    pub b: BitVec,
}

impl From<&PublicKey> for PublicKeyFile {
    fn from(pk: &PublicKey) -> Self {
        Self {
            n: pk.n(),
            p: pk.p,
            a: pk.a.matrix().clone(),
            b: pk.b.clone(),
        }
    }
}

impl TryFrom<PublicKeyFile> for PublicKey {
    type Error = Error;

    fn try_from(f: PublicKeyFile) -> Result<Self> {
        if f.a.rows() != 2 * f.n || f.a.cols() != f.n || f.b.len() != 2 * f.n {
            return Err(Error::Format(format!("public key shapes do not match n={}", f.n)));
        }
        Ok(PublicKey {
            a: IsotropicCode::new(f.a)?,
            b: f.b,
            p: f.p,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecretKeyFile {
    pub x: BitVec,
}

impl From<&SecretKey> for SecretKeyFile {
    fn from(sk: &SecretKey) -> Self {
        Self { x: sk.x.clone() }
    }
}

impl From<SecretKeyFile> for SecretKey {
    fn from(f: SecretKeyFile) -> Self {
        SecretKey { x: f.x }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CiphertextFile {
    pub u: BitVec,
    pub c: u8,
}

impl From<&Ciphertext> for CiphertextFile {
    fn from(ct: &Ciphertext) -> Self {
        Self {
            u: ct.u.clone(),
            c: ct.c as u8,
        }
    }
}

impl TryFrom<CiphertextFile> for Ciphertext {
    type Error = Error;

    fn try_from(f: CiphertextFile) -> Result<Self> {
        match f.c {
            0 | 1 => Ok(Ciphertext { u: f.u, c: f.c == 1 }),
            c => Err(Error::Format(format!("ciphertext bit must be 0 or 1, got {c}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuPublicKeyFile {
    pub n: usize,
    pub p: f64,
    pub seed_hex: String,
    pub b: BitVec,
}

impl From<&SuPublicKey> for SuPublicKeyFile {
    fn from(pk: &SuPublicKey) -> Self {
        Self {
            n: pk.n,
            p: pk.p,
            seed_hex: pk.seed.to_hex(),
            b: pk.b.clone(),
        }
    }
}

impl TryFrom<SuPublicKeyFile> for SuPublicKey {
    type Error = Error;

    fn try_from(f: SuPublicKeyFile) -> Result<Self> {
        let seed = BitVec::from_hex(seed_len(f.n), &f.seed_hex)?;
        if f.b.len() != 2 * f.n {
            return Err(Error::Format(format!("b must have {} bits", 2 * f.n)));
        }
        Ok(SuPublicKey {
            n: f.n,
            p: f.p,
            seed,
            b: f.b,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OwfIndexFile {
    pub n: usize,
    pub k: usize,
    pub a: BitMat,
    pub b: BitMat,
}

impl From<&OwfIndex> for OwfIndexFile {
    fn from(i: &OwfIndex) -> Self {
        Self {
            n: i.n(),
            k: i.k(),
            a: i.a.matrix().clone(),
            b: i.b.matrix().clone(),
        }
    }
}

impl TryFrom<OwfIndexFile> for OwfIndex {
    type Error = Error;

    fn try_from(f: OwfIndexFile) -> Result<Self> {
        let joint = f.a.hstack(&f.b)?;
        if f.a.rows() != 2 * f.n || f.a.cols() != f.n || f.b.cols() != f.k {
            return Err(Error::Format("OWF index shapes do not match (n, k)".into()));
        }
        let rank = joint.rank();
        if rank != f.n + f.k {
            return Err(Error::NotFullRank {
                rank,
                expected: f.n + f.k,
            });
        }
        Ok(OwfIndex {
            a: IsotropicCode::new(f.a)?,
            b: IsotropicCode::new(f.b)?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OwfInputFile {
    pub r: BitVec,
    pub y: BitVec,
    pub e: BitVec,
}

impl From<&OwfInput> for OwfInputFile {
    fn from(x: &OwfInput) -> Self {
        Self {
            r: x.r.clone(),
            y: x.y.clone(),
            e: x.e.clone(),
        }
    }
}

impl From<OwfInputFile> for OwfInput {
    fn from(f: OwfInputFile) -> Self {
        OwfInput {
            r: f.r,
            y: f.y,
            e: f.e,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::sampling::{gen_symplpn, Instance};

    #[test]
    fn instance_round_trip() {
        let mut rng = Rng::new(40);
        let inst = gen_symplpn(&mut rng, 5, 7, 0.1, true).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
        let bare = serde_json::to_string(&inst.without_witness()).unwrap();
        assert!(!bare.contains("witness"));
    }

    #[test]
    fn bitvec_json_shape() {
        let v = BitVec::from_u64(10, 0b10_0000_0001);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"len":10,"hex":"0102"}"#
        );
    }
}

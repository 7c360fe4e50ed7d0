//! Noise samplers, random isotropic codes and instance generators.

use serde::{Deserialize, Serialize};

use crate::error::{check_prob, Error, Result};
use crate::gf2::{BitMat, BitVec, DualTracker, SpanTracker, SympVec};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lpn,
    Symplpn,
    Lsn,
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lpn" => Ok(Kind::Lpn),
            "symplpn" => Ok(Kind::Symplpn),
            "lsn" => Ok(Kind::Lsn),
            other => Err(Error::InvalidParameter(format!("unknown kind {other:?}"))),
        }
    }
}

/// Hidden data of a locally generated instance.
///
/// For structured instances `word = matrix · secret + error`. For LSN the
/// secret is `r || y`. Unstructured instances record a zero secret and the
/// word itself as error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub secret: BitVec,
    pub error: BitVec,
    pub structured: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: Kind,
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub matrix: BitMat,
    pub word: BitVec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Instance {
    /// Copy with the witness removed, as handed to attacks and oracles.
    pub fn without_witness(&self) -> Instance {
        Instance {
            witness: None,
            ..self.clone()
        }
    }

    /// The sympLPN view `(A, word)` of an LSN instance: the first `n` columns.
    pub fn lsn_a(&self) -> BitMat {
        self.matrix.col_range(0, self.n)
    }

    pub fn lsn_b(&self) -> BitMat {
        self.matrix.col_range(self.n, self.k)
    }

    /// Checks shapes against `kind`, `k` and `n`.
    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = match self.kind {
            Kind::Lpn => (self.n, self.k),
            Kind::Symplpn => (2 * self.n, self.k),
            Kind::Lsn => (2 * self.n, self.n + self.k),
        };
        if self.matrix.rows() != rows || self.matrix.cols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{:?} instance with k={}, n={} needs a {rows}x{cols} matrix, got {}x{}",
                self.kind,
                self.k,
                self.n,
                self.matrix.rows(),
                self.matrix.cols()
            )));
        }
        if self.word.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "word has {} bits, expected {rows}",
                self.word.len()
            )));
        }
        Ok(())
    }
}

/// Parameters of `D_p^{⊗n}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepolarizingParams {
    pub n: usize,
    pub p: f64,
}

impl DepolarizingParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_prob("p", p, 0.0, 1.0)?;
        Ok(Self { n, p })
    }

    pub fn sample(&self, rng: &mut Rng) -> SympVec {
        sample_depolarizing_unchecked(rng, self.n, self.p)
    }
}

/// Draws one pair of `D_p`: `(0,0)` w.p. `1 - p`, each other pattern w.p. `p/3`.
#[inline]
pub fn sample_pair(rng: &mut Rng, p: f64) -> (bool, bool) {
    if rng.unit() < p {
        match rng.below(3) {
            0 => (true, false),
            1 => (false, true),
            _ => (true, true),
        }
    } else {
        (false, false)
    }
}

#[inline]
pub fn uniform_pair(rng: &mut Rng) -> (bool, bool) {
    (rng.bit(), rng.bit())
}

/// `e ~ D_p^{⊗n}`.
pub fn sample_depolarizing(rng: &mut Rng, n: usize, p: f64) -> Result<SympVec> {
    check_prob("p", p, 0.0, 1.0)?;
    Ok(sample_depolarizing_unchecked(rng, n, p))
}

fn sample_depolarizing_unchecked(rng: &mut Rng, n: usize, p: f64) -> SympVec {
    let mut e = SympVec::zeros(n);
    if p == 0.0 {
        return e;
    }
    for j in 0..n {
        let pair = sample_pair(rng, p);
        if pair != (false, false) {
            e.set_pair(j, pair);
        }
    }
    e
}

/// Bernoulli(p) vector of length `len`.
pub fn sample_bernoulli(rng: &mut Rng, len: usize, p: f64) -> Result<BitVec> {
    check_prob("p", p, 0.0, 1.0)?;
    let mut v = BitVec::zeros(len);
    if p > 0.0 {
        for i in 0..len {
            if rng.bernoulli(p) {
                v.set(i, true);
            }
        }
    }
    Ok(v)
}

/// Draws a vector uniformly from `dual ∖ span`.
fn draw_outside_span(rng: &mut Rng, dual: &DualTracker, span: &SpanTracker) -> BitVec {
    loop {
        let w = dual.random_element(rng);
        if !span.contains(&w) {
            return w;
        }
    }
}

/// Uniform `2n × k` full-column-rank isotropic matrix.
///
/// Column `i` is uniform over the symplectic dual of the earlier columns,
/// rejected while it lies in their span.
pub fn sample_isotropic(rng: &mut Rng, n: usize, k: usize) -> Result<BitMat> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "isotropic dimension k={k} exceeds n={n}"
        )));
    }
    let mut dual = DualTracker::new(n);
    let mut span = SpanTracker::new(2 * n);
    let mut cols = Vec::with_capacity(k);
    for _ in 0..k {
        let w = draw_outside_span(rng, &dual, &span);
        dual.add(&w);
        span.insert(&w);
        cols.push(w);
    }
    BitMat::from_cols(2 * n, &cols)
}

/// Structured `(A, Ax + e)` or unstructured `(A, u)` sympLPN instance.
pub fn gen_symplpn(rng: &mut Rng, k: usize, n: usize, p: f64, structured: bool) -> Result<Instance> {
    check_prob("p", p, 0.0, 1.0)?;
    let a = sample_isotropic(rng, n, k)?;
    let witness = if structured {
        let x = rng.bits(k);
        let e = sample_depolarizing_unchecked(rng, n, p).into_bits();
        Witness {
            secret: x,
            error: e,
            structured: true,
        }
    } else {
        Witness {
            secret: BitVec::zeros(k),
            error: rng.bits(2 * n),
            structured: false,
        }
    };
    let word = a.mul_vec(&witness.secret).xor(&witness.error);
    Ok(Instance {
        kind: Kind::Symplpn,
        k,
        n,
        p,
        matrix: a,
        word,
        witness: Some(witness),
    })
}

/// Samples the LSN matrix pair: `A` Lagrangian (`2n × n`), `B` isotropic
/// (`2n × k`), `[A | B]` of rank `n + k`.
///
/// `A` is itself Lagrangian, so `B` cannot lie in the joint dual of `[A | B]`.
/// Each column of `B` is instead drawn from the dual of the earlier `B`
/// columns, outside the span of `A` and the earlier `B` columns.
pub fn sample_lsn_matrices(rng: &mut Rng, k: usize, n: usize) -> Result<(BitMat, BitMat)> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k={k} exceeds n={n}")));
    }
    let a = sample_isotropic(rng, n, n)?;
    let mut span = SpanTracker::new(2 * n);
    for c in a.col_vecs() {
        span.insert(&c);
    }
    let mut dual = DualTracker::new(n);
    let mut cols = Vec::with_capacity(k);
    for _ in 0..k {
        let w = draw_outside_span(rng, &dual, &span);
        dual.add(&w);
        span.insert(&w);
        cols.push(w);
    }
    Ok((a, BitMat::from_cols(2 * n, &cols)?))
}

/// Structured LSN instance `[A | B]·(r; y) + e`.
pub fn gen_lsn(rng: &mut Rng, k: usize, n: usize, p: f64) -> Result<Instance> {
    gen_lsn_with(rng, k, n, p, false)
}

/// As [`gen_lsn`]; `zero_y` forces `y = 0` (used to test the LSN reduction).
pub fn gen_lsn_with(rng: &mut Rng, k: usize, n: usize, p: f64, zero_y: bool) -> Result<Instance> {
    check_prob("p", p, 0.0, 1.0)?;
    let (a, b) = sample_lsn_matrices(rng, k, n)?;
    let r = rng.bits(n);
    let y = if zero_y { BitVec::zeros(k) } else { rng.bits(k) };
    let e = sample_depolarizing_unchecked(rng, n, p).into_bits();
    let word = a.mul_vec(&r).xor(&b.mul_vec(&y)).xor(&e);
    Ok(Instance {
        kind: Kind::Lsn,
        k,
        n,
        p,
        matrix: a.hstack(&b)?,
        word,
        witness: Some(Witness {
            secret: r.concat(&y),
            error: e,
            structured: true,
        }),
    })
}

/// LPN instance with uniform `n × k` matrix and Bernoulli(p) noise.
pub fn gen_lpn(rng: &mut Rng, k: usize, n: usize, p: f64, structured: bool) -> Result<Instance> {
    check_prob("p", p, 0.0, 1.0)?;
    let rows = (0..n).map(|_| rng.bits(k)).collect();
    let a = BitMat::from_rows(k, rows)?;
    let witness = if structured {
        Witness {
            secret: rng.bits(k),
            error: sample_bernoulli(rng, n, p)?,
            structured: true,
        }
    } else {
        Witness {
            secret: BitVec::zeros(k),
            error: rng.bits(n),
            structured: false,
        }
    };
    let word = a.mul_vec(&witness.secret).xor(&witness.error);
    Ok(Instance {
        kind: Kind::Lpn,
        k,
        n,
        p,
        matrix: a,
        word,
        witness: Some(witness),
    })
}

/// A sampled symplectic hyperplane rotation with its defining data.
#[derive(Clone, Debug)]
pub struct HyperplaneRotation {
    pub matrix: BitMat,
    pub r: BitVec,
    /// Zero-based pair index swapped with pair 0; `None` when `C = I`.
    pub k: Option<usize>,
}

/// Builds the rotation for a given `r ∈ Z_2^{2n}`.
///
/// `C = Π·C0` where `C0` fixes `e_1`, sends `f_1` to `r' = Π r` and corrects
/// the other basis vectors by `(r' ⊙ ·) e_1`. `Π` swaps pairs 1 and `k`.
/// With this `r'` the identity `C f_1 = r` holds exactly.
pub fn hyperplane_rotation_from(r: &BitVec) -> Result<HyperplaneRotation> {
    if !r.len().is_multiple_of(2) || r.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "rotation vector must have even length >= 4, got {}",
            r.len()
        )));
    }
    let n = r.len() / 2;
    let Some(k) = (0..n).find(|&j| r.get(n + j)) else {
        return Ok(HyperplaneRotation {
            matrix: BitMat::identity(2 * n),
            r: r.clone(),
            k: None,
        });
    };
    let swap = |v: &BitVec| -> BitVec {
        let mut out = v.clone();
        out.set(0, v.get(k));
        out.set(k, v.get(0));
        out.set(n, v.get(n + k));
        out.set(n + k, v.get(n));
        out
    };
    let r_prime = swap(r);
    debug_assert!(r_prime.get(n));
    let mut c0_cols = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let col = if i == 0 {
            BitVec::unit(2 * n, 0)
        } else if i == n {
            r_prime.clone()
        } else {
            let mut c = BitVec::unit(2 * n, i);
            // r' ⊙ e_j = r'_{n+j},  r' ⊙ f_j = r'_j
            let partner = if i < n { n + i } else { i - n };
            if r_prime.get(partner) {
                c.flip(0);
            }
            c
        };
        c0_cols.push(col);
    }
    let cols: Vec<BitVec> = c0_cols.iter().map(swap).collect();
    Ok(HyperplaneRotation {
        matrix: BitMat::from_cols(2 * n, &cols)?,
        r: r.clone(),
        k: Some(k),
    })
}

pub fn sample_hyperplane_rotation_full(rng: &mut Rng, n: usize) -> Result<HyperplaneRotation> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "hyperplane rotation needs n >= 2, got {n}"
        )));
    }
    hyperplane_rotation_from(&rng.bits(2 * n))
}

/// Random symplectic hyperplane rotation `C` (`2n × 2n`).
pub fn sample_hyperplane_rotation(rng: &mut Rng, n: usize) -> Result<BitMat> {
    Ok(sample_hyperplane_rotation_full(rng, n)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{is_isotropic, symp_dot};

    #[test]
    fn zero_noise_is_zero() {
        let mut rng = Rng::new(1);
        assert!(sample_depolarizing(&mut rng, 50, 0.0).unwrap().bits().is_zero());
        assert!(sample_depolarizing(&mut rng, 5, 1.5).is_err());
    }

    #[test]
    fn isotropic_sampler_shapes() {
        let mut rng = Rng::new(2);
        for (n, k) in [(1, 1), (2, 2), (5, 3), (8, 8)] {
            let a = sample_isotropic(&mut rng, n, k).unwrap();
            assert_eq!((a.rows(), a.cols()), (2 * n, k));
            assert!(is_isotropic(&a).unwrap());
            assert_eq!(a.rank(), k);
        }
        assert!(sample_isotropic(&mut rng, 2, 3).is_err());
    }

    #[test]
    fn rotation_without_z_part_is_identity() {
        let r = BitVec::from_u64(6, 0b000_101);
        let rot = hyperplane_rotation_from(&r).unwrap();
        assert_eq!(rot.k, None);
        assert_eq!(rot.matrix, BitMat::identity(6));
    }

    #[test]
    fn rotation_maps_f1_to_r_and_is_symplectic() {
        let mut rng = Rng::new(3);
        for _ in 0..200 {
            let rot = sample_hyperplane_rotation_full(&mut rng, 3).unwrap();
            let c = &rot.matrix;
            let f1 = BitVec::unit(6, 3);
            if rot.k.is_some() {
                assert_eq!(c.mul_vec(&f1), rot.r);
            } else {
                assert_eq!(*c, BitMat::identity(6));
            }
            for i in 0..6 {
                for j in 0..6 {
                    let (u, w) = (BitVec::unit(6, i), BitVec::unit(6, j));
                    assert_eq!(
                        symp_dot(&c.mul_vec(&u), &c.mul_vec(&w)),
                        symp_dot(&u, &w)
                    );
                }
            }
        }
    }

    #[test]
    fn lsn_matrices_have_full_rank() {
        let mut rng = Rng::new(4);
        let inst = gen_lsn(&mut rng, 3, 6, 0.1).unwrap();
        inst.validate().unwrap();
        assert_eq!(inst.matrix.rank(), 9);
        assert!(is_isotropic(&inst.lsn_a()).unwrap());
        assert!(is_isotropic(&inst.lsn_b()).unwrap());
    }
}

//! One-way function family `f_{A,B}(r, y, e) = Ar + By + e` on LSN matrices,
//! with the error restricted to pair-weight at most `floor(2.01·n·p)`.

use crate::error::{check_prob, Error, Result};
use crate::gf2::{pair_weight, BitMat, BitVec, IsotropicCode};
use crate::rng::Rng;
use crate::sampling::{sample_depolarizing, sample_lsn_matrices};

#[derive(Clone, Debug, PartialEq)]
pub struct OwfIndex {
    pub a: IsotropicCode,
    pub b: IsotropicCode,
}

impl OwfIndex {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn k(&self) -> usize {
        self.b.k()
    }

    /// `[A | B]`.
    pub fn joint(&self) -> BitMat {
        self.a
            .matrix()
            .hstack(self.b.matrix())
            .expect("A and B share 2n rows")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwfInput {
    pub r: BitVec,
    pub y: BitVec,
    pub e: BitVec,
}

/// Domain weight cap `floor(2.01·n·p)`.
pub fn weight_cap(n: usize, p: f64) -> usize {
    // Guard against 2.01*n*p landing a hair below an integer.
    (2.01 * n as f64 * p + 1e-9).floor() as usize
}

pub fn owf_gen(rng: &mut Rng, k: usize, n: usize, p: f64) -> Result<OwfIndex> {
    check_prob("p", p, 0.0, 1.0)?;
    let (a, b) = sample_lsn_matrices(rng, k, n)?;
    Ok(OwfIndex {
        a: IsotropicCode::new_unchecked(a),
        b: IsotropicCode::new_unchecked(b),
    })
}

/// Samples a domain element; an over-cap error is replaced by zero.
pub fn owf_sample(rng: &mut Rng, index: &OwfIndex, p: f64) -> Result<OwfInput> {
    let (input, _) = owf_sample_traced(rng, index, p)?;
    Ok(input)
}

/// As [`owf_sample`], also reporting whether the cap replacement fired.
pub fn owf_sample_traced(rng: &mut Rng, index: &OwfIndex, p: f64) -> Result<(OwfInput, bool)> {
    let n = index.n();
    let r = rng.bits(n);
    let y = rng.bits(index.k());
    let e = sample_depolarizing(rng, n, p)?.into_bits();
    let capped = pair_weight(&e) > weight_cap(n, p);
    let e = if capped { BitVec::zeros(2 * n) } else { e };
    Ok((OwfInput { r, y, e }, capped))
}

fn check_dims(index: &OwfIndex, input: &OwfInput) -> Result<()> {
    let n = index.n();
    if input.r.len() != n || input.y.len() != index.k() || input.e.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "input (r={}, y={}, e={}) for index n={}, k={}",
            input.r.len(),
            input.y.len(),
            input.e.len(),
            n,
            index.k()
        )));
    }
    Ok(())
}

/// `A·r + B·y + e`.
pub fn owf_eval(index: &OwfIndex, input: &OwfInput) -> Result<BitVec> {
    check_dims(index, input)?;
    Ok(index
        .a
        .matrix()
        .mul_vec(&input.r)
        .xor(&index.b.matrix().mul_vec(&input.y))
        .xor(&input.e))
}

/// True iff `candidate` respects the cap and maps to `target`.
pub fn owf_verify_preimage(
    index: &OwfIndex,
    candidate: &OwfInput,
    target: &BitVec,
    p: f64,
) -> Result<bool> {
    check_dims(index, candidate)?;
    if pair_weight(&candidate.e) > weight_cap(index.n(), p) {
        return Ok(false);
    }
    Ok(&owf_eval(index, candidate)? == target)
}

/// Binary entropy in bits.
pub fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// Left-hand side `H2(δ) + δ·log2 3` of the quantum GV inequality.
pub fn qgv_lhs(delta: f64) -> f64 {
    h2(delta) + delta * 3f64.log2()
}

/// `H2(δ) + δ·log2 3 < 1 − R`.
pub fn qgv_predicate(delta: f64, rate: f64) -> Result<bool> {
    check_prob("delta", delta, 0.0, 1.0)?;
    check_prob("rate", rate, 0.0, 1.0)?;
    Ok(qgv_lhs(delta) < 1.0 - rate)
}

/// Relative distance the security argument needs for noise rate `p`.
pub fn required_delta(p: f64) -> f64 {
    4.03 * p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_maps_to_zero() {
        let mut rng = Rng::new(12);
        let idx = owf_gen(&mut rng, 2, 5, 0.1).unwrap();
        let zero = OwfInput {
            r: BitVec::zeros(5),
            y: BitVec::zeros(2),
            e: BitVec::zeros(10),
        };
        assert!(owf_eval(&idx, &zero).unwrap().is_zero());
    }

    #[test]
    fn qgv_examples() {
        assert!(qgv_predicate(1e-9, 0.9).unwrap());
        assert!(!qgv_predicate(0.5, 0.5).unwrap());
        assert!((qgv_lhs(0.5) - 1.792_481_250_360_578).abs() < 1e-12);
    }

    #[test]
    fn cap_uses_floor() {
        assert_eq!(weight_cap(6, 0.05), 0);
        assert_eq!(weight_cap(100, 0.1), 20);
        assert_eq!(weight_cap(256, 0.1), 51);
    }

    #[test]
    fn sampled_input_verifies() {
        let mut rng = Rng::new(13);
        let idx = owf_gen(&mut rng, 4, 16, 0.1).unwrap();
        for _ in 0..50 {
            let x = owf_sample(&mut rng, &idx, 0.1).unwrap();
            let y = owf_eval(&idx, &x).unwrap();
            assert!(owf_verify_preimage(&idx, &x, &y, 0.1).unwrap());
        }
    }
}

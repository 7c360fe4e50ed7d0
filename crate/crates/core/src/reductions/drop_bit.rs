use super::symmetrize::{permute_pair_rows, symmetrize_overlay};
use super::{Branch, Decision, Oracle};
use crate::error::{check_prob, Error, Result};
use crate::gf2::{BitMat, BitVec};
use crate::rng::Rng;
use crate::sampling::{sample_hyperplane_rotation_full, Instance, Kind, Witness};

/// Knobs for [`drop_bit_transform`]. `None` means the default formula.
#[derive(Clone, Copy, Debug, Default)]
pub struct DropBitConfig {
    /// Number of flooded pairs `m`.
    pub m: Option<usize>,
    /// Output noise rate `p'`.
    pub p_prime: Option<f64>,
}

/// `m = ceil(log2(n)² / (1 − 4p/3))`, clamped to `[1, n]`.
pub fn default_flood_count(n: usize, p: f64) -> usize {
    let l = (n as f64).log2();
    let m = (l * l / (1.0 - 4.0 * p / 3.0)).ceil();
    (m.max(1.0) as usize).min(n)
}

/// `p' = p + log2(n)² / n`, capped at 3/4.
pub fn default_p_prime(n: usize, p: f64) -> f64 {
    let l = (n as f64).log2();
    (p + l * l / n as f64).min(0.75)
}

/// Output of the one-bit reduction before the oracle call.
#[derive(Clone, Debug)]
pub struct DropBitTransform {
    /// `sympLPN(n − 1, n, p')` instance. When the input carried a witness,
    /// the output carries the traced error and, if the word lies within
    /// that error of the code, the matching secret.
    pub instance: Instance,
    /// Pair that the rotation swapped with pair 0 (zero-based).
    pub k: usize,
    /// Pairs flooded before symmetrization.
    pub m: usize,
    /// Rotations redrawn because they were the identity.
    pub rotation_resamples: usize,
    /// Binomial redraws inside symmetrization.
    pub symmetrize_resamples: usize,
}

fn random_invertible(rng: &mut Rng, d: usize) -> BitMat {
    loop {
        let rows = (0..d).map(|_| rng.bits(d)).collect();
        let m = BitMat::from_rows(d, rows).expect("rows have length d");
        if m.rank() == d {
            return m;
        }
    }
}

/// Maps `sympLPN(n, n, p)` to `sympLPN(n − 1, n, p')`.
///
/// Steps: optional uniform flood of pair 0 (`Flooded`), restriction to
/// `V0 = {v ∈ im A : v_0 = 0}` with the word fixed up by an element of
/// `V ∖ V0`, a hyperplane rotation `C ≠ I`, uniform noise on pair `k` and on
/// `m − 1` further pairs, then symmetrization.
pub fn drop_bit_transform(
    inst: &Instance,
    branch: Branch,
    cfg: &DropBitConfig,
    rng: &mut Rng,
) -> Result<DropBitTransform> {
    if inst.kind != Kind::Symplpn || inst.k != inst.n {
        return Err(Error::InvalidParameter(
            "drop_logical_bit needs a sympLPN(n, n, p) instance".into(),
        ));
    }
    inst.validate()?;
    let n = inst.n;
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    check_prob("p", inst.p, 0.0, 0.75)?;
    let a = &inst.matrix;
    let mut u = inst.word.clone();
    // Error traced alongside the word, when a witness is present.
    let mut err = inst
        .witness
        .as_ref()
        .filter(|w| w.structured)
        .map(|w| w.error.clone());

    let overlay_pair = |rng: &mut Rng, u: &mut BitVec, err: &mut Option<BitVec>, j: usize| {
        for idx in [j, n + j] {
            if rng.bit() {
                u.flip(idx);
                if let Some(e) = err.as_mut() {
                    e.flip(idx);
                }
            }
        }
    };

    if branch == Branch::Flooded {
        overlay_pair(rng, &mut u, &mut err, 0);
    }

    // V0 and the fix-up vector a* ∈ V ∖ V0.
    let cols = a.col_vecs();
    let Some(star) = cols.iter().position(|c| c.get(0)) else {
        return Err(Error::Degenerate("im(A) lies inside f_1's hyperplane".into()));
    };
    let a_star = cols[star].clone();
    let v0: Vec<BitVec> = cols
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != star)
        .map(|(_, c)| if c.get(0) { c.xor(&a_star) } else { c.clone() })
        .collect();
    let a0 = BitMat::from_cols(2 * n, &v0)?.mul(&random_invertible(rng, n - 1));
    if u.get(0) {
        u.xor_assign(&a_star);
    }

    let mut rotation_resamples = 0;
    let rot = loop {
        let rot = sample_hyperplane_rotation_full(rng, n)?;
        if rot.k.is_some() {
            break rot;
        }
        rotation_resamples += 1;
    };
    let k = rot.k.expect("loop exits with a rotation");
    let c = &rot.matrix;
    let b = c.mul(&a0);
    let mut u = c.mul_vec(&u);
    let mut err = err.map(|e| c.mul_vec(&e));

    let m = cfg.m.unwrap_or_else(|| default_flood_count(n, inst.p)).clamp(1, n);
    let mut noisy = vec![k];
    noisy.extend((0..n).filter(|&j| j != k).take(m - 1));
    for &j in &noisy {
        overlay_pair(rng, &mut u, &mut err, j);
    }

    let sym = symmetrize_overlay(rng, n, &noisy)?;
    let word = sym.apply(&u);
    let err = err.map(|e| sym.apply(&e));
    let matrix = permute_pair_rows(&b, &sym.perm);

    let witness = err.map(|e| {
        let secret = matrix.solve(&word.xor(&e)).expect("dimensions agree");
        Witness {
            structured: secret.is_some(),
            secret: secret.unwrap_or_else(|| BitVec::zeros(n - 1)),
            error: e,
        }
    });
    let p_prime = cfg.p_prime.unwrap_or_else(|| default_p_prime(n, inst.p));
    Ok(DropBitTransform {
        instance: Instance {
            kind: Kind::Symplpn,
            k: n - 1,
            n,
            p: p_prime,
            matrix,
            word,
            witness,
        },
        k,
        m,
        rotation_resamples,
        symmetrize_resamples: sym.resamples,
    })
}

/// Decides `sympLPN(n, n, p)` with one call to a `sympLPN(n − 1, n, p')`
/// oracle, forwarding its answer.
pub fn drop_logical_bit(
    inst: &Instance,
    oracle: &dyn Oracle,
    branch: Branch,
    cfg: &DropBitConfig,
    rng: &mut Rng,
) -> Result<Decision> {
    let t = drop_bit_transform(inst, branch, cfg, rng)?;
    Ok(oracle.decide(&t.instance, rng))
}

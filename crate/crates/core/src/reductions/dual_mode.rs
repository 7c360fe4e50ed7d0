use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec, DualTracker, SpanTracker};
use crate::rng::Rng;
use crate::sampling::{Instance, Kind};

/// Syndrome-style form `(H, w = b ⊙ H)` of a `sympLPN(n − 1, n, p)` sample.
#[derive(Clone, Debug)]
pub struct DualMode {
    /// `2n × (n + 1)`, every column in `im(A)⊥`.
    pub h: BitMat,
    /// `w_j = b ⊙ h_j`.
    pub w: BitVec,
}

fn uniform_outside(rng: &mut Rng, dual: &DualTracker, span: &SpanTracker) -> BitVec {
    loop {
        let v = dual.random_element(rng);
        if !span.contains(&v) {
            return v;
        }
    }
}

/// Extends `S = im(A)` by `u ∈ S⊥ ∖ S` to an `n`-dimensional isotropic
/// `im(B)` (random basis), draws `v ∈ S⊥ ∖ im(B)` and returns
/// `(H = [B | v], b ⊙ H)`.
pub fn dual_mode_transform(inst: &Instance, rng: &mut Rng) -> Result<DualMode> {
    if inst.kind != Kind::Symplpn || inst.k + 1 != inst.n {
        return Err(Error::InvalidParameter(
            "dual-mode transform needs a sympLPN(n − 1, n, p) instance".into(),
        ));
    }
    inst.validate()?;
    let n = inst.n;
    let a = &inst.matrix;
    let cols = a.col_vecs();
    let mut dual = DualTracker::new(n);
    let mut span = SpanTracker::new(2 * n);
    for c in &cols {
        dual.add(c);
        if !span.insert(c) {
            return Err(Error::NotFullRank {
                rank: span.dim(),
                expected: inst.k,
            });
        }
    }
    let u = uniform_outside(rng, &dual, &span);
    span.insert(&u);
    let mut b_cols = cols;
    b_cols.push(u);
    let b = BitMat::from_cols(2 * n, &b_cols)?;
    let b = loop {
        let rows = (0..n).map(|_| rng.bits(n)).collect();
        let g = BitMat::from_rows(n, rows)?;
        if g.rank() == n {
            break b.mul(&g);
        }
    };
    let v = uniform_outside(rng, &dual, &span);
    let h = b.hstack(&BitMat::from_cols(2 * n, &[v])?)?;
    let w = h.vec_mul(&inst.word.swap_halves());
    Ok(DualMode { h, w })
}

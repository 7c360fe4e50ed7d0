use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec, SympVec};
use crate::rng::Rng;

/// Extra noise and pair permutation that spread uniform noise on a known
/// set `M` of pairs into `D_{m/n}` on every pair.
#[derive(Clone, Debug)]
pub struct SymmetrizeOverlay {
    /// Uniform bits on `M` and on `T − m` further pairs, zero elsewhere.
    pub overlay: BitVec,
    /// Pair `j` moves to pair `perm[j]`.
    pub perm: Vec<usize>,
    /// Binomial draws rejected because `T < m`.
    pub resamples: usize,
}

impl SymmetrizeOverlay {
    /// `π(v + overlay)`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        permute_pairs(&v.xor(&self.overlay), &self.perm)
    }
}

/// Moves pair `j` of `v` to pair `perm[j]`.
pub fn permute_pairs(v: &BitVec, perm: &[usize]) -> BitVec {
    let n = perm.len();
    assert_eq!(v.len(), 2 * n, "permutation size mismatch");
    let mut out = BitVec::zeros(2 * n);
    for (j, &to) in perm.iter().enumerate() {
        out.set(to, v.get(j));
        out.set(n + to, v.get(n + j));
    }
    out
}

/// Applies the pair permutation to the rows of a `2n × k` matrix.
pub fn permute_pair_rows(m: &BitMat, perm: &[usize]) -> BitMat {
    let n = perm.len();
    assert_eq!(m.rows(), 2 * n, "permutation size mismatch");
    let mut src = vec![0; 2 * n];
    for (j, &to) in perm.iter().enumerate() {
        src[to] = j;
        src[n + to] = n + j;
    }
    m.select_rows(&src)
}

/// Samples the overlay for a noisy set `noisy` of `m` pairs out of `n`.
///
/// `T ~ Bin(n, 4q/3)` with `q = m/n`, redrawn while `T < m`. When
/// `4q/3 ≥ 1` every pair is flooded.
pub fn symmetrize_overlay(rng: &mut Rng, n: usize, noisy: &[usize]) -> Result<SymmetrizeOverlay> {
    let m = noisy.len();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "noisy set of size {m} for n = {n}"
        )));
    }
    let mut in_m = vec![false; n];
    for &j in noisy {
        if j >= n || in_m[j] {
            return Err(Error::InvalidParameter(format!(
                "noisy set has a bad or repeated index {j}"
            )));
        }
        in_m[j] = true;
    }
    let rate = (4.0 * m as f64 / (3.0 * n as f64)).min(1.0);
    let binom = Binomial::new(n as u64, rate)
        .map_err(|e| Error::InvalidParameter(format!("binomial: {e}")))?;
    let mut resamples = 0;
    let t = loop {
        let t = binom.sample(rng) as usize;
        if t >= m {
            break t;
        }
        resamples += 1;
    };
    let rest: Vec<usize> = (0..n).filter(|&j| !in_m[j]).collect();
    let extra = rng.sample_indices(rest.len(), t - m);
    let mut overlay = SympVec::zeros(n);
    for j in noisy.iter().copied().chain(extra.into_iter().map(|i| rest[i])) {
        overlay.set_pair(j, (rng.bit(), rng.bit()));
    }
    Ok(SymmetrizeOverlay {
        overlay: overlay.into_bits(),
        perm: rng.permutation(n),
        resamples,
    })
}

#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub e: SympVec,
    pub perm: Vec<usize>,
    pub resamples: usize,
}

/// `π(e + e')` for noise `e` supported on the pairs in `noisy`.
pub fn symmetrize_noise(rng: &mut Rng, e: &SympVec, noisy: &[usize]) -> Result<Symmetrized> {
    let n = e.n();
    let mut in_m = vec![false; n];
    for &j in noisy {
        if j < n {
            in_m[j] = true;
        }
    }
    if (0..n).any(|j| !in_m[j] && e.pair(j) != (false, false)) {
        return Err(Error::InvalidParameter(
            "noise outside the declared noisy set".into(),
        ));
    }
    let o = symmetrize_overlay(rng, n, noisy)?;
    Ok(Symmetrized {
        e: SympVec::new(o.apply(e.bits()))?,
        perm: o.perm,
        resamples: o.resamples,
    })
}

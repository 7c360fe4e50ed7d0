use super::bitmat::{kernel_vectors, BitMat, Echelon};
use super::bitvec::BitVec;
use crate::error::{Error, Result};

/// A vector of `Z_2^{2n}` read as `n` qubit pairs `(v[j], v[n + j])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SympVec {
    n: usize,
    v: BitVec,
}

impl SympVec {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            v: BitVec::zeros(2 * n),
        }
    }

    pub fn new(v: BitVec) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::OddRowCount(v.len()));
        }
        Ok(Self { n: v.len() / 2, v })
    }

    /// `e_j`, the X-part unit vector of pair `j`.
    pub fn e(n: usize, j: usize) -> Self {
        Self {
            n,
            v: BitVec::unit(2 * n, j),
        }
    }

    /// `f_j`, the Z-part unit vector of pair `j`.
    pub fn f(n: usize, j: usize) -> Self {
        Self {
            n,
            v: BitVec::unit(2 * n, n + j),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> &BitVec {
        &self.v
    }

    pub fn into_bits(self) -> BitVec {
        self.v
    }

    #[inline]
    pub fn pair(&self, j: usize) -> (bool, bool) {
        (self.v.get(j), self.v.get(self.n + j))
    }

    #[inline]
    pub fn set_pair(&mut self, j: usize, (a, b): (bool, bool)) {
        self.v.set(j, a);
        self.v.set(self.n + j, b);
    }

    /// Pair as a 2-bit code `a | b << 1`.
    #[inline]
    pub fn pair_code(&self, j: usize) -> u8 {
        let (a, b) = self.pair(j);
        a as u8 | (b as u8) << 1
    }

    /// Number of pairs different from `(0, 0)`.
    pub fn pair_weight(&self) -> usize {
        pair_weight(&self.v)
    }

    pub fn inner(&self, other: &SympVec) -> Result<bool> {
        symp_inner(self, other)
    }

    pub fn xor(&self, other: &SympVec) -> SympVec {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        SympVec {
            n: self.n,
            v: self.v.xor(&other.v),
        }
    }
}

/// Pair-weight of a raw length-`2n` vector.
pub fn pair_weight(v: &BitVec) -> usize {
    assert!(v.len().is_multiple_of(2), "pair_weight needs even length");
    let n = v.len() / 2;
    let lo = v.extract(0, n);
    let hi = v.extract(n, n);
    lo.words()
        .iter()
        .zip(hi.words())
        .map(|(a, b)| (a | b).count_ones() as usize)
        .sum()
}

/// `a1·b2 + a2·b1` for `u = (a1, b1)`, `w = (a2, b2)`.
pub fn symp_inner(u: &SympVec, w: &SympVec) -> Result<bool> {
    if u.n != w.n {
        return Err(Error::DimensionMismatch(format!(
            "symplectic product of n={} and n={}",
            u.n, w.n
        )));
    }
    Ok(symp_dot(&u.v, &w.v))
}

/// Symplectic product on raw even-length vectors.
#[inline]
pub fn symp_dot(u: &BitVec, w: &BitVec) -> bool {
    u.swap_halves().dot(w)
}

fn check_even(m: &BitMat) -> Result<()> {
    if !m.rows().is_multiple_of(2) {
        Err(Error::OddRowCount(m.rows()))
    } else {
        Ok(())
    }
}

/// Gram matrix `G[i][j] = col_i ⊙ col_j`.
pub fn symp_gram(m: &BitMat) -> Result<BitMat> {
    check_even(m)?;
    let cols = m.col_vecs();
    let swapped: Vec<BitVec> = cols.iter().map(BitVec::swap_halves).collect();
    let k = cols.len();
    let mut g = BitMat::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            if swapped[i].dot(&cols[j]) {
                g.set(i, j, true);
                g.set(j, i, true);
            }
        }
    }
    Ok(g)
}

/// Basis of `im(s)⊥` as columns, `2n - rank(s)` of them.
pub fn symp_dual_basis(s: &BitMat) -> Result<BitMat> {
    check_even(s)?;
    // v ⊙ c = swap(c) · v, so the dual is the kernel of the swapped columns.
    let constraints: Vec<BitVec> = s.col_vecs().iter().map(BitVec::swap_halves).collect();
    let c = BitMat::from_rows(s.rows(), constraints)?;
    Ok(c.kernel_basis())
}

/// Greedy column basis of `im(m)`: keeps each column that raises the rank.
pub fn column_basis(m: &BitMat) -> BitMat {
    let mut span = SpanTracker::new(m.rows());
    let kept: Vec<BitVec> = m
        .col_vecs()
        .into_iter()
        .filter(|c| span.insert(c))
        .collect();
    BitMat::from_cols(m.rows(), &kept).expect("columns share the row count")
}

/// Basis of `rad(im s) = im(s) ∩ im(s)⊥`.
pub fn radical_basis(s: &BitMat) -> Result<BitMat> {
    let basis = column_basis(s);
    let g = symp_gram(&basis)?;
    // c ∈ ker(G) exactly when basis·c is orthogonal to every basis column.
    let ker = g.kernel_basis();
    Ok(basis.mul(&ker))
}

/// Decomposition of `im(s)` into radical vectors and hyperbolic pairs.
#[derive(Clone, Debug)]
pub struct SymplecticBasis {
    /// Vectors of `im(s) ∩ im(s)⊥`.
    pub u: BitMat,
    /// `v[i] ⊙ w[j] = δ_ij`, `v[i] ⊙ v[j] = w[i] ⊙ w[j] = 0`.
    pub v: BitMat,
    pub w: BitMat,
}

/// Symplectic Gram-Schmidt on the columns of `s`.
pub fn symplectic_subspace_basis(s: &BitMat) -> Result<SymplecticBasis> {
    check_even(s)?;
    let rows = s.rows();
    let mut pending: Vec<BitVec> = column_basis(s).col_vecs();
    pending.reverse();
    let (mut us, mut vs, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    while let Some(v) = pending.pop() {
        // `pending` is processed back to front; partner search scans the same order.
        let Some(pos) = pending.iter().rposition(|x| symp_dot(&v, x)) else {
            us.push(v);
            continue;
        };
        let w = pending.remove(pos);
        for x in pending.iter_mut() {
            let xv = symp_dot(x, &v);
            let xw = symp_dot(x, &w);
            // Projecting out the (v, w) plane: x ⊙ v and x ⊙ w both become 0.
            if xw {
                x.xor_assign(&v);
            }
            if xv {
                x.xor_assign(&w);
            }
        }
        vs.push(v);
        ws.push(w);
    }
    Ok(SymplecticBasis {
        u: BitMat::from_cols(rows, &us)?,
        v: BitMat::from_cols(rows, &vs)?,
        w: BitMat::from_cols(rows, &ws)?,
    })
}

/// True iff all column pairs are symplectically orthogonal.
pub fn is_isotropic(m: &BitMat) -> Result<bool> {
    Ok(symp_gram(m)?.is_zero())
}

/// Same predicate via the block test: with `M = [M1; M2]`, `M1ᵀ M2` must be
/// symmetric.
pub fn is_isotropic_block(m: &BitMat) -> Result<bool> {
    check_even(m)?;
    let n = m.rows() / 2;
    let top: Vec<usize> = (0..n).collect();
    let bottom: Vec<usize> = (n..2 * n).collect();
    let m1 = m.select_rows(&top);
    let m2 = m.select_rows(&bottom);
    let p = m1.transpose().mul(&m2);
    Ok(p == p.transpose())
}

/// A `2n × k` full-column-rank isotropic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicCode(BitMat);

impl IsotropicCode {
    pub fn new(m: BitMat) -> Result<Self> {
        if !is_isotropic(&m)? {
            return Err(Error::NotIsotropic);
        }
        let rank = m.rank();
        if rank != m.cols() {
            return Err(Error::NotFullRank {
                rank,
                expected: m.cols(),
            });
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: BitMat) -> Self {
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows() / 2
    }

    pub fn k(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &BitMat {
        &self.0
    }

    pub fn into_matrix(self) -> BitMat {
        self.0
    }
}

/// Incrementally maintained symplectic dual of a growing set of vectors.
///
/// The constraint rows `swap(c)` are kept in reduced echelon form, so the
/// dual basis is always the canonical free-variable kernel basis. Its order
/// (ascending free column) is the "ordered basis" used by seed expansion.
#[derive(Clone, Debug)]
pub struct DualTracker {
    dim: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl DualTracker {
    /// Tracker for the dual of the empty set in `Z_2^{2n}`.
    pub fn new(n: usize) -> Self {
        Self {
            dim: 2 * n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Dimension of the current dual space.
    pub fn dual_dim(&self) -> usize {
        self.dim - self.rows.len()
    }

    /// Adds `c` to the constrained set. Returns false when `c` was already
    /// in the span of earlier vectors (the dual does not shrink).
    pub fn add(&mut self, c: &BitVec) -> bool {
        let mut row = c.swap_halves();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if row.get(p) {
                row.xor_assign(r);
            }
        }
        let Some(p) = row.first_one() else {
            return false;
        };
        for r in self.rows.iter_mut() {
            if r.get(p) {
                r.xor_assign(&row);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, row);
        self.pivots.insert(at, p);
        true
    }

    fn echelon(&self) -> Echelon {
        let rref = BitMat::from_rows(self.dim, self.rows.clone()).expect("rows have length 2n");
        Echelon {
            rref,
            pivots: self.pivots.clone(),
        }
    }

    /// Free columns of the constraint system; one per dual basis vector.
    pub fn free_columns(&self) -> Vec<usize> {
        self.echelon().free_columns()
    }

    /// Ordered dual basis.
    pub fn basis(&self) -> Vec<BitVec> {
        kernel_vectors(&self.echelon())
    }

    /// Coefficients of a dual vector in the ordered basis: its bits at the
    /// free columns.
    pub fn coords(&self, v: &BitVec) -> BitVec {
        let free = self.free_columns();
        let mut out = BitVec::zeros(free.len());
        for (i, &f) in free.iter().enumerate() {
            if v.get(f) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.rows.iter().all(|r| !r.dot(v))
    }

    /// The dual vector with the given coordinates in the ordered basis.
    ///
    /// Same as summing basis vectors, without materializing the basis: the
    /// free columns take the coefficients, each pivot is then read off its
    /// echelon row.
    pub fn from_coords(&self, coeffs: &BitVec) -> BitVec {
        let free = self.free_columns();
        assert_eq!(coeffs.len(), free.len(), "coefficient count mismatch");
        let mut v = BitVec::zeros(self.dim);
        for (i, &f) in free.iter().enumerate() {
            if coeffs.get(i) {
                v.set(f, true);
            }
        }
        self.fill_pivots(v)
    }

    /// Uniform element of the dual.
    pub fn random_element(&self, rng: &mut crate::rng::Rng) -> BitVec {
        let mut v = rng.bits(self.dim);
        for &p in &self.pivots {
            v.set(p, false);
        }
        self.fill_pivots(v)
    }

    fn fill_pivots(&self, mut v: BitVec) -> BitVec {
        // Pivot bits of v are zero here, and each row has a single pivot.
        let sets: Vec<(usize, bool)> = self
            .rows
            .iter()
            .zip(&self.pivots)
            .map(|(r, &p)| (p, r.dot(&v)))
            .collect();
        for (p, b) in sets {
            v.set(p, b);
        }
        v
    }
}

/// Incremental span membership over `Z_2^len`.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl SpanTracker {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &BitVec) -> BitVec {
        let mut x = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if x.get(p) {
                x.xor_assign(r);
            }
        }
        x
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "span tracker length mismatch");
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns true iff it raised the dimension.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "span tracker length mismatch");
        let x = self.reduce(v);
        let Some(p) = x.first_one() else {
            return false;
        };
        for r in self.rows.iter_mut() {
            if r.get(p) {
                r.xor_assign(&x);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, x);
        self.pivots.insert(at, p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_basis_products() {
        let n = 2;
        assert!(symp_inner(&SympVec::e(n, 0), &SympVec::f(n, 0)).unwrap());
        assert!(!symp_inner(&SympVec::e(n, 0), &SympVec::e(n, 1)).unwrap());
        assert!(!symp_inner(&SympVec::e(n, 0), &SympVec::f(n, 1)).unwrap());
        assert!(symp_inner(&SympVec::e(2, 0), &SympVec::e(3, 0)).is_err());
    }

    #[test]
    fn dual_of_e1_in_one_qubit() {
        let s = BitMat::from_cols(2, &[SympVec::e(1, 0).into_bits()]).unwrap();
        let d = symp_dual_basis(&s).unwrap();
        assert_eq!(d.cols(), 1);
        assert_eq!(d.col(0), SympVec::e(1, 0).into_bits());
    }

    #[test]
    fn dual_of_empty_is_everything() {
        let d = symp_dual_basis(&BitMat::zeros(6, 0)).unwrap();
        assert_eq!(d.cols(), 6);
        assert_eq!(d.rank(), 6);
    }

    #[test]
    fn hyperbolic_pair_decomposes() {
        let s = BitMat::from_cols(
            4,
            &[SympVec::e(2, 0).into_bits(), SympVec::f(2, 0).into_bits()],
        )
        .unwrap();
        let b = symplectic_subspace_basis(&s).unwrap();
        assert_eq!(b.u.cols(), 0);
        assert_eq!(b.v.cols(), 1);
        assert!(symp_dot(&b.v.col(0), &b.w.col(0)));
    }

    #[test]
    fn isotropic_checks() {
        let single = BitMat::from_cols(4, &[BitVec::from_u64(4, 0b1011)]).unwrap();
        assert!(is_isotropic(&single).unwrap());
        let ef = BitMat::from_cols(
            4,
            &[SympVec::e(2, 0).into_bits(), SympVec::f(2, 0).into_bits()],
        )
        .unwrap();
        assert!(!is_isotropic(&ef).unwrap());
        assert!(!is_isotropic_block(&ef).unwrap());
        assert!(matches!(
            is_isotropic(&BitMat::zeros(3, 1)),
            Err(Error::OddRowCount(3))
        ));
    }

    #[test]
    fn dual_tracker_matches_dual_basis() {
        let cols = [BitVec::from_u64(6, 0b100101), BitVec::from_u64(6, 0b010011)];
        let mut t = DualTracker::new(3);
        for c in &cols {
            assert!(t.add(c));
        }
        assert!(!t.add(&cols[0].xor(&cols[1])));
        let s = BitMat::from_cols(6, &cols).unwrap();
        let expect = symp_dual_basis(&s).unwrap().col_vecs();
        assert_eq!(t.basis(), expect);
        for b in &expect {
            assert!(t.contains(b));
            assert_eq!(t.coords(b).weight(), 1);
        }
    }

    #[test]
    fn pair_weight_counts_pairs() {
        // pairs: (1,1), (0,1), (0,0)
        let v = BitVec::from_bools(&[true, false, false, true, true, false]);
        assert_eq!(pair_weight(&v), 2);
    }
}

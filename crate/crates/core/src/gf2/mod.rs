//! Bit-packed GF(2) linear algebra and the symplectic form on `Z_2^{2n}`.

mod bitmat;
mod bitvec;
mod symplectic;

pub use bitmat::{BitMat, Echelon};
pub use bitvec::BitVec;
pub use symplectic::{
    column_basis, is_isotropic, is_isotropic_block, pair_weight, radical_basis, symp_dot,
    symp_dual_basis, symp_gram, symp_inner, symplectic_subspace_basis, DualTracker,
    IsotropicCode, SpanTracker, SympVec, SymplecticBasis,
};

/// Rank over GF(2).
pub fn rank(m: &BitMat) -> usize {
    m.rank()
}

/// Some `x` with `m · x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &BitMat, b: &BitVec) -> crate::Result<Option<BitVec>> {
    m.solve(b)
}

/// Basis of the right kernel, as columns.
pub fn kernel_basis(m: &BitMat) -> BitMat {
    m.kernel_basis()
}

//! Classical toolkit for symplectic LPN.
//!
//! Vectors in `Z_2^{2n}` use the symplectic layout: bit `j` and bit `n + j`
//! together describe qubit `j`. Everything is bit-packed into `u64` words.
//!
//! The crate is split into
//!
//! - [`gf2`]: GF(2) vectors and matrices, symplectic form, duals, radicals.
//! - [`sampling`]: seeded samplers for noise, isotropic codes and instances.
//! - [`pke`] and [`supke`]: the public-key scheme and its uniform-key variant.
//! - [`owf`]: the one-way function family built from LSN matrices.
//! - [`reductions`]: executable versions of the classical reductions.
//! - [`attacks`]: brute force, Prange ISD and the pair-aware variant.
//! - [`harness`]: statistics and experiment drivers.

pub mod attacks;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod io;
pub mod owf;
pub mod par;
pub mod pke;
pub mod reductions;
pub mod rng;
pub mod sampling;
pub mod supke;

pub use error::{Error, Result};
pub use gf2::{BitMat, BitVec, IsotropicCode, SympVec};
pub use rng::Rng;

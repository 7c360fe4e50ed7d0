use super::{Decision, Oracle};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::rng::Rng;
use crate::sampling::{Instance, Kind, Witness};

/// The sympLPN instance `(A, z)` handed to the oracle: the `B` columns are
/// dropped and the word is kept.
///
/// If the LSN instance carries a witness, the derived one records `r` and
/// `e`, and counts as structured exactly when `y = 0`.
pub fn lsn_to_symplpn_instance(inst: &Instance) -> Result<Instance> {
    if inst.kind != Kind::Lsn {
        return Err(Error::InvalidParameter(format!(
            "expected an LSN instance, got {:?}",
            inst.kind
        )));
    }
    inst.validate()?;
    let n = inst.n;
    let witness = inst.witness.as_ref().map(|w| Witness {
        secret: w.secret.extract(0, n),
        error: w.error.clone(),
        structured: w.structured && w.secret.extract(n, inst.k).is_zero(),
    });
    Ok(Instance {
        kind: Kind::Symplpn,
        k: n,
        n,
        p: inst.p,
        matrix: inst.lsn_a(),
        word: inst.word.clone(),
        witness,
    })
}

/// Guesses `y` from one oracle call: STRUCTURED means `y = 0`, otherwise a
/// uniformly random nonzero `y`.
pub fn lsn_to_symplpn(inst: &Instance, oracle: &dyn Oracle, rng: &mut Rng) -> Result<BitVec> {
    let reduced = lsn_to_symplpn_instance(inst)?;
    let k = inst.k;
    match oracle.decide(&reduced, rng) {
        Decision::Structured => Ok(BitVec::zeros(k)),
        Decision::Unstructured => {
            if k == 0 {
                return Ok(BitVec::zeros(0));
            }
            loop {
                let y = rng.bits(k);
                if !y.is_zero() {
                    return Ok(y);
                }
            }
        }
    }
}

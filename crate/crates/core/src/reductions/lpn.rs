use super::{Decision, Oracle};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sampling::{Instance, Kind, Witness};

/// Decides `LPN(k, n, p)` by discarding the last `k'` columns and asking an
/// `LPN(k − k', n, p)` oracle.
pub fn lpn_drop_bits(
    inst: &Instance,
    k_drop: usize,
    oracle: &dyn Oracle,
    rng: &mut Rng,
) -> Result<Decision> {
    if inst.kind != Kind::Lpn {
        return Err(Error::InvalidParameter(format!(
            "expected an LPN instance, got {:?}",
            inst.kind
        )));
    }
    inst.validate()?;
    if k_drop >= inst.k {
        return Err(Error::InvalidParameter(format!(
            "cannot drop {k_drop} of {} columns",
            inst.k
        )));
    }
    let keep = inst.k - k_drop;
    let witness = inst.witness.as_ref().map(|w| Witness {
        secret: w.secret.extract(0, keep),
        error: w.error.clone(),
        structured: w.structured && w.secret.extract(keep, k_drop).is_zero(),
    });
    let reduced = Instance {
        kind: Kind::Lpn,
        k: keep,
        n: inst.n,
        p: inst.p,
        matrix: inst.matrix.col_range(0, keep),
        word: inst.word.clone(),
        witness,
    };
    Ok(oracle.decide(&reduced, rng))
}

//! Executable classical reductions.
//!
//! Oracles are plain values implementing [`Oracle`], so every reduction can
//! be driven by brute-force deciders, planted-answer oracles or coins.

mod drop_bit;
mod dual_mode;
mod lpn;
mod lsn;
mod symmetrize;

use serde::{Deserialize, Serialize};

pub use drop_bit::{
    default_flood_count, default_p_prime, drop_bit_transform, drop_logical_bit, DropBitConfig,
    DropBitTransform,
};
pub use dual_mode::{dual_mode_transform, DualMode};
pub use lpn::lpn_drop_bits;
pub use lsn::{lsn_to_symplpn, lsn_to_symplpn_instance};
pub use symmetrize::{symmetrize_noise, symmetrize_overlay, Symmetrized, SymmetrizeOverlay};

use crate::attacks::brute_force_decide;
use crate::error::{check_prob, Error, Result};
use crate::harness::stats::newcombe_difference;
use crate::par::{map_trials, Execution};
use crate::rng::Rng;
use crate::sampling::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Structured,
    Unstructured,
}

/// A decision oracle for some instance family.
pub trait Oracle: Sync {
    fn decide(&self, inst: &Instance, rng: &mut Rng) -> Decision;
}

impl<F> Oracle for F
where
    F: Fn(&Instance, &mut Rng) -> Decision + Sync,
{
    fn decide(&self, inst: &Instance, rng: &mut Rng) -> Decision {
        self(inst, rng)
    }
}

/// Exhaustive minimum-weight decider; see [`brute_force_decide`].
#[derive(Clone, Copy, Debug, Default)]
pub struct BruteForceOracle {
    pub threshold: Option<f64>,
}

impl Oracle for BruteForceOracle {
    fn decide(&self, inst: &Instance, _rng: &mut Rng) -> Decision {
        brute_force_decide(&inst.without_witness(), self.threshold)
            .expect("brute-force oracle used on an instance that is too large")
    }
}

/// Answers with a fair coin.
#[derive(Clone, Copy, Debug, Default)]
pub struct CoinOracle;

impl Oracle for CoinOracle {
    fn decide(&self, _inst: &Instance, rng: &mut Rng) -> Decision {
        if rng.bit() {
            Decision::Structured
        } else {
            Decision::Unstructured
        }
    }
}

/// Reads the answer from the witness. Only for calibration tests.
#[derive(Clone, Copy, Debug, Default)]
pub struct WitnessOracle;

impl Oracle for WitnessOracle {
    fn decide(&self, inst: &Instance, _rng: &mut Rng) -> Decision {
        match &inst.witness {
            Some(w) if w.structured => Decision::Structured,
            _ => Decision::Unstructured,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plain,
    Flooded,
}

/// Advantage measurement for one reduction branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub branch: Option<Branch>,
    /// Trials per arm.
    pub trials: usize,
    /// STRUCTURED answers on structured inputs.
    pub successes: usize,
    /// STRUCTURED answers on unstructured inputs.
    pub false_positives: usize,
    /// Inputs skipped because the reduction hit a degenerate sample.
    pub degenerate: usize,
    pub advantage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ReductionReport {
    pub fn from_counts(
        branch: Option<Branch>,
        trials: usize,
        successes: usize,
        false_positives: usize,
        degenerate: usize,
    ) -> Self {
        let (advantage, ci_low, ci_high) =
            newcombe_difference(successes, trials, false_positives, trials);
        Self {
            branch,
            trials,
            successes,
            false_positives,
            degenerate,
            advantage,
            ci_low,
            ci_high,
        }
    }
}

/// `u = (q − p) / (1 − 4p/3)`, so that `D_p * D_u = D_q`.
pub fn convolve_param(p: f64, q: f64) -> Result<f64> {
    check_prob("p", p, 0.0, 0.75)?;
    check_prob("q", q, p, 0.75)?;
    if p == 0.75 {
        // D_{3/4} absorbs everything; any u works and 0 is the natural choice.
        return Ok(0.0);
    }
    Ok((q - p) / (1.0 - 4.0 * p / 3.0))
}

/// Single-pair distribution of `D_p` over codes `a | b << 1`.
pub fn pair_distribution(p: f64) -> [f64; 4] {
    [1.0 - p, p / 3.0, p / 3.0, p / 3.0]
}

/// Distribution of the XOR of two independent pairs.
pub fn convolve_pairs(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, &pa) in a.iter().enumerate() {
        for (j, &pb) in b.iter().enumerate() {
            out[i ^ j] += pa * pb;
        }
    }
    out
}

/// The branch with larger `|advantage|`; ties go to `Plain`.
pub fn interpolation_select(plain: &ReductionReport, flooded: &ReductionReport) -> Branch {
    if flooded.advantage.abs() > plain.advantage.abs() {
        Branch::Flooded
    } else {
        Branch::Plain
    }
}

/// Measures one drop-bit branch: `trials` structured and `trials`
/// unstructured `sympLPN(n, n, p)` inputs, each reduced and sent to `oracle`.
/// Degenerate samples are counted and answered with a coin.
#[allow(clippy::too_many_arguments)]
pub fn measure_drop_bit(
    n: usize,
    p: f64,
    branch: Branch,
    cfg: &DropBitConfig,
    oracle: &dyn Oracle,
    trials: usize,
    rng: &Rng,
    exec: Execution,
) -> Result<ReductionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let outcomes = map_trials(exec, rng, 2 * trials, |i, r| -> Result<(bool, bool)> {
        let structured = i < trials;
        let inst = crate::sampling::gen_symplpn(r, n, n, p, structured)?;
        match drop_logical_bit(&inst.without_witness(), oracle, branch, cfg, r) {
            Ok(d) => Ok((d == Decision::Structured, false)),
            Err(Error::Degenerate(_)) => Ok((r.bit(), true)),
            Err(e) => Err(e),
        }
    });
    let mut said = [0usize; 2];
    let mut degenerate = 0;
    for (i, o) in outcomes.into_iter().enumerate() {
        let (s, deg) = o?;
        said[usize::from(i >= trials)] += usize::from(s);
        degenerate += usize::from(deg);
    }
    Ok(ReductionReport::from_counts(
        Some(branch),
        trials,
        said[0],
        said[1],
        degenerate,
    ))
}

/// Runs both branches and picks one with [`interpolation_select`].
#[allow(clippy::too_many_arguments)]
pub fn measure_drop_bit_both(
    n: usize,
    p: f64,
    cfg: &DropBitConfig,
    oracle: &dyn Oracle,
    trials: usize,
    rng: &Rng,
    exec: Execution,
) -> Result<(ReductionReport, ReductionReport, Branch)> {
    let plain = measure_drop_bit(n, p, Branch::Plain, cfg, oracle, trials, &rng.split(0), exec)?;
    let flooded = measure_drop_bit(n, p, Branch::Flooded, cfg, oracle, trials, &rng.split(1), exec)?;
    let pick = interpolation_select(&plain, &flooded);
    Ok((plain, flooded, pick))
}

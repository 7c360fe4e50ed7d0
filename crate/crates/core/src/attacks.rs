//! Cryptanalysis: exhaustive solvers, Prange ISD, a pair-aware ISD variant,
//! code distance and the `b·e` bias formula.
//!
//! Attacks only read `matrix` and `word`; witnesses are ignored.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use crate::error::{check_prob, Error, Result};
use crate::gf2::{pair_weight, BitMat, BitVec};
use crate::reductions::Decision;
use crate::rng::Rng;
use crate::sampling::{Instance, Kind};

/// Largest secret dimension enumerated exhaustively.
pub const MAX_EXHAUSTIVE: usize = 24;

/// How residual errors are weighed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Hamming,
    Pair,
}

impl Metric {
    /// Pair-weight for symplectic instances, Hamming for LPN.
    pub fn for_kind(kind: Kind) -> Metric {
        match kind {
            Kind::Lpn => Metric::Hamming,
            Kind::Symplpn | Kind::Lsn => Metric::Pair,
        }
    }

    #[inline]
    pub fn weight(self, v: &BitVec) -> usize {
        match self {
            Metric::Hamming => v.weight(),
            Metric::Pair => pair_weight(v),
        }
    }
}

/// Minimum-weight decoding result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub secret: BitVec,
    pub error: BitVec,
    pub weight: usize,
}

/// Exhaustive decoding of `word ≈ M·x` under `metric`.
///
/// Secrets are visited in Gray-code order; ties keep the numerically
/// smallest `x` (bit `i` of `x` is bit `i` of the integer).
pub fn brute_force_decode(m: &BitMat, word: &BitVec, metric: Metric) -> Result<Decoded> {
    let k = m.cols();
    if k > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge(format!("2^{k} secrets")));
    }
    if word.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "word has {} bits, matrix has {} rows",
            word.len(),
            m.rows()
        )));
    }
    let cols = m.col_vecs();
    let mut residual = word.clone();
    let mut x: u64 = 0;
    let mut best = (metric.weight(&residual), 0u64);
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        x ^= 1 << bit;
        residual.xor_assign(&cols[bit]);
        let w = metric.weight(&residual);
        if w < best.0 || (w == best.0 && x < best.1) {
            best = (w, x);
        }
    }
    let secret = BitVec::from_u64(k, best.1);
    let error = word.xor(&m.mul_vec(&secret));
    Ok(Decoded {
        secret,
        error,
        weight: best.0,
    })
}

/// Minimum pair-weight decoding of a sympLPN (or LSN) instance.
pub fn brute_force_search_symplpn(inst: &Instance) -> Result<Option<(BitVec, BitVec)>> {
    let d = brute_force_decode(&inst.matrix, &inst.word, Metric::Pair)?;
    Ok(Some((d.secret, d.error)))
}

/// Minimum-weight decoding with the metric matching the instance kind.
pub fn brute_force_search(inst: &Instance) -> Result<Decoded> {
    brute_force_decode(&inst.matrix, &inst.word, Metric::for_kind(inst.kind))
}

/// Default decision threshold `2·n·p`.
pub fn default_threshold(inst: &Instance) -> f64 {
    2.0 * inst.n as f64 * inst.p
}

/// STRUCTURED iff some consistent error has weight at most `threshold`
/// (default `2·n·p`).
pub fn brute_force_decide(inst: &Instance, threshold: Option<f64>) -> Result<Decision> {
    let t = threshold.unwrap_or_else(|| default_threshold(inst));
    let d = brute_force_search(inst)?;
    Ok(if d.weight as f64 <= t {
        Decision::Structured
    } else {
        Decision::Unstructured
    })
}

/// Settings shared by the ISD attacks.
#[derive(Clone, Copy, Debug)]
pub struct IsdConfig {
    /// Maximum number of information sets drawn.
    pub max_iters: u64,
    /// Accept when the residual weight is at most
    /// `ceil(weight_factor · expected weight)`.
    pub weight_factor: f64,
}

impl Default for IsdConfig {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            weight_factor: 2.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AttackResult {
    pub success: bool,
    pub secret: Option<BitVec>,
    pub error: Option<BitVec>,
    /// Non-singular information sets evaluated.
    pub iterations: u64,
    /// Singular information sets discarded.
    pub singular_sets: u64,
    pub wall_time: Duration,
}

impl AttackResult {
    /// All information sets drawn, singular or not.
    pub fn attempts(&self) -> u64 {
        self.iterations + self.singular_sets
    }
}

/// Solves the square system on the chosen rows; `None` if singular.
fn solve_on_rows(m: &BitMat, word: &BitVec, rows: &[usize]) -> Option<BitVec> {
    let k = m.cols();
    debug_assert_eq!(rows.len(), k);
    let mut sys: Vec<BitVec> = rows.iter().map(|&r| m.row(r).clone()).collect();
    let mut rhs: Vec<bool> = rows.iter().map(|&r| word.get(r)).collect();
    for c in 0..k {
        let p = (c..k).find(|&i| sys[i].get(c))?;
        sys.swap(c, p);
        rhs.swap(c, p);
        let (pr, pb) = (sys[c].clone(), rhs[c]);
        for i in 0..k {
            if i != c && sys[i].get(c) {
                sys[i].xor_assign(&pr);
                rhs[i] ^= pb;
            }
        }
    }
    let mut x = BitVec::zeros(k);
    for (i, &b) in rhs.iter().enumerate() {
        if b {
            x.set(i, true);
        }
    }
    Some(x)
}

/// Expected residual weight under the planted noise, per metric.
fn expected_weight(inst: &Instance, metric: Metric) -> f64 {
    let (n, p) = (inst.n as f64, inst.p);
    match (inst.kind, metric) {
        (Kind::Lpn, _) => n * p,
        (_, Metric::Pair) => n * p,
        // Each noisy pair flips one bit w.p. 2/3 and two bits w.p. 1/3.
        (_, Metric::Hamming) => n * p * 4.0 / 3.0,
    }
}

/// Acceptance bound `ceil(factor · expected weight)`.
pub fn acceptance_bound(inst: &Instance, metric: Metric, factor: f64) -> usize {
    (factor * expected_weight(inst, metric) - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SetRule {
    Rows,
    Pairs,
}

fn draw_rows(rng: &mut Rng, inst: &Instance, rule: SetRule) -> Vec<usize> {
    let rows = inst.matrix.rows();
    let k = inst.matrix.cols();
    match rule {
        SetRule::Rows => rng.sample_indices(rows, k),
        SetRule::Pairs => {
            let n = rows / 2;
            let pairs = rng.sample_indices(n, k.div_ceil(2));
            let mut out = Vec::with_capacity(k);
            for (i, &j) in pairs.iter().enumerate() {
                if out.len() + 2 <= k {
                    out.push(j);
                    out.push(n + j);
                } else if i == pairs.len() - 1 {
                    // Odd k: one half of a final pair.
                    out.push(if rng.bit() { j } else { n + j });
                }
            }
            out
        }
    }
}

fn isd_loop(
    inst: &Instance,
    cfg: &IsdConfig,
    rng: &mut Rng,
    rule: SetRule,
    metric: Metric,
    stop: Option<&AtomicBool>,
) -> AttackResult {
    let start = Instant::now();
    let bound = acceptance_bound(inst, metric, cfg.weight_factor);
    let (mut iterations, mut singular) = (0u64, 0u64);
    for _ in 0..cfg.max_iters {
        if stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            break;
        }
        let rows = draw_rows(rng, inst, rule);
        let Some(x) = solve_on_rows(&inst.matrix, &inst.word, &rows) else {
            singular += 1;
            continue;
        };
        iterations += 1;
        let e = inst.word.xor(&inst.matrix.mul_vec(&x));
        if metric.weight(&e) <= bound {
            debug_assert_eq!(inst.matrix.mul_vec(&x).xor(&e), inst.word);
            return AttackResult {
                success: true,
                secret: Some(x),
                error: Some(e),
                iterations,
                singular_sets: singular,
                wall_time: start.elapsed(),
            };
        }
    }
    AttackResult {
        success: false,
        secret: None,
        error: None,
        iterations,
        singular_sets: singular,
        wall_time: start.elapsed(),
    }
}

fn check_isd_input(inst: &Instance) -> Result<()> {
    inst.validate()?;
    if inst.matrix.cols() > inst.matrix.rows() {
        return Err(Error::InvalidParameter(
            "more secret bits than equations".into(),
        ));
    }
    Ok(())
}

/// Prange ISD: random row subsets of size `k`, Hamming weight accounting.
pub fn prange_isd(inst: &Instance, cfg: &IsdConfig, rng: &mut Rng) -> Result<AttackResult> {
    check_isd_input(inst)?;
    Ok(isd_loop(inst, cfg, rng, SetRule::Rows, Metric::Hamming, None))
}

/// Prange variant for symplectic instances: information sets are unions of
/// whole qubit pairs `(j, n + j)` and residuals are weighed by pair-weight.
///
/// Depolarizing noise hits a pair with probability `p`, while two arbitrary
/// rows are both clean only with probability `(1 − 2p/3)²`, so a pair-shaped
/// set is error-free more often.
pub fn pair_aware_isd(inst: &Instance, cfg: &IsdConfig, rng: &mut Rng) -> Result<AttackResult> {
    check_isd_input(inst)?;
    if inst.kind == Kind::Lpn {
        return Err(Error::InvalidParameter(
            "pair-aware ISD needs a symplectic instance".into(),
        ));
    }
    Ok(isd_loop(inst, cfg, rng, SetRule::Pairs, Metric::Pair, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsdVariant {
    Prange,
    PairAware,
}

/// Runs independent restarts on `workers` threads; the first success wins.
/// Each worker gets `max_iters / workers` attempts and stream `rng.split(w)`.
/// The winner depends on scheduling, so results are not reproducible.
pub fn isd_parallel(
    inst: &Instance,
    cfg: &IsdConfig,
    rng: &Rng,
    variant: IsdVariant,
    workers: usize,
) -> Result<AttackResult> {
    check_isd_input(inst)?;
    let (rule, metric) = match variant {
        IsdVariant::Prange => (SetRule::Rows, Metric::Hamming),
        IsdVariant::PairAware => (SetRule::Pairs, Metric::Pair),
    };
    let workers = workers.max(1);
    let per = IsdConfig {
        max_iters: cfg.max_iters.div_ceil(workers as u64),
        ..*cfg
    };
    let stop = AtomicBool::new(false);
    let start = Instant::now();
    let run = |w: usize| {
        let r = isd_loop(inst, &per, &mut rng.split(w as u64), rule, metric, Some(&stop));
        if r.success {
            stop.store(true, Ordering::Relaxed);
        }
        r
    };
    #[cfg(feature = "parallel")]
    let results: Vec<AttackResult> = {
        use rayon::prelude::*;
        (0..workers).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<AttackResult> = (0..workers).map(run).collect();
    let iterations = results.iter().map(|r| r.iterations).sum();
    let singular_sets = results.iter().map(|r| r.singular_sets).sum();
    let winner = results.into_iter().find(|r| r.success);
    Ok(AttackResult {
        success: winner.is_some(),
        secret: winner.as_ref().and_then(|r| r.secret.clone()),
        error: winner.and_then(|r| r.error),
        iterations,
        singular_sets,
        wall_time: start.elapsed(),
    })
}

/// Minimum (pair-)weight of a nonzero codeword of `im(code)`, by
/// enumerating all `2^cols` combinations. `None` if the image is `{0}`.
pub fn min_distance(code: &BitMat, pair_metric: bool) -> Result<Option<usize>> {
    let k = code.cols();
    if k > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge(format!("2^{k} codewords")));
    }
    if pair_metric && !code.rows().is_multiple_of(2) {
        return Err(Error::OddRowCount(code.rows()));
    }
    let metric = if pair_metric {
        Metric::Pair
    } else {
        Metric::Hamming
    };
    let cols = code.col_vecs();
    let mut word = BitVec::zeros(code.rows());
    let mut best: Option<usize> = None;
    for step in 1u64..(1u64 << k) {
        word.xor_assign(&cols[step.trailing_zeros() as usize]);
        if word.is_zero() {
            continue;
        }
        let w = metric.weight(&word);
        if best.is_none_or(|b| w < b) {
            best = Some(w);
        }
    }
    Ok(best)
}

/// `η(w, p) = (1 − (1 − 4p/3)^{w/2}) / 2`.
pub fn eta_weight(w: usize, p: f64) -> Result<f64> {
    check_prob("p", p, 0.0, 0.75)?;
    let base = 1.0 - 4.0 * p / 3.0;
    Ok((1.0 - base.powf(w as f64 / 2.0)) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::gen_symplpn;

    #[test]
    fn brute_force_recovers_noiseless_secret() {
        let mut rng = Rng::new(20);
        let inst = gen_symplpn(&mut rng, 4, 4, 0.0, true).unwrap();
        let (x, e) = brute_force_search_symplpn(&inst).unwrap().unwrap();
        assert_eq!(&x, &inst.witness.as_ref().unwrap().secret);
        assert!(e.is_zero());
    }

    #[test]
    fn distance_of_simple_codes() {
        assert_eq!(min_distance(&BitMat::identity(4), false).unwrap(), Some(1));
        let ones = BitMat::from_cols(6, &[BitVec::from_u64(6, 0b111111)]).unwrap();
        assert_eq!(min_distance(&ones, false).unwrap(), Some(6));
        assert_eq!(min_distance(&ones, true).unwrap(), Some(3));
        assert_eq!(min_distance(&BitMat::zeros(4, 2), false).unwrap(), None);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_weight(0, 0.3).unwrap(), 0.0);
        assert!((eta_weight(4, 0.75).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_isd_takes_one_iteration() {
        let mut rng = Rng::new(21);
        let inst = gen_symplpn(&mut rng, 16, 16, 0.0, true).unwrap();
        let clean = inst.without_witness();
        for r in [
            prange_isd(&clean, &IsdConfig::default(), &mut rng).unwrap(),
            pair_aware_isd(&clean, &IsdConfig::default(), &mut rng).unwrap(),
        ] {
            assert!(r.success);
            assert_eq!(r.iterations, 1);
            assert_eq!(r.secret.as_ref(), Some(&inst.witness.as_ref().unwrap().secret));
        }
    }

    #[test]
    fn pair_sets_cover_whole_pairs() {
        let mut rng = Rng::new(22);
        let inst = gen_symplpn(&mut rng, 5, 8, 0.1, true).unwrap();
        let rows = draw_rows(&mut rng, &inst, SetRule::Pairs);
        assert_eq!(rows.len(), 5);
        let mut uniq = rows.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 5);
        for j in 0..8 {
            let both = rows.contains(&j) && rows.contains(&(8 + j));
            let one = rows.contains(&j) ^ rows.contains(&(8 + j));
            assert!(!(both && one));
        }
    }
}

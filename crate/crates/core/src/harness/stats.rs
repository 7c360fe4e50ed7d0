use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::par::{map_trials, Execution};
use crate::reductions::{Decision, Oracle};
use crate::rng::Rng;
use crate::sampling::Instance;

/// Largest outcome space accepted by the TV helpers.
pub const MAX_OUTCOMES: usize = 1 << 16;

const Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes / trials`.
pub fn wilson(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Newcombe's hybrid score interval for `s1/n1 − s2/n2`.
/// Returns `(difference, low, high)`.
pub fn newcombe_difference(s1: usize, n1: usize, s2: usize, n2: usize) -> (f64, f64, f64) {
    let rate = |s: usize, n: usize| if n == 0 { 0.0 } else { s as f64 / n as f64 };
    let (p1, p2) = (rate(s1, n1), rate(s2, n2));
    let (l1, u1) = wilson(s1, n1);
    let (l2, u2) = wilson(s2, n2);
    let d = p1 - p2;
    let lo = d - ((p1 - l1).powi(2) + (u2 - p2).powi(2)).sqrt();
    let hi = d + ((u1 - p1).powi(2) + (p2 - l2).powi(2)).sqrt();
    (d, lo.max(-1.0), hi.min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `counts` against `probs`.
/// Cells with zero expected probability must have zero count.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} counts vs {} probabilities",
            counts.len(),
            probs.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        if p <= 0.0 {
            if c > 0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    dof: 0,
                    p_value: 0.0,
                });
            }
            continue;
        }
        let e = p * total as f64;
        stat += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64)
            .map_err(|e| Error::InvalidParameter(format!("chi-square: {e}")))?;
        1.0 - dist.cdf(stat)
    };
    Ok(ChiSquare {
        statistic: stat,
        dof,
        p_value,
    })
}

/// Point estimate, 95% interval and sample count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<ChiSquare>,
}

impl StatSummary {
    pub fn proportion(successes: usize, trials: usize) -> Self {
        let (ci_low, ci_high) = wilson(successes, trials);
        Self {
            estimate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            samples: trials,
            chi_square: None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

fn count<T: Hash + Eq + Clone>(samples: &[T]) -> Result<HashMap<T, u64>> {
    let mut m: HashMap<T, u64> = HashMap::new();
    for s in samples {
        *m.entry(s.clone()).or_default() += 1;
        if m.len() > MAX_OUTCOMES {
            return Err(Error::TooLarge(format!(
                "more than {MAX_OUTCOMES} distinct outcomes"
            )));
        }
    }
    Ok(m)
}

/// Half the L1 distance between two empirical distributions.
pub fn empirical_tv<T: Hash + Eq + Clone>(a: &[T], b: &[T]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let (ca, cb) = (count(a)?, count(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut sum = 0.0;
    for (k, &x) in &ca {
        let y = cb.get(k).copied().unwrap_or(0);
        sum += (x as f64 / na - y as f64 / nb).abs();
    }
    for (k, &y) in &cb {
        if !ca.contains_key(k) {
            sum += y as f64 / nb;
        }
    }
    Ok(sum / 2.0)
}

/// TV between an empirical distribution and an exact one.
pub fn tv_to_exact<T: Hash + Eq + Clone>(samples: &[T], exact: &HashMap<T, f64>) -> Result<f64> {
    if exact.len() > MAX_OUTCOMES {
        return Err(Error::TooLarge(format!(
            "target has {} outcomes, limit {MAX_OUTCOMES}",
            exact.len()
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let c = count(samples)?;
    let n = samples.len() as f64;
    let mut sum = 0.0;
    for (k, &p) in exact {
        let f = c.get(k).copied().unwrap_or(0) as f64 / n;
        sum += (f - p).abs();
    }
    for (k, &x) in &c {
        if !exact.contains_key(k) {
            sum += x as f64 / n;
        }
    }
    Ok(sum / 2.0)
}

/// TV between two exact distributions.
pub fn exact_tv<T: Hash + Eq>(p: &HashMap<T, f64>, q: &HashMap<T, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &a) in p {
        sum += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &b) in q {
        if !p.contains_key(k) {
            sum += b;
        }
    }
    sum / 2.0
}

fn check_outcomes(len: usize) -> Result<()> {
    if len > MAX_OUTCOMES {
        return Err(Error::TooLarge(format!(
            "{len} outcomes, limit {MAX_OUTCOMES}"
        )));
    }
    Ok(())
}

/// [`empirical_tv`] over outcomes already indexed as `0..len`.
pub fn empirical_tv_counts(a: &[u64], b: &[u64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("count vectors differ in length".into()));
    }
    check_outcomes(a.len())?;
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs())
        .sum::<f64>()
        / 2.0)
}

/// [`tv_to_exact`] over outcomes already indexed as `0..len`.
pub fn tv_to_exact_counts(counts: &[u64], probs: &[f64]) -> Result<f64> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch("count and probability vectors differ".into()));
    }
    check_outcomes(counts.len())?;
    let n = counts.iter().sum::<u64>() as f64;
    if n == 0.0 {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    Ok(counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / n - p).abs())
        .sum::<f64>()
        / 2.0)
}

/// `|Pr[STRUCTURED | structured] − Pr[STRUCTURED | unstructured]|` with a
/// Newcombe (Wilson-based) 95% interval. Each arm runs `trials` times.
pub fn advantage<GS, GU>(
    oracle: &dyn Oracle,
    gen_structured: GS,
    gen_unstructured: GU,
    trials: usize,
    rng: &Rng,
    exec: Execution,
) -> Result<StatSummary>
where
    GS: Fn(&mut Rng) -> Result<Instance> + Sync + Send,
    GU: Fn(&mut Rng) -> Result<Instance> + Sync + Send,
{
    if trials < 100 {
        return Err(Error::InvalidParameter(format!(
            "advantage needs at least 100 trials per arm, got {trials}"
        )));
    }
    let arm = |tag: u64, gen: &(dyn Fn(&mut Rng) -> Result<Instance> + Sync)| -> Result<usize> {
        let hits = map_trials(exec, &rng.split(tag), trials, |_, r| -> Result<bool> {
            let inst = gen(r)?;
            Ok(oracle.decide(&inst, r) == Decision::Structured)
        });
        let mut count = 0;
        for h in hits {
            count += h? as usize;
        }
        Ok(count)
    };
    let s = arm(0, &gen_structured)?;
    let u = arm(1, &gen_unstructured)?;
    let (d, lo, hi) = newcombe_difference(s, trials, u, trials);
    let (estimate, ci_low, ci_high) = if d >= 0.0 { (d, lo, hi) } else { (-d, -hi, -lo) };
    Ok(StatSummary {
        estimate,
        ci_low,
        ci_high,
        samples: trials,
        chi_square: None,
    })
}

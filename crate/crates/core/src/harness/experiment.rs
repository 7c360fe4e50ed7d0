//! Experiment runner.
//!
//! A spec names an experiment, a parameter grid, a seed and an optional
//! output directory. Grid points run in order; each point gets the stream
//! `Rng::new(seed).split(point)` and parallelizes over its trials. Rows are
//! appended to `results.csv` as points finish, next to a `manifest.json`
//! holding the spec and its content hash. Rerunning the same spec against
//! the same directory resumes after the last complete row.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::plot::{line_chart, Series};
use super::stats::wilson;
use crate::attacks::{pair_aware_isd, prange_isd, IsdConfig};
use crate::error::{Error, Result};
use crate::par::{map_trials, Execution};
use crate::pke::{self, matched_noise, pick_p_for_success, predict_success};
use crate::rng::Rng;
use crate::sampling::{gen_lpn, gen_symplpn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DecryptionCurve,
    MatchedIsd,
}

/// A noise rate, or `"auto:<target>"` for `pick_p_for_success(n, target)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Value(f64),
    Auto(String),
}

impl NoiseSpec {
    fn resolve(&self, n: usize) -> Result<f64> {
        match self {
            NoiseSpec::Value(p) => Ok(*p),
            NoiseSpec::Auto(s) => {
                let target = s
                    .strip_prefix("auto:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::Format(format!("bad noise spec {s:?}")))?;
                pick_p_for_success(n, target)
            }
        }
    }
}

/// Cartesian grid `n × k × p`. An empty `k` means `k = n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<usize>,
    pub p: Vec<NoiseSpec>,
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsdAttack {
    LpnPlain,
    SympPlain,
    SympPair,
}

/// Checks evaluated after a run. The process exit status reflects them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    /// Fraction of rows whose Wilson interval contains the prediction.
    PredictedCoverage { min_fraction: f64 },
    /// Measured success within `target ± tolerance`, optionally for one `n`.
    MeasuredNear {
        target: f64,
        tolerance: f64,
        #[serde(default)]
        n: Option<usize>,
    },
    /// Per-row success fraction of one ISD attack.
    SuccessRate { attack: IsdAttack, min: f64 },
    /// Pair-aware median attempts at most plain, on every row.
    PairAwareNotWorse,
    MaxRuntime { seconds: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsdSettings {
    pub max_iters: u64,
    pub weight_factor: f64,
}

impl From<&IsdSettings> for IsdConfig {
    fn from(s: &IsdSettings) -> Self {
        IsdConfig {
            max_iters: s.max_iters,
            weight_factor: s.weight_factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub experiment: ExperimentKind,
    pub grid: Grid,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
    #[serde(default)]
    pub plot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isd: Option<IsdSettings>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Point {
    index: usize,
    n: usize,
    k: usize,
    p: f64,
}

impl ExperimentSpec {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let spec: Self = crate::io::read_json(path)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if g.n.is_empty() || g.p.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if self.experiment == ExperimentKind::DecryptionCurve && !g.k.is_empty() {
            return Err(Error::InvalidParameter(
                "decryption_curve grids have no k axis".into(),
            ));
        }
        Ok(())
    }

    /// Content hash of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        content_hash(&serde_json::to_vec(self).expect("spec serializes"))
    }

    fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for &n in &self.grid.n {
            let ks = if self.grid.k.is_empty() {
                vec![n]
            } else {
                self.grid.k.clone()
            };
            for &k in &ks {
                for p in &self.grid.p {
                    out.push(Point {
                        index: out.len(),
                        n,
                        k,
                        p: p.resolve(n)?,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Git-style object hash: SHA-256 over `"blob <len>\0" || bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Manifest {
    name: String,
    seed: u64,
    spec_hash: String,
    points: usize,
    version: String,
    spec: ExperimentSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecryptionRow {
    pub point: usize,
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    pub predicted: f64,
    pub measured: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsdRow {
    pub point: usize,
    pub n: usize,
    pub k: usize,
    pub q: f64,
    pub p_symp: f64,
    pub instances: usize,
    pub lpn_plain_successes: usize,
    pub lpn_plain_median_attempts: f64,
    pub lpn_plain_median_iterations: f64,
    pub symp_plain_successes: usize,
    pub symp_plain_median_attempts: f64,
    pub symp_plain_median_iterations: f64,
    pub symp_pair_successes: usize,
    pub symp_pair_median_attempts: f64,
    pub symp_pair_median_iterations: f64,
}

trait Row: Serialize + DeserializeOwned + Clone {
    fn point(&self) -> usize;
}

impl Row for DecryptionRow {
    fn point(&self) -> usize {
        self.point
    }
}

impl Row for IsdRow {
    fn point(&self) -> usize {
        self.point
    }
}

/// Streams rows to `results.csv`, resuming from a matching manifest.
struct Sink<R: Row> {
    writer: Option<csv::Writer<File>>,
    done: Vec<R>,
}

impl<R: Row> Sink<R> {
    fn open(spec: &ExperimentSpec, points: usize) -> Result<Self> {
        let Some(dir) = &spec.output else {
            return Ok(Self {
                writer: None,
                done: Vec::new(),
            });
        };
        fs::create_dir_all(dir)?;
        let manifest_path = dir.join("manifest.json");
        let csv_path = dir.join("results.csv");
        let hash = spec.hash();
        let mut done = Vec::new();
        if manifest_path.exists() {
            let m: Manifest = crate::io::read_json(&manifest_path)?;
            if m.spec_hash != hash {
                return Err(Error::Format(format!(
                    "{} holds results for a different spec ({})",
                    dir.display(),
                    m.spec_hash
                )));
            }
            if csv_path.exists() {
                let mut rdr = csv::Reader::from_path(&csv_path).map_err(csv_err)?;
                for rec in rdr.deserialize::<R>() {
                    // A partial trailing row from an interrupted run ends the prefix.
                    let Ok(row) = rec else { break };
                    if row.point() != done.len() || done.len() >= points {
                        break;
                    }
                    done.push(row);
                }
            }
        } else {
            let m = Manifest {
                name: spec.name.clone(),
                seed: spec.seed,
                spec_hash: hash,
                points,
                version: env!("CARGO_PKG_VERSION").to_string(),
                spec: spec.clone(),
            };
            crate::io::write_json(&manifest_path, &m)?;
        }
        let mut writer = csv::Writer::from_writer(File::create(&csv_path)?);
        for r in &done {
            writer.serialize(r).map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(Self {
            writer: Some(writer),
            done,
        })
    }

    fn push(&mut self, row: R) -> Result<()> {
        if let Some(w) = self.writer.as_mut() {
            w.serialize(&row).map_err(csv_err)?;
            w.flush()?;
        }
        self.done.push(row);
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn median(values: &mut [u64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_unstable();
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m] as f64
    } else {
        (values[m - 1] + values[m]) as f64 / 2.0
    }
}

struct Table<R> {
    rows: Vec<R>,
    resumed: usize,
}

fn run_points<R: Row>(
    spec: &ExperimentSpec,
    mut eval: impl FnMut(&Point, &Rng) -> Result<R>,
) -> Result<Table<R>> {
    spec.validate()?;
    let points = spec.points()?;
    let mut sink = Sink::<R>::open(spec, points.len())?;
    let resumed = sink.done.len();
    let root = Rng::new(spec.seed);
    for pt in &points[resumed..] {
        let row = eval(pt, &root.split(pt.index as u64))?;
        sink.push(row)?;
    }
    Ok(Table {
        rows: sink.done,
        resumed,
    })
}

fn decryption_table(spec: &ExperimentSpec, exec: Execution) -> Result<Table<DecryptionRow>> {
    let trials = spec.grid.trials;
    run_points(spec, |pt, rng| {
        let outcomes = map_trials(exec, rng, trials, |_, r| -> Result<bool> {
            let (pk, sk) = pke::gen(r, pt.n, pt.p)?;
            let mu = r.bit();
            let ct = pke::enc(r, &pk, mu, pt.p)?;
            Ok(pke::dec(&sk, &ct)? == mu)
        });
        let mut successes = 0;
        for o in outcomes {
            successes += o? as usize;
        }
        let (ci_low, ci_high) = wilson(successes, trials);
        Ok(DecryptionRow {
            point: pt.index,
            n: pt.n,
            p: pt.p,
            trials,
            successes,
            predicted: predict_success(pt.n, pt.p)?,
            measured: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        })
    })
}

/// Measured decryption success against `predict_success` per grid point.
pub fn run_decryption_curve(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<DecryptionRow>> {
    Ok(decryption_table(spec, exec)?.rows)
}

struct IsdTrial {
    lpn: (bool, u64, u64),
    plain: (bool, u64, u64),
    pair: (bool, u64, u64),
}

fn isd_table(spec: &ExperimentSpec, exec: Execution) -> Result<Table<IsdRow>> {
    if spec.experiment != ExperimentKind::MatchedIsd {
        return Err(Error::InvalidParameter("spec is not a matched_isd experiment".into()));
    }
    let cfg: IsdConfig = spec.isd.as_ref().map(Into::into).unwrap_or_default();
    let instances = spec.grid.trials;
    run_points(spec, |pt, rng| {
        let q = pt.p;
        let p_symp = matched_noise(q)?;
        let trials = map_trials(exec, rng, instances, |_, r| -> Result<IsdTrial> {
            let lpn = gen_lpn(r, pt.k, 2 * pt.n, q, true)?;
            let symp = gen_symplpn(r, pt.k, pt.n, p_symp, true)?;
            let summary = |a: crate::attacks::AttackResult| (a.success, a.attempts(), a.iterations);
            Ok(IsdTrial {
                lpn: summary(prange_isd(&lpn, &cfg, r)?),
                plain: summary(prange_isd(&symp, &cfg, r)?),
                pair: summary(pair_aware_isd(&symp, &cfg, r)?),
            })
        });
        let trials: Vec<IsdTrial> = trials.into_iter().collect::<Result<_>>()?;
        let stats = |pick: fn(&IsdTrial) -> (bool, u64, u64)| {
            let s: Vec<_> = trials.iter().map(pick).collect();
            let wins = s.iter().filter(|t| t.0).count();
            let mut att: Vec<u64> = s.iter().map(|t| t.1).collect();
            let mut it: Vec<u64> = s.iter().map(|t| t.2).collect();
            (wins, median(&mut att), median(&mut it))
        };
        let lpn = stats(|t| t.lpn);
        let plain = stats(|t| t.plain);
        let pair = stats(|t| t.pair);
        Ok(IsdRow {
            point: pt.index,
            n: pt.n,
            k: pt.k,
            q,
            p_symp,
            instances,
            lpn_plain_successes: lpn.0,
            lpn_plain_median_attempts: lpn.1,
            lpn_plain_median_iterations: lpn.2,
            symp_plain_successes: plain.0,
            symp_plain_median_attempts: plain.1,
            symp_plain_median_iterations: plain.2,
            symp_pair_successes: pair.0,
            symp_pair_median_attempts: pair.1,
            symp_pair_median_iterations: pair.2,
        })
    })
}

/// `LPN(k, 2n, q)` against `sympLPN(k, n, matched_noise(q))` under plain
/// and pair-aware ISD, one row per grid point.
pub fn run_matched_isd_benchmark(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<IsdRow>> {
    Ok(isd_table(spec, exec)?.rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub assertion: Assertion,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "snake_case")]
pub enum Rows {
    Decryption(Vec<DecryptionRow>),
    Isd(Vec<IsdRow>),
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub spec_hash: String,
    pub rows: Rows,
    /// Rows reused from an earlier run.
    pub resumed: usize,
    #[serde(rename = "elapsed_seconds", serialize_with = "seconds")]
    pub elapsed: Duration,
    pub assertions: Vec<AssertionOutcome>,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

fn check(a: &Assertion, rows: &Rows, elapsed: Duration) -> (bool, String) {
    match (a, rows) {
        (Assertion::MaxRuntime { seconds }, _) => {
            let t = elapsed.as_secs_f64();
            (t <= *seconds, format!("{t:.2}s of {seconds}s"))
        }
        (Assertion::PredictedCoverage { min_fraction }, Rows::Decryption(r)) => {
            let hit = r
                .iter()
                .filter(|x| x.ci_low <= x.predicted && x.predicted <= x.ci_high)
                .count();
            let frac = hit as f64 / r.len().max(1) as f64;
            (frac >= *min_fraction, format!("{hit}/{} rows covered", r.len()))
        }
        (Assertion::MeasuredNear { target, tolerance, n }, Rows::Decryption(r)) => {
            let sel: Vec<_> = r.iter().filter(|x| n.is_none_or(|n| x.n == n)).collect();
            let worst = sel
                .iter()
                .map(|x| (x.measured - target).abs())
                .fold(0.0, f64::max);
            (
                !sel.is_empty() && worst <= *tolerance,
                format!("{} rows, worst deviation {worst:.4}", sel.len()),
            )
        }
        (Assertion::SuccessRate { attack, min }, Rows::Isd(r)) => {
            let worst = r
                .iter()
                .map(|x| {
                    let s = match attack {
                        IsdAttack::LpnPlain => x.lpn_plain_successes,
                        IsdAttack::SympPlain => x.symp_plain_successes,
                        IsdAttack::SympPair => x.symp_pair_successes,
                    };
                    s as f64 / x.instances as f64
                })
                .fold(1.0, f64::min);
            (worst >= *min, format!("lowest success rate {worst:.3}"))
        }
        (Assertion::PairAwareNotWorse, Rows::Isd(r)) => {
            let bad = r
                .iter()
                .filter(|x| x.symp_pair_median_attempts > x.symp_plain_median_attempts)
                .count();
            (bad == 0, format!("{bad} rows where pair-aware needs more attempts"))
        }
        _ => (false, "assertion does not apply to this experiment".into()),
    }
}

fn plot(spec: &ExperimentSpec, rows: &Rows) -> String {
    let mut series = Vec::new();
    match rows {
        Rows::Decryption(r) => {
            for &n in &spec.grid.n {
                let mut sel: Vec<_> = r.iter().filter(|x| x.n == n).collect();
                sel.sort_by(|a, b| a.p.total_cmp(&b.p));
                series.push(Series {
                    name: format!("measured n={n}"),
                    points: sel.iter().map(|x| (x.p, x.measured)).collect(),
                    dashed: false,
                });
                series.push(Series {
                    name: format!("predicted n={n}"),
                    points: sel.iter().map(|x| (x.p, x.predicted)).collect(),
                    dashed: true,
                });
            }
            line_chart(&spec.name, "p", "decryption success", &series)
        }
        Rows::Isd(r) => {
            for &n in &spec.grid.n {
                let mut sel: Vec<_> = r.iter().filter(|x| x.n == n).collect();
                sel.sort_by(|a, b| a.q.total_cmp(&b.q));
                let mut add = |name: &str, f: fn(&IsdRow) -> f64, dashed| {
                    series.push(Series {
                        name: format!("{name} n={n}"),
                        points: sel.iter().map(|x| (x.q, f(x))).collect(),
                        dashed,
                    });
                };
                add("LPN plain", |x| x.lpn_plain_median_attempts, true);
                add("sympLPN plain", |x| x.symp_plain_median_attempts, false);
                add("sympLPN pair", |x| x.symp_pair_median_attempts, false);
            }
            line_chart(&spec.name, "q", "median attempts", &series)
        }
    }
}

/// Runs the experiment, writes outputs and evaluates assertions.
pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<ExperimentReport> {
    let start = Instant::now();
    let (rows, resumed) = match spec.experiment {
        ExperimentKind::DecryptionCurve => {
            let t = decryption_table(spec, exec)?;
            (Rows::Decryption(t.rows), t.resumed)
        }
        ExperimentKind::MatchedIsd => {
            let t = isd_table(spec, exec)?;
            (Rows::Isd(t.rows), t.resumed)
        }
    };
    let elapsed = start.elapsed();
    if let (true, Some(dir)) = (spec.plot, &spec.output) {
        let mut f = File::create(dir.join("plot.svg"))?;
        f.write_all(plot(spec, &rows).as_bytes())?;
    }
    let assertions = spec
        .assertions
        .iter()
        .map(|a| {
            let (passed, detail) = check(a, &rows, elapsed);
            AssertionOutcome {
                assertion: a.clone(),
                passed,
                detail,
            }
        })
        .collect();
    Ok(ExperimentReport {
        name: spec.name.clone(),
        spec_hash: spec.hash(),
        rows,
        resumed,
        elapsed,
        assertions,
    })
}

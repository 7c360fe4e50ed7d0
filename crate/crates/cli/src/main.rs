//! `slpn`: command-line front end for the symplectic LPN toolkit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use slpn::attacks::{
    brute_force_decide, brute_force_search, isd_parallel, pair_aware_isd, prange_isd,
    AttackResult, IsdConfig, IsdVariant,
};
use slpn::harness::{run_experiment, wilson, ExperimentSpec, Rows};
use slpn::io::{
    read_json, write_json, CiphertextFile, OwfIndexFile, OwfInputFile, PublicKeyFile,
    SecretKeyFile, SuPublicKeyFile,
};
use slpn::owf::{owf_eval, owf_gen, owf_sample, owf_verify_preimage, OwfIndex, OwfInput};
use slpn::par::{init_threads, map_trials, Execution};
use slpn::pke::{self, pick_p_for_success, PublicKey, SecretKey};
use slpn::reductions::{
    dual_mode_transform, lpn_drop_bits, lsn_to_symplpn, measure_drop_bit, measure_drop_bit_both,
    Branch, BruteForceOracle, CoinOracle, Decision, DropBitConfig, Oracle, ReductionReport,
    WitnessOracle,
};
use slpn::sampling::{gen_lpn, gen_lsn, gen_symplpn, Instance, Kind};
use slpn::supke::{su_dec, su_enc, su_gen, SuPublicKey};
use slpn::{BitVec, Rng};

#[derive(Parser)]
#[command(name = "slpn", version, about = "Symplectic LPN toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an LPN, sympLPN or LSN instance.
    Sample(SampleArgs),
    /// Generate a PKE key pair.
    Keygen(KeygenArgs),
    /// Encrypt one bit.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext and print the bit.
    Decrypt(DecryptArgs),
    /// Generate a key pair with a seed-encoded public matrix.
    SuKeygen(KeygenArgs),
    /// Encrypt one bit under a seed-encoded public key.
    SuEncrypt(EncryptArgs),
    /// Decrypt a ciphertext produced by `su-encrypt`.
    SuDecrypt(DecryptArgs),
    /// One-way function: index generation, sampling, evaluation, verification.
    #[command(subcommand)]
    Owf(OwfCommand),
    /// Run a reduction against a chosen oracle.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Attack an instance file.
    Attack(AttackArgs),
    /// Run an experiment spec. Exits 0 iff every assertion passes.
    Experiment(ExperimentArgs),
}

/// A noise rate or `auto:<target success>`.
#[derive(Clone, Debug)]
enum Noise {
    Value(f64),
    Auto(f64),
}

impl std::str::FromStr for Noise {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(t) = s.strip_prefix("auto:") {
            return t
                .parse()
                .map(Noise::Auto)
                .map_err(|_| format!("bad target in {s:?}"));
        }
        s.parse().map(Noise::Value).map_err(|_| format!("bad noise rate {s:?}"))
    }
}

impl Noise {
    fn resolve(&self, n: usize) -> Result<f64> {
        Ok(match *self {
            Noise::Value(p) => p,
            Noise::Auto(t) => pick_p_for_success(n, t)?,
        })
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value = "symplpn")]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Defaults to `n`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: f64,
    /// Planted instance; otherwise the word is uniform (ignored for LSN).
    #[arg(long)]
    structured: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep the witness in the output file.
    #[arg(long)]
    with_witness: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value = "auto:0.75")]
    p: Noise,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "pk.json")]
    pk: PathBuf,
    #[arg(long, default_value = "sk.json")]
    sk: PathBuf,
}

#[derive(Args)]
struct EncryptArgs {
    #[arg(long)]
    pk: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    bit: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ciphertext file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecryptArgs {
    #[arg(long)]
    sk: PathBuf,
    #[arg(long)]
    ct: PathBuf,
}

#[derive(Subcommand)]
enum OwfCommand {
    /// Sample an index `(A, B)`.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a domain element `(r, y, e)`.
    Sample {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate `A·r + B·y + e`.
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a candidate preimage. Exits 1 when it is rejected.
    Verify {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output word as written by `owf eval`.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleChoice {
    Brute,
    Coin,
    /// Reads the planted answer; a calibration upper bound.
    Witness,
}

impl OracleChoice {
    fn oracle(self) -> Box<dyn Oracle> {
        match self {
            OracleChoice::Brute => Box::new(BruteForceOracle::default()),
            OracleChoice::Coin => Box::new(CoinOracle),
            OracleChoice::Witness => Box::new(WitnessOracle),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BranchChoice {
    Plain,
    Flooded,
    Both,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Recover `y` of LSN samples with one sympLPN oracle call each.
    LsnToSymplpn {
        #[arg(long, value_enum, default_value = "brute")]
        oracle: OracleChoice,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure the one-bit reduction's advantage on each branch.
    DropBit {
        #[arg(long, value_enum, default_value = "both")]
        branch: BranchChoice,
        #[arg(long, value_enum, default_value = "brute")]
        oracle: OracleChoice,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Flooded pairs; default `ceil(log2(n)² / (1 − 4p/3))`.
        #[arg(long)]
        m: Option<usize>,
        /// Output noise rate; default `p + log2(n)²/n`.
        #[arg(long)]
        p_prime: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Syndrome form `(H, b ⊙ H)` of a sympLPN(n − 1, n, p) instance file.
    DualMode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the advantage of deciding LPN(k) with an LPN(k − k') oracle.
    LpnDrop {
        #[arg(long, value_enum, default_value = "brute")]
        oracle: OracleChoice,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Columns discarded.
        #[arg(long)]
        drop: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AttackKind {
    Prange,
    PairIsd,
    Brute,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(value_enum)]
    kind: AttackKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    max_iters: u64,
    #[arg(long, default_value_t = 2.5)]
    weight_factor: f64,
    /// Independent ISD restarts run side by side.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the spec's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    read_json(path).with_context(|| format!("reading {}", path.display()))
}

fn sample(a: SampleArgs) -> Result<()> {
    let mut rng = Rng::new(a.seed);
    let k = a.k.unwrap_or(a.n);
    let inst = match a.kind {
        Kind::Symplpn => gen_symplpn(&mut rng, k, a.n, a.p, a.structured)?,
        Kind::Lpn => gen_lpn(&mut rng, k, a.n, a.p, a.structured)?,
        Kind::Lsn => gen_lsn(&mut rng, k, a.n, a.p)?,
    };
    let inst = if a.with_witness { inst } else { inst.without_witness() };
    emit(&inst, a.out.as_deref())
}

fn keygen(a: KeygenArgs) -> Result<()> {
    let p = a.p.resolve(a.n)?;
    let mut rng = Rng::new(a.seed);
    let (pk, sk) = pke::gen(&mut rng, a.n, p)?;
    write_json(&a.pk, &PublicKeyFile::from(&pk))?;
    write_json(&a.sk, &SecretKeyFile::from(&sk))?;
    eprintln!("n={} p={p:.6} predicted success {:.4}", a.n, pke::predict_success(a.n, p)?);
    Ok(())
}

fn encrypt(a: EncryptArgs) -> Result<()> {
    let pk = PublicKey::try_from(load::<PublicKeyFile>(&a.pk)?)?;
    let mut rng = Rng::new(a.seed);
    let ct = pke::enc(&mut rng, &pk, a.bit == 1, pk.p)?;
    emit(&CiphertextFile::from(&ct), a.out.as_deref())
}

fn decrypt(a: DecryptArgs) -> Result<()> {
    let sk = SecretKey::from(load::<SecretKeyFile>(&a.sk)?);
    let ct = load::<CiphertextFile>(&a.ct)?.try_into()?;
    println!("{}", u8::from(pke::dec(&sk, &ct)?));
    Ok(())
}

fn su_keygen(a: KeygenArgs) -> Result<()> {
    let p = a.p.resolve(a.n)?;
    let mut rng = Rng::new(a.seed);
    let (pk, sk) = su_gen(&mut rng, a.n, p)?;
    write_json(&a.pk, &SuPublicKeyFile::from(&pk))?;
    write_json(&a.sk, &SecretKeyFile::from(&sk))?;
    eprintln!("n={} p={p:.6} public key {} bits", a.n, pk.bit_len());
    Ok(())
}

fn su_encrypt(a: EncryptArgs) -> Result<()> {
    let pk = SuPublicKey::try_from(load::<SuPublicKeyFile>(&a.pk)?)?;
    let mut rng = Rng::new(a.seed);
    let ct = su_enc(&mut rng, &pk, a.bit == 1)?;
    emit(&CiphertextFile::from(&ct), a.out.as_deref())
}

fn su_decrypt(a: DecryptArgs) -> Result<()> {
    let sk = SecretKey::from(load::<SecretKeyFile>(&a.sk)?);
    let ct = load::<CiphertextFile>(&a.ct)?.try_into()?;
    println!("{}", u8::from(su_dec(&sk, &ct)?));
    Ok(())
}

fn owf(cmd: OwfCommand) -> Result<ExitCode> {
    match cmd {
        OwfCommand::Gen { n, k, p, seed, out } => {
            let idx = owf_gen(&mut Rng::new(seed), k, n, p)?;
            emit(&OwfIndexFile::from(&idx), out.as_deref())?;
        }
        OwfCommand::Sample { index, p, seed, out } => {
            let idx = OwfIndex::try_from(load::<OwfIndexFile>(&index)?)?;
            let x = owf_sample(&mut Rng::new(seed), &idx, p)?;
            emit(&OwfInputFile::from(&x), out.as_deref())?;
        }
        OwfCommand::Eval { index, input, out } => {
            let idx = OwfIndex::try_from(load::<OwfIndexFile>(&index)?)?;
            let x = OwfInput::from(load::<OwfInputFile>(&input)?);
            emit(&owf_eval(&idx, &x)?, out.as_deref())?;
        }
        OwfCommand::Verify { index, input, target, p } => {
            let idx = OwfIndex::try_from(load::<OwfIndexFile>(&index)?)?;
            let x = OwfInput::from(load::<OwfInputFile>(&input)?);
            let y: BitVec = load(&target)?;
            let ok = owf_verify_preimage(&idx, &x, &y, p)?;
            println!("{ok}");
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RecoveryReport {
    trials: usize,
    successes: usize,
    rate: f64,
    ci_low: f64,
    ci_high: f64,
    baseline: f64,
}

#[derive(Serialize)]
struct BothBranches {
    plain: ReductionReport,
    flooded: ReductionReport,
    selected: Branch,
}

fn reduce(cmd: ReduceCommand) -> Result<()> {
    let exec = Execution::from_env();
    match cmd {
        ReduceCommand::LsnToSymplpn { oracle, n, k, p, trials, seed } => {
            let oracle = oracle.oracle();
            let hits = map_trials(exec, &Rng::new(seed), trials, |_, r| -> slpn::Result<bool> {
                let inst = gen_lsn(r, k, n, p)?;
                let y = inst.witness.as_ref().map(|w| w.secret.extract(n, k));
                Ok(Some(lsn_to_symplpn(&inst, oracle.as_ref(), r)?) == y)
            });
            let mut successes = 0;
            for h in hits {
                successes += usize::from(h?);
            }
            let (ci_low, ci_high) = wilson(successes, trials);
            emit(
                &RecoveryReport {
                    trials,
                    successes,
                    rate: successes as f64 / trials.max(1) as f64,
                    ci_low,
                    ci_high,
                    baseline: 0.5f64.powi(k as i32),
                },
                None,
            )
        }
        ReduceCommand::DropBit { branch, oracle, n, p, m, p_prime, trials, seed } => {
            let cfg = DropBitConfig { m, p_prime };
            let oracle = oracle.oracle();
            let rng = Rng::new(seed);
            match branch {
                BranchChoice::Both => {
                    let (plain, flooded, selected) =
                        measure_drop_bit_both(n, p, &cfg, oracle.as_ref(), trials, &rng, exec)?;
                    emit(&BothBranches { plain, flooded, selected }, None)
                }
                BranchChoice::Plain | BranchChoice::Flooded => {
                    let b = if matches!(branch, BranchChoice::Plain) {
                        Branch::Plain
                    } else {
                        Branch::Flooded
                    };
                    let r = measure_drop_bit(n, p, b, &cfg, oracle.as_ref(), trials, &rng, exec)?;
                    emit(&r, None)
                }
            }
        }
        ReduceCommand::DualMode { input, seed, out } => {
            let inst: Instance = load(&input)?;
            let d = dual_mode_transform(&inst, &mut Rng::new(seed))?;
            #[derive(Serialize)]
            struct DualModeFile {
                h: slpn::BitMat,
                w: BitVec,
            }
            emit(&DualModeFile { h: d.h, w: d.w }, out.as_deref())
        }
        ReduceCommand::LpnDrop { oracle, n, k, drop, p, trials, seed } => {
            if trials == 0 {
                bail!("trials must be positive");
            }
            let oracle = oracle.oracle();
            let said = map_trials(exec, &Rng::new(seed), 2 * trials, |i, r| -> slpn::Result<bool> {
                let inst = gen_lpn(r, k, n, p, i < trials)?;
                Ok(lpn_drop_bits(&inst, drop, oracle.as_ref(), r)? == Decision::Structured)
            });
            let mut counts = [0usize; 2];
            for (i, s) in said.into_iter().enumerate() {
                counts[usize::from(i >= trials)] += usize::from(s?);
            }
            emit(
                &ReductionReport::from_counts(None, trials, counts[0], counts[1], 0),
                None,
            )
        }
    }
}

#[derive(Serialize)]
struct AttackOutput {
    attack: &'static str,
    success: bool,
    secret: Option<BitVec>,
    error: Option<BitVec>,
    weight: Option<usize>,
    decision: Option<Decision>,
    iterations: u64,
    attempts: u64,
    seconds: f64,
}

impl AttackOutput {
    fn from_isd(attack: &'static str, inst: &Instance, r: AttackResult) -> Self {
        let weight = r.error.as_ref().map(|e| match inst.kind {
            Kind::Lpn => e.weight(),
            _ => slpn::gf2::pair_weight(e),
        });
        Self {
            attack,
            success: r.success,
            attempts: r.attempts(),
            iterations: r.iterations,
            seconds: r.wall_time.as_secs_f64(),
            secret: r.secret,
            error: r.error,
            weight,
            decision: None,
        }
    }
}

fn attack(a: AttackArgs) -> Result<ExitCode> {
    init_threads(a.threads);
    let inst: Instance = load(&a.input)?;
    let inst = inst.without_witness();
    let cfg = IsdConfig {
        max_iters: a.max_iters,
        weight_factor: a.weight_factor,
    };
    let rng = Rng::new(a.seed);
    let workers = a.threads.unwrap_or(1);
    let out = match a.kind {
        AttackKind::Brute => {
            let start = std::time::Instant::now();
            let d = brute_force_search(&inst)?;
            let decision = brute_force_decide(&inst, None)?;
            AttackOutput {
                attack: "brute",
                success: true,
                weight: Some(d.weight),
                secret: Some(d.secret),
                error: Some(d.error),
                decision: Some(decision),
                iterations: 0,
                attempts: 0,
                seconds: start.elapsed().as_secs_f64(),
            }
        }
        AttackKind::Prange | AttackKind::PairIsd => {
            let (name, variant) = match a.kind {
                AttackKind::Prange => ("prange", IsdVariant::Prange),
                _ => ("pair-isd", IsdVariant::PairAware),
            };
            let r = if workers > 1 {
                isd_parallel(&inst, &cfg, &rng, variant, workers)?
            } else {
                let mut rng = rng.split(0);
                match variant {
                    IsdVariant::Prange => prange_isd(&inst, &cfg, &mut rng)?,
                    IsdVariant::PairAware => pair_aware_isd(&inst, &cfg, &mut rng)?,
                }
            };
            AttackOutput::from_isd(name, &inst, r)
        }
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else if out.success {
        println!(
            "{}: success after {} attempts ({} non-singular), weight {}, {:.3}s",
            out.attack,
            out.attempts,
            out.iterations,
            out.weight.unwrap_or(0),
            out.seconds
        );
        if let Some(s) = &out.secret {
            println!("secret {}", s.to_hex());
        }
        if let Some(d) = out.decision {
            println!("decision {}", serde_json::to_string(&d)?.trim_matches('"'));
        }
    } else {
        println!(
            "{}: no solution within {} attempts, {:.3}s",
            out.attack, out.attempts, out.seconds
        );
    }
    Ok(if out.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn experiment(a: ExperimentArgs) -> Result<ExitCode> {
    let mut spec = ExperimentSpec::from_file(&a.spec)
        .with_context(|| format!("loading {}", a.spec.display()))?;
    if a.out.is_some() {
        spec.output = a.out;
    }
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::from_env()
    };
    let report = run_experiment(&spec, exec)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let rows = match &report.rows {
            Rows::Decryption(r) => r.len(),
            Rows::Isd(r) => r.len(),
        };
        println!(
            "{}: {rows} points ({} resumed) in {:.2}s, spec {}",
            report.name,
            report.resumed,
            report.elapsed.as_secs_f64(),
            &report.spec_hash[..12]
        );
        match &report.rows {
            Rows::Decryption(r) => {
                for x in r {
                    println!(
                        "  n={:<5} p={:.5}  predicted {:.4}  measured {:.4} [{:.4}, {:.4}]",
                        x.n, x.p, x.predicted, x.measured, x.ci_low, x.ci_high
                    );
                }
            }
            Rows::Isd(r) => {
                for x in r {
                    println!(
                        "  n={:<4} k={:<4} q={:.4} p={:.4}  median attempts lpn {} symp {} pair {}",
                        x.n,
                        x.k,
                        x.q,
                        x.p_symp,
                        x.lpn_plain_median_attempts,
                        x.symp_plain_median_attempts,
                        x.symp_pair_median_attempts
                    );
                }
            }
        }
        for o in &report.assertions {
            let tag = if o.passed { "PASS" } else { "FAIL" };
            println!("{tag} {}: {}", serde_json::to_string(&o.assertion)?, o.detail);
        }
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads(None);
    match cli.command {
        Command::Sample(a) => sample(a)?,
        Command::Keygen(a) => keygen(a)?,
        Command::Encrypt(a) => encrypt(a)?,
        Command::Decrypt(a) => decrypt(a)?,
        Command::SuKeygen(a) => su_keygen(a)?,
        Command::SuEncrypt(a) => su_encrypt(a)?,
        Command::SuDecrypt(a) => su_decrypt(a)?,
        Command::Owf(c) => return owf(c),
        Command::Reduce(c) => reduce(c)?,
        Command::Attack(a) => return attack(a),
        Command::Experiment(a) => return experiment(a),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

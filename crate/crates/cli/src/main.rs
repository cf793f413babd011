//! `baptista`: key generation, encryption, decryption and analysis runs.
//!
//! Plaintext is a raw byte stream; byte `v` is symbol `v` of a 256-symbol
//! alphabet. Data goes to files, reports to stdout, diagnostics to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use baptista::analysis::{self, AnalysisReport};
use baptista::chaos::lyapunov_pwlcm;
use baptista::cipher::{Decipher, Encipher};
use baptista::encoding::{self, CodecParams, Header, Scheme};
use baptista::key::{MapFamily, DEFAULT_ALPHABET};
use baptista::seed::derive_seed;
use baptista::{KeyMaterial64, Letter, Partition64, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Parser)]
#[command(name = "baptista", version, about = "Search-based chaotic cipher laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a fresh random key file.
    Keygen {
        #[arg(long = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = MapArg::SkewTent)]
        map: MapArg,
        /// Master seed; omitted means OS randomness.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Encrypt a file.
    Encrypt {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value_t = SchemeArg::Rectified)]
        scheme: SchemeArg,
        /// Defaults to `fixed` for original/masked and `varlen` for rectified.
        #[arg(long, value_enum)]
        encoding: Option<EncodingArg>,
        /// Seeds the κ stream used when η > 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the key's η.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Decrypt a file; the scheme is read from the container header.
    Decrypt {
        #[command(flatten)]
        io: Io,
    },
    /// Chi-square fit of single-character counts to a geometric law.
    AnalyzeDist {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Monte Carlo per-position decryption correctness.
    AnalyzeError {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = SchemeArg::Masked)]
        scheme: SchemeArg,
        /// Characters per message.
        #[arg(long, default_value_t = 50)]
        len: usize,
    },
    /// Occupancy, autocorrelation, Lyapunov exponent and mask audit of the
    /// key's map. `--trials` is the orbit length.
    AnalyzeMap {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct Io {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as CSV.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapArg {
    Logistic,
    SkewTent,
    Pwlcm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Original,
    Masked,
    Rectified,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EncodingArg {
    Fixed,
    Varlen,
    Compressed,
}

fn container_scheme(scheme: SchemeArg, encoding: Option<EncodingArg>) -> Result<Scheme> {
    use EncodingArg as E;
    use SchemeArg as S;
    Ok(match (scheme, encoding) {
        (S::Original, None | Some(E::Fixed)) => Scheme::OriginalFixed,
        (S::Masked, None | Some(E::Fixed)) => Scheme::MaskedFixed,
        (S::Rectified, None | Some(E::Varlen)) => Scheme::RectifiedVarLen,
        (S::Rectified, Some(E::Compressed)) => Scheme::RectifiedCompressed,
        (s, Some(e)) => bail!("{e:?} encoding cannot carry {s:?} ciphertext"),
    })
}

fn read_key(path: &Path) -> Result<KeyMaterial64> {
    let text = fs::read_to_string(path).with_context(|| format!("reading key file {}", path.display()))?;
    text.parse().with_context(|| format!("bad key file {}", path.display()))
}

fn keygen(out: &Path, map: MapArg, seed: Option<u64>, eta: Option<f64>) -> Result<()> {
    let family = match map {
        MapArg::Logistic => MapFamily::Logistic,
        MapArg::SkewTent => MapFamily::SkewTent,
        MapArg::Pwlcm => MapFamily::Pwlcm,
    };
    let mut rng = match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(derive_seed(s, "keygen")),
        None => ChaCha20Rng::from_os_rng(),
    };
    let mut key = KeyMaterial64::generate(&mut rng, family);
    if let Some(eta) = eta {
        key.eta = eta;
        key.validate()?;
    }
    fs::write(out, key.to_string()).with_context(|| format!("writing {}", out.display()))
}

fn encrypt(io: &Io, scheme: Scheme, seed: Option<u64>, eta: Option<f64>) -> Result<()> {
    let mut key = read_key(&io.key)?;
    if let Some(eta) = eta {
        key.eta = eta;
        key.validate()?;
    }
    let partition = key.partition()?;
    let plaintext = fs::read(&io.input).with_context(|| format!("reading {}", io.input.display()))?;
    let mut enc = Encipher::new(&key, &partition, scheme.variant())?;
    if let Some(s) = seed {
        enc = enc.with_kappa_seed(derive_seed(s, "kappa"));
    }
    let units = plaintext
        .iter()
        .map(|&b| enc.encrypt_symbol(u16::from(b)))
        .collect::<Result<Vec<_>, _>>()
        .context("encryption failed")?;
    let params = CodecParams::from(&key);
    let payload = match scheme {
        Scheme::OriginalFixed | Scheme::MaskedFixed => encoding::encode_fixed(&units, scheme.variant(), &params)?,
        Scheme::RectifiedVarLen => encoding::encode_varlen(&units, &params)?,
        Scheme::RectifiedCompressed => encoding::compress_geometric(&units, &params)?,
    };
    let header = Header { scheme, n_bits: key.n_bits as u8, alphabet: DEFAULT_ALPHABET as u32 };
    fs::write(&io.out, encoding::write_ciphertext(&header, &payload))
        .with_context(|| format!("writing {}", io.out.display()))
}

fn decrypt(io: &Io) -> Result<()> {
    let key = read_key(&io.key)?;
    let partition = key.partition()?;
    let bytes = fs::read(&io.input).with_context(|| format!("reading {}", io.input.display()))?;
    let (header, payload) = encoding::read_ciphertext(&bytes)?;
    ensure!(
        u32::from(header.n_bits) == key.n_bits,
        "ciphertext uses {}-bit tokens but the key says {}",
        header.n_bits,
        key.n_bits
    );
    ensure!(header.alphabet as usize == DEFAULT_ALPHABET, "unsupported alphabet size {}", header.alphabet);
    let params = CodecParams::from(&key);
    let units = match header.scheme {
        Scheme::OriginalFixed | Scheme::MaskedFixed => {
            encoding::decode_fixed(payload, header.scheme.variant(), &params)?
        }
        Scheme::RectifiedVarLen => encoding::decode_varlen(payload, &params)?,
        Scheme::RectifiedCompressed => encoding::decompress_geometric(payload, &params)?,
    };
    let plaintext = decrypt_units(&key, &partition, header.scheme.variant(), &units)?;
    fs::write(&io.out, plaintext).with_context(|| format!("writing {}", io.out.display()))
}

fn decrypt_units(
    key: &KeyMaterial64,
    partition: &Partition64,
    variant: Variant,
    units: &[baptista::CipherUnit],
) -> Result<Vec<u8>> {
    let mut dec = Decipher::new(key, partition, variant)?;
    let mut out = Vec::with_capacity(units.len());
    for (i, unit) in units.iter().enumerate() {
        match dec.decrypt_unit(unit).context("decryption failed")? {
            Letter::Symbol(s) => out.push(u8::try_from(s).context("symbol outside the byte range")?),
            Letter::Beta => bail!("character {i} decrypted to a state outside the visiting interval"),
        }
    }
    Ok(out)
}

fn emit(report: &AnalysisReport, out: Option<&Path>) -> Result<()> {
    report.check()?;
    print!("{report}");
    if let Some(path) = out {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(file)?;
    }
    Ok(())
}

fn analyze_dist(run: &RunArgs) -> Result<()> {
    let key = read_key(&run.key)?;
    let partition = key.partition()?;
    let samples = analysis::count_samples(&key, &partition, run.trials, derive_seed(run.seed, "analyze-dist"))?;
    let reference_p = analysis::interval_hit_probability(&key, &partition, 1_000_000)?;
    let report = analysis::count_distribution_test(&samples, key.n0, reference_p)?;
    emit(&report, run.out.as_deref())
}

fn analyze_error(run: &RunArgs, scheme: SchemeArg, len: usize) -> Result<()> {
    let key = read_key(&run.key)?;
    let mut report = match scheme {
        SchemeArg::Masked => analysis::masked_error_rate(&key, run.trials, len, run.seed)?,
        SchemeArg::Rectified => {
            analysis::error_rate_experiment(&key, Variant::Rectified, run.trials, len, run.seed)?.report()
        }
        SchemeArg::Original => bail!("the original scheme decrypts by replay; choose masked or rectified"),
    };
    let first = report.rate_at(1).expect("message_len >= 1").estimate.rate;
    report.note("position1_error", 1.0 - first);
    emit(&report, run.out.as_deref())
}

fn analyze_map(run: &RunArgs) -> Result<()> {
    const LAGS: usize = 10;
    let key = read_key(&run.key)?;
    let orbit = analysis::orbit(&key.map, key.perturb, key.x0, run.trials)?;
    let occ = analysis::occupancy(&orbit, DEFAULT_ALPHABET)?;
    let tau = analysis::autocorrelation(&orbit, LAGS)?;
    let audit = analysis::mask_independence_audit(&key, derive_seed(run.seed, "audit") as u32 & 0xFFFF, run.trials, 8, LAGS)?;

    let mut report = AnalysisReport::new("map diagnostics");
    report.samples = orbit.len() as u64;
    report.histogram = occ.counts.clone();
    report.chi_square = Some(occ.chi_square);
    report.note("iterations", orbit.len());
    report.note("occupancy_max_abs_z", occ.max_abs_z);
    report.note("occupancy_within_5_sigma", occ.within(5.0));
    for (k, t) in tau.iter().enumerate() {
        report.note(format!("tau_{}", k + 1), t);
    }
    if let Ok(lambda) = lyapunov_pwlcm(&key.map) {
        report.note("lyapunov", lambda);
    }
    report.note("mask_match_rate", audit.match_rate);
    report.note("mask_expected_rate", audit.expected_rate);
    let worst = audit.lag_correlation.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    report.note("mask_max_lag_correlation", worst);
    report.note("mask_word_correlation", audit.word_correlation);
    emit(&report, run.out.as_deref())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen { out, map, seed, eta } => keygen(&out, map, seed, eta),
        Command::Encrypt { io, scheme, encoding, seed, eta } => encrypt(&io, container_scheme(scheme, encoding)?, seed, eta),
        Command::Decrypt { io } => decrypt(&io),
        Command::AnalyzeDist { run } => analyze_dist(&run),
        Command::AnalyzeError { run, scheme, len } => analyze_error(&run, scheme, len),
        Command::AnalyzeMap { run } => analyze_map(&run),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

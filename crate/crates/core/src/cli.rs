//! Command-line front end.
//!
//! Data comes in on stdin (or `--input`), results go to stdout and diagnostics
//! to stderr. Exit codes: 0 on success, 2 on usage errors and out-of-range
//! parameters, 1 on unreadable or malformed input.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::anchor::estimate_edit_distance_det;
use crate::error::Error;
use crate::exact::{exact_edit_distance_indel, exact_lis_length};
use crate::experiment::{write_csv, ExperimentRecord};
use crate::generate::{generate_instance, Instance, InstanceKind, KindName};
use crate::lcs_reduction::{estimate_with_index, FixedStringIndex};
use crate::lis::{estimate_dm, DmSketch};

/// Environment variable capping the number of `bench` worker threads.
pub const THREADS_ENV: &str = "CHAINSTREAM_THREADS";

const ALNUM: &[u8; 62] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

#[derive(Debug, Parser)]
#[command(
    name = "chainstream",
    version,
    about = "Streaming estimators for distance to monotonicity and edit distance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate n − LIS of whitespace-separated integers in one pass.
    Dm(DmArgs),
    /// Exact n − LIS.
    DmExact(InputArgs),
    /// Randomized one-pass edit distance, additive δn error.
    EdltRand(EdltRandArgs),
    /// Deterministic one-pass edit distance within a (1 + δ) factor.
    EdltDet(EdltDetArgs),
    /// Exact insertion-deletion edit distance.
    EdltExact(StringArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Repeat an estimator over many seeds on one generated instance.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Read x from this file instead of stdin.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DmArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Declared length; values are then consumed as they arrive.
    #[arg(long)]
    n: Option<u64>,
    /// Report space usage on stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct StringArgs {
    #[command(flatten)]
    input: InputArgs,
    /// File holding the fixed string y.
    #[arg(long)]
    y: PathBuf,
    /// Treat input as UTF-8 code points instead of raw bytes.
    #[arg(long)]
    utf8: bool,
    /// Drop one trailing line ending from x and y.
    #[arg(long)]
    trim: bool,
}

#[derive(Debug, Args)]
struct EdltRandArgs {
    #[command(flatten)]
    strings: StringArgs,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct EdltDetArgs {
    #[command(flatten)]
    strings: StringArgs,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args, Clone)]
struct KindArgs {
    #[arg(long)]
    kind: Option<KindName>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Planted increasing fraction for planted-lis.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
    /// Largest multiplicity of any symbol in y for string-pair.
    #[arg(long, default_value_t = u32::MAX)]
    k_cap: u32,
    /// Per-position chance that x gets a fresh symbol instead of a copy of y.
    #[arg(long, default_value_t = 1.0)]
    mutation: f64,
}

impl KindArgs {
    fn kind(&self, default: KindName) -> InstanceKind {
        match self.kind.unwrap_or(default) {
            KindName::RandomPermutation => InstanceKind::RandomPermutation,
            KindName::PlantedLis => InstanceKind::PlantedLis { beta: self.beta },
            KindName::ReverseSorted => InstanceKind::ReverseSorted,
            KindName::StringPair => InstanceKind::StringPair {
                alphabet: self.alphabet,
                k_cap: self.k_cap,
                mutation: self.mutation,
            },
            KindName::IdenticalPair => InstanceKind::IdenticalPair {
                alphabet: self.alphabet,
            },
            KindName::DisjointPair => InstanceKind::DisjointPair {
                alphabet: self.alphabet,
            },
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    kind: KindArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination of x for string kinds.
    #[arg(long)]
    x_out: Option<PathBuf>,
    /// Destination of y for string kinds.
    #[arg(long)]
    y_out: Option<PathBuf>,
    /// Allow symbols outside ASCII, written as UTF-8.
    #[arg(long)]
    utf8: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Dm,
    EdltRand,
    EdltDet,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Dm => "dm",
            Algo::EdltRand => "edlt-rand",
            Algo::EdltDet => "edlt-det",
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    kind: KindArgs,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Master seed: the instance uses it directly, trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination of the per-trial CSV; stdout gets a one-line summary.
    #[arg(long)]
    csv: PathBuf,
    /// Record wall_ns as 0 so that the CSV is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::TooLarge { .. } => {
                CliError::Usage(e.to_string())
            }
            Error::LengthMismatch { .. } | Error::DeclaredLengthMismatch { .. } => {
                CliError::Input(e.to_string())
            }
            other => CliError::Input(format!("invalid input: {other}")),
        }
    }
}

fn io_error(what: &str, path: Option<&Path>, e: std::io::Error) -> CliError {
    match path {
        Some(p) => CliError::Input(format!("cannot read {what} `{}`: {e}", p.display())),
        None => CliError::Input(format!("cannot read {what} from stdin: {e}")),
    }
}

fn write_error(e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot write output: {e}"))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if informational {
                let _ = stdout.write_all(text.as_bytes());
                return 0;
            }
            let _ = stderr.write_all(text.as_bytes());
            return 2;
        }
    };
    let result = match cli.command {
        Command::Dm(a) => cmd_dm(a, stdin, stdout, stderr),
        Command::DmExact(a) => cmd_dm_exact(a, stdin, stdout),
        Command::EdltRand(a) => cmd_edlt_rand(a, stdin, stdout, stderr),
        Command::EdltDet(a) => cmd_edlt_det(a, stdin, stdout, stderr),
        Command::EdltExact(a) => cmd_edlt_exact(a, stdin, stdout),
        Command::Gen(a) => cmd_gen(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
    };
    match result.and_then(|()| stdout.flush().map_err(write_error)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

fn open_input<'a>(
    input: &InputArgs,
    stdin: &'a mut dyn BufRead,
) -> Result<Box<dyn BufRead + 'a>, CliError> {
    match &input.input {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| io_error("input", Some(p), e))?;
            Ok(Box::new(BufReader::new(f)))
        }
        None => Ok(Box::new(stdin)),
    }
}

/// Streams whitespace-separated `i64` tokens, line by line.
fn for_each_value(
    reader: &mut dyn BufRead,
    mut f: impl FnMut(i64) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut line = String::new();
    let mut line_no = 0usize;
    loop {
        line.clear();
        let read = reader
            .read_line(&mut line)
            .map_err(|e| io_error("values", None, e))?;
        if read == 0 {
            return Ok(());
        }
        line_no += 1;
        for tok in line.split_whitespace() {
            let v = tok.parse::<i64>().map_err(|_| {
                CliError::Input(format!(
                    "invalid input: line {line_no}: `{tok}` is not a 64-bit integer"
                ))
            })?;
            f(v)?;
        }
    }
}

fn read_values(reader: &mut dyn BufRead) -> Result<Vec<i64>, CliError> {
    let mut values = Vec::new();
    for_each_value(reader, |v| {
        values.push(v);
        Ok(())
    })?;
    Ok(values)
}

fn cmd_dm(
    a: DmArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut reader = open_input(&a.input, stdin)?;
    let est = match a.n {
        Some(n) => {
            let mut sketch = DmSketch::new(n, a.delta, a.gamma, a.seed)?;
            for_each_value(&mut reader, |v| sketch.push(v).map_err(CliError::from))?;
            sketch.finish()?
        }
        None => {
            // validate parameters before reading possibly large input
            DmSketch::<i64>::new(0, a.delta, a.gamma, a.seed)?;
            let values = read_values(&mut reader)?;
            let n = values.len() as u64;
            estimate_dm(values, n, a.delta, a.gamma, a.seed)?
        }
    };
    writeln!(stdout, "{}", est.dm_estimate).map_err(write_error)?;
    if a.verbose {
        let _ = writeln!(
            stderr,
            "n={} lis_estimate={} peak_active={} fell_back={} space_cap={}",
            est.n,
            est.lis_estimate,
            est.peak_active,
            est.fell_back,
            est.space_cap.map_or("none".to_string(), |c| c.to_string())
        );
    }
    Ok(())
}

fn cmd_dm_exact(
    a: InputArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut reader = open_input(&a, stdin)?;
    let values = read_values(&mut reader)?;
    let dm = values.len() - exact_lis_length(&values);
    writeln!(stdout, "{dm}").map_err(write_error)
}

fn decode(mut bytes: Vec<u8>, utf8: bool, trim: bool, what: &str) -> Result<Vec<u32>, CliError> {
    if trim && bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    if utf8 {
        let text = String::from_utf8(bytes)
            .map_err(|e| CliError::Input(format!("invalid input: {what} is not UTF-8: {e}")))?;
        Ok(text.chars().map(u32::from).collect())
    } else {
        Ok(bytes.into_iter().map(u32::from).collect())
    }
}

fn read_strings(a: &StringArgs, stdin: &mut dyn BufRead) -> Result<(Vec<u32>, Vec<u32>), CliError> {
    let y_bytes = fs::read(&a.y).map_err(|e| io_error("y", Some(&a.y), e))?;
    let mut x_bytes = Vec::new();
    open_input(&a.input, stdin)?
        .read_to_end(&mut x_bytes)
        .map_err(|e| io_error("x", a.input.input.as_deref(), e))?;
    let y = decode(y_bytes, a.utf8, a.trim, "y")?;
    let x = decode(x_bytes, a.utf8, a.trim, "x")?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        }
        .into());
    }
    Ok((x, y))
}

fn cmd_edlt_rand(
    a: EdltRandArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    crate::amdp::AmdpParams::new(a.delta, a.gamma, 1, a.seed)?;
    let (x, y) = read_strings(&a.strings, stdin)?;
    let index = FixedStringIndex::build(&y);
    let est = estimate_with_index(&x, &index, a.delta, a.gamma, a.seed)?;
    writeln!(stdout, "{}", est.est_d).map_err(write_error)?;
    if a.verbose {
        let _ = writeln!(
            stderr,
            "n={} k={} pairs={} chain_defect={} peak_active={} fell_back={}",
            est.n, est.k, est.pair_count, est.est, est.peak_active, est.fell_back
        );
    }
    Ok(())
}

fn cmd_edlt_det(
    a: EdltDetArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if !(a.delta > 0.0 && a.delta <= 1.0) {
        return Err(crate::error::invalid("delta", a.delta, "must lie in (0, 1]").into());
    }
    let (x, y) = read_strings(&a.strings, stdin)?;
    let est = estimate_edit_distance_det(x, &y, a.delta)?;
    writeln!(stdout, "{}", est.estimate).map_err(write_error)?;
    if a.verbose {
        let _ = writeln!(
            stderr,
            "n={} block_len={} blocks={} peak_cells={}",
            est.n, est.block_len, est.blocks, est.peak_cells
        );
    }
    Ok(())
}

fn cmd_edlt_exact(
    a: StringArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (x, y) = read_strings(&a, stdin)?;
    let e = exact_edit_distance_indel(&x, &y)?;
    writeln!(stdout, "{e}").map_err(write_error)
}

/// Renders symbols as text: alphanumeric ASCII when they fit, otherwise
/// code points from U+0100 upward (requires `utf8`).
fn render(symbols: &[u32], largest: u32, utf8: bool) -> Result<String, CliError> {
    if (largest as usize) < ALNUM.len() {
        return Ok(symbols.iter().map(|&s| ALNUM[s as usize] as char).collect());
    }
    if !utf8 {
        return Err(CliError::Usage(format!(
            "parameter out of range: {} symbols do not fit in ASCII; pass --utf8",
            largest as u64 + 1
        )));
    }
    symbols
        .iter()
        .map(|&s| {
            0x100u32
                .checked_add(s)
                .filter(|&c| c < 0xD800)
                .and_then(char::from_u32)
                .ok_or_else(|| {
                    CliError::Usage(format!("parameter out of range: symbol {s} too large"))
                })
        })
        .collect()
}

fn cmd_gen(a: GenArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kind = a.kind.kind(KindName::RandomPermutation);
    let instance = generate_instance(&kind, a.kind.n, a.seed)?;
    match instance {
        Instance::Array(values) => {
            for v in values {
                writeln!(stdout, "{v}").map_err(write_error)?;
            }
        }
        Instance::Strings { x, y } => {
            let (Some(x_out), Some(y_out)) = (&a.x_out, &a.y_out) else {
                return Err(CliError::Usage(format!("{kind} needs --x-out and --y-out")));
            };
            let largest = x.iter().chain(&y).copied().max().unwrap_or(0);
            let x_text = render(&x, largest, a.utf8)?;
            let y_text = render(&y, largest, a.utf8)?;
            for (path, text) in [(x_out, x_text), (y_out, y_text)] {
                fs::write(path, text).map_err(|e| {
                    CliError::Input(format!("cannot write `{}`: {e}", path.display()))
                })?;
            }
        }
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "parameter out of range: {THREADS_ENV}=`{raw}` is not a count"
            ))
        })?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker threads: {e}")))
}

/// Fraction of trials a `1 − γ` guarantee may miss, with three binomial
/// standard deviations of slack.
pub fn allowed_violation_fraction(gamma: f64, trials: u64) -> f64 {
    gamma + 3.0 * (gamma * (1.0 - gamma) / trials as f64).sqrt()
}

fn cmd_bench(a: BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage(
            "parameter out of range: --trials must be positive".into(),
        ));
    }
    let default_kind = match a.algo {
        Algo::Dm => KindName::RandomPermutation,
        Algo::EdltRand | Algo::EdltDet => KindName::StringPair,
    };
    let kind = a.kind.kind(default_kind);
    if kind.is_array() != (a.algo == Algo::Dm) {
        return Err(CliError::Usage(format!(
            "instance kind {kind} does not fit algorithm {}",
            a.algo.name()
        )));
    }
    match a.algo {
        Algo::Dm => drop(DmSketch::<i64>::new(0, a.delta, a.gamma, a.seed)?),
        Algo::EdltRand => drop(crate::amdp::AmdpParams::new(a.delta, a.gamma, 1, a.seed)?),
        Algo::EdltDet => {
            if !(a.delta > 0.0 && a.delta <= 1.0) {
                return Err(crate::error::invalid("delta", a.delta, "must lie in (0, 1]").into());
            }
        }
    }
    let n = a.kind.n;
    let instance = generate_instance(&kind, n, a.seed)?;
    let exact = match &instance {
        Instance::Array(v) => (v.len() - exact_lis_length(v)) as u64,
        Instance::Strings { x, y } => exact_edit_distance_indel(x, y)? as u64,
    };
    let index = match &instance {
        Instance::Strings { y, .. } if a.algo == Algo::EdltRand => Some(FixedStringIndex::build(y)),
        _ => None,
    };

    let gamma = (a.algo != Algo::EdltDet).then_some(a.gamma);
    let trial = |t: u64| -> Result<ExperimentRecord, Error> {
        let seed = a.seed.wrapping_add(t);
        let start = Instant::now();
        let (estimate, peak_active, fell_back) = match (&instance, a.algo) {
            (Instance::Array(v), Algo::Dm) => {
                let e = estimate_dm(v.iter().copied(), v.len() as u64, a.delta, a.gamma, seed)?;
                (e.dm_estimate, e.peak_active as u64, e.fell_back)
            }
            (Instance::Strings { x, .. }, Algo::EdltRand) => {
                let idx = index.as_ref().expect("index built for edlt-rand");
                let e = estimate_with_index(x, idx, a.delta, a.gamma, seed)?;
                (e.est_d, e.peak_active as u64, e.fell_back)
            }
            (Instance::Strings { x, y }, Algo::EdltDet) => {
                let e = estimate_edit_distance_det(x.iter().copied(), y, a.delta)?;
                (e.estimate, e.peak_cells as u64, false)
            }
            _ => unreachable!("kind checked against algorithm"),
        };
        let wall_ns = if a.no_timing {
            0
        } else {
            start.elapsed().as_nanos() as u64
        };
        Ok(ExperimentRecord {
            algo: a.algo.name().to_string(),
            n: n as u64,
            delta: a.delta,
            gamma,
            seed,
            estimate,
            exact: None,
            ratio: None,
            additive_err: None,
            peak_active,
            fell_back,
            wall_ns,
        }
        .with_exact(exact))
    };
    let pool = thread_pool()?;
    let records: Vec<ExperimentRecord> = pool.install(|| {
        (0..a.trials)
            .into_par_iter()
            .map(trial)
            .collect::<Result<_, _>>()
    })?;

    let undershoots = records.iter().filter(|r| r.estimate < exact).count();
    let violations = records
        .iter()
        .filter(|r| {
            let est = r.estimate as f64;
            match a.algo {
                Algo::Dm => est > (1.0 + a.delta) * exact as f64,
                Algo::EdltRand => est > exact as f64 + a.delta * n as f64,
                Algo::EdltDet => est > (1.0 + a.delta) * exact as f64 || r.estimate < exact,
            }
        })
        .count();
    let allowed = match a.algo {
        Algo::EdltDet => 0.0,
        _ => allowed_violation_fraction(a.gamma, a.trials),
    };
    let summary = format!(
        "algo={} kind={} n={} trials={} exact={} undershoots={} violations={} violation_fraction={:.6} allowed={:.6}\n",
        a.algo.name(),
        kind,
        n,
        a.trials,
        exact,
        undershoots,
        violations,
        violations as f64 / a.trials as f64,
        allowed
    );

    let file = fs::File::create(&a.csv)
        .map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", a.csv.display())))?;
    write_csv(&records, std::io::BufWriter::new(file))
        .map_err(|e| CliError::Input(format!("cannot write CSV: {e}")))?;
    stdout.write_all(summary.as_bytes()).map_err(write_error)?;
    Ok(())
}

mod analyze;
mod error;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use ans_core::container::{compress, decompress, ContainerHeader, Variant, DEFAULT_TABLE_LOG};
use ans_core::keyed::{keyed_init, DEFAULT_KEY_STRENGTH};
use ans_core::{precise_init, AnsError, StreamConfig};
use clap::{Args, Parser, Subcommand};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use error::CliError;

/// Asymmetric numeral systems: order-0 file compression and coder analysis.
#[derive(Parser, Debug)]
#[command(name = "ans", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a file (`-` for stdin/stdout).
    Compress(CompressArgs),
    /// Decompress a container (`-` for stdin/stdout).
    Decompress(DecompressArgs),
    /// Redundancy analysis of uABS, rANS, tANS and qABS coders.
    Analyze(analyze::AnalyzeArgs),
    /// Print the spread of a tANS table as `x symbol` lines.
    TableGen(TableGenArgs),
    /// Throughput and rate on generated i.i.d. data.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct CompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, default_value = "tans")]
    variant: Variant,
    #[arg(long, default_value_t = DEFAULT_TABLE_LOG)]
    table_log: u8,
    /// Key as hex bytes; tANS only.
    #[arg(long)]
    key: Option<String>,
}

#[derive(Args, Debug)]
struct DecompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    key: Option<String>,
    /// Refuse containers declaring more output bytes than this.
    #[arg(long)]
    max_output: Option<u64>,
}

#[derive(Args, Debug)]
struct TableGenArgs {
    /// Symbol frequencies, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    freqs: Vec<u64>,
    /// Number of states; frequencies are requantized when it differs from their sum.
    #[arg(short = 'l')]
    l: Option<u64>,
    /// Digit base.
    #[arg(short = 'b', default_value_t = 2)]
    b: u64,
    #[arg(long)]
    key: Option<String>,
    /// Swap cap per `l` states for keyed tables.
    #[arg(long, default_value_t = DEFAULT_KEY_STRENGTH)]
    strength: u32,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long, default_value_t = DEFAULT_TABLE_LOG)]
    table_log: u8,
    /// Weights of the generated byte source (symbols 0, 1, ..).
    #[arg(long, value_delimiter = ',', default_value = "2,1,1")]
    freqs: Vec<u64>,
    /// Number of generated bytes.
    #[arg(long, default_value_t = 1_000_000)]
    size: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read(path)?)
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn parse_key(key: &Option<String>) -> Result<Option<Vec<u8>>, CliError> {
    key.as_deref()
        .map(|k| hex::decode(k).map_err(|e| CliError::Usage(format!("--key: {e}"))))
        .transpose()
}

fn run_compress(a: &CompressArgs) -> Result<(), CliError> {
    let input = read_input(&a.input)?;
    let key = parse_key(&a.key)?;
    let z = compress(&input, a.variant, a.table_log, key.as_deref())?;
    write_output(&a.output, &z)?;
    eprintln!(
        "{} -> {} bytes ({:.4} bits/byte)",
        input.len(),
        z.len(),
        if input.is_empty() { 0.0 } else { 8.0 * z.len() as f64 / input.len() as f64 }
    );
    Ok(())
}

fn run_decompress(a: &DecompressArgs) -> Result<(), CliError> {
    let input = read_input(&a.input)?;
    let key = parse_key(&a.key)?;
    let out = ans_core::container::decompress_with_limit(&input, key.as_deref(), a.max_output.unwrap_or(u64::MAX))?;
    write_output(&a.output, &out)
}

fn run_table_gen(a: &TableGenArgs) -> Result<(), CliError> {
    let l = a.l.unwrap_or_else(|| a.freqs.iter().sum());
    let d = analyze::dist_for(&a.freqs, l)?;
    let cfg = StreamConfig::new(l, a.b)?;
    let spread = match parse_key(&a.key)? {
        Some(key) => keyed_init(&d, cfg, &key, a.strength)?,
        None => precise_init(&d, cfg)?,
    };
    print!("{}", spread.dump());
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<(), CliError> {
    let weights = WeightedIndex::new(&a.freqs).map_err(|e| CliError::Usage(format!("--freqs: {e}")))?;
    if a.freqs.len() > 256 {
        return Err(CliError::Usage("--freqs: at most 256 symbols".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let data: Vec<u8> = (0..a.size).map(|_| weights.sample(&mut rng) as u8).collect();
    let total: u64 = a.freqs.iter().sum();
    let probs: Vec<f64> = a.freqs.iter().map(|&f| f as f64 / total as f64).collect();
    println!(
        "{} bytes, seed {}, source entropy {:.6} bits/symbol",
        a.size,
        a.seed,
        ans_core::analysis::shannon_entropy(&probs)
    );
    let variants = match a.variant {
        Some(v) => vec![v],
        None => vec![Variant::Tans, Variant::Rans, Variant::Uabs],
    };
    for v in variants {
        let start = Instant::now();
        let z = compress(&data, v, a.table_log, None)?;
        let enc = start.elapsed();
        let start = Instant::now();
        let back = decompress(&z, None)?;
        let dec = start.elapsed();
        if back != data {
            return Err(AnsError::Format(format!("{v}: round trip mismatch")).into());
        }
        let (header, _) = ContainerHeader::parse(&z)?;
        let mb = a.size as f64 / 1e6;
        println!(
            "{v:>5}: {:.6} payload bits/byte, {} bytes total, encode {:.1} MB/s, decode {:.1} MB/s",
            header.payload_bits as f64 / a.size.max(1) as f64,
            z.len(),
            mb / enc.as_secs_f64(),
            mb / dec.as_secs_f64()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Compress(a) => run_compress(a),
        Command::Decompress(a) => run_decompress(a),
        Command::Analyze(a) => analyze::run(a),
        Command::TableGen(a) => run_table_gen(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ans: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;

use ans_core::analysis::{
    delta_h, emit_csv, inverse_x_fit, qabs_table, random_dist_sweep, random_freqs, rans_bound, shannon_entropy,
    tans_automaton, tans_bound, uabs_automaton, uabs_bound, uabs_sweep, AutomatonSpec, CsvTable,
};
use ans_core::container::quantize;
use ans_core::rans::RansStream;
use ans_core::stream::check_uabs_condition_for;
use ans_core::tans::{exhaustive_search, qabs_family, DEFAULT_SEARCH_BUDGET, TIE_TOLERANCE};
use ans_core::{precise_init, BinaryProb, QuantizedDist, StreamConfig, UabsVariant};
use clap::{ArgGroup, Args};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("coder").required(true).args(["uabs", "tans", "rans", "qabs"])))]
pub struct AnalyzeArgs {
    /// Stream uABS for `-p` over each `-l`.
    #[arg(long)]
    uabs: bool,
    /// Precise-initialization tANS for `--freqs` (or `--random`).
    #[arg(long)]
    tans: bool,
    /// Stream rANS for `--freqs` over each `-l` (a multiple of their sum).
    #[arg(long)]
    rans: bool,
    /// All binary spreads over `--states` states and their lower envelope.
    #[arg(long)]
    qabs: bool,

    /// Probability of symbol 1 as NUM/DEN; comma separated for a sweep.
    #[arg(short = 'p', value_delimiter = ',')]
    p: Vec<String>,
    /// Interval sizes; comma separated for a sweep.
    #[arg(short = 'l', value_delimiter = ',')]
    l: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    freqs: Vec<u64>,
    /// Digit base for rANS.
    #[arg(short = 'b', default_value_t = 2)]
    b: u64,
    /// uABS with floors instead of ceilings.
    #[arg(long)]
    floor: bool,

    /// Score every spread of the tANS frequencies.
    #[arg(long)]
    exhaustive: bool,
    /// Largest number of spreads `--exhaustive` may visit.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u64,

    #[arg(long, default_value_t = 16)]
    states: u32,
    /// Envelope over all spreads instead of those with more 0s than 1s.
    #[arg(long)]
    all_spreads: bool,

    /// Random distributions per alphabet size, with l = 8n and 16n.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    symbols: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Frequencies summing to `l`, requantized when they do not already.
pub fn dist_for(freqs: &[u64], l: u64) -> Result<QuantizedDist, CliError> {
    if freqs.is_empty() {
        return Err(CliError::Usage("--freqs is required".into()));
    }
    if freqs.iter().sum::<u64>() == l {
        Ok(QuantizedDist::new(freqs)?)
    } else {
        Ok(QuantizedDist::new(&quantize(freqs, l)?)?)
    }
}

fn parse_prob(text: &str) -> Result<BinaryProb, CliError> {
    let bad = || CliError::Usage(format!("-p expects NUM/DEN, got {text:?}"));
    let (n, d) = text.split_once('/').ok_or_else(bad)?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    let d: u64 = d.trim().parse().map_err(|_| bad())?;
    Ok(BinaryProb::new(n, d)?)
}

fn source_probs(freqs: &[u64]) -> Vec<f64> {
    let total: u64 = freqs.iter().sum();
    freqs.iter().map(|&f| f as f64 / total as f64).collect()
}

fn write_csv(table: &CsvTable, path: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(path) = path {
        emit_csv(table, path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn run(a: &AnalyzeArgs) -> Result<(), CliError> {
    if a.uabs {
        run_uabs(a)
    } else if a.rans {
        run_rans(a)
    } else if a.qabs {
        run_qabs(a)
    } else if a.random.is_some() {
        run_random(a)
    } else {
        run_tans(a)
    }
}

fn print_stationary(a: &AutomatonSpec<f64>) -> Result<(), CliError> {
    let r = delta_h(a)?;
    let fit = inverse_x_fit(&r.stationary);
    println!("  x      Pr(x)    c/x");
    for x in a.config().states() {
        println!("  {x:<6} {:.4}   {:.4}", r.stationary.prob(x), fit.c / x as f64);
    }
    println!("  c = {:.4}, max |Pr(x) - c/x| = {:.4}", fit.c, fit.max_deviation);
    Ok(())
}

fn run_uabs(a: &AnalyzeArgs) -> Result<(), CliError> {
    if a.p.is_empty() || a.l.is_empty() {
        return Err(CliError::Usage("--uabs needs -p and -l".into()));
    }
    let variant = if a.floor { UabsVariant::Floor } else { UabsVariant::Ceiling };
    let ps = a.p.iter().map(|t| parse_prob(t)).collect::<Result<Vec<_>, _>>()?;
    for (text, &p) in a.p.iter().zip(&ps) {
        for &l in &a.l {
            let cfg = StreamConfig::binary(l)?;
            if !check_uabs_condition_for(p, cfg, variant) {
                println!("p={text} l={l}: symbol ranges are not b-unique, no stream coder");
                continue;
            }
            let auto = uabs_automaton::<f64>(p, cfg, variant)?;
            let r = delta_h(&auto)?;
            println!(
                "p={text} l={l}: {:.6} bits/symbol, entropy {:.6}, dH {:.6}, bound {:.6}",
                r.expected_bits,
                r.entropy,
                r.delta_h,
                uabs_bound::<f64>(p, l)
            );
            if a.p.len() == 1 && a.l.len() == 1 {
                print_stationary(&auto)?;
            }
        }
    }
    write_csv(&uabs_sweep(&ps, &a.l, variant)?, &a.csv)
}

fn run_tans(a: &AnalyzeArgs) -> Result<(), CliError> {
    if a.freqs.is_empty() {
        return Err(CliError::Usage("--tans needs --freqs or --random".into()));
    }
    let probs = source_probs(&a.freqs);
    let ls = if a.l.is_empty() { vec![a.freqs.iter().sum()] } else { a.l.clone() };
    let mut table = if a.exhaustive {
        CsvTable::new(["l", "enumerated", "min_delta_h", "optima", "precise_delta_h", "bound"])
    } else {
        CsvTable::new(["l", "delta_h", "bound", "expected_bits", "entropy"])
    };
    for &l in &ls {
        let d = dist_for(&a.freqs, l)?;
        let cfg = StreamConfig::binary(l)?;
        let spread = precise_init(&d, cfg)?;
        let auto = tans_automaton(&spread, &probs)?;
        let r = delta_h(&auto)?;
        let bound = tans_bound(&probs, l);
        println!(
            "l={l} freqs {:?}: precise_init {:.6} bits/symbol, entropy {:.6}, dH {:.7}, bound {:.7}",
            d.freqs(),
            r.expected_bits,
            r.entropy,
            r.delta_h,
            bound
        );
        if a.exhaustive {
            let s = exhaustive_search(&d, cfg, &probs, a.budget)?;
            let optimal = r.delta_h <= s.min_delta_h + TIE_TOLERANCE;
            println!(
                "  exhaustive: {} spreads, min dH {:.7}, {} optima, precise_init optimal: {optimal}",
                s.enumerated,
                s.min_delta_h,
                s.optimum_count()
            );
            println!("  first optimum: {}", symbols_line(s.best.assignment()));
            table.push(vec![
                l as f64,
                s.enumerated as f64,
                s.min_delta_h,
                s.optimum_count() as f64,
                r.delta_h,
                bound,
            ]);
        } else {
            if ls.len() == 1 {
                println!("  spread: {}", symbols_line(spread.assignment()));
                if l <= 64 {
                    print_stationary(&auto)?;
                }
            }
            table.push(vec![l as f64, r.delta_h, bound, r.expected_bits, r.entropy]);
        }
    }
    write_csv(&table, &a.csv)
}

fn symbols_line(assignment: &[u32]) -> String {
    assignment.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn run_rans(a: &AnalyzeArgs) -> Result<(), CliError> {
    let m: u64 = a.freqs.iter().sum();
    let d = dist_for(&a.freqs, m)?;
    let probs = d.probs();
    let ls = if a.l.is_empty() { vec![m] } else { a.l.clone() };
    let mut table = CsvTable::new(["l", "delta_h", "bound", "expected_bits", "entropy"]);
    for &l in &ls {
        let coder = RansStream::new(d.clone(), StreamConfig::new(l, a.b)?)?;
        let r = delta_h(&AutomatonSpec::from_coder(&coder, &probs)?)?;
        let bound = rans_bound(&probs, m, l);
        println!(
            "m={m} l={l} b={}: {:.6} bits/symbol, entropy {:.6}, dH {:.7}, bound {:.7}",
            a.b, r.expected_bits, r.entropy, r.delta_h, bound
        );
        table.push(vec![l as f64, r.delta_h, bound, r.expected_bits, r.entropy]);
    }
    write_csv(&table, &a.csv)
}

fn run_qabs(a: &AnalyzeArgs) -> Result<(), CliError> {
    let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    let family = qabs_family(a.states, &grid)?;
    let candidates: Vec<usize> = if a.all_spreads {
        (0..family.len()).collect()
    } else {
        family.majority_zero()
    };
    let envelope = family.envelope_of(&candidates, TIE_TOLERANCE);
    println!(
        "{} states: {} spreads scored, {} candidates, {} on the lower envelope",
        a.states,
        family.len(),
        candidates.len(),
        envelope.len()
    );
    let lows = family.lower_envelope_values();
    for &i in &envelope {
        let curve = &family.curves[i];
        let best = (0..grid.len())
            .filter(|&g| curve[g] <= lows[g] + TIE_TOLERANCE)
            .map(|g| grid[g])
            .collect::<Vec<_>>();
        let range = match (best.first(), best.last()) {
            (Some(lo), Some(hi)) => format!("p in [{lo:.2}, {hi:.2}]"),
            _ => "below the majority-0 envelope only".into(),
        };
        println!("  {}  zeros {:>2}  {range}", symbols_line(&family.assignment(i)), family.zeros(i));
    }
    write_csv(&qabs_table(&family, Some(&envelope)), &a.csv)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn run_random(a: &AnalyzeArgs) -> Result<(), CliError> {
    let count = a.random.unwrap_or(0);
    if count == 0 {
        return Err(CliError::Usage("--random needs a positive count".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut all = CsvTable::new(["n", "dist_id", "l", "delta_h", "bound", "expected_bits", "entropy"]);
    for &n in &a.symbols {
        let mut medians = Vec::new();
        for k in [8u64, 16] {
            let dists = (0..count)
                .map(|_| random_freqs(n, k * n as u64, |n| rng.gen_range(0..n)))
                .collect::<Result<Vec<_>, _>>()?;
            let t = random_dist_sweep(&dists)?;
            let dh = t.column("delta_h").expect("sweep has delta_h");
            let m = median(t.rows().iter().map(|r| r[dh]).collect());
            let h = median(dists.iter().map(|d| shannon_entropy(&d.probs())).collect());
            println!("n={n} l={}: median dH {m:.3e} (median entropy {h:.3})", k * n as u64);
            medians.push(m);
            for r in t.rows() {
                all.push(r.clone());
            }
        }
        println!("n={n}: median dH ratio l=16n / l=8n = {:.3}", medians[1] / medians[0]);
    }
    write_csv(&all, &a.csv)
}

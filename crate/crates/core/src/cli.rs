//! The `distsec` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid input, 4 cap exceeded,
//! 5 I/O failure, 6 witness not applicable.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::json;

use crate::alphabet::SourceAlphabet;
use crate::analysis::{bound_report, DistortionReport};
use crate::code::KeyedCode;
use crate::config::{parse_u64_list, AlphabetSpec, SystemSpec};
use crate::encoders::{build_code, greedy_code, Algorithm};
use crate::error::Error;
use crate::multisource::{check_sufficiency, joint_distortion, necessity_witness, DEFAULT_MAX_STATES};
use crate::scalar::{format_g17, Scalar, FLOAT_REL_TOL};
use crate::search::{brute_force_optimal, verify_structure, SearchOptions};
use crate::simulation::{simulate_with_cap, SimConfig, SimTarget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_CAP_EXCEEDED: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_NOT_APPLICABLE: i32 = 6;

/// Environment variable overriding the joint-state cap.
pub const CAP_ENV: &str = "DISTSEC_CAP_STATES";

/// Column order of `sweep` output.
pub const SWEEP_COLUMNS: [&str; 13] = [
    "alphabet_id",
    "m",
    "k",
    "alg",
    "seed",
    "d_max",
    "d_ach",
    "delta",
    "bound1",
    "bound2",
    "bound1_ok",
    "bound2_ok",
    "perfectly_secure",
];

#[derive(Parser, Debug)]
#[command(name = "distsec", version, about = "Keyed codes against a mean-square-error eavesdropper")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Force rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    /// Output file; stdout if omitted.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a keyed code and write it as JSON.
    Encode(EncodeArgs),
    /// Distortions and bound checks of one code, as CSV.
    Analyze(AnalyzeArgs),
    /// Exhaustive search for the optimal code, as JSON.
    Search(SearchArgs),
    /// Joint analysis of a multi-source system, as CSV.
    Compose(ComposeArgs),
    /// Monte Carlo estimate of the eavesdropper's distortion, as CSV.
    Simulate(SimulateArgs),
    /// Distortions over key sizes and algorithms, as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Default)]
struct AlphabetArgs {
    /// Comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Comma-separated probabilities, same order as the values.
    #[arg(long, allow_hyphen_values = true)]
    pmf: Option<String>,
    /// Uniform integers lo..hi, both included.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "values")]
    range: Option<String>,
    /// Alphabet JSON file; inline flags take precedence.
    #[arg(long)]
    alphabet: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// greedy, exchange or identity.
    #[arg(long, default_value = "greedy")]
    alg: Algorithm,
    /// Key bits.
    #[arg(long, default_value_t = 1)]
    k: u32,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Code JSON file.
    #[arg(long)]
    code: PathBuf,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    alphabet: AlphabetArgs,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Smallest bin count (default m).
    #[arg(long)]
    r_min: Option<usize>,
    /// Bin count upper end, exclusive (default 2m).
    #[arg(long)]
    r_max: Option<usize>,
    /// Disable the small-bin pruning rule.
    #[arg(long)]
    no_prune: bool,
    /// Lift the m <= 8, k <= 2 limits. The search is factorial.
    #[arg(long)]
    allow_factorial: bool,
    /// Stop after this many complete codes.
    #[arg(long)]
    max_candidates: Option<u64>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// System JSON file.
    #[arg(long)]
    system: PathBuf,
    /// Build a necessity witness for this unsecured source (0-based).
    #[arg(long)]
    witness: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Code JSON file (single source).
    #[arg(long, conflicts_with = "system")]
    code: Option<PathBuf>,
    /// System JSON file (several sources).
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// One row per seed, e.g. `1..20` or `3,5`; defaults to --seed.
    #[arg(long)]
    seeds: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Key sizes, e.g. `0..5` (inclusive) or `1,3`.
    #[arg(long, default_value = "0..4")]
    k: String,
    /// Comma-separated algorithms.
    #[arg(long, default_value = "greedy")]
    alg: String,
    /// Seeds for randomized algorithms; defaults to --seed.
    #[arg(long)]
    seeds: Option<String>,
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: exit_code(&e), message: e.to_string() }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP_EXCEEDED,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::NotApplicable(_) => EXIT_NOT_APPLICABLE,
        _ => EXIT_INVALID_INPUT,
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit status. Diagnostics go to stderr.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("distsec: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let text = match &cli.command {
        Command::Encode(a) => encode(cli, a)?,
        Command::Analyze(a) => analyze(cli, a)?,
        Command::Search(a) => search(cli, a)?,
        Command::Compose(a) => compose(cli, a)?,
        Command::Simulate(a) => simulate(cli, a)?,
        Command::Sweep(a) => sweep(cli, a)?,
    };
    emit(cli.output.as_deref(), &text)
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(e).into()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(e).into()),
    }
}

impl AlphabetArgs {
    fn resolve(&self) -> std::result::Result<AlphabetSpec, Failure> {
        let mut spec = match &self.alphabet {
            Some(path) => Some(AlphabetSpec::from_file(path)?),
            None => None,
        };
        let inline = match (&self.values, &self.range) {
            (Some(v), _) => Some(AlphabetSpec::new(AlphabetSpec::parse_list(v)?, None)),
            (None, Some(r)) => Some(AlphabetSpec::range(r)?),
            (None, None) => None,
        };
        if let Some(inline) = inline {
            spec = Some(inline);
        }
        let mut spec = spec.ok_or_else(|| Failure::usage("no alphabet: use --values, --range or --alphabet"))?;
        if let Some(p) = &self.pmf {
            spec = AlphabetSpec { label: spec.label.clone(), ..AlphabetSpec::new(spec.values, Some(AlphabetSpec::parse_list(p)?)) };
        }
        Ok(spec)
    }

    fn given(&self) -> bool {
        self.values.is_some() || self.range.is_some() || self.alphabet.is_some()
    }
}

fn read_code(path: &Path) -> std::result::Result<KeyedCode, Failure> {
    Ok(KeyedCode::from_json(&fs::read_to_string(path).map_err(Error::Io)?)?)
}

fn state_cap() -> std::result::Result<u128, Failure> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{CAP_ENV} must be a non-negative integer, got {v:?}")).into()),
        Err(_) => Ok(DEFAULT_MAX_STATES),
    }
}

fn num<T: Scalar>(x: &T) -> String {
    format_g17(x.to_f64_lossy())
}

fn flag(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> std::result::Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(Error::Csv)?;
    for row in rows {
        w.write_record(row).map_err(Error::Csv)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn encode(cli: &Cli, a: &EncodeArgs) -> std::result::Result<String, Failure> {
    let spec = a.alphabet.resolve()?;
    let code = if cli.exact || spec.is_rational() {
        build_code(a.alg, &spec.build::<BigRational>()?, a.k, cli.seed)?
    } else {
        build_code(a.alg, &spec.build::<f64>()?, a.k, cli.seed)?
    };
    Ok(code.to_json() + "\n")
}

const ANALYZE_COLUMNS: [&str; 12] = [
    "m",
    "k",
    "r",
    "d_max",
    "d_ach",
    "delta",
    "spread",
    "bound1",
    "bound2",
    "bound1_ok",
    "bound2_ok",
    "perfectly_secure",
];

fn report_row<T: Scalar>(r: &DistortionReport<T>) -> Vec<String> {
    vec![
        r.m.to_string(),
        r.k.to_string(),
        r.r.to_string(),
        num(&r.d_max),
        num(&r.d_ach),
        num(&r.delta),
        num(&r.spread),
        num(&r.bound1),
        num(&r.bound2),
        flag(r.bound1_ok),
        flag(r.bound2_ok),
        r.perfectly_secure.to_string(),
    ]
}

fn analyze(cli: &Cli, a: &AnalyzeArgs) -> std::result::Result<String, Failure> {
    let spec = a.alphabet.resolve()?;
    let code = read_code(&a.code)?;
    let row = if cli.exact || spec.is_rational() {
        report_row(&bound_report(&code, &spec.build::<BigRational>()?, FLOAT_REL_TOL)?)
    } else {
        report_row(&bound_report(&code, &spec.build::<f64>()?, FLOAT_REL_TOL)?)
    };
    csv_text(&ANALYZE_COLUMNS, &[row])
}

fn search_json<T: Scalar>(alphabet: &SourceAlphabet<T>, k: u32, opts: &SearchOptions) -> std::result::Result<String, Failure> {
    let result = brute_force_optimal(alphabet, k, opts)?;
    let structure = verify_structure(&result.best_code);
    let greedy = greedy_code(alphabet, k)?;
    let greedy_delta = crate::analysis::delta_closed_form(&greedy, alphabet)?;
    let gap = greedy_delta.clone() - result.best_delta.clone();
    let mut doc = json!({
        "best_code": serde_json::to_value(&result.best_code).map_err(Error::Json)?,
        "best_delta": result.best_delta.to_f64_lossy(),
        "greedy_delta": greedy_delta.to_f64_lossy(),
        "greedy_gap": gap.to_f64_lossy(),
        "candidates_examined": result.candidates_examined,
        "pruned": result.pruned,
        "exhaustive": result.exhaustive,
        "structure": {
            "value_degree": structure.value_degree,
            "bin_degree": structure.bin_degree,
            "at_most_one_small_bin": structure.at_most_one_small_bin,
            "bin_count_in_range": structure.bin_count_in_range,
        },
    });
    if T::EXACT {
        doc["best_delta_exact"] = json!(result.best_delta.render());
        doc["greedy_delta_exact"] = json!(greedy_delta.render());
    }
    Ok(serde_json::to_string_pretty(&doc).map_err(Error::Json)? + "\n")
}

fn search(cli: &Cli, a: &SearchArgs) -> std::result::Result<String, Failure> {
    let spec = a.alphabet.resolve()?;
    let opts = SearchOptions {
        r_min: a.r_min,
        r_max: a.r_max,
        prune: !a.no_prune,
        allow_factorial: a.allow_factorial,
        max_candidates: a.max_candidates,
        ..SearchOptions::default()
    };
    if cli.exact || spec.is_rational() {
        search_json(&spec.build::<BigRational>()?, a.k, &opts)
    } else {
        search_json(&spec.build::<f64>()?, a.k, &opts)
    }
}

fn compose_with<T: Scalar>(spec: &SystemSpec, cli: &Cli, a: &ComposeArgs) -> std::result::Result<String, Failure> {
    let system = spec.build::<T>(cli.seed)?;
    let cap = state_cap()?;
    if let Some(source) = a.witness {
        let w = necessity_witness(&system, source, cap, FLOAT_REL_TOL)?;
        let observation = w.observation.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let form = match w.form {
            crate::multisource::FunctionForm::Sum => "sum",
            crate::multisource::FunctionForm::Product => "product",
            crate::multisource::FunctionForm::SumOfProducts => "sum_of_products",
        };
        return csv_text(
            &["form", "source", "observation", "conditional_mean", "mean", "joint_delta"],
            &[vec![
                form.to_string(),
                source.to_string(),
                observation,
                num(&w.conditional_mean),
                num(&w.mean),
                num(&w.joint_delta),
            ]],
        );
    }
    let report = joint_distortion(&system, cap, FLOAT_REL_TOL)?;
    let check = check_sufficiency(&system, cap, FLOAT_REL_TOL)?;
    csv_text(
        &["sources", "total_key_bits", "states", "d_max", "d_ach", "delta", "perfectly_secure", "components_secure"],
        &[vec![
            system.len().to_string(),
            system.total_key_bits().to_string(),
            system.state_count().to_string(),
            num(&report.d_max),
            num(&report.d_ach),
            num(&report.delta),
            report.perfectly_secure.to_string(),
            check.all_components_secure.to_string(),
        ]],
    )
}

fn compose(cli: &Cli, a: &ComposeArgs) -> std::result::Result<String, Failure> {
    let spec = SystemSpec::from_file(&a.system)?;
    if cli.exact || spec.is_rational() {
        compose_with::<BigRational>(&spec, cli, a)
    } else {
        compose_with::<f64>(&spec, cli, a)
    }
}

fn seeds(list: &Option<String>, default: u64) -> std::result::Result<Vec<u64>, Failure> {
    match list {
        Some(s) => Ok(parse_u64_list(s)?),
        None => Ok(vec![default]),
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> std::result::Result<String, Failure> {
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let cap = state_cap()?;
    let seeds = seeds(&a.seeds, cli.seed)?;
    let mut rows = Vec::new();
    match (&a.code, &a.system) {
        (Some(code), None) => {
            let code = read_code(code)?;
            let alphabet = a.alphabet.resolve()?.build::<f64>()?;
            let target = SimTarget::Single { code: &code, alphabet: &alphabet };
            for &seed in &seeds {
                rows.push(sim_row(&target, a.trials, seed, cap)?);
            }
        }
        (None, Some(system)) => {
            if a.alphabet.given() {
                return Err(Failure::usage("alphabet flags do not apply with --system"));
            }
            let system = SystemSpec::from_file(system)?.build::<f64>(cli.seed)?;
            let target = SimTarget::Joint(&system);
            for &seed in &seeds {
                rows.push(sim_row(&target, a.trials, seed, cap)?);
            }
        }
        _ => return Err(Failure::usage("give either --code with an alphabet, or --system")),
    }
    csv_text(&["trials", "seed", "analytic_dach", "empirical_dach", "stderr"], &rows)
}

fn sim_row(target: &SimTarget, trials: u64, seed: u64, cap: u128) -> std::result::Result<Vec<String>, Failure> {
    let r = simulate_with_cap(target, &SimConfig { trials, seed }, cap)?;
    Ok(vec![
        r.trials.to_string(),
        r.seed.to_string(),
        format_g17(r.analytic_dach),
        format_g17(r.empirical_dach),
        format_g17(r.stderr),
    ])
}

fn sweep_rows<T: Scalar>(
    alphabet: &SourceAlphabet<T>,
    label: &str,
    ks: &[u64],
    algs: &[Algorithm],
    seeds: &[u64],
) -> std::result::Result<Vec<Vec<String>>, Failure> {
    let mut rows = Vec::new();
    for &alg in algs {
        for &k in ks {
            let k = u32::try_from(k).map_err(|_| Error::Config(format!("key size {k} too large")))?;
            let runs: Vec<Option<u64>> = if alg.is_randomized() { seeds.iter().copied().map(Some).collect() } else { vec![None] };
            for seed in runs {
                let code = build_code(alg, alphabet, k, seed.unwrap_or(0))?;
                let r = bound_report(&code, alphabet, FLOAT_REL_TOL)?;
                rows.push(vec![
                    label.to_string(),
                    r.m.to_string(),
                    r.k.to_string(),
                    alg.name().to_string(),
                    seed.map(|s| s.to_string()).unwrap_or_default(),
                    num(&r.d_max),
                    num(&r.d_ach),
                    num(&r.delta),
                    num(&r.bound1),
                    num(&r.bound2),
                    flag(r.bound1_ok),
                    flag(r.bound2_ok),
                    r.perfectly_secure.to_string(),
                ]);
            }
        }
    }
    Ok(rows)
}

fn sweep(cli: &Cli, a: &SweepArgs) -> std::result::Result<String, Failure> {
    let spec = a.alphabet.resolve()?;
    let ks = parse_u64_list(&a.k)?;
    let algs: Vec<Algorithm> = a.alg.split(',').map(str::parse).collect::<crate::Result<_>>()?;
    if algs.is_empty() {
        return Err(Failure::usage("at least one algorithm is required"));
    }
    let seeds = seeds(&a.seeds, cli.seed)?;
    let rows = if cli.exact || spec.is_rational() {
        sweep_rows(&spec.build::<BigRational>()?, &spec.label, &ks, &algs, &seeds)?
    } else {
        sweep_rows(&spec.build::<f64>()?, &spec.label, &ks, &algs, &seeds)?
    };
    csv_text(&SWEEP_COLUMNS, &rows)
}

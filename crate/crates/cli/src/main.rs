use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use casesim::chainladder::{chain_ladder, default_bands, deviation_report};
use casesim::claims::DefaultPaymentModel;
use casesim::csv_io;
use casesim::dataset::Dataset;
use casesim::diagnostics::{major_factor_pairs, pearson, recognition_profile};
use casesim::inflation::InflationModel;
use casesim::simulate::{simulate_from_claims, simulate_with_threads, with_threads, View};
use casesim::triangle::{actual_outstanding, aggregate, TriangleKind, TriangleShape};
use casesim::{Error, Preset, SimulationConfig};

const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_CSV: u8 = 5;
const EXIT_DEGENERATE: u8 = 6;

#[derive(Parser)]
#[command(name = "casesim", version, about = "Simulate individual claims with case-estimate revisions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a portfolio and write transactions, claims and a run manifest.
    Simulate(SimulateArgs),
    /// Aggregate transactions into an incurred or cumulative paid triangle.
    Triangles(TrianglesArgs),
    /// Chain-ladder reserves compared against simulated future payments.
    Chainladder(ChainladderArgs),
    /// Recognition profile and major revision factor pairs.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Write constant-dollar transactions instead of inflated ones.
    #[arg(long)]
    no_inflation: bool,
    /// `default_heterogeneous` or `homogeneous`; overrides the config file.
    #[arg(long)]
    preset: Option<Preset>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Develop the paid histories of an existing transaction file instead of
    /// simulating new ones.
    #[arg(long)]
    payments: Option<PathBuf>,
    /// Claim file accompanying `--payments`.
    #[arg(long, requires = "payments")]
    claims: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    transactions: PathBuf,
    /// Claim file; defaults to `claims.csv` next to the transactions.
    #[arg(long)]
    claims: Option<PathBuf>,
    /// Number of occurrence periods; defaults to the latest in the claim file.
    #[arg(long)]
    periods: Option<u32>,
}

#[derive(Args)]
struct TrianglesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Triangle period as a multiple of the simulation period (4 = yearly
    /// for quarterly simulations).
    #[arg(long, default_value_t = 1)]
    period_multiple: u32,
    /// `incurred` or `paid`.
    #[arg(long, default_value = "incurred")]
    kind: TriangleKind,
    /// Write the full rectangle instead of blanking unobserved cells.
    #[arg(long)]
    unmasked: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ChainladderArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Development period at which recognition is measured.
    #[arg(long, default_value_t = 10)]
    dev_period: usize,
    /// Output directory for `recognition_profile.csv` and `factor_pairs.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    rows: usize,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    config_sha256: String,
    master_seed: u64,
    preset: Preset,
    view: &'static str,
    claims: usize,
    transactions: usize,
    files: Vec<FileEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    manifest_sha256: Option<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_context<T>(r: casesim::Result<T>, path: &Path) -> Result<T> {
    r.with_context(|| format!("reading {}", path.display()))
}

fn load_config(args: &SimulateArgs) -> Result<SimulationConfig> {
    let mut config = match &args.config {
        Some(path) => read_context(SimulationConfig::load(path), path)?,
        None => SimulationConfig::default().finalize()?,
    };
    if let Some(preset) = args.preset {
        config = config.with_preset(preset)?;
    }
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    Ok(config)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let config = load_config(&args)?;
    let threads = args.threads.unwrap_or(0);
    let inflation = InflationModel::from_config(&config);
    let output = match &args.payments {
        Some(path) => {
            let rows = read_context(csv_io::read_transactions(open(path)?), path)?;
            let claims = match &args.claims {
                Some(p) => Some(read_context(csv_io::read_claims(open(p)?), p)?),
                None => None,
            };
            let histories = csv_io::payment_histories(&rows, claims.as_deref(), config.payments.min_delay)?;
            with_threads(threads, || simulate_from_claims(histories, &config, &inflation))?
        }
        None => {
            let model = DefaultPaymentModel::new(&config);
            simulate_with_threads(&config, &model, &inflation, threads)?
        }
    };

    let view = if args.no_inflation {
        View::ConstantDollar
    } else {
        View::Inflated
    };
    let data = output.dataset(view);

    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut txn_bytes = Vec::new();
    csv_io::write_transactions(&mut txn_bytes, &data.transactions)?;
    let mut claim_bytes = Vec::new();
    csv_io::write_claims(&mut claim_bytes, &data.claims)?;

    let files = [
        ("transactions.csv", &txn_bytes, data.transactions.len()),
        ("claims.csv", &claim_bytes, data.claims.len()),
    ];
    let mut entries = Vec::new();
    for (name, bytes, rows) in files {
        let path = args.out.join(name);
        let mut w = create(&path)?;
        w.write_all(bytes)?;
        w.flush()?;
        entries.push(FileEntry {
            name: name.into(),
            rows,
            sha256: sha256_hex(bytes),
        });
    }

    let mut manifest = RunManifest {
        tool: "casesim",
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: sha256_hex(config.to_toml_string().as_bytes()),
        master_seed: config.master_seed,
        preset: config.preset,
        view: match view {
            View::ConstantDollar => "constant_dollar",
            View::Inflated => "inflated",
        },
        claims: data.claims.len(),
        transactions: data.transactions.len(),
        files: entries,
        manifest_sha256: None,
    };
    manifest.manifest_sha256 = Some(sha256_hex(&serde_json::to_vec(&manifest)?));
    let path = args.out.join("manifest.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!(
        "simulated {} claims, {} transactions -> {}",
        manifest.claims,
        manifest.transactions,
        args.out.display()
    );
    Ok(())
}

fn load_dataset(input: &InputArgs) -> Result<(Dataset, u32)> {
    let claims_path = match &input.claims {
        Some(p) => p.clone(),
        None => input
            .transactions
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("claims.csv"),
    };
    let transactions = read_context(csv_io::read_transactions(open(&input.transactions)?), &input.transactions)?;
    let claims = read_context(csv_io::read_claims(open(&claims_path)?), &claims_path)?;
    let data = Dataset { claims, transactions };
    let periods = input.periods.unwrap_or_else(|| data.n_occurrence_periods());
    if periods == 0 {
        return Err(Error::Degenerate("no claims to aggregate".into()).into());
    }
    Ok((data, periods))
}

fn cmd_triangles(args: TrianglesArgs) -> Result<()> {
    let (data, periods) = load_dataset(&args.input)?;
    let shape = TriangleShape::square(periods, args.period_multiple);
    let triangle = aggregate(&data, args.kind, shape)?;
    let triangle = if args.unmasked { triangle } else { triangle.masked() };
    let mut w = create(&args.out)?;
    csv_io::write_triangle(&mut w, &triangle)?;
    w.flush()?;
    Ok(())
}

fn cmd_chainladder(args: ChainladderArgs) -> Result<()> {
    let (data, periods) = load_dataset(&args.input)?;
    let shape = TriangleShape::square(periods, 1);
    let incurred = aggregate(&data, TriangleKind::Incurred, shape)?.masked();
    let paid = aggregate(&data, TriangleKind::CumulativePaid, shape)?.masked();
    let result = chain_ladder(&incurred, &paid)?;
    let target = actual_outstanding(&data, periods as f64, periods)?;
    let report = deviation_report(&result.reserves, &target, &default_bands(periods))?;
    let mut w = create(&args.out)?;
    csv_io::write_deviation_report(&mut w, &report)?;
    w.flush()?;
    if let Some(total) = report.last() {
        println!("total deviation: {:.1}%", total.deviation_pct);
    }
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<()> {
    let (data, periods) = load_dataset(&args.input)?;
    let incurred = aggregate(&data, TriangleKind::Incurred, TriangleShape::square(periods, 1))?;
    let profile = recognition_profile(&incurred, args.dev_period)?;
    let pairs = major_factor_pairs(&data)?;

    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut w = create(&args.out.join("recognition_profile.csv"))?;
    csv_io::write_profile(&mut w, &profile)?;
    w.flush()?;
    let mut w = create(&args.out.join("factor_pairs.csv"))?;
    csv_io::write_factor_pairs(&mut w, &pairs)?;
    w.flush()?;

    let g2: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let g3: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    match pearson(&g2, &g3) {
        Ok(r) => println!("major factor pairs: {}, correlation {r:.3}", pairs.len()),
        Err(_) => println!("major factor pairs: {}, correlation undefined", pairs.len()),
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::ConfigParse(_) | Error::InvalidConfig { .. } | Error::InvalidParameter(_) => EXIT_CONFIG,
                Error::Io(_) => EXIT_IO,
                Error::Csv { .. } => EXIT_CSV,
                Error::Degenerate(_) | Error::Timeline { .. } | Error::NegativeTime(_) => EXIT_DEGENERATE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Triangles(a) => cmd_triangles(a),
        Command::Chainladder(a) => cmd_chainladder(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

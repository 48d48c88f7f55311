use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use narrowtoa::attack::{apply_attack_logged, AttackSpec};
use narrowtoa::btcs::{bits_from_text, bits_to_text, CsSyncConfig, CsSyncPacket, Payload, PhyMode};
use narrowtoa::harness::{
    emit_plots, preset, run_experiment, write_results, ExperimentConfig, PRESET_NAMES,
};
use narrowtoa::receiver::process_packet;
use narrowtoa::sigproc::io::{read_signal, write_signal};
use narrowtoa::theory::run_suite;
use narrowtoa::{derive_seed, Error};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "narrowtoa",
    version,
    about = "Distance-reduction attacks on narrowband ToA ranging"
)]
struct Cli {
    /// Default root for output directories.
    #[arg(long, env = "NARROWTOA_OUT", default_value = "results", global = true)]
    out_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate CS SYNC packets as signal files.
    Generate(GenerateArgs),
    /// Apply an attack config to a signal file.
    Attack(AttackArgs),
    /// Estimate ToA and detection metrics for a received signal.
    Receive(ReceiveArgs),
    /// Run an experiment from a config file or a named preset.
    Experiment(ExperimentArgs),
    /// Run the numerical theory checks.
    VerifyTheory(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PayloadKind {
    None,
    Random,
    Sounding,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "LE1M")]
    phy: PhyMode,
    #[arg(long, value_enum, default_value = "random")]
    payload: PayloadKind,
    /// Payload length; defaults to 128 (random) or 96 (sounding).
    #[arg(long)]
    n_bits: Option<usize>,
    #[arg(long, default_value_t = narrowtoa::btcs::DEFAULT_MARKERS)]
    markers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory (default: <out-root>/packets).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Input signal (.bin with .json sidecar).
    input: PathBuf,
    /// Attack config (.json or .toml).
    #[arg(long)]
    config: PathBuf,
    /// Output signal path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReceiveArgs {
    input: PathBuf,
    /// Clean template signal.
    #[arg(long)]
    template: PathBuf,
    /// Expected bits as a 0/1 text file; enables the bit check.
    #[arg(long)]
    bits: Option<PathBuf>,
    #[arg(long, default_value = "LE1M")]
    phy: PhyMode,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Override the packet count.
    #[arg(long)]
    packets: Option<usize>,
    /// Results directory (default: <out-root>/<id>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate the config's [check] section and exit 3 on failure.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
    Check(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::InvalidFilter(_)
            | Error::Serde(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e).into())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Runtime(e.to_string()))
}

fn generate(args: &GenerateArgs, root: &Path) -> Result<(), Failure> {
    let payload = match args.payload {
        PayloadKind::None => Payload::None,
        PayloadKind::Random => Payload::Random {
            n_bits: args.n_bits.unwrap_or(narrowtoa::btcs::MAX_RANDOM_BITS),
        },
        PayloadKind::Sounding => Payload::Sounding {
            n_bits: args
                .n_bits
                .unwrap_or(narrowtoa::btcs::DEFAULT_SOUNDING_BITS),
            n_markers: args.markers,
        },
    };
    let dir = args.out.clone().unwrap_or_else(|| root.join("packets"));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for i in 0..args.count {
        let cfg = CsSyncConfig::new(args.phy, payload, derive_seed(args.seed, 10, i as u64));
        let packet = CsSyncPacket::generate(&cfg)?;
        let stem = format!("packet_{i:04}");
        let bin = dir.join(format!("{stem}.bin"));
        write_signal(&bin, &packet.waveform)?;
        write_text(
            &dir.join(format!("{stem}.packet.json")),
            &to_json(&packet.descriptor())?,
        )?;
        write_text(
            &dir.join(format!("{stem}.bits.txt")),
            &bits_to_text(&packet.bits),
        )?;
        println!("{}", bin.display());
    }
    Ok(())
}

fn attack(args: &AttackArgs) -> Result<(), Failure> {
    let spec = AttackSpec::load(&args.config)?;
    let input = read_signal(&args.input)?;
    let (out, record) = apply_attack_logged(&input, &spec)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_signal(&args.out, &out)?;
    println!("{}", to_json(&record)?);
    Ok(())
}

fn receive(args: &ReceiveArgs) -> Result<(), Failure> {
    let received = read_signal(&args.input)?;
    let template = read_signal(&args.template)?;
    let bits = match &args.bits {
        Some(p) => bits_from_text(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)?,
        None => Vec::new(),
    };
    let rx = process_packet(&received, &template, &bits, args.phy)?;
    let report = serde_json::json!({
        "toa": rx.toa,
        "metrics": rx.nadm,
        "bits_checked": args.bits.is_some(),
    });
    let text = to_json(&report)?;
    match &args.out {
        Some(p) => write_text(p, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn experiment(args: &ExperimentArgs, root: &Path) -> Result<(), Failure> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => {
            preset(name).ok_or_else(|| Failure::Config(format!("unknown preset {name}")))?
        }
        (None, None) => {
            return Err(Failure::Config(
                "either --config or --preset is required".into(),
            ))
        }
    };
    if let Some(n) = args.packets {
        cfg.n_packets = n;
    }
    cfg.validate()?;
    let dir = args.out.clone().unwrap_or_else(|| root.join(&cfg.id));
    let result = run_experiment(&cfg)?;
    write_results(&result, &dir)?;
    emit_plots(&result, &dir)?;
    println!("{}", to_json(&result.summary)?);
    eprintln!("results written to {}", dir.display());
    if args.check {
        let failures = match &cfg.check {
            Some(spec) => result.summary.check(spec),
            None => {
                return Err(Failure::Config(format!(
                    "experiment {} has no [check] section",
                    cfg.id
                )))
            }
        };
        if !failures.is_empty() {
            return Err(Failure::Check(failures));
        }
        eprintln!("check passed");
    }
    Ok(())
}

fn verify_theory(args: &VerifyArgs) -> Result<(), Failure> {
    let report = run_suite(args.seed)?;
    print!("{}", report.table());
    if let Some(p) = &args.out {
        write_text(p, &to_json(&report)?)?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check(vec![
            "theory suite has failing checks".into()
        ]))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a, &cli.out_root),
        Command::Attack(a) => attack(a),
        Command::Receive(a) => receive(a),
        Command::Experiment(a) => experiment(a, &cli.out_root),
        Command::VerifyTheory(a) => verify_theory(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Check(failures)) => {
            for f in failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(EXIT_CHECK)
        }
    }
}

//! `mgt` — spectral experiments for a third-order-in-time evolution
//! equation with fractional damping.
//!
//! See `mgt <subcommand> --help` for flags.  Every flag can also be given
//! in a `key=value` config file passed with `--config`; explicit flags win.
//! `MGT_THREADS` caps internal parallelism (absent or 0 means automatic).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgt_cli::config::{parse_f64_list, resolve, FileConfig};
use mgt_cli::experiments::{
    self, EvolveMethod, EvolveParams, InitialData, SpectrumKind,
};
use mgt_cli::CliError;
use mgt_core::nonlinear::NonlinearitySpec;
use mgt_core::solver::Scheme;

#[derive(Parser)]
#[command(
    name = "mgt",
    version,
    about = "Spectral experiments for a third-order-in-time evolution equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum of the negated system next to a dense
    /// eigenvalue oracle, one CSV row per (mode, branch)
    Spectrum(SpectrumArgs),
    /// Damping-regime classification with spectral evidence, as JSON
    Regime(CommonArgs),
    /// Scan `|lambda| ||(lambda - B)^-1||` over rays, as CSV
    #[command(name = "resolvent-scan")]
    ResolventScan(ResolventScanArgs),
    /// Per-mode predicted vs measured growth rates, as CSV
    #[command(name = "illposed-demo")]
    IllposedDemo(IllposedDemoArgs),
    /// Smoothing-estimate sweep over a time grid, as CSV
    Smoothing(SmoothingArgs),
    /// Integrate the evolution equation and emit the trajectory CSV
    Evolve(EvolveArgs),
    /// Dissipativity witness value at the boundary damping, as JSON
    Dissipativity(DissipativityArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Damping strength
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Number of retained modes
    #[arg(long = "n-modes")]
    n_modes: Option<usize>,
    /// Domain length of the built-in Dirichlet basis
    #[arg(long, allow_negative_numbers = true)]
    length: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for randomized pieces; fixed seed means byte-identical output
    #[arg(long)]
    seed: Option<u64>,
    /// key=value config file; explicit flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which system: natural|reduced
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Args)]
struct ResolventScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ray angles (radians), comma separated
    #[arg(long, allow_hyphen_values = true)]
    angles: Option<String>,
    /// Sample moduli, comma separated
    #[arg(long, allow_hyphen_values = true)]
    radii: Option<String>,
}

#[derive(Args)]
struct IllposedDemoArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Measurement window start
    #[arg(long = "window-t0", allow_negative_numbers = true)]
    window_t0: Option<f64>,
    /// Measurement window end
    #[arg(long = "window-t1", allow_negative_numbers = true)]
    window_t1: Option<f64>,
}

#[derive(Args)]
struct SmoothingArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fractional order of the smoothing weight
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Time grid, comma separated
    #[arg(long, allow_hyphen_values = true)]
    times: Option<String>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// zero|cubic|power-sign
    #[arg(long)]
    nonlinearity: Option<String>,
    /// Nonlinearity strength
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Growth exponent (power-sign only)
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Time step
    #[arg(long)]
    dt: Option<f64>,
    /// Final time
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// etd1|etd2
    #[arg(long)]
    scheme: Option<String>,
    /// State-space norm that terminates the run as a blow-up
    #[arg(long = "blowup-threshold")]
    blowup_threshold: Option<f64>,
    /// Record every k-th step
    #[arg(long = "record-every")]
    record_every: Option<usize>,
    /// etd|reduction
    #[arg(long)]
    method: Option<String>,
    /// mode1|random
    #[arg(long)]
    initial: Option<String>,
    /// Initial-data amplitude
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
}

#[derive(Args)]
struct DissipativityArgs {
    /// Eigenvalue of A at the probed mode
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Real part of the u-coefficient
    #[arg(long = "u-re", allow_negative_numbers = true)]
    u_re: Option<f64>,
    /// Imaginary part of the u-coefficient
    #[arg(long = "u-im", allow_negative_numbers = true)]
    u_im: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Accepted for interface uniformity
    #[arg(long)]
    seed: Option<u64>,
    /// key=value config file; explicit flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
}

const DEFAULT_LENGTH: f64 = core::f64::consts::PI;
const DEFAULT_MODES: usize = 64;

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::empty()),
    }
}

fn write_artifact(output: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| {
                CliError::Config(format!("cannot write {}: {e}", path.display()))
            })?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_scheme(raw: &str) -> Result<Scheme, CliError> {
    match raw {
        "etd1" => Ok(Scheme::Etd1),
        "etd2" => Ok(Scheme::Etd2),
        other => Err(CliError::Config(format!(
            "unknown scheme '{other}' (expected etd1|etd2)"
        ))),
    }
}

fn parse_nonlinearity(form: &str, kappa: f64, rho: f64) -> Result<NonlinearitySpec, CliError> {
    match form {
        "zero" => Ok(NonlinearitySpec::zero()),
        "cubic" => Ok(NonlinearitySpec::cubic(kappa)),
        "power-sign" => Ok(NonlinearitySpec::power_sign(kappa, rho)?),
        other => Err(CliError::Config(format!(
            "unknown nonlinearity '{other}' (expected zero|cubic|power-sign)"
        ))),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(args) => {
            let cfg = load_config(&args.common.config)?;
            cfg.check_known(&["eta", "n-modes", "length", "kind", "output", "seed"])?;
            let eta = resolve(args.common.eta, &cfg, "eta", None)?;
            let n_modes = resolve(args.common.n_modes, &cfg, "n-modes", Some(DEFAULT_MODES))?;
            let length = resolve(args.common.length, &cfg, "length", Some(DEFAULT_LENGTH))?;
            let kind_raw = resolve(args.kind, &cfg, "kind", Some("reduced".to_string()))?;
            let kind: SpectrumKind = kind_raw.parse().map_err(CliError::Config)?;
            let output = args.common.output.or(cfg.get("output")?);
            let text = experiments::spectrum_csv(eta, n_modes, length, kind)?;
            write_artifact(output, &text)
        }
        Command::Regime(args) => {
            let cfg = load_config(&args.config)?;
            // shared config files may carry the common basis keys; they are
            // simply unused here
            cfg.check_known(&["eta", "n-modes", "length", "output", "seed"])?;
            let eta = resolve(args.eta, &cfg, "eta", None)?;
            let output = args.output.or(cfg.get("output")?);
            let text = experiments::regime_json(eta)?;
            write_artifact(output, &text)
        }
        Command::ResolventScan(args) => {
            let cfg = load_config(&args.common.config)?;
            cfg.check_known(&[
                "eta", "n-modes", "length", "angles", "radii", "output", "seed",
            ])?;
            let eta = resolve(args.common.eta, &cfg, "eta", None)?;
            let n_modes = resolve(args.common.n_modes, &cfg, "n-modes", Some(DEFAULT_MODES))?;
            let length = resolve(args.common.length, &cfg, "length", Some(DEFAULT_LENGTH))?;
            let angles_raw = resolve(
                args.angles,
                &cfg,
                "angles",
                Some("2.356194490192345,-2.356194490192345".to_string()),
            )?;
            let radii_raw = resolve(
                args.radii,
                &cfg,
                "radii",
                Some("1,10,100,1000,10000".to_string()),
            )?;
            let angles = parse_f64_list(&angles_raw)?;
            let radii = parse_f64_list(&radii_raw)?;
            let output = args.common.output.or(cfg.get("output")?);
            let text = experiments::resolvent_scan_csv(eta, n_modes, length, &angles, &radii)?;
            write_artifact(output, &text)
        }
        Command::IllposedDemo(args) => {
            let cfg = load_config(&args.common.config)?;
            cfg.check_known(&[
                "eta", "n-modes", "length", "window-t0", "window-t1", "output", "seed",
            ])?;
            let eta = resolve(args.common.eta, &cfg, "eta", None)?;
            let n_modes = resolve(args.common.n_modes, &cfg, "n-modes", Some(DEFAULT_MODES))?;
            let length = resolve(args.common.length, &cfg, "length", Some(DEFAULT_LENGTH))?;
            let t0 = resolve(args.window_t0, &cfg, "window-t0", Some(1.0))?;
            let t1 = resolve(args.window_t1, &cfg, "window-t1", Some(2.0))?;
            let output = args.common.output.or(cfg.get("output")?);
            let text = experiments::illposed_demo_csv(eta, n_modes, length, [t0, t1])?;
            write_artifact(output, &text)
        }
        Command::Smoothing(args) => {
            let cfg = load_config(&args.common.config)?;
            cfg.check_known(&[
                "eta", "n-modes", "length", "alpha", "times", "output", "seed",
            ])?;
            let eta = resolve(args.common.eta, &cfg, "eta", None)?;
            let n_modes = resolve(args.common.n_modes, &cfg, "n-modes", Some(DEFAULT_MODES))?;
            let length = resolve(args.common.length, &cfg, "length", Some(DEFAULT_LENGTH))?;
            let alpha = resolve(args.alpha, &cfg, "alpha", Some(0.5))?;
            let times_raw = resolve(
                args.times,
                &cfg,
                "times",
                Some("0.001,0.01,0.1,1".to_string()),
            )?;
            let times = parse_f64_list(&times_raw)?;
            let output = args.common.output.or(cfg.get("output")?);
            let text = experiments::smoothing_csv(eta, n_modes, length, alpha, &times)?;
            write_artifact(output, &text)
        }
        Command::Evolve(args) => {
            let cfg = load_config(&args.common.config)?;
            cfg.check_known(&[
                "eta",
                "n-modes",
                "length",
                "nonlinearity",
                "kappa",
                "rho",
                "dt",
                "t-final",
                "scheme",
                "blowup-threshold",
                "record-every",
                "method",
                "initial",
                "amplitude",
                "output",
                "seed",
            ])?;
            let eta = resolve(args.common.eta, &cfg, "eta", None)?;
            let n_modes = resolve(args.common.n_modes, &cfg, "n-modes", Some(DEFAULT_MODES))?;
            let length = resolve(args.common.length, &cfg, "length", Some(DEFAULT_LENGTH))?;
            let form = resolve(args.nonlinearity, &cfg, "nonlinearity", Some("zero".into()))?;
            let kappa = resolve(args.kappa, &cfg, "kappa", Some(1.0))?;
            let rho = resolve(args.rho, &cfg, "rho", Some(3.0))?;
            let dt = resolve(args.dt, &cfg, "dt", Some(1e-2))?;
            let t_final = resolve(args.t_final, &cfg, "t-final", Some(1.0))?;
            let scheme_raw = resolve(args.scheme, &cfg, "scheme", Some("etd2".into()))?;
            let threshold = resolve(args.blowup_threshold, &cfg, "blowup-threshold", Some(1e8))?;
            let record_every = resolve(args.record_every, &cfg, "record-every", Some(1usize))?;
            let method_raw = resolve(args.method, &cfg, "method", Some("etd".into()))?;
            let initial_raw = resolve(args.initial, &cfg, "initial", Some("mode1".into()))?;
            let amplitude = resolve(args.amplitude, &cfg, "amplitude", Some(0.1))?;
            let seed = resolve(args.common.seed, &cfg, "seed", Some(0u64))?;
            let output = args.common.output.or(cfg.get("output")?);
            let params = EvolveParams {
                eta,
                n_modes,
                length,
                nonlinearity: parse_nonlinearity(&form, kappa, rho)?,
                solver: experiments::build_solver_config(
                    dt,
                    t_final,
                    parse_scheme(&scheme_raw)?,
                    threshold,
                    record_every,
                )?,
                method: method_raw
                    .parse::<EvolveMethod>()
                    .map_err(CliError::Config)?,
                initial: initial_raw
                    .parse::<InitialData>()
                    .map_err(CliError::Config)?,
                amplitude,
                seed,
            };
            let text = experiments::evolve_csv(&params)?;
            write_artifact(output, &text)
        }
        Command::Dissipativity(args) => {
            let cfg = load_config(&args.config)?;
            cfg.check_known(&["mu", "u-re", "u-im", "output", "seed"])?;
            let mu = resolve(args.mu, &cfg, "mu", Some(1.0))?;
            let u_re = resolve(args.u_re, &cfg, "u-re", Some(1.0))?;
            let u_im = resolve(args.u_im, &cfg, "u-im", Some(0.0))?;
            let output = args.output.or(cfg.get("output")?);
            let text = experiments::dissipativity_json(mu, u_re, u_im)?;
            write_artifact(output, &text)
        }
    }
}

fn init_threads() {
    let n = std::env::var("MGT_THREADS")
        .ok()
        .and_then(|raw| raw.parse::<usize>().ok())
        .unwrap_or(0);
    if n > 0 {
        // failure here only means a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are successful exits
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    init_threads();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

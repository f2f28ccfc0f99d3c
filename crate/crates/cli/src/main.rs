use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use ic_turbo::channel::llr_sigma_for_snr_db;
use ic_turbo::exit::{
    exit_ic, generate_mother_exit, ic_threshold, lte_threshold, repetition_equivalent_sigma,
    ExitFamily, ExitSimConfig, SnrBracket, FAMILY_STEP, THRESHOLD_TOL_DB,
};
use ic_turbo::ic::{solve_code_parameters, standard_block_lengths};
use ic_turbo::rate_matching::repetition_profile;
use ic_turbo::sim::{per_cb_profile, run_sweep_with, Scheme, SimConfig, SnrGrid};
use ic_turbo::turbo::{Trellis, MOTHER_RATE};

#[derive(Parser)]
#[command(
    name = "icturbo",
    version,
    about = "Information-coupled Turbo code simulator and EXIT tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lte,
    Ic,
}

#[derive(clap::Args)]
struct ExitMc {
    /// Information bits simulated per a priori grid point
    /// [default: 100000 for exit, 1000000 for threshold].
    #[arg(long)]
    bits: Option<usize>,
    /// Frame length of the Monte Carlo EXIT runs.
    #[arg(long, default_value_t = 10_000)]
    frame_len: usize,
    #[arg(long, default_value_t = ExitSimConfig::default().seed)]
    seed: u64,
}

impl ExitMc {
    fn config(&self, base: ExitSimConfig) -> Result<ExitSimConfig> {
        let bits = self.bits.unwrap_or(base.bits_per_point);
        if bits == 0 || self.frame_len == 0 {
            bail!("--bits and --frame-len must be positive");
        }
        Ok(ExitSimConfig {
            bits_per_point: bits,
            frame_len: self.frame_len.min(bits),
            seed: self.seed,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a TBER/CBER sweep described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the scheme: lte, ic-fffb or ic-wd.
        #[arg(long)]
        scheme: Option<String>,
        /// Overrides the SNR grid, as start:stop:step in dB.
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for the CSV and JSON reports.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Per-pass CBER of FF-FB decoding at one SNR, as CSV (pass, cb, cber).
    Profile {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, default_value_t = 1000)]
        tbs: usize,
    },
    /// Solve (N, K, D, padding) for a TB length and target rate.
    Params {
        #[arg(long)]
        tb_len: usize,
        #[arg(long)]
        rate: f64,
    },
    /// Print a constituent EXIT curve as CSV.
    #[command(group(ArgGroup::new("kind").required(true).multiple(true).args(["rate", "coupling"])))]
    Exit {
        /// Repetition-matched LTE rate.
        #[arg(long)]
        rate: Option<f64>,
        /// Coupled fraction of the a priori information, 2D/K.
        #[arg(long)]
        coupling: Option<f64>,
        /// Channel SNR in dB.
        #[arg(long, allow_hyphen_values = true)]
        snr: f64,
        #[command(flatten)]
        mc: ExitMc,
    },
    /// Decoding threshold of a rate-matched LTE code or an IC code.
    Threshold {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        rate: f64,
        /// Coupled fraction 2D/K (ic mode); alternatively give --coupling-len and --cb-len.
        #[arg(long)]
        coupling: Option<f64>,
        #[arg(long, requires = "cb_len")]
        coupling_len: Option<usize>,
        #[arg(long)]
        cb_len: Option<usize>,
        #[arg(long, default_value_t = SnrBracket::default().lo_db, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = SnrBracket::default().hi_db, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = THRESHOLD_TOL_DB)]
        tol: f64,
        #[command(flatten)]
        mc: ExitMc,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            scheme,
            snr,
            seed,
            out,
            quiet,
        } => simulate(config, scheme, snr, seed, out, quiet),
        Command::Profile { config, snr, tbs } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = SimConfig::from_toml_str(&text)
                .with_context(|| format!("in {}", config.display()))?;
            print!("{}", per_cb_profile(&cfg, snr, tbs)?.to_csv());
            Ok(())
        }
        Command::Params { tb_len, rate } => {
            let p = solve_code_parameters(tb_len, rate, &standard_block_lengths())?;
            println!("{}", serde_json::to_string_pretty(&p)?);
            Ok(())
        }
        Command::Exit {
            rate,
            coupling,
            snr,
            mc,
        } => exit_curve(rate, coupling, snr, &mc.config(ExitSimConfig::default())?),
        Command::Threshold {
            mode,
            rate,
            coupling,
            coupling_len,
            cb_len,
            lo,
            hi,
            tol,
            mc,
        } => {
            let fraction = match (coupling, coupling_len, cb_len) {
                (Some(f), None, _) => Some(f),
                (None, Some(d), Some(k)) if k > 0 => Some(2.0 * d as f64 / k as f64),
                (None, None, _) => None,
                _ => bail!("give either --coupling or --coupling-len with --cb-len"),
            };
            threshold(
                mode,
                rate,
                fraction,
                SnrBracket {
                    lo_db: lo,
                    hi_db: hi,
                },
                tol,
                &mc.config(ExitSimConfig::threshold_grade())?,
            )
        }
    }
}

fn simulate(
    path: PathBuf,
    scheme: Option<String>,
    snr: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: bool,
) -> Result<()> {
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg =
        SimConfig::from_toml_str(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(s) = scheme {
        cfg.scheme = Scheme::parse(&s)?;
    }
    if let Some(s) = snr {
        cfg.snr = SnrGrid::parse_range(&s)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output.dir = Some(o);
    }
    cfg.validate()?;
    let report = run_sweep_with(&cfg, |p| {
        if !quiet {
            eprintln!(
                "{:>7.2} dB  tbs {:>6}  errors {:>4}  tber {:.3e}  decodes/cb {:.3}",
                p.snr_db, p.tbs, p.tb_errors, p.tber, p.avg_decodes_per_cb
            );
        }
    })?;
    match &cfg.output.dir {
        Some(dir) => {
            let stem = cfg
                .output
                .stem
                .clone()
                .unwrap_or_else(|| cfg.scheme.name().to_string());
            let (csv, json) = report.write(dir, &stem)?;
            if !quiet {
                eprintln!("wrote {} and {}", csv.display(), json.display());
            }
        }
        None => print!("{}", report.to_csv()?),
    }
    Ok(())
}

fn exit_curve(
    rate: Option<f64>,
    coupling: Option<f64>,
    snr_db: f64,
    cfg: &ExitSimConfig,
) -> Result<()> {
    let mut sigma = llr_sigma_for_snr_db(snr_db);
    if let Some(r) = rate {
        sigma = repetition_equivalent_sigma(sigma, &repetition_profile(r, MOTHER_RATE)?);
    }
    let mut curve = generate_mother_exit(sigma, &Trellis::lte(), cfg);
    if let Some(f) = coupling {
        curve = exit_ic(&curve, f)?;
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "I_A,I_E")?;
    for (a, e) in &curve.samples {
        writeln!(out, "{a:.4},{e:.6}")?;
    }
    Ok(())
}

fn threshold(
    mode: ModeArg,
    rate: f64,
    coupling: Option<f64>,
    bracket: SnrBracket,
    tol: f64,
    cfg: &ExitSimConfig,
) -> Result<()> {
    if !(bracket.lo_db < bracket.hi_db) || !(tol > 0.0) {
        bail!("need --lo < --hi and a positive --tol");
    }
    let (lo, hi) = bracket.sigma_span(rate)?;
    let family = ExitFamily::generate(
        &Trellis::lte(),
        (lo - FAMILY_STEP).max(FAMILY_STEP),
        hi + FAMILY_STEP,
        FAMILY_STEP,
        cfg,
    );
    let result = match mode {
        ModeArg::Lte => lte_threshold(&family, rate, bracket, tol)?,
        ModeArg::Ic => {
            let f = coupling.context("ic mode needs --coupling or --coupling-len/--cb-len")?;
            ic_threshold(&family, rate, f, bracket, tol)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

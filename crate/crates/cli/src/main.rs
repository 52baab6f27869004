use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hmts_core::capacity::{
    estimate_hierarchical_table, select_pair, Geometry, HierarchicalOptions, MiMethod, SelectOptions,
    DEFAULT_MARGIN_DB,
};
use hmts_core::constellation::{
    build_16apsk, build_16qam, solution_set, Apsk16Params, Qam16Params, DEFAULT_GAMMA_CAP,
};
use hmts_core::pairing::pair_receivers;
use hmts_core::rates::{evaluate_pair, gain_grid};
use hmts_core::sim::{run_scenario, summarize, trial_population, Mode};
use hmts_core::{channel, CodeRate, Error, Strategy, ThresholdTable, WeatherCdf};

mod config;

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hmts", version, about = "Time sharing with hierarchical modulation for satellite broadcast")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory receiving the CSV outputs.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// TOML run configuration, or the name of a bundled preset.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Threshold table replacing the bundled one.
    #[arg(long, global = true, env = "HMTS_THRESHOLDS")]
    thresholds: Option<PathBuf>,

    /// Weather attenuation CDF replacing the bundled placeholder.
    #[arg(long, global = true, env = "HMTS_WEATHER_CDF")]
    weather_cdf: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy-equation solution curves and constellation symbol files.
    Constellation(ConstellationArgs),
    /// Decoding-threshold tables.
    #[command(subcommand)]
    Thresholds(ThresholdsCommand),
    /// Equal rates for one pair or over an SNR grid.
    #[command(subcommand)]
    Rates(RatesCommand),
    /// Pair a list of receivers with one strategy.
    Pairing(PairingArgs),
    /// Monte-Carlo gain experiment over a spot beam.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct ConstellationArgs {
    /// HE energy fraction; one curve file per value.
    #[arg(long)]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_GAMMA_CAP)]
    gamma_cap: f64,
    /// Ring ratio of a 16-APSK symbol file (needs --theta).
    #[arg(long, requires = "theta")]
    gamma: Option<f64>,
    /// Outer-ring half angle in degrees (needs --gamma).
    #[arg(long, requires = "gamma")]
    theta: Option<f64>,
    /// Non-uniformity of a hierarchical 16-QAM symbol file.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum ThresholdsCommand {
    /// Estimate hierarchical 16-APSK thresholds from mutual information.
    Estimate(EstimateArgs),
    /// Choose (gamma, theta) on the solution curve of one energy fraction.
    Select(SelectArgs),
    /// Print the active threshold table.
    Show,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Quadrature,
    MonteCarlo,
}

#[derive(Args, Debug, Clone, Copy)]
struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    method: MethodArg,
    /// Gauss-Hermite nodes per dimension.
    #[arg(long, default_value_t = 16)]
    order: usize,
    /// Monte-Carlo noise draws per symbol.
    #[arg(long, default_value_t = 20_000)]
    mc_samples: usize,
}

impl MethodArgs {
    fn method(&self, seed: u64) -> MiMethod {
        match self.method {
            MethodArg::Quadrature => MiMethod::Quadrature { order: self.order },
            MethodArg::MonteCarlo => MiMethod::MonteCarlo { samples: self.mc_samples, seed },
        }
    }
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Energy fractions to cover (default 0.75, 0.8, 0.85, 0.9).
    #[arg(long)]
    rho: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_MARGIN_DB)]
    margin_db: f64,
    /// Pick each geometry by threshold search instead of the adopted pairs.
    #[arg(long)]
    select: bool,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[arg(long)]
    rho: f64,
    /// Code rates averaged by the selection (default: all DVB-S2 rates).
    #[arg(long, value_delimiter = ',')]
    rates: Vec<String>,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Subcommand, Debug)]
enum RatesCommand {
    /// Operating points, hull and equal rates of two receivers.
    Pair {
        #[arg(long, allow_hyphen_values = true)]
        snr1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        snr2: Option<f64>,
    },
    /// Pair gain over a square SNR grid.
    Grid {
        #[arg(long, allow_hyphen_values = true)]
        min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct PairingArgs {
    #[arg(long, default_value = "A")]
    strategy: Strategy,
    /// Comma-separated SNRs in dB, or a CSV file with an `snr_db` column.
    #[arg(long, allow_hyphen_values = true)]
    snrs: String,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    receivers: Option<usize>,
    /// Beam-centre SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_max: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<Strategy>,
    /// Professional share grid (heterogeneous mode).
    #[arg(long, value_delimiter = ',')]
    shares: Vec<f64>,
    /// End users behind one professional terminal.
    #[arg(long)]
    professional_weight: Option<u32>,
    /// Also write every trial population.
    #[arg(long)]
    dump_populations: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Homogeneous,
    Heterogeneous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Homogeneous => Mode::Homogeneous,
            ModeArg::Heterogeneous => Mode::Heterogeneous,
        }
    }
}

/// Flags merged over the configuration file.
struct RunContext {
    seed: u64,
    out_dir: PathBuf,
    cfg: RunConfig,
    table: ThresholdTable,
    weather: WeatherCdf,
}

fn load_context(cli: &Cli) -> anyhow::Result<RunContext> {
    let cfg = match &cli.config {
        Some(spec) => RunConfig::load(spec)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let out_dir = cli.out_dir.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| "hmts-out".into());
    let table = match cli.thresholds.as_ref().or(cfg.thresholds.as_ref()) {
        Some(p) => ThresholdTable::load(p).with_context(|| format!("threshold table {}", p.display()))?,
        None => ThresholdTable::paper_default(),
    };
    let weather = match cli.weather_cdf.as_ref().or(cfg.weather_cdf.as_ref()) {
        Some(p) => WeatherCdf::load(p).with_context(|| format!("weather CDF {}", p.display()))?,
        None => WeatherCdf::placeholder(),
    };
    Ok(RunContext { seed, out_dir, cfg, table, weather })
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, &buf).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn cmd_constellation(ctx: &RunContext, args: &ConstellationArgs) -> anyhow::Result<()> {
    if args.rho.is_empty() && args.gamma.is_none() && args.alpha.is_none() {
        bail!(ConfigError("nothing to do: pass --rho, --gamma/--theta or --alpha".into()));
    }
    for &rho in &args.rho {
        let sol = solution_set(rho, args.samples, args.gamma_cap)?;
        let path = ctx.out_dir.join(format!("curve_rho_{rho:.2}.csv"));
        write_atomic(&path, |b| sol.write_csv(b))?;
        let lim = sol.gamma_lim.map_or("unbounded".to_string(), |g| format!("{g:.4}"));
        println!("rho_he {rho}: gamma_lim {lim}, {} points -> {}", sol.curve.len(), path.display());
    }
    if let (Some(gamma), Some(theta)) = (args.gamma, args.theta) {
        let p = Apsk16Params::new(gamma, theta)?;
        let c = build_16apsk(p)?;
        let path = ctx.out_dir.join(format!("apsk16_gamma_{gamma}_theta_{theta}.csv"));
        write_atomic(&path, |b| c.write_csv(b))?;
        println!("16-APSK energy fraction {:.4}, {} symbols -> {}", p.energy_fraction(), c.len(), path.display());
    }
    if let Some(alpha) = args.alpha {
        let p = Qam16Params::new(alpha)?;
        let c = build_16qam(p)?;
        let path = ctx.out_dir.join(format!("qam16_alpha_{alpha}.csv"));
        write_atomic(&path, |b| c.write_csv(b))?;
        println!("16-QAM energy fraction {:.4} -> {}", p.he_energy_fraction(), path.display());
    }
    Ok(())
}

fn cmd_thresholds(ctx: &RunContext, cmd: &ThresholdsCommand) -> anyhow::Result<()> {
    match cmd {
        ThresholdsCommand::Estimate(args) => {
            let mut opts = HierarchicalOptions {
                margin_db: args.margin_db,
                method: args.method.method(ctx.seed),
                ..Default::default()
            };
            if !args.rho.is_empty() {
                opts.rhos = args.rho.clone();
            }
            if args.select {
                opts.geometry = Geometry::Selected(SelectOptions::default());
            }
            let table = estimate_hierarchical_table(&opts)?;
            let path = ctx.out_dir.join("hierarchical_thresholds.csv");
            write_atomic(&path, |b| table.write_csv(b))?;
            println!("{} entries -> {}", table.len(), path.display());
        }
        ThresholdsCommand::Select(args) => {
            let rates = if args.rates.is_empty() {
                CodeRate::dvbs2()
            } else {
                args.rates.iter().map(|r| r.parse()).collect::<Result<Vec<CodeRate>, _>>()?
            };
            let opts = SelectOptions {
                samples: args.samples,
                method: args.method.method(ctx.seed),
                ..Default::default()
            };
            let s = select_pair(args.rho, &rates, &opts)?;
            println!("rho_he,gamma,theta_deg,mean_he_threshold_db");
            println!("{},{},{},{}", args.rho, s.params.gamma, s.params.theta_deg, s.mean_he_threshold_db);
        }
        ThresholdsCommand::Show => {
            let stdout = std::io::stdout();
            ctx.table.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

fn cmd_rates(ctx: &RunContext, cmd: &RatesCommand) -> anyhow::Result<()> {
    match *cmd {
        RatesCommand::Pair { snr1, snr2 } => {
            let pair = ctx.cfg.pair;
            let (Some(a), Some(b)) = (snr1.or(pair.map(|p| p.snr1)), snr2.or(pair.map(|p| p.snr2))) else {
                bail!(ConfigError("rates pair needs --snr1 and --snr2".into()));
            };
            let e = evaluate_pair(a, b, &ctx.table)?;
            let path = ctx.out_dir.join(format!("pair_{a}_{b}.csv"));
            write_atomic(&path, |buf| e.write_csv(buf))?;
            e.write_csv(std::io::stdout().lock())?;
        }
        RatesCommand::Grid { min, max, step } => {
            let g = ctx.cfg.grid;
            let min = min.or(g.map(|g| g.min)).unwrap_or(4.0);
            let max = max.or(g.map(|g| g.max)).unwrap_or(12.0);
            let step = step.or(g.map(|g| g.step)).unwrap_or(0.5);
            let cells = gain_grid(min, max, step, &ctx.table)?;
            let path = ctx.out_dir.join("gain_grid.csv");
            write_atomic(&path, |b| {
                writeln!(b, "snr1_db,snr2_db,gain")?;
                for c in &cells {
                    let g = c.gain.map_or(String::new(), |g| g.to_string());
                    writeln!(b, "{},{},{g}", c.snr1_db, c.snr2_db)?;
                }
                Ok(())
            })?;
            let best = cells.iter().filter_map(|c| c.gain.map(|g| (g, c))).fold(None, |acc: Option<(f64, _)>, x| {
                if acc.is_none_or(|a| x.0 > a.0) { Some(x) } else { acc }
            });
            if let Some((g, c)) = best {
                println!("max gain {:.4} at ({}, {}) dB", g, c.snr1_db, c.snr2_db);
            }
            println!("{} cells -> {}", cells.len(), path.display());
        }
    }
    Ok(())
}

fn read_snrs(spec: &str) -> anyhow::Result<Vec<f64>> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let pop = channel::read_population_csv(text.as_bytes());
        if let Ok(pop) = pop {
            return Ok(pop.iter().map(|r| r.snr_db).collect());
        }
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let field = line.split(',').next().unwrap_or("").trim();
            if field.is_empty() || (i == 0 && field.parse::<f64>().is_err()) {
                continue;
            }
            out.push(field.parse().map_err(|_| ConfigError(format!("line {}: bad SNR '{field}'", i + 1)))?);
        }
        return Ok(out);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| ConfigError(format!("bad SNR '{s}'")).into()))
        .collect()
}

fn cmd_pairing(ctx: &RunContext, args: &PairingArgs) -> anyhow::Result<()> {
    let snrs = read_snrs(&args.snrs)?;
    let plan = pair_receivers(&snrs, args.strategy, ctx.seed)?;
    let path = ctx.out_dir.join(format!("pairing_{}.csv", args.strategy));
    let fill = |b: &mut Vec<u8>| -> std::io::Result<()> {
        writeln!(b, "receiver_low,receiver_high,snr_low_db,snr_high_db,difference_db")?;
        for &(i, j) in &plan.pairs {
            writeln!(b, "{i},{j},{},{},{}", snrs[i], snrs[j], snrs[j] - snrs[i])?;
        }
        Ok(())
    };
    write_atomic(&path, fill)?;
    println!("strategy {}: delta_avg = {} dB, variance = {} dB^2", args.strategy, plan.delta_avg, plan.delta_variance);
    Ok(())
}

fn cmd_simulate(ctx: &RunContext, args: &SimulateArgs) -> anyhow::Result<()> {
    let mut sc = ctx.cfg.scenario.clone().unwrap_or_default();
    sc.seed = ctx.seed;
    if let Some(t) = args.trials {
        sc.n_trials = t;
    }
    if let Some(n) = args.receivers {
        sc.n_receivers = n;
    }
    if !args.snr_max.is_empty() {
        sc.snr_max_db = args.snr_max.clone();
    }
    if !args.strategies.is_empty() {
        sc.strategies = args.strategies.clone();
    }
    if !args.shares.is_empty() {
        sc.professional_shares = args.shares.clone();
    }
    if let Some(w) = args.professional_weight {
        sc.professional_weight = w;
    }
    let mode = args.mode.map(Mode::from).or(ctx.cfg.mode).unwrap_or(Mode::Homogeneous);
    sc.validate().map_err(|e| ConfigError(e.to_string()))?;

    let report = run_scenario(&sc, mode, &ctx.table, &ctx.weather)?;
    let records = ctx.out_dir.join("gain_trials.csv");
    let summary = ctx.out_dir.join("gain_summary.csv");
    let ordering = ctx.out_dir.join("ordering.csv");
    write_atomic(&records, |b| report.write_records_csv(b))?;
    write_atomic(&summary, |b| report.write_summary_csv(b))?;
    let checks = summarize(&report, 0.0);
    write_atomic(&ordering, |b| {
        writeln!(b, "snr_max_db,share,a_ge_b,b_ge_c,c_ge_d,a_ge_c")?;
        let f = |c: Option<bool>| c.map_or(String::new(), |v| v.to_string());
        for c in &checks {
            writeln!(b, "{},{},{},{},{},{}", c.snr_max_db, c.share, f(c.a_ge_b), f(c.b_ge_c), f(c.c_ge_d), f(c.a_ge_c))?;
        }
        Ok(())
    })?;
    if args.dump_populations {
        let shares = match mode {
            Mode::Homogeneous => vec![0.0],
            Mode::Heterogeneous => sc.professional_shares.clone(),
        };
        for trial in 0..sc.n_trials {
            for &snr in &sc.snr_max_db {
                for &share in &shares {
                    let pop = trial_population(&sc, &ctx.weather, trial, snr, share)?;
                    let path = ctx
                        .out_dir
                        .join("populations")
                        .join(format!("snr_{snr}_share_{share}_trial_{trial}.csv"));
                    write_atomic(&path, |b| channel::write_population_csv(&pop, b))?;
                }
            }
        }
    }
    println!("snr_max_db,strategy,share,mean_gain,min_gain,max_gain,mean_excluded");
    for r in &report.summary {
        println!(
            "{},{},{},{:.5},{:.5},{:.5},{:.2}",
            r.snr_max_db, r.strategy, r.share, r.mean_gain, r.min_gain, r.max_gain, r.mean_excluded
        );
    }
    eprintln!("wrote {}, {}, {}", records.display(), summary.display(), ordering.display());
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let ctx = load_context(cli)?;
    match &cli.command {
        Command::Constellation(a) => cmd_constellation(&ctx, a),
        Command::Thresholds(c) => cmd_thresholds(&ctx, c),
        Command::Rates(c) => cmd_rates(&ctx, c),
        Command::Pairing(a) => cmd_pairing(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
    }
}

/// 2 for configuration and parameter errors, 3 for degenerate data.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Degenerate(_) | Error::ZeroRate { .. } => 3,
                Error::Io(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

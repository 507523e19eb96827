use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opjensen::campaign::{parse_interval, TrialJson};
use opjensen::json::ConstantsJson;
use opjensen::search::SearchOutcome;
use opjensen::table::{coefficient_table, format_coefficient, to_csv};
use opjensen::{
    reproduces, run_campaign, run_search, CampaignConfig, CampaignRun, CliError, Instance, NRange,
    ReplayContext, Result, SearchConfig, Subdivision, Target,
};
use opjensen_core::converse::compute_constants;
use opjensen_core::hfunc::jensen_coefficient;
use opjensen_core::{CoefficientPolicy, HFunction, HermitianMatrix, ScalarFunction, UnitVector};

const SEED_ENV: &str = "OPJENSEN_SEED";

#[derive(Parser)]
#[command(
    name = "opjensen",
    version,
    about = "Numerical verification of operator Jensen-type inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Jensen coefficient of an h function.
    Coeff {
        #[arg(long)]
        h: HFunction,
        #[arg(long, default_value = "safe")]
        policy: CoefficientPolicy,
    },
    /// Safe coefficients of the named h families as CSV.
    Table {
        /// Exponents for the power and recpower rows, comma separated.
        #[arg(long, default_value = "0.5", value_delimiter = ',')]
        s: Vec<f64>,
    },
    /// Run a seeded verification campaign.
    Verify(VerifyArgs),
    /// Compute the converse constants alpha and beta.
    Converse(ConverseArgs),
    /// Search for violations of the pointwise coefficient h(lambda)/lambda.
    Search(SearchArgs),
    /// Hermite-Hadamard chain campaign.
    Hh(HhArgs),
    /// Multi-operator and weighted campaigns.
    Multi(MultiArgs),
    /// Replay every report in a JSON lines file and compare lhs and rhs.
    Replay(ReplayArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "square")]
    f: ScalarFunction,
    #[arg(long, default_value = "identity")]
    h: HFunction,
    /// Dimension or inclusive range `lo..hi`.
    #[arg(long, default_value = "1..8")]
    n: NRange,
    #[arg(long, default_value = "1,2", value_parser = parse_interval)]
    interval: (f64, f64),
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Base seed; the OPJENSEN_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "safe")]
    policy: CoefficientPolicy,
    /// Allow spectra touching or below zero.
    #[arg(long = "override")]
    override_positivity: bool,
    /// Write JSON lines here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    /// Use A = diag(1, 0), x = (1/sqrt 2, 1/sqrt 2); implies --override.
    #[arg(long, alias = "paper-instance")]
    counterexample: bool,
    /// Fixed diagonal operator, comma separated.
    #[arg(long, value_delimiter = ',', requires = "x")]
    diag: Option<Vec<f64>>,
    /// Fixed vector for --diag, normalized before use.
    #[arg(long, value_delimiter = ',', requires = "diag")]
    x: Option<Vec<f64>>,
}

#[derive(Args)]
struct SubdivisionArgs {
    /// Knots m = x_0 < ... < x_k = M, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "auto_refine")]
    subdivision: Option<Vec<f64>>,
    /// Place knots at the sign changes of f''.
    #[arg(long)]
    auto_refine: bool,
}

impl SubdivisionArgs {
    fn subdivision(&self) -> Subdivision {
        match (&self.subdivision, self.auto_refine) {
            (Some(k), _) => Subdivision::Knots(k.clone()),
            (None, true) => Subdivision::Auto,
            (None, false) => Subdivision::Trivial,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "mond-pecaric")]
    target: Target,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    subdivision: SubdivisionArgs,
    /// Operators per trial for the multi targets.
    #[arg(long, default_value_t = 3)]
    blocks: usize,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
}

#[derive(Args)]
struct ConverseArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    subdivision: SubdivisionArgs,
    /// Also run converse checks on random instances.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Lambda values per half of (0, 1).
    #[arg(long, default_value_t = 50)]
    grid: usize,
}

#[derive(Args)]
struct HhArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
}

#[derive(Args)]
struct MultiArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    blocks: usize,
    /// Weighted form with a single vector.
    #[arg(long, conflicts_with = "converse")]
    weighted: bool,
    /// Converse bounds through the block-diagonal operator.
    #[arg(long)]
    converse: bool,
    #[command(flatten)]
    subdivision: SubdivisionArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// JSON lines written by verify, hh or multi.
    file: PathBuf,
    #[arg(long, value_parser = parse_interval)]
    interval: Option<(f64, f64)>,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
    #[command(flatten)]
    subdivision: SubdivisionArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(violations) => ExitCode::from(u8::from(violations)),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether any violation was found.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Coeff { h, policy } => {
            let c = jensen_coefficient(&h, policy, opjensen_core::engine::COEFFICIENT_TOL)?;
            println!("{}", format_coefficient(c));
            Ok(false)
        }
        Command::Table { s } => {
            print!("{}", to_csv(&coefficient_table(&s)?));
            Ok(false)
        }
        Command::Verify(args) => {
            let mut cfg = base_config(args.target, &args.common)?;
            cfg.blocks = args.blocks;
            cfg.subdivision = args.subdivision.subdivision();
            cfg.weights = args.p.zip(args.q);
            apply_instance(&mut cfg, &args.instance)?;
            emit_campaign(&run_campaign(&cfg)?, args.common.out.as_ref())
        }
        Command::Hh(args) => {
            let mut cfg = base_config(Target::HermiteHadamard, &args.common)?;
            cfg.weights = args.p.zip(args.q);
            apply_instance(&mut cfg, &args.instance)?;
            emit_campaign(&run_campaign(&cfg)?, args.common.out.as_ref())
        }
        Command::Multi(args) => {
            let target = if args.weighted {
                Target::WeightedMulti
            } else if args.converse {
                Target::MultiConverse
            } else {
                Target::MultiOperator
            };
            let mut cfg = base_config(target, &args.common)?;
            cfg.blocks = args.blocks;
            cfg.subdivision = args.subdivision.subdivision();
            emit_campaign(&run_campaign(&cfg)?, args.common.out.as_ref())
        }
        Command::Converse(args) => converse(args),
        Command::Search(args) => search(args),
        Command::Replay(args) => replay_file(args),
    }
}

fn seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{SEED_ENV}={v}: {e}"))),
        Err(_) => Ok(flag),
    }
}

fn base_config(target: Target, c: &Common) -> Result<CampaignConfig> {
    let mut cfg = CampaignConfig::new(target);
    cfg.f = c.f.clone();
    cfg.h = c.h.clone();
    cfg.n_range = c.n;
    cfg.interval = c.interval;
    cfg.trials = c.trials;
    cfg.seed = seed(c.seed)?;
    cfg.policy = c.policy;
    cfg.override_positivity = c.override_positivity;
    Ok(cfg)
}

fn fixed_instance(args: &InstanceArgs) -> Result<Option<Instance>> {
    if args.counterexample {
        return Ok(Some(Instance::two_point_counterexample()));
    }
    match (&args.diag, &args.x) {
        (Some(d), Some(x)) => Ok(Some(Instance {
            a: HermitianMatrix::diag(d)?,
            x: UnitVector::normalized(x.clone())?,
        })),
        _ => Ok(None),
    }
}

fn apply_instance(cfg: &mut CampaignConfig, args: &InstanceArgs) -> Result<()> {
    if let Some(inst) = fixed_instance(args)? {
        cfg.instance = Some(inst);
        cfg.trials = 1;
        if args.counterexample {
            cfg.override_positivity = true;
            cfg.interval = (0.0, 1.0);
        }
    }
    Ok(())
}

fn writer(out: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_campaign(run: &CampaignRun, out: Option<&PathBuf>) -> Result<bool> {
    let mut w = writer(out)?;
    run.write_jsonl(&mut w)?;
    w.flush()?;
    if out.is_some() {
        println!("{}", run.summary.to_line());
    }
    eprintln!(
        "{}: {} trials, {} held, {} violated, {} vacuous in {:.3}s",
        run.summary.target,
        run.summary.total,
        run.summary.held,
        run.summary.violated,
        run.summary.vacuous,
        run.summary.wall_time.as_secs_f64()
    );
    Ok(run.summary.violated > 0)
}

fn converse(args: ConverseArgs) -> Result<bool> {
    let mut cfg = base_config(Target::Converse, &args.common)?;
    cfg.subdivision = args.subdivision.subdivision();
    if !args.check {
        let pf = cfg.subdivision.build(&cfg.f, &cfg.spectrum_interval()?)?;
        let k = compute_constants(&pf, &cfg.h, cfg.policy)?;
        let mut w = writer(args.common.out.as_ref())?;
        serde_json::to_writer(&mut w, &ConstantsJson::from(&k))?;
        writeln!(w)?;
        w.flush()?;
        return Ok(false);
    }
    let run = run_campaign(&cfg)?;
    let k = run
        .constants
        .as_ref()
        .expect("converse target computes constants");
    let mut w = writer(args.common.out.as_ref())?;
    serde_json::to_writer(&mut w, &ConstantsJson::from(k))?;
    writeln!(w)?;
    w.flush()?;
    drop(w);
    emit_after_header(&run, args.common.out.as_ref())
}

fn emit_after_header(run: &CampaignRun, out: Option<&PathBuf>) -> Result<bool> {
    match out {
        Some(path) => {
            let file = std::fs::OpenOptions::new().append(true).open(path)?;
            let mut w = BufWriter::new(file);
            run.write_jsonl(&mut w)?;
            w.flush()?;
            println!("{}", run.summary.to_line());
            Ok(run.summary.violated > 0)
        }
        None => emit_campaign(run, None),
    }
}

fn search(args: SearchArgs) -> Result<bool> {
    let c = &args.common;
    let mut cfg = SearchConfig::new(c.f.clone(), c.h.clone());
    cfg.n_range = c.n;
    cfg.interval = c.interval;
    cfg.trials = c.trials;
    cfg.seed = seed(c.seed)?;
    cfg.grid = args.grid;
    cfg.override_positivity = c.override_positivity;
    if let Some(inst) = fixed_instance(&args.instance)? {
        cfg.instance = Some(inst);
        if args.instance.counterexample {
            cfg.override_positivity = true;
            cfg.interval = (0.0, 1.0);
        }
    }
    let outcome = run_search(&cfg)?;
    let mut w = writer(c.out.as_ref())?;
    write_search(&outcome, &mut w)?;
    w.flush()?;
    eprintln!(
        "search: {} violations above 1/2, {} at or below 1/2 in {:.3}s",
        outcome.upper.violated,
        outcome.lower.violated,
        outcome.upper.wall_time.as_secs_f64()
    );
    Ok(outcome.violations() > 0)
}

fn write_search(outcome: &SearchOutcome, w: &mut dyn Write) -> Result<()> {
    for row in &outcome.rows {
        serde_json::to_writer(&mut *w, row)?;
        writeln!(w)?;
    }
    writeln!(w, "{}", outcome.to_line())?;
    Ok(())
}

fn replay_file(args: ReplayArgs) -> Result<bool> {
    let mut ctx = ReplayContext {
        interval: args.interval,
        weights: args.p.zip(args.q),
        subdivision: args.subdivision.subdivision(),
    };
    let fixed_weights = ctx.weights;
    let file = BufReader::new(File::open(&args.file)?);
    let (mut checked, mut mismatched) = (0usize, 0usize);
    for line in file.lines() {
        let line = line?;
        let Ok(trial) = serde_json::from_str::<TrialJson>(&line) else {
            continue;
        };
        ctx.weights = fixed_weights.or(trial.p.zip(trial.q));
        for report in &trial.reports {
            checked += 1;
            if !reproduces(report, &ctx)? {
                mismatched += 1;
                println!(
                    "{}",
                    serde_json::json!({ "trial": trial.trial, "mismatch": report.name })
                );
            }
        }
    }
    println!(
        "{}",
        serde_json::json!({ "replayed": checked, "mismatched": mismatched })
    );
    Ok(mismatched > 0)
}

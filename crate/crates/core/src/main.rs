use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use haarstat::experiment::{
    default_out_dir, run_experiment, Analysis, ExperimentConfig, OUT_DIR_ENV,
};
use haarstat::io::{read_samples, write_samples};
use haarstat::xeb::{xeb_conditional_all, DEFAULT_MIN_POSTSELECTED};
use haarstat::{
    depolarize, draw_samples, probabilities, sample_haar_state, xeb_full, xeb_subsystem,
    AnalyticLaw, Error, Partition, ProbVector, RngSpec,
};

/// Bit-string statistics of Haar-random and depolarized states.
#[derive(Parser)]
#[command(name = "haarstat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one state and write sampled bit strings plus its ideal vector.
    Sample(Overrides),
    /// Pool scaled probabilities over trials, histogram them and run KS.
    Analyze {
        #[arg(long, value_enum, default_value = "full")]
        analysis: AnalyzeKind,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Full, subsystem and conditional XEB, simulated or from files.
    Xeb {
        /// Score this sample file instead of simulating.
        #[arg(long, requires = "ideal")]
        samples_file: Option<PathBuf>,
        /// Ideal probability vector written by `sample`.
        #[arg(long)]
        ideal: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Estimate the depolarizing strength from the gap and the variance.
    Gap(Overrides),
    /// Tabulate an analytic law as CSV `x,pdf,cdf`.
    Laws(LawArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Full,
    Subsystem,
    Conditional,
}

/// Flags overriding fields of the configuration document.
#[derive(Args, Default)]
struct Overrides {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    /// Comma-separated qubits of subsystem A.
    #[arg(long, value_delimiter = ',')]
    a_bits: Option<Vec<u32>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    condition_b: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    /// Observed sample file (text or counts document) to analyze.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self, analysis: Analysis) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.analysis = analysis;
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.a_bits {
            cfg.partition_a_bits = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.shots {
            cfg.shots = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.condition_b.is_some() {
            cfg.condition_b = self.condition_b;
        }
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if self.samples.is_some() {
            cfg.samples = self.samples;
        }
        cfg.out_dir = self.out_dir.unwrap_or_else(|| {
            if self.config.is_some() {
                cfg.out_dir.clone()
            } else {
                default_out_dir()
            }
        });
        Ok(cfg)
    }
}

#[derive(Args)]
struct LawArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Total qubits (N = 2^n).
    #[arg(long, default_value_t = 12)]
    n: u32,
    /// Qubits in subsystem A (M = 2^m); defaults to n.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Tabulate in raw probability instead of the scaled variable.
    #[arg(long)]
    raw: bool,
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    FullBeta,
    SubsystemBeta,
    ExpLimit,
    GammaLimit,
    ConditionalBeta,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Sample(o) => sample(o.resolve(Analysis::Xeb)?),
        Command::Analyze {
            analysis,
            overrides,
        } => {
            let analysis = match analysis {
                AnalyzeKind::Full => Analysis::Full,
                AnalyzeKind::Subsystem => Analysis::Subsystem,
                AnalyzeKind::Conditional => Analysis::Conditional,
            };
            report(overrides.resolve(analysis)?)
        }
        Command::Xeb {
            samples_file,
            ideal,
            overrides,
        } => {
            let cfg = overrides.resolve(Analysis::Xeb)?;
            match (samples_file, ideal) {
                (Some(s), Some(i)) => score_files(&cfg, s, i),
                _ => report(cfg),
            }
        }
        Command::Gap(o) => report(o.resolve(Analysis::Gap)?),
        Command::Laws(args) => laws(args),
    }
}

fn report(cfg: ExperimentConfig) -> Result<bool, Error> {
    let summary = run_experiment(&cfg)?;
    for c in &summary.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    for x in &summary.xeb {
        println!(
            "xeb {}: F = {:.6} +/- {:.6} (expected {})",
            x.label,
            x.result.fidelity,
            x.result.std_error,
            x.expected.map_or("-".to_string(), |e| format!("{e:.6}"))
        );
    }
    if let Some(g) = &summary.gap {
        println!(
            "lambda_hat_gap = {:.6}, lambda_hat_moment = {:.6}",
            g.lambda_hat_gap, g.lambda_hat_moment
        );
    }
    println!(
        "summary written to {}",
        cfg.out_dir.join("summary.json").display()
    );
    Ok(summary.passed)
}

fn sample(cfg: ExperimentConfig) -> Result<bool, Error> {
    cfg.validate()?;
    let spec = RngSpec::new(cfg.seed, 0);
    let ideal = probabilities(&sample_haar_state(cfg.n, spec)?);
    let noisy = depolarize(&ideal, cfg.lambda)?;
    let mut set = draw_samples(&noisy, cfg.shots, spec.substream(1))?;
    set.meta.lambda_claim = Some(cfg.lambda);
    if !cfg.partition_a_bits.is_empty() {
        set.meta.partition = Some(cfg.partition()?);
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
        path: cfg.out_dir.clone(),
        source: e,
    })?;
    let samples_path = cfg.out_dir.join("samples.json");
    write_samples(&set, &samples_path)?;
    let ideal_path = cfg.out_dir.join("ideal.json");
    let text = serde_json::to_string(&ideal).expect("probability vector serializes");
    fs::write(&ideal_path, text).map_err(|e| Error::Io {
        path: ideal_path.clone(),
        source: e,
    })?;
    println!(
        "wrote {} shots to {} and the ideal vector to {}",
        set.total(),
        samples_path.display(),
        ideal_path.display()
    );
    Ok(true)
}

fn score_files(cfg: &ExperimentConfig, samples: PathBuf, ideal: PathBuf) -> Result<bool, Error> {
    let set = read_samples(&samples)?;
    let text = fs::read_to_string(&ideal).map_err(|e| Error::Io {
        path: ideal.clone(),
        source: e,
    })?;
    let raw: ProbVector = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let ideal = ProbVector::new(raw.into_vec())?;
    let full = xeb_full(&set, &ideal)?;
    println!("full: F = {:.6} +/- {:.6}", full.fidelity, full.std_error);
    let part = match (&set.meta.partition, cfg.partition_a_bits.is_empty()) {
        (_, false) => Partition::new(set.n(), cfg.partition_a_bits.clone())?,
        (Some(p), true) => p.clone(),
        (None, true) => Partition::leading(set.n(), set.n())?,
    };
    if part.k() > 0 {
        let sub = xeb_subsystem(&set, &ideal, &part)?;
        println!(
            "subsystem: F = {:.6} +/- {:.6}",
            sub.fidelity, sub.std_error
        );
        let report = xeb_conditional_all(&set, &ideal, &part, DEFAULT_MIN_POSTSELECTED)?;
        for (b, y, r) in &report.per_b {
            match r {
                Some(r) => println!(
                    "conditional b={b}: yield {y}, F = {:.6} +/- {:.6}",
                    r.fidelity, r.std_error
                ),
                None => println!("conditional b={b}: yield {y}, too few shots"),
            }
        }
        if let Some(w) = report.weighted {
            println!(
                "conditional weighted: F = {:.6} +/- {:.6}",
                w.fidelity, w.std_error
            );
        }
    }
    Ok(true)
}

fn laws(args: LawArgs) -> Result<bool, Error> {
    let m = args.m.unwrap_or(args.n);
    if args.n == 0 || args.n > 62 || m == 0 || m > args.n {
        return Err(Error::Argument(format!(
            "need 1 <= m <= n <= 62, got n={}, m={m}",
            args.n
        )));
    }
    let dim_full = 1u64 << args.n;
    let dim_a = 1u64 << m;
    let law = match args.family {
        FamilyArg::FullBeta => AnalyticLaw::full_beta(dim_full)?,
        FamilyArg::SubsystemBeta => AnalyticLaw::subsystem_beta(dim_full, dim_a)?,
        FamilyArg::ExpLimit => AnalyticLaw::exp_limit(dim_full)?,
        FamilyArg::GammaLimit => AnalyticLaw::gamma_limit(dim_a, dim_full / dim_a)?,
        FamilyArg::ConditionalBeta => AnalyticLaw::conditional_beta(dim_a)?,
    }
    .with_lambda(args.lambda)?
    .with_scaled(!args.raw);

    let (support_lo, support_hi) = law.support();
    let lo = args.lo.unwrap_or(0.0);
    let hi = args.hi.unwrap_or_else(|| {
        let (mean, var) = law.moments();
        (mean + 10.0 * var.sqrt()).min(support_hi).max(support_lo)
    });
    let points = args.points.max(2);
    let mut out = String::from("x,pdf,cdf\n");
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let _ = writeln!(out, "{:.11e},{:.11e},{:.11e}", x, law.pdf(x), law.cdf(x));
    }
    match args.out {
        Some(path) => fs::write(&path, out).map_err(|e| Error::Io { path, source: e })?,
        None => print!("{out}"),
    }
    Ok(true)
}

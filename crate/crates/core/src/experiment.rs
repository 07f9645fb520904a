//! Experiment configuration and the trial orchestrator behind the CLI.
//!
//! A run draws `trials` Haar states, applies depolarizing noise, pools the
//! requested statistic over all trials and compares it with the matching
//! analytic law. Trial `t` draws its state from `RngSpec(seed, t)` and its
//! shots from substreams of that spec, so outputs do not depend on the
//! thread count. Files are written only after all trials are merged.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_samples, write_histogram_csv};
use crate::laws::AnalyticLaw;
use crate::marginals::{
    conditional_slice, marginalize, noisy_conditional_affine, noisy_conditional_exact, Partition,
};
use crate::rng::RngSpec;
use crate::state::{depolarize, probabilities, sample_haar_state, BitStringProbs, ProbVector};
use crate::stats::{
    default_scaled_range, estimate_gap, estimate_lambda_mean, histogram, ks_one_sample, GofReport,
};
use crate::xeb::{
    accumulate_conditional, accumulate_full, accumulate_subsystem, draw_samples, XebAccumulator,
    XebKind, XebResult,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "HAARSTAT_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Full,
    Subsystem,
    Conditional,
    Xeb,
    Gap,
}

impl Analysis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Analysis::Full => "full",
            Analysis::Subsystem => "subsystem",
            Analysis::Conditional => "conditional",
            Analysis::Xeb => "xeb",
            Analysis::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: u32,
    /// Qubits of subsystem A; empty means all qubits.
    pub partition_a_bits: Vec<u32>,
    pub lambda: f64,
    pub trials: u64,
    /// Shots per trial for the XEB analysis.
    pub shots: u64,
    pub seed: u64,
    pub analysis: Analysis,
    pub condition_b: Option<usize>,
    pub bins: usize,
    /// Not echoed into summaries, so reruns in different directories
    /// produce identical documents.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    /// Analyze an observed sample file instead of simulated states.
    pub samples: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 12,
            partition_a_bits: Vec::new(),
            lambda: 0.0,
            trials: 100,
            shots: 10_000,
            seed: 0,
            analysis: Analysis::Full,
            condition_b: None,
            bins: 50,
            out_dir: default_out_dir(),
            samples: None,
        }
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("haarstat-out"))
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn partition(&self) -> Result<Partition> {
        if self.partition_a_bits.is_empty() {
            Partition::leading(self.n, self.n)
        } else {
            Partition::new(self.n, self.partition_a_bits.clone())
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::state::DEFAULT_MAX_QUBITS {
            return Err(Error::arg(format!(
                "n must lie in 1..={}, got {}",
                crate::state::DEFAULT_MAX_QUBITS,
                self.n
            )));
        }
        let part = self.partition()?;
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::arg(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.trials == 0 {
            return Err(Error::arg("trials must be >= 1"));
        }
        if self.bins == 0 {
            return Err(Error::arg("bins must be >= 1"));
        }
        if self.analysis == Analysis::Xeb && self.shots == 0 {
            return Err(Error::arg("shots must be >= 1"));
        }
        if let Some(b) = self.condition_b {
            if b >= part.dim_b() {
                return Err(Error::arg(format!(
                    "condition_b = {b} outside 0..{}",
                    part.dim_b()
                )));
            }
        }
        let needs_split = matches!(self.analysis, Analysis::Subsystem | Analysis::Conditional);
        if needs_split && part.k() == 0 {
            return Err(Error::arg(format!(
                "{} analysis needs a proper subsystem; set partition_a_bits",
                self.analysis.as_str()
            )));
        }
        if self.samples.is_some()
            && !matches!(
                self.analysis,
                Analysis::Full | Analysis::Subsystem | Analysis::Conditional
            )
        {
            return Err(Error::arg(
                "sample files can only be analyzed with full, subsystem or conditional",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub name: String,
    pub dim_full: u64,
    pub dim_a: u64,
    pub dim_b: u64,
    pub lambda: f64,
    pub mean: f64,
    pub variance: f64,
}

impl From<&AnalyticLaw> for LawSummary {
    fn from(law: &AnalyticLaw) -> Self {
        let (mean, variance) = law.moments();
        LawSummary {
            name: law.name().to_string(),
            dim_full: law.dim_full(),
            dim_a: law.dim_a(),
            dim_b: law.dim_b(),
            lambda: law.lambda(),
            mean,
            variance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub lambda_hat_gap: f64,
    pub lambda_hat_moment: f64,
    /// Scaled values strictly below lambda.
    pub floor_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledXeb {
    pub label: String,
    /// Ensemble expectation of the estimator, when one is known.
    pub expected: Option<f64>,
    pub result: XebResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Structured record of one run, written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub analysis: Analysis,
    pub config: ExperimentConfig,
    pub n_values: u64,
    pub law: Option<LawSummary>,
    pub gof: Option<GofReport>,
    pub histogram_csv: Option<String>,
    pub gap: Option<GapSummary>,
    /// Mean |exact - affine| over noisy conditional components.
    pub affine_gap: Option<f64>,
    pub xeb: Vec<LabeledXeb>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Summary {
    fn new(cfg: &ExperimentConfig) -> Self {
        Summary {
            schema_version: SCHEMA_VERSION,
            analysis: cfg.analysis,
            config: cfg.clone(),
            n_values: 0,
            law: None,
            gof: None,
            histogram_csv: None,
            gap: None,
            affine_gap: None,
            xeb: Vec::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Pooled scaled values from one trial, in a fixed order.
struct TrialValues {
    values: Vec<f64>,
    /// Sum of |exact - affine| over noisy conditional components.
    affine_abs_gap: f64,
}

/// Runs the configured analysis and writes its outputs to `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    let summary = match (cfg.analysis, &cfg.samples) {
        (Analysis::Xeb, _) => run_xeb(cfg)?,
        (_, Some(path)) => run_observed(cfg, path)?,
        _ => run_distribution(cfg)?,
    };
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let path = cfg.out_dir.join("summary.json");
    fs::write(&path, summary.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

/// The law the pooled statistic of `analysis` should follow.
pub fn law_for(analysis: Analysis, part: &Partition, lambda: f64) -> Result<AnalyticLaw> {
    let n_full = part.dim_full() as u64;
    let law = match analysis {
        Analysis::Full | Analysis::Gap | Analysis::Xeb => AnalyticLaw::full_beta(n_full)?,
        Analysis::Subsystem => AnalyticLaw::subsystem_beta(n_full, part.dim_a() as u64)?,
        Analysis::Conditional => AnalyticLaw::conditional_beta(part.dim_a() as u64)?,
    };
    if lambda < 1.0 {
        law.with_lambda(lambda)
    } else {
        // Point mass at x = 1; callers check that case separately.
        Ok(law)
    }
}

fn trial_values(cfg: &ExperimentConfig, part: &Partition, trial: u64) -> Result<TrialValues> {
    let ideal = probabilities(&sample_haar_state(cfg.n, RngSpec::new(cfg.seed, trial))?);
    let noisy = depolarize(&ideal, cfg.lambda)?;
    let mut affine_abs_gap = 0.0;
    let values = match cfg.analysis {
        Analysis::Full | Analysis::Gap => {
            let dim = noisy.dim() as f64;
            noisy.probs().iter().map(|p| p * dim).collect()
        }
        Analysis::Subsystem => {
            let m = part.dim_a() as f64;
            marginalize(&noisy, part)?
                .into_iter()
                .map(|p| p * m)
                .collect()
        }
        Analysis::Conditional => {
            let b = cfg.condition_b.unwrap_or(0);
            let m = part.dim_a() as f64;
            let exact = noisy_conditional_exact(&noisy, part, b)?;
            if cfg.lambda > 0.0 {
                let ideal_slice = conditional_slice(&ideal, part, b)?;
                let approx = noisy_conditional_affine(&ideal_slice, cfg.lambda)?;
                affine_abs_gap = exact
                    .cond_probs
                    .iter()
                    .zip(&approx)
                    .map(|(e, a)| (e - a).abs())
                    .sum();
            }
            exact.cond_probs.into_iter().map(|p| p * m).collect()
        }
        Analysis::Xeb => unreachable!("xeb runs through run_xeb"),
    };
    Ok(TrialValues {
        values,
        affine_abs_gap,
    })
}

fn run_distribution(cfg: &ExperimentConfig) -> Result<Summary> {
    let part = cfg.partition()?;
    let per_trial: Vec<TrialValues> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial_values(cfg, &part, t))
        .collect::<Result<_>>()?;
    let affine_total: f64 = per_trial.iter().map(|t| t.affine_abs_gap).sum();
    let values: Vec<f64> = per_trial.into_iter().flat_map(|t| t.values).collect();

    let mut summary = Summary::new(cfg);
    summary.n_values = values.len() as u64;
    write_figure(cfg, &values, &mut summary)?;

    if cfg.lambda >= 1.0 {
        let off = values.iter().filter(|&&x| (x - 1.0).abs() > 1e-9).count();
        summary.check(
            "point_mass",
            off == 0,
            format!("{off} scaled values differ from 1 under full depolarization"),
        );
        return Ok(summary);
    }

    let law = law_for(cfg.analysis, &part, cfg.lambda)?;
    let gof = ks_one_sample(&values, &law)?;
    summary.law = Some(LawSummary::from(&law));
    summary.gof = Some(gof);

    match cfg.analysis {
        Analysis::Conditional if cfg.lambda > 0.0 => {
            // The noisy conditional law is an approximation; the KS result
            // is reported but not asserted.
            summary.affine_gap = Some(affine_total / values.len() as f64);
        }
        _ => summary.check(
            "ks_1pct",
            gof.passed,
            format!(
                "D = {:.6e} vs critical {:.6e} against {}",
                gof.ks_statistic,
                gof.ks_critical_1pct,
                law.name()
            ),
        ),
    }

    if cfg.analysis == Analysis::Subsystem || cfg.analysis == Analysis::Gap {
        let (lo, hi) = law.support();
        let outside = values.iter().filter(|&&x| x < lo || x > hi).count();
        summary.check(
            "support",
            outside == 0,
            format!("{outside} values outside [{lo}, {hi}]"),
        );
    }

    if cfg.analysis == Analysis::Gap {
        let lambda_hat_gap = estimate_gap(&values)?;
        let shape = (part.dim_full() as u64, part.dim_full() as u64, 1);
        let lambda_hat_moment = estimate_lambda_mean(&values, shape)?;
        let floor_violations = values.iter().filter(|&&x| x < cfg.lambda).count() as u64;
        summary.check(
            "gap_floor",
            floor_violations == 0 && lambda_hat_gap >= cfg.lambda,
            format!("min scaled value {lambda_hat_gap} vs lambda {}", cfg.lambda),
        );
        summary.gap = Some(GapSummary {
            lambda_hat_gap,
            lambda_hat_moment,
            floor_violations,
        });
    }
    Ok(summary)
}

/// Statistics of an observed sample file, using relative frequencies as
/// probabilities. Nothing is asserted: hardware data need not follow any
/// of the laws.
fn run_observed(cfg: &ExperimentConfig, path: &Path) -> Result<Summary> {
    let samples = read_samples(path)?;
    if samples.n() != cfg.n {
        return Err(Error::Format(format!(
            "sample file is over {} qubits but n = {}",
            samples.n(),
            cfg.n
        )));
    }
    let part = cfg.partition()?;
    let empirical = samples.empirical_probs()?;
    let values: Vec<f64> = match cfg.analysis {
        Analysis::Full => {
            let dim = empirical.dim() as f64;
            empirical.probs().iter().map(|p| p * dim).collect()
        }
        Analysis::Subsystem => {
            let m = part.dim_a() as f64;
            marginalize(&empirical, &part)?
                .into_iter()
                .map(|p| p * m)
                .collect()
        }
        Analysis::Conditional => {
            let m = part.dim_a() as f64;
            let slice = conditional_slice(&empirical, &part, cfg.condition_b.unwrap_or(0))?;
            slice.cond_probs.into_iter().map(|p| p * m).collect()
        }
        Analysis::Xeb | Analysis::Gap => unreachable!("rejected by validate"),
    };
    let mut summary = Summary::new(cfg);
    summary.n_values = values.len() as u64;
    write_figure(cfg, &values, &mut summary)?;
    if cfg.lambda < 1.0 {
        let law = law_for(cfg.analysis, &part, cfg.lambda)?;
        summary.gof = Some(ks_one_sample(&values, &law)?);
        summary.law = Some(LawSummary::from(&law));
    }
    Ok(summary)
}

fn write_figure(cfg: &ExperimentConfig, values: &[f64], summary: &mut Summary) -> Result<()> {
    let hist = histogram(values, cfg.bins, default_scaled_range(cfg.lambda))?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let name = format!("{}_histogram.csv", cfg.analysis.as_str());
    write_histogram_csv(&hist, cfg.out_dir.join(&name))?;
    summary.histogram_csv = Some(name);
    Ok(())
}

/// Per-trial XEB accumulators, merged in trial order afterwards.
struct XebTrial {
    noisy_full: XebAccumulator,
    noisy_sub: Option<XebAccumulator>,
    noisy_cond: Option<XebAccumulator>,
    uniform_full: XebAccumulator,
    uniform_cond: Option<XebAccumulator>,
}

fn xeb_trial(cfg: &ExperimentConfig, part: &Partition, trial: u64) -> Result<XebTrial> {
    let spec = RngSpec::new(cfg.seed, trial);
    let ideal = probabilities(&sample_haar_state(cfg.n, spec)?);
    let noisy = depolarize(&ideal, cfg.lambda)?;
    let shots = draw_samples(&noisy, cfg.shots, spec.substream(1))?;
    let uniform = draw_samples(&ProbVector::uniform(cfg.n)?, cfg.shots, spec.substream(2))?;
    let proper = part.k() > 0;
    let b = cfg.condition_b.unwrap_or(0);
    Ok(XebTrial {
        noisy_full: accumulate_full(&shots, &ideal)?,
        noisy_sub: proper
            .then(|| accumulate_subsystem(&shots, &ideal, part))
            .transpose()?,
        noisy_cond: proper
            .then(|| accumulate_conditional(&shots, &ideal, part, b))
            .transpose()?,
        uniform_full: accumulate_full(&uniform, &ideal)?,
        uniform_cond: proper
            .then(|| accumulate_conditional(&uniform, &ideal, part, b))
            .transpose()?,
    })
}

fn run_xeb(cfg: &ExperimentConfig) -> Result<Summary> {
    let part = cfg.partition()?;
    let trials: Vec<XebTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| xeb_trial(cfg, &part, t))
        .collect::<Result<_>>()?;

    let merge = |pick: &dyn Fn(&XebTrial) -> Option<XebAccumulator>, kind, m| {
        let mut acc = XebAccumulator::new(kind, m);
        for t in &trials {
            if let Some(a) = pick(t) {
                acc.merge(&a);
            }
        }
        acc
    };
    let n = cfg.n;
    let m = part.m();
    let dim_n = part.dim_full() as f64;
    let dim_m = part.dim_a() as f64;
    let keep = 1.0 - cfg.lambda;

    let mut summary = Summary::new(cfg);
    let mut record = |label: &str, expected: Option<f64>, acc: XebAccumulator| {
        summary.xeb.push(LabeledXeb {
            label: label.to_string(),
            expected,
            result: acc.result(),
        })
    };

    let uniform_full = merge(&|t| Some(t.uniform_full), XebKind::Full, n);
    record("uniform_full", Some(0.0), uniform_full);
    record(
        "noisy_full",
        Some(keep * (dim_n - 1.0) / (dim_n + 1.0)),
        merge(&|t| Some(t.noisy_full), XebKind::Full, n),
    );
    if part.k() > 0 {
        record(
            "noisy_subsystem",
            Some(keep * (dim_m - 1.0) / (dim_n + 1.0)),
            merge(&|t| t.noisy_sub, XebKind::Subsystem, m),
        );
        let cond = merge(&|t| t.noisy_cond, XebKind::Conditional, m);
        // Exact without noise; with noise this relies on the affine
        // approximation of the noisy slice.
        record(
            "noisy_conditional",
            Some(keep * (dim_m - 1.0) / (dim_m + 1.0)),
            cond,
        );
        record(
            "uniform_conditional",
            Some(0.0),
            merge(&|t| t.uniform_cond, XebKind::Conditional, m),
        );
    }

    for entry in summary.xeb.clone() {
        if !entry.label.starts_with("uniform") {
            continue;
        }
        let r = entry.result;
        summary.check(
            &format!("{}_baseline", entry.label),
            r.fidelity.abs() <= 3.0 * r.std_error,
            format!("F = {:.6e} +/- {:.3e}", r.fidelity, r.std_error),
        );
    }
    summary.n_values = cfg.trials * cfg.shots;
    Ok(summary)
}

//! Bit-string sampling and linear cross-entropy benchmarking.
//!
//! All three estimators have the form `F = D * <q(x_i)> - 1`, where `q` is an
//! ideal probability (full, marginal, or conditional) evaluated on each shot
//! and `D` is the dimension of the space `q` lives on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::{conditional_slice, marginalize, Partition};
use crate::rng::{RngSpec, StreamRng};
use crate::state::{BitStringProbs, ProbVector};

/// Minimum number of post-selected shots for a conditional estimate.
pub const DEFAULT_MIN_POSTSELECTED: u64 = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub seed: Option<u64>,
    pub lambda_claim: Option<f64>,
    pub partition: Option<Partition>,
}

/// Multiset of observed bit strings, keyed by full index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    n: u32,
    counts: BTreeMap<u64, u64>,
    total: u64,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::arg(format!("qubit count {n} out of range")));
        }
        Ok(SampleSet {
            n,
            counts: BTreeMap::new(),
            total: 0,
            meta: SampleMeta::default(),
        })
    }

    /// Builds a set from `(index, count)` pairs; zero counts are dropped and
    /// repeated indices are merged.
    pub fn from_counts(n: u32, counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut set = Self::new(n)?;
        for (j, c) in counts {
            set.add(j, c)?;
        }
        Ok(set)
    }

    pub fn add(&mut self, index: u64, count: u64) -> Result<()> {
        if index >> self.n != 0 {
            return Err(Error::arg(format!(
                "bit string index {index} does not fit in {} qubits",
                self.n
            )));
        }
        if count > 0 {
            *self.counts.entry(index).or_insert(0) += count;
            self.total += count;
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, index: u64) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Relative frequencies as a probability vector over all 2^n strings.
    pub fn empirical_probs(&self) -> Result<ProbVector> {
        if self.total == 0 {
            return Err(Error::arg("empirical distribution of an empty sample set"));
        }
        if self.n > crate::state::MAX_DIRICHLET_QUBITS {
            return Err(Error::Capacity(format!(
                "empirical vector over {} qubits is too large",
                self.n
            )));
        }
        let mut probs = vec![0.0; 1usize << self.n];
        let total = self.total as f64;
        for (&j, &c) in &self.counts {
            probs[j as usize] = c as f64 / total;
        }
        ProbVector::new(probs)
    }

    /// Shot counts per B-outcome; they sum to `total`.
    pub fn postselection_yields(&self, part: &Partition) -> Result<Vec<u64>> {
        self.check_qubits(part.n())?;
        let mut yields = vec![0u64; part.dim_b()];
        for (&j, &c) in &self.counts {
            yields[part.split(j as usize).1] += c;
        }
        Ok(yields)
    }

    fn check_qubits(&self, n: u32) -> Result<()> {
        if self.n != n {
            return Err(Error::arg(format!(
                "sample set is over {} qubits, reference over {n}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over a fixed probability vector.
#[derive(Debug, Clone)]
pub struct CategoricalSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl CategoricalSampler {
    pub fn new(probs: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = probs
            .iter()
            .rposition(|&p| p > 0.0)
            .ok_or_else(|| Error::arg("cannot sample from an all-zero vector"))?;
        Ok(CategoricalSampler {
            cumulative,
            last_positive,
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut StreamRng) -> usize {
        let total = self.cumulative[self.cumulative.len() - 1];
        let u = rng.uniform() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.last_positive)
    }
}

/// Draws `shots` i.i.d. bit strings from `p`.
pub fn draw_samples<P: BitStringProbs + ?Sized>(
    p: &P,
    shots: u64,
    rng: RngSpec,
) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::arg("shots must be >= 1"));
    }
    let sampler = CategoricalSampler::new(p.probs())?;
    let mut stream = rng.rng();
    let mut set = SampleSet::new(p.n_qubits())?;
    for _ in 0..shots {
        set.add(sampler.sample(&mut stream) as u64, 1)?;
    }
    set.meta.seed = Some(rng.master_seed);
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XebKind {
    Full,
    Subsystem,
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XebResult {
    pub fidelity: f64,
    pub std_error: f64,
    pub kind: XebKind,
    /// The estimator's prefactor is `2^m_eff`.
    pub m_eff: u32,
    pub shots: u64,
}

/// Running mean and variance of the per-shot ideal probability.
///
/// Accumulators from several trials merge in a fixed order, so pooled
/// ensemble estimates are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XebAccumulator {
    kind: XebKind,
    m_eff: u32,
    shots: u64,
    mean: f64,
    m2: f64,
}

impl XebAccumulator {
    pub fn new(kind: XebKind, m_eff: u32) -> Self {
        XebAccumulator {
            kind,
            m_eff,
            shots: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    /// Records `count` shots whose ideal probability is `value`.
    pub fn push(&mut self, value: f64, count: u64) {
        if count == 0 {
            return;
        }
        let n = self.shots as f64;
        let c = count as f64;
        let total = n + c;
        let delta = value - self.mean;
        self.mean += delta * c / total;
        self.m2 += delta * delta * n * c / total;
        self.shots += count;
    }

    pub fn merge(&mut self, other: &XebAccumulator) {
        if other.shots == 0 {
            return;
        }
        let (n, c) = (self.shots as f64, other.shots as f64);
        let total = n + c;
        let delta = other.mean - self.mean;
        self.mean += delta * c / total;
        self.m2 += other.m2 + delta * delta * n * c / total;
        self.shots += other.shots;
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn result(&self) -> XebResult {
        let dim = (1u64 << self.m_eff) as f64;
        let sd = if self.shots > 1 {
            (self.m2 / (self.shots - 1) as f64).sqrt()
        } else {
            0.0
        };
        XebResult {
            fidelity: dim * self.mean - 1.0,
            std_error: dim * sd / (self.shots.max(1) as f64).sqrt(),
            kind: self.kind,
            m_eff: self.m_eff,
            shots: self.shots,
        }
    }
}

/// Full-system accumulator, for pooling over trials.
pub fn accumulate_full(samples: &SampleSet, ideal: &ProbVector) -> Result<XebAccumulator> {
    samples.check_qubits(ideal.n_qubits())?;
    let probs = ideal.probs();
    let mut acc = XebAccumulator::new(XebKind::Full, ideal.n_qubits());
    for (&j, &c) in samples.counts() {
        acc.push(probs[j as usize], c);
    }
    Ok(acc)
}

/// Subsystem accumulator: each shot scores the ideal marginal of its
/// A-substring.
pub fn accumulate_subsystem(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
) -> Result<XebAccumulator> {
    samples.check_qubits(ideal.n_qubits())?;
    let marginal = marginalize(ideal, part)?;
    let mut acc = XebAccumulator::new(XebKind::Subsystem, part.m());
    for (&j, &c) in samples.counts() {
        acc.push(marginal[part.split(j as usize).0], c);
    }
    Ok(acc)
}

/// Conditional accumulator over the shots whose B-substring equals `b`.
/// No minimum is enforced here.
pub fn accumulate_conditional(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
    b: usize,
) -> Result<XebAccumulator> {
    samples.check_qubits(ideal.n_qubits())?;
    let slice = conditional_slice(ideal, part, b)?;
    let mut acc = XebAccumulator::new(XebKind::Conditional, part.m());
    for (&j, &c) in samples.counts() {
        let (y, z) = part.split(j as usize);
        if z == b {
            acc.push(slice.cond_probs[y], c);
        }
    }
    Ok(acc)
}

/// `F = 2^n <p_ideal(x_i)> - 1`.
pub fn xeb_full(samples: &SampleSet, ideal: &ProbVector) -> Result<XebResult> {
    Ok(accumulate_full(samples, ideal)?.result())
}

/// `F = 2^m <p_A(y_i)> - 1` with `p_A` the ideal marginal on A.
pub fn xeb_subsystem(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
) -> Result<XebResult> {
    Ok(accumulate_subsystem(samples, ideal, part)?.result())
}

/// `F = 2^m <p(y_i|b)> - 1` over post-selected shots, requiring at least
/// [`DEFAULT_MIN_POSTSELECTED`] of them.
pub fn xeb_conditional(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
    b: usize,
) -> Result<XebResult> {
    xeb_conditional_min(samples, ideal, part, b, DEFAULT_MIN_POSTSELECTED)
}

pub fn xeb_conditional_min(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
    b: usize,
    min_shots: u64,
) -> Result<XebResult> {
    let acc = accumulate_conditional(samples, ideal, part, b)?;
    if acc.shots() < min_shots {
        return Err(Error::InsufficientSamples {
            b: b as u64,
            found: acc.shots(),
            required: min_shots,
            yield_fraction: acc.shots() as f64 / samples.total().max(1) as f64,
        });
    }
    Ok(acc.result())
}

/// Per-outcome conditional estimates plus their yield-weighted combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalXebReport {
    /// `(b, yield, estimate)`; the estimate is absent below the shot minimum.
    pub per_b: Vec<(usize, u64, Option<XebResult>)>,
    /// Pooled over every post-selected shot of every reported `b`, which is
    /// the yield-weighted mean of the per-outcome fidelities.
    pub weighted: Option<XebResult>,
}

pub fn xeb_conditional_all(
    samples: &SampleSet,
    ideal: &ProbVector,
    part: &Partition,
    min_shots: u64,
) -> Result<ConditionalXebReport> {
    let yields = samples.postselection_yields(part)?;
    let mut pooled = XebAccumulator::new(XebKind::Conditional, part.m());
    let mut per_b = Vec::with_capacity(yields.len());
    for (b, &y) in yields.iter().enumerate() {
        if y < min_shots {
            per_b.push((b, y, None));
            continue;
        }
        let acc = accumulate_conditional(samples, ideal, part, b)?;
        pooled.merge(&acc);
        per_b.push((b, y, Some(acc.result())));
    }
    let weighted = (pooled.shots() > 0).then(|| pooled.result());
    Ok(ConditionalXebReport { per_b, weighted })
}

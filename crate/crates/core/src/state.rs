//! Haar-random pure states and their bit-string probability vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSpec;

/// Largest state vector [`sample_haar_state`] will allocate (2^24 amplitudes).
pub const DEFAULT_MAX_QUBITS: u32 = 24;

/// Largest dimension exponent [`sample_flat_dirichlet`] accepts.
pub const MAX_DIRICHLET_QUBITS: u32 = 28;

/// Normalization switches to compensated summation from this length on.
const COMPENSATED_SUM_LEN: usize = 1 << 20;

/// Tolerance for accepting externally supplied probability vectors.
const INPUT_SUM_TOL: f64 = 1e-10;

/// Pure state on `n_qubits` qubits in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes after checking length and normalization.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = dimension_exponent(amplitudes.len())?;
        let norm = sum(amplitudes.iter().map(|c| c.norm_sqr()), amplitudes.len());
        if (norm - 1.0).abs() > INPUT_SUM_TOL {
            return Err(Error::arg(format!("state norm is {norm}, expected 1")));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Read access shared by ideal and depolarized probability vectors.
pub trait BitStringProbs {
    fn n_qubits(&self) -> u32;
    fn probs(&self) -> &[f64];

    fn dim(&self) -> usize {
        self.probs().len()
    }
}

/// Normalized probability vector over the 2^n bit strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    n_qubits: u32,
    probs: Vec<f64>,
}

impl ProbVector {
    /// Validates nonnegativity and unit sum of an explicit vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let n_qubits = dimension_exponent(probs.len())?;
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::arg(format!("probability {i} is {p}")));
        }
        let total = sum(probs.iter().copied(), probs.len());
        if (total - 1.0).abs() > INPUT_SUM_TOL {
            return Err(Error::arg(format!("probabilities sum to {total}")));
        }
        Ok(ProbVector { n_qubits, probs })
    }

    /// Uniform vector on n qubits.
    pub fn uniform(n_qubits: u32) -> Result<Self> {
        check_dirichlet_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(ProbVector {
            n_qubits,
            probs: vec![1.0 / dim as f64; dim],
        })
    }

    /// Normalizes nonnegative weights; used by the generators.
    fn from_weights(n_qubits: u32, mut weights: Vec<f64>) -> Self {
        let total = sum(weights.iter().copied(), weights.len());
        let inv = 1.0 / total;
        for w in weights.iter_mut() {
            *w *= inv;
        }
        ProbVector {
            n_qubits,
            probs: weights,
        }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl BitStringProbs for ProbVector {
    fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Ideal vector mixed with the uniform one: `(1 - lambda) p + lambda / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepolarizedProbVector {
    base: ProbVector,
    lambda: f64,
    probs: Vec<f64>,
}

impl DepolarizedProbVector {
    pub fn base(&self) -> &ProbVector {
        &self.base
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The noisy vector as a plain probability vector.
    pub fn to_prob_vector(&self) -> ProbVector {
        ProbVector {
            n_qubits: self.base.n_qubits,
            probs: self.probs.clone(),
        }
    }
}

impl BitStringProbs for DepolarizedProbVector {
    fn n_qubits(&self) -> u32 {
        self.base.n_qubits
    }

    fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Draws a Haar-random n-qubit state, refusing more than
/// [`DEFAULT_MAX_QUBITS`] qubits.
pub fn sample_haar_state(n: u32, rng: RngSpec) -> Result<StateVector> {
    sample_haar_state_capped(n, rng, DEFAULT_MAX_QUBITS)
}

/// [`sample_haar_state`] with an explicit qubit cap.
///
/// Amplitudes are i.i.d. complex normals whose real and imaginary parts have
/// variance 1/2, so each |z|^2 is a rate-one exponential, then normalized.
pub fn sample_haar_state_capped(n: u32, rng: RngSpec, max_qubits: u32) -> Result<StateVector> {
    if n == 0 || n > max_qubits {
        return Err(Error::Capacity(format!(
            "state on {n} qubits requested; supported range is 1..={max_qubits}"
        )));
    }
    let dim = 1usize << n;
    let mut stream = rng.rng();
    let mut amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re = stream.standard_normal() * std::f64::consts::FRAC_1_SQRT_2;
            let im = stream.standard_normal() * std::f64::consts::FRAC_1_SQRT_2;
            Complex64::new(re, im)
        })
        .collect();
    let norm = sum(amplitudes.iter().map(|c| c.norm_sqr()), dim).sqrt();
    let inv = 1.0 / norm;
    for c in amplitudes.iter_mut() {
        *c *= inv;
    }
    Ok(StateVector {
        n_qubits: n,
        amplitudes,
    })
}

/// Born-rule probabilities `|c_i|^2`.
pub fn probabilities(state: &StateVector) -> ProbVector {
    let weights = state.amplitudes.iter().map(|c| c.norm_sqr()).collect();
    // Renormalizing absorbs the rounding left over from the amplitude scaling.
    ProbVector::from_weights(state.n_qubits, weights)
}

/// Flat Dirichlet draw of dimension `dim`, built from standard exponentials.
/// Same law as `probabilities(sample_haar_state(log2 dim))` with a single
/// real array.
pub fn sample_flat_dirichlet(dim: usize, rng: RngSpec) -> Result<ProbVector> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::arg(format!(
            "Dirichlet dimension must be a power of two >= 2, got {dim}"
        )));
    }
    let n_qubits = dim.trailing_zeros();
    check_dirichlet_size(n_qubits)?;
    let mut stream = rng.rng();
    let weights = (0..dim).map(|_| stream.standard_exponential()).collect();
    Ok(ProbVector::from_weights(n_qubits, weights))
}

/// Applies global depolarizing noise of strength `lambda` in [0, 1].
pub fn depolarize(p: &ProbVector, lambda: f64) -> Result<DepolarizedProbVector> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::arg(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let floor = lambda / p.dim() as f64;
    let keep = 1.0 - lambda;
    let probs = p.probs.iter().map(|&q| keep * q + floor).collect();
    Ok(DepolarizedProbVector {
        base: p.clone(),
        lambda,
        probs,
    })
}

fn check_dirichlet_size(n_qubits: u32) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DIRICHLET_QUBITS {
        return Err(Error::Capacity(format!(
            "dimension 2^{n_qubits} outside supported range 2^1..=2^{MAX_DIRICHLET_QUBITS}"
        )));
    }
    Ok(())
}

fn dimension_exponent(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::arg(format!(
            "vector length must be a power of two >= 2, got {len}"
        )));
    }
    Ok(len.trailing_zeros())
}

/// Plain summation for short vectors, Neumaier summation for long ones.
pub(crate) fn sum(values: impl Iterator<Item = f64>, len: usize) -> f64 {
    if len < COMPENSATED_SUM_LEN {
        return values.sum();
    }
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

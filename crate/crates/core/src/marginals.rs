//! Subsystem marginals and conditional slices of probability vectors.
//!
//! Bit convention: in a full index `j` on `n` qubits, qubit 0 is the most
//! significant bit. A [`Partition`] lists the qubits of subsystem A in
//! order; the first listed qubit becomes the most significant bit of the
//! A-outcome `y`. The remaining qubits form subsystem B in ascending qubit
//! order and give the B-outcome `z` (or `b` once fixed). The default
//! partition keeps the leading `m` qubits in A, so B is the trailing `k`
//! bits and `j = y * K + z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BitStringProbs, DepolarizedProbVector};

/// Conditioning on outcomes below this weight is refused.
pub const DEGENERATE_WEIGHT: f64 = 1e-300;

/// Split of `n` qubits into a measured subsystem A and its complement B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "PartitionSpec", try_from = "PartitionSpec")]
pub struct Partition {
    n: u32,
    a_bits: Vec<u32>,
    b_bits: Vec<u32>,
    /// A is exactly the leading qubits 0..m in order.
    leading: bool,
}

impl Partition {
    pub fn new(n: u32, a_bits: Vec<u32>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::arg(format!("qubit count {n} out of range")));
        }
        if a_bits.is_empty() {
            return Err(Error::arg("subsystem A must contain at least one qubit"));
        }
        let mut seen = vec![false; n as usize];
        for &q in &a_bits {
            if q >= n {
                return Err(Error::arg(format!("qubit {q} outside 0..{n}")));
            }
            if std::mem::replace(&mut seen[q as usize], true) {
                return Err(Error::arg(format!("qubit {q} listed twice")));
            }
        }
        let b_bits = (0..n).filter(|q| !seen[*q as usize]).collect();
        let leading = a_bits.iter().enumerate().all(|(i, &q)| i as u32 == q);
        Ok(Partition {
            n,
            a_bits,
            b_bits,
            leading,
        })
    }

    /// A = qubits `0..m`, B = the trailing `n - m` qubits.
    pub fn leading(n: u32, m: u32) -> Result<Self> {
        Self::new(n, (0..m).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a_bits(&self) -> &[u32] {
        &self.a_bits
    }

    pub fn b_bits(&self) -> &[u32] {
        &self.b_bits
    }

    pub fn m(&self) -> u32 {
        self.a_bits.len() as u32
    }

    pub fn k(&self) -> u32 {
        self.n - self.m()
    }

    pub fn dim_full(&self) -> usize {
        1 << self.n
    }

    pub fn dim_a(&self) -> usize {
        1 << self.m()
    }

    pub fn dim_b(&self) -> usize {
        1 << self.k()
    }

    /// Splits a full index into `(y, z)`.
    #[inline]
    pub fn split(&self, j: usize) -> (usize, usize) {
        if self.leading {
            let k = self.k();
            return (j >> k, j & ((1 << k) - 1));
        }
        (
            gather(j, self.n, &self.a_bits),
            gather(j, self.n, &self.b_bits),
        )
    }

    /// Inverse of [`Partition::split`].
    #[inline]
    pub fn join(&self, y: usize, z: usize) -> usize {
        if self.leading {
            return (y << self.k()) | z;
        }
        scatter(y, self.n, &self.a_bits) | scatter(z, self.n, &self.b_bits)
    }

    fn check(&self, n_qubits: u32) -> Result<()> {
        if n_qubits != self.n {
            return Err(Error::arg(format!(
                "partition is over {} qubits but the vector has {n_qubits}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Serialized form of a [`Partition`].
#[derive(Serialize, Deserialize)]
struct PartitionSpec {
    n: u32,
    a_bits: Vec<u32>,
}

impl From<Partition> for PartitionSpec {
    fn from(p: Partition) -> Self {
        PartitionSpec {
            n: p.n,
            a_bits: p.a_bits,
        }
    }
}

impl TryFrom<PartitionSpec> for Partition {
    type Error = Error;

    fn try_from(spec: PartitionSpec) -> Result<Self> {
        Partition::new(spec.n, spec.a_bits)
    }
}

/// Collects the bits of `j` at the listed qubit positions, first qubit most
/// significant.
fn gather(j: usize, n: u32, qubits: &[u32]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((j >> (n - 1 - q)) & 1))
}

fn scatter(v: usize, n: u32, qubits: &[u32]) -> usize {
    let len = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| {
        let bit = (v >> (len - 1 - i)) & 1;
        acc | (bit << (n - 1 - q))
    })
}

/// Conditional distribution of subsystem A given B-outcome `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSlice {
    pub partition: Partition,
    pub b: usize,
    pub cond_probs: Vec<f64>,
    /// p(b), the total weight of the slice before normalization.
    pub weight: f64,
}

/// Marginal `p_A(y) = sum_z p(y, z)`.
pub fn marginalize<P: BitStringProbs + ?Sized>(p: &P, part: &Partition) -> Result<Vec<f64>> {
    part.check(p.n_qubits())?;
    let probs = p.probs();
    if part.leading {
        return Ok(probs
            .chunks_exact(part.dim_b())
            .map(|block| block.iter().sum())
            .collect());
    }
    let mut out = vec![0.0; part.dim_a()];
    for (j, &q) in probs.iter().enumerate() {
        out[part.split(j).0] += q;
    }
    Ok(out)
}

/// Conditions `p` on B-outcome `b`: `p(y|b) = p(y, b) / p(b)`.
pub fn conditional_slice<P: BitStringProbs + ?Sized>(
    p: &P,
    part: &Partition,
    b: usize,
) -> Result<ConditionalSlice> {
    part.check(p.n_qubits())?;
    if b >= part.dim_b() {
        return Err(Error::arg(format!(
            "B-outcome {b} outside 0..{}",
            part.dim_b()
        )));
    }
    let probs = p.probs();
    let mut cond_probs: Vec<f64> = (0..part.dim_a()).map(|y| probs[part.join(y, b)]).collect();
    let weight: f64 = cond_probs.iter().sum();
    if !(weight >= DEGENERATE_WEIGHT) {
        return Err(Error::DegenerateSlice {
            b: b as u64,
            weight,
        });
    }
    for c in cond_probs.iter_mut() {
        *c /= weight;
    }
    Ok(ConditionalSlice {
        partition: part.clone(),
        b,
        cond_probs,
        weight,
    })
}

/// Every slice `b = 0..K` of `p`, in order of `b`. Degenerate slices are
/// reported as errors in place.
pub fn all_conditional_slices<P: BitStringProbs + Sync + ?Sized>(
    p: &P,
    part: &Partition,
) -> Vec<Result<ConditionalSlice>> {
    use rayon::prelude::*;
    (0..part.dim_b())
        .into_par_iter()
        .map(|b| conditional_slice(p, part, b))
        .collect()
}

/// Exact conditioning of a depolarized vector.
pub fn noisy_conditional_exact(
    noisy: &DepolarizedProbVector,
    part: &Partition,
    b: usize,
) -> Result<ConditionalSlice> {
    conditional_slice(noisy, part, b)
}

/// Approximate noisy slice `(1 - lambda) p(y|b) + lambda / M`, which treats
/// the branch weight p(b) as its mean M/N.
pub fn noisy_conditional_affine(ideal: &ConditionalSlice, lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::arg(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let floor = lambda / ideal.cond_probs.len() as f64;
    Ok(ideal
        .cond_probs
        .iter()
        .map(|&q| (1.0 - lambda) * q + floor)
        .collect())
}

//! Seeded, splittable random streams.
//!
//! Every trial of an experiment draws from its own [`RngSpec`], a pair of
//! master seed and stream index. The pair is mixed into a ChaCha seed, so a
//! trial's draws depend only on its spec and never on which thread runs it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngSpec {
            master_seed,
            stream_index,
        }
    }

    /// Stream `index` nested under this one. Children of distinct parents
    /// never share a key because the parent pair is folded into the seed.
    pub fn substream(&self, index: u64) -> RngSpec {
        RngSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(self.stream_index)),
            stream_index: index,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut seed = [0u8; 32];
        let mut state = self.master_seed;
        let mut counter = self.stream_index;
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix64(state ^ splitmix64(counter));
            counter = counter.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        StreamRng {
            inner: ChaCha8Rng::from_seed(seed),
            spare_normal: None,
        }
    }
}

/// Generator bound to one [`RngSpec`].
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl StreamRng {
    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        loop {
            // 53 random mantissa bits, offset by half an ulp so 0 is excluded.
            let bits = self.inner.next_u64() >> 11;
            let u = (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            if u < 1.0 {
                return u;
            }
        }
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Standard normal variate, Marsaglia polar method.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Rate-one exponential variate by inverse CDF.
    #[inline]
    pub fn standard_exponential(&mut self) -> f64 {
        -self.open01().ln()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_spec_same_stream() {
        let spec = RngSpec::new(42, 7);
        let a: Vec<u64> = (0..16)
            .map({
                let mut r = spec.rng();
                move |_| r.next_u64()
            })
            .collect();
        let b: Vec<u64> = (0..16)
            .map({
                let mut r = spec.rng();
                move |_| r.next_u64()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngSpec::new(42, 0).rng();
        let mut b = RngSpec::new(42, 1).rng();
        let mut c = RngSpec::new(43, 0).rng();
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_ne!(
            RngSpec::new(1, 2).substream(0),
            RngSpec::new(1, 3).substream(0)
        );
    }

    #[test]
    fn normal_and_exponential_moments() {
        let mut r = RngSpec::new(3, 0).rng();
        let s = 200_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..s {
            let z = r.standard_normal();
            m1 += z;
            m2 += z * z;
        }
        assert!((m1 / s as f64).abs() < 0.01);
        assert!((m2 / s as f64 - 1.0).abs() < 0.01);

        let mean: f64 = (0..s).map(|_| r.standard_exponential()).sum::<f64>() / s as f64;
        assert!((mean - 1.0).abs() < 0.01);
    }

    #[test]
    fn open01_excludes_endpoints() {
        let mut r = RngSpec::new(0, 0).rng();
        for _ in 0..10_000 {
            let u = r.open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}

//! Test-only oracles built on `rand_distr`, independent of the crate's own
//! samplers.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};

pub fn oracle_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dirichlet(alpha, ..., alpha) of dimension `dim` from Gamma(alpha, 1)
/// variates.
pub fn dirichlet(rng: &mut ChaCha8Rng, dim: usize, alpha: f64) -> Vec<f64> {
    let xs: Vec<f64> = if alpha == 1.0 {
        (0..dim).map(|_| Exp1.sample(rng)).collect()
    } else {
        let g = Gamma::new(alpha, 1.0).unwrap();
        (0..dim).map(|_| g.sample(rng)).collect()
    };
    let total: f64 = xs.iter().sum();
    xs.into_iter().map(|x| x / total).collect()
}

/// Monte Carlo mean and standard error of `dim * sum(p^2) - 1` for
/// `p ~ Dir(alpha^M)` aggregated to `m_out` components of `dim / m_out`
/// each. With `m_out == dim` this is the flat-Dirichlet XEB expectation.
pub fn dirichlet_xeb_oracle(seed: u64, dim: usize, m_out: usize, draws: usize) -> (f64, f64) {
    let mut rng = oracle_rng(seed);
    let group = dim / m_out;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let p = dirichlet(&mut rng, dim, 1.0);
        let purity: f64 = p
            .chunks(group)
            .map(|c| {
                let a: f64 = c.iter().sum();
                a * a
            })
            .sum();
        let v = m_out as f64 * purity - 1.0;
        s1 += v;
        s2 += v * v;
    }
    let n = draws as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

//! Analytic laws of scaled and raw bit-string probabilities.
//!
//! Every law is described by an unshifted base variable `x` on the scaled
//! axis (`x = scale * p`) plus an optional depolarizing strength `lambda`
//! that maps `x` to `(1 - lambda) x + lambda`. The base is either a scaled
//! Beta law (exact, finite dimension) or its large-dimension Gamma limit.
//!
//! | family          | base law of `p`     | scale |
//! |-----------------|---------------------|-------|
//! | FullBeta        | Beta(1, N - 1)      | N     |
//! | SubsystemBeta   | Beta(K, N - K)      | M     |
//! | ConditionalBeta | Beta(1, M - 1)      | M     |
//! | ExpLimit        | x ~ Exp(1)          | N     |
//! | GammaLimit      | x ~ Gamma(K, 1/K)   | M     |
//!
//! When `K` is large the Gamma limit is close to a Gaussian of mean 1 and
//! variance 1/K; no separate Gaussian family is provided.
//!
//! `lambda = 1` collapses every law onto a point mass at `x = 1` and has no
//! density, so laws only accept `lambda` in [0, 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{inc_beta, inc_gamma_lower, ln_beta, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LawFamily {
    FullBeta,
    SubsystemBeta,
    ExpLimit,
    GammaLimit,
    ConditionalBeta,
}

/// A fully parameterized analytic law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticLaw {
    family: LawFamily,
    /// Full dimension N.
    dim_full: u64,
    /// Subsystem-A dimension M.
    dim_a: u64,
    /// Subsystem-B dimension K.
    dim_b: u64,
    lambda: f64,
    scaled: bool,
}

enum Base {
    /// `x / scale ~ Beta(a, b)`.
    Beta { a: f64, b: f64, scale: f64 },
    /// `x ~ Gamma(shape, 1/shape)`.
    Gamma { shape: f64 },
}

impl AnalyticLaw {
    /// Single-component law of a flat Dirichlet vector of dimension `dim`.
    pub fn full_beta(dim: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::arg(format!(
                "full dimension must be >= 2, got {dim}"
            )));
        }
        Ok(Self::build(LawFamily::FullBeta, dim, dim, 1))
    }

    /// Law of one subsystem marginal `p_A`, with `dim_a = M` and `N = M K`.
    pub fn subsystem_beta(dim_full: u64, dim_a: u64) -> Result<Self> {
        if dim_a < 2 || dim_full < dim_a || !dim_full.is_multiple_of(dim_a) {
            return Err(Error::arg(format!(
                "subsystem dimension {dim_a} must be >= 2 and divide full dimension {dim_full}"
            )));
        }
        Ok(Self::build(
            LawFamily::SubsystemBeta,
            dim_full,
            dim_a,
            dim_full / dim_a,
        ))
    }

    /// Law of one conditional component `p(y|b)` on an `M`-outcome slice.
    pub fn conditional_beta(dim_a: u64) -> Result<Self> {
        if dim_a < 2 {
            return Err(Error::arg(format!(
                "slice dimension must be >= 2, got {dim_a}"
            )));
        }
        Ok(Self::build(LawFamily::ConditionalBeta, dim_a, dim_a, 1))
    }

    /// Unit exponential in `x = dim p`.
    pub fn exp_limit(dim: u64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::arg("dimension must be >= 1"));
        }
        Ok(Self::build(LawFamily::ExpLimit, dim, dim, 1))
    }

    /// Gamma(K, 1/K) in `x = M p_A`.
    pub fn gamma_limit(dim_a: u64, dim_b: u64) -> Result<Self> {
        if dim_a < 1 || dim_b < 1 {
            return Err(Error::arg("dimensions must be >= 1"));
        }
        Ok(Self::build(
            LawFamily::GammaLimit,
            dim_a * dim_b,
            dim_a,
            dim_b,
        ))
    }

    /// Depolarized exponential limit in scaled coordinates.
    pub fn shifted_exp_limit(dim: u64, lambda: f64) -> Result<Self> {
        Self::exp_limit(dim)?.with_lambda(lambda)
    }

    /// Depolarized subsystem law in scaled coordinates.
    pub fn shifted_subsystem_beta(dim_full: u64, dim_a: u64, lambda: f64) -> Result<Self> {
        Self::subsystem_beta(dim_full, dim_a)?.with_lambda(lambda)
    }

    fn build(family: LawFamily, dim_full: u64, dim_a: u64, dim_b: u64) -> Self {
        AnalyticLaw {
            family,
            dim_full,
            dim_a,
            dim_b,
            lambda: 0.0,
            scaled: true,
        }
    }

    /// Same law under depolarizing strength `lambda` in [0, 1).
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::arg(format!(
                "law noise strength must lie in [0, 1), got {lambda}"
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    /// Evaluate in scaled (`true`) or raw probability (`false`) coordinates.
    pub fn with_scaled(mut self, scaled: bool) -> Self {
        self.scaled = scaled;
        self
    }

    pub fn family(&self) -> LawFamily {
        self.family
    }

    /// Display name; depolarized exponential and subsystem laws carry a
    /// `Shifted` prefix.
    pub fn name(&self) -> &'static str {
        let shifted = self.lambda > 0.0;
        match (self.family, shifted) {
            (LawFamily::FullBeta, false) => "FullBeta",
            (LawFamily::FullBeta, true) => "ShiftedFullBeta",
            (LawFamily::SubsystemBeta, false) => "SubsystemBeta",
            (LawFamily::SubsystemBeta, true) => "ShiftedSubsystemBeta",
            (LawFamily::ExpLimit, false) => "ExpLimit",
            (LawFamily::ExpLimit, true) => "ShiftedExpLimit",
            (LawFamily::GammaLimit, false) => "GammaLimit",
            (LawFamily::GammaLimit, true) => "ShiftedGammaLimit",
            (LawFamily::ConditionalBeta, false) => "ConditionalBeta",
            (LawFamily::ConditionalBeta, true) => "ShiftedConditionalBeta",
        }
    }

    pub fn dim_full(&self) -> u64 {
        self.dim_full
    }

    pub fn dim_a(&self) -> u64 {
        self.dim_a
    }

    pub fn dim_b(&self) -> u64 {
        self.dim_b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    /// Factor between raw probability and scaled variable.
    pub fn scale(&self) -> f64 {
        self.dim_a as f64
    }

    fn base(&self) -> Base {
        let n = self.dim_full as f64;
        let m = self.dim_a as f64;
        let k = self.dim_b as f64;
        match self.family {
            LawFamily::FullBeta => Base::Beta {
                a: 1.0,
                b: n - 1.0,
                scale: n,
            },
            LawFamily::SubsystemBeta => Base::Beta {
                a: k,
                b: n - k,
                scale: m,
            },
            LawFamily::ConditionalBeta => Base::Beta {
                a: 1.0,
                b: m - 1.0,
                scale: m,
            },
            LawFamily::ExpLimit => Base::Gamma { shape: 1.0 },
            LawFamily::GammaLimit => Base::Gamma { shape: k },
        }
    }

    /// Maps a caller coordinate to the unshifted base variable.
    fn base_coord(&self, v: f64) -> f64 {
        let shifted = if self.scaled { v } else { v * self.scale() };
        (shifted - self.lambda) / (1.0 - self.lambda)
    }

    /// Jacobian from base density to caller-coordinate density.
    fn jacobian(&self) -> f64 {
        let j = 1.0 / (1.0 - self.lambda);
        if self.scaled {
            j
        } else {
            j * self.scale()
        }
    }

    fn law_coord(&self, x: f64) -> f64 {
        let shifted = (1.0 - self.lambda) * x + self.lambda;
        if self.scaled {
            shifted
        } else {
            shifted / self.scale()
        }
    }

    /// Support `[lo, hi]` in caller coordinates; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        let hi = match self.base() {
            Base::Beta { scale, .. } => self.law_coord(scale),
            Base::Gamma { .. } => f64::INFINITY,
        };
        (self.law_coord(0.0), hi)
    }

    /// Probability density at `v`; exactly 0 outside the support.
    pub fn pdf(&self, v: f64) -> f64 {
        let x = self.base_coord(v);
        let (lo, hi) = self.support();
        if !(lo..=hi).contains(&v) || x < 0.0 {
            return 0.0;
        }
        match self.base() {
            Base::Beta { a, b, scale } => {
                let p = x / scale;
                if p > 1.0 {
                    return 0.0;
                }
                beta_ln_pdf(a, b, p).exp() / scale * self.jacobian()
            }
            Base::Gamma { shape } => gamma_ln_pdf(shape, x).exp() * self.jacobian(),
        }
    }

    /// Cumulative distribution at `v`.
    pub fn cdf(&self, v: f64) -> f64 {
        if v.is_nan() {
            return f64::NAN;
        }
        let (lo, hi) = self.support();
        if v <= lo {
            return 0.0;
        }
        if v >= hi {
            return 1.0;
        }
        let x = self.base_coord(v).max(0.0);
        let c = match self.base() {
            Base::Beta { a, b, scale } => {
                let p = (x / scale).min(1.0);
                if a == 1.0 {
                    -(b * (-p).ln_1p()).exp_m1()
                } else {
                    inc_beta(a, b, p)
                }
            }
            Base::Gamma { shape } => {
                if shape == 1.0 {
                    -(-x).exp_m1()
                } else {
                    inc_gamma_lower(shape, shape * x)
                }
            }
        };
        c.clamp(0.0, 1.0)
    }

    /// Inverse CDF by bisection, `u` in [0, 1].
    pub fn quantile(&self, u: f64) -> f64 {
        let (lo, hi) = self.support();
        if u <= 0.0 {
            return lo;
        }
        if u >= 1.0 {
            return hi;
        }
        let mut upper = if hi.is_finite() {
            hi
        } else {
            let (mean, var) = self.moments();
            let mut h = mean + var.sqrt();
            while self.cdf(h) < u {
                h = lo + 2.0 * (h - lo);
            }
            h
        };
        let mut lower = lo;
        for _ in 0..200 {
            let mid = 0.5 * (lower + upper);
            if mid <= lower || mid >= upper {
                break;
            }
            if self.cdf(mid) < u {
                lower = mid;
            } else {
                upper = mid;
            }
        }
        0.5 * (lower + upper)
    }

    /// Mean and variance in caller coordinates.
    pub fn moments(&self) -> (f64, f64) {
        let (mean_x, var_x) = match self.base() {
            Base::Beta { a, b, scale } => {
                let t = a + b;
                (scale * a / t, scale * scale * a * b / (t * t * (t + 1.0)))
            }
            Base::Gamma { shape } => (1.0, 1.0 / shape),
        };
        let keep = 1.0 - self.lambda;
        let mean = keep * mean_x + self.lambda;
        let var = keep * keep * var_x;
        if self.scaled {
            (mean, var)
        } else {
            let s = self.scale();
            (mean / s, var / (s * s))
        }
    }

    /// Large-dimension limit of a Beta family, keeping `lambda` and the
    /// coordinate choice.
    pub fn limit_law(&self) -> Result<AnalyticLaw> {
        let mut limit = match self.family {
            LawFamily::FullBeta | LawFamily::ConditionalBeta => {
                Self::build(LawFamily::ExpLimit, self.dim_a, self.dim_a, 1)
            }
            LawFamily::SubsystemBeta if self.dim_b == 1 => {
                Self::build(LawFamily::ExpLimit, self.dim_a, self.dim_a, 1)
            }
            LawFamily::SubsystemBeta => {
                Self::build(LawFamily::GammaLimit, self.dim_full, self.dim_a, self.dim_b)
            }
            LawFamily::ExpLimit | LawFamily::GammaLimit => {
                return Err(Error::arg(format!(
                    "{} is already a limiting law",
                    self.name()
                )))
            }
        };
        limit.lambda = self.lambda;
        limit.scaled = self.scaled;
        Ok(limit)
    }
}

/// Log density of Beta(a, b) at p in [0, 1].
fn beta_ln_pdf(a: f64, b: f64, p: f64) -> f64 {
    let ln_norm = if a == 1.0 {
        // 1/B(1, b) = b
        b.ln()
    } else if b == 1.0 {
        a.ln()
    } else {
        -ln_beta(a, b)
    };
    let head = if a == 1.0 {
        0.0
    } else if p == 0.0 {
        return f64::NEG_INFINITY;
    } else {
        (a - 1.0) * p.ln()
    };
    let tail = if b == 1.0 {
        0.0
    } else if p == 1.0 {
        return f64::NEG_INFINITY;
    } else {
        (b - 1.0) * (-p).ln_1p()
    };
    ln_norm + head + tail
}

/// Log density of Gamma(shape, scale = 1/shape) at x >= 0.
fn gamma_ln_pdf(shape: f64, x: f64) -> f64 {
    let head = if shape == 1.0 {
        0.0
    } else if x == 0.0 {
        return f64::NEG_INFINITY;
    } else {
        (shape - 1.0) * x.ln()
    };
    shape * shape.ln() - ln_gamma(shape) + head - shape * x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn full_beta_at_origin() {
        for n in [2u64, 16, 4096, 1 << 20] {
            let law = AnalyticLaw::full_beta(n).unwrap().with_scaled(false);
            assert_relative_eq!(law.pdf(0.0), (n - 1) as f64, max_relative = 1e-14);
            assert_eq!(law.cdf(1.0), 1.0);
            assert_eq!(law.cdf(0.0), 0.0);
        }
    }

    #[test]
    fn shifted_exponential_gap_and_height() {
        let law = AnalyticLaw::shifted_exp_limit(4096, 0.52).unwrap();
        for x in [0.0, 0.1, 0.3, 0.5, 0.519_999] {
            assert_eq!(law.pdf(x), 0.0);
        }
        assert_relative_eq!(law.pdf(0.52 + 1e-12), 1.0 / 0.48, max_relative = 1e-10);
        assert_relative_eq!(law.pdf(0.52), 2.083_333_333_333_333, max_relative = 1e-14);
    }

    #[test]
    fn exp_limit_cdf_median() {
        let law = AnalyticLaw::exp_limit(1024).unwrap();
        assert_relative_eq!(law.cdf(std::f64::consts::LN_2), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn subsystem_with_trivial_complement_is_full() {
        let n = 1024;
        let full = AnalyticLaw::full_beta(n).unwrap();
        let sub = AnalyticLaw::subsystem_beta(n, n).unwrap();
        assert_eq!(sub.dim_b(), 1);
        for i in 0..100 {
            let x = 12.0 * i as f64 / 99.0;
            assert_relative_eq!(sub.pdf(x), full.pdf(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_limit_mode() {
        let law = AnalyticLaw::gamma_limit(1 << 10, 4).unwrap();
        let mode = 0.75;
        let h = 1e-6;
        let slope = (law.pdf(mode + h) - law.pdf(mode - h)) / (2.0 * h);
        assert!(slope.abs() < 1e-6, "slope {slope}");
        assert!(law.pdf(mode) > law.pdf(mode - 0.05));
        assert!(law.pdf(mode) > law.pdf(mode + 0.05));
    }

    #[test]
    fn moments_examples() {
        let n = 4096;
        let (mean, _) = AnalyticLaw::full_beta(n)
            .unwrap()
            .with_scaled(false)
            .moments();
        assert_relative_eq!(mean, 1.0 / n as f64, max_relative = 1e-15);

        let (mean, var) = AnalyticLaw::gamma_limit(64, 16).unwrap().moments();
        assert_eq!(mean, 1.0);
        assert_eq!(var, 1.0 / 16.0);

        for lambda in [0.0, 0.3, 0.52] {
            let (mean, var) = AnalyticLaw::shifted_exp_limit(n, lambda).unwrap().moments();
            assert_relative_eq!(mean, 1.0, max_relative = 1e-15);
            assert_relative_eq!(var, (1.0 - lambda) * (1.0 - lambda), max_relative = 1e-15);
        }
    }

    #[test]
    fn limit_law_mapping() {
        let full = AnalyticLaw::full_beta(1 << 30).unwrap();
        assert_eq!(full.limit_law().unwrap().family(), LawFamily::ExpLimit);
        let sub1 = AnalyticLaw::subsystem_beta(256, 256).unwrap();
        assert_eq!(sub1.limit_law().unwrap().family(), LawFamily::ExpLimit);
        let sub = AnalyticLaw::subsystem_beta(1 << 20, 1 << 16)
            .unwrap()
            .with_lambda(0.3)
            .unwrap();
        let lim = sub.limit_law().unwrap();
        assert_eq!(lim.family(), LawFamily::GammaLimit);
        assert_eq!(lim.dim_b(), 16);
        assert_eq!(lim.lambda(), 0.3);
        assert!(lim.limit_law().is_err());
        assert!(AnalyticLaw::exp_limit(8).unwrap().limit_law().is_err());
    }

    #[test]
    fn support_of_shifted_subsystem() {
        let law = AnalyticLaw::shifted_subsystem_beta(4096, 16, 0.3).unwrap();
        let (lo, hi) = law.support();
        assert_relative_eq!(lo, 0.3);
        assert_relative_eq!(hi, 0.7 * 16.0 + 0.3, max_relative = 1e-15);
        assert_eq!(law.pdf(0.29), 0.0);
        assert_eq!(law.pdf(hi + 1e-9), 0.0);
        assert_eq!(law.cdf(hi + 1.0), 1.0);
    }

    #[test]
    fn conditional_matches_full_under_relabeling() {
        let m = 64;
        let cond = AnalyticLaw::conditional_beta(m).unwrap();
        let full = AnalyticLaw::full_beta(m).unwrap();
        for i in 0..200 {
            let x = 20.0 * i as f64 / 199.0;
            assert_eq!(cond.pdf(x), full.pdf(x));
            assert_eq!(cond.cdf(x), full.cdf(x));
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let laws = [
            AnalyticLaw::full_beta(4096).unwrap(),
            AnalyticLaw::subsystem_beta(4096, 16).unwrap(),
            AnalyticLaw::gamma_limit(16, 256)
                .unwrap()
                .with_lambda(0.2)
                .unwrap(),
            AnalyticLaw::shifted_exp_limit(64, 0.52).unwrap(),
        ];
        for law in laws {
            for u in [0.001, 0.1, 0.5, 0.9, 0.999] {
                let q = law.quantile(u);
                assert!((law.cdf(q) - u).abs() < 1e-12, "{} u={u}", law.name());
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(AnalyticLaw::full_beta(1).is_err());
        assert!(AnalyticLaw::subsystem_beta(4096, 3).is_err());
        assert!(AnalyticLaw::subsystem_beta(8, 16).is_err());
        assert!(AnalyticLaw::conditional_beta(1).is_err());
        let law = AnalyticLaw::full_beta(8).unwrap();
        assert!(law.with_lambda(1.0).is_err());
        assert!(law.with_lambda(-0.1).is_err());
    }
}

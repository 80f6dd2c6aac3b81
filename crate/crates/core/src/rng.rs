//! Deterministic random streams and the sampling primitives built on them.
//!
//! Every stream is a pure function of `(master_seed, scope)`: the scope label is
//! hashed together with the seed into a ChaCha8 key. Claims draw from their own
//! scopes (for example `claim/3/17/major`), so results do not depend on the
//! order in which claims are simulated or on how many threads run them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Geometric, LogNormal, Normal, Poisson};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const DOMAIN_TAG: &[u8] = b"casesim/stream/v1";

/// A single-owner random stream bound to a scope label.
#[derive(Debug, Clone)]
pub struct RngStream {
    scope: String,
    inner: ChaCha8Rng,
}

/// Derives the stream for `scope` under `master_seed`.
pub fn derive_stream(master_seed: u64, scope: &str) -> RngStream {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN_TAG);
    hasher.update(master_seed.to_le_bytes());
    hasher.update((scope.len() as u64).to_le_bytes());
    hasher.update(scope.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest[..32]);
    RngStream {
        scope: scope.to_owned(),
        inner: ChaCha8Rng::from_seed(key),
    }
}

impl RngStream {
    pub fn scope(&self) -> &str {
        &self.scope
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on the open interval (a, b).
    pub fn uniform_open(&mut self, a: f64, b: f64) -> f64 {
        loop {
            let x = a + (b - a) * self.uniform();
            if x > a && x < b {
                return x;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        Normal::new(mean, sd)
            .expect("normal parameters validated by caller")
            .sample(&mut self.inner)
    }

    pub fn exponential(&mut self, mean: f64) -> f64 {
        Exp::new(1.0 / mean)
            .expect("exponential mean validated by caller")
            .sample(&mut self.inner)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Inverse CDF of the triangular distribution on `[a, b]` with the given mode.
pub fn triangular_inverse_cdf(u: f64, a: f64, b: f64, mode: f64) -> f64 {
    let range = b - a;
    let split = (mode - a) / range;
    if u < split {
        a + (u * range * (mode - a)).sqrt()
    } else {
        b - ((1.0 - u) * range * (b - mode)).sqrt()
    }
}

pub fn sample_triangular(stream: &mut RngStream, a: f64, b: f64, mode: f64) -> Result<f64> {
    if !(a < b) || !(a..=b).contains(&mode) {
        return Err(Error::InvalidParameter(format!(
            "triangular requires a < b and a <= mode <= b, got ({a}, {b}, {mode})"
        )));
    }
    Ok(triangular_inverse_cdf(stream.uniform(), a, b, mode))
}

/// Standard distributions consumed by the revision and payment modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    /// Parameters on the log scale.
    LogNormal { mu: f64, sigma: f64 },
    /// Support {0, 1, 2, ...} with the given mean, so `p = 1 / (1 + mean)`.
    Geometric { mean: f64 },
    Bernoulli { p: f64 },
    Uniform { a: f64, b: f64 },
    Poisson { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    Real(f64),
    Count(u64),
}

impl Draw {
    pub fn as_f64(self) -> f64 {
        match self {
            Draw::Real(x) => x,
            Draw::Count(k) => k as f64,
        }
    }

    pub fn as_count(self) -> u64 {
        match self {
            Draw::Count(k) => k,
            Draw::Real(x) => x as u64,
        }
    }
}

impl DistSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            DistSpec::LogNormal { mu, sigma } if !(sigma > 0.0 && mu.is_finite()) => {
                bad(format!("lognormal sigma must be > 0, got {sigma}"))
            }
            DistSpec::Geometric { mean } if !(mean >= 0.0 && mean.is_finite()) => {
                bad(format!("geometric mean must be >= 0, got {mean}"))
            }
            DistSpec::Bernoulli { p } if !(0.0..=1.0).contains(&p) => {
                bad(format!("bernoulli p must lie in [0, 1], got {p}"))
            }
            DistSpec::Uniform { a, b } if !(a < b) => {
                bad(format!("uniform requires a < b, got ({a}, {b})"))
            }
            DistSpec::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("poisson lambda must be > 0, got {lambda}"))
            }
            _ => Ok(()),
        }
    }
}

pub fn sample_standard(stream: &mut RngStream, spec: DistSpec) -> Result<Draw> {
    spec.validate()?;
    let draw = match spec {
        DistSpec::LogNormal { mu, sigma } => {
            Draw::Real(LogNormal::new(mu, sigma).expect("validated").sample(stream))
        }
        DistSpec::Geometric { mean } => {
            if mean == 0.0 {
                Draw::Count(0)
            } else {
                let p = 1.0 / (1.0 + mean);
                Draw::Count(Geometric::new(p).expect("validated").sample(stream))
            }
        }
        DistSpec::Bernoulli { p } => Draw::Count(stream.bernoulli(p) as u64),
        DistSpec::Uniform { a, b } => Draw::Real(stream.uniform_open(a, b)),
        DistSpec::Poisson { lambda } => {
            let k: f64 = Poisson::new(lambda).expect("validated").sample(stream);
            Draw::Count(k as u64)
        }
    };
    Ok(draw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_scope_gives_identical_sequences() {
        let mut a = derive_stream(42, "claim/7");
        let mut b = derive_stream(42, "claim/7");
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn neighbouring_scopes_differ_in_first_draw() {
        let mut equal = 0;
        for k in 0..10_000u64 {
            let mut a = derive_stream(k, "claim/7");
            let mut b = derive_stream(k, "claim/8");
            if a.next_u64() == b.next_u64() {
                equal += 1;
            }
        }
        assert_eq!(equal, 0);
    }

    #[test]
    fn seed_changes_stream() {
        let mut a = derive_stream(1, "counts");
        let mut b = derive_stream(2, "counts");
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn triangular_endpoints() {
        assert_eq!(triangular_inverse_cdf(0.0, 3.0, 9.0, 3.0), 3.0);
        assert_eq!(triangular_inverse_cdf(1.0, 3.0, 9.0, 3.0), 9.0);
        // mode = a reduces to b - (b - a) sqrt(1 - u)
        let u = 0.37;
        let expected = 9.0 - 6.0 * (1.0f64 - u).sqrt();
        assert!((triangular_inverse_cdf(u, 3.0, 9.0, 3.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn triangular_rejects_bad_range() {
        let mut s = derive_stream(0, "t");
        assert!(sample_triangular(&mut s, 4.0, 1.0, 2.0).is_err());
        assert!(sample_triangular(&mut s, 1.0, 4.0, 5.0).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let mut s = derive_stream(0, "t");
        for spec in [
            DistSpec::LogNormal { mu: 0.0, sigma: 0.0 },
            DistSpec::Geometric { mean: -1.0 },
            DistSpec::Bernoulli { p: 1.5 },
            DistSpec::Uniform { a: 2.0, b: 2.0 },
            DistSpec::Poisson { lambda: 0.0 },
        ] {
            assert!(sample_standard(&mut s, spec).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn geometric_mean_zero_is_degenerate() {
        let mut s = derive_stream(0, "g");
        for _ in 0..100 {
            assert_eq!(
                sample_standard(&mut s, DistSpec::Geometric { mean: 0.0 }).unwrap(),
                Draw::Count(0)
            );
        }
    }
}

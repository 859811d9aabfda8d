//! Value and outside-bid distributions, and the seeded streams they draw from.
//!
//! Every random quantity in the simulator flows through a [`RandomStream`],
//! which is derived from `(seed, run, round, role)` so that replications are
//! independent, paired scenarios consume identical draws, and re-running a
//! configuration reproduces its outputs byte for byte.

use std::convert::Infallible;
use std::sync::Arc;

use rand::rand_core::TryRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};

/// Upper bound B on values in all built-in configurations.
pub const VALUE_BOUND: f64 = 1.0;

/// A sampleable value or outside-bid law.
///
/// Support is a bounded subset of `[0, ∞)`; value laws used by the simulator
/// must additionally sit inside `[0, 1]` (checked at config validation).
#[derive(Debug, Clone)]
pub enum DistributionSpec {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Beta with shape parameters `alpha, beta > 0`, support `[0, 1]`.
    Beta { alpha: f64, beta: f64 },
    /// Normal `(mu, sigma)` truncated to `[lo, hi]` by rejection.
    TruncNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
    /// Uniform-with-replacement draws from a fixed pool of values in `[0, 1]`
    /// (ingested winning prices). `sorted` is the pool sorted ascending, kept
    /// for CDF evaluation; sampling uses the original order.
    Empirical { pool: Arc<[f64]>, sorted: Arc<[f64]> },
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Config(format!(
                "uniform requires lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        if lo < 0.0 {
            return Err(Error::Config(format!("uniform lo must be >= 0, got {lo}")));
        }
        Ok(DistributionSpec::Uniform { lo, hi })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(beta > 0.0) {
            return Err(Error::Config(format!(
                "beta requires alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(DistributionSpec::Beta { alpha, beta })
    }

    pub fn trunc_normal(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Config(format!("truncnormal requires sigma > 0, got {sigma}")));
        }
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Config(format!(
                "truncnormal requires lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        if lo < 0.0 {
            return Err(Error::Config(format!("truncnormal lo must be >= 0, got {lo}")));
        }
        // Rejection from the untruncated normal must terminate quickly; all
        // built-in configs keep the acceptance mass near 1.
        let spec = DistributionSpec::TruncNormal { mu, sigma, lo, hi };
        let mass = normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
        if mass < 1e-3 {
            return Err(Error::Config(format!(
                "truncnormal({mu},{sigma},{lo},{hi}) keeps only {mass:.2e} of the normal mass; \
                 rejection sampling would be impractical"
            )));
        }
        Ok(spec)
    }

    pub fn empirical(pool: Vec<f64>) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::Config("empirical pool must be nonempty".into()));
        }
        if let Some(bad) = pool.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::Config(format!(
                "empirical pool values must lie in [0, 1], found {bad}"
            )));
        }
        let mut sorted = pool.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Ok(DistributionSpec::Empirical { pool: pool.into(), sorted: sorted.into() })
    }

    /// `(lo, hi)` bounds of the support.
    pub fn support_bounds(&self) -> (f64, f64) {
        match self {
            DistributionSpec::Uniform { lo, hi } => (*lo, *hi),
            DistributionSpec::Beta { .. } => (0.0, 1.0),
            DistributionSpec::TruncNormal { lo, hi, .. } => (*lo, *hi),
            DistributionSpec::Empirical { sorted, .. } => (sorted[0], sorted[sorted.len() - 1]),
        }
    }

    /// Short human-readable form, matching the config-file syntax.
    pub fn describe(&self) -> String {
        match self {
            DistributionSpec::Uniform { lo, hi } => format!("uniform({lo},{hi})"),
            DistributionSpec::Beta { alpha, beta } => format!("beta({alpha},{beta})"),
            DistributionSpec::TruncNormal { mu, sigma, lo, hi } => {
                format!("truncnormal({mu},{sigma},{lo},{hi})")
            }
            DistributionSpec::Empirical { pool, .. } => format!("empirical(n={})", pool.len()),
        }
    }
}

/// Identifies one logical draw sequence inside a run: which replication,
/// which auction round, and what the draws are used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub run: u64,
    pub round: u64,
    pub role: StreamRole,
}

/// Role tag of a stream. Distinct roles give statistically independent
/// sequences for the same `(seed, run, round)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamRole(pub u32);

impl StreamRole {
    /// Bidder value draws (consumed in bidder-index order within a round).
    pub const VALUES: StreamRole = StreamRole(0);
    /// The outside bid draw.
    pub const OUTSIDE: StreamRole = StreamRole(1);
    /// The multiplicative outside-bid scale draw, when configured.
    pub const SCALE: StreamRole = StreamRole(2);
    /// Estimator streams; offset keeps probes independent of simulation roles.
    pub const fn estimator(k: u32) -> StreamRole {
        StreamRole(0x1000 + k)
    }
}

/// A deterministic, platform-independent draw sequence.
///
/// Identical `(seed, StreamId)` pairs reproduce identical sequences on every
/// platform; distinct ids are independent. Cloning forks the current state,
/// which is how common-random-numbers probing reuses one set of draws.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha12Rng,
}

impl RandomStream {
    /// Derive the stream keyed by `(seed, id)`. The tuple is packed into the
    /// ChaCha key, so the block function acts as the derivation hash.
    pub fn derive(seed: u64, id: StreamId) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&id.run.to_le_bytes());
        key[16..24].copy_from_slice(&id.round.to_le_bytes());
        key[24..28].copy_from_slice(&id.role.0.to_le_bytes());
        key[28..32].copy_from_slice(b"cbs1");
        RandomStream { rng: ChaCha12Rng::from_seed(key) }
    }

    /// Root stream for standalone estimation (run = round = 0, estimator role).
    pub fn from_seed(seed: u64) -> Self {
        RandomStream::derive(seed, StreamId { run: 0, round: 0, role: StreamRole::estimator(0) })
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

// Infallible TryRng gives the blanket `Rng` impl, so rand_distr samplers can
// draw from a RandomStream directly.
impl TryRng for RandomStream {
    type Error = Infallible;
    fn try_next_u32(&mut self) -> std::result::Result<u32, Infallible> {
        Ok(self.rng.next_u32())
    }
    fn try_next_u64(&mut self) -> std::result::Result<u64, Infallible> {
        Ok(self.rng.next_u64())
    }
    fn try_fill_bytes(&mut self, dst: &mut [u8]) -> std::result::Result<(), Infallible> {
        self.rng.fill_bytes(dst);
        Ok(())
    }
}

/// Draw one sample from `spec`, advancing the stream deterministically.
///
/// Rejection-based variants (truncated normal, and the gamma steps inside the
/// Beta sampler) consume a deterministic number of draws per rejection, so
/// reproducibility is preserved.
pub fn sample(spec: &DistributionSpec, stream: &mut RandomStream) -> f64 {
    match spec {
        DistributionSpec::Uniform { lo, hi } => lo + (hi - lo) * stream.uniform01(),
        DistributionSpec::Beta { alpha, beta } => {
            let dist = rand_distr::Beta::new(*alpha, *beta).expect("validated at construction");
            dist.sample(stream)
        }
        DistributionSpec::TruncNormal { mu, sigma, lo, hi } => {
            let dist = rand_distr::Normal::new(*mu, *sigma).expect("validated at construction");
            for _ in 0..100_000 {
                let x = dist.sample(stream);
                if x >= *lo && x <= *hi {
                    return x;
                }
            }
            // Unreachable for specs passing the acceptance-mass check.
            panic!("truncated normal rejection did not terminate for {spec:?}");
        }
        DistributionSpec::Empirical { pool, .. } => {
            let idx = ((stream.uniform01() * pool.len() as f64) as usize).min(pool.len() - 1);
            pool[idx]
        }
    }
}

/// Draw `n >= 2` values and return `(max, second max, argmax index)`.
///
/// Byte-for-byte equivalent to `n` consecutive [`sample`] calls on the same
/// stream; ties break to the lowest index (0-based).
pub fn sample_top_two(
    spec: &DistributionSpec,
    n: usize,
    stream: &mut RandomStream,
) -> Result<(f64, f64, usize)> {
    if n < 2 {
        return Err(Error::Precondition(format!("sample_top_two requires n >= 2, got {n}")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    let mut arg = 0usize;
    for i in 0..n {
        let v = sample(spec, stream);
        if v > best {
            second = best;
            best = v;
            arg = i;
        } else if v > second {
            second = v;
        }
    }
    Ok((best, second, arg))
}

/// Cumulative distribution function of `spec` at `x`.
///
/// Monotone nondecreasing, 0 below the support and 1 above it. The empirical
/// variant returns the empirical CDF of its pool.
pub fn cdf(spec: &DistributionSpec, x: f64) -> f64 {
    match spec {
        DistributionSpec::Uniform { lo, hi } => {
            if x <= *lo {
                0.0
            } else if x >= *hi {
                1.0
            } else {
                (x - lo) / (hi - lo)
            }
        }
        DistributionSpec::Beta { alpha, beta } => {
            if x <= 0.0 {
                0.0
            } else if x >= 1.0 {
                1.0
            } else {
                statrs::function::beta::beta_reg(*alpha, *beta, x)
            }
        }
        DistributionSpec::TruncNormal { mu, sigma, lo, hi } => {
            if x <= *lo {
                return 0.0;
            }
            if x >= *hi {
                return 1.0;
            }
            let phi_lo = normal_cdf((lo - mu) / sigma);
            let phi_hi = normal_cdf((hi - mu) / sigma);
            (normal_cdf((x - mu) / sigma) - phi_lo) / (phi_hi - phi_lo)
        }
        DistributionSpec::Empirical { sorted, .. } => {
            let count = sorted.partition_point(|v| *v <= x);
            count as f64 / sorted.len() as f64
        }
    }
}

/// Standard normal CDF.
fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2))
}

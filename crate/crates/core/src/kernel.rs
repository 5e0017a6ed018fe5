//! Deterministic numeric primitives shared by the rest of the engine:
//! the complementary error function, decibel conversions, a bracketing
//! root finder and seeded Gaussian streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const ONE_OVER_SQRT_PI: f64 = TWO_OVER_SQRT_PI / 2.0;

/// A linear (power-ratio) signal-to-noise value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SnrValue(f64);

impl SnrValue {
    pub fn new(linear: f64) -> Result<Self> {
        if !linear.is_finite() || linear < 0.0 {
            return Err(Error::Domain(format!("SNR must be finite and >= 0, got {linear}")));
        }
        Ok(SnrValue(linear))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Domain(format!("dB value must be finite, got {db}")));
        }
        Ok(SnrValue(db_to_linear(db)))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> Result<f64> {
        linear_to_db(self.0)
    }
}

/// Bit error rate of a binary channel, always reported in [0, 0.5].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct BitErrorRate(f64);

impl BitErrorRate {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=0.5).contains(&value) {
            return Err(Error::Domain(format!("BER must lie in [0, 0.5], got {value}")));
        }
        Ok(BitErrorRate(value))
    }

    /// Folds a raw mismatch fraction in [0, 1] down to [0, 0.5] (a binary
    /// channel can always be relabeled).
    pub fn clamped(raw: f64) -> Result<Self> {
        if !raw.is_finite() || !(0.0..=1.0).contains(&raw) {
            return Err(Error::Domain(format!("mismatch fraction must lie in [0, 1], got {raw}")));
        }
        Ok(BitErrorRate(raw.min(1.0 - raw)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Complementary error function, |absolute error| <= 1e-12 over |x| <= 10.
///
/// Alternating Taylor series of erf for |x| <= 2, Laplace continued
/// fraction for the tail.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("erfc argument must be finite, got {x}")));
    }
    Ok(erfc_core(x))
}

fn erfc_core(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_core(-x)
    } else if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut coeff = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        coeff *= -x2 / n as f64;
        let term = coeff / (2 * n + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 || n > 200 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated by backward recurrence; converges rapidly for x > 2.
    let mut tail = x;
    for k in (1..=80u32).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    (-x * x).exp() * ONE_OVER_SQRT_PI / tail
}

/// 10^(db/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// 10 log10(x); defined for x > 0 only.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("linear_to_db requires x > 0, got {x}")));
    }
    Ok(10.0 * x.log10())
}

/// Finds x in [lo, hi] with f(x) = target for monotone f, by bisection.
pub fn solve_monotone<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    let (min_f, max_f) = if f_lo <= f_hi { (f_lo, f_hi) } else { (f_hi, f_lo) };
    if !(min_f..=max_f).contains(&target) {
        return Err(Error::Bracket { target, lo, hi });
    }
    let increasing = f_hi >= f_lo;
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // exhausted f64 resolution
        }
        if (f(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A seeded, counter-based Gaussian random stream.
///
/// Shard `k` of a simulation derives its sub-stream deterministically from
/// `(seed, k)`, so sharded runs reproduce bit-identically regardless of how
/// work is scheduled.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    shard: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_shard(seed, 0)
    }

    fn with_shard(seed: u64, shard: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        RandomStream { seed, shard, rng }
    }

    /// Derives the sub-stream for shard `k`; statistically independent of
    /// every other shard of the same seed.
    pub fn substream(&self, k: u64) -> Self {
        Self::with_shard(self.seed, k)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shard(&self) -> u64 {
        self.shard
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One sample from N(mean, variance).
    pub fn gaussian(&mut self, mean: f64, variance: f64) -> Result<f64> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(Error::Domain(format!("variance must be >= 0, got {variance}")));
        }
        if variance == 0.0 {
            return Ok(mean);
        }
        Ok(mean + variance.sqrt() * self.standard_normal())
    }

    /// Fair coin flip.
    pub fn bit(&mut self) -> bool {
        self.rng.gen::<bool>()
    }
}

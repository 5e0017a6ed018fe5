//! Symbol-level Monte Carlo engine for the coherent and squeezed
//! protocols with a pluggable eavesdropper, basis sifting and empirical
//! BER estimation.
//!
//! Symbol model: a binary symbol at the encoding rf becomes a per-bin
//! homodyne outcome N(+-amp, V_noise) with amp = sqrt(V_s)/2, which
//! reproduces the bandwidth-limited PCM error rate
//! BER = (1/2) erfc((1/2) sqrt(S/2)) exactly. Decisions threshold at 0.
//!
//! Sessions shard by fixed-size symbol blocks; shard k draws from the
//! sub-stream derived from (seed, k), so results are bit-identical
//! regardless of scheduling.

mod strategy;

pub use strategy::{EveStrategy, TeleportGain};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::MeasurementPenalty;
use crate::error::{Error, Result};
use crate::kernel::{RandomStream, SnrValue};
use crate::quadrature::ber_from_snr;
use crate::teleport::{bob_penalty, classical_channel_penalty, lambda_opt};

use strategy::{Intervention, Resolved, StrategyCtx};

const SHARD_SYMBOLS: u64 = 1 << 16;

/// Which key distribution protocol a session runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Protocol {
    /// Independent signals on both quadratures of one coherent beam.
    Coherent,
    /// Two amplitude-squeezed sources mixed into an EPR pair; one beam
    /// transmitted, the other measured by Alice and disclosed.
    Squeezed,
}

/// Full description of one Monte Carlo session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SessionParams {
    pub protocol: Protocol,
    pub n_symbols: u64,
    pub base_snr: SnrValue,
    /// Squeezed noise floor V_n of both sources (squeezed protocol only).
    pub vn: f64,
    /// Antisqueezed floor; defaults to the minimum-uncertainty 1/V_n.
    pub v_anti: Option<f64>,
    pub channel_eta: f64,
    pub seed: u64,
    pub strategy: EveStrategy,
}

impl SessionParams {
    pub fn coherent(n_symbols: u64, base_snr: SnrValue, seed: u64, strategy: EveStrategy) -> Self {
        SessionParams {
            protocol: Protocol::Coherent,
            n_symbols,
            base_snr,
            vn: 1.0,
            v_anti: None,
            channel_eta: 1.0,
            seed,
            strategy,
        }
    }

    pub fn squeezed(
        n_symbols: u64,
        base_snr: SnrValue,
        vn: f64,
        seed: u64,
        strategy: EveStrategy,
    ) -> Self {
        SessionParams {
            protocol: Protocol::Squeezed,
            n_symbols,
            base_snr,
            vn,
            v_anti: None,
            channel_eta: 1.0,
            seed,
            strategy,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_symbols == 0 {
            return Err(Error::Domain("session needs at least one symbol".into()));
        }
        if self.base_snr.linear() <= 0.0 {
            return Err(Error::Domain("base SNR must be positive".into()));
        }
        if !self.vn.is_finite() || self.vn <= 0.0 {
            return Err(Error::Domain(format!("noise floor must be positive, got {}", self.vn)));
        }
        if let Some(v) = self.v_anti {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("antisqueezed floor must be positive, got {v}")));
            }
        }
        if !(self.channel_eta > 0.0 && self.channel_eta <= 1.0) {
            return Err(Error::Domain(format!(
                "transmission efficiency must lie in (0,1], got {}",
                self.channel_eta
            )));
        }
        Ok(())
    }

    fn v_anti(&self) -> f64 {
        self.v_anti.unwrap_or(1.0 / self.vn)
    }
}

/// Empirical error fraction with a Wilson 95% interval.
///
/// `value` is the raw mismatch fraction in [0, 1]; folding down to the
/// BER range [0, 0.5] is a report-level concern
/// ([`crate::kernel::BitErrorRate::clamped`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerEstimate {
    pub errors: u64,
    pub n: u64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerEstimate {
    fn from_counts(errors: u64, n: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, n);
        BerEstimate { errors, n, value: errors as f64 / n as f64, ci_low, ci_high }
    }

    /// Binomial standard error at the observed rate.
    pub fn std_error(&self) -> f64 {
        (self.value * (1.0 - self.value) / self.n as f64).sqrt()
    }
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    if errors == 0 || errors == n {
        // keep the touched boundary exact instead of rounding past it
        let z = 1.959963984540054_f64;
        let n = n as f64;
        let half_width = z * z / (n + z * z);
        return if errors == 0 { (0.0, half_width) } else { (1.0 - half_width, 1.0) };
    }
    let z = 1.959963984540054_f64;
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Per-quadrature BER breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureBers {
    pub bob: BerEstimate,
    pub eve: BerEstimate,
}

/// Residual-variance diagnostics regressed against the injected signal.
///
/// Coherent sessions report the full outcome noise (V_n + penalty);
/// squeezed sessions report the per-source recombination floor
/// (V_n + penalty/2). `None` when the strategy is not a linear map of the
/// transmitted beam or no samples accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseDiagnostics {
    pub bob_plus: Option<f64>,
    pub bob_minus: Option<f64>,
    pub eve_plus: Option<f64>,
    pub eve_minus: Option<f64>,
}

/// Sifted-key statistics of one session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub n_symbols: u64,
    pub n_sifted: u64,
    pub sift_ratio: f64,
    pub ber_alice_bob: BerEstimate,
    pub ber_alice_eve: BerEstimate,
    pub amplitude: QuadratureBers,
    pub phase: QuadratureBers,
    pub noise: NoiseDiagnostics,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    n_symbols: u64,
    n_sifted: u64,
    bob_errors: [u64; 2],
    bob_count: [u64; 2],
    eve_errors: [u64; 2],
    eve_count: [u64; 2],
    bob_resid_sq: [f64; 2],
    bob_resid_n: [u64; 2],
    eve_resid_sq: [f64; 2],
    eve_resid_n: [u64; 2],
}

impl Accum {
    fn merge(mut self, other: &Accum) -> Accum {
        self.n_symbols += other.n_symbols;
        self.n_sifted += other.n_sifted;
        for q in 0..2 {
            self.bob_errors[q] += other.bob_errors[q];
            self.bob_count[q] += other.bob_count[q];
            self.eve_errors[q] += other.eve_errors[q];
            self.eve_count[q] += other.eve_count[q];
            self.bob_resid_sq[q] += other.bob_resid_sq[q];
            self.bob_resid_n[q] += other.bob_resid_n[q];
            self.eve_resid_sq[q] += other.eve_resid_sq[q];
            self.eve_resid_n[q] += other.eve_resid_n[q];
        }
        self
    }
}

/// Runs a full session and returns its sifted-key statistics.
pub fn run_session(params: &SessionParams) -> Result<SimReport> {
    params.validate()?;
    let resolved = Resolved::new(&params.strategy)?;
    let root = RandomStream::new(params.seed);
    let n_shards = params.n_symbols.div_ceil(SHARD_SYMBOLS);
    let shards: Vec<Accum> = (0..n_shards)
        .into_par_iter()
        .map(|k| {
            let count = SHARD_SYMBOLS.min(params.n_symbols - k * SHARD_SYMBOLS);
            let mut rng = root.substream(k);
            match params.protocol {
                Protocol::Coherent => run_shard_coherent(params, &resolved, count, &mut rng),
                Protocol::Squeezed => run_shard_squeezed(params, &resolved, count, &mut rng),
            }
        })
        .collect();
    let total = shards.iter().fold(Accum::default(), |acc, s| acc.merge(s));

    let var = |sq: f64, n: u64| if n >= 2 { Some(sq / n as f64) } else { None };
    let linear = matches!(
        resolved,
        Resolved::None | Resolved::Split | Resolved::Tap { .. } | Resolved::Teleport { .. }
    );
    let eve_records = !matches!(resolved, Resolved::None);
    Ok(SimReport {
        n_symbols: total.n_symbols,
        n_sifted: total.n_sifted,
        sift_ratio: total.n_sifted as f64 / total.n_symbols as f64,
        ber_alice_bob: BerEstimate::from_counts(
            total.bob_errors[0] + total.bob_errors[1],
            total.bob_count[0] + total.bob_count[1],
        ),
        ber_alice_eve: BerEstimate::from_counts(
            total.eve_errors[0] + total.eve_errors[1],
            total.eve_count[0] + total.eve_count[1],
        ),
        amplitude: QuadratureBers {
            bob: BerEstimate::from_counts(total.bob_errors[0], total.bob_count[0]),
            eve: BerEstimate::from_counts(total.eve_errors[0], total.eve_count[0]),
        },
        phase: QuadratureBers {
            bob: BerEstimate::from_counts(total.bob_errors[1], total.bob_count[1]),
            eve: BerEstimate::from_counts(total.eve_errors[1], total.eve_count[1]),
        },
        noise: NoiseDiagnostics {
            bob_plus: if linear { var(total.bob_resid_sq[0], total.bob_resid_n[0]) } else { None },
            bob_minus: if linear { var(total.bob_resid_sq[1], total.bob_resid_n[1]) } else { None },
            eve_plus: if linear && eve_records {
                var(total.eve_resid_sq[0], total.eve_resid_n[0])
            } else {
                None
            },
            eve_minus: if linear && eve_records {
                var(total.eve_resid_sq[1], total.eve_resid_n[1])
            } else {
                None
            },
        },
    })
}

/// Normalized line-loss noise added to a (non-bright) beam after Eve:
/// the receiver rescales by 1/sqrt(eta), leaving (1-eta)/eta of excess.
fn loss_noise(intervention: &Intervention, eta: f64, rng: &mut RandomStream) -> [f64; 2] {
    if intervention.bright || eta >= 1.0 {
        return intervention.bob_vals;
    }
    let sigma = ((1.0 - eta) / eta).sqrt();
    [
        intervention.bob_vals[0] + sigma * rng.standard_normal(),
        intervention.bob_vals[1] + sigma * rng.standard_normal(),
    ]
}

fn run_shard_coherent(
    params: &SessionParams,
    resolved: &Resolved,
    count: u64,
    rng: &mut RandomStream,
) -> Accum {
    let s = params.base_snr.linear();
    let amp = s.sqrt() / 2.0; // V_n = 1 for the coherent protocol
    let ctx = StrategyCtx {
        protocol: Protocol::Coherent,
        amp,
        beam_vars: [1.0 + amp * amp, 1.0 + amp * amp],
    };
    let mut acc = Accum::default();
    for _ in 0..count {
        let bits = [rng.bit(), rng.bit()];
        let mu = [sign(bits[0]) * amp, sign(bits[1]) * amp];
        let vals = [mu[0] + rng.standard_normal(), mu[1] + rng.standard_normal()];
        let iv = strategy::apply(resolved, vals, &ctx, rng);
        let received = loss_noise(&iv, params.channel_eta, rng);
        // Bob homodynes one random quadrature; every symbol carries key
        // data on both quadratures, so nothing is discarded.
        let q = usize::from(rng.bit());
        acc.n_symbols += 1;
        acc.n_sifted += 1;
        acc.bob_count[q] += 1;
        if (received[q] > 0.0) != bits[q] {
            acc.bob_errors[q] += 1;
        }
        let eve_bit = match iv.eve_record[q] {
            Some(r) => r > 0.0,
            None => rng.bit(),
        };
        acc.eve_count[q] += 1;
        if eve_bit != bits[q] {
            acc.eve_errors[q] += 1;
        }
        if iv.linear && iv.bob_gain > 1e-9 {
            let resid = received[q] / iv.bob_gain - mu[q];
            acc.bob_resid_sq[q] += resid * resid;
            acc.bob_resid_n[q] += 1;
            if let Some(r) = iv.eve_record[q] {
                let e = r - mu[q];
                acc.eve_resid_sq[q] += e * e;
                acc.eve_resid_n[q] += 1;
            }
        }
    }
    acc
}

fn run_shard_squeezed(
    params: &SessionParams,
    resolved: &Resolved,
    count: u64,
    rng: &mut RandomStream,
) -> Accum {
    let s = params.base_snr.linear();
    let vn = params.vn;
    let v_anti = params.v_anti();
    // signal power scaled so the no-attack recombined SNR equals base_snr
    let amp = (s * vn).sqrt() / 2.0;
    let sq2 = std::f64::consts::SQRT_2;
    let beam_var = (vn + v_anti + 2.0 * amp * amp) / 2.0;
    let ctx = StrategyCtx {
        protocol: Protocol::Squeezed,
        amp,
        beam_vars: [beam_var, beam_var],
    };
    let mut acc = Accum::default();
    for _ in 0..count {
        let bits = [rng.bit(), rng.bit()]; // source a, source b
        let x_a = sign(bits[0]) * amp + vn.sqrt() * rng.standard_normal();
        let y_a = v_anti.sqrt() * rng.standard_normal();
        let x_b = sign(bits[1]) * amp + vn.sqrt() * rng.standard_normal();
        let y_b = v_anti.sqrt() * rng.standard_normal();
        // 50:50 mix with a pi/2 shift on source b
        let c = [(x_a - y_b) / sq2, (y_a + x_b) / sq2];
        let d = [(x_a + y_b) / sq2, (y_a - x_b) / sq2];

        let alice_q = usize::from(rng.bit());
        let alice_val = d[alice_q];
        let iv = strategy::apply(resolved, c, &ctx, rng);
        let received = loss_noise(&iv, params.channel_eta, rng);
        let bob_q = usize::from(rng.bit());

        acc.n_symbols += 1;
        if bob_q != alice_q {
            continue; // mismatched bases are discarded
        }
        acc.n_sifted += 1;
        // amplitude bases add, phase bases subtract; either way the
        // recombination recovers sqrt2 times one source quadrature
        let key_bit = bits[bob_q];
        let gain_ok = iv.bob_gain > 1e-9;
        let bob_val = if gain_ok { received[bob_q] / iv.bob_gain } else { received[bob_q] };
        let m = match bob_q {
            0 => bob_val + alice_val,
            _ => bob_val - alice_val,
        };
        acc.bob_count[bob_q] += 1;
        if (m > 0.0) != key_bit {
            acc.bob_errors[bob_q] += 1;
        }
        let eve_bit = match iv.eve_record[bob_q] {
            Some(r) => {
                let me = if bob_q == 0 { r + alice_val } else { r - alice_val };
                me > 0.0
            }
            None => rng.bit(),
        };
        acc.eve_count[bob_q] += 1;
        if eve_bit != key_bit {
            acc.eve_errors[bob_q] += 1;
        }
        if iv.linear && gain_ok {
            let expected = sq2 * sign(key_bit) * amp;
            let resid = m - expected;
            // halved: per-source-quadrature floor V_n + penalty/2
            acc.bob_resid_sq[bob_q] += resid * resid / 2.0;
            acc.bob_resid_n[bob_q] += 1;
            if let Some(r) = iv.eve_record[bob_q] {
                let me = if bob_q == 0 { r + alice_val } else { r - alice_val };
                let e = me - expected;
                acc.eve_resid_sq[bob_q] += e * e / 2.0;
                acc.eve_resid_n[bob_q] += 1;
            }
        }
    }
    acc
}

fn sign(bit: bool) -> f64 {
    if bit {
        1.0
    } else {
        -1.0
    }
}

/// Indices where sender and receiver used the same basis.
pub fn sift(alice_bases: &[bool], bob_bases: &[bool]) -> Result<Vec<usize>> {
    if alice_bases.len() != bob_bases.len() {
        return Err(Error::Contract(format!(
            "basis sequences differ in length: {} vs {}",
            alice_bases.len(),
            bob_bases.len()
        )));
    }
    Ok(alice_bases
        .iter()
        .zip(bob_bases)
        .enumerate()
        .filter_map(|(i, (a, b))| (a == b).then_some(i))
        .collect())
}

/// Mismatch fraction between two keys with a Wilson 95% interval.
pub fn estimate_ber(key_a: &[bool], key_b: &[bool]) -> Result<BerEstimate> {
    if key_a.is_empty() {
        return Err(Error::Contract("cannot estimate a BER from empty keys".into()));
    }
    if key_a.len() != key_b.len() {
        return Err(Error::Contract(format!(
            "key lengths differ: {} vs {}",
            key_a.len(),
            key_b.len()
        )));
    }
    let errors = key_a.iter().zip(key_b).filter(|(a, b)| a != b).count() as u64;
    Ok(BerEstimate::from_counts(errors, key_a.len() as u64))
}

/// Analytic BER predictions for a session, used as the Monte Carlo oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub bob_ber: f64,
    pub eve_ber: f64,
}

/// Closed-form predictions for the empirical BERs of [`run_session`].
pub fn predict(params: &SessionParams) -> Result<AnalyticPrediction> {
    params.validate()?;
    Resolved::new(&params.strategy)?; // surface parameter errors identically
    let s = params.base_snr.linear();
    let eta = params.channel_eta;
    let n_loss = (1.0 - eta) / eta;
    let ber = |snr: f64| ber_from_snr(SnrValue::new(snr.max(0.0)).expect("finite")).value();
    let (eve_pen, bob_pen) = induced_penalties(&params.strategy)?;

    Ok(match params.protocol {
        Protocol::Coherent => {
            // symmetric penalties throughout; V_n = 1
            match params.strategy {
                EveStrategy::None => {
                    AnalyticPrediction { bob_ber: ber(s / (1.0 + n_loss)), eve_ber: 0.5 }
                }
                EveStrategy::GuessResend => {
                    let e_eve = ber(s);
                    let e_fresh = ber(s / (1.0 + n_loss));
                    let matched = e_eve + e_fresh - 2.0 * e_eve * e_fresh;
                    AnalyticPrediction {
                        bob_ber: 0.5 * matched + 0.25,
                        eve_ber: 0.5 * e_eve + 0.25,
                    }
                }
                EveStrategy::SplitSimultaneous => {
                    // bright regeneration: loss-immune
                    let b = ber(s / 2.0);
                    AnalyticPrediction { bob_ber: b, eve_ber: b }
                }
                EveStrategy::PartialTap { fraction } => AnalyticPrediction {
                    // transmissions compose before vacuum fills back in
                    bob_ber: ber(s * (1.0 - fraction) * eta),
                    eve_ber: ber(s * fraction / 2.0),
                },
                EveStrategy::Teleport { .. } => AnalyticPrediction {
                    bob_ber: ber(s / (1.0 + bob_pen.v_plus() + n_loss)),
                    eve_ber: ber(s / (1.0 + eve_pen.v_plus())),
                },
            }
        }
        Protocol::Squeezed => {
            let vn = params.vn;
            let v_anti = params.v_anti();
            let amp = (s * vn).sqrt() / 2.0;
            let t = |penalty: f64, extra: f64| 2.0 * vn / (2.0 * vn + penalty + extra);
            // When the transmitted beam's key quadrature is destroyed and
            // replaced with noise of variance `noise_var`, Alice's
            // disclosed recombination value still carries half the signal.
            let half_signal_ber = |noise_var: f64| {
                let sigma = (noise_var + (vn + v_anti) / 2.0).sqrt();
                ber(2.0 * (amp / sigma).powi(2))
            };
            match params.strategy {
                EveStrategy::None => {
                    AnalyticPrediction { bob_ber: ber(s * t(0.0, n_loss)), eve_ber: 0.5 }
                }
                EveStrategy::GuessResend => {
                    // right guess: faithful bright pass-through on the key
                    // quadrature for both Eve and Bob; wrong guess: a coin
                    // for Eve, the disclosed-half leak for Bob
                    let e = ber(s);
                    let wrong = half_signal_ber((vn + v_anti + 2.0 * amp * amp) / 2.0);
                    AnalyticPrediction {
                        bob_ber: 0.5 * e + 0.5 * wrong,
                        eve_ber: 0.5 * e + 0.25,
                    }
                }
                EveStrategy::SplitSimultaneous => AnalyticPrediction {
                    bob_ber: ber(s * t(1.0, 0.0)), // bright: loss-immune
                    eve_ber: ber(s * t(1.0, 0.0)),
                },
                EveStrategy::PartialTap { fraction } => {
                    let bob_ber = if fraction < 1.0 {
                        let kept = (1.0 - fraction) * eta;
                        ber(s * t((1.0 - kept) / kept, 0.0))
                    } else {
                        // full tap: Bob is left with vacuum plus line noise
                        half_signal_ber(1.0 + n_loss)
                    };
                    AnalyticPrediction { bob_ber, eve_ber: ber(s * t(eve_pen.v_plus(), 0.0)) }
                }
                EveStrategy::Teleport { .. } => AnalyticPrediction {
                    bob_ber: ber(s * t(bob_pen.v_plus(), n_loss)),
                    eve_ber: ber(s * t(eve_pen.v_plus(), 0.0)),
                },
            }
        }
    })
}

/// The measurement penalties a strategy induces on Eve's record and on
/// Bob's beam. Ideal single-quadrature interventions are reported at
/// their limiting (0, inf) values.
pub fn induced_penalties(
    strategy: &EveStrategy,
) -> Result<(MeasurementPenalty, MeasurementPenalty)> {
    Ok(match *strategy {
        EveStrategy::None => (
            MeasurementPenalty::symmetric(f64::INFINITY)?,
            MeasurementPenalty::symmetric(0.0)?,
        ),
        EveStrategy::GuessResend => (
            // guessed quadrature measured ideally, conjugate blind; the
            // resend destroys the conjugate for Bob as well
            MeasurementPenalty::new(0.0, f64::INFINITY)?,
            MeasurementPenalty::new(0.0, f64::INFINITY)?,
        ),
        EveStrategy::SplitSimultaneous => (
            MeasurementPenalty::symmetric(1.0)?,
            MeasurementPenalty::symmetric(1.0)?,
        ),
        EveStrategy::PartialTap { fraction } => {
            if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
                return Err(Error::Domain(format!("tap fraction must lie in [0,1], got {fraction}")));
            }
            let eve = if fraction > 0.0 { (2.0 - fraction) / fraction } else { f64::INFINITY };
            let bob = if fraction < 1.0 { fraction / (1.0 - fraction) } else { f64::INFINITY };
            (MeasurementPenalty::symmetric(eve)?, MeasurementPenalty::symmetric(bob)?)
        }
        EveStrategy::Teleport { pump_gain, gain } => {
            let lambda = match gain {
                TeleportGain::Optimal => lambda_opt(pump_gain)?,
                TeleportGain::Fixed(l) => l,
            };
            (
                MeasurementPenalty::symmetric(classical_channel_penalty(pump_gain)?)?,
                MeasurementPenalty::symmetric(bob_penalty(pump_gain, lambda)?)?,
            )
        }
    })
}

//! Per-symbol eavesdropper interventions.
//!
//! Every strategy is a linear Gaussian map acting on the sampled
//! quadrature values of the transmitted beam, which is exact for all the
//! attacks modeled here. Eve records are normalized to unit signal gain so
//! they can be compared directly against Alice's encoding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::RandomStream;
use crate::teleport::{classical_channel_penalty, lambda_opt};

use super::Protocol;

/// How the teleporter gain is chosen for a [`EveStrategy::Teleport`] attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TeleportGain {
    /// The uncertainty-saturating gain (1 + V_sq^2)/(1 - V_sq^2).
    Optimal,
    /// A fixed gain, which in general over-disturbs Bob.
    Fixed(f64),
}

/// The eavesdropper placed between Alice and the lossy line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EveStrategy {
    /// No interception; Eve's key guesses are fair coin flips.
    None,
    /// Guess a quadrature, measure it ideally, regenerate the beam.
    GuessResend,
    /// Split the beam 50:50 and read both quadratures at once, then
    /// regenerate classically (the optimal simultaneous attack).
    SplitSimultaneous,
    /// Tap off a fraction of the beam and dual-homodyne the tap.
    PartialTap { fraction: f64 },
    /// Teleport the beam, reading the classical channel.
    Teleport { pump_gain: f64, gain: TeleportGain },
}

/// Strategy with all derived constants resolved, ready for the hot loop.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Resolved {
    None,
    GuessResend,
    Split,
    Tap { sqrt_f: f64, sqrt_1mf: f64 },
    Teleport { sqrt_g: f64, sqrt_g1: f64, a_over_l: f64, b_over_l: f64 },
}

impl Resolved {
    pub(crate) fn new(strategy: &EveStrategy) -> Result<Self> {
        Ok(match *strategy {
            EveStrategy::None => Resolved::None,
            EveStrategy::GuessResend => Resolved::GuessResend,
            EveStrategy::SplitSimultaneous => Resolved::Split,
            EveStrategy::PartialTap { fraction } => {
                if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
                    return Err(Error::Domain(format!(
                        "tap fraction must lie in [0,1], got {fraction}"
                    )));
                }
                Resolved::Tap { sqrt_f: fraction.sqrt(), sqrt_1mf: (1.0 - fraction).sqrt() }
            }
            EveStrategy::Teleport { pump_gain, gain } => {
                let lambda = match gain {
                    TeleportGain::Optimal => lambda_opt(pump_gain)?,
                    TeleportGain::Fixed(l) => {
                        classical_channel_penalty(pump_gain)?; // validates G >= 1
                        if !l.is_finite() || l <= 0.0 {
                            return Err(Error::Domain(format!(
                                "teleporter gain must be positive, got {l}"
                            )));
                        }
                        l
                    }
                };
                let sqrt_g = pump_gain.sqrt();
                let sqrt_g1 = (pump_gain - 1.0).sqrt();
                Resolved::Teleport {
                    sqrt_g,
                    sqrt_g1,
                    a_over_l: (lambda * sqrt_g - sqrt_g1) / lambda,
                    b_over_l: (sqrt_g - lambda * sqrt_g1) / lambda,
                }
            }
        })
    }
}

/// What Eve leaves behind for one symbol.
pub(crate) struct Intervention {
    /// Quadrature values of the beam traveling on to Bob.
    pub bob_vals: [f64; 2],
    /// Amplitude gain on the signal reaching Bob (1 except for taps).
    pub bob_gain: f64,
    /// Classically regenerated bright signal: line loss is negligible
    /// against its amplification.
    pub bright: bool,
    /// Bob's beam is a linear map of the original (noise diagnostics are
    /// meaningful).
    pub linear: bool,
    /// Eve's stored measurement records, unit signal gain, per quadrature.
    pub eve_record: [Option<f64>; 2],
}

/// Per-session constants the strategies need.
pub(crate) struct StrategyCtx {
    pub protocol: Protocol,
    /// Per-bin signal amplitude of the protocol encoding (for digital
    /// regeneration in the coherent guessing attack).
    pub amp: f64,
    /// Marginal variance of each quadrature of the transmitted beam,
    /// signal included (mimicked by the squeezed guessing attack).
    pub beam_vars: [f64; 2],
}

pub(crate) fn apply(
    resolved: &Resolved,
    vals: [f64; 2],
    ctx: &StrategyCtx,
    rng: &mut RandomStream,
) -> Intervention {
    match *resolved {
        Resolved::None => Intervention {
            bob_vals: vals,
            bob_gain: 1.0,
            bright: false,
            linear: true,
            eve_record: [None, None],
        },
        Resolved::GuessResend => {
            let guess = usize::from(rng.bit());
            let measured = vals[guess];
            let mut eve_record = [None, None];
            eve_record[guess] = Some(measured);
            match ctx.protocol {
                Protocol::Coherent => {
                    // digital regeneration: her thresholded bit on the
                    // guessed quadrature, a fresh coin on the other,
                    // re-encoded on a new coherent beam
                    let mut bob_vals = [0.0; 2];
                    for (q, v) in bob_vals.iter_mut().enumerate() {
                        let bit = if q == guess { measured > 0.0 } else { rng.bit() };
                        let sign = if bit { 1.0 } else { -1.0 };
                        *v = sign * ctx.amp + rng.standard_normal();
                    }
                    Intervention {
                        bob_vals,
                        bob_gain: 1.0,
                        bright: false,
                        linear: false,
                        eve_record,
                    }
                }
                Protocol::Squeezed => {
                    // the guessed quadrature is regenerated faithfully at
                    // high brightness; the conjugate is replaced by fresh
                    // noise of matching variance from Eve's own apparatus
                    let conj = 1 - guess;
                    let mut bob_vals = vals;
                    bob_vals[conj] = ctx.beam_vars[conj].sqrt() * rng.standard_normal();
                    Intervention {
                        bob_vals,
                        bob_gain: 1.0,
                        bright: true,
                        linear: false,
                        eve_record,
                    }
                }
            }
        }
        Resolved::Split => {
            // 50:50 split, amplitude read on one port, phase on the other;
            // each record carries one unit of vacuum penalty. The records
            // are regenerated classically for Bob.
            let rec = [
                vals[0] + rng.standard_normal(),
                vals[1] - rng.standard_normal(),
            ];
            Intervention {
                bob_vals: rec,
                bob_gain: 1.0,
                bright: true,
                linear: true,
                eve_record: [Some(rec[0]), Some(rec[1])],
            }
        }
        Resolved::Tap { sqrt_f, sqrt_1mf } => {
            let (xv, yv) = (rng.standard_normal(), rng.standard_normal());
            let kept = [sqrt_1mf * vals[0] - sqrt_f * xv, sqrt_1mf * vals[1] - sqrt_f * yv];
            let tapped = [sqrt_f * vals[0] + sqrt_1mf * xv, sqrt_f * vals[1] + sqrt_1mf * yv];
            // dual homodyne on the tapped beam, one more vacuum unit
            let raw = [
                tapped[0] + rng.standard_normal(),
                tapped[1] - rng.standard_normal(),
            ];
            let eve_record = if sqrt_f > 0.0 {
                [Some(raw[0] / sqrt_f), Some(raw[1] / sqrt_f)]
            } else {
                [None, None]
            };
            Intervention {
                bob_vals: kept,
                bob_gain: sqrt_1mf,
                bright: false,
                linear: true,
                eve_record,
            }
        }
        Resolved::Teleport { sqrt_g, sqrt_g1, a_over_l, b_over_l } => {
            let (n1, n2) = (rng.standard_normal(), rng.standard_normal());
            let (m1, m2) = (rng.standard_normal(), rng.standard_normal());
            // classical channel: one entangled beam's worth of noise
            let rec = [
                vals[0] + sqrt_g * n1 + sqrt_g1 * n2,
                vals[1] - sqrt_g * m1 + sqrt_g1 * m2,
            ];
            // teleporter output, normalized by the gain
            let out = [
                vals[0] + a_over_l * n1 - b_over_l * n2,
                vals[1] - a_over_l * m1 + b_over_l * m2,
            ];
            Intervention {
                bob_vals: out,
                bob_gain: 1.0,
                bright: false,
                linear: true,
                eve_record: [Some(rec[0]), Some(rec[1])],
            }
        }
    }
}

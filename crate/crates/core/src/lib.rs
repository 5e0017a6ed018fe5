//! Security analysis toolkit for continuous-variable quantum key
//! distribution with Gaussian-modulated coherent and squeezed states.
//!
//! The crate is organized as:
//!
//! - [`kernel`]: numeric primitives — `erfc`, dB conversion, bracketed
//!   root solving, and a deterministic shardable random stream.
//! - [`quadrature`]: quadrature signal and variance models, SNR/BER
//!   relations, beam-splitter taps and EPR mixing.
//! - [`bounds`]: information transfer coefficients and the security
//!   bounds tying Eve's knowledge to the disturbance Bob can detect.
//! - [`teleport`]: the teleportation attack and its optimal gain.
//! - [`sim`]: a symbol-level Monte Carlo of both protocols under a
//!   pluggable eavesdropper.

pub mod bounds;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod sim;
pub mod teleport;

pub use bounds::{
    check_uncertainty_products, coherent_transfers, lossy_bob_bound, single_quanta_reference,
    squeezed_bob_bound, squeezed_eve_bound, tradeoff_curve, BobBound, BoundForm, ChannelParams,
    CoherentTransfers, CurvePoint, CurveProtocol, MeasurementPenalty, SecurityCurve,
    TransferCoefficient,
};
pub use error::{Error, Result};
pub use kernel::{
    db_to_linear, erfc, linear_to_db, solve_monotone, BitErrorRate, RandomStream, SnrValue,
};
pub use quadrature::{
    ber_from_snr, epr_mix, simultaneous_snr, snr, snr_for_ber, tap_beam, BeamMode, EprBeam,
    EprPairState, Quadrature, QuadratureSignal, QuadratureVariances, TapParams,
};
pub use sim::{
    estimate_ber, induced_penalties, predict, run_session, sift, AnalyticPrediction, BerEstimate,
    EveStrategy, NoiseDiagnostics, Protocol, QuadratureBers, SessionParams, SimReport,
    TeleportGain,
};
pub use teleport::{
    bob_penalty, classical_channel_penalty, lambda_opt, optimality_report, squeezing_parameter,
    TeleportPenalties, TeleporterParams,
};

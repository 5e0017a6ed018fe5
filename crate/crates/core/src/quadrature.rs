//! The Gaussian mode model: signal and noise powers on conjugate
//! quadratures, the SNR -> BER map for binary pulse code modulation,
//! beamsplitter tap algebra and the two-mode (EPR) construction.
//!
//! All spectral powers are normalized to the quantum noise limit, so a
//! coherent beam has unit noise variance on both quadratures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{erfc, solve_monotone, BitErrorRate, SnrValue};

/// Which conjugate quadrature a homodyne measurement addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    /// Amplitude (+) quadrature.
    Amplitude,
    /// Phase (-) quadrature.
    Phase,
}

impl Quadrature {
    pub fn conjugate(self) -> Self {
        match self {
            Quadrature::Amplitude => Quadrature::Phase,
            Quadrature::Phase => Quadrature::Amplitude,
        }
    }
}

/// Noise floors (V+, V-) of a mode in QNL units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureVariances {
    v_plus: f64,
    v_minus: f64,
}

impl QuadratureVariances {
    pub fn new(v_plus: f64, v_minus: f64) -> Result<Self> {
        if !(v_plus.is_finite() && v_minus.is_finite()) || v_plus <= 0.0 || v_minus <= 0.0 {
            return Err(Error::Domain(format!(
                "quadrature variances must be positive, got ({v_plus}, {v_minus})"
            )));
        }
        Ok(QuadratureVariances { v_plus, v_minus })
    }

    /// Coherent / vacuum noise floor: (1, 1).
    pub fn vacuum() -> Self {
        QuadratureVariances { v_plus: 1.0, v_minus: 1.0 }
    }

    /// Minimum-uncertainty amplitude-squeezed state: V- = 1/V+.
    pub fn min_uncertainty_squeezed(v_plus: f64) -> Result<Self> {
        if !v_plus.is_finite() || v_plus <= 0.0 {
            return Err(Error::Domain(format!("squeezed floor must be positive, got {v_plus}")));
        }
        Ok(QuadratureVariances { v_plus, v_minus: 1.0 / v_plus })
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    pub fn get(&self, q: Quadrature) -> f64 {
        match q {
            Quadrature::Amplitude => self.v_plus,
            Quadrature::Phase => self.v_minus,
        }
    }

    pub fn uncertainty_product(&self) -> f64 {
        self.v_plus * self.v_minus
    }
}

/// Signal powers at the encoding rf, in QNL units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSignal {
    vs_plus: f64,
    vs_minus: f64,
}

impl QuadratureSignal {
    pub fn new(vs_plus: f64, vs_minus: f64) -> Result<Self> {
        if !(vs_plus.is_finite() && vs_minus.is_finite()) || vs_plus < 0.0 || vs_minus < 0.0 {
            return Err(Error::Domain(format!(
                "signal powers must be non-negative, got ({vs_plus}, {vs_minus})"
            )));
        }
        Ok(QuadratureSignal { vs_plus, vs_minus })
    }

    pub fn none() -> Self {
        QuadratureSignal { vs_plus: 0.0, vs_minus: 0.0 }
    }

    pub fn vs_plus(&self) -> f64 {
        self.vs_plus
    }

    pub fn vs_minus(&self) -> f64 {
        self.vs_minus
    }

    pub fn get(&self, q: Quadrature) -> f64 {
        match q {
            Quadrature::Amplitude => self.vs_plus,
            Quadrature::Phase => self.vs_minus,
        }
    }
}

/// Splitting ratio and partition noise of a simultaneous-measurement tap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapParams {
    eta_plus: f64,
    partition_noise: QuadratureVariances,
}

impl TapParams {
    pub fn new(eta_plus: f64, partition_noise: QuadratureVariances) -> Result<Self> {
        if !eta_plus.is_finite() || !(0.0..=1.0).contains(&eta_plus) {
            return Err(Error::Domain(format!("splitting ratio must lie in [0,1], got {eta_plus}")));
        }
        Ok(TapParams { eta_plus, partition_noise })
    }

    /// 50:50 split against vacuum.
    pub fn balanced_vacuum() -> Self {
        TapParams { eta_plus: 0.5, partition_noise: QuadratureVariances::vacuum() }
    }

    pub fn eta(&self, q: Quadrature) -> f64 {
        match q {
            Quadrature::Amplitude => self.eta_plus,
            Quadrature::Phase => 1.0 - self.eta_plus,
        }
    }

    pub fn partition_noise(&self) -> &QuadratureVariances {
        &self.partition_noise
    }
}

/// A propagating beam: noise floor plus the signal power it carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMode {
    pub vars: QuadratureVariances,
    pub signal: QuadratureSignal,
}

/// Ratio of signal power to noise power on one quadrature.
pub fn snr(signal: f64, noise: f64) -> Result<SnrValue> {
    if !noise.is_finite() || noise <= 0.0 {
        return Err(Error::Domain(format!("noise power must be positive, got {noise}")));
    }
    SnrValue::new(signal / noise)
}

/// SNR obtainable on one quadrature when both are read out at once
/// through a tap: eta Vs / (eta Vn + (1 - eta) Vm).
pub fn simultaneous_snr(
    signal: f64,
    noise: &QuadratureVariances,
    tap: &TapParams,
    quadrature: Quadrature,
) -> Result<SnrValue> {
    if !signal.is_finite() || signal < 0.0 {
        return Err(Error::Domain(format!("signal power must be non-negative, got {signal}")));
    }
    let eta = tap.eta(quadrature);
    let denom = eta * noise.get(quadrature) + (1.0 - eta) * tap.partition_noise().get(quadrature);
    if denom <= 0.0 {
        // fully degenerate tap: no signal path at all
        return SnrValue::new(0.0);
    }
    SnrValue::new(eta * signal / denom)
}

/// BER of binary pulse code modulation at a given SNR:
/// (1/2) erfc((1/2) sqrt(S/2)).
pub fn ber_from_snr(s: SnrValue) -> BitErrorRate {
    let v = 0.5 * erfc(0.5 * (s.linear() / 2.0).sqrt()).expect("finite SNR");
    BitErrorRate::new(v).expect("erfc maps [0, inf) into (0, 1]")
}

/// Inverse of [`ber_from_snr`]: the SNR at which the channel reaches a
/// target BER.
pub fn snr_for_ber(target: BitErrorRate) -> Result<SnrValue> {
    let b = target.value();
    if b <= 0.0 {
        return Err(Error::Domain("target BER must be strictly positive".into()));
    }
    if b == 0.5 {
        return SnrValue::new(0.0);
    }
    // Invert through z = (1/2) sqrt(S/2): erfc(z) = 2 b, S = 8 z^2.
    let z = solve_monotone(|z| erfc(z).expect("finite"), 2.0 * b, 0.0, 30.0)?;
    SnrValue::new(8.0 * z * z)
}

/// Splits a beam on a beamsplitter of given transmission toward the tap.
/// Returns (kept, tapped); `partition_noise` is the ancilla entering the
/// open port (vacuum by default).
pub fn tap_beam(
    in_vars: &QuadratureVariances,
    in_signal: &QuadratureSignal,
    tap_fraction: f64,
    partition_noise: Option<QuadratureVariances>,
) -> Result<(BeamMode, BeamMode)> {
    if !tap_fraction.is_finite() || !(0.0..=1.0).contains(&tap_fraction) {
        return Err(Error::Domain(format!("tap fraction must lie in [0,1], got {tap_fraction}")));
    }
    let vm = partition_noise.unwrap_or_else(QuadratureVariances::vacuum);
    let f = tap_fraction;
    let mix = |vn: f64, vm: f64, share: f64| share * vn + (1.0 - share) * vm;
    let kept = BeamMode {
        vars: QuadratureVariances::new(
            mix(in_vars.v_plus(), vm.v_plus(), 1.0 - f),
            mix(in_vars.v_minus(), vm.v_minus(), 1.0 - f),
        )?,
        signal: QuadratureSignal::new(
            (1.0 - f) * in_signal.vs_plus(),
            (1.0 - f) * in_signal.vs_minus(),
        )?,
    };
    let tapped = BeamMode {
        vars: QuadratureVariances::new(
            mix(in_vars.v_plus(), vm.v_plus(), f),
            mix(in_vars.v_minus(), vm.v_minus(), f),
        )?,
        signal: QuadratureSignal::new(f * in_signal.vs_plus(), f * in_signal.vs_minus())?,
    };
    Ok((kept, tapped))
}

/// Which output of the 50:50 EPR beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprBeam {
    /// Mode c = sqrt(1/2)(a + ib), the transmitted beam.
    C,
    /// Mode d = sqrt(1/2)(a - ib), the retained beam.
    D,
}

/// Second moments of the entangled pair produced by mixing two
/// amplitude-squeezed sources on a 50:50 beamsplitter, with a pi/2 phase
/// shift on source b.
///
/// Quadrature convention X = a† + a, Y = -i(a - a†), QNL variance 1.
/// The mixing relations are X_c = (X_a - Y_b)/sqrt2, Y_c = (Y_a + X_b)/sqrt2,
/// X_d = (X_a + Y_b)/sqrt2, Y_d = (Y_a - X_b)/sqrt2, so the data string on
/// beam a lives in X_c + X_d and the one on beam b in Y_c - Y_d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprPairState {
    a_vars: QuadratureVariances,
    b_vars: QuadratureVariances,
    /// Signal power impressed on the amplitude quadrature of source a.
    signal_a: f64,
    /// Signal power impressed on the amplitude quadrature of source b.
    signal_b: f64,
}

/// Builds the EPR pair state; signals ride on the amplitude quadratures of
/// sources a and b respectively.
pub fn epr_mix(
    a_vars: QuadratureVariances,
    b_vars: QuadratureVariances,
    signal_a: f64,
    signal_b: f64,
) -> Result<EprPairState> {
    if !(signal_a.is_finite() && signal_b.is_finite()) || signal_a < 0.0 || signal_b < 0.0 {
        return Err(Error::Domain(format!(
            "signal powers must be non-negative, got ({signal_a}, {signal_b})"
        )));
    }
    Ok(EprPairState { a_vars, b_vars, signal_a, signal_b })
}

impl EprPairState {
    pub fn a_vars(&self) -> &QuadratureVariances {
        &self.a_vars
    }

    pub fn b_vars(&self) -> &QuadratureVariances {
        &self.b_vars
    }

    pub fn signal_a(&self) -> f64 {
        self.signal_a
    }

    pub fn signal_b(&self) -> f64 {
        self.signal_b
    }

    /// Variance of the requested quadrature of one output beam, signal
    /// included.
    pub fn output_variance(&self, _beam: EprBeam, q: Quadrature) -> f64 {
        // Both outputs share the same second moments; only the cross
        // correlations distinguish c from d.
        match q {
            Quadrature::Amplitude => {
                (self.a_vars.v_plus() + self.b_vars.v_minus() + self.signal_a) / 2.0
            }
            Quadrature::Phase => {
                (self.a_vars.v_minus() + self.b_vars.v_plus() + self.signal_b) / 2.0
            }
        }
    }

    /// Normalized spectrum of the summed amplitude quadratures,
    /// Var(X_c + X_d)/2 = V+_a + V_s,a.
    pub fn sum_amplitude_spectrum(&self) -> f64 {
        self.a_vars.v_plus() + self.signal_a
    }

    /// Normalized spectrum of the differenced phase quadratures,
    /// Var(Y_c - Y_d)/2 = V+_b + V_s,b.
    pub fn diff_phase_spectrum(&self) -> f64 {
        self.b_vars.v_plus() + self.signal_b
    }

    /// SNR of the signal readable from one output beam alone: half the
    /// signal over the mixed (squeezed + antisqueezed) noise floor.
    pub fn single_mode_extractable_snr(&self, beam: EprBeam, q: Quadrature) -> Result<SnrValue> {
        let signal = match q {
            Quadrature::Amplitude => self.signal_a,
            Quadrature::Phase => self.signal_b,
        };
        let noise = self.output_variance(beam, q) - signal / 2.0;
        snr(signal / 2.0, noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::db_to_linear;

    fn ber(s: f64) -> f64 {
        ber_from_snr(SnrValue::new(s).unwrap()).value()
    }

    #[test]
    fn snr_is_a_plain_ratio() {
        assert_eq!(snr(19.95, 1.0).unwrap().linear(), 19.95);
        assert_eq!(snr(0.0, 1.0).unwrap().linear(), 0.0);
        assert!((snr(1.0, 0.05).unwrap().linear() - 20.0).abs() < 1e-12);
        assert!(snr(1.0, 0.0).is_err());
    }

    #[test]
    fn simultaneous_snr_halves_coherent_input() {
        // coherent 50:50 split against vacuum: exact halving
        let s = simultaneous_snr(
            19.95,
            &QuadratureVariances::vacuum(),
            &TapParams::balanced_vacuum(),
            Quadrature::Amplitude,
        )
        .unwrap();
        assert!((s.linear() - 9.975).abs() < 1e-12);
    }

    #[test]
    fn simultaneous_snr_penalty_negligible_for_classical_beam() {
        let noise = QuadratureVariances::new(1000.0, 1000.0).unwrap();
        let vs = 500.0;
        let s = simultaneous_snr(vs, &noise, &TapParams::balanced_vacuum(), Quadrature::Amplitude)
            .unwrap();
        let ideal = vs / 1000.0;
        // degradation factor 1000/1001
        assert!((s.linear() / ideal - 1000.0 / 1001.0).abs() < 1e-12);
    }

    #[test]
    fn simultaneous_snr_squeezed_degrades_harder() {
        let noise = QuadratureVariances::new(0.05, 20.0).unwrap();
        let s = simultaneous_snr(1.0, &noise, &TapParams::balanced_vacuum(), Quadrature::Amplitude)
            .unwrap();
        assert!((s.linear() - 1.0 / 1.05).abs() < 1e-12);
        // ideal single-quadrature SNR would be 20: degradation factor 21
        let ideal = snr(1.0, 0.05).unwrap().linear();
        assert!((ideal / s.linear() - 21.0).abs() < 1e-9);
    }

    #[test]
    fn simultaneous_snr_degenerate_tap_gives_zero() {
        let tap = TapParams::new(0.0, QuadratureVariances::vacuum()).unwrap();
        let s = simultaneous_snr(1.0, &QuadratureVariances::vacuum(), &tap, Quadrature::Amplitude)
            .unwrap();
        assert_eq!(s.linear(), 0.0);
    }

    #[test]
    fn ber_anchors() {
        // zero signal gives a coin flip
        assert_eq!(ber(0.0), 0.5);
        // the rounded 13 dB operating point sits near 1%
        assert!((ber(db_to_linear(13.0)) - 0.012760697425717927).abs() < 1e-12);
        // halving that SNR roughly quintuples the error rate
        assert!((ber(db_to_linear(13.0) / 2.0) - 0.05713764483359085).abs() < 1e-12);
    }

    #[test]
    fn ber_is_strictly_decreasing() {
        let mut prev = 0.51;
        for i in 0..200 {
            let b = ber(i as f64 * 0.25);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn snr_for_one_percent_ber_is_21_65() {
        let s = snr_for_ber(BitErrorRate::new(0.01).unwrap()).unwrap();
        assert!((s.linear() - 21.64757772421736).abs() < 0.01);
        assert!((s.db().unwrap() - 13.354).abs() < 0.01);
    }

    #[test]
    fn snr_for_ber_roundtrips() {
        assert_eq!(snr_for_ber(BitErrorRate::new(0.5).unwrap()).unwrap().linear(), 0.0);
        for &b in &[0.25, 0.1, 0.01, 0.001, 0.45] {
            let s = snr_for_ber(BitErrorRate::new(b).unwrap()).unwrap();
            assert!(
                (ber_from_snr(s).value() - b).abs() < 1e-9,
                "roundtrip at {b}"
            );
        }
        assert!(snr_for_ber(BitErrorRate::new(0.0).unwrap()).is_err());
    }

    #[test]
    fn tap_extremes() {
        let vars = QuadratureVariances::new(0.3, 4.0).unwrap();
        let sig = QuadratureSignal::new(5.0, 2.0).unwrap();
        let (kept, tapped) = tap_beam(&vars, &sig, 0.0, None).unwrap();
        assert_eq!(kept.vars, vars);
        assert_eq!(kept.signal, sig);
        assert_eq!(tapped.vars, QuadratureVariances::vacuum());
        assert_eq!(tapped.signal, QuadratureSignal::none());
        let (kept, tapped) = tap_beam(&vars, &sig, 1.0, None).unwrap();
        assert_eq!(tapped.vars, vars);
        assert_eq!(tapped.signal, sig);
        assert_eq!(kept.vars, QuadratureVariances::vacuum());
        assert!(tap_beam(&vars, &sig, 1.5, None).is_err());
    }

    #[test]
    fn sixteen_percent_tap_gives_eve_transfer_0_08() {
        // coherent input; Eve taps 16% and reads both quadratures of the
        // tapped beam through a 50:50 split
        let (_, tapped) = tap_beam(
            &QuadratureVariances::vacuum(),
            &QuadratureSignal::new(1.0, 1.0).unwrap(),
            0.16,
            None,
        )
        .unwrap();
        let eve = simultaneous_snr(
            tapped.signal.vs_plus(),
            &tapped.vars,
            &TapParams::balanced_vacuum(),
            Quadrature::Amplitude,
        )
        .unwrap();
        // transfer relative to the ideal input SNR of 1.0
        assert!((eve.linear() - 0.08).abs() < 1e-12);
    }

    #[test]
    fn tap_conserves_signal_power() {
        let vars = QuadratureVariances::new(0.05, 20.0).unwrap();
        let sig = QuadratureSignal::new(21.65, 3.0).unwrap();
        for i in 0..=20 {
            let f = i as f64 / 20.0;
            let (kept, tapped) = tap_beam(&vars, &sig, f, None).unwrap();
            assert!(
                (kept.signal.vs_plus() + tapped.signal.vs_plus() - sig.vs_plus()).abs() < 1e-12
            );
            assert!(
                (kept.signal.vs_minus() + tapped.signal.vs_minus() - sig.vs_minus()).abs() < 1e-12
            );
        }
    }

    #[test]
    fn epr_mix_of_coherent_sources_is_vacuum_limited() {
        let state = epr_mix(
            QuadratureVariances::vacuum(),
            QuadratureVariances::vacuum(),
            0.0,
            0.0,
        )
        .unwrap();
        for beam in [EprBeam::C, EprBeam::D] {
            for q in [Quadrature::Amplitude, Quadrature::Phase] {
                assert!((state.output_variance(beam, q) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn epr_mix_antisqueezing_dominates_single_beam() {
        // V+ = 0.05, V- = 20 both sources, no signal: Var(X_c) = 10.025,
        // from the covariance propagation (0.05 + 20)/2.
        let vars = QuadratureVariances::new(0.05, 20.0).unwrap();
        let state = epr_mix(vars, vars, 0.0, 0.0).unwrap();
        assert!((state.output_variance(EprBeam::C, Quadrature::Amplitude) - 10.025).abs() < 1e-12);
    }

    #[test]
    fn epr_recombination_spectra() {
        let vars = QuadratureVariances::min_uncertainty_squeezed(0.05).unwrap();
        let state = epr_mix(vars, vars, 21.65, 21.65).unwrap();
        assert!((state.sum_amplitude_spectrum() - (21.65 + 0.05)).abs() < 1e-12);
        assert!((state.diff_phase_spectrum() - (21.65 + 0.05)).abs() < 1e-12);
    }

    #[test]
    fn single_beam_leaks_negligible_information() {
        let vars = QuadratureVariances::new(0.05, 20.0).unwrap();
        let state = epr_mix(vars, vars, 21.65, 0.0).unwrap();
        let s = state
            .single_mode_extractable_snr(EprBeam::C, Quadrature::Amplitude)
            .unwrap();
        assert!((s.linear() - 21.65 / 20.05).abs() < 1e-12);
        // BER about 30%: essentially blind
        assert!((ber_from_snr(s).value() - 0.3017).abs() < 1e-3);
        // coherent sources: the 50:50 split exactly halves the SNR
        let coh = epr_mix(
            QuadratureVariances::vacuum(),
            QuadratureVariances::vacuum(),
            10.0,
            0.0,
        )
        .unwrap();
        let s = coh
            .single_mode_extractable_snr(EprBeam::C, Quadrature::Amplitude)
            .unwrap();
        assert!((s.linear() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn min_uncertainty_constructor_saturates_product() {
        for &v in &[0.01, 0.05, 0.5, 1.0, 3.0] {
            let vars = QuadratureVariances::min_uncertainty_squeezed(v).unwrap();
            assert!((vars.uncertainty_product() - 1.0).abs() < 1e-15);
        }
    }
}

//! The analytic security engine: generalized-uncertainty products,
//! transfer-coefficient bounds for the coherent and two-mode squeezed
//! protocols, the loss-modified bound, and trade-off curve generation.
//!
//! Two printed right-hand sides of the squeezed bounds are mutually
//! inconsistent with their own equality cases (the worked example
//! T_E = T_B = 0.09 at V_n = 0.05 saturates 4 V_n^2, not 4 V_n), so the
//! internally consistent squared forms are the default and the printed
//! forms sit behind [`BoundForm::Printed`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{BitErrorRate, SnrValue};
use crate::quadrature::ber_from_snr;

/// Added-noise pair (V+, V-) of a measurement or intervention, normalized
/// to the gain between the system observable and the apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementPenalty {
    v_plus: f64,
    v_minus: f64,
}

impl MeasurementPenalty {
    pub fn new(v_plus: f64, v_minus: f64) -> Result<Self> {
        if v_plus.is_nan() || v_minus.is_nan() || v_plus < 0.0 || v_minus < 0.0 {
            return Err(Error::Domain(format!(
                "measurement penalties must be non-negative, got ({v_plus}, {v_minus})"
            )));
        }
        Ok(MeasurementPenalty { v_plus, v_minus })
    }

    pub fn symmetric(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    pub fn product(&self) -> f64 {
        penalty_product(self.v_plus, self.v_minus)
    }
}

/// Product of two penalties with the ideal-homodyne limit 0 * inf taken as
/// 1 (the boundary value of eta -> 1 in the tap algebra).
fn penalty_product(a: f64, b: f64) -> f64 {
    if (a == 0.0 && b.is_infinite()) || (b == 0.0 && a.is_infinite()) {
        1.0
    } else {
        a * b
    }
}

/// Output-over-input SNR ratio, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct TransferCoefficient(f64);

impl TransferCoefficient {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain(format!("transfer coefficient must lie in [0,1], got {value}")));
        }
        Ok(TransferCoefficient(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Channel description for the squeezed protocol bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    transmission_eta: f64,
    squeezed_floor_vn: f64,
}

impl ChannelParams {
    pub fn new(transmission_eta: f64, squeezed_floor_vn: f64) -> Result<Self> {
        if !transmission_eta.is_finite() || !(transmission_eta > 0.0 && transmission_eta <= 1.0) {
            return Err(Error::Domain(format!(
                "transmission efficiency must lie in (0,1], got {transmission_eta}"
            )));
        }
        if !squeezed_floor_vn.is_finite() || squeezed_floor_vn <= 0.0 {
            return Err(Error::Domain(format!(
                "squeezed noise floor must be positive, got {squeezed_floor_vn}"
            )));
        }
        Ok(ChannelParams { transmission_eta, squeezed_floor_vn })
    }

    pub fn transmission_eta(&self) -> f64 {
        self.transmission_eta
    }

    pub fn squeezed_floor_vn(&self) -> f64 {
        self.squeezed_floor_vn
    }
}

/// Which algebraic form of the squeezed/lossy bounds to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BoundForm {
    /// RHS 4 V_n^2 (resp. 1/(4 V_n^2)); consistent with the equality cases
    /// of the transfer-coefficient definitions. Default.
    #[default]
    Corrected,
    /// RHS as printed: 4 V_n (resp. 1/(4 V_n)). Compatibility only.
    Printed,
}

/// True iff V_E+ V_E- >= 1, V_B+ V_E- >= 1 and V_E+ V_B- >= 1 (within
/// 1e-12 slack).
pub fn check_uncertainty_products(eve: &MeasurementPenalty, bob: &MeasurementPenalty) -> bool {
    const SLACK: f64 = 1e-12;
    penalty_product(eve.v_plus(), eve.v_minus()) >= 1.0 - SLACK
        && penalty_product(bob.v_plus(), eve.v_minus()) >= 1.0 - SLACK
        && penalty_product(eve.v_plus(), bob.v_minus()) >= 1.0 - SLACK
}

/// Eve's transfers and Bob's maximal transfers for the coherent protocol
/// (unit input noise on both quadratures).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentTransfers {
    pub t_eve_plus: TransferCoefficient,
    pub t_eve_minus: TransferCoefficient,
    pub t_bob_plus_max: TransferCoefficient,
    pub t_bob_minus_max: TransferCoefficient,
}

/// Coherent-protocol transfers: T_E = 1/(1 + V_E) per quadrature, and the
/// minimal-disturbance Bob transfers obtained at V_B = 1/V_E on the
/// conjugate quadrature, which give T_B = 1 - T_E.
pub fn coherent_transfers(eve: &MeasurementPenalty) -> Result<CoherentTransfers> {
    if eve.v_plus() == 0.0 && eve.v_minus() == 0.0 {
        return Err(Error::Domain(
            "a simultaneous measurement cannot be penalty-free on both quadratures".into(),
        ));
    }
    let t_e = |v_e: f64| 1.0 / (1.0 + v_e);
    let t_eve_plus = t_e(eve.v_plus());
    let t_eve_minus = t_e(eve.v_minus());
    Ok(CoherentTransfers {
        t_eve_plus: TransferCoefficient::new(t_eve_plus)?,
        t_eve_minus: TransferCoefficient::new(t_eve_minus)?,
        // V_B+ = 1/V_E-  =>  T_B+ = 1 - T_E-, and conversely
        t_bob_plus_max: TransferCoefficient::new(1.0 - t_eve_minus)?,
        t_bob_minus_max: TransferCoefficient::new(1.0 - t_eve_plus)?,
    })
}

/// Maximum signal transfer Eve can obtain from the squeezed protocol:
/// T_E <= 2 V_n / (2 V_n + 1).
pub fn squeezed_eve_bound(vn: f64) -> Result<TransferCoefficient> {
    if !vn.is_finite() || vn <= 0.0 {
        return Err(Error::Domain(format!("noise floor must be positive, got {vn}")));
    }
    TransferCoefficient::new(2.0 * vn / (2.0 * vn + 1.0))
}

/// Maximum T_B compatible with Eve taking `t_eve` in the lossless squeezed
/// protocol: T_E T_B / ((1-T_E)(1-T_B)) <= 4 V_n^2 (corrected form).
pub fn squeezed_bob_bound(
    vn: f64,
    t_eve: TransferCoefficient,
    form: BoundForm,
) -> Result<TransferCoefficient> {
    lossy_bob_bound(vn, t_eve, 1.0, form).map(|b| b.t_bob)
}

/// Result of the loss-modified Bob bound: under heavy loss Bob may be able
/// to extract nothing, which is reported as a flagged zero rather than an
/// error so curves remain total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BobBound {
    pub t_bob: TransferCoefficient,
    pub feasible: bool,
}

/// Maximum T_B when Eve hides inside a line of transmission `eta`:
/// (1/T_E - 1)(1/T_B - 1 - (1-eta)/(2 eta V_n)) >= 1/(4 V_n^2)
/// (corrected form; printed form uses 1/(4 V_n)). Reduces exactly to the
/// lossless bound at eta = 1.
pub fn lossy_bob_bound(
    vn: f64,
    t_eve: TransferCoefficient,
    eta: f64,
    form: BoundForm,
) -> Result<BobBound> {
    if !vn.is_finite() || vn <= 0.0 {
        return Err(Error::Domain(format!("noise floor must be positive, got {vn}")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("transmission efficiency must lie in (0,1], got {eta}")));
    }
    let te = t_eve.value();
    if te <= 0.0 || te >= 1.0 {
        return Err(Error::Domain(format!("t_eve must lie strictly in (0,1), got {te}")));
    }
    let te_max = squeezed_eve_bound(vn)?.value();
    if te > te_max + 1e-12 {
        return Err(Error::Infeasible(format!(
            "t_eve {te} exceeds the uncertainty-principle maximum {te_max} at V_n = {vn}"
        )));
    }
    let excess = 1.0 / te - 1.0;
    let loss_term = (1.0 - eta) / (2.0 * eta * vn);
    let rhs = match form {
        BoundForm::Corrected => 1.0 / (4.0 * vn * vn),
        BoundForm::Printed => 1.0 / (4.0 * vn),
    };
    // 1/T_B >= 1 + loss_term + rhs/excess
    let inv_tb = 1.0 + loss_term + rhs / excess;
    let t_bob = 1.0 / inv_tb;
    if t_bob <= 0.0 || !t_bob.is_finite() {
        return Ok(BobBound { t_bob: TransferCoefficient::new(0.0)?, feasible: false });
    }
    Ok(BobBound { t_bob: TransferCoefficient::new(t_bob)?, feasible: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveProtocol {
    Coherent,
    Squeezed,
}

/// One point of an Eve-BER versus Bob-BER trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub eve_ber: f64,
    pub bob_ber: f64,
    pub t_eve: f64,
    pub t_bob: f64,
    pub v_eve: f64,
}

/// Trade-off curve between Eve's and Bob's bit error rates, parametrized
/// by Eve's symmetric penalty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityCurve {
    pub protocol: CurveProtocol,
    pub vn: f64,
    pub eta: f64,
    pub base_snr: f64,
    pub points: Vec<CurvePoint>,
}

/// Sweeps Eve's symmetric penalty V_E over a logarithmic grid from 1e3
/// down to its minimum of 1, computing at each point her transfer, the
/// minimal-disturbance Bob transfer, and both BERs at `base_snr`.
pub fn tradeoff_curve(
    protocol: CurveProtocol,
    params: &ChannelParams,
    base_snr: SnrValue,
    n_points: usize,
    form: BoundForm,
) -> Result<SecurityCurve> {
    if n_points < 2 {
        return Err(Error::Domain(format!("curve needs at least 2 points, got {n_points}")));
    }
    const V_EVE_TOP: f64 = 1e3;
    let vn = params.squeezed_floor_vn();
    let eta = params.transmission_eta();
    let s = base_snr.linear();
    let mut points = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let frac = i as f64 / (n_points - 1) as f64;
        // logarithmic from 1e3 down to the infeasibility boundary V_E = 1
        let v_eve = V_EVE_TOP.powf(1.0 - frac);
        let (t_eve, t_bob) = match protocol {
            CurveProtocol::Coherent => {
                let t_e = 1.0 / (1.0 + v_eve);
                (t_e, 1.0 - t_e)
            }
            CurveProtocol::Squeezed => {
                let t_e = 2.0 * vn / (2.0 * vn + v_eve);
                let bound = lossy_bob_bound(vn, TransferCoefficient::new(t_e)?, eta, form)?;
                (t_e, bound.t_bob.value())
            }
        };
        points.push(CurvePoint {
            eve_ber: ber_from_snr(SnrValue::new(t_eve * s)?).value(),
            bob_ber: ber_from_snr(SnrValue::new(t_bob * s)?).value(),
            t_eve,
            t_bob,
            v_eve,
        });
    }
    Ok(SecurityCurve { protocol, vn, eta, base_snr: s, points })
}

/// Textbook intercept-resend reference for an ideal single-quanta (BB84)
/// system: Bob's BER rises as f/4 while Eve's falls as 1/2 - f/4. A
/// deliberately simple linear comparison series for the trade-off plots.
pub fn single_quanta_reference(intercept_fraction: f64) -> Result<(BitErrorRate, BitErrorRate)> {
    if !intercept_fraction.is_finite() || !(0.0..=1.0).contains(&intercept_fraction) {
        return Err(Error::Domain(format!(
            "intercept fraction must lie in [0,1], got {intercept_fraction}"
        )));
    }
    let bob = intercept_fraction / 4.0;
    let eve = 0.5 - bob;
    Ok((BitErrorRate::new(eve)?, BitErrorRate::new(bob)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pen(a: f64, b: f64) -> MeasurementPenalty {
        MeasurementPenalty::new(a, b).unwrap()
    }

    fn tc(v: f64) -> TransferCoefficient {
        TransferCoefficient::new(v).unwrap()
    }

    #[test]
    fn uncertainty_products_boundary_and_violations() {
        assert!(check_uncertainty_products(&pen(1.0, 1.0), &pen(1.0, 1.0)));
        // teleportation case: eve symmetric at 3, bob symmetric at 1/3
        assert!(check_uncertainty_products(
            &pen(3.0, 3.0),
            &pen(1.0 / 3.0, 1.0 / 3.0)
        ));
        assert!(!check_uncertainty_products(&pen(0.5, 0.5), &pen(1.0, 1.0)));
        // homodyne limit (0, inf) against a blinded conjugate
        assert!(check_uncertainty_products(
            &pen(0.0, f64::INFINITY),
            &pen(0.0, f64::INFINITY)
        ));
    }

    #[test]
    fn coherent_symmetric_point() {
        let t = coherent_transfers(&pen(1.0, 1.0)).unwrap();
        assert_eq!(t.t_eve_plus.value(), 0.5);
        assert_eq!(t.t_bob_plus_max.value(), 0.5);
    }

    #[test]
    fn coherent_te_008_gives_tb_092() {
        let v_e = 1.0 / 0.08 - 1.0; // 11.5
        let t = coherent_transfers(&pen(v_e, v_e)).unwrap();
        assert!((t.t_eve_plus.value() - 0.08).abs() < 1e-12);
        assert!((t.t_bob_plus_max.value() - 0.92).abs() < 1e-12);
    }

    #[test]
    fn coherent_perfect_amplitude_tap_blinds_bob_phase() {
        let t = coherent_transfers(&pen(0.0, f64::INFINITY)).unwrap();
        assert_eq!(t.t_eve_plus.value(), 1.0);
        assert_eq!(t.t_bob_minus_max.value(), 0.0);
        assert!(coherent_transfers(&pen(0.0, 0.0)).is_err());
    }

    #[test]
    fn coherent_optimum_sums_to_one() {
        for i in 1..60 {
            let v_e = 10f64.powf(-2.0 + i as f64 * 0.1);
            let t = coherent_transfers(&pen(v_e, v_e)).unwrap();
            assert!((t.t_eve_plus.value() + t.t_bob_plus_max.value() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eve_bound_anchors() {
        assert!((squeezed_eve_bound(0.05).unwrap().value() - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(squeezed_eve_bound(0.5).unwrap().value(), 0.5);
        assert!(squeezed_eve_bound(1e-9).unwrap().value() < 1e-8);
        assert!(squeezed_eve_bound(0.0).is_err());
    }

    #[test]
    fn eve_bound_below_coherent_for_strong_squeezing() {
        for &vn in &[0.01, 0.1, 0.3, 0.49] {
            assert!(squeezed_eve_bound(vn).unwrap().value() < 0.5);
        }
    }

    #[test]
    fn ideal_eve_makes_bob_symmetric() {
        // V_n = 0.05: T_E = T_B = 1/11
        let te = squeezed_eve_bound(0.05).unwrap();
        let tb = squeezed_bob_bound(0.05, te, BoundForm::Corrected).unwrap();
        assert!((tb.value() - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn vanishing_interception_leaves_bob_unharmed() {
        let tb = squeezed_bob_bound(0.05, tc(1e-9), BoundForm::Corrected).unwrap();
        assert!(tb.value() > 1.0 - 1e-5);
    }

    #[test]
    fn half_qnl_floor_reduces_to_coherent_tradeoff() {
        // at V_n = 0.5 the corrected bound collapses to T_E + T_B = 1
        let tb = squeezed_bob_bound(0.5, tc(0.25), BoundForm::Corrected).unwrap();
        assert!((tb.value() - 0.75).abs() < 1e-12);
        for i in 1..20 {
            let te = i as f64 * 0.02;
            let tb = squeezed_bob_bound(0.5, tc(te), BoundForm::Corrected).unwrap();
            assert!((tb.value() - (1.0 - te)).abs() < 1e-12, "te {te}");
        }
    }

    #[test]
    fn printed_form_disagrees_away_from_half() {
        let corrected = squeezed_bob_bound(0.05, tc(0.05), BoundForm::Corrected).unwrap();
        let printed = squeezed_bob_bound(0.05, tc(0.05), BoundForm::Printed).unwrap();
        assert!(printed.value() > corrected.value());
    }

    #[test]
    fn bob_bound_rejects_super_maximal_eve() {
        assert!(matches!(
            squeezed_bob_bound(0.05, tc(0.2), BoundForm::Corrected),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn lossy_bound_matches_lossless_at_unit_eta() {
        for i in 1..=10 {
            let vn = i as f64 * 0.05;
            let te_max = squeezed_eve_bound(vn).unwrap().value();
            for j in 1..=10 {
                let te = te_max * j as f64 / 11.0;
                let a = squeezed_bob_bound(vn, tc(te), BoundForm::Corrected).unwrap();
                let b = lossy_bob_bound(vn, tc(te), 1.0, BoundForm::Corrected).unwrap();
                assert!((a.value() - b.t_bob.value()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lossy_bound_golden_value() {
        // frozen after first verified evaluation of the closed form
        let b = lossy_bob_bound(0.05, tc(0.05), 0.95, BoundForm::Corrected).unwrap();
        assert!(b.feasible);
        assert!((b.t_bob.value() - 0.14728682170542636).abs() < 1e-12);
    }

    #[test]
    fn heavy_loss_starves_bob() {
        let b = lossy_bob_bound(0.05, tc(0.05), 1e-6, BoundForm::Corrected).unwrap();
        assert!(b.t_bob.value() < 1e-4);
    }

    #[test]
    fn curve_is_monotone_and_respects_uncertainty() {
        let params = ChannelParams::new(1.0, 0.05).unwrap();
        let curve = tradeoff_curve(
            CurveProtocol::Squeezed,
            &params,
            SnrValue::new(21.65).unwrap(),
            100,
            BoundForm::Corrected,
        )
        .unwrap();
        for w in curve.points.windows(2) {
            assert!(w[1].eve_ber <= w[0].eve_ber + 1e-12);
            assert!(w[1].bob_ber >= w[0].bob_ber - 1e-12);
        }
        // every emitted pair maps back to penalties satisfying Eqs. (5)-(7)
        for p in &curve.points {
            let v_e = p.v_eve;
            let v_b = 2.0 * 0.05 * (1.0 / p.t_bob - 1.0);
            assert!(check_uncertainty_products(
                &pen(v_e, v_e),
                &pen(v_b, v_b)
            ));
        }
    }

    #[test]
    fn squeezed_endpoint_reaches_24_percent() {
        let params = ChannelParams::new(1.0, 0.05).unwrap();
        let curve = tradeoff_curve(
            CurveProtocol::Squeezed,
            &params,
            SnrValue::new(21.64757772421736).unwrap(),
            200,
            BoundForm::Corrected,
        )
        .unwrap();
        let last = curve.points.last().unwrap();
        assert!((last.eve_ber - 0.2415).abs() < 1e-3);
        assert!((last.bob_ber - 0.2415).abs() < 1e-3);
    }

    #[test]
    fn coherent_endpoint_is_symmetric() {
        let params = ChannelParams::new(1.0, 1.0).unwrap();
        let curve = tradeoff_curve(
            CurveProtocol::Coherent,
            &params,
            SnrValue::from_db(13.0).unwrap(),
            50,
            BoundForm::Corrected,
        )
        .unwrap();
        let last = curve.points.last().unwrap();
        assert!((last.t_eve - 0.5).abs() < 1e-12);
        assert!((last.eve_ber - 0.0571376).abs() < 1e-4);
        assert!((last.bob_ber - 0.0571376).abs() < 1e-4);
    }

    #[test]
    fn symmetric_attack_is_optimal_on_grid() {
        // for fixed V_E+ V_E- = 1, the symmetric point maximizes
        // min(T_E+, T_E-) for the coherent readout
        let sym = coherent_transfers(&pen(1.0, 1.0)).unwrap();
        let sym_min = sym.t_eve_plus.value().min(sym.t_eve_minus.value());
        for i in 1..100 {
            let v = 10f64.powf(-2.0 + i as f64 * 0.04);
            if (v - 1.0).abs() < 1e-9 {
                continue;
            }
            let t = coherent_transfers(&pen(v, 1.0 / v)).unwrap();
            let m = t.t_eve_plus.value().min(t.t_eve_minus.value());
            assert!(m < sym_min, "asymmetric V_E = {v} should be worse");
        }
    }

    #[test]
    fn single_quanta_reference_anchors() {
        let (eve, bob) = single_quanta_reference(1.0).unwrap();
        assert_eq!((eve.value(), bob.value()), (0.25, 0.25));
        let (eve, bob) = single_quanta_reference(0.0).unwrap();
        assert_eq!((eve.value(), bob.value()), (0.5, 0.0));
        let (eve, bob) = single_quanta_reference(0.5).unwrap();
        assert_eq!((eve.value(), bob.value()), (0.375, 0.125));
        assert!(single_quanta_reference(1.2).is_err());
    }
}

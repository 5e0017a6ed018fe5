//! The teleportation eavesdropper: penalties carried by the teleporter's
//! classical channel and output, the optimal teleporter gain, and the
//! saturation of the generalized uncertainty bound V_E V_B = 1.

use serde::Serialize;

use crate::bounds::MeasurementPenalty;
use crate::error::{Error, Result};

/// Operating point of a lossless continuous-variable teleporter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleporterParams {
    /// Parametric pump gain G of the squeezers supplying the entanglement.
    pub pump_gain_g: f64,
    /// Teleporter gain lambda.
    pub gain_lambda: f64,
    /// Classical-measurement amplification K. Recorded only: penalties are
    /// normalized to signal gain, so K cancels.
    pub amplification_k: f64,
}

/// Penalty assembly at a given pump gain with the optimal teleporter gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportPenalties {
    pub eve: MeasurementPenalty,
    pub bob: MeasurementPenalty,
    pub signal_gain: f64,
}

fn check_pump_gain(g: f64) -> Result<()> {
    if !g.is_finite() || g < 1.0 {
        return Err(Error::Domain(format!("pump gain must satisfy G >= 1, got {g}")));
    }
    Ok(())
}

/// Eve's penalty from reading the teleporter's classical channel: 2G - 1,
/// symmetric on both quadratures.
pub fn classical_channel_penalty(g: f64) -> Result<f64> {
    check_pump_gain(g)?;
    Ok(2.0 * g - 1.0)
}

/// Squeezed variance of the entanglement resource: (sqrt G - sqrt(G-1))^2.
pub fn squeezing_parameter(g: f64) -> Result<f64> {
    check_pump_gain(g)?;
    let s = g.sqrt() - (g - 1.0).sqrt();
    Ok(s * s)
}

/// The teleporter gain that saturates the uncertainty bound:
/// (1 + V_sq^2)/(1 - V_sq^2). Undefined at G = 1 where V_sq = 1.
pub fn lambda_opt(g: f64) -> Result<f64> {
    check_pump_gain(g)?;
    if g == 1.0 {
        return Err(Error::DegenerateGain);
    }
    let vsq2 = squeezing_parameter(g)?.powi(2);
    Ok((1.0 + vsq2) / (1.0 - vsq2))
}

/// Bob's penalty for ideal quadrature measurements of the teleporter
/// output, normalized to the signal gain:
/// ((lambda sqrt G - sqrt(G-1))^2 + (sqrt G - lambda sqrt(G-1))^2) / lambda^2.
pub fn bob_penalty(g: f64, lambda: f64) -> Result<f64> {
    check_pump_gain(g)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!("teleporter gain must be positive, got {lambda}")));
    }
    let sg = g.sqrt();
    let sg1 = (g - 1.0).sqrt();
    let a = lambda * sg - sg1;
    let b = sg - lambda * sg1;
    Ok((a * a + b * b) / (lambda * lambda))
}

/// Assembles (V_E, lambda_opt, V_B) at pump gain g and checks saturation
/// of the uncertainty product to 1e-9.
pub fn optimality_report(g: f64) -> Result<TeleportPenalties> {
    let v_e = classical_channel_penalty(g)?;
    let lambda = lambda_opt(g)?;
    let v_b = bob_penalty(g, lambda)?;
    debug_assert!((v_e * v_b - 1.0).abs() <= 1e-9, "saturation failed at g = {g}");
    Ok(TeleportPenalties {
        eve: MeasurementPenalty::symmetric(v_e)?,
        bob: MeasurementPenalty::symmetric(v_b)?,
        signal_gain: lambda,
    })
}

//! Energy measurement of the data qubit: `H = a (-i∂x)² (-i∂z)`
//! couples the mode energy to a pointer coordinate `z`, rigidly
//! translating the mode-`n` component's packet at rate `a n² π²`.
//! The impulsive approximation freezes the (x, y) coefficients for the
//! coupling's duration.

use std::f64::consts::PI;

use crate::bell::PointerPacket;
use crate::error::{Error, Result};
use crate::well::WellWavefunction;

#[derive(Debug, Clone, Copy)]
pub struct EnergyMeter {
    /// Coupling constant `a`.
    pub coupling: f64,
    /// Interaction duration `δt`.
    pub duration: f64,
    /// Initial pointer packet width.
    pub sigma_z: f64,
}

impl EnergyMeter {
    pub fn new(coupling: f64, duration: f64, sigma_z: f64) -> Result<Self> {
        if coupling == 0.0 {
            return Err(Error::InvalidConfig { reason: "meter coupling a must be nonzero".into() });
        }
        if !(duration > 0.0) {
            return Err(Error::NonPositiveDuration { value: duration });
        }
        if !(sigma_z > 0.0) {
            return Err(Error::InvalidConfig { reason: "pointer width must be positive".into() });
        }
        Ok(Self { coupling, duration, sigma_z })
    }

    /// Packet translation rate for data mode `n`: `a n² π²`.
    pub fn shift_rate(&self, n: u8) -> f64 {
        self.coupling * (n as f64 * PI).powi(2)
    }
}

/// Attach a fresh pointer (packets centered at z = 0) to the state.
pub fn attach_meter(state: &WellWavefunction, meter: &EnergyMeter) -> Result<WellWavefunction> {
    let packet = PointerPacket::new(0.0, meter.sigma_z)?;
    let mut packets = [packet, packet];
    packets[0].shift_rate = meter.shift_rate(1);
    packets[1].shift_rate = meter.shift_rate(2);
    Ok(WellWavefunction::with_parts(
        state.coefficients().clone(),
        state.global_phase(),
        Some(packets),
    ))
}

/// Advance the meter interaction to elapsed time `t ≤ δt`: each data
/// mode's packet translates by `a t n² π²` from its current center;
/// the spectral coefficients stay frozen.
pub fn apply_energy_meter(
    state: &WellWavefunction,
    meter: &EnergyMeter,
    t: f64,
) -> Result<WellWavefunction> {
    if t < 0.0 || t > meter.duration + 1e-12 {
        return Err(Error::TimeOutOfRange { t, total: meter.duration });
    }
    let mut packets = match state.pointer() {
        Some(p) => *p,
        None => {
            return Err(Error::UnsupportedState {
                reason: "no pointer attached; call attach_meter first".into(),
            })
        }
    };
    for (idx, packet) in packets.iter_mut().enumerate() {
        let rate = meter.shift_rate(idx as u8 + 1);
        packet.center += rate * t;
        packet.shift_rate = rate;
    }
    Ok(WellWavefunction::with_parts(
        state.coefficients().clone(),
        state.global_phase(),
        Some(packets),
    ))
}

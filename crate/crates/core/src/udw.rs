//! Eternally coupled Unruh-DeWitt detector at first order in the coupling.
//!
//! The detector only samples the field at the resonant wavenumber
//! `k* = (energy_gap - omega0 + v0 k0) / v0`, so its fringe pattern is that of
//! a monochromatic wave regardless of the packet width.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{omega, DetectionResult, DetectorSpec, Interferometer, Port, PulseProfile};

/// `|A0|` above which the first-order treatment is flagged.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;
/// Default margin threshold for [`detectability_margin`].
pub const DEFAULT_DETECTABILITY_ETA: f64 = 1.0;

/// Detuning `g(k) = energy_gap - delta_omega0 - k v0` between detector and mode `k`.
pub fn detuning(pulse: &PulseProfile, det: &DetectorSpec, k: f64) -> f64 {
    det.energy_gap() - pulse.delta_omega0() - k * pulse.group_velocity()
}

/// Resonant wavenumber, the zero of [`detuning`].
pub fn k_star(pulse: &PulseProfile, det: &DetectorSpec) -> f64 {
    (det.energy_gap() - pulse.omega0() + pulse.group_velocity() * pulse.k0())
        / pulse.group_velocity()
}

/// Amplitude magnitude
/// `A0 = (pi delta^2 / 2)^(1/4) g / (omega(k*) v0) exp(-(k* - k0)^2 delta^2)`.
pub fn base_amplitude(pulse: &PulseProfile, det: &DetectorSpec) -> Result<f64> {
    let ks = k_star(pulse, det);
    let w = omega(ks, pulse.mass());
    if w == 0.0 {
        return Err(Error::InfraredSingular { k: ks });
    }
    let d = pulse.delta();
    let u = (ks - pulse.k0()) * d;
    Ok(
        (PI * d * d / 2.0).powf(0.25) * det.coupling() / (w * pulse.group_velocity())
            * (-u * u).exp(),
    )
}

/// Amplitude for the packet travelling a path of length `l`: `e^{i k* l} A0`.
pub fn path_amplitude(pulse: &PulseProfile, det: &DetectorSpec, l: f64) -> Result<Complex64> {
    if !(l.is_finite() && l > 0.0) {
        return Err(invalid(
            "l",
            format!("path length must be positive, got {l}"),
        ));
    }
    let a0 = base_amplitude(pulse, det)?;
    Ok(Complex64::from_polar(a0, k_star(pulse, det) * l))
}

/// Intermediate quantities of the amplitude computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeChain {
    pub k_star: f64,
    pub base_amplitude: f64,
    pub a_l1: Complex64,
    pub a_l2: Complex64,
}

pub fn amplitude_chain(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    ifm: &Interferometer,
) -> Result<AmplitudeChain> {
    Ok(AmplitudeChain {
        k_star: k_star(pulse, det),
        base_amplitude: base_amplitude(pulse, det)?,
        a_l1: path_amplitude(pulse, det, ifm.l1())?,
        a_l2: path_amplitude(pulse, det, ifm.l2())?,
    })
}

/// Excitation probability of a detector at `port`:
/// `(1 +- cos(k* dl + theta)) |A0|^2 / 2`.
pub fn udw_probability(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det: &DetectorSpec,
    port: Port,
) -> Result<DetectionResult> {
    udw_probability_with_limit(pulse, ifm, det, port, PERTURBATIVE_LIMIT)
}

/// As [`udw_probability`] with a custom perturbativity threshold on `|A0|`.
pub fn udw_probability_with_limit(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det: &DetectorSpec,
    port: Port,
    limit: f64,
) -> Result<DetectionResult> {
    let a0 = base_amplitude(pulse, det)?;
    let half = 0.5 * a0 * a0;
    let mut r = DetectionResult::from_modulation(
        port,
        ifm.theta(),
        half,
        half,
        k_star(pulse, det) * ifm.delta_l(),
    );
    r.perturbativity_warning = a0 > limit;
    Ok(r)
}

/// How far the resonance sits from the packet spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detectability {
    /// `|k* - k0| delta`.
    pub margin: f64,
    /// `exp(-2 (k* - k0)^2 delta^2)`, the suppression of `|A0|^2`.
    pub suppression: f64,
    /// True when `margin <= eta`.
    pub detectable: bool,
}

pub fn detectability_margin(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    eta: f64,
) -> Result<Detectability> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    let margin = (k_star(pulse, det) - pulse.k0()).abs() * pulse.delta();
    Ok(Detectability {
        margin,
        suppression: (-2.0 * margin * margin).exp(),
        detectable: margin <= eta,
    })
}

/// Comparison of the interferometer scales with the switching length
/// `v0 delta_chi` of a Gaussian-switched detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTimeCheck {
    pub switching_length: f64,
    /// `|dl| <= v0 delta_chi`.
    pub covers_path_difference: bool,
    /// `delta <= v0 delta_chi`.
    pub covers_packet: bool,
}

/// `None` for eternal switching, for which the check is vacuous.
pub fn coherence_time_check(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det: &DetectorSpec,
) -> Option<CoherenceTimeCheck> {
    let (_, delta_chi) = det.gaussian_window()?;
    let len = pulse.group_velocity() * delta_chi;
    Some(CoherenceTimeCheck {
        switching_length: len,
        covers_path_difference: ifm.delta_l().abs() <= len,
        covers_packet: pulse.delta() <= len,
    })
}

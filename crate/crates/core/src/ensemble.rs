//! Gaussian-switched detectors averaged over the switching centre `t_chi`.
//!
//! Two exponent coefficients are supported for the switching integral
//! `I(g) = sqrt(2 pi) delta_chi exp(i g t_chi - c delta_chi^2 g^2)`:
//! `c = 1/2`, the value of the integral, and `c = 8`, kept so that published
//! closed forms can be reproduced term by term. Every quantity below is
//! written for general `c`; the two modes agree after `delta_chi -> 4 delta_chi`
//! up to an overall factor.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::classical::{fringe_visibility, VisibilityCurvePoint, DEFAULT_THETA_SAMPLES};
use crate::error::{invalid, Error, Result};
use crate::model::{
    omega, DetectionResult, DetectorSpec, Interferometer, Normalization, Port, PulseProfile,
};
use crate::udw::k_star;

/// Separation factor between scales that marks the quantum and classical limits.
pub const LIMIT_SEPARATION: f64 = 50.0;

/// Choice of exponent coefficient in the switching integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CoefficientMode {
    /// `c = 1/2`.
    #[default]
    Corrected,
    /// `c = 8`.
    PaperVerbatim,
}

impl CoefficientMode {
    pub fn time_coefficient(self) -> f64 {
        match self {
            CoefficientMode::Corrected => 0.5,
            CoefficientMode::PaperVerbatim => 8.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientMode::Corrected => "corrected",
            CoefficientMode::PaperVerbatim => "paper_verbatim",
        }
    }

    /// Factor relating the long-window limit of the ensemble probability to the
    /// eternal result: `sqrt(pi) / sqrt(2 c)`.
    pub fn quantum_limit_factor(self) -> f64 {
        (PI / (2.0 * self.time_coefficient())).sqrt()
    }
}

impl fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoefficientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(CoefficientMode::Corrected),
            "paper_verbatim" => Ok(CoefficientMode::PaperVerbatim),
            other => Err(invalid(
                "mode",
                format!("expected `corrected` or `paper_verbatim`, got `{other}`"),
            )),
        }
    }
}

fn window(det: &DetectorSpec) -> Result<(f64, f64)> {
    det.gaussian_window()
        .ok_or(Error::RequiresGaussianSwitching)
}

/// Switching integral `integral chi(t) e^{i g t} dt` in closed form.
pub fn switched_time_integral(
    det: &DetectorSpec,
    g: f64,
    mode: CoefficientMode,
) -> Result<Complex64> {
    switched_time_integral_with_coefficient(det, g, mode.time_coefficient())
}

/// As [`switched_time_integral`] with an explicit exponent coefficient.
pub fn switched_time_integral_with_coefficient(
    det: &DetectorSpec,
    g: f64,
    c: f64,
) -> Result<Complex64> {
    let (t_chi, delta_chi) = window(det)?;
    let magnitude = (2.0 * PI).sqrt() * delta_chi * (-c * delta_chi * delta_chi * g * g).exp();
    Ok(Complex64::from_polar(magnitude, g * t_chi))
}

/// Wavenumber `k_medstar` dominating the ensemble average: the mean of `k*` and
/// `k0` weighted by `c v0^2 delta_chi^2` and `delta^2`.
pub fn k_medstar(pulse: &PulseProfile, det: &DetectorSpec, mode: CoefficientMode) -> Result<f64> {
    Ok(Weights::new(pulse, det, mode)?.k_medstar)
}

struct Weights {
    /// `c v0^2 delta_chi^2`
    switching: f64,
    /// `delta^2`
    packet: f64,
    k_star: f64,
    k_medstar: f64,
    delta_chi: f64,
}

impl Weights {
    fn new(pulse: &PulseProfile, det: &DetectorSpec, mode: CoefficientMode) -> Result<Self> {
        let (_, delta_chi) = window(det)?;
        let v0 = pulse.group_velocity();
        let switching = mode.time_coefficient() * v0 * v0 * delta_chi * delta_chi;
        let packet = pulse.delta() * pulse.delta();
        let ks = k_star(pulse, det);
        Ok(Self {
            switching,
            packet,
            k_star: ks,
            k_medstar: (switching * ks + packet * pulse.k0()) / (switching + packet),
            delta_chi,
        })
    }

    fn total(&self) -> f64 {
        self.switching + self.packet
    }
}

/// Ensemble correlator `C(l1, l2)` with its dominant wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlator {
    pub value: Complex64,
    pub k_medstar: f64,
    pub mode: CoefficientMode,
}

/// Closed form of `(1 / delta_chi) integral dt_chi A_{l1} A_{l2}^*`, with
/// `W = c v0^2 delta_chi^2 + delta^2`:
///
/// `C = pi delta delta_chi g^2 / (2 v0 omega(k_medstar)^2 sqrt(W))
///      exp(-dl^2 / (8 W)) exp(-2 c v0^2 delta_chi^2 delta^2 (k* - k0)^2 / W)
///      exp(-i k_medstar dl)`, `dl = l2 - l1`.
///
/// The mode-frequency factor is evaluated at `k_medstar`, which is accurate
/// when the spectrum is sharp (`k0 delta >> 1`).
pub fn ensemble_correlator(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    l1: f64,
    l2: f64,
    mode: CoefficientMode,
) -> Result<Correlator> {
    let w = Weights::new(pulse, det, mode)?;
    let om = omega(w.k_medstar, pulse.mass());
    if om == 0.0 {
        return Err(Error::InfraredSingular { k: w.k_medstar });
    }
    let v0 = pulse.group_velocity();
    let g = det.coupling();
    let total = w.total();
    let dl = l2 - l1;
    let prefactor = 0.5 * PI * pulse.delta() * w.delta_chi * g * g / (v0 * om * om * total.sqrt());
    let miss = w.k_star - pulse.k0();
    let decay = -dl * dl / (8.0 * total) - 2.0 * w.switching * w.packet * miss * miss / total;
    Ok(Correlator {
        value: Complex64::from_polar(prefactor * decay.exp(), -w.k_medstar * dl),
        k_medstar: w.k_medstar,
        mode,
    })
}

/// Correlators of one interferometer configuration, reusable across phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsemblePattern {
    pub c11: Complex64,
    pub c22: Complex64,
    pub c12: Complex64,
    pub c21: Complex64,
    pub k_medstar: f64,
}

impl EnsemblePattern {
    pub fn new(
        pulse: &PulseProfile,
        ifm: &Interferometer,
        det: &DetectorSpec,
        mode: CoefficientMode,
    ) -> Result<Self> {
        let (l1, l2) = (ifm.l1(), ifm.l2());
        let c12 = ensemble_correlator(pulse, det, l1, l2, mode)?;
        Ok(Self {
            c11: ensemble_correlator(pulse, det, l1, l1, mode)?.value,
            c22: ensemble_correlator(pulse, det, l2, l2, mode)?.value,
            c12: c12.value,
            c21: ensemble_correlator(pulse, det, l2, l1, mode)?.value,
            k_medstar: c12.k_medstar,
        })
    }

    /// `(C11 + C22 +- e^{-i theta} C12 +- e^{i theta} C21) / 4`.
    pub fn probability(&self, port: Port, theta: f64) -> f64 {
        let s = port.sign();
        let phase = Complex64::from_polar(1.0, theta);
        let sum = self.c11 + self.c22 + (phase.conj() * self.c12 + phase * self.c21) * s;
        debug_assert!(
            sum.im.abs()
                <= 1e-12 * (self.c11.norm() + self.c22.norm() + 2.0 * self.c12.norm())
                    + f64::MIN_POSITIVE,
            "ensemble probability has imaginary part {}",
            sum.im
        );
        0.25 * sum.re
    }

    pub fn result(&self, port: Port, theta: f64) -> DetectionResult {
        let mut r = DetectionResult::from_modulation(
            port,
            theta,
            0.25 * (self.c11.re + self.c22.re),
            0.5 * self.c12.norm(),
            -self.c12.arg(),
        );
        r.probability = self.probability(port, theta);
        r.normalization = Normalization::Relative;
        r
    }
}

/// Ensemble-averaged excitation probability at `port`, up to the overall
/// normalisation of the `t_chi` average.
pub fn ensemble_probability(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det: &DetectorSpec,
    port: Port,
    mode: CoefficientMode,
) -> Result<DetectionResult> {
    Ok(EnsemblePattern::new(pulse, ifm, det, mode)?.result(port, ifm.theta()))
}

/// Scanned fringe visibility for each switching width in `delta_chis`.
/// The switching centre is taken from `det_template`.
pub fn visibility_vs_coherence(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det_template: &DetectorSpec,
    delta_chis: &[f64],
    mode: CoefficientMode,
) -> Result<Vec<VisibilityCurvePoint>> {
    window(det_template)?;
    if delta_chis.is_empty() {
        return Err(Error::EmptyRange("no switching widths given".into()));
    }
    if delta_chis.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("delta_chi", "grid must be strictly increasing"));
    }
    delta_chis
        .iter()
        .map(|&dc| {
            let det = det_template.with_delta_chi(dc)?;
            let pattern = EnsemblePattern::new(pulse, ifm, &det, mode)?;
            let visibility = fringe_visibility(
                |th| pattern.probability(Port::D1, th),
                DEFAULT_THETA_SAMPLES,
            )?;
            Ok(VisibilityCurvePoint {
                delta_l: ifm.delta_l(),
                visibility,
                delta_chi: Some(dc),
            })
        })
        .collect()
}

/// Weight of the classical-limit pattern:
/// `delta_chi exp(-2 c v0^2 delta_chi^2 (k0 - k*)^2)`.
pub fn classical_limit_prefactor(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    mode: CoefficientMode,
) -> Result<f64> {
    let (_, delta_chi) = window(det)?;
    let v0 = pulse.group_velocity();
    let miss = pulse.k0() - k_star(pulse, det);
    let c = mode.time_coefficient();
    Ok(delta_chi * (-2.0 * c * v0 * v0 * delta_chi * delta_chi * miss * miss).exp())
}

/// Which limit a configuration sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `v0 delta_chi >= 50 max(delta, |dl|)`.
    Quantum,
    Intermediate,
    /// `v0 delta_chi <= delta / 50`.
    Classical,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Quantum => "quantum",
            Regime::Intermediate => "intermediate",
            Regime::Classical => "classical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn regime(pulse: &PulseProfile, ifm: &Interferometer, det: &DetectorSpec) -> Result<Regime> {
    let (_, delta_chi) = window(det)?;
    let len = pulse.group_velocity() * delta_chi;
    let scale = pulse.delta().max(ifm.delta_l().abs());
    Ok(if len >= LIMIT_SEPARATION * scale {
        Regime::Quantum
    } else if len <= pulse.delta() / LIMIT_SEPARATION {
        Regime::Classical
    } else {
        Regime::Intermediate
    })
}

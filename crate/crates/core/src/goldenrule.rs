//! Fermi golden-rule picture of detector excitation and the naive fringe
//! pattern it suggests for a two-arm interferometer.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, require_finite, Error, Result};
use crate::model::{omega, DetectionResult, Interferometer, Normalization, Port};
use crate::oracle::{integrate_1d, Tolerance};

/// `|x|` at which `sinc^2 x = 1/2`.
pub const SINC2_HALF_POWER: f64 = 1.391_557_378_251_510_2;

/// Direction of the transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// Detector absorbs a quantum; resonance at `omega = energy_gap`.
    Absorption,
    /// Detector emits a quantum; resonance at `omega = -energy_gap`.
    Emission,
}

impl Transition {
    fn detuning(self, delta_e: f64, omega: f64) -> f64 {
        match self {
            Transition::Absorption => delta_e - omega,
            Transition::Emission => delta_e + omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincKernelResult {
    /// `|H'|^2 sinc^2(d t / 2) t^2` with detuning `d`.
    pub probability: f64,
    /// `|d t / 2|`, the position inside the resonance window.
    pub window_eta: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// First-order transition probability after time `t` for a single mode of
/// frequency `omega`.
pub fn sinc_transition_probability(
    delta_e: f64,
    omega: f64,
    t: f64,
    matrix_element: f64,
    transition: Transition,
) -> Result<SincKernelResult> {
    require_finite("delta_e", delta_e)?;
    require_finite("omega", omega)?;
    require_finite("matrix_element", matrix_element)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let x = 0.5 * transition.detuning(delta_e, omega) * t;
    let s = sinc(x);
    Ok(SincKernelResult {
        probability: matrix_element * matrix_element * s * s * t * t,
        window_eta: x.abs(),
    })
}

/// Mode density `density(k)` supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct SpectralBand<F> {
    pub lo: f64,
    pub hi: f64,
    pub density: F,
}

/// Constant density over `[lo, hi]`.
pub fn uniform_band(lo: f64, hi: f64, density: f64) -> SpectralBand<impl Fn(f64) -> f64 + Copy> {
    SpectralBand {
        lo,
        hi,
        density: move |_| density,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenRuleRate {
    /// Accumulated probability divided by `t`.
    pub rate: f64,
    /// Probability accumulated after time `t`.
    pub accumulated_probability: f64,
    /// Large-`t` limit `2 pi |H'|^2 sum density(k_res) / |d omega / dk|`.
    pub asymptotic_rate: f64,
    /// Whether a resonant mode lies inside the band.
    pub resonant: bool,
}

/// Absorption rate from a band of modes, integrating the sinc kernel over the
/// band at finite `t`.
pub fn golden_rule_rate<F>(
    delta_e: f64,
    band: &SpectralBand<F>,
    matrix_element: f64,
    t: f64,
    mass: f64,
) -> Result<GoldenRuleRate>
where
    F: Fn(f64) -> f64,
{
    require_finite("delta_e", delta_e)?;
    require_finite("band.lo", band.lo)?;
    require_finite("band.hi", band.hi)?;
    if !(band.lo < band.hi) {
        return Err(Error::EmptyRange(format!(
            "band [{}, {}]",
            band.lo, band.hi
        )));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(invalid("mass", format!("must be non-negative, got {mass}")));
    }
    let h2 = matrix_element * matrix_element;
    // The kernel oscillates with period 2 pi / t in omega, and |d omega/dk| <= 1.
    let tol = Tolerance::new(0.0, 1e-9).with_panel_width(0.25 * PI / t);
    let r = integrate_1d(
        |k| {
            let s = sinc(0.5 * (delta_e - omega(k, mass)) * t);
            Complex64::new((band.density)(k) * h2 * s * s * t * t, 0.0)
        },
        band.lo,
        band.hi,
        &tol,
    );
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
        });
    }

    let mut asymptotic_rate = 0.0;
    let mut resonant = false;
    if delta_e >= mass {
        let k_res = (delta_e * delta_e - mass * mass).sqrt();
        let roots: &[f64] = if k_res == 0.0 {
            &[0.0]
        } else {
            &[k_res, -k_res]
        };
        for &k in roots {
            if k >= band.lo && k <= band.hi {
                resonant = true;
                asymptotic_rate += if k == 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * PI * h2 * (band.density)(k) * delta_e / k.abs()
                };
            }
        }
    }
    Ok(GoldenRuleRate {
        rate: r.value.re / t,
        accumulated_probability: r.value.re,
        asymptotic_rate,
        resonant,
    })
}

/// Fringe factor `2 (1 + cos(theta + k dl))` for a mode of wavenumber `k`
/// reaching the detector through both arms.
pub fn inter_package_modulation(theta: f64, delta_l: f64, k: f64) -> f64 {
    2.0 * (1.0 + (theta + k * delta_l).cos())
}

/// Wavenumber of the on-shell mode at energy `delta_e`.
pub fn on_shell_wavenumber(delta_e: f64, mass: f64) -> Result<f64> {
    if !(delta_e > mass) {
        return Err(Error::BelowMassShell { delta_e, mass });
    }
    Ok((delta_e * delta_e - mass * mass).sqrt())
}

/// Pattern predicted by treating the detector as a golden-rule absorber of
/// the single on-shell mode: full visibility at every path difference.
/// Flagged non-physical and relative.
pub fn naive_golden_rule_probability(
    ifm: &Interferometer,
    delta_e: f64,
    mass: f64,
    port: Port,
) -> Result<DetectionResult> {
    let k = on_shell_wavenumber(delta_e, mass)?;
    let mut r = DetectionResult::from_modulation(port, ifm.theta(), 0.5, 0.5, k * ifm.delta_l());
    r.normalization = Normalization::Relative;
    r.non_physical = true;
    Ok(r)
}

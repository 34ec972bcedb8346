//! Independent numerical routes used to check the closed forms.
//!
//! Everything here integrates the defining expressions directly and shares no
//! code with the closed-form modules beyond the pulse profile and dispersion.

mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use quadrature::{
    integrate_1d, integrate_2d, integrate_2d_tensor, kronrod15, QuadratureResult, Rect, Tolerance,
    RULE_EVALUATIONS,
};

use crate::error::{invalid, Error, Result};
use crate::model::{omega, DetectorSpec, PulseProfile, Switching, TAIL_SIGMAS};

/// Ratio `v0 delta_chi / delta` of the Gaussian window used to stand in for an
/// eternal coupling. The residual error of the substitution scales as the
/// inverse square of this ratio.
pub const ETERNAL_EMULATION_FACTOR: f64 = 1.0e4;

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `integral exp(-a x^2 + b x + c) dx = sqrt(pi / a) exp(b^2 / (4 a) + c)`.
pub fn gaussian_closed(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    (cplx(PI) / a).sqrt() * (b * b / (a * 4.0) + c).exp()
}

/// Closed and numerical values of a complex Gaussian integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCheck {
    pub closed: Complex64,
    pub numeric: QuadratureResult,
}

impl GaussianCheck {
    pub fn relative_discrepancy(&self) -> f64 {
        (self.numeric.value - self.closed).norm() / self.closed.norm()
    }
}

/// Evaluates `integral exp(-a x^2 + b x + c) dx` both ways. Requires `Re a > 0`.
pub fn gaussian_integral_check(a: Complex64, b: Complex64, c: Complex64) -> Result<GaussianCheck> {
    if !(a.re > 0.0) || !a.im.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(invalid(
            "a",
            format!("Gaussian integral needs Re a > 0, got {a}"),
        ));
    }
    let center = b.re / (2.0 * a.re);
    let half = (45.0 / a.re).sqrt();
    let (lo, hi) = (center - half, center + half);
    let max_freq = b.im.abs() + 2.0 * a.im.abs() * lo.abs().max(hi.abs());
    let mut tol = Tolerance::new(0.0, 1e-12);
    tol.abs = 1e-15 * (PI / a.re).sqrt() * (b.re * b.re / (4.0 * a.re) + c.re).exp();
    if max_freq > 0.0 {
        tol = tol.with_panel_width((0.5 * PI / max_freq).min(hi - lo));
    }
    let numeric = integrate_1d(|x| (-a * x * x + b * x + c).exp(), lo, hi, &tol);
    Ok(GaussianCheck {
        closed: gaussian_closed(a, b, c),
        numeric,
    })
}

/// `integral chi(t) exp(i g t) dt` for a Gaussian window, by quadrature.
pub fn switching_integral_numeric(t_chi: f64, delta_chi: f64, g: f64) -> Result<QuadratureResult> {
    if !(delta_chi > 0.0) {
        return Err(invalid("delta_chi", "must be positive"));
    }
    let half = 10.0 * delta_chi;
    let mut tol = Tolerance::new(1e-15 * delta_chi, 1e-13);
    if g != 0.0 {
        tol = tol.with_panel_width((0.5 * PI / g.abs()).min(half));
    }
    // Integrate in s = t - t_chi and restore the phase exactly afterwards.
    let r = integrate_1d(
        |s| Complex64::from_polar((-s * s / (2.0 * delta_chi * delta_chi)).exp(), g * s),
        -half,
        half,
        &tol,
    );
    Ok(QuadratureResult {
        value: r.value * Complex64::from_polar(1.0, g * t_chi),
        ..r
    })
}

/// Raw parameters of the detector-field overlap. Kept local so the oracle does
/// not reuse the closed-form modules.
struct Overlap {
    coupling: f64,
    v0: f64,
    k_res: f64,
    mass: f64,
}

impl Overlap {
    fn new(pulse: &PulseProfile, det: &DetectorSpec) -> Self {
        let v0 = pulse.k0() / omega(pulse.k0(), pulse.mass());
        let dw0 = omega(pulse.k0(), pulse.mass()) - v0 * pulse.k0();
        Self {
            coupling: det.coupling(),
            v0,
            k_res: (det.energy_gap() - dw0) / v0,
            mass: pulse.mass(),
        }
    }

    fn detuning(&self, k: f64) -> f64 {
        self.v0 * (self.k_res - k)
    }
}

fn clip_massless(lo: f64, mass: f64) -> f64 {
    if mass == 0.0 && lo <= 0.0 {
        f64::EPSILON
    } else {
        lo
    }
}

fn amplitude_tolerance() -> Tolerance {
    Tolerance::new(0.0, 1e-11)
}

/// Path amplitude `A_L` from the mode sum
/// `g integral dk f~(k) e^{ikL} I(k) / (2 omega_k sqrt(2 pi))`, where `I(k)` is
/// the switching integral at detuning `g(k)`.
///
/// An eternal detector is replaced by a Gaussian window centred on the packet
/// arrival `l / v0` with `v0 delta_chi = ETERNAL_EMULATION_FACTOR * delta`.
pub fn brute_force_path_amplitude(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    l: f64,
) -> Result<Complex64> {
    let ov = Overlap::new(pulse, det);
    let (t_chi, delta_chi) = match det.switching() {
        Switching::Gaussian { t_chi, delta_chi } => (t_chi, delta_chi),
        Switching::Eternal => (l / ov.v0, ETERNAL_EMULATION_FACTOR * pulse.delta() / ov.v0),
    };
    let r = path_amplitude_gaussian(pulse, &ov, l, t_chi, delta_chi, &amplitude_tolerance());
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
        });
    }
    Ok(r.value)
}

fn path_amplitude_gaussian(
    pulse: &PulseProfile,
    ov: &Overlap,
    l: f64,
    t_chi: f64,
    delta_chi: f64,
    tol: &Tolerance,
) -> QuadratureResult {
    let d2 = pulse.delta() * pulse.delta();
    let s = 0.5 * ov.v0 * ov.v0 * delta_chi * delta_chi;
    let precision = d2 + s;
    let center = (d2 * pulse.k0() + s * ov.k_res) / precision;
    let sigma = (0.5 / precision).sqrt();
    let lo = clip_massless(center - TAIL_SIGMAS * sigma, ov.mass);
    let hi = center + TAIL_SIGMAS * sigma;

    // e^{ikL} e^{i g t_chi} = e^{i k_res v0 t_chi} e^{ik(L - v0 t_chi)}
    let drift = l - ov.v0 * t_chi;
    let carrier = Complex64::from_polar(1.0, ov.k_res * ov.v0 * t_chi);
    let a = cplx(0.5 / (delta_chi * delta_chi));
    let mut tol = *tol;
    let mut width = sigma;
    if drift != 0.0 {
        width = width.min(0.5 * PI / drift.abs());
    }
    tol = tol.with_panel_width(width);
    let pref = ov.coupling / (2.0 * PI).sqrt();
    let r = integrate_1d(
        |k| {
            let g = ov.detuning(k);
            let switching = gaussian_closed(a, Complex64::new(0.0, g), cplx(0.0));
            let phase = Complex64::from_polar(1.0, k * drift);
            switching * phase * (pulse.spectral(k) / (2.0 * omega(k, ov.mass)))
        },
        lo,
        hi,
        &tol,
    );
    QuadratureResult {
        value: r.value * carrier * pref,
        ..r
    }
}

/// Ensemble correlator `(1 / delta_chi) integral dt_chi A_{l1} A_{l2}^*` with the
/// `t_chi` average carried out analytically, which collapses it onto a single
/// wavenumber integral. Uses the exact switching integral.
pub fn brute_force_correlator(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    l1: f64,
    l2: f64,
) -> Result<Complex64> {
    let (_, delta_chi) = det
        .gaussian_window()
        .ok_or(Error::RequiresGaussianSwitching)?;
    let ov = Overlap::new(pulse, det);
    let d2 = pulse.delta() * pulse.delta();
    let s = 0.5 * ov.v0 * ov.v0 * delta_chi * delta_chi;
    let precision = 2.0 * (d2 + s);
    let center = (d2 * pulse.k0() + s * ov.k_res) / (d2 + s);
    let sigma = (0.5 / precision).sqrt();
    let lo = clip_massless(center - TAIL_SIGMAS * sigma, ov.mass);
    let hi = center + TAIL_SIGMAS * sigma;
    let dl = l2 - l1;
    let mut tol = Tolerance::new(0.0, 1e-11);
    let mut width = sigma;
    if dl != 0.0 {
        width = width.min(0.5 * PI / dl.abs());
    }
    tol = tol.with_panel_width(width);

    let a = cplx(0.5 / (delta_chi * delta_chi));
    let r = integrate_1d(
        |k| {
            let g = ov.detuning(k);
            let switching =
                gaussian_closed(a, Complex64::new(0.0, g), cplx(0.0)) / (2.0 * PI).sqrt();
            let weight = ov.coupling * pulse.spectral(k) / (2.0 * omega(k, ov.mass));
            let amp = switching * weight;
            Complex64::from_polar(amp.norm_sqr(), -k * dl)
        },
        lo,
        hi,
        &tol,
    );
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
        });
    }
    // integral dt_chi e^{i(g(k) - g(k')) t_chi} = (2 pi / v0) delta(k - k')
    Ok(r.value * (2.0 * PI / (ov.v0 * delta_chi)))
}

/// Ensemble correlator by direct quadrature over `t_chi` of the product of two
/// brute-force path amplitudes, each itself a wavenumber integral.
pub fn direct_correlator(
    pulse: &PulseProfile,
    det: &DetectorSpec,
    l1: f64,
    l2: f64,
) -> Result<Complex64> {
    let (_, delta_chi) = det
        .gaussian_window()
        .ok_or(Error::RequiresGaussianSwitching)?;
    let ov = Overlap::new(pulse, det);
    let d2 = pulse.delta() * pulse.delta();
    let precision = d2 + 0.5 * ov.v0 * ov.v0 * delta_chi * delta_chi;
    // |A_{l1} A_{l2}^*| is Gaussian in x = v0 t_chi with variance `precision`.
    let sigma_t = precision.sqrt() / ov.v0;
    let mid = 0.5 * (l1 + l2) / ov.v0;
    let lo = mid - TAIL_SIGMAS * sigma_t;
    let hi = mid + TAIL_SIGMAS * sigma_t;

    let inner = Tolerance::new(0.0, 1e-12);
    let failed = std::cell::Cell::new(false);
    let outer = integrate_1d(
        |t_chi| {
            let a1 = path_amplitude_gaussian(pulse, &ov, l1, t_chi, delta_chi, &inner);
            let a2 = path_amplitude_gaussian(pulse, &ov, l2, t_chi, delta_chi, &inner);
            if !(a1.converged && a2.converged) {
                failed.set(true);
            }
            a1.value * a2.value.conj()
        },
        lo,
        hi,
        &Tolerance::new(0.0, 1e-10).with_panel_width(sigma_t),
    );
    if failed.get() || !outer.converged {
        return Err(Error::QuadratureNotConverged {
            error_estimate: outer.error_estimate,
            evaluations: outer.evaluations,
        });
    }
    Ok(outer.value / delta_chi)
}

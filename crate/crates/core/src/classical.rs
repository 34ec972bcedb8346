//! Classical (intensity) detector: time-integrated photon flux at each port.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{DetectionResult, Interferometer, Normalization, Port, PulseProfile};
use crate::oracle::{integrate_1d, QuadratureResult, Tolerance};
use crate::propagation::{arrival_window, two_path_envelope};

/// Default number of phase samples in a fringe scan.
pub const DEFAULT_THETA_SAMPLES: usize = 256;
/// Smallest phase grid accepted by [`fringe_visibility`].
pub const MIN_THETA_SAMPLES: usize = 16;

/// `v0 integral |F(0, t)|^2 dt` by adaptive quadrature with default tolerances.
pub fn classical_probability_numeric(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    port: Port,
) -> Result<f64> {
    let r = classical_probability_quadrature(pulse, ifm, port, &Tolerance::default())?;
    Ok(r.value.re)
}

/// As [`classical_probability_numeric`] but returns the full quadrature record.
pub fn classical_probability_quadrature(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    port: Port,
    tol: &Tolerance,
) -> Result<QuadratureResult> {
    let v0 = pulse.group_velocity();
    let (lo, hi) = arrival_window(pulse, ifm);
    let tol = tol.with_panel_width(pulse.delta() / v0);
    let r = integrate_1d(
        |t| Complex64::new(two_path_envelope(pulse, ifm, port, 0.0, t).norm_sqr(), 0.0),
        lo,
        hi,
        &tol,
    );
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            error_estimate: r.error_estimate * v0,
            evaluations: r.evaluations,
        });
    }
    Ok(QuadratureResult {
        value: r.value * v0,
        error_estimate: r.error_estimate * v0,
        ..r
    })
}

/// Closed form `(1 +- cos(k0 dl + theta) exp(-(dl / (2 sqrt2 delta))^2)) / 2`.
pub fn classical_probability_closed(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    port: Port,
) -> DetectionResult {
    two_packet_pattern(pulse.k0(), pulse.delta(), ifm, port)
}

fn two_packet_pattern(k: f64, delta: f64, ifm: &Interferometer, port: Port) -> DetectionResult {
    let dl = ifm.delta_l();
    DetectionResult::from_modulation(
        port,
        ifm.theta(),
        0.5,
        0.5 * overlap_envelope(delta, dl),
        k * dl,
    )
}

fn overlap_envelope(delta: f64, delta_l: f64) -> f64 {
    let x = delta_l / (2.0 * std::f64::consts::SQRT_2 * delta);
    (-x * x).exp()
}

/// Analytic fringe visibility `exp(-(dl / (2 sqrt2 delta))^2)`.
pub fn envelope_visibility(pulse: &PulseProfile, delta_l: f64) -> f64 {
    overlap_envelope(pulse.delta(), delta_l)
}

/// Fringe visibility `(max - min) / (max + min)` of `probability` over a phase scan.
///
/// The extremes are located on a uniform grid of `theta_samples` points on
/// `[0, 2 pi)` and then polished by golden-section search inside the
/// neighbouring grid cells. Returns zero when `max + min` vanishes.
pub fn fringe_visibility<F>(probability: F, theta_samples: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (grid, imax, imin) = scan(&probability, theta_samples)?;
    let h = 2.0 * PI / theta_samples as f64;
    let theta_at = |i: usize| i as f64 * h;
    let max =
        golden_extremum(&probability, theta_at(imax) - h, theta_at(imax) + h, true).max(grid[imax]);
    let min = golden_extremum(&probability, theta_at(imin) - h, theta_at(imin) + h, false)
        .min(grid[imin]);
    Ok(ratio(max, min))
}

/// Plain grid estimate of the visibility, without polishing the extremes.
pub fn grid_visibility<F>(probability: F, theta_samples: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (grid, imax, imin) = scan(&probability, theta_samples)?;
    Ok(ratio(grid[imax], grid[imin]))
}

fn ratio(max: f64, min: f64) -> f64 {
    let sum = max + min;
    if sum == 0.0 {
        0.0
    } else {
        (max - min) / sum
    }
}

fn scan<F: Fn(f64) -> f64>(probability: &F, samples: usize) -> Result<(Vec<f64>, usize, usize)> {
    if samples < MIN_THETA_SAMPLES {
        return Err(invalid(
            "theta_samples",
            format!("need at least {MIN_THETA_SAMPLES}, got {samples}"),
        ));
    }
    let h = 2.0 * PI / samples as f64;
    let grid: Vec<f64> = (0..samples).map(|i| probability(i as f64 * h)).collect();
    let mut imax = 0;
    let mut imin = 0;
    for (i, &v) in grid.iter().enumerate() {
        if v > grid[imax] {
            imax = i;
        }
        if v < grid[imin] {
            imin = i;
        }
    }
    Ok((grid, imax, imin))
}

fn golden_extremum<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |x: f64| sign * f(x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    for _ in 0..80 {
        if (b - a).abs() <= 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    sign * fc.min(fd)
}

/// Contrast threshold that defines a coherence length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoherenceConvention {
    /// Visibility falls to `1 / sqrt(2)`.
    #[default]
    InvSqrt2,
    /// Visibility falls to `1 / 2`.
    Half,
    /// Visibility falls to `1 / e`.
    InvE,
}

impl CoherenceConvention {
    pub fn threshold(self) -> f64 {
        match self {
            CoherenceConvention::InvSqrt2 => FRAC_1_SQRT_2,
            CoherenceConvention::Half => 0.5,
            CoherenceConvention::InvE => (-1.0f64).exp(),
        }
    }
}

/// Path difference at which the classical visibility falls to the
/// convention's threshold: `2 sqrt2 delta sqrt(-ln tau)`.
pub fn coherence_length(pulse: &PulseProfile, convention: CoherenceConvention) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * pulse.delta() * (-convention.threshold().ln()).sqrt()
}

/// Visibility at one path difference. `delta_chi` is set on curves swept over
/// the switching width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityCurvePoint {
    pub delta_l: f64,
    pub visibility: f64,
    pub delta_chi: Option<f64>,
}

/// Scanned visibility of the closed-form classical pattern at each path difference.
pub fn visibility_curve(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    delta_ls: &[f64],
    theta_samples: usize,
) -> Result<Vec<VisibilityCurvePoint>> {
    delta_ls
        .iter()
        .map(|&dl| {
            let shifted = ifm.with_delta_l(dl)?;
            let pattern = classical_probability_closed(pulse, &shifted, Port::D1);
            let visibility = fringe_visibility(|th| pattern.at(Port::D1, th), theta_samples)?;
            Ok(VisibilityCurvePoint {
                delta_l: dl,
                visibility,
                delta_chi: None,
            })
        })
        .collect()
}

/// Classical pattern with the packet parameters replaced by a mode's
/// wavenumber `k_q` and width `delta_q`. Only the shape is meaningful.
pub fn etalon_probability(
    ifm: &Interferometer,
    port: Port,
    k_q: f64,
    delta_q: f64,
) -> Result<DetectionResult> {
    if !(k_q.is_finite() && k_q > 0.0) {
        return Err(invalid("k_q", format!("must be positive, got {k_q}")));
    }
    if !(delta_q.is_finite() && delta_q > 0.0) {
        return Err(invalid(
            "delta_q",
            format!("must be positive, got {delta_q}"),
        ));
    }
    let mut r = two_packet_pattern(k_q, delta_q, ifm, port);
    r.normalization = Normalization::Relative;
    Ok(r)
}

//! Shared physical model: the wave packet, the interferometer geometry, detector
//! descriptions and the common result type.
//!
//! Natural units throughout (hbar = c = 1). Lengths and times share a unit;
//! wavenumbers, frequencies and masses share its inverse.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, require_finite, Result};

/// Number of standard deviations kept on each side of a Gaussian factor before
/// an integration window is truncated. The dropped tail is below `exp(-32)`.
pub const TAIL_SIGMAS: f64 = 8.0;

/// Relativistic dispersion `omega(k) = sqrt(k^2 + m^2)`.
pub fn omega(k: f64, mass: f64) -> f64 {
    k.hypot(mass)
}

/// Gaussian wave packet of a scalar field with mean wavenumber `k0`, spatial
/// width parameter `delta` and field mass `mass`.
///
/// The spatial profile is
/// `f(x) = exp(i k0 x) exp(-x^2 / (2 delta)^2) / (2 pi delta^2)^(1/4)`,
/// so `|f|^2` is a normal density with standard deviation `delta` and the
/// spectral density `|f~(k)|^2` has standard deviation `1 / (2 delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseProfile {
    k0: f64,
    delta: f64,
    mass: f64,
}

impl PulseProfile {
    /// Validates and builds a profile. The spectrum must sit well inside
    /// `k > 0`: `k0 - TAIL_SIGMAS / (2 delta) > 0`.
    pub fn new(k0: f64, delta: f64, mass: f64) -> Result<Self> {
        require_finite("k0", k0)?;
        require_finite("delta", delta)?;
        require_finite("mass", mass)?;
        if k0 <= 0.0 {
            return Err(invalid("k0", format!("must be positive, got {k0}")));
        }
        if delta <= 0.0 {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        if mass < 0.0 {
            return Err(invalid("mass", format!("must be non-negative, got {mass}")));
        }
        let lower_edge = k0 - TAIL_SIGMAS / (2.0 * delta);
        if lower_edge <= 0.0 {
            return Err(invalid(
                "k0",
                format!("spectrum reaches k <= 0: k0 - {TAIL_SIGMAS}/(2 delta) = {lower_edge}"),
            ));
        }
        Ok(Self { k0, delta, mass })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Carrier frequency `omega(k0)`.
    pub fn omega0(&self) -> f64 {
        omega(self.k0, self.mass)
    }

    /// Group velocity `v0 = k0 / omega0`.
    pub fn group_velocity(&self) -> f64 {
        self.k0 / self.omega0()
    }

    /// `omega0 - v0 k0`, evaluated as `m^2 / omega0` to avoid cancellation.
    pub fn delta_omega0(&self) -> f64 {
        self.mass * self.mass / self.omega0()
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// Standard deviation of the spectral density, `1 / (2 delta)`.
    pub fn bandwidth(&self) -> f64 {
        0.5 / self.delta
    }

    /// Wavenumber interval holding all but a negligible tail of the spectrum.
    pub fn spectral_window(&self) -> (f64, f64) {
        let half = TAIL_SIGMAS * self.bandwidth();
        (self.k0 - half, self.k0 + half)
    }

    /// Spatial profile `f(x)`.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let norm = (2.0 * PI * self.delta * self.delta).powf(-0.25);
        let envelope = (-x * x / (4.0 * self.delta * self.delta)).exp();
        Complex64::from_polar(norm * envelope, self.k0 * x)
    }

    /// Fourier transform `f~(k)`, which is real for this profile.
    pub fn spectral(&self, k: f64) -> f64 {
        let d2 = self.delta * self.delta;
        let u = k - self.k0;
        (2.0 * d2 / PI).powf(0.25) * (-u * u * d2).exp()
    }
}

/// Group velocity `k0 / omega0` of `pulse`.
pub fn group_velocity(pulse: &PulseProfile) -> f64 {
    pulse.group_velocity()
}

pub fn delta_omega0(pulse: &PulseProfile) -> f64 {
    pulse.delta_omega0()
}

pub fn pulse_amplitude(pulse: &PulseProfile, x: f64) -> Complex64 {
    pulse.amplitude(x)
}

pub fn spectral_amplitude(pulse: &PulseProfile, k: f64) -> f64 {
    pulse.spectral(k)
}

/// Two-arm interferometer: arm lengths `l1`, `l2` and the phase `theta`
/// applied to arm 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferometer {
    l1: f64,
    l2: f64,
    theta: f64,
}

impl Interferometer {
    pub fn new(l1: f64, l2: f64, theta: f64) -> Result<Self> {
        require_finite("l1", l1)?;
        require_finite("l2", l2)?;
        require_finite("theta", theta)?;
        if l1 <= 0.0 {
            return Err(invalid("l1", format!("must be positive, got {l1}")));
        }
        if l2 <= 0.0 {
            return Err(invalid("l2", format!("must be positive, got {l2}")));
        }
        Ok(Self { l1, l2, theta })
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Path difference `l2 - l1`.
    pub fn delta_l(&self) -> f64 {
        self.l2 - self.l1
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.l1, self.l2, theta)
    }

    /// Keeps `l1` and moves arm 2 to `l1 + delta_l`.
    pub fn with_delta_l(&self, delta_l: f64) -> Result<Self> {
        Self::new(self.l1, self.l1 + delta_l, self.theta)
    }
}

/// Output port of the second beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    D1,
    D2,
}

impl Port {
    pub const ALL: [Port; 2] = [Port::D1, Port::D2];

    /// `+1` for D1, `-1` for D2.
    pub fn sign(self) -> f64 {
        match self {
            Port::D1 => 1.0,
            Port::D2 => -1.0,
        }
    }

    pub fn other(self) -> Port {
        match self {
            Port::D1 => Port::D2,
            Port::D2 => Port::D1,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::D1 => "D1",
            Port::D2 => "D2",
        })
    }
}

/// Time dependence of a detector coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switching {
    /// Always on.
    Eternal,
    /// `chi(t) = exp(-(t - t_chi)^2 / (2 delta_chi^2))`, peak value one.
    Gaussian { t_chi: f64, delta_chi: f64 },
}

/// Two-level detector with gap `energy_gap` and coupling strength `coupling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    energy_gap: f64,
    coupling: f64,
    switching: Switching,
}

impl DetectorSpec {
    pub fn new(energy_gap: f64, coupling: f64, switching: Switching) -> Result<Self> {
        require_finite("energy_gap", energy_gap)?;
        require_finite("coupling", coupling)?;
        if coupling < 0.0 {
            return Err(invalid(
                "coupling",
                format!("must be non-negative, got {coupling}"),
            ));
        }
        if let Switching::Gaussian { t_chi, delta_chi } = switching {
            require_finite("t_chi", t_chi)?;
            require_finite("delta_chi", delta_chi)?;
            if delta_chi <= 0.0 {
                return Err(invalid(
                    "delta_chi",
                    format!("must be positive, got {delta_chi}"),
                ));
            }
        }
        Ok(Self {
            energy_gap,
            coupling,
            switching,
        })
    }

    pub fn eternal(energy_gap: f64, coupling: f64) -> Result<Self> {
        Self::new(energy_gap, coupling, Switching::Eternal)
    }

    pub fn gaussian(energy_gap: f64, coupling: f64, t_chi: f64, delta_chi: f64) -> Result<Self> {
        Self::new(
            energy_gap,
            coupling,
            Switching::Gaussian { t_chi, delta_chi },
        )
    }

    pub fn energy_gap(&self) -> f64 {
        self.energy_gap
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn switching(&self) -> Switching {
        self.switching
    }

    /// `(t_chi, delta_chi)` for Gaussian switching.
    pub fn gaussian_window(&self) -> Option<(f64, f64)> {
        match self.switching {
            Switching::Eternal => None,
            Switching::Gaussian { t_chi, delta_chi } => Some((t_chi, delta_chi)),
        }
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(self.energy_gap, coupling, self.switching)
    }

    pub fn with_energy_gap(&self, energy_gap: f64) -> Result<Self> {
        Self::new(energy_gap, self.coupling, self.switching)
    }

    pub fn with_switching(&self, switching: Switching) -> Result<Self> {
        Self::new(self.energy_gap, self.coupling, switching)
    }

    /// Replaces the switching width, keeping `t_chi` (zero if the detector was eternal).
    pub fn with_delta_chi(&self, delta_chi: f64) -> Result<Self> {
        let t_chi = self.gaussian_window().map_or(0.0, |(t, _)| t);
        self.with_switching(Switching::Gaussian { t_chi, delta_chi })
    }
}

/// How a probability is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// A genuine detection probability.
    Absolute,
    /// Only the shape in `theta` and `delta_l` is meaningful.
    Relative,
}

/// Port probability written as `mean + sign * amplitude * cos(phase + theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub port: Port,
    pub theta: f64,
    pub probability: f64,
    pub mean: f64,
    pub modulation_amplitude: f64,
    pub modulation_phase: f64,
    pub normalization: Normalization,
    /// Set when the underlying amplitude exceeds the perturbative threshold.
    pub perturbativity_warning: bool,
    /// Set on comparators that are known not to describe the physical system.
    pub non_physical: bool,
}

impl DetectionResult {
    /// Builds a result from its modulation decomposition.
    pub fn from_modulation(port: Port, theta: f64, mean: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            port,
            theta,
            probability: mean + port.sign() * amplitude * (phase + theta).cos(),
            mean,
            modulation_amplitude: amplitude,
            modulation_phase: phase,
            normalization: Normalization::Absolute,
            perturbativity_warning: false,
            non_physical: false,
        }
    }

    /// Re-evaluates the decomposition at another phase setting.
    pub fn at(&self, port: Port, theta: f64) -> f64 {
        self.mean + port.sign() * self.modulation_amplitude * (self.modulation_phase + theta).cos()
    }

    /// Analytic fringe visibility `amplitude / mean`; zero for a vanishing mean.
    pub fn visibility(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.modulation_amplitude / self.mean
        }
    }
}

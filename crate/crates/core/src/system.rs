//! Joint state of one detector at each output port and the resulting
//! three-outcome measurement.
//!
//! To first order the joint state is
//! `alpha |e,g> + beta |g,e> + gamma |g,g>` with `alpha`, `beta` the per-port
//! excitation amplitudes. Double excitation only enters at second order.

use num_complex::Complex64;

use crate::ensemble::{ensemble_probability, CoefficientMode};
use crate::error::{Error, Result};
use crate::model::{DetectorSpec, Interferometer, Port, PulseProfile, Switching};
use crate::udw::path_amplitude;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    /// Amplitude for the D1 detector alone to be excited.
    pub alpha: Complex64,
    /// Amplitude for the D2 detector alone to be excited.
    pub beta: Complex64,
    /// `sqrt(1 - |alpha|^2 - |beta|^2)`.
    pub gamma: f64,
}

impl SystemState {
    /// Probability of both detectors being excited; zero at this order.
    pub fn double_excitation(&self) -> f64 {
        0.0
    }
}

/// Outcome probabilities: only D1 clicks, only D2 clicks, neither clicks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmOutcome {
    pub p_i: f64,
    pub p_ii: f64,
    pub p_iii: f64,
}

impl PovmOutcome {
    pub fn total(&self) -> f64 {
        self.p_i + self.p_ii + self.p_iii
    }
}

/// Joint state for detector `det1` at D1 and `det2` at D2, using the
/// corrected coefficient for Gaussian-switched detectors.
pub fn system_state(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det1: &DetectorSpec,
    det2: &DetectorSpec,
) -> Result<SystemState> {
    system_state_with_mode(pulse, ifm, det1, det2, CoefficientMode::default())
}

/// As [`system_state`] with an explicit coefficient mode.
///
/// An eternal detector contributes `i (A_{l1} +- e^{i theta} A_{l2}) / 2`.
/// A Gaussian-switched detector is described only through its `t_chi`
/// average, which fixes `|amplitude|^2` but not its phase; the amplitude is
/// then the real root of the ensemble probability.
pub fn system_state_with_mode(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det1: &DetectorSpec,
    det2: &DetectorSpec,
    mode: CoefficientMode,
) -> Result<SystemState> {
    let alpha = port_amplitude(pulse, ifm, det1, Port::D1, mode)?;
    let beta = port_amplitude(pulse, ifm, det2, Port::D2, mode)?;
    let excited = alpha.norm_sqr() + beta.norm_sqr();
    if excited > 1.0 {
        return Err(Error::NotPerturbative(excited));
    }
    Ok(SystemState {
        alpha,
        beta,
        gamma: (1.0 - excited).sqrt(),
    })
}

fn port_amplitude(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    det: &DetectorSpec,
    port: Port,
    mode: CoefficientMode,
) -> Result<Complex64> {
    match det.switching() {
        Switching::Eternal => {
            let a1 = path_amplitude(pulse, det, ifm.l1())?;
            let a2 = path_amplitude(pulse, det, ifm.l2())?;
            let arm2 = a2 * Complex64::from_polar(port.sign(), ifm.theta());
            Ok((a1 + arm2) * Complex64::new(0.0, 0.5))
        }
        Switching::Gaussian { .. } => {
            let p = ensemble_probability(pulse, ifm, det, port, mode)?.probability;
            Ok(Complex64::new(p.max(0.0).sqrt(), 0.0))
        }
    }
}

pub fn povm_probabilities(state: &SystemState) -> PovmOutcome {
    let p_i = state.alpha.norm_sqr();
    let p_ii = state.beta.norm_sqr();
    PovmOutcome {
        p_i,
        p_ii,
        p_iii: 1.0 - p_i - p_ii,
    }
}

/// `(P(click), P(no click))` for the detector at `port` alone.
pub fn marginal_povm(state: &SystemState, port: Port) -> (f64, f64) {
    let p = match port {
        Port::D1 => state.alpha.norm_sqr(),
        Port::D2 => state.beta.norm_sqr(),
    };
    (p, 1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udw::udw_probability;
    use proptest::prelude::*;

    fn pulse() -> PulseProfile {
        PulseProfile::new(20.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn decoupled_detectors_never_click() {
        let ifm = Interferometer::new(10.0, 12.0, 0.4).unwrap();
        let off = DetectorSpec::eternal(20.0, 0.0).unwrap();
        let s = system_state(&pulse(), &ifm, &off, &off).unwrap();
        let o = povm_probabilities(&s);
        assert_eq!((o.p_i, o.p_ii, o.p_iii), (0.0, 0.0, 1.0));
        assert_eq!(s.double_excitation(), 0.0);
    }

    #[test]
    fn destructive_port_is_dark() {
        // k* dl + theta = pi puts all weight on D2.
        let p = pulse();
        let ifm = Interferometer::new(10.0, 10.0, std::f64::consts::PI).unwrap();
        let det = DetectorSpec::eternal(20.0, 0.01).unwrap();
        let s = system_state(&p, &ifm, &det, &det).unwrap();
        assert!(povm_probabilities(&s).p_i < 1e-30);
        assert!(povm_probabilities(&s).p_ii > 0.0);
    }

    #[test]
    fn strong_coupling_is_rejected() {
        let ifm = Interferometer::new(10.0, 10.0, 0.0).unwrap();
        let det = DetectorSpec::eternal(20.0, 100.0).unwrap();
        assert!(matches!(
            system_state(&pulse(), &ifm, &det, &det),
            Err(Error::NotPerturbative(_))
        ));
    }

    proptest! {
        #[test]
        fn completeness_and_marginals(
            dl in -10.0f64..10.0,
            theta in -7.0f64..7.0,
            g1 in 0.0f64..0.05,
            g2 in 0.0f64..0.05,
            gap in 19.0f64..21.0,
        ) {
            let p = pulse();
            let ifm = Interferometer::new(20.0, 20.0 + dl, theta).unwrap();
            let d1 = DetectorSpec::eternal(gap, g1).unwrap();
            let d2 = DetectorSpec::eternal(gap, g2).unwrap();
            let s = system_state(&p, &ifm, &d1, &d2).unwrap();
            let o = povm_probabilities(&s);
            prop_assert!((o.total() - 1.0).abs() <= 1e-12);
            prop_assert!(o.p_i >= 0.0 && o.p_ii >= 0.0 && o.p_iii >= 0.0);
            let solo1 = udw_probability(&p, &ifm, &d1, Port::D1).unwrap().probability;
            let solo2 = udw_probability(&p, &ifm, &d2, Port::D2).unwrap().probability;
            prop_assert!((marginal_povm(&s, Port::D1).0 - solo1).abs() <= 1e-12);
            prop_assert!((marginal_povm(&s, Port::D2).0 - solo2).abs() <= 1e-12);
            // Switching the other detector off leaves each marginal unchanged.
            let s1 = system_state(&p, &ifm, &d1, &d2.with_coupling(0.0).unwrap()).unwrap();
            let s2 = system_state(&p, &ifm, &d1.with_coupling(0.0).unwrap(), &d2).unwrap();
            prop_assert!((marginal_povm(&s1, Port::D1).0 - solo1).abs() <= 1e-12);
            prop_assert!((marginal_povm(&s2, Port::D2).0 - solo2).abs() <= 1e-12);
        }

        #[test]
        fn gaussian_marginals_match_ensemble(dc in 0.05f64..20.0, dl in -5.0f64..5.0, theta in 0.0f64..6.3) {
            let p = pulse();
            let ifm = Interferometer::new(20.0, 20.0 + dl, theta).unwrap();
            let det = DetectorSpec::gaussian(20.0, 0.01, 0.0, dc).unwrap();
            let mode = CoefficientMode::Corrected;
            let s = system_state_with_mode(&p, &ifm, &det, &det, mode).unwrap();
            for port in Port::ALL {
                let e = ensemble_probability(&p, &ifm, &det, port, mode).unwrap().probability.max(0.0);
                prop_assert!((marginal_povm(&s, port).0 - e).abs() <= 1e-12 * e.max(1e-300));
            }
            prop_assert!((povm_probabilities(&s).total() - 1.0).abs() <= 1e-12);
        }
    }
}

//! Free propagation of the packet through both arms to the detector plane.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Interferometer, Port, PulseProfile, TAIL_SIGMAS};

/// One point of a sampled intensity trace at the detector position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSample {
    pub t: f64,
    pub value: Complex64,
    pub squared_magnitude: f64,
}

/// Field at port `port`, position `y` relative to the detector and time `t`:
/// `F(y, t) = f(l1 + y - v0 t) / 2 +- e^{i theta} f(l2 + y - v0 t) / 2`.
pub fn two_path_envelope(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    port: Port,
    y: f64,
    t: f64,
) -> Complex64 {
    let shift = y - pulse.group_velocity() * t;
    let arm1 = pulse.amplitude(ifm.l1() + shift);
    let arm2 = pulse.amplitude(ifm.l2() + shift) * Complex64::from_polar(1.0, ifm.theta());
    (arm1 + arm2 * port.sign()) * 0.5
}

/// Time interval over which either packet overlaps the detector, padded by
/// `TAIL_SIGMAS` spatial widths.
pub fn arrival_window(pulse: &PulseProfile, ifm: &Interferometer) -> (f64, f64) {
    let v0 = pulse.group_velocity();
    let pad = TAIL_SIGMAS * pulse.delta();
    (
        (ifm.l1().min(ifm.l2()) - pad) / v0,
        (ifm.l1().max(ifm.l2()) + pad) / v0,
    )
}

/// Samples `F(0, t)` on `t_start, t_start + dt, ...` up to and including `t_end`.
pub fn intensity_trace(
    pulse: &PulseProfile,
    ifm: &Interferometer,
    port: Port,
    t_start: f64,
    t_end: f64,
    dt: f64,
) -> Result<Vec<EnvelopeSample>> {
    if !(t_start.is_finite() && t_end.is_finite() && dt.is_finite()) {
        return Err(Error::EmptyRange("time grid must be finite".into()));
    }
    if !(dt > 0.0) || !(t_start < t_end) {
        return Err(Error::EmptyRange(format!(
            "no samples for t_start = {t_start}, t_end = {t_end}, dt = {dt}"
        )));
    }
    let steps = ((t_end - t_start) / dt * (1.0 + 4.0 * f64::EPSILON)).floor() as usize;
    Ok((0..=steps)
        .map(|i| {
            let t = t_start + i as f64 * dt;
            let value = two_path_envelope(pulse, ifm, port, 0.0, t);
            EnvelopeSample {
                t,
                value,
                squared_magnitude: value.norm_sqr(),
            }
        })
        .collect())
}

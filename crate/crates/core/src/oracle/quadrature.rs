//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.

// Node and weight tables are kept at their published precision.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

// Kronrod abscissae on [0, 1]; odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Evaluations spent by one application of the 15-point rule.
pub const RULE_EVALUATIONS: usize = 15;

/// Stopping rule for the adaptive integrators.
///
/// Integration stops once the summed error estimate drops below
/// `max(abs, rel * |value|)` or the evaluation budget runs out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evaluations: usize,
    /// Upper bound on the width of the initial panels. Oscillatory integrands
    /// should cap it at a fraction of the shortest period.
    pub max_panel_width: Option<f64>,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_evaluations: 1_000_000,
            max_panel_width: None,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_panel_width(mut self, width: f64) -> Self {
        self.max_panel_width = Some(width);
        self
    }

    pub fn with_budget(mut self, max_evaluations: usize) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

/// Outcome of an integration. `converged` is false when the budget ran out
/// before the error estimate met the tolerance; `value` is then the best
/// estimate reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Applies the 15-point Kronrod rule on `[lo, hi]` and returns the estimate
/// with a QUADPACK-style error bound.
pub fn kronrod15<F>(f: &F, lo: f64, hi: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let (value, error, _) = rule15(f, lo, hi);
    (value, error)
}

/// As [`kronrod15`], also reporting whether the error bound sits at the
/// rounding floor of the panel, where subdivision cannot help.
fn rule15<F>(f: &F, lo: f64, hi: f64) -> (Complex64, f64, bool)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[14] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[2 * j] = f(center - dx);
        fv[2 * j + 1] = f(center + dx);
    }

    let mut kron = fv[14] * WGK[7];
    let mut gauss = fv[14] * WG[3];
    let mut abs_sum = fv[14].norm() * WGK[7];
    for j in 0..7 {
        let pair = fv[2 * j] + fv[2 * j + 1];
        kron += pair * WGK[j];
        abs_sum += WGK[j] * (fv[2 * j].norm() + fv[2 * j + 1].norm());
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fv[14] - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).norm() + (fv[2 * j + 1] - mean).norm());
    }

    let scale = half.abs();
    let value = kron * half;
    let resabs = abs_sum * scale;
    let resasc = asc * scale;
    let mut error = ((kron - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * resabs;
        if error <= floor {
            error = floor;
            at_floor = true;
        }
    }
    (value, error, at_floor)
}

/// Integrates `f` over `[lo, hi]`. Reversed limits negate the result.
///
/// Panels whose error bound has reached the rounding floor are not refined
/// further; their share of the error does not count against convergence.
pub fn integrate_1d<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> QuadratureResult
where
    F: Fn(f64) -> Complex64,
{
    if lo == hi {
        return QuadratureResult::zero();
    }
    if lo > hi {
        let r = integrate_1d(f, hi, lo, tol);
        return QuadratureResult {
            value: -r.value,
            ..r
        };
    }

    let mut initial = 1usize;
    if let Some(w) = tol.max_panel_width {
        if w > 0.0 {
            let budget_panels = (tol.max_evaluations / RULE_EVALUATIONS).max(1);
            initial = (((hi - lo) / w).ceil() as usize).clamp(1, budget_panels);
        }
    }

    let mut heap = BinaryHeap::with_capacity(2 * initial);
    let mut frozen: Vec<Panel> = Vec::new();
    let mut rounding: Vec<Panel> = Vec::new();
    let mut evaluations = 0usize;
    let step = (hi - lo) / initial as f64;
    for i in 0..initial {
        let a = lo + step * i as f64;
        let b = if i + 1 == initial {
            hi
        } else {
            lo + step * (i + 1) as f64
        };
        let (value, error, at_floor) = rule15(&f, a, b);
        evaluations += RULE_EVALUATIONS;
        let panel = Panel {
            lo: a,
            hi: b,
            value,
            error,
        };
        if at_floor {
            rounding.push(panel);
        } else {
            heap.push(panel);
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel], rounding: &[Panel]| {
        let (v, e) = heap
            .iter()
            .chain(frozen.iter())
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
                (v + p.value, e + p.error)
            });
        let (rv, re) = rounding
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
                (v + p.value, e + p.error)
            });
        (v + rv, e, re)
    };

    let (mut value, mut error, _) = totals(&heap, &frozen, &rounding);
    let mut since_resum = 0usize;
    let converged = loop {
        if error <= tol.target(value) {
            // Re-sum to make sure accumulated rounding did not fake convergence.
            let (v, e, _) = totals(&heap, &frozen, &rounding);
            value = v;
            error = e;
            since_resum = 0;
            if error <= tol.target(value) {
                break true;
            }
        }
        if evaluations + 2 * RULE_EVALUATIONS > tol.max_evaluations {
            break false;
        }
        let Some(worst) = heap.pop() else {
            break frozen.is_empty();
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let resolution =
            8.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()).max(f64::MIN_POSITIVE);
        if worst.hi - worst.lo <= resolution || mid <= worst.lo || mid >= worst.hi {
            frozen.push(worst);
            continue;
        }
        value -= worst.value;
        error -= worst.error;
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let (v, e, at_floor) = rule15(&f, a, b);
            value += v;
            let panel = Panel {
                lo: a,
                hi: b,
                value: v,
                error: e,
            };
            if at_floor {
                rounding.push(panel);
            } else {
                error += e;
                heap.push(panel);
            }
        }
        evaluations += 2 * RULE_EVALUATIONS;
        since_resum += 1;
        if since_resum >= 64 {
            let (v, e, _) = totals(&heap, &frozen, &rounding);
            value = v;
            error = e;
            since_resum = 0;
        }
    };

    let (value, error, rounding_error) = totals(&heap, &frozen, &rounding);
    QuadratureResult {
        value,
        error_estimate: error + rounding_error,
        evaluations,
        converged: converged && error <= tol.target(value),
    }
}

/// Rectangle `[x.0, x.1] x [y.0, y.1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

/// Nested 2D integration: the outer integral over `x` runs the adaptive 1D
/// rule on the inner integral over `y`.
///
/// A coarse first pass fixes the scale of the result so that the inner
/// integrals can be held to an absolute tolerance; this keeps cancellation in
/// the outer integral from hiding inner errors.
pub fn integrate_2d<F>(f: F, domain: Rect, tol: &Tolerance) -> QuadratureResult
where
    F: Fn(f64, f64) -> Complex64,
{
    let width_x = (domain.x.1 - domain.x.0).abs().max(f64::MIN_POSITIVE);
    let coarse_tol = Tolerance {
        abs: tol.abs,
        rel: tol.rel.max(1e-6),
        ..*tol
    };
    let coarse_inner = Tolerance {
        abs: 0.1 * coarse_tol.abs / width_x,
        rel: 0.1 * coarse_tol.rel,
        ..*tol
    };
    let coarse = nested_pass(&f, domain, &coarse_tol, &coarse_inner);
    let target = tol.target(coarse.value);
    let inner = Tolerance {
        abs: 0.1 * target / width_x,
        rel: 0.0,
        ..*tol
    };
    let fine = nested_pass(&f, domain, tol, &inner);
    QuadratureResult {
        evaluations: coarse.evaluations + fine.evaluations,
        ..fine
    }
}

fn nested_pass<F>(
    f: &F,
    domain: Rect,
    outer_tol: &Tolerance,
    inner_tol: &Tolerance,
) -> QuadratureResult
where
    F: Fn(f64, f64) -> Complex64,
{
    use std::cell::Cell;

    let width_x = (domain.x.1 - domain.x.0).abs();
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let inner_calls = Cell::new(0usize);
    let inner_ok = Cell::new(true);
    let outer = integrate_1d(
        |x| {
            let r = integrate_1d(|y| f(x, y), domain.y.0, domain.y.1, inner_tol);
            inner_evals.set(inner_evals.get() + r.evaluations);
            inner_err.set(inner_err.get() + r.error_estimate);
            inner_calls.set(inner_calls.get() + 1);
            inner_ok.set(inner_ok.get() && r.converged);
            r.value
        },
        domain.x.0,
        domain.x.1,
        outer_tol,
    );
    // Inner errors enter through their average over the outer nodes.
    let mean_inner = inner_err.get() / inner_calls.get().max(1) as f64;
    let error_estimate = outer.error_estimate + width_x * mean_inner;
    QuadratureResult {
        value: outer.value,
        error_estimate,
        evaluations: inner_evals.get(),
        converged: outer.converged
            && inner_ok.get()
            && error_estimate <= outer_tol.target(outer.value),
    }
}

/// Tensor-product 2D integration: the 15-point rule in both directions on an
/// `n x n` grid of panels, doubling `n` until successive estimates agree.
pub fn integrate_2d_tensor<F>(f: F, domain: Rect, tol: &Tolerance) -> QuadratureResult
where
    F: Fn(f64, f64) -> Complex64,
{
    let mut nodes = Vec::with_capacity(15);
    for j in 0..7 {
        nodes.push((-XGK[j], WGK[j]));
        nodes.push((XGK[j], WGK[j]));
    }
    nodes.push((0.0, WGK[7]));

    let grid = |n: usize| {
        let hx = (domain.x.1 - domain.x.0) / n as f64;
        let hy = (domain.y.1 - domain.y.0) / n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let cx = domain.x.0 + hx * (i as f64 + 0.5);
            for j in 0..n {
                let cy = domain.y.0 + hy * (j as f64 + 0.5);
                for &(u, wu) in &nodes {
                    for &(v, wv) in &nodes {
                        sum += f(cx + 0.5 * hx * u, cy + 0.5 * hy * v) * (wu * wv);
                    }
                }
            }
        }
        sum * (0.25 * hx * hy)
    };

    let per_panel = RULE_EVALUATIONS * RULE_EVALUATIONS;
    let mut n = 1usize;
    let mut previous = grid(n);
    let mut evaluations = per_panel;
    loop {
        let next_n = 2 * n;
        let cost = per_panel * next_n * next_n;
        if evaluations + cost > tol.max_evaluations {
            return QuadratureResult {
                value: previous,
                error_estimate: f64::INFINITY,
                evaluations,
                converged: false,
            };
        }
        let current = grid(next_n);
        evaluations += cost;
        let error = (current - previous).norm();
        if error <= tol.target(current) {
            return QuadratureResult {
                value: current,
                error_estimate: error,
                evaluations,
                converged: true,
            };
        }
        previous = current;
        n = next_n;
    }
}

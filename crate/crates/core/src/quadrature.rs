//! Adaptive one-dimensional quadrature.
//!
//! Two independent rules are provided so results can be cross-checked:
//! globally adaptive Gauss–Kronrod (7/15 points, bisecting the interval with
//! the largest error estimate) and locally adaptive Simpson with Richardson
//! correction.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    #[default]
    GaussKronrod15,
    AdaptiveSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
    /// ∫cos θ dΩ applied to per-steradian backgrounds; π for the forward
    /// hemisphere.
    pub solid_angle_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::GaussKronrod15,
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_evals: 1_000_000,
            solid_angle_factor: PI,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_method(mut self, method: QuadratureMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_with_breakpoints(f, &[a, b], spec)
}

/// Integrates over `[points[0], points[last]]`, starting the subdivision at
/// the given (sorted) breakpoints.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::Domain("integration needs at least two points".into()));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("integration limits must be finite and sorted".into()));
    }
    if !(spec.rel_tol > 0.0 || spec.abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    match spec.method {
        QuadratureMethod::GaussKronrod15 => gauss_kronrod(&f, points, spec),
        QuadratureMethod::AdaptiveSimpson => simpson(&f, points, spec),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, (x, w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kronrod += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(f, w[0], w[1]));
            evaluations += 15;
        }
    }
    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    let mut iteration = 0usize;
    loop {
        iteration += 1;
        if iteration.is_multiple_of(64) {
            value = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
            error = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
        if !value.is_finite() {
            return Err(Error::Domain("integrand is not finite on the integration range".into()));
        }
        if error <= spec.target(value) || (heap.is_empty() && error == 0.0) {
            // re-sum to shed drift from the running totals
            let value = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
            let error = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
            return Ok(Integral {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if evaluations + 30 > spec.max_evals || heap.is_empty() {
            return Err(Error::NonConvergence {
                estimate: value,
                error_estimate: error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 8.0 * f64::EPSILON * mid.abs() {
            // cannot split further; keep its contribution as final
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        error = error.max(0.0);
        heap.push(left);
        heap.push(right);
        evaluations += 30;
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    // The first pass runs against a tolerance derived from a coarse estimate;
    // later passes re-target against the refined value.
    let mut evaluations = 0;
    let mut estimate = None;
    for _ in 0..4 {
        let target = estimate.map_or(0.0, |e: f64| spec.target(e));
        let (value, error, evals) = simpson_pass(f, points, target, spec, estimate.is_none())?;
        evaluations += evals;
        if error <= spec.target(value) {
            return Ok(Integral {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        if evaluations > spec.max_evals {
            return Err(Error::NonConvergence {
                estimate: value,
                error_estimate: error,
                evaluations,
            });
        }
        estimate = Some(value);
    }
    Err(Error::NonConvergence {
        estimate: estimate.unwrap_or(f64::NAN),
        error_estimate: f64::INFINITY,
        evaluations,
    })
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson_pass<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    target: f64,
    spec: &QuadratureSpec,
    derive_target: bool,
) -> Result<(f64, f64, usize)> {
    let mut stack = Vec::new();
    let mut evaluations = 0;
    let mut coarse = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let n = 16;
        let h = (w[1] - w[0]) / n as f64;
        let xs: Vec<f64> = (0..=n)
            .map(|i| if i == n { w[1] } else { w[0] + h * i as f64 })
            .collect();
        let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        evaluations += n + 1;
        for i in (0..n).step_by(2) {
            let whole = simpson_rule(xs[i], xs[i + 2], fs[i], fs[i + 1], fs[i + 2]);
            coarse += whole;
            stack.push(Panel {
                a: xs[i],
                b: xs[i + 2],
                fa: fs[i],
                fm: fs[i + 1],
                fb: fs[i + 2],
                whole,
                depth: 0,
            });
        }
    }
    if !coarse.is_finite() {
        return Err(Error::Domain("integrand is not finite on the integration range".into()));
    }
    let target = if derive_target { spec.target(coarse) } else { target };
    let total_width = points[points.len() - 1] - points[0];
    let mut value = 0.0;
    let mut error = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        evaluations += 2;
        let left = simpson_rule(p.a, m, p.fa, flm, p.fm);
        let right = simpson_rule(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let local_target = target * (p.b - p.a) / total_width;
        let unsplittable = p.depth >= 60 || (p.b - p.a) <= 8.0 * f64::EPSILON * m.abs();
        if diff.abs() <= 15.0 * local_target || unsplittable {
            value += left + right + diff / 15.0;
            error += diff.abs() / 15.0;
            continue;
        }
        if evaluations > spec.max_evals {
            return Err(Error::NonConvergence {
                estimate: value + stack.iter().map(|p| p.whole).sum::<f64>() + left + right,
                error_estimate: f64::INFINITY,
                evaluations,
            });
        }
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            depth: p.depth + 1,
        });
    }
    if !value.is_finite() {
        return Err(Error::Domain("integrand is not finite on the integration range".into()));
    }
    Ok((value, error, evaluations))
}

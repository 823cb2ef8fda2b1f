//! Intermediate error maxima, phase errors, alternation and the error in
//! uniformity of a rational interpolant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interpolation::NodeSet;
use crate::numerics::{expi, BarycentricRational};

/// Default number of coarse samples per subinterval.
pub const DEFAULT_SAMPLES_PER_INTERVAL: usize = 16;

/// Sampled maxima below this value are not refined.
pub const BELOW_PRECISION: f64 = 1e-15;

/// Golden-section abscissa tolerance relative to the subinterval length.
const GOLDEN_REL_TOL: f64 = 1e-3;

const PARABOLIC_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EquioscillationReport {
    /// Points of intermediate maximal error, one per subinterval.
    pub eta: Vec<f64>,
    /// `|r(i eta_j) - e^{i ω eta_j}|`.
    pub eps: Vec<f64>,
    /// Phase error at `eta_j`, in `(-pi, pi]`.
    pub phase: Vec<f64>,
    pub alternating: bool,
    /// `sign(phase_j) = (-1)^(j + parity)` with `j` counted from one.
    pub parity: u8,
    /// Error in uniformity, `1 - min(eps) / max(eps)`.
    pub delta: f64,
    pub uniform_error: f64,
    /// Some subinterval had a sampled maximum below [`BELOW_PRECISION`].
    pub below_precision: bool,
}

impl EquioscillationReport {
    /// Derives alternation, parity, `delta` and the uniform error from the
    /// per-subinterval samples.
    pub fn from_samples(eta: Vec<f64>, eps: Vec<f64>, phase: Vec<f64>, below_precision: bool) -> Self {
        let uniform_error = eps.iter().copied().fold(0.0, f64::max);
        let min_err = eps.iter().copied().fold(f64::INFINITY, f64::min);
        let delta = if uniform_error > 0.0 { 1.0 - min_err / uniform_error } else { 0.0 };
        let (alternating, parity) = alternation(&phase);
        Self {
            eta,
            eps,
            phase,
            alternating,
            parity,
            delta,
            uniform_error,
            below_precision,
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn min_error(&self) -> f64 {
        self.eps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True if `eta` and `eps` are mirror images around zero to `rel_tol`.
    pub fn is_mirror_symmetric(&self, rel_tol: f64) -> bool {
        let m = self.eps.len();
        let scale = self.uniform_error.max(f64::MIN_POSITIVE);
        (0..m / 2).all(|j| {
            let k = m - 1 - j;
            (self.eta[j] + self.eta[k]).abs() <= rel_tol && (self.eps[j] - self.eps[k]).abs() <= rel_tol * scale
        })
    }
}

/// Zero phases match either sign.
fn alternation(phase: &[f64]) -> (bool, u8) {
    let Some((j0, p0)) = phase.iter().enumerate().find(|(_, p)| **p != 0.0) else {
        return (false, 0);
    };
    // sign(p_j) = (-1)^(j + parity) for 1-based j
    let j1 = j0 + 1;
    let parity = if (p0 > &0.0) == (j1 % 2 == 0) { 0 } else { 1 };
    let ok = phase.iter().enumerate().all(|(j, p)| {
        if *p == 0.0 {
            return true;
        }
        let expect_positive = (j + 1 + parity as usize).is_multiple_of(2);
        (*p > 0.0) == expect_positive
    });
    (ok, parity)
}

/// Principal argument of `r(ix) e^{-iωx}` in `(-pi, pi]`.
pub fn phase_error(r: &BarycentricRational, omega: f64, x: f64) -> f64 {
    phase_of(r.eval_ix(x), omega, x)
}

fn phase_of(rx: Complex64, omega: f64, x: f64) -> f64 {
    let p = (rx * expi(omega, x).conj()).arg();
    if p == -PI {
        PI
    } else {
        p
    }
}

/// `|r(ix) - e^{iωx}|`.
pub fn approximation_error(r: &BarycentricRational, omega: f64, x: f64) -> f64 {
    (r.eval_ix(x) - expi(omega, x)).norm()
}

/// Locates the point of maximal error in each of the `2n + 2` subintervals
/// cut out of `[-1, 1]` by the interpolation nodes.
pub fn local_error_maxima(
    r: &BarycentricRational,
    omega: f64,
    nodes: &NodeSet,
    samples_per_interval: usize,
) -> EquioscillationReport {
    let x = nodes.nodes();
    let m = x.len() + 1;
    let bounds = |i: usize| {
        let a = if i == 0 { -1.0 } else { x[i - 1] };
        let b = if i == m - 1 { 1.0 } else { x[i] };
        (a, b)
    };
    let err = |t: f64| approximation_error(r, omega, t);
    let samples = samples_per_interval.max(3);

    let mut eta = vec![0.0; m];
    let mut eps = vec![0.0; m];
    let mut phase = vec![0.0; m];
    let mut below = false;

    let symmetric = nodes.is_symmetric();
    let first = if symmetric { m / 2 } else { 0 };
    for i in first..m {
        let (a, b) = bounds(i);
        let found = maximize_on(&err, a, b, samples);
        eta[i] = found.x;
        eps[i] = found.value;
        phase[i] = phase_error(r, omega, found.x);
        below |= found.below_precision;
    }
    if symmetric {
        for i in 0..first {
            let k = m - 1 - i;
            eta[i] = -eta[k];
            eps[i] = eps[k];
            phase[i] = -phase[k];
        }
    }
    EquioscillationReport::from_samples(eta, eps, phase, below)
}

#[derive(Debug, Clone, Copy)]
struct Maximum {
    x: f64,
    value: f64,
    below_precision: bool,
}

/// Coarse sampling, golden-section search around the best sample and a few
/// successive parabolic steps.
fn maximize_on<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, samples: usize) -> Maximum {
    let h = (b - a) / (samples - 1) as f64;
    let pts: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { b } else { a + h * i as f64 })
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    let mut imax = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[imax] {
            imax = i;
        }
    }
    let mut best = Maximum {
        x: pts[imax],
        value: vals[imax],
        below_precision: false,
    };
    if best.value < BELOW_PRECISION || !(b > a) {
        best.below_precision = best.value < BELOW_PRECISION;
        return best;
    }
    let lo = pts[imax.saturating_sub(1)];
    let hi = pts[(imax + 1).min(samples - 1)];
    let (mut p, mut fp) = golden_max(f, lo, hi, GOLDEN_REL_TOL * (b - a));
    if fp.1 > best.value {
        best.x = p.1;
        best.value = fp.1;
    } else {
        // keep the sample as centre of the parabolic triple
        p.1 = best.x;
        fp.1 = best.value;
    }
    parabolic_refine(f, &mut p, &mut fp, lo, hi);
    if fp.1 > best.value {
        best.x = p.1;
        best.value = fp.1;
    }
    best
}

type Triple = (f64, f64, f64);

/// Golden-section maximisation. Returns a bracketing triple `(a, c, b)` with
/// the best interior point `c` and the corresponding function values.
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (Triple, Triple) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut fa = f(a);
    let mut fb = f(b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // endpoints of the original bracket may carry the maximum (x = +-1)
    let candidates = [(a, fa), (c, fc), (d, fd), (b, fb)];
    let (x, fx) = candidates
        .iter()
        .copied()
        .fold((c, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    ((a, x, b), (fa, fx, fb))
}

/// Successive parabolic interpolation on a bracketing triple.
fn parabolic_refine<F: Fn(f64) -> f64>(f: &F, p: &mut Triple, fp: &mut Triple, lo: f64, hi: f64) {
    for _ in 0..PARABOLIC_STEPS {
        let (x1, x2, x3) = *p;
        let (f1, f2, f3) = *fp;
        if !(x1 < x2 && x2 < x3) {
            return;
        }
        let num = (x2 - x1).powi(2) * (f2 - f3) - (x2 - x3).powi(2) * (f2 - f1);
        let den = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1);
        if den == 0.0 || !num.is_finite() {
            return;
        }
        let v = (x2 - 0.5 * num / den).clamp(lo, hi);
        if v == x2 || !(v > x1 && v < x3) {
            return;
        }
        let fv = f(v);
        if fv > f2 {
            if v < x2 {
                *p = (x1, v, x2);
                *fp = (f1, fv, f2);
            } else {
                *p = (x2, v, x3);
                *fp = (f2, fv, f3);
            }
        } else if v < x2 {
            *p = (v, x2, x3);
            *fp = (fv, f2, f3);
        } else {
            *p = (x1, x2, v);
            *fp = (f1, f2, fv);
        }
    }
}

/// Bounds `(lower, upper)` enclosing the error of the unitary best
/// approximant, valid for an alternating report with non-maximal error.
pub fn sandwich(report: &EquioscillationReport) -> Result<(f64, f64)> {
    if !report.alternating {
        return Err(Error::PreconditionNotMet("phase error is not alternating".into()));
    }
    if !(report.uniform_error < 2.0) {
        return Err(Error::PreconditionNotMet("approximation error is maximal".into()));
    }
    Ok((report.min_error(), report.uniform_error))
}

/// Uniform error of `r` on `[-1, 1]`, estimated from a grid of `count`
/// points with every local grid maximum refined.
pub fn max_error(r: &BarycentricRational, omega: f64, count: usize) -> f64 {
    max_error_location(r, omega, count).1
}

/// Like [`max_error`], also returning the location.
pub fn max_error_location(r: &BarycentricRational, omega: f64, count: usize) -> (f64, f64) {
    let count = count.max(3);
    let grid = crate::linalg::linspace(count);
    let err = |t: f64| approximation_error(r, omega, t);
    let vals: Vec<f64> = grid.iter().map(|&t| err(t)).collect();
    let mut best = (grid[0], vals[0]);
    for i in 0..count {
        let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
        let right = if i + 1 == count { f64::NEG_INFINITY } else { vals[i + 1] };
        if vals[i] >= left && vals[i] >= right {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(count - 1)];
            let found = maximize_on(&err, lo, hi, 3);
            if found.value > best.1 {
                best = (found.x, found.value);
            }
            if vals[i] > best.1 {
                best = (grid[i], vals[i]);
            }
        }
    }
    best
}

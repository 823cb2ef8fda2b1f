//! Interpolation node corrections: the BRASIL rescaling step, Maehly's second
//! method (linear system and direct formula) and the combined selector.

use nalgebra::{DMatrix, DVector};

use crate::equi_metrics::EquioscillationReport;
use crate::error::{Error, Result};
use crate::interpolation::NodeSet;
use crate::linalg::lu_solve;

/// Tolerance for treating the error samples as mirror-symmetric.
const MIRROR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrasilParams {
    pub kappa: f64,
    pub sigma_max: f64,
}

impl Default for BrasilParams {
    fn default() -> Self {
        Self {
            kappa: 2.2,
            sigma_max: 0.1,
        }
    }
}

impl BrasilParams {
    pub fn new(kappa: f64, sigma_max: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(sigma_max > 0.0 && sigma_max < 1.0) {
            return Err(Error::Domain(format!("sigma_max must lie in (0, 1), got {sigma_max}")));
        }
        Ok(Self { kappa, sigma_max })
    }
}

/// Right-hand side used in Maehly's correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaehlyVariant {
    /// Logarithms of error ratios.
    LogRatio,
    /// Bilinear approximation of the logarithm, more robust for large `delta`.
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Brasil,
    MaehlyBilinear,
    MaehlyLogRatio,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Brasil => "brasil",
            Strategy::MaehlyBilinear => "maehly-bilinear",
            Strategy::MaehlyLogRatio => "maehly-log",
        }
    }
}

/// One BRASIL step: subinterval lengths are rescaled by `(1 - sigma)^gamma_k`
/// and renormalized to `[-1, 1]`.
pub fn brasil_step(nodes: &NodeSet, eps: &[f64], params: BrasilParams) -> Result<NodeSet> {
    let x = nodes.nodes();
    let m = x.len() + 1;
    if eps.len() != m {
        return Err(Error::InvalidNodes(format!("expected {m} error samples, got {}", eps.len())));
    }
    if eps.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) || eps.iter().all(|e| *e == 0.0) {
        return Err(Error::PreconditionNotMet("errors must be nonnegative and not all zero".into()));
    }
    let n = nodes.degree().max(1) as f64;
    let mean = eps.iter().sum::<f64>() / m as f64;
    let gamma_bar = eps.iter().map(|e| (e - mean).abs()).fold(0.0, f64::max);
    if gamma_bar == 0.0 {
        return Ok(nodes.clone());
    }
    let sigma = params.sigma_max.min(params.kappa * gamma_bar / (n * mean));
    let base = 1.0 - sigma;
    let lengths: Vec<f64> = (0..m)
        .map(|k| {
            let left = if k == 0 { -1.0 } else { x[k - 1] };
            let right = if k == m - 1 { 1.0 } else { x[k] };
            let gamma = (eps[k] - mean) / gamma_bar;
            base.powf(gamma) * (right - left)
        })
        .collect();
    let total: f64 = lengths.iter().sum();
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(m - 1);
    for l in &lengths[..m - 1] {
        cum += l;
        out.push(-1.0 + 2.0 * cum / total);
    }
    let set = NodeSet::new(out).map_err(|e| Error::InvalidCorrection(e.to_string()))?;
    if nodes.is_symmetric() && mirror_symmetric(eps) {
        set.symmetrized().map_err(|e| Error::InvalidCorrection(e.to_string()))
    } else {
        Ok(set)
    }
}

fn mirror_symmetric(eps: &[f64]) -> bool {
    let m = eps.len();
    let scale = eps.iter().copied().fold(0.0, f64::max);
    (0..m / 2).all(|j| (eps[j] - eps[m - 1 - j]).abs() <= MIRROR_TOL * scale)
}

fn check_maehly_preconditions(nodes: &NodeSet, report: &EquioscillationReport) -> Result<()> {
    if report.eps.len() != nodes.nodes().len() + 1 || report.eta.len() != report.eps.len() {
        return Err(Error::InvalidNodes("report does not match node count".into()));
    }
    if !report.alternating {
        return Err(Error::PreconditionNotMet("phase error is not alternating".into()));
    }
    if !(report.uniform_error < 2.0) {
        return Err(Error::PreconditionNotMet("approximation error is maximal".into()));
    }
    if report.eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::PreconditionNotMet("errors must be positive".into()));
    }
    Ok(())
}

/// Maehly correction from the dense linear system.
pub fn maehly_system_step(nodes: &NodeSet, report: &EquioscillationReport, variant: MaehlyVariant) -> Result<NodeSet> {
    check_maehly_preconditions(nodes, report)?;
    let eps = &report.eps;
    let b: Vec<f64> = eps[1..]
        .iter()
        .map(|e| match variant {
            MaehlyVariant::LogRatio => (e / eps[0]).ln(),
            MaehlyVariant::Bilinear => 2.0 * (e - eps[0]) / (e + eps[0]),
        })
        .collect();
    let dx = system_correction(nodes.nodes(), &report.eta, &b)?;
    apply(nodes, report, &dx)
}

/// Maehly correction from the closed-form solution of the linear system,
/// `O(n^2)` operations.
pub fn maehly_direct_step(nodes: &NodeSet, report: &EquioscillationReport, variant: MaehlyVariant) -> Result<NodeSet> {
    check_maehly_preconditions(nodes, report)?;
    let b = direct_rhs(&report.eps, variant);
    let dx = direct_correction(nodes.nodes(), &report.eta, &b);
    apply(nodes, report, &dx)
}

/// Dispatches to the direct formula for `n > 8`, the linear system otherwise.
pub fn maehly_step(nodes: &NodeSet, report: &EquioscillationReport, variant: MaehlyVariant) -> Result<NodeSet> {
    if nodes.degree() > 8 {
        maehly_direct_step(nodes, report, variant)
    } else {
        maehly_system_step(nodes, report, variant)
    }
}

pub(crate) fn direct_rhs(eps: &[f64], variant: MaehlyVariant) -> Vec<f64> {
    let m = eps.len() as f64;
    let log_mean = eps.iter().map(|e| e.ln()).sum::<f64>() / m;
    match variant {
        MaehlyVariant::LogRatio => eps.iter().map(|e| e.ln() - log_mean).collect(),
        MaehlyVariant::Bilinear => {
            let g = log_mean.exp();
            eps.iter().map(|e| 2.0 * (e - g) / (e + g)).collect()
        }
    }
}

/// Solves `M dx = b` with `M_jk = (eta_1 - eta_{j+1}) / ((eta_{j+1} - x_k)(eta_1 - x_k))`.
pub(crate) fn system_correction(x: &[f64], eta: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let k = x.len();
    let m = DMatrix::from_fn(k, k, |j, c| (eta[0] - eta[j + 1]) / ((eta[j + 1] - x[c]) * (eta[0] - x[c])));
    let dx = lu_solve(m, &DVector::from_column_slice(b))?;
    if dx.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCorrection("non-finite correction".into()));
    }
    Ok(dx.iter().copied().collect())
}

/// Signed product accumulated as `(ln |p|, sign)`.
#[derive(Clone, Copy)]
struct LogProduct {
    log: f64,
    negative: bool,
}

impl LogProduct {
    fn one() -> Self {
        Self {
            log: 0.0,
            negative: false,
        }
    }

    fn mul(&mut self, v: f64) {
        self.log += v.abs().ln();
        self.negative ^= v < 0.0;
    }

    fn div(&mut self, v: f64) {
        self.log -= v.abs().ln();
        self.negative ^= v < 0.0;
    }

    fn value(self) -> f64 {
        let m = self.log.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

/// Direct formula for the correction with a right-hand side `b` of length
/// `2n + 2`, one entry per error maximum.
pub(crate) fn direct_correction(x: &[f64], eta: &[f64], b: &[f64]) -> Vec<f64> {
    let nx = x.len();
    let ne = eta.len();
    // R_l = prod_k (eta_l - x_k) / prod_{k != l} (eta_l - eta_k)
    let r: Vec<LogProduct> = (0..ne)
        .map(|l| {
            let mut p = LogProduct::one();
            for xk in x {
                p.mul(eta[l] - xk);
            }
            for (k, ek) in eta.iter().enumerate() {
                if k != l {
                    p.div(eta[l] - ek);
                }
            }
            p
        })
        .collect();
    (0..nx)
        .map(|j| {
            // P_j = prod_k (x_j - eta_k) / prod_{k != j} (x_j - x_k)
            let mut pj = LogProduct::one();
            for ek in eta {
                pj.mul(x[j] - ek);
            }
            for (k, xk) in x.iter().enumerate() {
                if k != j {
                    pj.div(x[j] - xk);
                }
            }
            // scale each term by P_j before summing so only O(1) numbers are added
            (0..ne)
                .map(|l| {
                    let mut t = pj;
                    t.log += r[l].log;
                    t.negative ^= r[l].negative;
                    t.div(x[j] - eta[l]);
                    b[l] * t.value()
                })
                .sum()
        })
        .collect()
}

fn apply(nodes: &NodeSet, report: &EquioscillationReport, dx: &[f64]) -> Result<NodeSet> {
    let out: Vec<f64> = nodes.nodes().iter().zip(dx).map(|(x, d)| x + d).collect();
    let set = NodeSet::new(out).map_err(|e| Error::InvalidCorrection(e.to_string()))?;
    if nodes.is_symmetric() && report.is_mirror_symmetric(MIRROR_TOL) {
        set.symmetrized().map_err(|e| Error::InvalidCorrection(e.to_string()))
    } else {
        Ok(set)
    }
}

/// Picks the correction strategy for the current iterate.
pub fn select_strategy(report: &EquioscillationReport, below_precision: bool) -> Strategy {
    if !report.alternating || report.uniform_error >= 2.0 - 1e-12 || below_precision {
        Strategy::Brasil
    } else if report.delta >= 0.1 {
        Strategy::MaehlyBilinear
    } else {
        Strategy::MaehlyLogRatio
    }
}

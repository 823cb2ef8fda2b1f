//! Rational interpolation of `e^{iωx}` in `2n + 1` real nodes.
//!
//! With support nodes `s_k` and test nodes `t_j`, the Loewner matrix
//! `L_jk = (f(t_j) - f(s_k)) / (t_j - s_k)` of `f(x) = e^{iωx}` factors as
//!
//! ```text
//! L = 2i · diag(e^{iωt_j/2}) · A · diag(e^{iωs_k/2}),
//! A_jk = sin(ω (t_j - s_k) / 2) / (t_j - s_k),
//! ```
//!
//! so `L` and `2A` share singular values and the null vectors are related by
//! `w_k = u_k e^{-iωs_k/2}` with `u` real. The real matrix `A` avoids the
//! cancellation in the divided differences and makes the interpolant unitary
//! by construction: the denominator is the complex conjugate of the numerator
//! on the real line.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::smallest_right_singular_vector;
use crate::numerics::{expi, BarycentricRational};

/// Largest admissible ratio between the two smallest singular values.
pub const SINGULAR_GAP_LIMIT: f64 = 0.1;

/// Interpolation nodes `x_1 < ... < x_{2n+1}` in `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<f64>,
    symmetric: bool,
}

impl NodeSet {
    /// Validates `nodes`; exact mirror symmetry around zero is detected.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len().is_multiple_of(2) {
            return Err(Error::InvalidNodes(format!(
                "expected an odd number of nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite() || x.abs() >= 1.0) {
            return Err(Error::InvalidNodes("nodes must lie in the open interval (-1, 1)".into()));
        }
        if nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidNodes("nodes must be strictly increasing".into()));
        }
        let len = nodes.len();
        let symmetric = nodes[len / 2] == 0.0 && (0..len / 2).all(|j| nodes[j] == -nodes[len - 1 - j]);
        Ok(Self { nodes, symmetric })
    }

    /// Sorts `nodes` before validating.
    pub fn from_unsorted(mut nodes: Vec<f64>) -> Result<Self> {
        nodes.sort_by(f64::total_cmp);
        Self::new(nodes)
    }

    /// Builds the symmetric set `-x_n, ..., -x_1, 0, x_1, ..., x_n` from its
    /// positive half `x_1 < ... < x_n`.
    pub fn mirrored(positive: &[f64]) -> Result<Self> {
        let mut nodes: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
        nodes.push(0.0);
        nodes.extend_from_slice(positive);
        let set = Self::new(nodes)?;
        debug_assert!(set.symmetric);
        Ok(set)
    }

    /// Mirror-averages the nodes: `x_j <- (x_j - x_{2n+2-j}) / 2`.
    pub fn symmetrized(&self) -> Result<Self> {
        let len = self.nodes.len();
        let half = len / 2;
        let positive: Vec<f64> = (0..half)
            .map(|j| 0.5 * (self.nodes[half + 1 + j] - self.nodes[half - 1 - j]))
            .collect();
        Self::mirrored(&positive)
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() / 2
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.nodes
    }
}

/// Which linear-algebra route [`build_interpolant_with`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolationRoute {
    /// Half-size real system for symmetric nodes, full real system otherwise.
    Auto,
    /// Full real system regardless of symmetry.
    Real,
    /// Complex Loewner matrix of divided differences.
    ComplexLoewner,
}

/// Builds the `(n, n)` rational interpolant of `e^{iωx}` in the given nodes.
pub fn build_interpolant(omega: f64, nodes: &NodeSet) -> Result<BarycentricRational> {
    build_interpolant_with(omega, nodes, InterpolationRoute::Auto)
}

pub fn build_interpolant_with(
    omega: f64,
    nodes: &NodeSet,
    route: InterpolationRoute,
) -> Result<BarycentricRational> {
    let (r, diag) = build_interpolant_diagnosed(omega, nodes, route)?;
    diag.verify()?;
    Ok(r)
}

/// Quality indicators of a computed interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolantDiagnostics {
    /// Ratio of the two smallest singular values (0 for degree 0).
    pub gap_ratio: f64,
    /// Largest `|r(it) - e^{iωt}|` over the test nodes.
    pub test_residual: f64,
    /// `min |w_k| / max |w_k|`.
    pub weight_spread: f64,
}

impl InterpolantDiagnostics {
    fn new(r: &BarycentricRational, omega: f64, tests: &[f64], gap_ratio: f64) -> Self {
        let w = r.weights();
        let max_w = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let min_w = w.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let test_residual = tests
            .iter()
            .map(|t| (r.eval_ix(*t) - expi(omega, *t)).norm())
            .fold(0.0, f64::max);
        Self {
            gap_ratio,
            test_residual,
            weight_spread: min_w / max_w,
        }
    }

    /// Passes if the gap test passes, or if the system is rank deficient at
    /// roundoff level only: every interpolation condition holds to
    /// [`RESIDUAL_TOLERANCE`] and no weight vanishes.
    pub fn verify(&self) -> Result<()> {
        self.verify_with(RESIDUAL_TOLERANCE)
    }

    /// As [`Self::verify`] with a caller-chosen residual tolerance.
    pub fn verify_with(&self, residual_tolerance: f64) -> Result<()> {
        match check_gap(self.gap_ratio) {
            Ok(()) => Ok(()),
            Err(_)
                if self.test_residual <= residual_tolerance
                    && self.weight_spread >= WEIGHT_SPREAD_TOLERANCE =>
            {
                Ok(())
            }
            Err(e) => Err(e),
        }
    }
}

/// Builds the interpolant without rejecting it; the gap test is left to the
/// caller through the returned diagnostics.
pub fn build_interpolant_diagnosed(
    omega: f64,
    nodes: &NodeSet,
    route: InterpolationRoute,
) -> Result<(BarycentricRational, InterpolantDiagnostics)> {
    let n = nodes.degree();
    check_omega(omega, n)?;
    let support: Vec<usize> = (0..=n).map(|k| 2 * k).collect();
    let (r, ratio) = match route {
        InterpolationRoute::Auto if nodes.is_symmetric() && n > 0 => symmetric_interpolant(omega, nodes)?,
        InterpolationRoute::Auto | InterpolationRoute::Real => real_interpolant(omega, nodes.nodes(), &support)?,
        InterpolationRoute::ComplexLoewner => loewner_interpolant(omega, nodes.nodes(), &support)?,
    };
    let tests: Vec<f64> = (0..n).map(|j| nodes.nodes()[2 * j + 1]).collect();
    let diag = InterpolantDiagnostics::new(&r, omega, &tests, ratio);
    Ok((r, diag))
}

fn check_omega(omega: f64, n: usize) -> Result<()> {
    let limit = (n as f64 + 1.0) * PI;
    if !(omega > 0.0 && omega < limit) {
        return Err(Error::Domain(format!(
            "omega = {omega} outside (0, (n+1)pi) = (0, {limit}) for n = {n}"
        )));
    }
    Ok(())
}

/// `sin(ω d / 2) / d`, continuous at `d = 0`.
#[inline]
pub(crate) fn half_sinc(omega: f64, d: f64) -> f64 {
    if d == 0.0 {
        0.5 * omega
    } else {
        (0.5 * omega * d).sin() / d
    }
}

pub(crate) fn from_real_weights(omega: f64, support_nodes: Vec<f64>, u: &[f64]) -> Result<BarycentricRational> {
    let weights = support_nodes
        .iter()
        .zip(u)
        .map(|(s, uk)| expi(-0.5 * omega, *s) * *uk)
        .collect();
    let values = support_nodes.iter().map(|s| expi(omega, *s)).collect();
    BarycentricRational::new_unitary(support_nodes, weights, values)
}

fn check_gap(ratio: f64) -> Result<()> {
    if ratio > SINGULAR_GAP_LIMIT || ratio.is_nan() {
        return Err(Error::SmallestSingularValueNotIsolated { ratio });
    }
    Ok(())
}

/// Test-node residual up to which a numerically rank-deficient system is
/// still accepted as an interpolant.
pub const RESIDUAL_TOLERANCE: f64 = 1e-13;
/// Smallest admissible `min |w_k| / max |w_k|`.
pub const WEIGHT_SPREAD_TOLERANCE: f64 = 1e-12;

/// Interpolates in `nodes` with the given `n + 1` indices as support nodes and
/// the remaining `n` as test nodes (full real system).
pub fn interpolate_with_support(
    omega: f64,
    nodes: &[f64],
    support: &[usize],
) -> Result<BarycentricRational> {
    let (r, ratio) = real_interpolant(omega, nodes, support)?;
    let (_, t) = split_nodes(nodes, support)?;
    InterpolantDiagnostics::new(&r, omega, &t, ratio).verify()?;
    Ok(r)
}

fn real_interpolant(omega: f64, nodes: &[f64], support: &[usize]) -> Result<(BarycentricRational, f64)> {
    let (s, t) = split_nodes(nodes, support)?;
    let mut u = vec![1.0];
    let mut ratio = 0.0;
    if !t.is_empty() {
        let a = DMatrix::from_fn(t.len(), s.len(), |j, k| half_sinc(omega, t[j] - s[k]));
        let nv = smallest_right_singular_vector(&a)?;
        ratio = nv.gap_ratio();
        u = nv.vector.iter().copied().collect();
    }
    Ok((from_real_weights(omega, s, &u)?, ratio))
}

fn split_nodes(nodes: &[f64], support: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = nodes.len() / 2;
    if nodes.len() != 2 * n + 1 || support.len() != n + 1 {
        return Err(Error::InvalidNodes(format!(
            "{} support indices for {} nodes",
            support.len(),
            nodes.len()
        )));
    }
    let mut is_support = vec![false; nodes.len()];
    for &k in support {
        if k >= nodes.len() || is_support[k] {
            return Err(Error::InvalidNodes(format!("bad support index {k}")));
        }
        is_support[k] = true;
    }
    let mut s = Vec::with_capacity(n + 1);
    let mut t = Vec::with_capacity(n);
    for (x, sup) in nodes.iter().zip(&is_support) {
        if *sup {
            s.push(*x);
        } else {
            t.push(*x);
        }
    }
    Ok((s, t))
}

/// Interpolant from the smallest right singular vector of the complex
/// Loewner matrix of divided differences.
pub fn complex_loewner_interpolant(
    omega: f64,
    nodes: &[f64],
    support: &[usize],
) -> Result<BarycentricRational> {
    let (r, ratio) = loewner_interpolant(omega, nodes, support)?;
    let (_, t) = split_nodes(nodes, support)?;
    InterpolantDiagnostics::new(&r, omega, &t, ratio).verify()?;
    Ok(r)
}

fn loewner_interpolant(omega: f64, nodes: &[f64], support: &[usize]) -> Result<(BarycentricRational, f64)> {
    let (s, t) = split_nodes(nodes, support)?;
    let f = |x: f64| expi(omega, x);
    let mut w = vec![Complex64::new(1.0, 0.0)];
    let mut ratio = 0.0;
    if !t.is_empty() {
        let l = DMatrix::from_fn(t.len(), s.len(), |j, k| (f(t[j]) - f(s[k])) / (t[j] - s[k]));
        let nv = smallest_right_singular_vector(&l)?;
        ratio = nv.gap_ratio();
        w = nv.vector.iter().copied().collect();
    }
    let values = s.iter().map(|x| f(*x)).collect();
    Ok((BarycentricRational::new(s, w, values)?, ratio))
}

/// Symmetric nodes: the real weights satisfy `u_{mirror(k)} = u_k` for even
/// `n` and `u_{mirror(k)} = -u_k` for odd `n`, which halves the system.
fn symmetric_interpolant(omega: f64, nodes: &NodeSet) -> Result<(BarycentricRational, f64)> {
    let n = nodes.degree();
    let x = nodes.nodes();
    let support: Vec<f64> = (0..=n).map(|k| x[2 * k]).collect();
    // Positive test nodes (odd node indices above the centre).
    let tests: Vec<f64> = (0..n).map(|j| x[2 * j + 1]).filter(|t| *t > 0.0).collect();
    let even = n.is_multiple_of(2);
    // Unknowns: support nodes s >= 0 (s = 0 only for even n).
    let half: Vec<f64> = support.iter().copied().filter(|s| *s >= 0.0).collect();
    let sign = if even { 1.0 } else { -1.0 };
    let column = |t: f64, s: f64| {
        if s == 0.0 {
            half_sinc(omega, t)
        } else {
            half_sinc(omega, t - s) + sign * half_sinc(omega, t + s)
        }
    };
    let mut uh = vec![1.0];
    let mut ratio = 0.0;
    if !tests.is_empty() {
        let a = DMatrix::from_fn(tests.len(), half.len(), |j, k| column(tests[j], half[k]));
        let nv = smallest_right_singular_vector(&a)?;
        ratio = nv.gap_ratio();
        uh = nv.vector.iter().copied().collect();
    }
    // Expand: support nodes are ordered -h_last, ..., -h_first(, 0), h_first, ...
    let offset = if even { 1 } else { 0 };
    let mut u = Vec::with_capacity(n + 1);
    for k in (offset..half.len()).rev() {
        u.push(sign * uh[k]);
    }
    u.extend_from_slice(&uh);
    debug_assert_eq!(u.len(), n + 1);
    Ok((from_real_weights(omega, support, &u)?, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_set_validation() {
        assert!(NodeSet::new(vec![-0.5, 0.5]).is_err());
        assert!(NodeSet::new(vec![-0.5, 0.6, 0.5]).is_err());
        assert!(NodeSet::new(vec![-1.0, 0.0, 0.5]).is_err());
        let s = NodeSet::new(vec![-0.5, 0.0, 0.5]).unwrap();
        assert!(s.is_symmetric());
        assert_eq!(s.degree(), 1);
        let a = NodeSet::new(vec![-0.5, 0.1, 0.5]).unwrap();
        assert!(!a.is_symmetric());
        let r = NodeSet::from_unsorted(vec![0.5, 0.0, -0.5]).unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn mirrored_and_symmetrized() {
        let s = NodeSet::mirrored(&[0.3, 0.7]).unwrap();
        assert_eq!(s.nodes(), &[-0.7, -0.3, 0.0, 0.3, 0.7]);
        let a = NodeSet::new(vec![-0.71, -0.3, 0.01, 0.31, 0.69]).unwrap();
        let m = a.symmetrized().unwrap();
        assert!(m.is_symmetric());
        assert!((m.nodes()[4] - 0.7).abs() < 1e-15);
        assert!((m.nodes()[3] - 0.305).abs() < 1e-15);
    }

    #[test]
    fn rejects_omega_outside_uniqueness_range() {
        let nodes = NodeSet::new(vec![-0.5, 0.0, 0.5]).unwrap();
        assert!(matches!(build_interpolant(2.0 * PI + 0.1, &nodes), Err(Error::Domain(_))));
        assert!(matches!(build_interpolant(0.0, &nodes), Err(Error::Domain(_))));
    }

    #[test]
    fn degree_zero_is_constant_one() {
        let nodes = NodeSet::new(vec![0.0]).unwrap();
        let r = build_interpolant(1.0, &nodes).unwrap();
        assert_eq!(r.degree(), 0);
        assert_eq!(r.eval_ix(0.3), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gap_check_threshold() {
        assert!(check_gap(1e-3).is_ok());
        assert!(matches!(check_gap(0.5), Err(Error::SmallestSingularValueNotIsolated { .. })));
        assert!(check_gap(f64::NAN).is_err());
    }
}

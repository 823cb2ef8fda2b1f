//! Barycentric rational functions with support nodes on the imaginary axis.
//!
//! A degree-`n` function is stored through `n + 1` real support nodes `s_k`,
//! complex weights `w_k` and support values `f_k`:
//!
//! ```text
//! r(z) = sum_k w_k f_k / (z - i s_k)  /  sum_k w_k / (z - i s_k)
//! ```
//!
//! On the imaginary axis `z = i x` the common factor `i` cancels, so `r(ix)`
//! is an ordinary barycentric quotient in the real variable `x`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `e^{iωx}` with the product `ωx` carried in twice the working precision,
/// so that rounding of `ωx` does not show up in the phase.
#[inline]
pub fn expi(omega: f64, x: f64) -> Complex64 {
    let p = omega * x;
    let e = omega.mul_add(x, -p);
    let (s, c) = p.sin_cos();
    // e^{ie} = 1 + ie to working precision since |e| <= ulp(p)
    Complex64::new(c - s * e, s + c * e)
}

/// Relative weight magnitude below which a representation is flagged as
/// (nearly) degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricRational {
    support_nodes: Vec<f64>,
    weights: Vec<Complex64>,
    support_values: Vec<Complex64>,
    // w_k * f_k, cached for evaluation
    numer: Vec<Complex64>,
}

impl BarycentricRational {
    pub fn new(
        support_nodes: Vec<f64>,
        weights: Vec<Complex64>,
        support_values: Vec<Complex64>,
    ) -> Result<Self> {
        let m = support_nodes.len();
        if m == 0 {
            return Err(Error::InvalidRational("no support nodes".into()));
        }
        if weights.len() != m || support_values.len() != m {
            return Err(Error::InvalidRational(format!(
                "length mismatch: {} nodes, {} weights, {} values",
                m,
                weights.len(),
                support_values.len()
            )));
        }
        if support_nodes.iter().any(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(Error::InvalidRational("support nodes must lie in [-1, 1]".into()));
        }
        if support_nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidRational("support nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| *w == Complex64::new(0.0, 0.0) || !w.is_finite()) {
            return Err(Error::InvalidRational("weights must be finite and nonzero".into()));
        }
        if support_values.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidRational("support values must be finite".into()));
        }
        let numer = weights.iter().zip(&support_values).map(|(w, f)| w * f).collect();
        Ok(Self {
            support_nodes,
            weights,
            support_values,
            numer,
        })
    }

    /// Unitary function with numerator coefficients `conj(w_k)`, i.e.
    /// `r(ix) = conj(D(x)) / D(x)` with `D(x) = sum_k w_k / (x - s_k)`.
    ///
    /// `support_values` must equal `conj(w_k) / w_k` up to rounding; they are
    /// returned at the support nodes, while the numerator is stored as the
    /// exact conjugate so that `|r(ix)| = 1` holds to a single rounding.
    pub fn new_unitary(
        support_nodes: Vec<f64>,
        weights: Vec<Complex64>,
        support_values: Vec<Complex64>,
    ) -> Result<Self> {
        let mut r = Self::new(support_nodes, weights, support_values)?;
        for (w, f) in r.weights.iter().zip(&r.support_values) {
            if (f - w.conj() / w).norm() > 1e-12 {
                return Err(Error::InvalidRational("support values are not conj(w) / w".into()));
            }
        }
        r.numer = r.weights.iter().map(|w| w.conj()).collect();
        Ok(r)
    }

    /// The constant function `r = 1` (degree 0).
    pub fn one() -> Self {
        Self::new(vec![0.0], vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(1.0, 0.0)])
            .expect("constant function is well formed")
    }

    pub fn degree(&self) -> usize {
        self.support_nodes.len() - 1
    }

    pub fn support_nodes(&self) -> &[f64] {
        &self.support_nodes
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn support_values(&self) -> &[Complex64] {
        &self.support_values
    }

    /// True if some weight is tiny relative to the largest one.
    pub fn is_near_degenerate(&self) -> bool {
        let wmax = self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
        self.weights.iter().any(|w| w.norm() < DEGENERACY_THRESHOLD * wmax)
    }

    /// Evaluates `r(z)` for complex `z`.
    ///
    /// At `z = i s_k` the stored support value is returned without division.
    /// A denominator that vanishes exactly away from the support nodes is
    /// reported as [`Error::Pole`].
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.re == 0.0 {
            if let Some(k) = self.support_index(z.im) {
                return Ok(self.support_values[k]);
            }
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((s, w), wf) in self.support_nodes.iter().zip(&self.weights).zip(&self.numer) {
            let c = (z - Complex64::new(0.0, *s)).inv();
            num += wf * c;
            den += w * c;
        }
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
        Ok(num / den)
    }

    /// Evaluates `r(ix)` for real `x`.
    pub fn eval_ix(&self, x: f64) -> Complex64 {
        if let Some(k) = self.support_index(x) {
            return self.support_values[k];
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((s, w), wf) in self.support_nodes.iter().zip(&self.weights).zip(&self.numer) {
            let c = 1.0 / (x - s);
            num += wf * c;
            den += w * c;
        }
        num / den
    }

    fn support_index(&self, x: f64) -> Option<usize> {
        // -0.0 + 0.0 = +0.0, so both zeros find a support node at 0
        let x = x + 0.0;
        self.support_nodes
            .binary_search_by(|s| s.total_cmp(&x))
            .ok()
            .filter(|&k| self.support_nodes[k] == x)
    }

    /// Poles and zeros in the complex `z` plane.
    pub fn poles_zeros(&self) -> Result<PoleZeroSet> {
        let (poles, pole_deg) = self.roots_of(&self.weights)?;
        let (zeros, zero_deg) = self.roots_of(&self.numer)?;
        let n = self.degree();
        let degenerate = pole_deg || zero_deg || poles.len() < n || self.is_near_degenerate();
        Ok(PoleZeroSet {
            poles,
            zeros,
            degenerate,
        })
    }

    /// Finite roots of `sum_k c_k / (z - i s_k)`.
    ///
    /// These are the finite eigenvalues of the arrowhead pencil
    /// `([0 c^T; 1 Z], diag(0, I))`. Its two infinite eigenvalues are removed
    /// exactly by restricting to the subspace `{y : 1^T y = 0}`, which leaves an
    /// `n x n` standard eigenproblem.
    fn roots_of(&self, c: &[Complex64]) -> Result<(Vec<Complex64>, bool)> {
        let m = c.len();
        if m < 2 {
            return Ok((Vec::new(), false));
        }
        let csum: Complex64 = c.iter().sum();
        let cabs: f64 = c.iter().map(|v| v.norm()).sum();
        let degenerate = csum.norm() <= DEGENERACY_THRESHOLD * cabs;
        if csum == Complex64::new(0.0, 0.0) {
            return Ok((Vec::new(), true));
        }

        // Householder reflector H with H e = -sqrt(m) e_1; columns 1..m of H
        // span the orthogonal complement of e = (1, ..., 1).
        let sqrt_m = (m as f64).sqrt();
        let mut v = vec![1.0; m];
        v[0] += sqrt_m;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let q = DMatrix::<f64>::from_fn(m, m - 1, |i, j| {
            let col = j + 1;
            let delta = if i == col { 1.0 } else { 0.0 };
            delta - 2.0 * v[i] * v[col] / vtv
        });

        let z: Vec<Complex64> = self.support_nodes.iter().map(|s| Complex64::new(0.0, *s)).collect();
        // Q^T Z Q - (Q^T c)(1^T Z Q) / (1^T c)
        let mut k = DMatrix::<Complex64>::zeros(m - 1, m - 1);
        let qtc: Vec<Complex64> = (0..m - 1)
            .map(|a| (0..m).map(|i| c[i] * q[(i, a)]).sum())
            .collect();
        let ezq: Vec<Complex64> = (0..m - 1)
            .map(|b| (0..m).map(|i| z[i] * q[(i, b)]).sum())
            .collect();
        for a in 0..m - 1 {
            for b in 0..m - 1 {
                let qzq: Complex64 = (0..m).map(|i| z[i] * q[(i, a)] * q[(i, b)]).sum();
                k[(a, b)] = qzq - qtc[a] * ezq[b] / csum;
            }
        }
        let schur = Schur::try_new(k, f64::EPSILON, 0)
            .ok_or_else(|| Error::Breakdown("Schur decomposition did not converge".into()))?;
        let eig = schur
            .eigenvalues()
            .ok_or_else(|| Error::Breakdown("eigenvalues unavailable".into()))?;
        let scale = 1.0 + self.support_nodes.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
        let roots: Vec<Complex64> = eig
            .iter()
            .copied()
            .filter(|l| l.is_finite() && l.norm() < 1e12 * scale)
            .collect();
        Ok((roots, degenerate))
    }
}

/// Maximum of `| |r(ix)| - 1 |` over `grid`.
pub fn unitarity_defect(r: &BarycentricRational, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| (r.eval_ix(x).norm() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroSet {
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    /// Set when fewer than `n` finite poles exist or a weight is negligible.
    pub degenerate: bool,
}

impl PoleZeroSet {
    /// Evaluates `c * prod(z - zeros) / prod(z - poles)`.
    pub fn product_form(&self, constant: Complex64, z: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|q| z - q).product();
        let den: Complex64 = self.poles.iter().map(|p| z - p).product();
        constant * num / den
    }
}

//! AAA greedy rational approximation and the Lawson iteration on discrete
//! test nodes, used to cross-check the interpolation-based iteration.
//!
//! Both operate on the unitary class directly: for support nodes `s_k` the
//! denominator `D(x) = sum_k b_k / (x - s_k)` determines the numerator as its
//! complex conjugate, and the linearized residual
//! `conj(D) - e^{iωx} D = -2i e^{iωx/2} Im(e^{iωx/2} D(x))` is real up to a
//! unimodular factor. For AAA this gives the real sinc matrix of the
//! interpolation module; for Lawson a real least-squares problem in
//! `(Re b, Im b)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::equi_metrics::{approximation_error, phase_error};
use crate::error::{Error, Result};
use crate::interpolation::{from_real_weights, half_sinc, NodeSet};
use crate::linalg::{linspace, smallest_right_singular_vector};
use crate::numerics::{expi, BarycentricRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestNodeKind {
    Equispaced(usize),
    /// Simplified re-clustering toward error maxima; not a reproduction of
    /// any published adaptive scheme.
    Adaptive,
}

impl TestNodeKind {
    pub fn label(&self) -> String {
        match self {
            TestNodeKind::Equispaced(count) => format!("equispaced({count})"),
            TestNodeKind::Adaptive => "simplified adaptive".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestNodeSet {
    nodes: Vec<f64>,
    kind: TestNodeKind,
}

impl TestNodeSet {
    pub fn equispaced(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidNodes("need at least two test nodes".into()));
        }
        Ok(Self {
            nodes: linspace(count),
            kind: TestNodeKind::Equispaced(count),
        })
    }

    /// Validates an arbitrary strictly increasing set in `[-1, 1]`.
    pub fn from_nodes(nodes: Vec<f64>, kind: TestNodeKind) -> Result<Self> {
        if nodes.iter().any(|x| !x.is_finite() || x.abs() > 1.0) {
            return Err(Error::InvalidNodes("test nodes must lie in [-1, 1]".into()));
        }
        if nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidNodes("test nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, kind })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kind(&self) -> TestNodeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn check_for_degree(&self, n: usize) -> Result<()> {
        if self.nodes.len() < 2 * (2 * n + 2) {
            return Err(Error::InvalidNodes(format!(
                "{} test nodes are too few for degree {n}",
                self.nodes.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawsonState {
    /// Normalized weights, one per test node.
    pub weights: Vec<f64>,
    pub iteration: usize,
    /// Maximal error on the test nodes: initial approximant first, then one
    /// entry per iteration.
    pub error_history: Vec<f64>,
}

/// AAA with exactly `n + 1` greedily chosen support nodes.
pub fn aaa(omega: f64, tests: &TestNodeSet, n: usize) -> Result<BarycentricRational> {
    tests.check_for_degree(n)?;
    let z = tests.nodes();
    let f: Vec<Complex64> = z.iter().map(|x| expi(omega, *x)).collect();
    let mean = f.iter().sum::<Complex64>() / z.len() as f64;
    let mut residual: Vec<f64> = f.iter().map(|v| (v - mean).norm()).collect();
    let mut is_support = vec![false; z.len()];
    // support indices in the order of selection, matching the QR columns
    let mut chosen: Vec<usize> = Vec::with_capacity(n + 1);
    let mut basis = GrowingQr::new(z.len());
    let mut r = BarycentricRational::one();

    while chosen.len() < n + 1 {
        let mut pick = None;
        for (i, res) in residual.iter().enumerate() {
            if is_support[i] {
                continue;
            }
            // strict comparison keeps the smallest index among ties
            if pick.is_none_or(|p: usize| *res > residual[p]) {
                pick = Some(i);
            }
        }
        let pick = pick.ok_or_else(|| Error::Breakdown("ran out of test nodes".into()))?;
        is_support[pick] = true;
        chosen.push(pick);
        let column: Vec<f64> = z.iter().map(|t| half_sinc(omega, t - z[pick])).collect();
        basis.push(column);

        let u = match basis.filtered_factor(&chosen) {
            Some(m) => smallest_right_singular_vector(&m)?.vector,
            None => {
                let rows: Vec<f64> = (0..z.len()).filter(|i| !is_support[*i]).map(|i| z[i]).collect();
                let a = DMatrix::from_fn(rows.len(), chosen.len(), |j, k| half_sinc(omega, rows[j] - z[chosen[k]]));
                smallest_right_singular_vector(&a)?.vector
            }
        };
        if u.iter().any(|v| *v == 0.0) {
            return Err(Error::Breakdown("vanishing AAA weight".into()));
        }
        let mut pairs: Vec<(f64, f64)> = chosen.iter().map(|&k| z[k]).zip(u.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (s, u): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        r = from_real_weights(omega, s, &u)?;
        for (i, res) in residual.iter_mut().enumerate() {
            *res = if is_support[i] {
                0.0
            } else {
                (r.eval_ix(z[i]) - f[i]).norm()
            };
        }
    }
    Ok(r)
}

/// Thin QR factorization `B = QR` of the sinc columns over all test nodes,
/// grown one column per AAA step by Gram-Schmidt with reorthogonalization.
struct GrowingQr {
    rows: usize,
    q: Vec<Vec<f64>>,
    /// Columns of the upper triangular factor.
    r: Vec<Vec<f64>>,
    /// Set once a new column was numerically dependent on the previous ones.
    broken: bool,
}

/// Smallest admissible diagonal entry of the Cholesky factor of
/// `I - Q_s^T Q_s`; below it the direct route is used.
const FILTER_CONDITION_LIMIT: f64 = 1e-2;

impl GrowingQr {
    fn new(rows: usize) -> Self {
        Self { rows, q: Vec::new(), r: Vec::new(), broken: false }
    }

    fn push(&mut self, mut c: Vec<f64>) {
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut coef = vec![0.0; self.q.len() + 1];
        for _ in 0..2 {
            for (j, qj) in self.q.iter().enumerate() {
                let h: f64 = qj.iter().zip(&c).map(|(a, b)| a * b).sum();
                coef[j] += h;
                for (ci, qi) in c.iter_mut().zip(qj) {
                    *ci -= h * qi;
                }
            }
        }
        let rest = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(rest > 1e-8 * norm) {
            self.broken = true;
        }
        coef[self.q.len()] = rest;
        for ci in &mut c {
            *ci /= rest;
        }
        debug_assert_eq!(c.len(), self.rows);
        self.q.push(c);
        self.r.push(coef);
    }

    /// Triangular factor of the matrix restricted to the non-support rows:
    /// with `Q_s` the rows of `Q` at the support nodes,
    /// `(PQ)^T (PQ) = I - Q_s^T Q_s = L L^T`, so `PB` and `L^T R` share their
    /// right singular vectors. `None` when that factorization is not reliable.
    fn filtered_factor(&self, support: &[usize]) -> Option<DMatrix<f64>> {
        if self.broken {
            return None;
        }
        let k = self.q.len();
        let qs = DMatrix::from_fn(support.len(), k, |i, j| self.q[j][support[i]]);
        let gram = DMatrix::identity(k, k) - qs.transpose() * &qs;
        let l = gram.cholesky()?.l();
        if (0..k).any(|i| l[(i, i)] < FILTER_CONDITION_LIMIT) {
            return None;
        }
        let r = DMatrix::from_fn(k, k, |i, j| if i <= j { self.r[j][i] } else { 0.0 });
        Some(l.transpose() * r)
    }
}

/// Exponent of the error in the Lawson weight update; values above 1
/// accelerate the slow tail of the classical update (exponent 1).
pub const LAWSON_EXPONENT: f64 = 1.5;

/// Lawson iteration on the support nodes of `r`. Returns the iterate with the
/// smallest error on the test nodes, which may be `r` itself.
///
/// With `D(x) = Σ b_k / (x - s_k)` and `r = conj(D) / D` the error is
/// `|r(ix) - e^{iωx}| = 2 |Im(e^{iωx/2} D(x))| / |D(x)|`. Each least squares
/// step freezes `|D|` at the previous iterate, so the residual is the true
/// error to first order; test nodes that coincide with support nodes enter
/// through the limit `Im(e^{iωs_k/2} b_k) / |b_k|`.
pub fn lawson(r: &BarycentricRational, omega: f64, tests: &TestNodeSet, iters: usize) -> Result<(BarycentricRational, LawsonState)> {
    let s = r.support_nodes().to_vec();
    let m = s.len();
    let z = tests.nodes();
    if z.len() < 2 * m {
        return Err(Error::InvalidNodes("too few test nodes for the Lawson iteration".into()));
    }
    let support_of: Vec<Option<usize>> = z
        .iter()
        .map(|x| s.binary_search_by(|v| v.total_cmp(x)).ok())
        .collect();
    let half: Vec<Complex64> = z.iter().map(|x| expi(0.5 * omega, *x)).collect();
    let errors_of = |q: &BarycentricRational| -> Vec<f64> { z.iter().map(|x| approximation_error(q, omega, *x)).collect() };
    let max_of = |e: &[f64]| e.iter().copied().fold(0.0, f64::max);

    let mut weights = vec![1.0 / z.len() as f64; z.len()];
    let initial_error = max_of(&errors_of(r));
    let mut history = vec![initial_error];
    let mut best = (r.clone(), initial_error);
    let mut current = r.weights().to_vec();
    let mut done = 0;

    for _ in 0..iters {
        let scale: Vec<f64> = z
            .iter()
            .zip(&support_of)
            .zip(&weights)
            .map(|((x, sup), w)| {
                let d = match sup {
                    Some(k) => current[*k].norm(),
                    None => s.iter().zip(&current).map(|(sk, bk)| bk / (x - sk)).sum::<Complex64>().norm(),
                };
                if d > 0.0 && d.is_finite() {
                    w.sqrt() / d
                } else {
                    0.0
                }
            })
            .collect();
        let a = DMatrix::from_fn(z.len(), 2 * m, |j, c| {
            let k = c % m;
            let trig = if c < m { half[j].im } else { half[j].re };
            match support_of[j] {
                Some(sk) if sk == k => scale[j] * trig,
                Some(_) => 0.0,
                None => scale[j] * trig / (z[j] - s[k]),
            }
        });
        let nv = match smallest_right_singular_vector(&a) {
            Ok(nv) => nv,
            Err(_) => break,
        };
        let b: Vec<Complex64> = (0..m).map(|k| Complex64::new(nv.vector[k], nv.vector[k + m])).collect();
        let values: Vec<Complex64> = b.iter().map(|bk| bk.conj() / bk).collect();
        let Ok(next) = BarycentricRational::new_unitary(s.clone(), b.clone(), values) else {
            break;
        };
        let errs = errors_of(&next);
        let e = max_of(&errs);
        history.push(e);
        done += 1;
        if e < best.1 {
            best = (next, e);
        }
        current = b;
        for (w, err) in weights.iter_mut().zip(&errs) {
            *w *= err.powf(LAWSON_EXPONENT);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            break;
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    Ok((
        best.0,
        LawsonState {
            weights,
            iteration: done,
            error_history: history,
        },
    ))
}

/// Refinement rounds used when no count is given.
pub const DEFAULT_ADAPTIVE_ROUNDS: usize = 2;

/// Short Lawson run used inside the adaptive refinement.
const ADAPTIVE_LAWSON_STEPS: usize = 10;
/// Refinement points per side of a detected maximum.
const REFINE_LEVELS: usize = 4;

/// Starts from `10 (2n + 2)` equispaced nodes and, in each round, inserts
/// geometrically graded nodes around the local error maxima of an AAA-Lawson
/// approximant. The total count stays below twice the initial count.
pub fn adaptive_test_nodes(omega: f64, n: usize, rounds: usize) -> Result<TestNodeSet> {
    if rounds == 0 {
        return Err(Error::Domain("rounds must be at least 1".into()));
    }
    let base = 10 * (2 * n + 2);
    let mut nodes = linspace(base);
    let budget = base;
    let mut added = 0;
    for _ in 0..rounds {
        let tests = TestNodeSet::from_nodes(nodes.clone(), TestNodeKind::Adaptive)?;
        let r0 = aaa(omega, &tests, n)?;
        let (r, _) = lawson(&r0, omega, &tests, ADAPTIVE_LAWSON_STEPS)?;
        let peaks = local_maxima_locations(&r, omega, 20 * base);
        let per_round = (budget - added) / rounds.max(1);
        let mut fresh = Vec::new();
        for p in peaks {
            // spacing of the current nodes around the peak
            let idx = nodes.partition_point(|v| *v < p);
            let lo = nodes[idx.saturating_sub(1)];
            let hi = nodes[idx.min(nodes.len() - 1)];
            let h = (hi - lo).max(f64::EPSILON);
            for level in 1..=REFINE_LEVELS {
                let d = h * 0.5f64.powi(level as i32);
                for cand in [p - d, p + d] {
                    if cand.abs() <= 1.0 {
                        fresh.push(cand);
                    }
                }
            }
            fresh.push(p);
        }
        fresh.truncate(per_round);
        added += fresh.len();
        nodes.extend(fresh);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        if added >= budget {
            break;
        }
    }
    TestNodeSet::from_nodes(nodes, TestNodeKind::Adaptive)
}

/// Locations of the local maxima of the error on an equispaced grid.
fn local_maxima_locations(r: &BarycentricRational, omega: f64, count: usize) -> Vec<f64> {
    let grid = linspace(count.max(3));
    let e: Vec<f64> = grid.iter().map(|&x| approximation_error(r, omega, x)).collect();
    (0..grid.len())
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { e[i - 1] };
            let right = if i + 1 == grid.len() { f64::NEG_INFINITY } else { e[i + 1] };
            e[i] > left && e[i] >= right
        })
        .map(|i| grid[i])
        .collect()
}

/// Errors this close to the maximal value 2 leave the phase undetermined.
const MAXIMAL_ERROR_MARGIN: f64 = 1e-8;

/// Recovers the `2n + 1` interpolation nodes of `r` from sign changes of the
/// phase error on a grid of `50 (2n + 2)` points, graded toward the interval
/// ends. Returns `None` unless exactly `2n + 1` nodes are found, and also when
/// the error attains its maximal value 2, seen as the phase error wrapping
/// through ±π.
pub fn detect_interpolation_nodes(r: &BarycentricRational, omega: f64) -> Option<NodeSet> {
    detect_interpolation_nodes_with(r, omega, 50 * (2 * r.degree() + 2))
}

pub fn detect_interpolation_nodes_with(r: &BarycentricRational, omega: f64, grid_count: usize) -> Option<NodeSet> {
    let n = r.degree();
    let grid: Vec<f64> = linspace(grid_count.max(3)).into_iter().map(|t| (FRAC_PI_2 * t).sin()).collect();
    let err_max = grid.iter().map(|&x| approximation_error(r, omega, x)).fold(0.0, f64::max);
    if err_max >= 2.0 - MAXIMAL_ERROR_MARGIN {
        return None;
    }
    let phase: Vec<f64> = grid.iter().map(|&x| phase_error(r, omega, x)).collect();
    let mut roots = Vec::with_capacity(2 * n + 1);
    for i in 0..grid.len() {
        if phase[i] == 0.0 {
            if grid[i].abs() < 1.0 {
                roots.push(grid[i]);
            }
            continue;
        }
        if i + 1 < grid.len() && phase[i] * phase[i + 1] < 0.0 {
            // a jump across the branch cut means the error reached 2 in between
            if (phase[i] - phase[i + 1]).abs() >= std::f64::consts::PI {
                return None;
            }
            roots.push(bisect_phase(r, omega, grid[i], grid[i + 1], phase[i]));
        }
    }
    if roots.len() != 2 * n + 1 {
        return None;
    }
    NodeSet::new(roots).ok()
}

fn bisect_phase(r: &BarycentricRational, omega: f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let positive_left = fa > 0.0;
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        let fm = phase_error(r, omega, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == positive_left {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

//! JSON document for a computed approximant and the CSV trace writers.
//!
//! Numbers are written by serde_json in shortest round-trip form, so reading
//! a document back reproduces every stored double exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use uniapprox::aaa_lawson::LawsonState;
use uniapprox::driver::ConvergenceTrace;
use uniapprox::{sandwich, BarycentricRational, BestApproximation, EquioscillationReport};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximantDocument {
    pub n: usize,
    pub omega: f64,
    /// `best`, `aaa` or `aaa-lawson`.
    pub method: String,
    /// Test-node description for AAA runs, e.g. `equispaced(4900)`.
    pub test_nodes: Option<String>,
    pub support_nodes: Vec<f64>,
    pub weight_real: Vec<f64>,
    pub weight_imag: Vec<f64>,
    pub interp_nodes: Option<Vec<f64>>,
    pub eta: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub uniform_error: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub poles_re: Option<Vec<f64>>,
    pub poles_im: Option<Vec<f64>>,
    pub zeros_re: Option<Vec<f64>>,
    pub zeros_im: Option<Vec<f64>>,
    pub iterations: usize,
    pub strategy: String,
    pub converged: bool,
    pub tool_version: String,
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

impl ApproximantDocument {
    /// Document for a result of the interpolation-based iteration.
    pub fn from_best(best: &BestApproximation, omega: f64, strategy: &str) -> Self {
        let mut doc = Self::bare(&best.rational, omega, "best", None);
        doc.set_report(best.nodes.nodes(), &best.report);
        doc.iterations = best.iterations;
        doc.strategy = strategy.to_string();
        doc.converged = best.converged;
        doc
    }

    /// Document for an AAA or AAA-Lawson result. `detected` holds the
    /// interpolation nodes and their report when they could be recovered;
    /// otherwise `uniform_error` is the grid estimate `fallback_error`. The
    /// result counts as converged when its error in uniformity is at most
    /// `tol_delta`.
    pub fn from_aaa(
        r: &BarycentricRational,
        omega: f64,
        lawson_iterations: usize,
        test_nodes: String,
        detected: Option<(&[f64], &EquioscillationReport)>,
        fallback_error: f64,
        tol_delta: f64,
    ) -> Self {
        let method = if lawson_iterations > 0 { "aaa-lawson" } else { "aaa" };
        let mut doc = Self::bare(r, omega, method, Some(test_nodes));
        doc.iterations = lawson_iterations;
        doc.strategy = method.to_string();
        match detected {
            Some((nodes, report)) => {
                doc.set_report(nodes, report);
                doc.converged = report.alternating && report.uniform_error < 2.0 && report.delta <= tol_delta;
            }
            None => {
                doc.uniform_error = fallback_error;
                doc.converged = false;
            }
        }
        doc
    }

    fn bare(r: &BarycentricRational, omega: f64, method: &str, test_nodes: Option<String>) -> Self {
        let (poles, zeros) = match r.poles_zeros() {
            Ok(pz) => (Some(pz.poles), Some(pz.zeros)),
            Err(_) => (None, None),
        };
        let split = |v: Option<Vec<Complex64>>| match v {
            Some(v) => (Some(v.iter().map(|z| z.re).collect()), Some(v.iter().map(|z| z.im).collect())),
            None => (None, None),
        };
        let (poles_re, poles_im) = split(poles);
        let (zeros_re, zeros_im) = split(zeros);
        Self {
            n: r.degree(),
            omega,
            method: method.to_string(),
            test_nodes,
            support_nodes: r.support_nodes().to_vec(),
            weight_real: r.weights().iter().map(|w| w.re).collect(),
            weight_imag: r.weights().iter().map(|w| w.im).collect(),
            interp_nodes: None,
            eta: None,
            eps: None,
            delta: None,
            uniform_error: f64::NAN,
            lower_bound: None,
            upper_bound: None,
            poles_re,
            poles_im,
            zeros_re,
            zeros_im,
            iterations: 0,
            strategy: String::new(),
            converged: false,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    fn set_report(&mut self, nodes: &[f64], report: &EquioscillationReport) {
        self.interp_nodes = Some(nodes.to_vec());
        self.eta = Some(report.eta.clone());
        self.eps = Some(report.eps.clone());
        self.delta = Some(report.delta);
        self.uniform_error = report.uniform_error;
        if let Ok((lower, upper)) = sandwich(report) {
            self.lower_bound = Some(lower);
            self.upper_bound = Some(upper);
        }
    }

    /// Rebuilds the unitary approximant from the stored weights.
    pub fn rational(&self) -> CliResult<BarycentricRational> {
        let weights: Vec<Complex64> = self
            .weight_real
            .iter()
            .zip(&self.weight_imag)
            .map(|(re, im)| Complex64::new(*re, *im))
            .collect();
        let values = weights.iter().map(|w| w.conj() / w).collect();
        Ok(BarycentricRational::new_unitary(self.support_nodes.clone(), weights, values)?)
    }

    /// Checks array lengths against `n` and that `delta` and
    /// `uniform_error` follow from `eps`.
    pub fn validate(&self) -> CliResult<()> {
        let n = self.n;
        let bad = |what: &str| Err(CliError::Input(format!("inconsistent document: {what}")));
        if self.support_nodes.len() != n + 1 || self.weight_real.len() != n + 1 || self.weight_imag.len() != n + 1 {
            return bad("support nodes and weights need n + 1 entries");
        }
        if self.interp_nodes.as_ref().is_some_and(|v| v.len() != 2 * n + 1) {
            return bad("interp_nodes needs 2n + 1 entries");
        }
        for (name, arr) in [("eta", &self.eta), ("eps", &self.eps)] {
            if arr.as_ref().is_some_and(|v| v.len() != 2 * n + 2) {
                return bad(&format!("{name} needs 2n + 2 entries"));
            }
        }
        for (name, re, im) in [("poles", &self.poles_re, &self.poles_im), ("zeros", &self.zeros_re, &self.zeros_im)] {
            if re.as_ref().map(Vec::len) != im.as_ref().map(Vec::len) || re.as_ref().is_some_and(|v| v.len() > n) {
                return bad(&format!("{name} need matching re/im lists of at most n entries"));
            }
        }
        match (&self.eps, self.delta) {
            (Some(eps), Some(delta)) => {
                let report = EquioscillationReport::from_samples(vec![0.0; eps.len()], eps.clone(), vec![0.0; eps.len()], false);
                if report.delta != delta || report.uniform_error != self.uniform_error {
                    return bad("delta and uniform_error do not follow from eps");
                }
            }
            (None, None) => {}
            _ => return bad("eps and delta must be present together"),
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Formats a double in shortest round-trip form, switching to exponent
/// notation for very small or large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const BEST_TRACE_HEADER: &str = "iter,uniform_error,delta,strategy,alternating";
pub const LAWSON_TRACE_HEADER: &str = "iter,test_error";

/// Trace of the interpolation-based iteration, one row per iteration.
pub fn best_trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = format!("{BEST_TRACE_HEADER}\n");
    for (i, rec) in trace.records.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            fmt_f64(rec.uniform_error),
            fmt_f64(rec.delta),
            rec.step.as_str(),
            rec.alternating
        );
    }
    out
}

/// Lawson error history on the test nodes; row 0 is the AAA approximant.
pub fn lawson_trace_csv(state: &LawsonState) -> String {
    let mut out = format!("{LAWSON_TRACE_HEADER}\n");
    for (i, e) in state.error_history.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_f64(*e));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

//! Main iteration: interpolate, locate the error maxima, correct the nodes,
//! until the phase error equioscillates to the requested tolerance.

use std::f64::consts::PI;
use std::time::Instant;

use crate::equi_metrics::{local_error_maxima, EquioscillationReport, DEFAULT_SAMPLES_PER_INTERVAL};
use crate::error::{Error, Result};
use crate::interpolation::{build_interpolant_diagnosed, InterpolationRoute, NodeSet, RESIDUAL_TOLERANCE};
use crate::node_correction::{brasil_step, maehly_step, select_strategy, BrasilParams, MaehlyVariant, Strategy};
use crate::numerics::BarycentricRational;

/// Admissible test-node residual relative to the uniform error.
const RESIDUAL_TO_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyMode {
    /// BRASIL until the Maehly preconditions hold, then Maehly.
    Combined,
    BrasilOnly,
    /// Maehly steps, with BRASIL only where Maehly is not applicable.
    MaehlyOnly,
}

impl StrategyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyMode::Combined => "combined",
            StrategyMode::BrasilOnly => "brasil",
            StrategyMode::MaehlyOnly => "maehly",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestApproxConfig {
    pub n: usize,
    pub omega: f64,
    pub tol_delta: f64,
    pub max_iter: usize,
    pub strategy: StrategyMode,
    pub samples_per_interval: usize,
    pub brasil: BrasilParams,
}

impl BestApproxConfig {
    /// Defaults: `tol_delta = 1e-6`, 100 iterations, combined strategy.
    pub fn new(n: usize, omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("degree must be positive".into()));
        }
        let limit = (n as f64 + 1.0) * PI;
        if !(omega > 0.0 && omega < limit) {
            return Err(Error::Domain(format!(
                "omega = {omega} outside (0, (n+1)pi) = (0, {limit}) for n = {n}"
            )));
        }
        Ok(Self {
            n,
            omega,
            tol_delta: 1e-6,
            max_iter: 100,
            strategy: StrategyMode::Combined,
            samples_per_interval: DEFAULT_SAMPLES_PER_INTERVAL,
            brasil: BrasilParams::default(),
        })
    }

    pub fn with_tol_delta(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Domain(format!("tol_delta must lie in (0, 1), got {tol}")));
        }
        self.tol_delta = tol;
        Ok(self)
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Result<Self> {
        if max_iter == 0 {
            return Err(Error::Domain("max_iter must be positive".into()));
        }
        self.max_iter = max_iter;
        Ok(self)
    }

    pub fn with_strategy(mut self, strategy: StrategyMode) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_samples_per_interval(mut self, samples: usize) -> Result<Self> {
        if samples < 3 {
            return Err(Error::Domain("samples_per_interval must be at least 3".into()));
        }
        self.samples_per_interval = samples;
        Ok(self)
    }
}

/// Correction applied after an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepTaken {
    Brasil,
    MaehlyBilinear,
    MaehlyLogRatio,
    /// Maehly produced invalid nodes and BRASIL was used instead.
    BrasilFallback,
    /// Stopping criterion met, or last iteration.
    None,
}

impl StepTaken {
    pub fn as_str(self) -> &'static str {
        match self {
            StepTaken::Brasil => "brasil",
            StepTaken::MaehlyBilinear => "maehly-bilinear",
            StepTaken::MaehlyLogRatio => "maehly-log",
            StepTaken::BrasilFallback => "brasil-fallback",
            StepTaken::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub uniform_error: f64,
    pub delta: f64,
    pub step: StepTaken,
    pub alternating: bool,
    /// Seconds spent in this iteration.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Trace without timings, for reproducibility comparisons.
    pub fn without_timings(&self) -> Vec<(f64, f64, StepTaken, bool)> {
        self.records
            .iter()
            .map(|r| (r.uniform_error, r.delta, r.step, r.alternating))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BestApproximation {
    pub rational: BarycentricRational,
    pub report: EquioscillationReport,
    pub trace: ConvergenceTrace,
    pub nodes: NodeSet,
    pub converged: bool,
    pub iterations: usize,
}

/// Blend of Chebyshev and equispaced nodes,
/// `x_j = (1 - ξ) θ_j + ξ (-1 + j/(n+1))` with `ξ = ω / ((n+1)π)`.
pub fn initial_nodes(n: usize, omega: f64) -> Result<NodeSet> {
    let np1 = n as f64 + 1.0;
    if !(omega > 0.0 && omega < np1 * PI) {
        return Err(Error::Domain(format!("omega = {omega} outside (0, (n+1)pi)")));
    }
    let xi = omega / (np1 * PI);
    let m = (2 * n + 1) as f64;
    // positive half j = n+2, ..., 2n+1
    let positive: Vec<f64> = (n + 2..=2 * n + 1)
        .map(|j| {
            let jf = j as f64;
            let theta = -((2.0 * jf - 1.0) * PI / (2.0 * m)).cos();
            (1.0 - xi) * theta + xi * (-1.0 + jf / np1)
        })
        .collect();
    NodeSet::mirrored(&positive)
}

fn satisfied(report: &EquioscillationReport, tol: f64) -> bool {
    report.alternating && report.uniform_error < 2.0 && report.delta < tol
}

fn valid(report: &EquioscillationReport) -> bool {
    report.alternating && report.uniform_error < 2.0
}

/// Runs the iteration from `init` or from [`initial_nodes`].
pub fn compute_best(config: &BestApproxConfig, init: Option<NodeSet>) -> Result<BestApproximation> {
    let mut nodes = match init {
        Some(nodes) => {
            if nodes.degree() != config.n {
                return Err(Error::InvalidNodes(format!(
                    "expected {} nodes, got {}",
                    2 * config.n + 1,
                    nodes.nodes().len()
                )));
            }
            nodes
        }
        None => initial_nodes(config.n, config.omega)?,
    };
    let mut trace = ConvergenceTrace::default();
    let mut best: Option<(BarycentricRational, EquioscillationReport, NodeSet, usize)> = None;
    let mut last: Option<(BarycentricRational, EquioscillationReport, NodeSet, usize)> = None;

    for iteration in 0..config.max_iter {
        let start = Instant::now();
        let failed = |e: Error| Error::InterpolantConstructionFailed {
            iteration,
            source: Box::new(e),
        };
        let (r, diag) =
            build_interpolant_diagnosed(config.omega, &nodes, InterpolationRoute::Auto).map_err(failed)?;
        let report = local_error_maxima(&r, config.omega, &nodes, config.samples_per_interval);
        // far from the optimum the system may be rank deficient in double
        // precision; the interpolant is usable while its residual is
        // negligible against the approximation error
        diag.verify_with(RESIDUAL_TOLERANCE.max(RESIDUAL_TO_ERROR * report.uniform_error))
            .map_err(failed)?;

        if satisfied(&report, config.tol_delta) {
            trace.records.push(TraceRecord {
                uniform_error: report.uniform_error,
                delta: report.delta,
                step: StepTaken::None,
                alternating: report.alternating,
                wall_time: start.elapsed().as_secs_f64(),
            });
            return Ok(BestApproximation {
                rational: r,
                report,
                trace,
                nodes,
                converged: true,
                iterations: iteration + 1,
            });
        }

        let is_last = iteration + 1 == config.max_iter;
        let (next, step) = if is_last {
            (None, StepTaken::None)
        } else {
            let (next, step) = correct(config, &nodes, &report)?;
            (Some(next), step)
        };
        trace.records.push(TraceRecord {
            uniform_error: report.uniform_error,
            delta: report.delta,
            step,
            alternating: report.alternating,
            wall_time: start.elapsed().as_secs_f64(),
        });

        let better = valid(&report)
            && best
                .as_ref()
                .is_none_or(|(_, b, _, _)| report.delta < b.delta);
        if better {
            best = Some((r.clone(), report.clone(), nodes.clone(), iteration + 1));
        }
        last = Some((r, report, nodes.clone(), iteration + 1));
        if let Some(next) = next {
            nodes = next;
        }
    }

    let (rational, report, nodes, _) = best.or(last).expect("max_iter is positive");
    Ok(BestApproximation {
        rational,
        report,
        trace,
        nodes,
        converged: false,
        iterations: config.max_iter,
    })
}

fn correct(config: &BestApproxConfig, nodes: &NodeSet, report: &EquioscillationReport) -> Result<(NodeSet, StepTaken)> {
    let chosen = match config.strategy {
        StrategyMode::BrasilOnly => Strategy::Brasil,
        StrategyMode::Combined | StrategyMode::MaehlyOnly => select_strategy(report, report.below_precision),
    };
    let variant = match chosen {
        Strategy::Brasil => {
            let next = brasil_step(nodes, &report.eps, config.brasil)?;
            return Ok((next, StepTaken::Brasil));
        }
        Strategy::MaehlyBilinear => MaehlyVariant::Bilinear,
        Strategy::MaehlyLogRatio => MaehlyVariant::LogRatio,
    };
    match maehly_step(nodes, report, variant) {
        Ok(next) => Ok((
            next,
            match variant {
                MaehlyVariant::Bilinear => StepTaken::MaehlyBilinear,
                MaehlyVariant::LogRatio => StepTaken::MaehlyLogRatio,
            },
        )),
        Err(Error::InvalidCorrection(_)) | Err(Error::Breakdown(_)) => {
            let next = brasil_step(nodes, &report.eps, config.brasil)?;
            Ok((next, StepTaken::BrasilFallback))
        }
        Err(e) => Err(e),
    }
}

/// Warm start from previously computed nodes, e.g. for a nearby `ω`.
pub fn restart(config: &BestApproxConfig, previous_nodes: NodeSet) -> Result<BestApproximation> {
    compute_best(config, Some(previous_nodes))
}

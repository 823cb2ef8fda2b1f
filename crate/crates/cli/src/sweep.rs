//! Preset sweeps reproducing the tabulated experiments.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use uniapprox::aaa_lawson::{aaa, adaptive_test_nodes, detect_interpolation_nodes, TestNodeSet, DEFAULT_ADAPTIVE_ROUNDS};
use uniapprox::equi_metrics::{max_error, DEFAULT_SAMPLES_PER_INTERVAL};
use uniapprox::omega_estimate::{omega_asymptotic, omega_experimental};
use uniapprox::{compute_best, local_error_maxima, BestApproxConfig};

use crate::args::Preset;
use crate::commands::dense_count;
use crate::document::fmt_f64;

/// Frequencies for n = 32, largest error first.
pub const TABLE2_N32: [f64; 7] = [95.48, 91.35, 84.16, 77.86, 72.19, 67.03, 62.29];
/// Frequencies for n = 256, largest error first.
pub const TABLE2_N256: [f64; 7] = [797.18, 791.45, 780.93, 771.16, 761.89, 753.01, 744.44];
/// Equispaced AAA test nodes for n = 32 and n = 256.
pub const AAA_NODES_N32: usize = 4900;
pub const AAA_NODES_N256: usize = 35_000;

pub const OMEGA_GRID_DEGREES: [usize; 6] = [2, 4, 8, 16, 32, 64];
pub const OMEGA_GRID_TARGETS: [f64; 7] = [0.3, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12];

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Best,
    Aaa(usize),
    AaaAdaptive,
    /// Best approximation at an estimated frequency for a target error.
    Estimated { experimental: bool, target: f64 },
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Best => "best".into(),
            Method::Aaa(_) => "aaa".into(),
            Method::AaaAdaptive => "aaa-adaptive".into(),
            Method::Estimated { experimental, target } => {
                let kind = if *experimental { "experimental" } else { "asymptotic" };
                format!("best@{kind}:{}", fmt_f64(*target))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub n: usize,
    pub omega: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub omega: f64,
    pub method: String,
    /// `None` when the run failed.
    pub error: Option<f64>,
    /// `None` when no interpolation nodes are available.
    pub delta: Option<f64>,
    pub iterations: usize,
    pub seconds: f64,
}

pub fn preset_tasks(preset: Preset) -> Vec<Task> {
    let rows = |n: usize, omegas: &[f64], method: Method| -> Vec<Task> {
        omegas.iter().map(|&omega| Task { n, omega, method: method.clone() }).collect()
    };
    match preset {
        Preset::Table2N32 => rows(32, &TABLE2_N32, Method::Best),
        Preset::Table2N256 => rows(256, &TABLE2_N256, Method::Best),
        Preset::Table3 => [
            rows(32, &TABLE2_N32, Method::Aaa(AAA_NODES_N32)),
            rows(32, &TABLE2_N32, Method::AaaAdaptive),
            rows(256, &TABLE2_N256, Method::Aaa(AAA_NODES_N256)),
            rows(256, &TABLE2_N256, Method::AaaAdaptive),
        ]
        .concat(),
        Preset::OmegaGrid => {
            let mut tasks = Vec::new();
            for n in OMEGA_GRID_DEGREES {
                let limit = (n as f64 + 1.0) * std::f64::consts::PI;
                for target in OMEGA_GRID_TARGETS {
                    for experimental in [true, false] {
                        let estimate = if experimental { omega_experimental(n, target) } else { omega_asymptotic(n, target) };
                        // estimates outside the admissible range are not run
                        if let Ok(omega) = estimate {
                            if omega > 0.0 && omega < limit {
                                tasks.push(Task { n, omega, method: Method::Estimated { experimental, target } });
                            }
                        }
                    }
                }
            }
            tasks
        }
    }
}

pub fn run_task(task: &Task) -> SweepRow {
    let start = Instant::now();
    let (error, delta, iterations) = match task.method {
        Method::Best | Method::Estimated { .. } => {
            match BestApproxConfig::new(task.n, task.omega).and_then(|c| compute_best(&c, None)) {
                Ok(best) => (Some(best.report.uniform_error), Some(best.report.delta), best.iterations),
                Err(_) => (None, None, 0),
            }
        }
        Method::Aaa(count) => aaa_row(task, TestNodeSet::equispaced(count)),
        Method::AaaAdaptive => aaa_row(task, adaptive_test_nodes(task.omega, task.n, DEFAULT_ADAPTIVE_ROUNDS)),
    };
    SweepRow {
        n: task.n,
        omega: task.omega,
        method: task.method.label(),
        error,
        delta,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn aaa_row(task: &Task, tests: uniapprox::Result<TestNodeSet>) -> (Option<f64>, Option<f64>, usize) {
    let Ok(r) = tests.and_then(|t| aaa(task.omega, &t, task.n)) else {
        return (None, None, 0);
    };
    let error = max_error(&r, task.omega, dense_count(task.n));
    let delta = detect_interpolation_nodes(&r, task.omega)
        .map(|x| local_error_maxima(&r, task.omega, &x, DEFAULT_SAMPLES_PER_INTERVAL).delta);
    (Some(error), delta, 0)
}

/// Runs all tasks of a preset in parallel; rows are sorted by degree, method
/// and decreasing frequency.
pub fn run_preset(preset: Preset) -> Vec<SweepRow> {
    run_tasks(&preset_tasks(preset))
}

pub fn run_tasks(tasks: &[Task]) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = tasks.par_iter().map(run_task).collect();
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then_with(|| a.method.cmp(&b.method))
            .then_with(|| b.omega.total_cmp(&a.omega))
    });
    rows
}

pub const SWEEP_HEADER: &str = "n,omega,method,error,delta,iterations,seconds";

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.3}",
            row.n,
            fmt_f64(row.omega),
            row.method,
            opt(row.error),
            opt(row.delta),
            row.iterations,
            row.seconds
        );
    }
    out
}

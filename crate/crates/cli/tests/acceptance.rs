//! Acceptance criteria. Runs as a plain binary so that one PASS/FAIL line per
//! criterion is always printed; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniapprox::aaa_lawson::{aaa, lawson, TestNodeSet};
use uniapprox::equi_metrics::{max_error, DEFAULT_SAMPLES_PER_INTERVAL};
use uniapprox::node_correction::{
    brasil_step, maehly_direct_step, maehly_system_step, BrasilParams, MaehlyVariant, Strategy,
};
use uniapprox::omega_estimate::{omega_asymptotic, omega_auto};
use uniapprox::{
    build_interpolant, compute_best, initial_nodes, linspace, local_error_maxima, sandwich, unitarity_defect,
    BarycentricRational, BestApproxConfig, BestApproximation, EquioscillationReport, Error, NodeSet,
};
use uniapprox_cli::args::{BestArgs, Strategy as CliStrategy};
use uniapprox_cli::commands;
use uniapprox_cli::document::ApproximantDocument;
use uniapprox_cli::sweep::{TABLE2_N256, TABLE2_N32};

const TABLE2_N32_ERRORS: [f64; 7] = [1.00e-1, 1.00e-2, 1.00e-4, 1.01e-6, 1.01e-8, 1.01e-10, 1.00e-12];
const TABLE2_N256_ERRORS: [f64; 7] = [1.00e-1, 1.00e-2, 1.00e-4, 1.00e-6, 1.00e-8, 1.00e-10, 1.00e-12];
/// AAA errors with 4900 equispaced test nodes for n = 32.
const TABLE3_N32_AAA: [f64; 7] = [1.32, 1.17e-1, 5.47e-4, 3.05e-5, 2.09e-7, 2.12e-9, 1.07e-11];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

/// Runs the `best` command in process and reads back its document.
fn cmd_best(n: usize, omega: f64) -> Result<(ApproximantDocument, i32), String> {
    let args = BestArgs {
        n,
        omega: Some(omega),
        eps: None,
        tol_delta: None,
        max_iter: None,
        strategy: CliStrategy::Combined,
        out: None,
        trace: None,
        seed_nodes: None,
    };
    let mut buf = Vec::new();
    let code = commands::best(&args, &mut buf).map_err(|e| format!("n={n} omega={omega}: {e}"))?;
    let doc = ApproximantDocument::from_json(&String::from_utf8(buf).unwrap()).map_err(|e| e.to_string())?;
    Ok((doc, code))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

fn best(n: usize, omega: f64) -> BestApproximation {
    compute_best(&BestApproxConfig::new(n, omega).unwrap(), None).unwrap()
}

/// Moves every node by a uniform random fraction `scale` of its smaller gap.
fn perturb(nodes: &NodeSet, scale: f64, rng: &mut ChaCha8Rng) -> NodeSet {
    let x = nodes.nodes();
    let moved = (0..x.len())
        .map(|j| {
            let lo = if j == 0 { -1.0 } else { x[j - 1] };
            let hi = if j + 1 == x.len() { 1.0 } else { x[j + 1] };
            let gap = (x[j] - lo).min(hi - x[j]);
            x[j] + scale * gap * rng.random_range(-1.0..1.0)
        })
        .collect();
    NodeSet::new(moved).unwrap()
}

fn table2_n32() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (omega, reference) in TABLE2_N32.into_iter().zip(TABLE2_N32_ERRORS) {
        let (doc, _) = cmd_best(32, omega)?;
        ensure!(doc.strategy == "combined", "strategy {}", doc.strategy);
        let r = rel(doc.uniform_error, reference);
        ensure!(r <= 0.05, "omega={omega}: error {:e} vs {reference:e}", doc.uniform_error);
        worst = worst.max(r);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "runtime {secs:.1} s");
    Ok(format!("7 rows, worst relative deviation {worst:.2e}, {secs:.1} s"))
}

fn table2_n256() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (omega, reference) in TABLE2_N256.into_iter().zip(TABLE2_N256_ERRORS) {
        let (doc, _) = cmd_best(256, omega)?;
        let r = rel(doc.uniform_error, reference);
        // below 1e-10 the error in uniformity stagnates near 1e-14 / error,
        // which bounds how well the error itself is determined
        let tol = if reference >= 1e-10 { 0.05 } else { (1e-14 / reference).max(0.05) };
        ensure!(r <= tol, "omega={omega}: error {:e} vs {reference:e}", doc.uniform_error);
        worst = worst.max(r);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 600.0, "runtime {secs:.1} s");
    Ok(format!("7 rows, worst relative deviation {worst:.2e}, {secs:.1} s"))
}

fn convergence_speed() -> Outcome {
    let mut slowest = 0;
    for omega in TABLE2_N32 {
        let b = best(32, omega);
        let first = b.trace.records.iter().position(|r| r.delta < 1e-2);
        ensure!(matches!(first, Some(k) if k < 30), "omega={omega}: delta < 1e-2 first at {first:?}");
        slowest = slowest.max(first.unwrap() + 1);
    }
    // final delta at the stagnation level, reached with an unattainable tolerance
    let mut tightest: f64 = 0.0;
    for (omega, reference) in TABLE2_N32.into_iter().zip(TABLE2_N32_ERRORS) {
        if reference < 1e-10 {
            continue;
        }
        let config = BestApproxConfig::new(32, omega).unwrap().with_tol_delta(1e-15).unwrap();
        let b = compute_best(&config, None).unwrap();
        let bound = 100.0 * 2.2e-16 / b.report.uniform_error;
        ensure!(b.report.delta <= bound, "omega={omega}: delta {:e} > {bound:e}", b.report.delta);
        tightest = tightest.max(b.report.delta / bound);
    }
    Ok(format!("delta < 1e-2 within {slowest} iterations; final delta at most {tightest:.2} of the bound"))
}

fn unitarity() -> Outcome {
    let grid = linspace(10_000);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut check = |r: &BarycentricRational, what: &str| -> Result<(), String> {
        let d = unitarity_defect(r, &grid);
        ensure!(d <= 1e-12, "{what}: defect {d:e}");
        worst = worst.max(d);
        count += 1;
        Ok(())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 4, 8, 16, 32, 64] {
        for frac in [0.1, 0.5, 0.9] {
            let omega = frac * (n as f64 + 1.0) * PI;
            let nodes = initial_nodes(n, omega).unwrap();
            check(&build_interpolant(omega, &nodes).unwrap(), &format!("interpolant n={n} omega={omega}"))?;
            let moved = perturb(&nodes, 0.2, &mut rng);
            check(&build_interpolant(omega, &moved).unwrap(), &format!("perturbed interpolant n={n}"))?;
        }
    }
    for omega in TABLE2_N32 {
        check(&best(32, omega).rational, &format!("best n=32 omega={omega}"))?;
    }
    let tests = TestNodeSet::equispaced(4900).unwrap();
    for omega in TABLE2_N32 {
        let r = aaa(omega, &tests, 32).unwrap();
        check(&r, &format!("aaa omega={omega}"))?;
        if [84.16, 77.86, 72.19].contains(&omega) {
            let (l, _) = lawson(&r, omega, &tests, 100).unwrap();
            check(&l, &format!("lawson omega={omega}"))?;
        }
    }
    Ok(format!("{count} approximants, worst defect {worst:.2e}"))
}

fn equioscillation_structure() -> Outcome {
    for omega in TABLE2_N32 {
        let b = best(32, omega);
        let rep = &b.report;
        ensure!(rep.len() == 66, "omega={omega}: {} maxima", rep.len());
        ensure!(rep.alternating, "omega={omega}: phase signs do not alternate");
        for pair in rep.phase.windows(2) {
            ensure!(pair[0] * pair[1] < 0.0, "omega={omega}: equal signs {pair:?}");
        }
        let x = b.nodes.nodes();
        ensure!(x.len() == 65, "omega={omega}: {} nodes", x.len());
        for (j, eta) in rep.eta.iter().enumerate() {
            let lo = if j == 0 { -1.0 } else { x[j - 1] };
            let hi = if j == x.len() { 1.0 } else { x[j] };
            ensure!(lo <= *eta && *eta <= hi, "omega={omega}: eta[{j}] = {eta} outside [{lo}, {hi}]");
        }
    }
    Ok("7 rows: 66 alternating maxima interlaced with 65 nodes".into())
}

fn sandwich_and_vallee_poussin() -> Outcome {
    let omega = 12.0;
    let b = best(8, omega);
    ensure!(b.converged, "reference did not converge");
    let reference = b.report.uniform_error;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checked, mut attempts) = (0, 0);
    while checked < 50 {
        attempts += 1;
        ensure!(attempts <= 500, "only {checked} admissible perturbations");
        let scale = 1e-3 * (1.0 + (attempts % 40) as f64 / 4.0);
        let nodes = perturb(&b.nodes, scale, &mut rng);
        let r = build_interpolant(omega, &nodes).unwrap();
        let rep = local_error_maxima(&r, omega, &nodes, DEFAULT_SAMPLES_PER_INTERVAL);
        if !rep.alternating {
            continue;
        }
        checked += 1;
        let (lower, upper) = sandwich(&rep).unwrap();
        ensure!(lower <= reference && reference <= upper, "{lower:e} <= {reference:e} <= {upper:e} fails");
    }
    Ok(format!("{checked} admissible perturbations of {attempts}"))
}

fn maehly_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agreed, mut attempts) = (0, 0);
    let mut worst: f64 = 0.0;
    while agreed < 100 {
        attempts += 1;
        ensure!(attempts <= 2000, "only {agreed} admissible instances");
        let n = 1 + attempts % 16;
        let omega = rng.random_range(0.3..0.9) * (n as f64 + 1.0) * PI;
        let nodes = perturb(&initial_nodes(n, omega).unwrap(), 0.05, &mut rng);
        let r = build_interpolant(omega, &nodes).unwrap();
        let rep = local_error_maxima(&r, omega, &nodes, DEFAULT_SAMPLES_PER_INTERVAL);
        if !rep.alternating || rep.uniform_error >= 2.0 || rep.below_precision {
            continue;
        }
        let system = maehly_system_step(&nodes, &rep, MaehlyVariant::LogRatio);
        let direct = maehly_direct_step(&nodes, &rep, MaehlyVariant::LogRatio);
        match (system, direct) {
            (Ok(a), Ok(b)) => {
                let x = nodes.nodes();
                let (mut diff, mut size) = (0.0f64, 0.0f64);
                for ((p, q), x) in a.nodes().iter().zip(b.nodes()).zip(x) {
                    diff = diff.max((p - q).abs());
                    size = size.max((p - x).abs());
                }
                ensure!(diff <= 1e-10 * size, "n={n} omega={omega}: {diff:e} vs shift {size:e}");
                worst = worst.max(diff / size);
                agreed += 1;
            }
            (Err(Error::InvalidCorrection(_)), Err(Error::InvalidCorrection(_))) => {}
            (a, b) => return Err(format!("routes disagree on admissibility: {a:?} / {b:?}")),
        }
    }
    Ok(format!("{agreed} instances, worst relative difference {worst:.2e}"))
}

fn omega_estimate_quality() -> Outcome {
    let mut worst: f64 = 1.0;
    for n in [8, 32, 256] {
        for eps in [1e-2, 1e-6, 1e-12] {
            let omega = omega_auto(n, eps).map_err(|e| e.to_string())?;
            let err = best(n, omega).report.uniform_error;
            let ratio = err / eps;
            ensure!((1.0 / 3.0..=3.0).contains(&ratio), "n={n} eps={eps:e}: omega={omega}, error {err:e}");
            worst = worst.max(ratio.max(1.0 / ratio));
        }
    }
    Ok(format!("9 cases, worst factor {worst:.2}"))
}

fn trivial_identities() -> Outcome {
    for eps in [0.5, 1e-3, 1e-12] {
        let omega = omega_asymptotic(0, eps).map_err(|e| e.to_string())?;
        ensure!(omega == eps, "omega_asymptotic(0, {eps}) = {omega}");
    }
    let nodes = NodeSet::new(vec![-0.6, -0.2, 0.2, 0.6, 0.9]).unwrap();
    let bounds = [-1.0, -0.6, -0.2, 0.2, 0.6, 0.9, 1.0];
    let eta: Vec<f64> = bounds.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let phase = (0..6).map(|j| if j % 2 == 0 { -1e-4 } else { 1e-4 }).collect();
    let rep = EquioscillationReport::from_samples(eta, vec![1e-4; 6], phase, false);
    ensure!(rep.delta == 0.0, "delta = {}", rep.delta);
    for strategy in [Strategy::Brasil, Strategy::MaehlyBilinear, Strategy::MaehlyLogRatio] {
        let next = match strategy {
            Strategy::Brasil => brasil_step(&nodes, &rep.eps, BrasilParams::default()),
            Strategy::MaehlyBilinear => maehly_system_step(&nodes, &rep, MaehlyVariant::Bilinear),
            Strategy::MaehlyLogRatio => maehly_system_step(&nodes, &rep, MaehlyVariant::LogRatio),
        }
        .map_err(|e| e.to_string())?;
        ensure!(next == nodes, "{} moved the nodes", strategy.as_str());
    }
    Ok("omega_asymptotic(0, eps) = eps; delta = 0; no correction in brasil, maehly-bilinear, maehly-log".into())
}

fn aaa_cross_check() -> Outcome {
    let tests = TestNodeSet::equispaced(4900).unwrap();
    let mut worst_aaa: f64 = 0.0;
    let mut worst_lawson: f64 = 0.0;
    for ((omega, table3), table2) in TABLE2_N32.into_iter().zip(TABLE3_N32_AAA).zip(TABLE2_N32_ERRORS) {
        let r = aaa(omega, &tests, 32).unwrap();
        let err = max_error(&r, omega, 20_000);
        let factor = (err / table3).log10().abs();
        ensure!(factor <= 1.0, "aaa omega={omega}: {err:e} vs {table3:e}");
        worst_aaa = worst_aaa.max(10f64.powf(factor));
        if [84.16, 77.86, 72.19].contains(&omega) {
            let (l, _) = lawson(&r, omega, &tests, 100).unwrap();
            let err = max_error(&l, omega, 20_000);
            ensure!(err <= 2.0 * table2, "lawson omega={omega}: {err:e} vs {table2:e}");
            worst_lawson = worst_lawson.max(err / table2);
        }
    }
    Ok(format!("AAA within a factor {worst_aaa:.2}; Lawson within {worst_lawson:.3}x of the best error"))
}

fn small_scale_oracle() -> Outcome {
    let tests = TestNodeSet::equispaced(10_000).unwrap();
    let mut worst: f64 = 0.0;
    for n in [1, 2] {
        for omega in [0.5, 1.0, 2.0] {
            let b = best(n, omega);
            let err = b.report.uniform_error;
            let (l, _) = lawson(&aaa(omega, &tests, n).unwrap(), omega, &tests, 200).unwrap();
            let other = max_error(&l, omega, 100_000);
            let r = rel(other, err);
            ensure!(r <= 1e-3, "n={n} omega={omega}: {err:e} vs {other:e}");
            let (lower, upper) = sandwich(&b.report).unwrap();
            ensure!(lower <= err && err <= upper, "n={n} omega={omega}: driver outside [{lower:e}, {upper:e}]");
            // no approximant can beat the lower bound
            ensure!(lower <= other, "n={n} omega={omega}: AAA-Lawson {other:e} below {lower:e}");
            worst = worst.max(r);
        }
    }
    Ok(format!("6 cases, worst relative difference {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("table 2 reproduction, n=32", table2_n32),
        ("table 2 reproduction, n=256", table2_n256),
        ("convergence speed", convergence_speed),
        ("unitarity", unitarity),
        ("equioscillation structure", equioscillation_structure),
        ("sandwich and de la Vallee-Poussin", sandwich_and_vallee_poussin),
        ("Maehly equivalence", maehly_equivalence),
        ("omega estimate quality", omega_estimate_quality),
        ("trivial identities", trivial_identities),
        ("AAA cross-check", aaa_cross_check),
        ("small-scale oracle equivalence", small_scale_oracle),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

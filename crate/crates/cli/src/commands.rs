//! Subcommand implementations. Each writes its primary output to `out` and
//! returns the process exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use uniapprox::aaa_lawson::{
    aaa, adaptive_test_nodes, detect_interpolation_nodes, lawson, TestNodeSet, DEFAULT_ADAPTIVE_ROUNDS,
};
use uniapprox::equi_metrics::{approximation_error, max_error, phase_error, DEFAULT_SAMPLES_PER_INTERVAL};
use uniapprox::omega_estimate::{omega_asymptotic, omega_auto_with_kind, omega_experimental, EstimateKind};
use uniapprox::{compute_best, linspace, local_error_maxima, BestApproxConfig, NodeSet, StrategyMode};

use crate::args::{AaaArgs, BestArgs, EstimateArgs, EstimateMethod, EvalArgs, SweepArgs};
use crate::document::{best_trace_csv, fmt_f64, lawson_trace_csv, write_text, ApproximantDocument};
use crate::error::{CliError, CliResult, EXIT_NOT_CONVERGED, EXIT_OK};
use crate::sweep;

/// Grid size for measuring the error of an approximant without known
/// interpolation nodes.
pub fn dense_count(n: usize) -> usize {
    (100 * (2 * n + 2)).max(20_000)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn summary(out: &mut dyn Write, doc: &ApproximantDocument) -> CliResult<()> {
    let delta = doc.delta.map_or("null".to_string(), fmt_f64);
    writeln!(
        out,
        "n={} omega={} uniform_error={} delta={} iterations={} converged={}",
        doc.n,
        doc.omega,
        fmt_f64(doc.uniform_error),
        delta,
        doc.iterations,
        doc.converged
    )
    .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn exit_for(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

pub fn best(args: &BestArgs, out: &mut dyn Write) -> CliResult<i32> {
    let omega = match (args.omega, args.eps) {
        (Some(w), None) => w,
        (None, Some(eps)) => omega_auto_with_kind(args.n, eps)?.0,
        _ => return Err(CliError::Usage("give exactly one of --omega and --eps".into())),
    };
    let strategy: StrategyMode = args.strategy.into();
    let mut config = BestApproxConfig::new(args.n, omega)?.with_strategy(strategy);
    if let Some(tol) = args.tol_delta {
        config = config.with_tol_delta(tol)?;
    }
    if let Some(max_iter) = args.max_iter {
        config = config.with_max_iter(max_iter)?;
    }
    let seed = match &args.seed_nodes {
        Some(path) => {
            let nodes = read_seed_nodes(path)?;
            if nodes.degree() != args.n {
                return Err(CliError::Input(format!(
                    "{}: {} seed nodes do not match degree {}",
                    path.display(),
                    nodes.nodes().len(),
                    args.n
                )));
            }
            Some(nodes)
        }
        None => None,
    };
    let result = compute_best(&config, seed)?;
    let doc = ApproximantDocument::from_best(&result, omega, strategy.as_str());
    emit(args.out.as_deref(), &doc.to_json(), out)?;
    if args.out.is_some() {
        summary(out, &doc)?;
    }
    if let Some(path) = &args.trace {
        write_text(path, &best_trace_csv(&result.trace))?;
    }
    Ok(exit_for(result.converged))
}

/// Reads nodes from a document, a JSON array, or a plain list of numbers.
pub fn read_seed_nodes(path: &Path) -> CliResult<NodeSet> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let trimmed = text.trim_start();
    let nodes: Vec<f64> = if trimmed.starts_with('{') {
        ApproximantDocument::from_json(&text)?
            .interp_nodes
            .ok_or_else(|| CliError::Input(format!("{}: document has no interp_nodes", path.display())))?
    } else if trimmed.starts_with('[') {
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    } else {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("{}: not a number: {t}", path.display())))
            })
            .collect::<CliResult<_>>()?
    };
    Ok(NodeSet::from_unsorted(nodes)?)
}

pub fn estimate_omega(args: &EstimateArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (omega, kind) = match args.method {
        EstimateMethod::Auto => omega_auto_with_kind(args.n, args.eps)?,
        EstimateMethod::Experimental => (omega_experimental(args.n, args.eps)?, EstimateKind::Experimental),
        EstimateMethod::Asymptotic => (omega_asymptotic(args.n, args.eps)?, EstimateKind::Asymptotic),
    };
    let label = match kind {
        EstimateKind::Experimental => "experimental",
        EstimateKind::Asymptotic => "asymptotic",
    };
    writeln!(out, "{omega} {label}").map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(EXIT_OK)
}

pub fn aaa_command(args: &AaaArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.n == 0 {
        return Err(uniapprox::Error::Domain("degree must be positive".into()).into());
    }
    if !(args.tol_delta > 0.0 && args.tol_delta < 1.0) {
        return Err(uniapprox::Error::Domain(format!("tol_delta = {} must lie in (0, 1)", args.tol_delta)).into());
    }
    if !(args.omega > 0.0 && args.omega.is_finite()) {
        return Err(uniapprox::Error::Domain(format!("omega = {} must be positive", args.omega)).into());
    }
    let tests = if args.test_nodes == "adaptive" {
        adaptive_test_nodes(args.omega, args.n, args.rounds.unwrap_or(DEFAULT_ADAPTIVE_ROUNDS))?
    } else {
        let count = args
            .test_nodes
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("--test-nodes expects a count or 'adaptive', got '{}'", args.test_nodes)))?;
        if args.rounds.is_some() {
            return Err(CliError::Usage("--rounds applies to adaptive test nodes only".into()));
        }
        TestNodeSet::equispaced(count)?
    };
    let r0 = aaa(args.omega, &tests, args.n)?;
    let (r, state) = lawson(&r0, args.omega, &tests, args.lawson)?;
    let nodes = detect_interpolation_nodes(&r, args.omega);
    let report = nodes
        .as_ref()
        .map(|x| local_error_maxima(&r, args.omega, x, DEFAULT_SAMPLES_PER_INTERVAL));
    let detected = nodes.as_ref().zip(report.as_ref()).map(|(x, rep)| (x.nodes(), rep));
    let fallback = if detected.is_some() { f64::NAN } else { max_error(&r, args.omega, dense_count(args.n)) };
    let doc = ApproximantDocument::from_aaa(
        &r,
        args.omega,
        state.iteration,
        tests.kind().label(),
        detected,
        fallback,
        args.tol_delta,
    );
    emit(args.out.as_deref(), &doc.to_json(), out)?;
    if args.out.is_some() {
        summary(out, &doc)?;
    }
    if let Some(path) = &args.trace {
        write_text(path, &lawson_trace_csv(&state))?;
    }
    Ok(exit_for(doc.converged))
}

pub fn sweep_command(args: &SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    let rows = sweep::run_preset(args.preset);
    emit(args.out.as_deref(), &sweep::to_csv(&rows), out)?;
    Ok(EXIT_OK)
}

pub const EVAL_HEADER: &str = "x,re,im,abs_err,phase_err";

pub fn eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    let doc = ApproximantDocument::read(&args.approx)?;
    let r = doc.rational()?;
    let xs = match (&args.points, args.grid) {
        (Some(path), None) => read_points(path)?,
        (None, Some(count)) if count >= 2 => linspace(count),
        (None, Some(_)) => return Err(CliError::Usage("--grid needs at least 2 points".into())),
        _ => return Err(CliError::Usage("give exactly one of --points and --grid".into())),
    };
    let mut csv = format!("{EVAL_HEADER}\n");
    for x in xs {
        let v = r.eval_ix(x);
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_f64(x),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(approximation_error(&r, doc.omega, x)),
            fmt_f64(phase_error(&r, doc.omega, x))
        );
    }
    emit(args.out.as_deref(), &csv, out)?;
    Ok(EXIT_OK)
}

/// Points from the first column of a CSV or plain list; a non-numeric first
/// line is taken as a header.
pub fn read_points(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut xs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(x) if x.is_finite() => xs.push(x),
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Input(format!("{}:{}: not a number: {field}", path.display(), i + 1)));
            }
        }
    }
    Ok(xs)
}

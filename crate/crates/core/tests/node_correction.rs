use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniapprox::equi_metrics::DEFAULT_SAMPLES_PER_INTERVAL;
use uniapprox::node_correction::{
    brasil_step, maehly_direct_step, maehly_system_step, BrasilParams, MaehlyVariant,
};
use uniapprox::{build_interpolant, compute_best, initial_nodes, local_error_maxima, BestApproxConfig, EquioscillationReport, Error, NodeSet};

const PI: f64 = std::f64::consts::PI;

/// Random nodes with random maxima inside each subinterval and errors
/// within `spread` of one, alternating phases.
fn synthetic_instance(n: usize, spread: f64, rng: &mut ChaCha8Rng) -> (NodeSet, EquioscillationReport) {
    let gaps: Vec<f64> = (0..2 * n + 2).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = gaps.iter().sum();
    let mut acc = 0.0;
    let mut bounds = vec![-1.0];
    for g in &gaps {
        acc += g;
        bounds.push((-1.0 + 2.0 * acc / total).min(1.0));
    }
    *bounds.last_mut().unwrap() = 1.0;
    let nodes = NodeSet::new(bounds[1..bounds.len() - 1].to_vec()).unwrap();
    let eta: Vec<f64> = (0..2 * n + 2)
        .map(|j| {
            let t = rng.random_range(0.2..0.8);
            bounds[j] + t * (bounds[j + 1] - bounds[j])
        })
        .collect();
    let eps: Vec<f64> = (0..2 * n + 2).map(|_| 1e-6 * (1.0 + spread * rng.random_range(-1.0..1.0))).collect();
    let phase: Vec<f64> = (0..2 * n + 2).map(|j| if j % 2 == 0 { -1e-6 } else { 1e-6 }).collect();
    (nodes, EquioscillationReport::from_samples(eta, eps, phase, false))
}

fn shifts(a: &NodeSet, b: &NodeSet) -> Vec<f64> {
    a.nodes().iter().zip(b.nodes()).map(|(p, q)| q - p).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn assert_equivalent(nodes: &NodeSet, rep: &EquioscillationReport) -> bool {
    let sys = maehly_system_step(nodes, rep, MaehlyVariant::LogRatio);
    let dir = maehly_direct_step(nodes, rep, MaehlyVariant::LogRatio);
    match (sys, dir) {
        (Ok(a), Ok(b)) => {
            let da = shifts(nodes, &a);
            let db = shifts(nodes, &b);
            let diff: Vec<f64> = da.iter().zip(&db).map(|(p, q)| p - q).collect();
            assert!(max_abs(&diff) <= 1e-10 * max_abs(&da), "{} vs {}", max_abs(&diff), max_abs(&da));
            true
        }
        (Err(Error::InvalidCorrection(_)), Err(Error::InvalidCorrection(_))) => false,
        (a, b) => panic!("routes disagree on admissibility: {a:?} / {b:?}"),
    }
}

#[test]
fn direct_and_system_agree_on_synthetic_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut agreed = 0;
    for k in 0..100 {
        let n = 1 + k % 16;
        let (nodes, rep) = synthetic_instance(n, 0.05, &mut rng);
        if assert_equivalent(&nodes, &rep) {
            agreed += 1;
        }
    }
    assert!(agreed >= 90, "only {agreed} admissible instances");
}

#[test]
fn direct_and_system_agree_on_interpolant_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut agreed = 0;
    let mut attempts = 0;
    while agreed < 100 {
        attempts += 1;
        assert!(attempts <= 2000, "only {agreed} admissible instances");
        let n = 1 + attempts % 16;
        let omega = rng.random_range(0.3..0.9) * (n as f64 + 1.0) * PI;
        let nodes = perturb_mirrored(&initial_nodes(n, omega).unwrap(), 0.05, &mut rng);
        let r = build_interpolant(omega, &nodes).unwrap();
        let rep = local_error_maxima(&r, omega, &nodes, DEFAULT_SAMPLES_PER_INTERVAL);
        if !rep.alternating || rep.uniform_error >= 2.0 || rep.below_precision {
            continue;
        }
        if assert_equivalent(&nodes, &rep) {
            agreed += 1;
        }
    }
}

/// Moves the positive half by up to `scale` of the local gap and mirrors it.
fn perturb_mirrored(nodes: &NodeSet, scale: f64, rng: &mut ChaCha8Rng) -> NodeSet {
    let x = nodes.nodes();
    let n = nodes.degree();
    let half: Vec<f64> = (n + 1..x.len())
        .map(|j| {
            let hi = if j + 1 == x.len() { 1.0 } else { x[j + 1] };
            let gap = (x[j] - x[j - 1]).min(hi - x[j]);
            x[j] + scale * gap * rng.random_range(-1.0..1.0)
        })
        .collect();
    NodeSet::mirrored(&half).unwrap()
}

#[test]
fn equal_errors_give_zero_correction_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (nodes, rep) = synthetic_instance(5, 0.0, &mut rng);
    assert_eq!(rep.delta, 0.0);
    assert_eq!(brasil_step(&nodes, &rep.eps, BrasilParams::default()).unwrap(), nodes);
    for variant in [MaehlyVariant::LogRatio, MaehlyVariant::Bilinear] {
        assert_eq!(maehly_system_step(&nodes, &rep, variant).unwrap(), nodes);
        assert_eq!(maehly_direct_step(&nodes, &rep, variant).unwrap(), nodes);
    }
}

#[test]
fn mirrored_input_gives_mirrored_output() {
    let omega = 12.0;
    let best = compute_best(&BestApproxConfig::new(8, omega).unwrap(), None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let nodes = perturb_mirrored(&best.nodes, 0.02, &mut rng);
    let r = build_interpolant(omega, &nodes).unwrap();
    let rep = local_error_maxima(&r, omega, &nodes, DEFAULT_SAMPLES_PER_INTERVAL);
    assert!(rep.alternating && rep.is_mirror_symmetric(1e-10));
    let outputs = [
        brasil_step(&nodes, &rep.eps, BrasilParams::default()).unwrap(),
        maehly_system_step(&nodes, &rep, MaehlyVariant::Bilinear).unwrap(),
        maehly_system_step(&nodes, &rep, MaehlyVariant::LogRatio).unwrap(),
        maehly_direct_step(&nodes, &rep, MaehlyVariant::LogRatio).unwrap(),
    ];
    for out in outputs {
        assert!(out.is_symmetric());
        assert_ne!(out, nodes);
    }
}

proptest! {
    #[test]
    fn brasil_invariant_under_error_scaling(seed in 0u64..1000, scale in 1e-8f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nodes, rep) = synthetic_instance(6, 0.3, &mut rng);
        let scaled: Vec<f64> = rep.eps.iter().map(|e| e * scale).collect();
        let a = brasil_step(&nodes, &rep.eps, BrasilParams::default()).unwrap();
        let b = brasil_step(&nodes, &scaled, BrasilParams::default()).unwrap();
        for (p, q) in a.nodes().iter().zip(b.nodes()) {
            prop_assert!((p - q).abs() <= 1e-14);
        }
    }

    #[test]
    fn brasil_output_is_valid(seed in 0u64..1000, n in 1usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nodes, rep) = synthetic_instance(n, 0.9, &mut rng);
        let out = brasil_step(&nodes, &rep.eps, BrasilParams::default()).unwrap();
        prop_assert_eq!(out.degree(), n);
        prop_assert!(out.nodes().windows(2).all(|p| p[0] < p[1]));
        prop_assert!(out.nodes().iter().all(|x| x.abs() < 1.0));
    }
}

#[test]
fn one_step_near_the_optimum_reduces_delta() {
    let omega = 62.29;
    let best = compute_best(&BestApproxConfig::new(32, omega).unwrap(), None).unwrap();
    // shift the positive half slightly, keeping the mirror symmetry
    let half: Vec<f64> = best.nodes.nodes()[33..]
        .iter()
        .enumerate()
        .map(|(j, x)| x + 2e-5 * (1.0 - x) * ((j % 3) as f64 - 1.0))
        .collect();
    let nodes = NodeSet::mirrored(&half).unwrap();
    let r = build_interpolant(omega, &nodes).unwrap();
    let before = local_error_maxima(&r, omega, &nodes, DEFAULT_SAMPLES_PER_INTERVAL);
    assert!(before.alternating && before.delta > 1e-3, "delta before {}", before.delta);
    for variant in [MaehlyVariant::LogRatio, MaehlyVariant::Bilinear] {
        let next = maehly_system_step(&nodes, &before, variant).unwrap();
        let r = build_interpolant(omega, &next).unwrap();
        let after = local_error_maxima(&r, omega, &next, DEFAULT_SAMPLES_PER_INTERVAL);
        assert!(after.delta < before.delta, "{variant:?}: {} -> {}", before.delta, after.delta);
    }
}

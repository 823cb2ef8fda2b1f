//! A-priori estimates of the frequency `ω` for which the unitary best
//! approximant of degree `n` attains a prescribed error `ε`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Polynomial coefficients of the experimental estimate, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaEstimateTables {
    pub pa_coeffs: [f64; 11],
    pub pb_coeffs: [f64; 12],
    pub pa_extrap: [f64; 2],
    pub pb_extrap: [f64; 2],
}

// coefficients are kept exactly as tabulated
#[allow(clippy::excessive_precision)]
pub const TABLES: OmegaEstimateTables = OmegaEstimateTables {
    pa_coeffs: [
        7.7325733748629055e-1,
        -5.777408873924058e-1,
        -6.860343132683391e-2,
        -1.4498935965331126e-2,
        -2.0017032381431967e-3,
        -1.792107115710027e-4,
        -1.0467338695044732e-5,
        -3.9545380249348945e-7,
        -9.304919862544986e-9,
        -1.2386694533170104e-10,
        -7.121569685837123e-13,
    ],
    pb_coeffs: [
        -9.296235152950844e-1,
        -2.4713673601660884e-2,
        -8.54706119111975e-3,
        -2.0382018252632794e-3,
        -3.2440829161667404e-4,
        -3.459972041530702e-5,
        -2.4972665972026706e-6,
        -1.2203258361585594e-7,
        -3.971747584379515e-9,
        -8.237224551239086e-11,
        -9.84139635152686e-13,
        -5.152327054589812e-15,
    ],
    pa_extrap: [1.2653161350741573, -3.4960298585304206e-1],
    pb_extrap: [-8.76285182160704e-1, 2.8332004893961966e-4],
};

/// Below this error the linear extrapolations replace the fitted polynomials.
pub const EXTRAPOLATION_THRESHOLD: f64 = 1e-14;

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Experimental estimate `ω_e = (n+1)π exp(-p_a(ln ε) n^{p_b(ln ε)})`.
pub fn omega_experimental(n: usize, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("experimental estimate requires n >= 1".into()));
    }
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::Domain(format!("error target must lie in (0, 2], got {eps}")));
    }
    let t = eps.ln();
    let (pa, pb) = if eps < EXTRAPOLATION_THRESHOLD {
        (horner(&TABLES.pa_extrap, t), horner(&TABLES.pb_extrap, t))
    } else {
        (horner(&TABLES.pa_coeffs, t), horner(&TABLES.pb_coeffs, t))
    };
    let n = n as f64;
    Ok((n + 1.0) * PI * (-pa * n.powf(pb)).exp())
}

/// `ln((2n)! (2n+1)! / (2 (n!)^2)) = ln((2n+1)/2) + 2 Σ_{j=1}^n ln(n+j)`.
fn log_factorial_ratio(n: usize) -> f64 {
    let nf = n as f64;
    ((2.0 * nf + 1.0) / 2.0).ln() + 2.0 * (1..=n).map(|j| (nf + j as f64).ln()).sum::<f64>()
}

/// Asymptotic estimate from the leading-order error term for small `ω`.
pub fn omega_asymptotic(n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("error target must be positive, got {eps}")));
    }
    if n == 0 {
        return Ok(eps);
    }
    let m = (2 * n + 1) as f64;
    Ok(2.0 * ((eps.ln() + log_factorial_ratio(n)) / m).exp())
}

/// Threshold `10^{-2(n-4)/3}` below which the asymptotic estimate is used.
pub fn auto_threshold(n: usize) -> f64 {
    10f64.powf(-2.0 * (n as f64 - 4.0) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Experimental,
    Asymptotic,
}

/// Chooses between both estimates; returns the value and the branch taken.
pub fn omega_auto_with_kind(n: usize, eps: f64) -> Result<(f64, EstimateKind)> {
    if eps < auto_threshold(n) || n == 0 {
        Ok((omega_asymptotic(n, eps)?, EstimateKind::Asymptotic))
    } else {
        Ok((omega_experimental(n, eps)?, EstimateKind::Experimental))
    }
}

pub fn omega_auto(n: usize, eps: f64) -> Result<f64> {
    omega_auto_with_kind(n, eps).map(|(w, _)| w)
}

/// Leading-order error `2 (n!)^2 (ω/2)^{2n+1} / ((2n)! (2n+1)!)`.
pub fn error_estimate_asymptotic(n: usize, omega: f64) -> f64 {
    if n == 0 {
        return omega;
    }
    let m = (2 * n + 1) as f64;
    (m * (omega / 2.0).ln() - log_factorial_ratio(n)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `(2n)! (2n+1)! / (2 (n!)^2)` in exact integer arithmetic.
    fn factorial_ratio(n: u32) -> u128 {
        let fact = |k: u32| (1..=k as u128).product::<u128>();
        fact(2 * n) / fact(n) * fact(2 * n + 1) / fact(n) / 2
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn table_transcription() {
        assert_eq!(TABLES.pa_coeffs[0], 7.7325733748629055e-1);
        assert_eq!(TABLES.pb_coeffs[0], -9.296235152950844e-1);
        assert_eq!(TABLES.pa_extrap[0], 1.2653161350741573);
        assert_eq!(TABLES.pb_extrap[1], 2.8332004893961966e-4);
    }

    #[test]
    fn degree_zero_asymptotic_is_identity() {
        assert_eq!(omega_asymptotic(0, 0.37).unwrap(), 0.37);
        assert_eq!(error_estimate_asymptotic(0, 0.37), 0.37);
    }

    #[test]
    fn asymptotic_matches_factorial_form() {
        let w = omega_asymptotic(1, 1e-3).unwrap();
        let expect = 2.0 * (6e-3f64).cbrt();
        assert!((w - expect).abs() <= 1e-14 * expect);

        // 16! 17! / (2 (8!)^2) fits in u128 exactly
        let ratio = factorial_ratio(8) as f64;
        let w = omega_asymptotic(8, 1e-10).unwrap();
        let expect = 2.0 * (1e-10 * ratio).powf(1.0 / 17.0);
        assert!((w - expect).abs() <= 1e-13 * expect, "{w} {expect}");

        let e = error_estimate_asymptotic(8, 20.0);
        let expect = 10f64.powi(17) / ratio;
        assert!((e - expect).abs() <= 1e-13 * expect, "{e} {expect}");
    }

    #[test]
    fn natural_log_reproduces_reference_frequency() {
        let w = omega_experimental(32, 1e-12).unwrap();
        assert!((w - 62.29).abs() <= 0.02 * 62.29, "{w}");
    }

    #[test]
    fn auto_branches() {
        assert_eq!(omega_auto_with_kind(4, 1e-6).unwrap().1, EstimateKind::Asymptotic);
        assert_eq!(omega_auto_with_kind(34, 1e-12).unwrap().1, EstimateKind::Experimental);
        let boundary = auto_threshold(10);
        assert_eq!(boundary, 1e-4);
        assert_eq!(omega_auto_with_kind(10, 1e-4).unwrap().1, EstimateKind::Experimental);
    }

    #[test]
    fn domain_errors() {
        assert!(omega_experimental(8, 0.0).is_err());
        assert!(omega_experimental(8, 2.5).is_err());
        assert!(omega_asymptotic(8, -1.0).is_err());
    }

    #[test]
    fn extrapolated_branch_is_used_below_threshold() {
        let w = omega_experimental(32, 1e-15).unwrap();
        assert!(w > 0.0 && w < omega_experimental(32, 1e-14).unwrap());
    }

    proptest! {
        #[test]
        fn asymptotic_round_trip(n in 0usize..=64, le in -14.0f64..0.0) {
            let eps = 10f64.powf(le);
            let w = omega_asymptotic(n, eps).unwrap();
            let back = error_estimate_asymptotic(n, w);
            prop_assert!((back - eps).abs() <= 1e-12 * eps);
        }

        #[test]
        fn experimental_in_uniqueness_range(n in 1usize..2048, le in -20.0f64..0.3) {
            let w = omega_experimental(n, 10f64.powf(le)).unwrap();
            prop_assert!(w > 0.0 && w < (n as f64 + 1.0) * PI);
        }

        #[test]
        fn estimates_increase_with_error(n in 1usize..512, le in -13.9f64..-0.1) {
            let e1 = 10f64.powf(le);
            let e2 = e1 * 1.5;
            prop_assert!(omega_experimental(n, e2).unwrap() > omega_experimental(n, e1).unwrap());
            prop_assert!(omega_asymptotic(n, e2).unwrap() > omega_asymptotic(n, e1).unwrap());
        }
    }
}

//! The set of attained strengths versus the spectrum.
//!
//! For an effect with spectrum inside `[a, b]`, every strength lies in
//! `[a, b]` when `a > 0`, and in `{0} u [a0, b]` when `0` is an eigenvalue
//! (`a0` the smallest nonzero one). In finite dimension every spectral point
//! is an eigenvalue, so the endpoints are attained by eigenvector rays.
//! `lambda_range_classify` predicts the set and samples strengths against
//! it; `numerical_range_check` verifies that for invertible effects the
//! attained strengths coincide with the numerical range `{<phi, E phi>}`.

use serde::Serialize;

use crate::effect::{Effect, Ray};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, HermitianMatrix};
use crate::oracle::{haar_rays, structured_rays, RayGenerator};
use crate::strength::{evaluate_strength, strength};

/// Absolute slack for set-containment checks on sampled strengths.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Matching tolerance between strengths and expectations in
/// [`numerical_range_check`].
pub const RANGE_MATCH_TOL: f64 = 1e-6;

/// Finite-dimensional reading of the spectral case split. "Isolated zero"
/// simply means zero is an eigenvalue; accumulation points do not occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumCase {
    PositiveFloor,
    IsolatedZero,
    ZeroEffect,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeViolation {
    pub ray: Ray,
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaRangeReport {
    /// Smallest eigenvalue.
    pub a: f64,
    /// Largest eigenvalue.
    pub b: f64,
    /// Smallest nonzero eigenvalue, present only when `a = 0` and the
    /// effect is nonzero.
    pub a0: Option<f64>,
    pub case_label: SpectrumCase,
    pub predicted_set: String,
    pub sampled_values: Vec<f64>,
    pub violations: Vec<RangeViolation>,
}

impl LambdaRangeReport {
    /// Whether a value lies in the predicted set, up to [`CONTAINMENT_TOL`].
    pub fn contains(&self, value: f64) -> bool {
        match self.case_label {
            SpectrumCase::ZeroEffect => value <= CONTAINMENT_TOL,
            SpectrumCase::PositiveFloor => {
                value >= self.a - CONTAINMENT_TOL && value <= self.b + CONTAINMENT_TOL
            }
            SpectrumCase::IsolatedZero => {
                let a0 = self.a0.expect("isolated zero has a floor");
                value <= CONTAINMENT_TOL
                    || (value >= a0 - CONTAINMENT_TOL && value <= self.b + CONTAINMENT_TOL)
            }
        }
    }

    /// Violations that were not flagged as borderline-range rays.
    pub fn hard_violations(&self) -> Vec<&RangeViolation> {
        self.violations
            .iter()
            .filter(|v| v.reason != "borderline_range")
            .collect()
    }
}

/// Classifies the predicted strength set of an effect and samples strengths
/// on its structured rays plus `n` Haar rays, recording containment
/// violations.
pub fn lambda_range_classify(
    e: &Effect,
    gen: &mut RayGenerator,
    n: usize,
) -> Result<LambdaRangeReport> {
    assert!(n >= 1, "sample count must be positive");
    let cut = e.zero_cutoff();
    let a = e.min_eigenvalue();
    let b = e.max_eigenvalue();
    let (case_label, a0) = if b <= cut {
        (SpectrumCase::ZeroEffect, None)
    } else if a > cut {
        (SpectrumCase::PositiveFloor, None)
    } else {
        let a0 = e
            .eigenvalues()
            .iter()
            .copied()
            .find(|&v| v > cut)
            .expect("nonzero effect has a retained eigenvalue");
        (SpectrumCase::IsolatedZero, Some(a0))
    };
    let predicted_set = match case_label {
        SpectrumCase::ZeroEffect => "{0}".to_string(),
        SpectrumCase::PositiveFloor => format!("[{a}, {b}]"),
        SpectrumCase::IsolatedZero => {
            format!("{{0}} u [{}, {b}]", a0.expect("present in this case"))
        }
    };
    let mut report = LambdaRangeReport {
        a,
        b,
        a0,
        case_label,
        predicted_set,
        sampled_values: Vec::new(),
        violations: Vec::new(),
    };

    let mut rays = structured_rays(e);
    rays.extend(haar_rays(gen, n));
    for ray in rays {
        let eval = evaluate_strength(e, &ray)?;
        report.sampled_values.push(eval.value);
        if !report.contains(eval.value) {
            let reason = if eval.borderline {
                "borderline_range".to_string()
            } else {
                "outside_predicted_set".to_string()
            };
            report.violations.push(RangeViolation {
                ray,
                value: eval.value,
                reason,
            });
        }
    }
    Ok(report)
}

/// `1 - ||I - E||_2` through a fresh eigendecomposition of `I - E`; agrees
/// with the smallest eigenvalue of `E` up to solver residual.
pub fn spectral_floor_cross_check(e: &Effect) -> Result<f64> {
    let complement = HermitianMatrix::identity(e.dim()).sub(e.matrix());
    Ok(1.0 - eigh(&complement)?.spectral_norm())
}

/// The ray `sqrt(w) v_min + sqrt(1-w) v_max` between the extremal
/// eigenvectors of an effect.
pub fn extremal_mixed_ray(e: &Effect, w: f64) -> Result<Ray> {
    let d = e.dim();
    let v_min = e.spectral().eigenvector(0);
    let v_max = e.spectral().eigenvector(d - 1);
    let w = w.clamp(0.0, 1.0);
    let (sw, cw) = (w.sqrt(), (1.0 - w).sqrt());
    Ray::new(v_min.map(|z| z * sw) + v_max.map(|z| z * cw))
}

/// For an invertible effect, checks both inclusions between the attained
/// strengths and the numerical range `{<phi, E phi>}` on structured plus `n`
/// Haar rays.
///
/// Targets are hit constructively with rays mixed between the extremal
/// eigenvectors: expectations interpolate linearly in the mixing weight
/// while inverse strengths interpolate harmonically, so each direction
/// solves for its weight in closed form and then verifies the match.
pub fn numerical_range_check(e: &Effect, gen: &mut RayGenerator, n: usize) -> Result<bool> {
    let a = e.min_eigenvalue();
    let b = e.max_eigenvalue();
    if a <= e.zero_cutoff() {
        return Err(Error::NotInvertible { min_eigenvalue: a });
    }
    let mut rays = structured_rays(e);
    rays.extend(haar_rays(gen, n));

    if b - a <= 1e-12 {
        // Scalar effect: both sets collapse to {a}.
        for ray in &rays {
            if (strength(e, ray)? - a).abs() > RANGE_MATCH_TOL
                || (e.expectation(ray) - a).abs() > RANGE_MATCH_TOL
            {
                return Ok(false);
            }
        }
        return Ok(true);
    }

    for ray in &rays {
        // Every attained strength is an expectation of some mixed ray.
        let lam = strength(e, ray)?;
        let w = ((b - lam) / (b - a)).clamp(0.0, 1.0);
        let psi = extremal_mixed_ray(e, w)?;
        if (e.expectation(&psi) - lam).abs() > RANGE_MATCH_TOL {
            return Ok(false);
        }
        // Every expectation is an attained strength of some mixed ray.
        let x = e.expectation(ray).clamp(a, b);
        let w = ((1.0 / x - 1.0 / b) / (1.0 / a - 1.0 / b)).clamp(0.0, 1.0);
        let psi = extremal_mixed_ray(e, w)?;
        if (strength(e, &psi)? - x).abs() > RANGE_MATCH_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::Tolerances;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag_effect(values: &[f64]) -> Effect {
        Effect::new(HermitianMatrix::from_diagonal(values), tol()).unwrap()
    }

    #[test]
    fn classify_invertible_effect() {
        let e = diag_effect(&[0.2, 0.8]);
        let mut gen = RayGenerator::new(42, 2);
        let report = lambda_range_classify(&e, &mut gen, 50).unwrap();
        assert_eq!(report.case_label, SpectrumCase::PositiveFloor);
        assert_eq!(report.predicted_set, "[0.2, 0.8]");
        assert!(report.hard_violations().is_empty());
        // Endpoints are attained by the eigenvector rays.
        assert!(report.sampled_values.iter().any(|v| (v - 0.2).abs() < 1e-9));
        assert!(report.sampled_values.iter().any(|v| (v - 0.8).abs() < 1e-9));
    }

    #[test]
    fn classify_isolated_zero() {
        let e = diag_effect(&[0.5, 0.0]);
        let mut gen = RayGenerator::new(42, 2);
        let report = lambda_range_classify(&e, &mut gen, 50).unwrap();
        assert_eq!(report.case_label, SpectrumCase::IsolatedZero);
        assert_eq!(report.a0, Some(0.5));
        assert!(report.hard_violations().is_empty());
        // a0 = b here, so every sample is within 1e-8 of {0, 0.5}.
        for v in &report.sampled_values {
            assert!(v.min((v - 0.5).abs()) <= CONTAINMENT_TOL);
        }
    }

    #[test]
    fn classify_zero_effect() {
        let e = Effect::zero(3, tol());
        let mut gen = RayGenerator::new(1, 3);
        let report = lambda_range_classify(&e, &mut gen, 10).unwrap();
        assert_eq!(report.case_label, SpectrumCase::ZeroEffect);
        assert_eq!(report.predicted_set, "{0}");
        assert!(report.violations.is_empty());
        assert!(report.sampled_values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn floor_cross_check_matches_min_eigenvalue() {
        for e in [
            diag_effect(&[0.2, 0.8]),
            diag_effect(&[0.5, 0.0]),
            Effect::identity(3, tol()),
        ] {
            let floor = spectral_floor_cross_check(&e).unwrap();
            assert!((floor - e.min_eigenvalue()).abs() <= 1e-10);
        }
    }

    #[test]
    fn numerical_range_check_examples() {
        let mut gen = RayGenerator::new(9, 2);
        // Scalar effect: trivially true.
        let scalar = diag_effect(&[0.4, 0.4]);
        assert!(numerical_range_check(&scalar, &mut gen, 20).unwrap());

        let e = diag_effect(&[0.2, 0.8]);
        assert!(numerical_range_check(&e, &mut gen, 50).unwrap());

        // Not invertible: precondition violation.
        let singular = diag_effect(&[0.5, 0.0]);
        assert!(matches!(
            numerical_range_check(&singular, &mut gen, 5),
            Err(Error::NotInvertible { .. })
        ));
    }

    /// Accumulation at zero cannot happen in finite dimension, but the
    /// diagonal family diag(1, 1/2, ..., 1/2^{d-1}) shows its flavor: the
    /// positive floor shrinks geometrically with d while mixed rays fill
    /// everything between the floor and the top.
    #[test]
    fn diagonal_family_approaches_full_interval() {
        let mut previous_floor = f64::INFINITY;
        for d in [2usize, 4, 8, 16] {
            let spectrum: Vec<f64> = (0..d).map(|k| 0.5_f64.powi(k as i32)).collect();
            let e = diag_effect(&spectrum);
            let (a, b) = (e.min_eigenvalue(), e.max_eigenvalue());
            assert!(a < previous_floor, "floor must shrink with dimension");
            previous_floor = a;

            let mut gen = RayGenerator::new(3, d);
            let report = lambda_range_classify(&e, &mut gen, 30).unwrap();
            assert_eq!(report.case_label, SpectrumCase::PositiveFloor);
            assert!(report.hard_violations().is_empty());

            // Mixed rays attain every level in (a, b).
            for k in 0..=40 {
                let target = a + (b - a) * k as f64 / 40.0;
                let w = ((1.0 / target - 1.0 / b) / (1.0 / a - 1.0 / b)).clamp(0.0, 1.0);
                let psi = extremal_mixed_ray(&e, w).unwrap();
                assert!((strength(&e, &psi).unwrap() - target).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn harmonic_sweep_fills_the_interval_monotonically() {
        let e = diag_effect(&[0.2, 0.8]);
        // Targets uniform in value space; solve the harmonic weight per
        // target and confirm the measured strengths fill [0.2, 0.8].
        let (a, b) = (0.2, 0.8);
        let mut measured = Vec::new();
        for k in 0..=100 {
            let t = a + (b - a) * k as f64 / 100.0;
            let w = ((1.0 / t - 1.0 / b) / (1.0 / a - 1.0 / b)).clamp(0.0, 1.0);
            let psi = extremal_mixed_ray(&e, w).unwrap();
            measured.push(strength(&e, &psi).unwrap());
        }
        for pair in measured.windows(2) {
            assert!((pair[1] - pair[0]).abs() < 0.01, "gap too wide");
        }
        assert!((measured[0] - a).abs() < 1e-9);
        assert!((measured[100] - b).abs() < 1e-9);

        // Strengths along a uniform weight sweep are monotone.
        let mut previous = f64::INFINITY;
        for k in 0..=50 {
            let w = k as f64 / 50.0;
            let psi = extremal_mixed_ray(&e, w).unwrap();
            let lam = strength(&e, &psi).unwrap();
            assert!(lam <= previous + 1e-12);
            previous = lam;
        }
    }
}

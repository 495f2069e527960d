//! Recovering an effect from strength samples.
//!
//! For invertible `E` the strength along `phi` satisfies
//! `1/lambda = <phi, E^{-1} phi>`, a linear functional of the Hermitian
//! unknown `X = E^{-1}`. Sampling `d^2` well-chosen rays therefore turns the
//! inverse problem into a linear solve: recover `X`, invert it spectrally,
//! and validate the result as an effect. Zero-valued samples mark rays
//! outside `ran(E)`; reconstruction then runs on the span of the positive
//! samples and reports the detected kernel dimension.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::effect::{check_dims, Effect, Ray};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, HermitianMatrix, Tolerances};
use crate::oracle::{structured_rays_of, RayGenerator};
use crate::strength::{strength, witness_ray, StrengthSample};

/// Samples at or below this value count as "ray outside the range".
/// One order above `eps_range` so that noise of the order of the bisection
/// width cannot flip a zero sample.
pub fn zero_sample_cutoff(tol: &Tolerances) -> f64 {
    10.0 * tol.eps_range
}

/// Separation threshold used by [`distinguish`].
pub const DISTINGUISH_GAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub effect: Effect,
    /// Max over the input rays of `|strength(recovered, ray) - sample|`.
    pub residual: f64,
    /// Condition number (sigma_max / sigma_min) of the design matrix.
    pub conditioning: f64,
    /// Dimension of the detected kernel.
    pub kernel_dim: usize,
}

/// A deterministic set of `d^2` rays whose expectations determine a
/// Hermitian matrix: the basis rays `e_i`, then `(e_i + e_j)/sqrt(2)` and
/// `(e_i + i e_j)/sqrt(2)` for `i < j`.
pub fn probe_rays(d: usize) -> Vec<Ray> {
    assert!(d >= 1);
    let mut rays = Vec::with_capacity(d * d);
    for i in 0..d {
        rays.push(Ray::canonical_basis(d, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for factor in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut v = DVector::<Complex64>::zeros(d);
                v[i] = Complex64::new(1.0, 0.0);
                v[j] = factor;
                rays.push(Ray::new(v).expect("two-component vector is nonzero"));
            }
        }
    }
    rays
}

/// Closed-form strengths of `e` along the given rays, packaged as samples.
pub fn sample_strengths(e: &Effect, rays: &[Ray]) -> Result<Vec<StrengthSample>> {
    rays.iter()
        .map(|ray| StrengthSample::new(ray.clone(), strength(e, ray)?))
        .collect()
}

/// Recovers an effect from strength samples of dimension `d`.
pub fn reconstruct_effect(
    samples: &[StrengthSample],
    d: usize,
    tol: &Tolerances,
) -> Result<ReconstructionResult> {
    tol.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidSample {
            detail: "no samples given".into(),
        });
    }
    for sample in samples {
        if sample.ray.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: sample.ray.dim(),
            });
        }
        if !(0.0..=1.0).contains(&sample.value) {
            return Err(Error::InvalidSample {
                detail: format!("strength value {} outside [0, 1]", sample.value),
            });
        }
    }

    let cutoff = zero_sample_cutoff(tol);
    let positive: Vec<&StrengthSample> = samples.iter().filter(|s| s.value > cutoff).collect();
    let zero: Vec<&StrengthSample> = samples.iter().filter(|s| s.value <= cutoff).collect();

    // Hypothesized range of the effect: the span of the positive rays.
    let basis = orthonormal_span(positive.iter().map(|s| s.ray.vector()));
    let rank = basis.len();
    let kernel_dim = d - rank;

    // Every zero-sample ray must leave the hypothesized range; a ray inside
    // it would have positive strength.
    for sample in &zero {
        let mut residual = sample.ray.vector().clone();
        for q in &basis {
            let overlap = q.dotc(&residual);
            residual -= q.map(|z| z * overlap);
        }
        if residual.norm() <= 1e-8 {
            return Err(Error::InconsistentKernel {
                detail: format!(
                    "a zero-valued sample lies in the span of the positive samples (residual {:.3e})",
                    residual.norm()
                ),
            });
        }
    }

    if rank == 0 {
        let effect = Effect::zero(d, *tol);
        let residual = samples.iter().map(|s| s.value).fold(0.0, f64::max);
        return Ok(ReconstructionResult {
            effect,
            residual,
            conditioning: 1.0,
            kernel_dim,
        });
    }

    // Linear system for the Hermitian unknown X = (compressed E)^{-1}:
    // one row <phi~, X phi~> = 1/lambda per positive sample, with phi~ the
    // compression of the ray onto the range basis.
    let unknowns = rank * rank;
    if positive.len() < unknowns {
        return Err(Error::SingularSystem {
            detail: format!(
                "{} positive samples cannot determine {} Hermitian parameters",
                positive.len(),
                unknowns
            ),
        });
    }
    let mut design = DMatrix::<f64>::zeros(positive.len(), unknowns);
    let mut rhs = DVector::<f64>::zeros(positive.len());
    for (row, sample) in positive.iter().enumerate() {
        let compressed: Vec<Complex64> =
            basis.iter().map(|q| q.dotc(sample.ray.vector())).collect();
        for i in 0..rank {
            design[(row, i)] = compressed[i].norm_sqr();
        }
        let mut col = rank;
        for i in 0..rank {
            for j in (i + 1)..rank {
                let cross = compressed[i].conj() * compressed[j];
                design[(row, col)] = 2.0 * cross.re;
                design[(row, col + 1)] = -2.0 * cross.im;
                col += 2;
            }
        }
        rhs[row] = 1.0 / sample.value;
    }

    let singular_values = design.clone().svd(false, false).singular_values;
    let sigma_max = singular_values.max();
    let sigma_min = singular_values.min();
    if sigma_min <= sigma_max * 1e-12 {
        return Err(Error::SingularSystem {
            detail: format!(
                "design matrix is rank deficient (singular values {sigma_max:.3e} .. {sigma_min:.3e})"
            ),
        });
    }
    let conditioning = sigma_max / sigma_min;

    let solution = if positive.len() == unknowns {
        design
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularSystem {
                detail: "LU solve failed on the square system".into(),
            })?
    } else {
        // Overdetermined: normal equations.
        let normal = design.transpose() * &design;
        let reduced_rhs = design.transpose() * &rhs;
        normal
            .lu()
            .solve(&reduced_rhs)
            .ok_or_else(|| Error::SingularSystem {
                detail: "normal equations are singular".into(),
            })?
    };

    // Assemble X, invert its spectrum, and lift back to full dimension.
    let mut x = DMatrix::<Complex64>::zeros(rank, rank);
    for i in 0..rank {
        x[(i, i)] = Complex64::new(solution[i], 0.0);
    }
    let mut col = rank;
    for i in 0..rank {
        for j in (i + 1)..rank {
            let z = Complex64::new(solution[col], solution[col + 1]);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            col += 2;
        }
    }
    let x = HermitianMatrix::from_matrix(x).expect("finite solve output");
    let x_spectral = eigh(&x)?;
    for &eig in x_spectral.eigenvalues() {
        if eig.abs() < 1e-12 {
            return Err(Error::SingularSystem {
                detail: format!("recovered inverse has near-zero eigenvalue {eig:.3e}"),
            });
        }
    }
    let compressed_effect = x_spectral.apply_to_eigenvalues(|x| 1.0 / x);
    let basis_matrix = DMatrix::<Complex64>::from_columns(&basis);
    let lifted = &basis_matrix * compressed_effect * basis_matrix.adjoint();
    let effect = Effect::new(HermitianMatrix::from_matrix(lifted)?, *tol)?;

    let mut residual = 0.0_f64;
    for sample in samples {
        residual = residual.max((strength(&effect, &sample.ray)? - sample.value).abs());
    }
    Ok(ReconstructionResult {
        effect,
        residual,
        conditioning,
        kernel_dim,
    })
}

/// Modified Gram-Schmidt span with a fixed keep threshold.
fn orthonormal_span<'a>(
    vectors: impl Iterator<Item = &'a DVector<Complex64>>,
) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for v in vectors {
        let mut residual = v.clone();
        for q in &basis {
            let overlap = q.dotc(&residual);
            residual -= q.map(|z| z * overlap);
        }
        let norm = residual.norm();
        if norm > 1e-8 {
            basis.push(residual.map(|z| z / norm));
        }
    }
    basis
}

/// Finds a ray along which two effects have different strengths, or `None`
/// when the matrices agree within `1e-10` in Frobenius norm.
///
/// The search order is: structured rays of `E - F`, then Haar rays up to the
/// budget, then witness rays in both orders. The witness fallback
/// guarantees a separating ray whenever `||E - F||_F > 1e-8`.
pub fn distinguish(
    e: &Effect,
    f: &Effect,
    gen: &mut RayGenerator,
    budget: usize,
) -> Result<Option<Ray>> {
    check_dims(e, f)?;
    let difference = e.matrix().sub(f.matrix());
    let difference_norm = difference.frobenius_norm();
    if difference_norm <= 1e-10 {
        return Ok(None);
    }

    let separates = |ray: &Ray| -> Result<bool> {
        Ok((strength(e, ray)? - strength(f, ray)?).abs() > DISTINGUISH_GAP)
    };

    let mut examined = 0;
    let structured = structured_rays_of(eigh(&difference)?.eigenvectors());
    for ray in structured {
        if examined >= budget {
            break;
        }
        examined += 1;
        if separates(&ray)? {
            return Ok(Some(ray));
        }
    }
    while examined < budget {
        examined += 1;
        let ray = gen.next_ray();
        if separates(&ray)? {
            return Ok(Some(ray));
        }
    }
    for (first, second) in [(e, f), (f, e)] {
        if let Some(psi) = witness_ray(first, second)? {
            if separates(&psi)? {
                return Ok(Some(psi));
            }
        }
    }
    if difference_norm > 1e-8 {
        Err(Error::SearchExhausted { budget })
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::ray_projector;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag_effect(values: &[f64]) -> Effect {
        Effect::new(HermitianMatrix::from_diagonal(values), tol()).unwrap()
    }

    #[test]
    fn probe_ray_counts_and_layout() {
        assert_eq!(probe_rays(1).len(), 1);
        assert_eq!(probe_rays(3).len(), 9);
        let rays = probe_rays(2);
        assert_eq!(rays.len(), 4);
        assert!(rays[0].coincides_with(&Ray::canonical_basis(2, 0), 1e-15));
        assert!(rays[1].coincides_with(&Ray::canonical_basis(2, 1), 1e-15));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rays[2].vector()[0].re - s).abs() < 1e-15);
        assert!((rays[2].vector()[1].re - s).abs() < 1e-15);
        assert!((rays[3].vector()[0].re - s).abs() < 1e-15);
        assert!((rays[3].vector()[1].im - s).abs() < 1e-15);
    }

    #[test]
    fn round_trip_invertible_effect() {
        let e = diag_effect(&[0.5, 0.25]);
        let samples = sample_strengths(&e, &probe_rays(2)).unwrap();
        let result = reconstruct_effect(&samples, 2, &tol()).unwrap();
        assert_eq!(result.kernel_dim, 0);
        let error = result.effect.matrix().sub(e.matrix()).frobenius_norm();
        assert!(error <= 1e-8, "round-trip error {error:.3e}");
        assert!(result.residual <= 1e-8);
    }

    #[test]
    fn round_trip_identity_is_exact() {
        let id = Effect::identity(3, tol());
        let samples = sample_strengths(&id, &probe_rays(3)).unwrap();
        let result = reconstruct_effect(&samples, 3, &tol()).unwrap();
        let error = result.effect.matrix().sub(id.matrix()).frobenius_norm();
        assert!(error <= 1e-12);
    }

    #[test]
    fn round_trip_with_kernel() {
        let e = diag_effect(&[0.5, 0.0]);
        let samples = sample_strengths(&e, &probe_rays(2)).unwrap();
        let result = reconstruct_effect(&samples, 2, &tol()).unwrap();
        assert_eq!(result.kernel_dim, 1);
        let error = result.effect.matrix().sub(e.matrix()).frobenius_norm();
        assert!(error <= 1e-8);
    }

    #[test]
    fn all_zero_samples_give_the_zero_effect() {
        let zero = Effect::zero(2, tol());
        let samples = sample_strengths(&zero, &probe_rays(2)).unwrap();
        let result = reconstruct_effect(&samples, 2, &tol()).unwrap();
        assert_eq!(result.kernel_dim, 2);
        assert!(result.effect.matrix().frobenius_norm() < 1e-12);
    }

    #[test]
    fn inconsistent_kernel_is_detected() {
        // Positive samples span all of C^2, yet e2 claims strength zero.
        let rays = probe_rays(2);
        let samples = vec![
            StrengthSample::new(rays[0].clone(), 0.5).unwrap(),
            StrengthSample::new(rays[1].clone(), 0.0).unwrap(),
            StrengthSample::new(rays[2].clone(), 0.4).unwrap(),
            StrengthSample::new(rays[3].clone(), 0.4).unwrap(),
        ];
        assert!(matches!(
            reconstruct_effect(&samples, 2, &tol()),
            Err(Error::InconsistentKernel { .. })
        ));
    }

    #[test]
    fn corrupted_samples_yield_not_an_effect() {
        // Diagonal strengths claim a small effect while the pair rays claim
        // a large one; the recovered inverse goes indefinite.
        let rays = probe_rays(2);
        let samples = vec![
            StrengthSample::new(rays[0].clone(), 0.2).unwrap(),
            StrengthSample::new(rays[1].clone(), 0.2).unwrap(),
            StrengthSample::new(rays[2].clone(), 0.9).unwrap(),
            StrengthSample::new(rays[3].clone(), 0.9).unwrap(),
        ];
        assert!(matches!(
            reconstruct_effect(&samples, 2, &tol()),
            Err(Error::NotAnEffect { .. })
        ));
    }

    #[test]
    fn underdetermined_system_is_rejected() {
        let e = diag_effect(&[0.5, 0.25]);
        let rays = probe_rays(2);
        let samples = sample_strengths(&e, &rays[..2]).unwrap();
        assert!(matches!(
            reconstruct_effect(&samples, 2, &tol()),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn extra_samples_are_used_in_least_squares() {
        let e = diag_effect(&[0.9, 0.3]);
        let mut rays = probe_rays(2);
        let mut gen = RayGenerator::new(77, 2);
        rays.extend(crate::oracle::haar_rays(&mut gen, 6));
        let samples = sample_strengths(&e, &rays).unwrap();
        let result = reconstruct_effect(&samples, 2, &tol()).unwrap();
        let error = result.effect.matrix().sub(e.matrix()).frobenius_norm();
        assert!(error <= 1e-8);
    }

    #[test]
    fn distinguish_examples() {
        let t = tol();
        let mut gen = RayGenerator::new(3, 2);
        let e = diag_effect(&[0.5, 0.25]);
        assert!(distinguish(&e, &e, &mut gen, 50).unwrap().is_none());

        let swapped = diag_effect(&[0.25, 0.5]);
        let ray = distinguish(&e, &swapped, &mut gen, 50)
            .unwrap()
            .expect("different effects must separate");
        let gap = (strength(&e, &ray).unwrap() - strength(&swapped, &ray).unwrap()).abs();
        assert!(gap > DISTINGUISH_GAP);

        // P vs P/2 separate on any ray in ran(P), with strengths 1 vs 1/2.
        let p = ray_projector(&Ray::canonical_basis(2, 0), t);
        let half = Effect::new(p.matrix().scaled(0.5), t).unwrap();
        let ray = distinguish(&p, &half, &mut gen, 50)
            .unwrap()
            .expect("scaled");
        let (sp, sh) = (strength(&p, &ray).unwrap(), strength(&half, &ray).unwrap());
        assert!((sp - 2.0 * sh).abs() < 1e-9, "homogeneity: {sp} vs {sh}");
    }
}

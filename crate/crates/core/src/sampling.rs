//! Seeded random effects, projections and unitaries.
//!
//! The property suite and the acceptance tests draw their test corpora from
//! here. Everything is a pure function of a [`RayGenerator`] stream, so a
//! seed pins the entire corpus.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::effect::Effect;
use crate::hermitian::{HermitianMatrix, Tolerances};
use crate::oracle::RayGenerator;

/// Haar-like random unitary: modified Gram-Schmidt applied to a Gaussian
/// matrix, one column at a time.
pub fn random_unitary(gen: &mut RayGenerator) -> DMatrix<Complex64> {
    let d = gen.dim();
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gen.next_gaussian_vector();
        for q in &cols {
            let overlap = q.dotc(&v);
            v -= q.map(|z| z * overlap);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v.map(|z| z / norm));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Effect with the prescribed eigenvalues in a random eigenbasis.
pub fn effect_with_spectrum(
    gen: &mut RayGenerator,
    eigenvalues: &[f64],
    tol: Tolerances,
) -> Effect {
    assert_eq!(gen.dim(), eigenvalues.len());
    let u = random_unitary(gen);
    let mut scaled = u.clone();
    for (j, &e) in eigenvalues.iter().enumerate() {
        for i in 0..eigenvalues.len() {
            scaled[(i, j)] *= e;
        }
    }
    let raw = &scaled * u.adjoint();
    Effect::new(
        HermitianMatrix::from_matrix(raw).expect("finite by construction"),
        tol,
    )
    .expect("prescribed spectrum lies in [0, 1]")
}

/// Random effect with eigenvalues uniform in `[0, 1]`.
pub fn random_effect(gen: &mut RayGenerator, tol: Tolerances) -> Effect {
    random_effect_with_floor(gen, 0.0, tol)
}

/// Random effect with eigenvalues uniform in `[floor, 1]`.
///
/// A positive floor keeps the effect safely invertible; oracle-agreement
/// corpora use it so neither route sits on the ill-posed range boundary.
pub fn random_effect_with_floor(gen: &mut RayGenerator, floor: f64, tol: Tolerances) -> Effect {
    let eigenvalues: Vec<f64> = (0..gen.dim())
        .map(|_| floor + (1.0 - floor) * gen.next_uniform())
        .collect();
    effect_with_spectrum(gen, &eigenvalues, tol)
}

/// Random effect of the given rank: `rank` eigenvalues uniform in
/// `[floor, 1]`, the rest exactly zero.
pub fn random_rank_deficient_effect(
    gen: &mut RayGenerator,
    rank: usize,
    floor: f64,
    tol: Tolerances,
) -> Effect {
    let d = gen.dim();
    assert!(rank <= d);
    let eigenvalues: Vec<f64> = (0..d)
        .map(|i| {
            if i < rank {
                floor + (1.0 - floor) * gen.next_uniform()
            } else {
                0.0
            }
        })
        .collect();
    effect_with_spectrum(gen, &eigenvalues, tol)
}

/// Random orthogonal projection of the given rank.
pub fn random_projection(gen: &mut RayGenerator, rank: usize, tol: Tolerances) -> Effect {
    let d = gen.dim();
    assert!(rank <= d);
    let eigenvalues: Vec<f64> = (0..d).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    effect_with_spectrum(gen, &eigenvalues, tol)
}

/// Random effect dominated by `e`, built as `E^{1/2} C E^{1/2}` for a random
/// effect `C`; `C <= I` makes the product a lower bound of `E`.
pub fn random_effect_below(gen: &mut RayGenerator, e: &Effect, tol: Tolerances) -> Effect {
    assert_eq!(gen.dim(), e.dim());
    let c = random_effect(gen, tol);
    let cut = e.zero_cutoff();
    let sqrt = e
        .spectral()
        .apply_to_eigenvalues(|v| if v > cut { v.sqrt() } else { 0.0 });
    let raw = &sqrt * c.matrix().as_matrix() * &sqrt;
    Effect::new(
        HermitianMatrix::from_matrix(raw).expect("finite by construction"),
        tol,
    )
    .expect("compression of an effect stays in [0, I]")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut gen = RayGenerator::new(3, 5);
        let u = random_unitary(&mut gen);
        let gram = u.adjoint() * &u;
        assert!((gram - DMatrix::<Complex64>::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn effect_spectra_are_preserved() {
        let mut gen = RayGenerator::new(17, 4);
        let spectrum = [0.1, 0.4, 0.4, 0.9];
        let e = effect_with_spectrum(&mut gen, &spectrum, tol());
        for (got, want) in e.eigenvalues().iter().zip(spectrum.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_effects_have_exact_kernels() {
        let mut gen = RayGenerator::new(23, 4);
        let e = random_rank_deficient_effect(&mut gen, 2, 0.1, tol());
        assert_eq!(e.rank(), 2);
        assert!(e.eigenvalues()[0] < 1e-12);
        assert!(e.eigenvalues()[1] < 1e-12);
    }

    #[test]
    fn projections_have_unit_spectrum() {
        let mut gen = RayGenerator::new(29, 3);
        let p = random_projection(&mut gen, 2, tol());
        assert!(p.is_projection());
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn dominated_effects_are_dominated() {
        let mut gen = RayGenerator::new(31, 3);
        let e = random_effect(&mut gen, tol());
        for _ in 0..5 {
            let g = random_effect_below(&mut gen, &e, tol());
            assert!(crate::effect::loewner_leq(&g, &e).unwrap());
        }
    }

    #[test]
    fn corpora_are_seed_deterministic() {
        let mut a = RayGenerator::new(123, 4);
        let mut b = RayGenerator::new(123, 4);
        let ea = random_effect(&mut a, tol());
        let eb = random_effect(&mut b, tol());
        assert_eq!(ea.matrix().as_matrix(), eb.matrix().as_matrix());
    }
}

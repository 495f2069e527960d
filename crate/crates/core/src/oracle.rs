//! Independent ground truth for strengths, plus deterministic ray sources.
//!
//! `strength_by_bisection` computes the supremum in the definition of the
//! strength directly, by bisecting the feasibility predicate
//! `min_eig(E - lambda P_phi) >= -eps_psd`. It shares no code path with the
//! closed form in [`crate::strength::strength`]; the two are checked
//! against each other by the property suite.
//!
//! # Randomness contract
//!
//! All randomness flows through [`RayGenerator`], which is ChaCha8 seeded
//! via `seed_from_u64` and consumed only through two documented primitives:
//!
//! * uniforms `u = (next_u64() >> 11) * 2^-53` in `[0, 1)`;
//! * normal pairs by Box-Muller, `r = sqrt(-2 ln(1 - u1))`,
//!   `(r cos(2 pi u2), r sin(2 pi u2))`, consuming exactly two uniforms.
//!
//! A complex standard normal draws `(re, im)` from one Box-Muller pair, and
//! a raw Gaussian vector of dimension `d` consumes exactly `d` such draws.
//! Sub-generators are derived by `splitmix64(seed XOR (label + 1) * GOLDEN)`
//! with `GOLDEN = 0x9E3779B97F4A7C15`. Identical seeds therefore reproduce
//! identical streams, bit for bit, on every platform.

use nalgebra::DVector;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::effect::{Effect, Ray};
use crate::error::Result;
use crate::hermitian::{min_eigenvalue, Tolerances};
use crate::strength::check_ray_dims;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic, portable source of Haar-like random rays of a fixed
/// dimension. Stateful: one generator per thread of work.
#[derive(Debug, Clone)]
pub struct RayGenerator {
    seed: u64,
    dim: usize,
    rng: ChaCha8Rng,
}

impl RayGenerator {
    pub fn new(seed: u64, dim: usize) -> Self {
        assert!(dim >= 1, "ray dimension must be positive");
        Self {
            seed,
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A fresh generator on a disjoint stream, for fan-out across dimensions
    /// or trials without sharing state.
    pub fn subseed(&self, label: u64) -> RayGenerator {
        RayGenerator::new(
            splitmix64(self.seed ^ label.wrapping_add(1).wrapping_mul(GOLDEN)),
            self.dim,
        )
    }

    /// Like [`Self::subseed`] but changing the ray dimension.
    pub fn subseed_with_dim(&self, label: u64, dim: usize) -> RayGenerator {
        let mut g = self.subseed(label);
        g.dim = dim;
        g
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Box-Muller pair of independent standard normals.
    fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// One standard complex normal (real and imaginary parts independent).
    pub fn next_complex_normal(&mut self) -> Complex64 {
        let (re, im) = self.next_normal_pair();
        Complex64::new(re, im)
    }

    /// Raw Gaussian vector of the generator's dimension, not normalized.
    pub fn next_gaussian_vector(&mut self) -> DVector<Complex64> {
        DVector::from_fn(self.dim, |_, _| self.next_complex_normal())
    }

    /// Next Haar-distributed ray.
    pub fn next_ray(&mut self) -> Ray {
        loop {
            let v = self.next_gaussian_vector();
            if let Ok(ray) = Ray::new(v) {
                return ray;
            }
            // Astronomically unlikely near-zero draw; pull again.
        }
    }
}

/// `n` Haar-random rays from the generator.
pub fn haar_rays(gen: &mut RayGenerator, n: usize) -> Vec<Ray> {
    (0..n).map(|_| gen.next_ray()).collect()
}

/// Deterministic ray set adapted to an effect: every eigenvector, plus the
/// four superpositions `(v_i ± v_j)/sqrt(2)` and `(v_i ± i v_j)/sqrt(2)` for
/// each eigenvector pair. For rank-deficient effects this includes rays that
/// straddle the kernel.
pub fn structured_rays(e: &Effect) -> Vec<Ray> {
    structured_rays_of(e.spectral().eigenvectors())
}

/// The same construction from raw orthonormal columns.
pub fn structured_rays_of(columns: &nalgebra::DMatrix<Complex64>) -> Vec<Ray> {
    let d = columns.ncols();
    let col = |j: usize| DVector::from_column_slice(columns.column(j).as_slice());
    let mut rays = Vec::with_capacity(d * d * 2);
    for j in 0..d {
        rays.push(Ray::new(col(j)).expect("eigenvector columns are unit vectors"));
    }
    let i_unit = Complex64::new(0.0, 1.0);
    for a in 0..d {
        for b in (a + 1)..d {
            let va = col(a);
            let vb = col(b);
            for factor in [
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                i_unit,
                -i_unit,
            ] {
                let combo = &va + vb.map(|z| z * factor);
                rays.push(
                    Ray::new(combo).expect("superpositions of orthonormal vectors are nonzero"),
                );
            }
        }
    }
    rays
}

/// The strength as the supremum it is defined to be: the largest
/// `lambda` in `[0, 1]` with `min_eig(E - lambda P_phi) >= -eps_psd`,
/// bisected down to a bracket of width `eps_bisect`.
///
/// The upper bracket starts at `min(1, <phi, E phi>)`, which is always an
/// upper bound for the strength. The returned value is feasible.
pub fn strength_by_bisection(e: &Effect, phi: &Ray, tol: &Tolerances) -> Result<f64> {
    check_ray_dims(e, phi)?;
    let projector = phi.projector_matrix();
    let feasible = |lambda: f64| -> Result<bool> {
        let shifted = e.matrix().sub(&projector.scaled(lambda));
        Ok(min_eigenvalue(&shifted)? >= -tol.eps_psd)
    };
    let upper = e.expectation(phi).clamp(0.0, 1.0);
    if feasible(upper)? {
        return Ok(upper);
    }
    let mut lo = 0.0;
    let mut hi = upper;
    while hi - lo > tol.eps_bisect {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::HermitianMatrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag_effect(values: &[f64]) -> Effect {
        Effect::new(HermitianMatrix::from_diagonal(values), tol()).unwrap()
    }

    fn plus_ray() -> Ray {
        Ray::from_components(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn bisection_examples() {
        let t = tol();
        let id = Effect::identity(2, t);
        assert!((strength_by_bisection(&id, &plus_ray(), &t).unwrap() - 1.0).abs() <= t.eps_bisect);

        let e = diag_effect(&[0.5, 0.25]);
        let lam = strength_by_bisection(&e, &plus_ray(), &t).unwrap();
        assert!((lam - 1.0 / 3.0).abs() <= 100.0 * t.eps_bisect);

        let rank_one = diag_effect(&[1.0, 0.0]);
        let lam = strength_by_bisection(&rank_one, &plus_ray(), &t).unwrap();
        assert!(lam.abs() <= 100.0 * t.eps_bisect);
    }

    #[test]
    fn bisection_bracket_is_feasible() {
        let t = tol();
        let e = diag_effect(&[0.7, 0.2]);
        let phi = plus_ray();
        let lam = strength_by_bisection(&e, &phi, &t).unwrap();
        let at =
            |l: f64| min_eigenvalue(&e.matrix().sub(&phi.projector_matrix().scaled(l))).unwrap();
        assert!(at(lam) >= -t.eps_psd);
        assert!(lam >= 1.0 - 10.0 * t.eps_bisect || at(lam + 10.0 * t.eps_bisect) < -t.eps_psd);
    }

    #[test]
    fn ray_generator_is_deterministic() {
        let a: Vec<Ray> = haar_rays(&mut RayGenerator::new(42, 4), 3);
        let b: Vec<Ray> = haar_rays(&mut RayGenerator::new(42, 4), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.vector(), y.vector(), "same seed must give identical rays");
        }
        let c = RayGenerator::new(43, 4).next_ray();
        assert!(a[0].canonical_distance(&c) > 1e-6);
    }

    #[test]
    fn ray_generator_dimension_one_is_constant() {
        let mut gen = RayGenerator::new(7, 1);
        for _ in 0..5 {
            let ray = gen.next_ray();
            assert!((ray.vector()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert_eq!(ray.vector()[0].im, 0.0);
        }
    }

    #[test]
    fn haar_rays_are_unit_norm() {
        let mut gen = RayGenerator::new(11, 5);
        for ray in haar_rays(&mut gen, 20) {
            assert!((ray.vector().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subseed_streams_disjoint_but_reproducible() {
        let base = RayGenerator::new(5, 3);
        let mut s1 = base.subseed(0);
        let mut s2 = base.subseed(1);
        assert!(s1.next_ray().canonical_distance(&s2.next_ray()) > 1e-6);
        let mut s1_again = base.subseed(0);
        let mut fresh = RayGenerator::new(5, 3).subseed(0);
        assert_eq!(s1_again.next_ray().vector(), fresh.next_ray().vector());
    }

    #[test]
    fn structured_ray_counts() {
        let e = diag_effect(&[0.2, 0.8]);
        assert_eq!(structured_rays(&e).len(), 6);
        let id3 = Effect::identity(3, tol());
        assert_eq!(structured_rays(&id3).len(), 3 + 4 * 3);
        // Degenerate spectrum keeps the canonical basis in index order.
        let rays = structured_rays(&id3);
        for (i, ray) in rays.iter().take(3).enumerate() {
            assert!(ray.coincides_with(&Ray::canonical_basis(3, i), 1e-12));
        }
    }

    #[test]
    fn structured_rays_straddle_the_kernel() {
        let e = diag_effect(&[1.0, 0.0]);
        let rays = structured_rays(&e);
        // Eigenvalues ascend, so eigenvectors are (e2, e1); the first
        // superposition is (e2 + e1)/sqrt(2), canonically (1, 1)/sqrt(2).
        assert!(rays.iter().any(|r| r.coincides_with(&plus_ray(), 1e-10)));
    }
}

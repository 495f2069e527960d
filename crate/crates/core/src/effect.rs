//! The effect set: validated operators `0 <= E <= I`, rays, rank-one
//! projections, Loewner comparison, weak atoms and meets with rays.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::DEFAULT_SWEEP_BUDGET;
use crate::hermitian::{eigh_with, is_psd, HermitianMatrix, SpectralDecomposition, Tolerances};

/// Components smaller than this are skipped when picking the phase anchor of
/// a ray, so eigensolver noise in an otherwise-axis vector cannot decide the
/// canonical phase.
const PHASE_ANCHOR_FLOOR: f64 = 1e-9;

/// Unit vector up to global phase.
///
/// The stored representative is canonical: unit norm, with the first
/// component of modulus above the anchor floor (`1e-9`) rotated to be real
/// and positive. Two rays describe the same rank-one projection exactly
/// when their canonical vectors agree.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    vector: DVector<Complex64>,
}

impl Ray {
    pub fn new(vector: DVector<Complex64>) -> Result<Self> {
        for (i, z) in vector.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: 0 });
            }
        }
        let norm = vector.norm();
        if norm <= f64::MIN_POSITIVE.sqrt() {
            return Err(Error::ZeroVector);
        }
        let mut v = vector.map(|z| z / norm);
        let anchor = v
            .iter()
            .position(|z| z.norm() > PHASE_ANCHOR_FLOOR)
            .expect("a unit vector has a component above the anchor floor");
        let phase = v[anchor] / v[anchor].norm();
        let phase_bar = phase.conj();
        let modulus = v[anchor].norm();
        v.apply(|z| *z *= phase_bar);
        v[anchor] = Complex64::new(modulus, 0.0);
        Ok(Self { vector: v })
    }

    pub fn from_components(components: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(components))
    }

    /// The `index`-th standard basis ray.
    pub fn canonical_basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { vector: v }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ray) -> Complex64 {
        self.vector.dotc(&other.vector)
    }

    /// Euclidean distance between canonical representatives.
    pub fn canonical_distance(&self, other: &Ray) -> f64 {
        (&self.vector - &other.vector).norm()
    }

    pub fn coincides_with(&self, other: &Ray, tol: f64) -> bool {
        self.dim() == other.dim() && self.canonical_distance(other) <= tol
    }

    /// Rank-one projector `|phi><phi|` as a raw Hermitian matrix.
    pub fn projector_matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_outer(&self.vector)
    }

    /// Components as `[re, im]` pairs, the wire format used by files and
    /// reports.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.vector.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let components: Vec<Complex64> = pairs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::from_components(&components)
    }
}

impl serde::Serialize for Ray {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Ray {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        Ray::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Scale and ray reproducing a rank-at-most-one effect as `scale * P_ray`.
#[derive(Debug, Clone)]
pub struct WeakAtomWitness {
    pub scale: f64,
    pub ray: Ray,
}

/// A Hermitian matrix validated to have spectrum in `[0, 1]`.
///
/// The spectral decomposition is computed once at construction and cached;
/// eigenvalues are clamped into `[0, 1]` after validation so the slack
/// admitted by `eps_psd` cannot leak sign errors into spectral functions.
#[derive(Debug, Clone)]
pub struct Effect {
    matrix: HermitianMatrix,
    spectral: SpectralDecomposition,
    tol: Tolerances,
    clamp_shift: f64,
}

impl Effect {
    pub fn new(matrix: HermitianMatrix, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        let sd = eigh_with(&matrix, &tol, DEFAULT_SWEEP_BUDGET)?;
        let mut worst: Option<(f64, f64)> = None; // (violation, eigenvalue)
        let mut clamp_shift = 0.0_f64;
        for &e in sd.eigenvalues() {
            let violation = (-e).max(e - 1.0);
            if violation > tol.eps_psd && worst.is_none_or(|(w, _)| violation > w) {
                worst = Some((violation, e));
            }
            clamp_shift = clamp_shift.max((e.clamp(0.0, 1.0) - e).abs());
        }
        if let Some((_, eigenvalue)) = worst {
            return Err(Error::NotAnEffect { eigenvalue });
        }
        let spectral = sd.map_eigenvalues(|e| e.clamp(0.0, 1.0));
        Ok(Self {
            matrix,
            spectral,
            tol,
            clamp_shift,
        })
    }

    pub fn identity(dim: usize, tol: Tolerances) -> Self {
        Self::new(HermitianMatrix::identity(dim), tol).expect("identity is an effect")
    }

    pub fn zero(dim: usize, tol: Tolerances) -> Self {
        Self::new(HermitianMatrix::zeros(dim), tol).expect("zero is an effect")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Clamped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectral.eigenvalues()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.min_eigenvalue()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectral.max_eigenvalue()
    }

    /// The shared zero-eigenvalue cutoff for this effect.
    pub fn zero_cutoff(&self) -> f64 {
        self.spectral.zero_cutoff(&self.tol)
    }

    /// Number of eigenvalues above the zero cutoff.
    pub fn rank(&self) -> usize {
        let cut = self.zero_cutoff();
        self.eigenvalues().iter().filter(|&&e| e > cut).count()
    }

    /// `<phi, E phi>`.
    pub fn expectation(&self, phi: &Ray) -> f64 {
        self.matrix.quadratic_form(phi.vector())
    }

    /// Largest shift applied when clamping raw eigenvalues into `[0, 1]`.
    pub fn max_clamp_shift(&self) -> f64 {
        self.clamp_shift
    }

    /// Eigenvalues all within `eps_psd` of `{0, 1}`.
    pub fn is_projection(&self) -> bool {
        self.eigenvalues()
            .iter()
            .all(|&e| e.min(1.0 - e) <= self.tol.eps_psd)
    }
}

/// Validates a Hermitian matrix as an effect.
pub fn make_effect(matrix: HermitianMatrix, tol: Tolerances) -> Result<Effect> {
    Effect::new(matrix, tol)
}

/// The rank-one projection `P_phi` as a validated effect.
pub fn ray_projector(phi: &Ray, tol: Tolerances) -> Effect {
    Effect::new(phi.projector_matrix(), tol).expect("a rank-one projector is always a valid effect")
}

/// `E <= F` in the Loewner order, i.e. `F - E` is PSD within `eps_psd`.
pub fn loewner_leq(e: &Effect, f: &Effect) -> Result<bool> {
    check_dims(e, f)?;
    is_psd(&f.matrix().sub(e.matrix()), e.tolerances())
}

/// Witness that `E` has rank at most one, if it does.
///
/// The zero effect gets the conventional witness `(0, e_1)`, which keeps the
/// operation total; any scale-zero witness reproduces it.
pub fn is_weak_atom(e: &Effect) -> Option<WeakAtomWitness> {
    let cut = e.zero_cutoff();
    let retained: Vec<usize> = (0..e.dim()).filter(|&i| e.eigenvalues()[i] > cut).collect();
    match retained.as_slice() {
        [] => Some(WeakAtomWitness {
            scale: 0.0,
            ray: Ray::canonical_basis(e.dim(), 0),
        }),
        [i] => Some(WeakAtomWitness {
            scale: e.eigenvalues()[*i],
            ray: Ray::new(e.spectral().eigenvector(*i))
                .expect("eigenvector columns are unit vectors"),
        }),
        _ => None,
    }
}

/// The meet `P_phi /\ E = strength(E, phi) * P_phi`.
pub fn meet_with_ray(e: &Effect, phi: &Ray) -> Result<Effect> {
    if e.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: phi.dim(),
        });
    }
    let lam = crate::strength::strength(e, phi)?;
    Ok(
        Effect::new(phi.projector_matrix().scaled(lam), *e.tolerances())
            .expect("a scaled rank-one projector with scale in [0,1] is an effect"),
    )
}

pub(crate) fn check_dims(e: &Effect, f: &Effect) -> Result<()> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: e.dim(),
            right: f.dim(),
        });
    }
    Ok(())
}

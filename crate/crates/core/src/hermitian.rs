//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream (effects, strengths, reconstruction) sits on the
//! primitives in this module: a Hermitian matrix type that enforces its own
//! symmetry, a cyclic Jacobi eigensolver, and the spectral functions built
//! from it (square roots, pseudo-inverses, range projectors).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar field of the Hilbert space.
pub type ComplexScalar = Complex64;

/// Sweep budget for the Jacobi eigensolver. Quadratic convergence makes this
/// generous at desk scale (d <= 64 typically converges in well under 12).
pub const DEFAULT_SWEEP_BUDGET: usize = 64;

/// Numerical slack parameters. They travel explicitly through every
/// comparison; nothing in the crate reads tolerance state from globals.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Eigensolver residual target, relative to `d * ||A||_F`.
    pub eps_spec: f64,
    /// Slack for positive-semidefiniteness tests.
    pub eps_psd: f64,
    /// Range-membership cutoff; all "is this eigenvalue zero" decisions
    /// flow through this single parameter.
    pub eps_range: f64,
    /// Final bracket width of the bisection oracle.
    pub eps_bisect: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_spec: 1e-12,
            eps_psd: 1e-10,
            eps_range: 1e-9,
            eps_bisect: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_spec", self.eps_spec),
            ("eps_psd", self.eps_psd),
            ("eps_range", self.eps_range),
            ("eps_bisect", self.eps_bisect),
        ];
        for (name, value) in fields {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidTolerance {
                    detail: format!("{name} must be strictly positive, got {value}"),
                });
            }
        }
        if self.eps_bisect < f64::EPSILON {
            return Err(Error::InvalidTolerance {
                detail: format!(
                    "eps_bisect must be at least machine epsilon ({:e}), got {:e}",
                    f64::EPSILON,
                    self.eps_bisect
                ),
            });
        }
        Ok(())
    }
}

/// Dense complex matrix with Hermitian symmetry enforced at construction.
///
/// Input is symmetrized as `(A + A*)/2`; the largest asymmetry seen while
/// doing so is kept as a diagnostic so file-level rounding noise can be
/// reported instead of silently discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: DMatrix<Complex64>,
    max_asymmetry: f64,
}

impl HermitianMatrix {
    /// Builds from an arbitrary square complex matrix, symmetrizing it.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        if dim == 0 {
            return Err(Error::Parse {
                detail: "matrix dimension must be positive".into(),
            });
        }
        for i in 0..dim {
            for j in 0..dim {
                let z = matrix[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        let mut max_asymmetry = 0.0_f64;
        let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let upper = matrix[(i, j)];
                let lower = matrix[(j, i)];
                max_asymmetry = max_asymmetry.max((upper - lower.conj()).norm());
                let sym = (upper + lower.conj()) * 0.5;
                if i == j {
                    entries[(i, i)] = Complex64::new(sym.re, 0.0);
                } else {
                    entries[(i, j)] = sym;
                    entries[(j, i)] = sym.conj();
                }
            }
        }
        Ok(Self {
            dim,
            entries,
            max_asymmetry,
        })
    }

    /// Builds from row-major entries (length must be `dim * dim`).
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Parse {
                detail: format!(
                    "expected {} entries for a {dim} x {dim} matrix, got {}",
                    dim * dim,
                    entries.len()
                ),
            });
        }
        let matrix = DMatrix::from_fn(dim, dim, |i, j| entries[i * dim + j]);
        Self::from_matrix(matrix)
    }

    /// Wraps a matrix that is Hermitian by construction, skipping checks.
    pub(crate) fn from_hermitian_unchecked(entries: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        Self {
            dim: entries.nrows(),
            entries,
            max_asymmetry: 0.0,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_hermitian_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_hermitian_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        Self::from_hermitian_unchecked(DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Rank-one matrix `v v*`.
    pub fn from_outer(v: &DVector<Complex64>) -> Self {
        let dim = v.len();
        Self::from_hermitian_unchecked(DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Largest `|A_ij - conj(A_ji)|` observed before symmetrization.
    pub fn max_asymmetry(&self) -> f64 {
        self.max_asymmetry
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "hermitian add: dimension mismatch");
        Self::from_hermitian_unchecked(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "hermitian sub: dimension mismatch");
        Self::from_hermitian_unchecked(&self.entries - &other.entries)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_hermitian_unchecked(self.entries.map(|z| z * factor))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.entries * v
    }

    /// Real quadratic form `<v, A v>`; the imaginary part is rounding noise
    /// for a Hermitian matrix and is dropped.
    pub fn quadratic_form(&self, v: &DVector<Complex64>) -> f64 {
        let av = self.apply(v);
        v.dotc(&av).re
    }

    /// Row-major `[re, im]` pairs, the wire format for files and reports.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let mut pairs = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.entries[(i, j)];
                pairs.push([z.re, z.im]);
            }
        }
        pairs
    }

    pub fn from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<Self> {
        let entries: Vec<Complex64> = pairs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::from_row_major(dim, &entries)
    }
}

/// Eigenvalues (ascending) with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, index: usize) -> DVector<Complex64> {
        DVector::from_column_slice(self.eigenvectors.column(index).as_slice())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("dim >= 1")
    }

    /// Spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// Coefficients `c_i = <v_i, x>` of a vector in the eigenbasis.
    pub fn coefficients(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self.eigenvectors.adjoint() * x
    }

    /// `V diag(e) V*`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.apply_to_eigenvalues(|e| e)
    }

    /// `V diag(f(e)) V*` as a raw matrix.
    pub fn apply_to_eigenvalues(&self, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let fe = f(e);
            for i in 0..d {
                scaled[(i, j)] *= fe;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Same eigenvectors with transformed eigenvalues.
    pub(crate) fn map_eigenvalues(mut self, f: impl Fn(f64) -> f64) -> Self {
        for e in &mut self.eigenvalues {
            *e = f(*e);
        }
        self
    }

    /// `||V* V - I||_F`, evidence that the columns stayed orthonormal.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        (self.eigenvectors.adjoint() * &self.eigenvectors - DMatrix::<Complex64>::identity(d, d))
            .norm()
    }

    /// The "eigenvalue counts as zero" threshold: `eps_range * max(1, ||A||_2)`.
    pub fn zero_cutoff(&self, tol: &Tolerances) -> f64 {
        tol.eps_range * self.spectral_norm().max(1.0)
    }
}

/// Eigendecomposition of a Hermitian matrix with the default residual target
/// and sweep budget.
pub fn eigh(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    eigh_with(a, &Tolerances::default(), DEFAULT_SWEEP_BUDGET)
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation annihilates one off-diagonal pair `(p, q)` with the unitary
/// `U = diag(1, e^{-i phi}) R(theta)`, where `phi` is the phase of `A_pq` and
/// `theta` the classical symmetric Jacobi angle for the de-phased 2x2 block.
/// Sweeps run until the off-diagonal Frobenius mass drops below
/// `eps_spec/2 * ||A||_F`; the factorization residual is then verified
/// against `eps_spec * d * ||A||_F` before returning.
pub fn eigh_with(
    a: &HermitianMatrix,
    tol: &Tolerances,
    sweep_budget: usize,
) -> Result<SpectralDecomposition> {
    let d = a.dim();
    let scale = a.frobenius_norm();
    let mut m = a.entries.clone();
    let mut v = DMatrix::<Complex64>::identity(d, d);

    if scale > 0.0 {
        let target = 0.5 * tol.eps_spec * scale;
        let mut converged = false;
        let mut last_off = 0.0;
        for sweep in 0..=sweep_budget {
            let mut off_sq = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    off_sq += 2.0 * m[(p, q)].norm_sqr();
                }
            }
            last_off = off_sq.sqrt();
            if last_off <= target {
                converged = true;
                break;
            }
            if sweep == sweep_budget {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = m[(p, q)];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let phase = apq / mag; // e^{i phi}
                    let phase_bar = phase.conj();
                    let app = m[(p, p)].re;
                    let aqq = m[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // Two-sided update; rows follow columns by conjugation.
                    for k in 0..d {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = m[(k, p)];
                        let akq = m[(k, q)];
                        let new_kp = akp * c - akq * (phase_bar * s);
                        let new_kq = akp * s + akq * (phase_bar * c);
                        m[(k, p)] = new_kp;
                        m[(k, q)] = new_kq;
                        m[(p, k)] = new_kp.conj();
                        m[(q, k)] = new_kq.conj();
                    }
                    m[(p, p)] = Complex64::new(app - t * mag, 0.0);
                    m[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                    m[(p, q)] = Complex64::new(0.0, 0.0);
                    m[(q, p)] = Complex64::new(0.0, 0.0);

                    for k in 0..d {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * (phase_bar * s);
                        v[(k, q)] = vkp * s + vkq * (phase_bar * c);
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                sweeps: sweep_budget,
                off_norm: last_off,
            });
        }
    }

    // Stable ascending sort keeps degenerate eigenvectors in index order.
    let raw: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let eigenvectors = DMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);

    let sd = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let residual = (sd.reconstruct() - &a.entries).norm();
    let bound = tol.eps_spec * d as f64 * scale.max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(Error::NonConvergence {
            sweeps: sweep_budget,
            off_norm: residual,
        });
    }
    Ok(sd)
}

/// Smallest eigenvalue of `A`.
pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(a)?.min_eigenvalue())
}

/// `A >= -eps_psd` in the semidefinite sense.
pub fn is_psd(a: &HermitianMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(min_eigenvalue(a)? >= -tol.eps_psd)
}

/// `V diag(g(e)) V*` with `g(e) = f(e)` for `e > zero_cut` and `0`
/// otherwise: the pseudo-inverse convention for spectral functions.
pub fn spectral_function(
    a: &HermitianMatrix,
    f: impl Fn(f64) -> f64,
    zero_cut: f64,
) -> Result<HermitianMatrix> {
    let sd = eigh(a)?;
    for &e in sd.eigenvalues() {
        if e > zero_cut && !f(e).is_finite() {
            return Err(Error::DomainError { eigenvalue: e });
        }
    }
    let raw = sd.apply_to_eigenvalues(|e| if e > zero_cut { f(e) } else { 0.0 });
    HermitianMatrix::from_matrix(raw)
}

/// Orthogonal projector onto the span of eigenvectors above `zero_cut`.
pub fn range_projector(a: &HermitianMatrix, zero_cut: f64) -> Result<HermitianMatrix> {
    spectral_function(a, |_| 1.0, zero_cut)
}

//! Dense complex-matrix primitives for finite-dimensional quantum states.
//!
//! Composite systems use the system-first convention throughout: the joint
//! index of `|i_S⟩ ⊗ |i_B⟩` is `i_S * d_B + i_B`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity tolerance (absolute, on the largest entry deviation).
pub const EPS_HERM: f64 = 1e-10;
/// Unit-trace tolerance.
pub const EPS_TRACE: f64 = 1e-10;
/// Most negative eigenvalue still accepted (and clamped) for a state.
pub const EPS_PSD: f64 = 1e-9;
/// Relative tolerance for eigen-residuals and orthonormality.
pub const EPS_EIG: f64 = 1e-10;
/// Unit-norm tolerance for pure states.
pub const EPS_NORM: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dimensions of a bipartite system–bath Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    system: usize,
    bath: usize,
}

impl BipartiteDims {
    pub fn new(system: usize, bath: usize) -> Result<Self> {
        if system < 2 {
            return Err(Error::InvalidParameter(format!(
                "system dimension must be at least 2, got {system}"
            )));
        }
        if bath < 1 {
            return Err(Error::InvalidParameter("bath dimension must be at least 1".into()));
        }
        Ok(Self { system, bath })
    }

    pub fn system(&self) -> usize {
        self.system
    }

    pub fn bath(&self) -> usize {
        self.bath
    }

    pub fn total(&self) -> usize {
        self.system * self.bath
    }

    /// Joint basis index of `|s⟩ ⊗ |b⟩`.
    pub fn joint(&self, s: usize, b: usize) -> usize {
        s * self.bath + b
    }
}

fn expect_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`, first factor outermost.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `tr_B M` for an operator on the joint space.
pub fn partial_trace_bath(m: &CMatrix, dims: BipartiteDims) -> Result<CMatrix> {
    expect_square(m, dims.total())?;
    let (ds, db) = (dims.system(), dims.bath());
    Ok(CMatrix::from_fn(ds, ds, |i, j| {
        (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
    }))
}

/// `tr_S M` for an operator on the joint space.
pub fn partial_trace_system(m: &CMatrix, dims: BipartiteDims) -> Result<CMatrix> {
    expect_square(m, dims.total())?;
    let (ds, db) = (dims.system(), dims.bath());
    Ok(CMatrix::from_fn(db, db, |i, j| {
        (0..ds).map(|k| m[(k * db + i, k * db + j)]).sum()
    }))
}

/// Largest absolute entry of `M - M†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: CMatrix,
}

impl Eigensystem {
    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&e| c(e, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigensystem(h: &CMatrix) -> Result<Eigensystem> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let dev = hermiticity_deviation(h);
    if dev > EPS_HERM * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let eig = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, ascending. Input is symmetrized without validation.
pub(crate) fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 2 {
        let a = h[(0, 0)].re;
        let d = h[(1, 1)].re;
        let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean - radius, mean + radius];
    }
    let mut v: Vec<f64> = hermitian_part(h).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Trace norm `Σ|λ|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// `√tr(M†M)`.
pub fn hilbert_schmidt_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes `amplitudes`; fails only for the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes / c(norm, 0.0)))
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn projector(&self) -> CMatrix {
        &self.0 * self.0.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.projector())
    }
}

/// Positive, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    clamped: bool,
}

impl DensityMatrix {
    /// Validates `matrix` as a state. Eigenvalues in `[-EPS_PSD, 0)` are
    /// clamped to zero and the result renormalized; `was_clamped` records it.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = hermiticity_deviation(&matrix);
        if dev > EPS_HERM {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > EPS_TRACE || trace.im.abs() > EPS_TRACE {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let herm = hermitian_part(&matrix);
        let eig = herm.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EPS_PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        if min < 0.0 {
            log::warn!("clamping negative state eigenvalue {min:e}");
            let vals = eig.eigenvalues.map(|l| l.max(0.0));
            let total: f64 = vals.iter().sum();
            let d = CMatrix::from_diagonal(&vals.map(|l| c(l / total, 0.0)));
            let m = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
            return Ok(Self {
                matrix: hermitian_part(&m),
                clamped: true,
            });
        }
        Ok(Self {
            matrix: herm,
            clamped: false,
        })
    }

    /// Wraps a matrix already known to be a state (output of a CPTP map).
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
            clamped: false,
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|&p| p < -EPS_PSD || !p.is_finite()) {
            return Err(Error::InvalidParameter("probabilities must be nonnegative".into()));
        }
        if (total - 1.0).abs() > EPS_TRACE {
            return Err(Error::NotUnitTrace { trace: total });
        }
        Ok(Self::from_matrix_unchecked(CMatrix::from_diagonal(
            &CVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p.max(0.0), 0.0))),
        )))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0))
    }

    /// `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        PureState::basis(dim, k).to_density()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_matrix_unchecked(tensor_product(&self.matrix, &other.matrix))
    }

    pub fn reduce_to_system(&self, dims: BipartiteDims) -> Result<DensityMatrix> {
        Ok(Self::from_matrix_unchecked(partial_trace_bath(&self.matrix, dims)?))
    }

    pub fn reduce_to_bath(&self, dims: BipartiteDims) -> Result<DensityMatrix> {
        Ok(Self::from_matrix_unchecked(partial_trace_system(&self.matrix, dims)?))
    }

    /// `p ρ + (1 - p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("mixing weight {p} outside [0, 1]")));
        }
        Ok(Self::from_matrix_unchecked(
            &self.matrix * c(p, 0.0) + &other.matrix * c(1.0 - p, 0.0),
        ))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        expect_square(u, self.dim())?;
        Ok(Self::from_matrix_unchecked(u * &self.matrix * u.adjoint()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `½ Σ |λ(ρ₁ - ρ₂)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(0.5 * trace_norm_hermitian(&(a.matrix() - b.matrix())))
}

/// `tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `1 / tr ρ²`.
pub fn effective_dimension(rho: &DensityMatrix) -> f64 {
    1.0 / purity(rho)
}

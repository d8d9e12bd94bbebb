//! Linear maps on system operators, stored as dense matrices acting on
//! column-stacked operators: `vec(X)[i + j*d] = X[i, j]`.

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigenvalues, hilbert_schmidt_norm, tensor_product, CMatrix, CVector, DensityMatrix,
};

/// Default tolerance for trace preservation and Hermiticity preservation.
pub const EPS_MAP: f64 = 1e-10;
/// Default convergence threshold for [`Superoperator::power_limit`].
pub const EPS_CONV: f64 = 1e-12;
/// Default number of squarings in [`Superoperator::power_limit`].
pub const MAX_DOUBLINGS: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

/// Outcome of iterating a map to its infinite power.
#[derive(Debug, Clone)]
pub struct PowerLimit {
    pub limit: Superoperator,
    pub converged: bool,
    /// Number of squarings performed; the returned map is `Φ^(2^doublings)`.
    pub doublings: u32,
}

/// Complete positivity and trace preservation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub min_choi_eigenvalue: f64,
    pub trace_deviation: f64,
}

impl CptpReport {
    pub fn is_cptp(&self, eps: f64) -> bool {
        self.min_choi_eigenvalue >= -eps && self.trace_deviation <= eps
    }
}

fn vec_operator(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

fn unvec_operator(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Matrix unit `|i⟩⟨j|`.
pub fn matrix_unit(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = c(1.0, 0.0);
    m
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Builds the matrix of `f` column by column from its action on `|i⟩⟨j|`.
    pub fn from_action<F>(dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&CMatrix) -> Result<CMatrix>,
    {
        let n = dim * dim;
        let mut matrix = CMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let image = f(&matrix_unit(dim, i, j))?;
                if image.nrows() != dim || image.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: image.nrows(),
                    });
                }
                matrix.set_column(i + j * dim, &vec_operator(&image));
            }
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `X ↦ tr(X) ρ`.
    pub fn constant(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        Self::from_action(dim, |x| Ok(rho.matrix() * x.trace())).expect("square action")
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        Self::from_action(u.nrows(), |x| Ok(u * x * u.adjoint()))
    }

    /// `X ↦ Xᵀ`; positive but not completely positive.
    pub fn transpose(dim: usize) -> Self {
        Self::from_action(dim, |x| Ok(x.transpose())).expect("square action")
    }

    /// Complete dephasing in the orthonormal basis given by the columns of `basis`.
    pub fn dephasing(basis: &CMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.nrows(),
                cols: basis.ncols(),
            });
        }
        let dim = basis.nrows();
        Self::from_action(dim, |x| {
            let mut out = CMatrix::zeros(dim, dim);
            for k in 0..dim {
                let v = basis.column(k);
                let weight = (v.adjoint() * x * v)[(0, 0)];
                out += v * v.adjoint() * weight;
            }
            Ok(out)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Action on an arbitrary operator.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.nrows().max(x.ncols()),
            });
        }
        Ok(unvec_operator(&(&self.matrix * vec_operator(x)), self.dim))
    }

    /// Action on a state. The map is assumed CPTP; the result is not revalidated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(self.apply_operator(rho.matrix())?))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Superoperator) -> Result<Superoperator> {
        self.check_dim(inner.dim)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn power(&self, k: u32) -> Superoperator {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result.matrix = &result.matrix * &base.matrix;
            }
            base.matrix = &base.matrix * &base.matrix;
            k >>= 1;
        }
        result
    }

    /// Hilbert–Schmidt distance between the two matrix representations.
    pub fn distance(&self, other: &Superoperator) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(hilbert_schmidt_norm(&(&self.matrix - &other.matrix)))
    }

    /// Largest deviation of `tr Φ(|i⟩⟨j|)` from `δ_ij`.
    pub fn trace_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let col = i + j * d;
                let tr: crate::linalg::C64 = (0..d).map(|k| self.matrix[(k + k * d, col)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - c(want, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_trace_preserving(&self, eps: f64) -> bool {
        self.trace_deviation() <= eps
    }

    /// Largest deviation of `Φ(X†)` from `Φ(X)†` over matrix units.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let a = self.apply_operator(&matrix_unit(d, i, j)).expect("dims match");
                let b = self.apply_operator(&matrix_unit(d, j, i)).expect("dims match");
                worst = worst.max((a - b.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Normalized Choi state `(1/d) Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, reference factor first.
    pub fn choi_matrix(&self) -> CMatrix {
        let d = self.dim;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let image = self.apply_operator(&matrix_unit(d, i, j)).expect("dims match");
                choi += tensor_product(&matrix_unit(d, i, j), &image);
            }
        }
        choi / c(d as f64, 0.0)
    }

    pub fn cptp_report(&self) -> CptpReport {
        let choi = self.choi_matrix();
        let min_choi_eigenvalue = hermitian_eigenvalues(&choi)[0];
        let d = self.dim;
        let reduced = CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| choi[(i * d + k, j * d + k)]).sum());
        let target = CMatrix::identity(self.dim, self.dim) / c(self.dim as f64, 0.0);
        let trace_deviation = (reduced - target).iter().map(|z| z.norm()).fold(0.0, f64::max);
        CptpReport {
            min_choi_eigenvalue,
            trace_deviation,
        }
    }

    pub fn is_cptp(&self, eps: f64) -> bool {
        self.cptp_report().is_cptp(eps)
    }

    /// `lim Φ^k` by repeated squaring, stopping once `‖Φ^(k+1) - Φ^k‖_HS ≤ eps_conv`
    /// with `k = 2^doublings`.
    pub fn power_limit(&self, eps_conv: f64, max_doublings: u32) -> Result<PowerLimit> {
        let dev = self.trace_deviation();
        if dev > EPS_MAP {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        let mut current = self.clone();
        let mut doublings = 0;
        loop {
            let next = self.compose(&current)?;
            let step = hilbert_schmidt_norm(&(&next.matrix - &current.matrix));
            if step <= eps_conv {
                return Ok(PowerLimit {
                    limit: current,
                    converged: true,
                    doublings,
                });
            }
            if doublings >= max_doublings || !step.is_finite() {
                return Ok(PowerLimit {
                    limit: current,
                    converged: false,
                    doublings,
                });
            }
            current = current.compose(&current)?;
            doublings += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn identity_choi_is_maximally_entangled_projector() {
        let id = Superoperator::identity(2);
        let choi = id.choi_matrix();
        let mut omega = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            omega[(i, j)] = c(0.5, 0.0);
        }
        assert!((choi - omega).norm() < 1e-15);
        assert!(id.is_cptp(1e-12));
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        for d in 2..=4 {
            let t = Superoperator::transpose(d);
            let report = t.cptp_report();
            assert_abs_diff_eq!(report.min_choi_eigenvalue, -1.0 / d as f64, epsilon = 1e-12);
            assert!(report.trace_deviation < 1e-15);
            assert!(!t.is_cptp(1e-9));
        }
    }

    #[test]
    fn compose_with_identity() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let k = Superoperator::constant(&rho);
        assert_eq!(k.compose(&Superoperator::identity(2)).unwrap(), k);
        assert!(k.compose(&Superoperator::identity(3)).is_err());
    }

    #[test]
    fn constant_map_limit_is_immediate() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let k = Superoperator::constant(&rho);
        let lim = k.power_limit(EPS_CONV, MAX_DOUBLINGS).unwrap();
        assert!(lim.converged);
        assert_eq!(lim.doublings, 0);
        assert!(lim.limit.distance(&k).unwrap() < 1e-15);
    }

    #[test]
    fn unitary_conjugation_has_no_limit() {
        let flip = Superoperator::unitary(&pauli_x()).unwrap();
        let lim = flip.power_limit(EPS_CONV, MAX_DOUBLINGS).unwrap();
        assert!(!lim.converged);
        assert_eq!(lim.doublings, MAX_DOUBLINGS);
    }

    #[test]
    fn power_limit_rejects_non_trace_preserving() {
        let m = Superoperator::from_matrix(2, CMatrix::identity(4, 4) * c(0.5, 0.0)).unwrap();
        assert!(matches!(
            m.power_limit(EPS_CONV, 4),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn power_by_squaring_matches_repeated_composition() {
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)],
        );
        let phi = Superoperator::unitary(&u).unwrap();
        let mut slow = Superoperator::identity(2);
        for _ in 0..7 {
            slow = phi.compose(&slow).unwrap();
        }
        assert!(phi.power(7).distance(&slow).unwrap() < 1e-13);
    }

    #[test]
    fn dephasing_kills_coherences() {
        let deph = Superoperator::dephasing(&CMatrix::identity(3, 3)).unwrap();
        let x = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let y = deph.apply_operator(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { x[(i, i)] } else { c(0.0, 0.0) };
                assert_eq!(y[(i, j)], want);
            }
        }
        assert!(deph.is_cptp(1e-12));
        assert!(deph.hermiticity_deviation() < 1e-15);
    }
}

//! Hamiltonians diagonal in a product basis,
//! `H = Σ E_{k₁k₂} |E_{k₁}⟩⟨E_{k₁}| ⊗ |E_{k₂}⟩⟨E_{k₂}|`.
//!
//! Every system projector `|E_{k₁}⟩⟨E_{k₁}| ⊗ 1` is conserved, so the
//! averaging map is complete dephasing in the system basis and idempotent.

use crate::averaging::{EnergyEigensystem, DEFAULT_REL_EPS_DEG};
use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteDims, CMatrix, CVector, EPS_EIG};
use crate::superop::Superoperator;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasisModel {
    dims: BipartiteDims,
    system_basis: CMatrix,
    bath_basis: CMatrix,
    /// `E_{k₁k₂}` stored row-major, `k₁ * d_B + k₂`.
    energies: Vec<f64>,
}

fn check_unitary(u: &CMatrix, what: &str) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let n = u.nrows();
    let dev = (u.adjoint() * u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > EPS_EIG * n as f64 {
        return Err(Error::InvalidParameter(format!("{what} basis is not orthonormal ({dev:e})")));
    }
    Ok(())
}

impl ProductBasisModel {
    /// `energies[k₁][k₂] = E_{k₁k₂}`. Fails if two joint levels with
    /// different system labels coincide within `1e-9 · max|E|`; such a
    /// coincidence lets the average mix system basis states.
    pub fn new(system_basis: CMatrix, bath_basis: CMatrix, energies: &[Vec<f64>]) -> Result<Self> {
        check_unitary(&system_basis, "system")?;
        check_unitary(&bath_basis, "bath")?;
        let dims = BipartiteDims::new(system_basis.nrows(), bath_basis.nrows())?;
        if energies.len() != dims.system() {
            return Err(Error::DimensionMismatch {
                expected: dims.system(),
                found: energies.len(),
            });
        }
        if let Some(row) = energies.iter().find(|r| r.len() != dims.bath()) {
            return Err(Error::DimensionMismatch {
                expected: dims.bath(),
                found: row.len(),
            });
        }
        let flat: Vec<f64> = energies.iter().flatten().copied().collect();
        let scale = flat.iter().map(|e| e.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let eps = DEFAULT_REL_EPS_DEG * scale;
        for (a, row_a) in energies.iter().enumerate() {
            for (b, row_b) in energies.iter().enumerate().skip(a + 1) {
                if row_a.iter().any(|x| row_b.iter().any(|y| (x - y).abs() <= eps)) {
                    return Err(Error::DegenerateSystemEnergies(a, b));
                }
            }
        }
        Ok(Self {
            dims,
            system_basis,
            bath_basis,
            energies: flat,
        })
    }

    /// Noninteracting `H_S ⊗ 1 + 1 ⊗ H_B` in the computational bases.
    pub fn uncoupled(system_energies: &[f64], bath_energies: &[f64]) -> Result<Self> {
        let energies: Vec<Vec<f64>> = system_energies
            .iter()
            .map(|es| bath_energies.iter().map(|eb| es + eb).collect())
            .collect();
        let ds = system_energies.len();
        let db = bath_energies.len();
        Self::new(CMatrix::identity(ds, ds), CMatrix::identity(db, db), &energies)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn system_basis(&self) -> &CMatrix {
        &self.system_basis
    }

    pub fn bath_basis(&self) -> &CMatrix {
        &self.bath_basis
    }

    fn product_vectors(&self) -> CMatrix {
        self.system_basis.kronecker(&self.bath_basis)
    }

    pub fn hamiltonian(&self) -> CMatrix {
        let v = self.product_vectors();
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|&e| c(e, 0.0)),
        ));
        &v * d * v.adjoint()
    }

    /// Eigensystem with exact product eigenvectors.
    pub fn eigensystem(&self) -> Result<EnergyEigensystem> {
        EnergyEigensystem::from_parts(self.dims, &self.energies, &self.product_vectors(), None)
    }

    /// Dephasing in `{|E_{k₁}⟩}`.
    pub fn averaging_map(&self) -> Superoperator {
        Superoperator::dephasing(&self.system_basis).expect("square basis")
    }
}

/// Builds the eigensystem and the (closed-form) averaging map of a product-basis model.
pub fn product_basis_model(model: &ProductBasisModel) -> Result<(EnergyEigensystem, Superoperator)> {
    Ok((model.eigensystem()?, model.averaging_map()))
}

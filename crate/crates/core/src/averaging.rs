//! Infinite-time averaging of the total dynamics and the induced reduced map.
//!
//! The total average `Ū` dephases a joint state in the energy eigenbasis. For
//! a degenerate level the projector `P` onto its eigenspace replaces the
//! rank-one projector, so `Ū ρ = Σ_j P_j ρ P_j`. The reduced average is
//! `Λ̄ ρ_S = tr_B Ū(ρ_S ⊗ ρ_B)`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigensystem, partial_trace_bath, BipartiteDims, CMatrix, DensityMatrix, C64,
};
use crate::superop::Superoperator;

/// Relative degeneracy threshold used when none is supplied.
pub const DEFAULT_REL_EPS_DEG: f64 = 1e-9;
/// Relative gap-coincidence threshold used when none is supplied.
pub const DEFAULT_REL_EPS_GAP: f64 = 1e-9;
/// Cap on the number of coincident-gap quadruples listed in a [`GapReport`].
pub const MAX_REPORTED_QUADRUPLES: usize = 1000;

/// Spectrum of a joint Hamiltonian with degenerate levels grouped.
#[derive(Debug, Clone)]
pub struct EnergyEigensystem {
    dims: BipartiteDims,
    energies: Vec<f64>,
    vectors: CMatrix,
    clusters: Vec<Range<usize>>,
    scale: f64,
}

impl EnergyEigensystem {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// Ascending energies.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, aligned with [`Self::energies`].
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Contiguous index ranges of degenerate levels.
    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.clusters.iter().all(|r| r.len() == 1)
    }

    /// Largest absolute energy, used to scale default tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Smallest positive difference between distinct cluster energies.
    pub fn smallest_gap(&self) -> Option<f64> {
        self.clusters
            .windows(2)
            .map(|w| self.energies[w[1].start] - self.energies[w[0].end - 1])
            .filter(|g| *g > 0.0)
            .min_by(f64::total_cmp)
    }

    fn check_joint(&self, m: &CMatrix) -> Result<()> {
        let d = self.dims.total();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }

    /// `Ū M` for an arbitrary joint operator.
    pub fn average_operator(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_joint(m)?;
        let mut inner = self.vectors.adjoint() * m * &self.vectors;
        let mut label = vec![0usize; self.energies.len()];
        for (j, r) in self.clusters.iter().enumerate() {
            for k in r.clone() {
                label[k] = j;
            }
        }
        for col in 0..inner.ncols() {
            for row in 0..inner.nrows() {
                if label[row] != label[col] {
                    inner[(row, col)] = c(0.0, 0.0);
                }
            }
        }
        Ok(&self.vectors * inner * self.vectors.adjoint())
    }

    /// `e^{-iHt} M e^{iHt}`.
    pub fn evolve_operator(&self, m: &CMatrix, t: f64) -> Result<CMatrix> {
        self.check_joint(m)?;
        let phases: Vec<C64> = self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
        let mut inner = self.vectors.adjoint() * m * &self.vectors;
        for col in 0..inner.ncols() {
            for row in 0..inner.nrows() {
                inner[(row, col)] *= phases[row] * phases[col].conj();
            }
        }
        Ok(&self.vectors * inner * self.vectors.adjoint())
    }
}

impl EnergyEigensystem {
    /// Assembles an eigensystem from known eigenpairs (columns of `vectors`),
    /// sorting by energy and clustering with `eps_deg` (default `1e-9 · max|E|`).
    pub fn from_parts(
        dims: BipartiteDims,
        energies: &[f64],
        vectors: &CMatrix,
        eps_deg: Option<f64>,
    ) -> Result<Self> {
        let d = dims.total();
        if energies.len() != d || vectors.nrows() != d || vectors.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: energies.len(),
            });
        }
        let overlap = vectors.adjoint() * vectors - CMatrix::identity(d, d);
        let worst = overlap.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if worst > crate::linalg::EPS_EIG * (d as f64).max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "eigenvectors are not orthonormal (deviation {worst:e})"
            )));
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let sorted: Vec<f64> = order.iter().map(|&k| energies[k]).collect();
        let vectors = CMatrix::from_fn(d, d, |i, j| vectors[(i, order[j])]);
        let scale = sorted.iter().map(|e| e.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let eps = eps_deg.unwrap_or(DEFAULT_REL_EPS_DEG * scale);
        let clusters = cluster_energies(&sorted, eps);
        Ok(Self {
            dims,
            energies: sorted,
            vectors,
            clusters,
            scale,
        })
    }
}

fn cluster_energies(energies: &[f64], eps: f64) -> Vec<Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..=energies.len() {
        if k == energies.len() || energies[k] - energies[k - 1] > eps {
            clusters.push(start..k);
            start = k;
        }
    }
    clusters
}

/// Diagonalizes `h` and groups levels by single linkage with threshold
/// `eps_deg` (default `1e-9 · max|E|`).
pub fn build_eigensystem(h: &CMatrix, dims: BipartiteDims, eps_deg: Option<f64>) -> Result<EnergyEigensystem> {
    if h.nrows() != dims.total() || h.ncols() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: h.nrows().max(h.ncols()),
        });
    }
    let es = hermitian_eigensystem(h)?;
    let scale = es.values.iter().map(|e| e.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = eps_deg.unwrap_or(DEFAULT_REL_EPS_DEG * scale);
    let clusters = cluster_energies(&es.values, eps);
    Ok(EnergyEigensystem {
        dims,
        energies: es.values,
        vectors: es.vectors,
        clusters,
        scale,
    })
}

/// Result of scanning a spectrum for coincident energy gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub nondegenerate_gaps: bool,
    /// Up to [`MAX_REPORTED_QUADRUPLES`] index quadruples `(k, k', j, j')`
    /// with `|(E_k - E_k') - (E_j - E_j')| ≤ ε_gap`.
    pub offending: Vec<(usize, usize, usize, usize)>,
    /// Total number of coincidences found, including unlisted ones.
    pub count: usize,
}

/// Checks that `E_k - E_k' = E_j - E_j'` only for trivially equal index pairs.
///
/// Works on sorted pairwise differences, `O(d² log d)` plus the number of hits.
/// A degenerate level counts as a coincidence with the zero gap `(j, j)`.
pub fn check_nondegenerate_gaps(es: &EnergyEigensystem, eps_gap: Option<f64>) -> GapReport {
    let eps = eps_gap.unwrap_or(DEFAULT_REL_EPS_GAP * es.scale());
    let e = &es.energies;
    let n = e.len();
    let mut offending = Vec::new();
    let mut count = 0usize;
    let mut record = |q: (usize, usize, usize, usize)| {
        count += 1;
        if offending.len() < MAX_REPORTED_QUADRUPLES {
            offending.push(q);
        }
    };
    // ordered pairs with k' < k give nonnegative gaps; negative gaps mirror them
    let mut gaps: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for k in 0..n {
        for kp in 0..k {
            gaps.push((e[k] - e[kp], k, kp));
        }
    }
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, k, kp) in gaps.iter().take_while(|g| g.0 <= eps) {
        record((k, kp, k, k));
    }
    for i in 0..gaps.len() {
        let (gi, k, kp) = gaps[i];
        for &(_, j, jp) in gaps[i + 1..].iter().take_while(|x| x.0 - gi <= eps) {
            record((k, kp, j, jp));
        }
    }
    GapReport {
        nondegenerate_gaps: count == 0,
        offending,
        count,
    }
}

/// `Ū ρ_SB`.
pub fn total_average(rho_sb: &DensityMatrix, es: &EnergyEigensystem) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(es.average_operator(rho_sb.matrix())?))
}

/// `e^{-iHt} ρ_SB e^{iHt}`.
pub fn unitary_evolve(rho_sb: &DensityMatrix, es: &EnergyEigensystem, t: f64) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(es.evolve_operator(rho_sb.matrix(), t)?))
}

/// The reduced time-averaging map `ρ_S ↦ tr_B Ū(ρ_S ⊗ ρ_B)`.
pub fn reduced_average_map(rho_b: &DensityMatrix, es: &EnergyEigensystem) -> Result<Superoperator> {
    let dims = es.dims();
    if rho_b.dim() != dims.bath() {
        return Err(Error::DimensionMismatch {
            expected: dims.bath(),
            found: rho_b.dim(),
        });
    }
    Superoperator::from_action(dims.system(), |x| {
        let joint = x.kronecker(rho_b.matrix());
        partial_trace_bath(&es.average_operator(&joint)?, dims)
    })
}

/// Reduced trajectory `ρ_S(t) = Σ_{kk'} e^{-i(E_k - E_k')t} c_{kk'} tr_B |E_k⟩⟨E_k'|`
/// with the partial traces precomputed, for repeated evaluation at many times.
#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    d_s: usize,
    energies: Vec<f64>,
    /// `c_{kk'} tr_B |E_k⟩⟨E_k'|`, flattened as `[(k * d + k') * d_s² + a * d_s + b]`.
    weighted_blocks: Vec<C64>,
}

impl ReducedTrajectory {
    pub fn new(rho_sb: &DensityMatrix, es: &EnergyEigensystem) -> Result<Self> {
        es.check_joint(rho_sb.matrix())?;
        let dims = es.dims();
        let (d, ds, db) = (dims.total(), dims.system(), dims.bath());
        let v = es.vectors();
        let coeffs = v.adjoint() * rho_sb.matrix() * v;
        let mut weighted_blocks = vec![c(0.0, 0.0); d * d * ds * ds];
        for k in 0..d {
            for kp in 0..d {
                let ck = coeffs[(k, kp)];
                if ck.norm() == 0.0 {
                    continue;
                }
                let base = (k * d + kp) * ds * ds;
                for a in 0..ds {
                    for b in 0..ds {
                        let s: C64 = (0..db).map(|m| v[(a * db + m, k)] * v[(b * db + m, kp)].conj()).sum();
                        weighted_blocks[base + a * ds + b] = ck * s;
                    }
                }
            }
        }
        Ok(Self {
            d_s: ds,
            energies: es.energies().to_vec(),
            weighted_blocks,
        })
    }

    pub fn state_at(&self, t: f64) -> DensityMatrix {
        let d = self.energies.len();
        let ds = self.d_s;
        let phases: Vec<C64> = self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
        let mut acc = vec![c(0.0, 0.0); ds * ds];
        for k in 0..d {
            for kp in 0..d {
                let ph = phases[k] * phases[kp].conj();
                let base = (k * d + kp) * ds * ds;
                for (slot, w) in acc.iter_mut().zip(&self.weighted_blocks[base..base + ds * ds]) {
                    *slot += ph * w;
                }
            }
        }
        DensityMatrix::from_matrix_unchecked(CMatrix::from_row_slice(ds, ds, &acc))
    }
}

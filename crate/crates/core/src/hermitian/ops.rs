use num_complex::Complex64;

use super::eigen::jacobi;
use super::matrix::ComplexMatrix;
use super::states::{DensityMatrix, HermitianObservable};
use crate::error::{check_dim, Result};

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`, in `[0, 1]`.
///
/// Computed as the nuclear norm of `√ρ √σ`, read off the spectrum of the
/// Hermitian dilation `[[0, A], [A†, 0]]`. This avoids the square root of
/// near-zero eigenvalues of `√ρ σ √ρ`, which would otherwise inflate
/// rounding noise to `O(√ε)` for low-rank inputs.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let a = &rho.sqrt() * &sigma.sqrt();
    let n = a.rows();
    let mut dil = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            dil[(i, n + j)] = a[(i, j)];
            dil[(n + j, i)] = a[(i, j)].conj();
        }
    }
    let e = jacobi(&dil);
    let nuclear = 0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>();
    Ok(nuclear.clamp(0.0, 1.0))
}

/// Unnormalized trace distance `‖ρ − σ‖₁`, in `[0, 2]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let e = jacobi(&(rho.matrix() - sigma.matrix()));
    Ok(e.values.iter().map(|x| x.abs()).sum())
}

/// Which factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    (da, db): (usize, usize),
    keep: Keep,
) -> Result<ComplexMatrix> {
    check_dim(da * db, m.rows())?;
    check_dim(da * db, m.cols())?;
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    })
}

/// Reduced state on the kept factor.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Keep,
) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_numerical(partial_trace_matrix(
        rho.matrix(),
        dims,
        keep,
    )?))
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Resource-destroying map `Σ_E Π_E ρ Π_E` over eigenspaces of `H`.
pub fn dephase(rho: &DensityMatrix, h: &HermitianObservable) -> Result<DensityMatrix> {
    check_dim(rho.dim(), h.dim())?;
    Ok(DensityMatrix::from_numerical(dephase_matrix(
        rho.matrix(),
        h,
    )))
}

pub(crate) fn dephase_matrix(m: &ComplexMatrix, h: &HermitianObservable) -> ComplexMatrix {
    // Work in the eigenbasis, zero cross-eigenspace blocks, rotate back.
    let v = h.eigenvectors();
    let mut mm = &(&v.adjoint() * m) * v;
    let label = eigenspace_labels(h);
    let n = m.rows();
    for i in 0..n {
        for j in 0..n {
            if label[i] != label[j] {
                mm[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    &(v * &mm) * &v.adjoint()
}

/// Eigenspace index of each eigenvector column.
pub(crate) fn eigenspace_labels(h: &HermitianObservable) -> Vec<usize> {
    let mut label = vec![0; h.dim()];
    for (s, space) in h.eigenspaces().iter().enumerate() {
        for &i in &space.indices {
            label[i] = s;
        }
    }
    label
}

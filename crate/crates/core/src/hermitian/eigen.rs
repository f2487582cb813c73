//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies
//! the classical real Jacobi rotation, so the combined transform is the
//! unitary `J = D R D†` with `D = diag(1, e^{-iφ})` on the `(p, q)` plane.
//! Slower than Householder + QR for large n, but deterministic and
//! accurate to a few ulps in the eigenvalues, which is what the
//! downstream identities need.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::config::TOL;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let r = m.hermiticity_residual();
    if r > TOL.tol_herm * m.max_abs().max(1.0) {
        return Err(Error::NonHermitian(r));
    }
    Ok(jacobi(&m.hermitian_part()))
}

/// Jacobi on an already Hermitian matrix; no validation.
pub(crate) fn jacobi(m: &ComplexMatrix) -> Eigen {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let total: f64 = a.frobenius_norm();
    if n > 1 && total > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= f64::EPSILON * 1e-2 * total {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigen { values, vectors }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots that are already below rounding relative to the diagonal.
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let e = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let se = e * s;
    let n = a.rows();
    // A <- A J, columns p and q.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * se.conj();
        a[(k, q)] = akp * se + akq * c;
    }
    // A <- J† A, rows p and q.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * se;
        a[(q, k)] = apk * se.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * se.conj();
        v[(k, q)] = vkp * se + vkq * c;
    }
}

impl Eigen {
    /// `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Max-abs residual of `V Λ V† − M`.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        (&self.map_spectrum(|x| x) - m).max_abs()
    }

    /// Groups ascending eigenvalues closer than `cutoff` into eigenspaces.
    pub fn eigenspaces(&self, cutoff: f64) -> Vec<Eigenspace> {
        group_levels(&self.values, cutoff)
            .into_iter()
            .map(|idx| {
                let value = idx.iter().map(|&i| self.values[i]).sum::<f64>() / idx.len() as f64;
                Eigenspace {
                    value,
                    indices: idx,
                }
            })
            .collect()
    }

    /// Projector onto the span of the given eigenvector columns.
    pub fn projector(&self, indices: &[usize]) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for &k in indices {
            for i in 0..n {
                let vik = self.vectors[(i, k)];
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// One eigenspace: mean eigenvalue and the columns spanning it.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: f64,
    pub indices: Vec<usize>,
}

/// Chains consecutive sorted values closer than `cutoff`.
pub(crate) fn group_levels(sorted: &[f64], cutoff: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (x - sorted[*g.last().unwrap()]).abs() <= cutoff => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::c64;
    use crate::random::{random_hermitian, rng_from_seed};

    fn unitarity_residual(v: &ComplexMatrix) -> f64 {
        (&(&v.adjoint() * v) - &ComplexMatrix::identity(v.rows())).max_abs()
    }

    #[test]
    fn diagonal_input_sorts_ascending() {
        let e = eig_hermitian(&ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[(1, 0)].norm(), 1.0);
        assert_eq!(e.vectors[(2, 1)].norm(), 1.0);
        assert_eq!(e.vectors[(0, 2)].norm(), 1.0);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_fn(
            2,
            2,
            |i, j| if i != j { c64(1.0, 0.0) } else { c64(0.0, 0.0) },
        );
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|0⟩ − |1⟩)/√2 up to phase
        let v0 = e.vectors.col(0);
        assert!(((v0[0] * v0[1].conj()).re + 0.5).abs() < 1e-15);
        assert!((v0[0].norm() - s).abs() < 1e-15);
    }

    #[test]
    fn complex_pauli_y() {
        let y = ComplexMatrix::from_vec(
            2,
            2,
            vec![c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)],
        )
        .unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert!(e.reconstruction_residual(&y) < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_six_by_six_seed_42() {
        let mut rng = rng_from_seed(42);
        let m = random_hermitian(&mut rng, 6);
        let e = eig_hermitian(&m).unwrap();
        assert!(e.reconstruction_residual(&m) < 1e-10);
        assert!(unitarity_residual(&e.vectors) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_spectrum() {
        let mut m = ComplexMatrix::from_real_diag(&[1.0, 1.0, 2.0, 2.0]);
        m[(0, 1)] = c64(0.0, 1e-300);
        m[(1, 0)] = c64(0.0, -1e-300);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.eigenspaces(1e-8).len(), 2);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonHermitian(_))));
    }
}

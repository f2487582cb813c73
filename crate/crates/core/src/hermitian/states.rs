use std::f64::consts::PI;

use num_complex::Complex64;

use super::eigen::{eig_hermitian, jacobi, Eigen, Eigenspace};
use super::matrix::{c64, ComplexMatrix};
use crate::config::TOL;
use crate::error::{check_dim, Error, Result};

/// Hermitian matrix with its eigendecomposition cached.
#[derive(Debug, Clone)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
    eigen: Eigen,
}

impl HermitianObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eigen = eig_hermitian(&matrix)?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
            eigen,
        })
    }

    /// Diagonal observable with the given levels.
    pub fn diagonal(levels: &[f64]) -> Self {
        Self::new(ComplexMatrix::from_real_diag(levels)).expect("diagonal is Hermitian")
    }

    /// `(2π/τ) · diag(levels)`.
    pub fn from_integer_levels(levels: &[i64], tau: f64) -> Self {
        let w = 2.0 * PI / tau;
        Self::diagonal(&levels.iter().map(|&n| n as f64 * w).collect::<Vec<_>>())
    }

    /// `(2π/τ) · U diag(levels) U†`; the columns of `basis` must be orthonormal.
    pub fn from_levels_in_basis(levels: &[i64], basis: &ComplexMatrix, tau: f64) -> Result<Self> {
        check_dim(levels.len(), basis.rows())?;
        check_dim(levels.len(), basis.cols())?;
        let u_res =
            (&(&basis.adjoint() * basis) - &ComplexMatrix::identity(levels.len())).max_abs();
        if u_res > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "basis is not unitary (residual {u_res:.3e})"
            )));
        }
        let w = 2.0 * PI / tau;
        let d = ComplexMatrix::from_real_diag(
            &levels.iter().map(|&n| n as f64 * w).collect::<Vec<_>>(),
        );
        Self::new(&(basis * &d) * &basis.adjoint())
    }

    pub fn zero(d: usize) -> Self {
        Self::diagonal(&vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Eigenspaces grouped with `gap_cutoff`.
    pub fn eigenspaces(&self) -> Vec<Eigenspace> {
        self.eigen.eigenspaces(TOL.gap_cutoff)
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigen.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &e) in self.eigen.values.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -e * t);
            for i in 0..n {
                let a = v[(i, k)] * ph;
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `H ⊗ I + I ⊗ K`.
    pub fn noninteracting(&self, other: &HermitianObservable) -> HermitianObservable {
        noninteracting_hamiltonian(self, other)
    }
}

/// `H_A ⊗ I_B + I_A ⊗ H_B`.
pub fn noninteracting_hamiltonian(
    ha: &HermitianObservable,
    hb: &HermitianObservable,
) -> HermitianObservable {
    let m = &ha.matrix.kron(&ComplexMatrix::identity(hb.dim()))
        + &ComplexMatrix::identity(ha.dim()).kron(&hb.matrix);
    HermitianObservable::new(m).expect("sum of Hermitian")
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || (n2 - 1.0).abs() > TOL.tol_norm {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    /// Equal superposition of the listed basis states.
    pub fn uniform_superposition(d: usize, occupied: &[usize]) -> Self {
        let mut v = vec![c64(0.0, 0.0); d];
        for &k in occupied {
            v[k] = c64(1.0, 0.0);
        }
        Self::normalized(v).expect("nonempty occupation")
    }

    pub fn basis(d: usize, k: usize) -> Self {
        Self::uniform_superposition(d, &[k])
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn cbit() -> Self {
        Self::uniform_superposition(2, &[0, 1])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        let mv = m.mat_vec(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&mv)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut v = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                v.push(a * b);
            }
        }
        PureState { amplitudes: v }
    }

    pub fn apply(&self, u: &ComplexMatrix) -> Result<PureState> {
        check_dim(self.dim(), u.cols())?;
        PureState::normalized(u.mat_vec(&self.amplitudes))
    }
}

/// Unit-trace positive semidefinite matrix with its spectrum cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Vec<f64>,
    eigenbasis: ComplexMatrix,
    support_rank: usize,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let e = eig_hermitian(&matrix)?;
        let tr: f64 = e.values.iter().sum();
        if (tr - 1.0).abs() > TOL.tol_trace {
            return Err(Error::InvalidTrace(tr));
        }
        if let Some(&min) = e.values.first() {
            if min < -TOL.tol_psd {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(Self::from_eigen(matrix.hermitian_part(), e))
    }

    /// Like [`DensityMatrix::new`] but renormalizes the trace and clips
    /// rounding-level negative eigenvalues; for outputs of exact maps.
    pub(crate) fn from_numerical(matrix: ComplexMatrix) -> Self {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        let h = h.scale(1.0 / tr);
        let e = jacobi(&h);
        Self::from_eigen(h, e)
    }

    fn from_eigen(matrix: ComplexMatrix, e: Eigen) -> Self {
        let n = matrix.rows();
        let spectrum: Vec<f64> = e.values.iter().rev().copied().collect();
        let eigenbasis = ComplexMatrix::from_fn(n, n, |i, j| e.vectors[(i, n - 1 - j)]);
        let support_rank = spectrum.iter().filter(|&&p| p > TOL.rank_cutoff).count();
        Self {
            matrix,
            spectrum,
            eigenbasis,
            support_rank,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::from_numerical(psi.projector())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(ComplexMatrix::identity(d).scale(1.0 / d as f64)).expect("valid")
    }

    /// Diagonal state.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(p))
    }

    /// Convex combination `Σ w_i ρ_i`.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let d = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1
            .dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, rho) in terms {
            check_dim(d, rho.dim())?;
            m = &m + &rho.matrix.scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Eigenvectors as columns, in the order of [`DensityMatrix::spectrum`].
    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenbasis.col(k)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.spectrum.iter().map(|p| p * p).sum()
    }

    /// `f(ρ)` on the support; kernel eigenvalues map to zero.
    pub fn support_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &p) in self.spectrum.iter().enumerate() {
            if p <= TOL.rank_cutoff {
                continue;
            }
            let w = f(p);
            for i in 0..n {
                let a = self.eigenbasis[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * self.eigenbasis[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `√ρ`, with eigenvalues at or below `rank_cutoff` set to zero.
    pub fn sqrt(&self) -> ComplexMatrix {
        self.support_function(f64::sqrt)
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> ComplexMatrix {
        self.support_function(|_| 1.0)
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_numerical(self.matrix.kron(&other.matrix))
    }

    /// `ρ^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> DensityMatrix {
        let mut m = ComplexMatrix::identity(1);
        for _ in 0..n {
            m = m.kron(&self.matrix);
        }
        Self::from_numerical(m)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> DensityMatrix {
        Self::from_numerical(&(u * &self.matrix) * &u.adjoint())
    }

    /// `e^{-iHt} ρ e^{iHt}`.
    pub fn evolve(&self, h: &HermitianObservable, t: f64) -> Result<DensityMatrix> {
        check_dim(self.dim(), h.dim())?;
        Ok(self.conjugate_by(&h.evolution(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(2)),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[1.5, -0.5]),
            Err(Error::NotPsd(_))
        ));
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        assert_eq!(rho.spectrum(), &[0.75, 0.25]);
        assert_eq!(rho.support_rank(), 2);
    }

    #[test]
    fn pure_state_norm_is_checked() {
        assert!(PureState::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).is_err());
        let p = PureState::cbit();
        assert!((p.inner(&p).re - 1.0).abs() < 1e-15);
        assert_eq!(p.density().support_rank(), 1);
    }

    #[test]
    fn noninteracting_qubits() {
        let h = HermitianObservable::diagonal(&[0.5, -0.5]);
        let hh = noninteracting_hamiltonian(&h, &h);
        assert_eq!(hh.matrix().diag_re(), vec![1.0, 0.0, 0.0, -1.0]);
        assert_eq!(hh.eigenvalues(), &[-1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn evolution_is_unitary_and_periodic() {
        let h = HermitianObservable::from_integer_levels(&[0, 1, 3], 2.0);
        let u = h.evolution(2.0);
        assert!((&u - &ComplexMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_of_pure_state_is_itself() {
        let rho = PureState::cbit().density();
        assert!((&rho.sqrt() - rho.matrix()).max_abs() < 1e-14);
    }
}

//! Distillation diagnostics: bound resources, copy-count floors from the
//! purity of coherence, and the single-shot optimal fidelity via the
//! conditional min-entropy SDP.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::TOL;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::{
    group_levels, jacobi, ComplexMatrix, DensityMatrix, HermitianObservable, PureState,
};
use crate::measures::{self, MeasureValue};
use crate::sdp::{self, BlockSdp, SdpOptions};

/// Difference values closer than this but not merged are ambiguous.
const LEVEL_AMBIGUITY: f64 = 1e-6;

/// `λ|Φ⟩⟨Φ| + (1−λ)I/2` with `Φ` the c-bit.
pub fn noisy_cbit(lambda: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda = {lambda} outside [0, 1]"
        )));
    }
    DensityMatrix::mixture(&[
        (lambda, &PureState::cbit().density()),
        (1.0 - lambda, &DensityMatrix::maximally_mixed(2)),
    ])
}

/// `n` copies of `(ρ, H)` with the noninteracting total Hamiltonian.
pub fn iid_copies(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    n: usize,
) -> (DensityMatrix, HermitianObservable) {
    assert!(n >= 1);
    let mut hn = h.clone();
    for _ in 1..n {
        hn = hn.noninteracting(h);
    }
    (rho.tensor_power(n), hn)
}

/// Coherent, yet with purity of coherence finite: no c-bits can be
/// distilled at a nonzero rate.
pub fn is_bound_resource(rho: &DensityMatrix, h: &HermitianObservable) -> Result<bool> {
    check_dim(rho.dim(), h.dim())?;
    Ok(measures::support_commutes(rho, h) && measures::qfi(rho, h)? > TOL.tol_num)
}

/// Copies of `ρ` needed to reach an `ε`-approximation of the target with
/// probability `prob`: `prob·V(ψ)(2/ε − 3)/P(ρ)`.
pub fn distillation_copy_floor(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    target: &PureState,
    h_target: &HermitianObservable,
    eps: f64,
    prob: f64,
) -> Result<MeasureValue> {
    if !(eps > 0.0 && eps < 2.0 / 3.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "probability {prob} outside (0, 1]"
        )));
    }
    let ceiling = measures::cor_var_ceiling(target, h_target, eps)?;
    if ceiling <= TOL.tol_num {
        return Ok(MeasureValue::finite(0.0));
    }
    let p = measures::purity_of_coherence(rho, h)?;
    if !p.is_finite() {
        return Ok(MeasureValue::finite(0.0));
    }
    if p.value <= TOL.tol_num {
        return Ok(MeasureValue::INFINITE);
    }
    Ok(MeasureValue::finite(prob * ceiling / p.value))
}

/// Largest per-copy output variance compatible with an `ε`-approximate
/// distillation assisted by the helper `χ`:
/// `[εP(ρ) + 2(d_χ − 1)V(χ)/n]/(1 − 3ε)`.
pub fn helper_bound(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    helper: &PureState,
    h_helper: &HermitianObservable,
    n: usize,
    eps: f64,
) -> Result<MeasureValue> {
    if !(eps > 0.0 && eps < 1.0 / 3.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("copy count must be positive".into()));
    }
    let p = measures::purity_of_coherence(rho, h)?;
    if !p.is_finite() {
        return Ok(MeasureValue::INFINITE);
    }
    let v = measures::energy_variance(helper, h_helper)?;
    let d = helper.dim() as f64;
    Ok(MeasureValue::finite(
        (eps * p.value + 2.0 * (d - 1.0) * v / n as f64) / (1.0 - 3.0 * eps),
    ))
}

/// Dephased bipartite state feeding the min-entropy program, stored with
/// the eigenbasis data needed to split it into blocks.
#[derive(Debug, Clone)]
pub struct OmegaState {
    pub matrix: DensityMatrix,
    pub dims: (usize, usize),
    /// Eigenbases of `H_A` and `H_B` (columns).
    basis_a: ComplexMatrix,
    basis_b: ComplexMatrix,
    /// `Ω` in the product eigenbasis.
    local: ComplexMatrix,
    /// Product-basis indices `i·d_B + j` of each difference eigenspace.
    blocks: Vec<Vec<usize>>,
    /// Eigenspaces of `H_A`, as indices into its eigenbasis.
    groups_a: Vec<Vec<usize>>,
    difference: ComplexMatrix,
}

impl OmegaState {
    /// Wraps an arbitrary bipartite state with trivial Hamiltonians.
    pub fn from_matrix(matrix: DensityMatrix, (da, db): (usize, usize)) -> Result<Self> {
        check_dim(da * db, matrix.dim())?;
        Ok(Self {
            local: matrix.matrix().clone(),
            matrix,
            dims: (da, db),
            basis_a: ComplexMatrix::identity(da),
            basis_b: ComplexMatrix::identity(db),
            blocks: vec![(0..da * db).collect()],
            groups_a: vec![(0..da).collect()],
            difference: ComplexMatrix::zeros(da * db, da * db),
        })
    }

    /// Max-abs commutator with `H_A ⊗ I − I ⊗ H_B`.
    pub fn commutation_residual(&self) -> f64 {
        self.matrix.matrix().commutator(&self.difference).max_abs()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }
}

/// Eigenvalues of `H` with each eigenspace snapped to its mean.
fn snapped_levels(h: &HermitianObservable) -> (Vec<f64>, Vec<Vec<usize>>) {
    let mut levels = vec![0.0; h.dim()];
    let mut groups = Vec::new();
    for sp in h.eigenspaces() {
        for &i in &sp.indices {
            levels[i] = sp.value;
        }
        groups.push(sp.indices);
    }
    (levels, groups)
}

/// `Ω = Σ_E Π_E (σ_A ⊗ |ψ̄⟩⟨ψ̄|) Π_E` over eigenspaces of `H_A ⊗ I − I ⊗ H_B`,
/// with `ψ̄` conjugated in the eigenbasis of `H_B`.
pub fn omega_state(
    sigma: &DensityMatrix,
    h_a: &HermitianObservable,
    psi: &PureState,
    h_b: &HermitianObservable,
) -> Result<OmegaState> {
    check_dim(sigma.dim(), h_a.dim())?;
    check_dim(psi.dim(), h_b.dim())?;
    let (da, db) = (h_a.dim(), h_b.dim());
    let (la, groups_a) = snapped_levels(h_a);
    let (lb, _) = snapped_levels(h_b);
    let va = h_a.eigenvectors().clone();
    let vb = h_b.eigenvectors().clone();

    let mut diffs: Vec<(f64, usize)> = Vec::with_capacity(da * db);
    for (i, &a) in la.iter().enumerate() {
        for (j, &b) in lb.iter().enumerate() {
            diffs.push((a - b, i * db + j));
        }
    }
    diffs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sorted: Vec<f64> = diffs.iter().map(|d| d.0).collect();
    let grouped = group_levels(&sorted, TOL.gap_cutoff);
    for w in grouped.windows(2) {
        let gap = sorted[w[1][0]] - sorted[*w[0].last().unwrap()];
        if gap < LEVEL_AMBIGUITY {
            return Err(Error::IncommensurateSpectrum(gap));
        }
    }
    let blocks: Vec<Vec<usize>> = grouped
        .into_iter()
        .map(|g| {
            let mut idx: Vec<usize> = g.into_iter().map(|k| diffs[k].1).collect();
            idx.sort_unstable();
            idx
        })
        .collect();
    let mut label = vec![0; da * db];
    for (b, idx) in blocks.iter().enumerate() {
        for &k in idx {
            label[k] = b;
        }
    }

    let sig = &(&va.adjoint() * sigma.matrix()) * &va;
    let coeff: Vec<Complex64> = vb
        .adjoint()
        .mat_vec(psi.amplitudes())
        .iter()
        .map(|c| c.conj())
        .collect();
    let n = da * db;
    let local = ComplexMatrix::from_fn(n, n, |r, c| {
        if label[r] != label[c] {
            return Complex64::new(0.0, 0.0);
        }
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        sig[(i, k)] * coeff[j] * coeff[l].conj()
    });
    let w = va.kron(&vb);
    let full = &(&w * &local) * &w.adjoint();
    let da_diag = ComplexMatrix::from_real_diag(&la);
    let db_diag = ComplexMatrix::from_real_diag(&lb);
    let diff_local =
        &da_diag.kron(&ComplexMatrix::identity(db)) - &ComplexMatrix::identity(da).kron(&db_diag);
    let difference = &(&w * &diff_local) * &w.adjoint();
    Ok(OmegaState {
        matrix: DensityMatrix::from_numerical(full),
        dims: (da, db),
        basis_a: va,
        basis_b: vb,
        local,
        blocks,
        groups_a,
        difference,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SdpResult {
    /// `min Tr τ` subject to `τ ⊗ I ⪰ Ω`.
    pub optimum: f64,
    /// `−log₂(optimum)`.
    pub hmin: f64,
    #[serde(skip)]
    pub tau: ComplexMatrix,
    /// `X ⪰ 0` with `Tr_B X ⪯ I`, so `Tr(ΩX)` lower-bounds the optimum.
    #[serde(skip)]
    pub dual_certificate: ComplexMatrix,
    pub certified_lower: f64,
    pub primal_dual_gap: f64,
    pub iterations: usize,
}

/// Orthonormal Hermitian basis of matrices supported on `group`.
fn hermitian_basis(d: usize, group: &[usize]) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (a, &p) in group.iter().enumerate() {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(p, p)] = Complex64::new(1.0, 0.0);
        out.push(e);
        for &q in &group[a + 1..] {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(p, q)] = Complex64::new(r, 0.0);
            s[(q, p)] = Complex64::new(r, 0.0);
            out.push(s);
            let mut t = ComplexMatrix::zeros(d, d);
            t[(p, q)] = Complex64::new(0.0, r);
            t[(q, p)] = Complex64::new(0.0, -r);
            out.push(t);
        }
    }
    out
}

/// `min{Tr τ : τ ⊗ I ⪰ Ω}` with a weak-duality certificate.
///
/// `τ` is taken block-diagonal over the eigenspaces of `H_A`: twirling any
/// feasible `τ` keeps it feasible at the same trace. The constraint then
/// splits over the blocks of `Ω`, coupled through the shared `τ`.
pub fn conditional_min_entropy(omega: &OmegaState) -> Result<SdpResult> {
    let (da, db) = omega.dims;
    let basis: Vec<ComplexMatrix> = omega
        .groups_a
        .iter()
        .flat_map(|g| hermitian_basis(da, g))
        .collect();
    let restrict = |e: &ComplexMatrix, idx: &[usize]| {
        ComplexMatrix::from_fn(idx.len(), idx.len(), |r, c| {
            let (i, j) = (idx[r] / db, idx[r] % db);
            let (k, l) = (idx[c] / db, idx[c] % db);
            if j == l {
                e[(i, k)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let omega_blocks: Vec<ComplexMatrix> = omega
        .blocks
        .iter()
        .map(|idx| omega.local.submatrix(idx))
        .collect();
    let problem = BlockSdp {
        c: omega_blocks.iter().map(|b| b.scale(-1.0)).collect(),
        a: basis
            .iter()
            .map(|e| omega.blocks.iter().map(|idx| restrict(e, idx)).collect())
            .collect(),
        b: basis.iter().map(|e| e.trace().re).collect(),
    };
    let lmax = omega_blocks
        .iter()
        .map(|b| *jacobi(&b.hermitian_part()).values.last().unwrap())
        .fold(0.0, f64::max);
    let y0: Vec<f64> = basis
        .iter()
        .map(|e| {
            if e.trace().re > 0.5 {
                -(lmax + 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let x0: Vec<ComplexMatrix> = omega
        .blocks
        .iter()
        .map(|idx| ComplexMatrix::identity(idx.len()).scale(1.0 / db as f64))
        .collect();
    let opts = SdpOptions {
        max_iter: TOL.sdp_max_iter,
        tol: 1e-10,
        feas_tol: 1e-9,
    };
    let sol = sdp::solve(&problem, x0, y0, opts)?;

    // Exact feasibility: lift τ by the worst slack violation.
    let mut tau_local = ComplexMatrix::zeros(da, da);
    for (e, &y) in basis.iter().zip(&sol.y) {
        tau_local = &tau_local - &e.scale(y);
    }
    let smin = sdp::min_eigenvalue(&problem.slack(&sol.y));
    if smin < 0.0 {
        tau_local = &tau_local + &ComplexMatrix::identity(da).scale(-smin);
    }
    let upper = tau_local.trace().re;

    // Scale X so that Tr_B X ⪯ I holds exactly.
    let mut trb = ComplexMatrix::zeros(da, da);
    for (idx, xb) in omega.blocks.iter().zip(&sol.x) {
        for r in 0..idx.len() {
            for c in 0..idx.len() {
                if idx[r] % db == idx[c] % db {
                    trb[(idx[r] / db, idx[c] / db)] += xb[(r, c)];
                }
            }
        }
    }
    let scale = 1.0
        / jacobi(&trb.hermitian_part())
            .values
            .last()
            .copied()
            .unwrap_or(1.0)
            .max(1.0);
    let lower: f64 = omega_blocks
        .iter()
        .zip(&sol.x)
        .map(|(o, x)| o.re_trace_product(x))
        .sum::<f64>()
        * scale;
    let gap = upper - lower;
    if gap > TOL.gap_tol {
        return Err(Error::SolverStall {
            gap,
            iterations: sol.iterations,
        });
    }

    let n = da * db;
    let mut x_local = ComplexMatrix::zeros(n, n);
    for (idx, xb) in omega.blocks.iter().zip(&sol.x) {
        for r in 0..idx.len() {
            for c in 0..idx.len() {
                x_local[(idx[r], idx[c])] = xb[(r, c)] * scale;
            }
        }
    }
    let w = omega.basis_a.kron(&omega.basis_b);
    Ok(SdpResult {
        optimum: upper,
        hmin: -upper.log2(),
        tau: &(&omega.basis_a * &tau_local) * &omega.basis_a.adjoint(),
        dual_certificate: &(&w * &x_local) * &w.adjoint(),
        certified_lower: lower,
        primal_dual_gap: gap,
        iterations: sol.iterations,
    })
}

/// Best fidelity with `ψ_B` reachable from `σ_A` by a covariant channel.
pub fn max_distill_fidelity(
    sigma: &DensityMatrix,
    h_a: &HermitianObservable,
    psi: &PureState,
    h_b: &HermitianObservable,
) -> Result<f64> {
    Ok(conditional_min_entropy(&omega_state(sigma, h_a, psi, h_b)?)?.optimum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitBounds {
    /// `(1 − √(nλ²/(1 + (n−1)λ²)))/2`.
    pub exact: f64,
    /// `(1 − λ²)/(4λ²n)`.
    pub asymptotic: f64,
}

/// Infidelity lower bounds for distilling one c-bit from `n` noisy c-bits.
pub fn qubit_infidelity_bound(lambda: f64, n: usize) -> Result<QubitBounds> {
    if !(lambda > 0.0 && lambda <= 1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need lambda in (0, 1] and n ≥ 1, got {lambda}, {n}"
        )));
    }
    let l2 = lambda * lambda;
    let nf = n as f64;
    let tilde2 = nf * l2 / (1.0 + (nf - 1.0) * l2);
    Ok(QubitBounds {
        exact: (1.0 - tilde2.sqrt()) / 2.0,
        asymptotic: (1.0 - l2) / (4.0 * l2 * nf),
    })
}

/// Asymptotic infidelity `(1 − λ)/(2λ²n)` of the known optimal qubit
/// purification protocol.
pub fn cirac_comparison(lambda: f64, n: usize) -> Result<f64> {
    let b = qubit_infidelity_bound(lambda, n)?;
    Ok(2.0 / (1.0 + lambda) * b.asymptotic)
}

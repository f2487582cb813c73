//! Minimum-variance purifications and the QFI-achieving pure ensemble.
//!
//! For `ρ = Σ p_i |φ_i⟩⟨φ_i|` the purification used throughout is
//! `|Φ⟩ = vec(√ρ) = Σ √p_i |φ_i⟩_S |φ̄_i⟩_A`, so the reduced state of `A` is
//! `ρ^T`. With `M_ij = ⟨φ_i|H_S|φ_j⟩` and `c_ij = √(p_i p_j)/(p_i + p_j)`
//! (zero on the kernel), the auxiliary Hamiltonian minimizing the total
//! energy variance is `H_A = K^T` with `K = V (−2 C∘M) V†`, which solves
//! the stationarity condition `(Kρ + ρK)/2 + √ρ H_S √ρ = 0`. Its total
//! variance is exactly `F_H(ρ)/4`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::clock::coherence_structure;
use crate::config::TOL;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::{
    c64, group_levels, jacobi, noninteracting_hamiltonian, ComplexMatrix, DensityMatrix,
    HermitianObservable, PureState,
};
use crate::measures::energy_variance;
use crate::random::random_unitary;

/// Purification of `ρ` together with the Hamiltonians that realize it.
#[derive(Debug, Clone)]
pub struct Purification {
    pub joint_state: PureState,
    pub aux_hamiltonian: HermitianObservable,
    pub total_hamiltonian: HermitianObservable,
    pub total_variance: f64,
    /// Max-abs residual of the stationarity condition.
    pub kkt_residual: f64,
}

/// Pure-state decomposition `ρ = Σ w_i |φ_i⟩⟨φ_i|`.
#[derive(Debug, Clone)]
pub struct PureEnsemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
    pub average_variance: f64,
}

impl PureEnsemble {
    fn from_unnormalized(members: Vec<Vec<Complex64>>, h: &HermitianObservable) -> Result<Self> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        let mut average_variance = 0.0;
        for v in members {
            let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if w <= TOL.pair_cutoff {
                continue;
            }
            let psi = PureState::normalized(v)?;
            average_variance += w * energy_variance(&psi, h)?;
            weights.push(w);
            states.push(psi);
        }
        Ok(Self {
            weights,
            states,
            average_variance,
        })
    }

    /// `Σ w_i |φ_i⟩⟨φ_i|`.
    pub fn mixture(&self) -> ComplexMatrix {
        let d = self.states[0].dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m = &m + &s.projector().scale(*w);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Eigenbasis of `ρ` made unique inside degenerate eigenspaces by
/// diagonalizing `H` there. Returns `(p, V)` with `p` descending.
fn adapted_eigenbasis(rho: &DensityMatrix, h: &HermitianObservable) -> (Vec<f64>, ComplexMatrix) {
    let p: Vec<f64> = rho.spectrum().iter().map(|&x| x.max(0.0)).collect();
    let mut v = rho.eigenbasis().clone();
    let neg: Vec<f64> = p.iter().map(|x| -x).collect();
    for group in group_levels(&neg, TOL.gap_cutoff) {
        if group.len() < 2 || p[group[0]] <= TOL.rank_cutoff {
            continue;
        }
        let vg = ComplexMatrix::from_fn(v.rows(), group.len(), |i, j| v[(i, group[j])]);
        let block = &(&vg.adjoint() * h.matrix()) * &vg;
        let u = jacobi(&block.hermitian_part()).vectors;
        let rotated = &vg * &u;
        for (j, &g) in group.iter().enumerate() {
            v.set_col(g, &rotated.col(j));
        }
    }
    (p, v)
}

/// `√ρ` assembled from a given eigenbasis.
fn sqrt_from(p: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
    let s: Vec<f64> = p
        .iter()
        .map(|&x| if x > TOL.rank_cutoff { x.sqrt() } else { 0.0 })
        .collect();
    &(v * &ComplexMatrix::from_real_diag(&s)) * &v.adjoint()
}

/// `vec(√ρ)`: both marginals are `ρ`, the second transposed.
pub fn canonical_purification(rho: &DensityMatrix) -> PureState {
    let s = rho.sqrt();
    let d = rho.dim();
    let amps: Vec<Complex64> = (0..d * d).map(|k| s[(k / d, k % d)]).collect();
    PureState::normalized(amps).expect("unit trace")
}

/// Matrix `K = −2 V (C∘M) V†` in system coordinates; `H_A = K^T`.
fn stationary_k(p: &[f64], v: &ComplexMatrix, h: &HermitianObservable) -> ComplexMatrix {
    let m = &(&v.adjoint() * h.matrix()) * v;
    let d = p.len();
    let k_eig = ComplexMatrix::from_fn(d, d, |i, j| {
        if p[i] <= TOL.rank_cutoff || p[j] <= TOL.rank_cutoff {
            c64(0.0, 0.0)
        } else {
            m[(i, j)] * (-2.0 * (p[i] * p[j]).sqrt() / (p[i] + p[j]))
        }
    });
    &(v * &k_eig) * &v.adjoint()
}

/// Auxiliary Hamiltonian of the minimum-variance purification.
pub fn optimal_aux_hamiltonian(
    rho: &DensityMatrix,
    h_s: &HermitianObservable,
) -> Result<HermitianObservable> {
    check_dim(rho.dim(), h_s.dim())?;
    let (p, v) = adapted_eigenbasis(rho, h_s);
    HermitianObservable::new(stationary_k(&p, &v, h_s).transpose().hermitian_part())
}

/// `‖(Kρ + ρK)/2 + √ρ H_S √ρ‖_max` with `K = H_A^T`.
pub fn kkt_residual(
    rho: &DensityMatrix,
    h_s: &HermitianObservable,
    h_a: &HermitianObservable,
) -> Result<f64> {
    check_dim(rho.dim(), h_s.dim())?;
    check_dim(rho.dim(), h_a.dim())?;
    let k = h_a.matrix().transpose();
    let r = rho.matrix();
    let s = rho.sqrt();
    let lhs = (&(&k * r) + &(r * &k)).scale(0.5);
    Ok((&lhs + &(&(&s * h_s.matrix()) * &s)).max_abs())
}

/// Variance of `H_tot` in `|Φ⟩`.
fn joint_variance(phi: &PureState, h_tot: &HermitianObservable) -> f64 {
    energy_variance(phi, h_tot).expect("dims agree")
}

/// Builds `|Φ⟩`, `H_A`, `H_tot` and the minimal total variance.
pub fn build_optimal_purification(
    rho: &DensityMatrix,
    h_s: &HermitianObservable,
) -> Result<Purification> {
    check_dim(rho.dim(), h_s.dim())?;
    let (p, v) = adapted_eigenbasis(rho, h_s);
    let k = stationary_k(&p, &v, h_s);
    let s = sqrt_from(&p, &v);
    let d = rho.dim();
    let phi = PureState::normalized((0..d * d).map(|i| s[(i / d, i % d)]).collect())?;
    let mut h_a = k.transpose().hermitian_part();
    let kkt = {
        let r = rho.matrix();
        let lhs = (&(&k * r) + &(r * &k)).scale(0.5);
        (&lhs + &(&(&s * h_s.matrix()) * &s)).max_abs()
    };
    // Reference shift so that ⟨Φ|H_tot|Φ⟩ = 0; the variance is unchanged.
    let h_tot0 = noninteracting_hamiltonian(h_s, &HermitianObservable::new(h_a.clone())?);
    let mean = phi.expectation(h_tot0.matrix()).re;
    for i in 0..d {
        h_a[(i, i)] -= mean;
    }
    let aux = HermitianObservable::new(h_a)?;
    let total = noninteracting_hamiltonian(h_s, &aux);
    let total_variance = joint_variance(&phi, &total);
    Ok(Purification {
        joint_state: phi,
        aux_hamiltonian: aux,
        total_hamiltonian: total,
        total_variance,
        kkt_residual: kkt,
    })
}

/// Closed-form QFI of the auxiliary system:
/// `Σ 8 p_i p_j (p_i − p_j)² / (p_i + p_j)³ |M_ij|²`.
pub fn aux_qfi(rho: &DensityMatrix, h_s: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), h_s.dim())?;
    let (p, v) = adapted_eigenbasis(rho, h_s);
    let m = &(&v.adjoint() * h_s.matrix()) * &v;
    let mut f = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let s = p[i] + p[j];
            if p[i] <= TOL.rank_cutoff || p[j] <= TOL.rank_cutoff {
                continue;
            }
            f += 8.0 * p[i] * p[j] * (p[i] - p[j]).powi(2) / (s * s * s) * m[(i, j)].norm_sqr();
        }
    }
    Ok(f)
}

/// Total variance of `vec(√ρ)` under `H_S ⊗ I − I ⊗ H_S^T`; equals `2W`.
pub fn transpose_purification_variance(
    rho: &DensityMatrix,
    h_s: &HermitianObservable,
) -> Result<f64> {
    check_dim(rho.dim(), h_s.dim())?;
    let phi = canonical_purification(rho);
    let h_a = HermitianObservable::new(h_s.matrix().transpose().scale(-1.0))?;
    Ok(joint_variance(&phi, &noninteracting_hamiltonian(h_s, &h_a)))
}

/// Ensemble obtained by measuring `A` of `vec(√ρ)` in the columns of `basis`
/// (expressed in the `|φ̄_i⟩` coordinates of `A`).
fn steered_ensemble(
    p: &[f64],
    v: &ComplexMatrix,
    basis: &ComplexMatrix,
    h: &HermitianObservable,
) -> Result<PureEnsemble> {
    let d = p.len();
    let members = (0..basis.cols())
        .map(|k| {
            let mut eta = vec![c64(0.0, 0.0); d];
            for i in 0..d {
                if p[i] <= TOL.rank_cutoff {
                    continue;
                }
                let coeff = basis[(i, k)].conj() * p[i].sqrt();
                for a in 0..d {
                    eta[a] += coeff * v[(a, i)];
                }
            }
            eta
        })
        .collect();
    PureEnsemble::from_unnormalized(members, h)
}

/// Pure ensemble whose average energy variance equals `F_H(ρ)/4`.
///
/// Obtained by measuring the purifying system in the eigenbasis of the
/// optimal auxiliary Hamiltonian.
pub fn optimal_ensemble(rho: &DensityMatrix, h_s: &HermitianObservable) -> Result<PureEnsemble> {
    check_dim(rho.dim(), h_s.dim())?;
    let (p, v) = adapted_eigenbasis(rho, h_s);
    let m = &(&v.adjoint() * h_s.matrix()) * &v;
    let d = p.len();
    // H_A in the |φ̄_i⟩ coordinates is (−2 C∘M)^T.
    let h_idx = ComplexMatrix::from_fn(d, d, |i, j| {
        if p[i] <= TOL.rank_cutoff || p[j] <= TOL.rank_cutoff {
            c64(0.0, 0.0)
        } else {
            m[(j, i)] * (-2.0 * (p[i] * p[j]).sqrt() / (p[i] + p[j]))
        }
    });
    let basis = jacobi(&h_idx.hermitian_part()).vectors;
    steered_ensemble(&p, &v, &basis, h_s)
}

/// Ensemble from a Haar-random measurement on the purifying system.
/// Used to probe that no decomposition undercuts the optimal one.
pub fn random_ensemble(
    rho: &DensityMatrix,
    h_s: &HermitianObservable,
    rng: &mut impl Rng,
) -> Result<PureEnsemble> {
    check_dim(rho.dim(), h_s.dim())?;
    let (p, v) = adapted_eigenbasis(rho, h_s);
    let basis = random_unitary(rng, rho.dim());
    steered_ensemble(&p, &v, &basis, h_s)
}

/// Optimal ensemble split across the coherence-connected energy sectors of
/// `ρ`, so that every member is periodic with a period dividing `τ` and
/// the members' periods `τ/k_i` have `gcd(k_i) = 1`.
pub fn period_respecting_ensemble(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    tau: f64,
) -> Result<PureEnsemble> {
    check_dim(rho.dim(), h.dim())?;
    let structure = coherence_structure(rho, h, tau)?;
    if structure.gcd > 1 {
        return Err(Error::PeriodMismatch(format!(
            "state has period τ/{} rather than τ",
            structure.gcd
        )));
    }
    let base = optimal_ensemble(rho, h)?;
    let projectors: Vec<ComplexMatrix> = structure.component_projectors(h);
    let mut members = Vec::new();
    for (w, psi) in base.weights.iter().zip(&base.states) {
        for pi in &projectors {
            let part: Vec<Complex64> = pi
                .mat_vec(psi.amplitudes())
                .iter()
                .map(|z| z * w.sqrt())
                .collect();
            members.push(part);
        }
    }
    let ens = PureEnsemble::from_unnormalized(members, h)?;
    // Every member must return to itself after τ, and the member periods
    // τ/k_i must generate τ.
    let u = h.evolution(tau);
    let mut g = 0i64;
    for s in &ens.states {
        let overlap = s.expectation(&u).norm();
        if (overlap - 1.0).abs() > 1e-8 {
            return Err(Error::PeriodMismatch(format!(
                "member returns with overlap {overlap}"
            )));
        }
        if let Some(k) = crate::clock::pure_period_divisor(s, h, tau)? {
            g = crate::clock::gcd(g, k);
        }
    }
    if g > 1 {
        return Err(Error::PeriodMismatch(format!(
            "member periods share divisor {g}"
        )));
    }
    Ok(ens)
}

/// Serializable summary of a purification.
#[derive(Debug, Clone, Serialize)]
pub struct PurificationReport {
    pub total_variance: f64,
    pub qfi_over_4: f64,
    pub kkt_residual: f64,
    pub aux_qfi: f64,
}

//! Coherence monotones and the analytic bounds relating them.
//!
//! All spectral formulas work in the eigenbasis `{p_j, |ψ_j⟩}` of `ρ` with
//! `M_jk = ⟨ψ_j|H|ψ_k⟩`:
//!
//! | quantity | formula |
//! |----------|---------|
//! | QFI `F` | `2 Σ (p_j − p_k)² / (p_j + p_k) · |M_jk|²` |
//! | purity of coherence `P` | `Σ (p_k² − p_j²) / p_j · |M_kj|²` over the support |
//! | skew information `W` | `½ Σ (√p_j − √p_k)² |M_jk|²` |
//! | Rényi family | `Σ p_j^α p_k^{1−α} |M_jk|² − Tr(ρH²)` |

use std::fmt;

use serde::{Serialize, Serializer};

use crate::config::TOL;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::{fidelity, ComplexMatrix, DensityMatrix, HermitianObservable, PureState};

/// Nonnegative value that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub infinite: bool,
}

impl MeasureValue {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            infinite: false,
        }
    }

    pub const INFINITE: MeasureValue = MeasureValue {
        value: f64::INFINITY,
        infinite: true,
    };

    pub fn is_finite(&self) -> bool {
        !self.infinite
    }

    /// `f64::INFINITY` when infinite.
    pub fn as_f64(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            self.value
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.infinite {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.infinite {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.value)
        }
    }
}

/// `|⟨ψ_j|H|ψ_k⟩|²` in the eigenbasis of `ρ`.
pub(crate) fn squared_elements(
    rho: &DensityMatrix,
    h: &HermitianObservable,
) -> Result<Vec<Vec<f64>>> {
    check_dim(rho.dim(), h.dim())?;
    let v = rho.eigenbasis();
    let m = &(&v.adjoint() * h.matrix()) * v;
    let n = rho.dim();
    Ok((0..n)
        .map(|j| (0..n).map(|k| m[(j, k)].norm_sqr()).collect())
        .collect())
}

/// Spectrum clipped at zero.
fn probs(rho: &DensityMatrix) -> Vec<f64> {
    rho.spectrum().iter().map(|&p| p.max(0.0)).collect()
}

/// Quantum Fisher information of `ρ` for the family `e^{-iHt} ρ e^{iHt}`.
pub fn qfi(rho: &DensityMatrix, h: &HermitianObservable) -> Result<f64> {
    let a = squared_elements(rho, h)?;
    let p = probs(rho);
    let mut f = 0.0;
    for j in 0..p.len() {
        for k in (j + 1)..p.len() {
            let s = p[j] + p[k];
            if s <= TOL.pair_cutoff {
                continue;
            }
            f += 4.0 * (p[j] - p[k]).powi(2) / s * a[j][k];
        }
    }
    Ok(f.max(0.0))
}

/// `⟨H²⟩ − ⟨H⟩²`, clamped at zero.
pub fn energy_variance(psi: &PureState, h: &HermitianObservable) -> Result<f64> {
    check_dim(psi.dim(), h.dim())?;
    let hv = h.matrix().mat_vec(psi.amplitudes());
    let mean: f64 = psi
        .amplitudes()
        .iter()
        .zip(&hv)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let second: f64 = hv.iter().map(|z| z.norm_sqr()).sum();
    Ok((second - mean * mean).max(0.0))
}

/// Energy variance of a mixed state, `Tr(ρH²) − Tr(ρH)²`.
pub fn state_variance(rho: &DensityMatrix, h: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let rh = rho.matrix() * h.matrix();
    let mean = rh.trace().re;
    Ok((rh.re_trace_product(h.matrix()) - mean * mean).max(0.0))
}

/// Whether the support projector of `ρ` commutes with `H`.
pub fn support_commutes(rho: &DensityMatrix, h: &HermitianObservable) -> bool {
    if rho.dim() != h.dim() {
        return false;
    }
    if rho.support_rank() == rho.dim() {
        return true;
    }
    let pi = rho.support_projector();
    pi.commutator(h.matrix()).max_abs() < TOL.tol_commute
}

/// Purity of coherence `Tr(Hρ²Hρ⁻¹) − Tr(ρH²)`; infinite unless the
/// support of `ρ` is invariant under `H`.
pub fn purity_of_coherence(rho: &DensityMatrix, h: &HermitianObservable) -> Result<MeasureValue> {
    check_dim(rho.dim(), h.dim())?;
    if !support_commutes(rho, h) {
        return Ok(MeasureValue::INFINITE);
    }
    let a = squared_elements(rho, h)?;
    let p = probs(rho);
    let r = rho.support_rank();
    let mut total = 0.0;
    for j in 0..r {
        for k in 0..r {
            total += (p[k] * p[k] - p[j] * p[j]) / p[j] * a[k][j];
        }
    }
    Ok(MeasureValue::finite(total.max(0.0)))
}

/// Rényi-type generalization `Tr(ρ^α H ρ^{1−α} H) − Tr(ρH²)`, `α ∈ (1, 2]`.
pub fn renyi_purity_monotone(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    alpha: f64,
) -> Result<MeasureValue> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    check_dim(rho.dim(), h.dim())?;
    if !support_commutes(rho, h) {
        return Ok(MeasureValue::INFINITE);
    }
    let a = squared_elements(rho, h)?;
    let p = probs(rho);
    let r = rho.support_rank();
    let mut total = 0.0;
    for j in 0..r {
        for k in 0..r {
            total += (p[j].powf(alpha) * p[k].powf(1.0 - alpha) - p[j]) * a[j][k];
        }
    }
    Ok(MeasureValue::finite(total.max(0.0)))
}

/// Wigner–Yanase skew information `−Tr([√ρ, H]²)/2`.
pub fn skew_information(rho: &DensityMatrix, h: &HermitianObservable) -> Result<f64> {
    let a = squared_elements(rho, h)?;
    let s: Vec<f64> = probs(rho).iter().map(|p| p.sqrt()).collect();
    let mut w = 0.0;
    for j in 0..s.len() {
        for k in (j + 1)..s.len() {
            w += (s[j] - s[k]).powi(2) * a[j][k];
        }
    }
    Ok(w.max(0.0))
}

/// Petz–Rényi quantity `Tr(ρ² σ⁻¹)`; infinite unless `supp ρ ⊆ supp σ`.
pub fn q2_divergence(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<MeasureValue> {
    check_dim(rho.dim(), sigma.dim())?;
    let outside = (&ComplexMatrix::identity(rho.dim()) - &sigma.support_projector())
        .re_trace_product(rho.matrix());
    if outside > TOL.rank_cutoff {
        return Ok(MeasureValue::INFINITE);
    }
    let inv = sigma.support_function(|x| 1.0 / x);
    let r2 = rho.matrix() * rho.matrix();
    Ok(MeasureValue::finite(r2.re_trace_product(&inv)))
}

/// QFI from the curvature of the fidelity along `e^{-iHt}`.
///
/// Central second difference at steps `h` and `h/2`, combined with one
/// Richardson step to cancel the `O(h²)` error.
pub fn qfi_via_fidelity(rho: &DensityMatrix, h: &HermitianObservable, step: f64) -> Result<f64> {
    if !(1e-4..=1e-2).contains(&step) {
        return Err(Error::InvalidArgument(format!(
            "step {step} outside [1e-4, 1e-2]"
        )));
    }
    check_dim(rho.dim(), h.dim())?;
    let curvature = |t: f64| -> Result<f64> {
        let plus = fidelity(rho, &rho.evolve(h, t)?)?;
        let minus = fidelity(rho, &rho.evolve(h, -t)?)?;
        Ok(-4.0 * (plus - 2.0 + minus) / (t * t))
    };
    let coarse = curvature(step)?;
    let fine = curvature(step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Lower bound on `P` from the largest eigenvalue:
/// `V_H(ψ_max) · (p_max² / (1 − p_max) − 1)`.
pub fn near_pure_bound(rho: &DensityMatrix, h: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let pmax = rho.spectrum()[0];
    if pmax >= 1.0 - TOL.rank_cutoff {
        return Err(Error::PureInput);
    }
    let top = PureState::normalized(rho.eigenvector(0))?;
    let v = energy_variance(&top, h)?;
    Ok(v * (pmax * pmax / (1.0 - pmax) - 1.0))
}

/// Minimum purity of coherence of any state within trace distance `ε`
/// of the pure target: `V_H(ψ) · (2/ε − 3)`.
pub fn cor_var_ceiling(target: &PureState, h: &HermitianObservable, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0 / 3.0) {
        return Err(Error::EpsOutOfRange(eps));
    }
    Ok(energy_variance(target, h)? * (2.0 / eps - 3.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{c64, dephase};
    use crate::random::{random_density, rng_from_seed};

    pub(crate) fn noisy_cbit(lambda: f64) -> DensityMatrix {
        let plus = PureState::cbit().density();
        DensityMatrix::mixture(&[
            (lambda, &plus),
            (1.0 - lambda, &DensityMatrix::maximally_mixed(2)),
        ])
        .unwrap()
    }

    fn half_sz() -> HermitianObservable {
        HermitianObservable::diagonal(&[0.5, -0.5])
    }

    /// Textbook double sum over all ordered pairs, no symmetry shortcuts.
    fn qfi_oracle(rho: &DensityMatrix, h: &HermitianObservable) -> f64 {
        let a = squared_elements(rho, h).unwrap();
        let p = rho.spectrum();
        let mut f = 0.0;
        for j in 0..p.len() {
            for k in 0..p.len() {
                if p[j] + p[k] > 1e-14 {
                    f += 2.0 * (p[j] - p[k]).powi(2) / (p[j] + p[k]) * a[j][k];
                }
            }
        }
        f
    }

    #[test]
    fn qfi_of_plus_state() {
        let f = qfi(&PureState::cbit().density(), &half_sz()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_example_values() {
        let rho = noisy_cbit(0.6);
        let h = half_sz();
        let f = qfi(&rho, &h).unwrap();
        assert!((f - 0.36).abs() < 1e-12);
        assert!((f - qfi_oracle(&rho, &h)).abs() < 1e-12);
        let p = purity_of_coherence(&rho, &h).unwrap();
        assert!((p.value - 0.5625).abs() < 1e-12);
        // P = F / (2(1 − Tr ρ²)) and P = 4λ²/(1 − λ²) · V
        assert!((p.value - f / (2.0 * (1.0 - rho.purity()))).abs() < 1e-12);
        assert!((p.value - 4.0 * 0.36 / 0.64 * 0.25).abs() < 1e-12);
        let r2 = renyi_purity_monotone(&rho, &h, 2.0).unwrap();
        assert!((r2.value - p.value).abs() < 1e-12);
        assert!((near_pure_bound(&rho, &h).unwrap() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn incoherent_states_are_free() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 2.0]);
        assert!(qfi(&rho, &h).unwrap() < 1e-14);
        assert!(purity_of_coherence(&rho, &h).unwrap().value < 1e-14);
        assert!(skew_information(&rho, &h).unwrap() < 1e-14);
        assert!(renyi_purity_monotone(&rho, &h, 1.5).unwrap().value < 1e-14);
    }

    #[test]
    fn variances() {
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 2.0, 3.0]);
        let psi = PureState::uniform_superposition(4, &[0, 2, 3]);
        assert!((energy_variance(&psi, &h).unwrap() - 14.0 / 9.0).abs() < 1e-12);
        let tau = 3.0;
        let hc = HermitianObservable::diagonal(&[
            std::f64::consts::PI / tau,
            -std::f64::consts::PI / tau,
        ]);
        let v = energy_variance(&PureState::cbit(), &hc).unwrap();
        assert!((v - (std::f64::consts::PI / tau).powi(2)).abs() < 1e-12);
        assert_eq!(energy_variance(&PureState::basis(4, 1), &h).unwrap(), 0.0);
    }

    #[test]
    fn purity_is_infinite_on_coherent_pure_states() {
        let h = half_sz();
        assert!(
            purity_of_coherence(&PureState::cbit().density(), &h)
                .unwrap()
                .infinite
        );
        assert!(!support_commutes(&PureState::cbit().density(), &h));
        let eig = PureState::basis(2, 0).density();
        assert!(support_commutes(&eig, &h));
        assert_eq!(
            purity_of_coherence(&eig, &h).unwrap(),
            MeasureValue::finite(0.0)
        );
    }

    #[test]
    fn support_inside_degenerate_eigenspace() {
        let h = HermitianObservable::diagonal(&[1.0, 1.0, 0.0]);
        let psi = PureState::normalized(vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, 0.0)]).unwrap();
        assert!(support_commutes(&psi.density(), &h));
    }

    #[test]
    fn skew_information_bounds() {
        let mut rng = rng_from_seed(11);
        let rho = random_density(&mut rng, 4, 4);
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 2.0, 3.0]);
        let f = qfi(&rho, &h).unwrap();
        let w = skew_information(&rho, &h).unwrap();
        // W = V on pure states while F = 4V, so the sandwich is F/8 ≤ W ≤ F/4
        assert!(f / 8.0 <= w + 1e-12 && w <= f / 4.0 + 1e-12);
        let psi = PureState::uniform_superposition(4, &[0, 3]);
        let w = skew_information(&psi.density(), &h).unwrap();
        assert!((w - energy_variance(&psi, &h).unwrap()).abs() < 1e-12);
        // −Tr([√ρ,H]²)/2 directly
        let sq = rho.sqrt();
        let c = sq.commutator(h.matrix());
        let direct = -0.5 * (&c * &c).trace().re;
        assert!((direct - skew_information(&rho, &h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn q2_examples() {
        let rho = DensityMatrix::maximally_mixed(2);
        let sigma = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert!((q2_divergence(&rho, &sigma).unwrap().value - 4.0 / 3.0).abs() < 1e-12);
        assert!((q2_divergence(&sigma, &sigma).unwrap().value - 1.0).abs() < 1e-12);
        let z0 = PureState::basis(2, 0).density();
        let z1 = PureState::basis(2, 1).density();
        assert!(q2_divergence(&z0, &z1).unwrap().infinite);
    }

    #[test]
    fn alpha_range_is_enforced() {
        let rho = noisy_cbit(0.5);
        assert!(matches!(
            renyi_purity_monotone(&rho, &half_sz(), 1.0),
            Err(Error::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            renyi_purity_monotone(&rho, &half_sz(), 2.5),
            Err(Error::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn fidelity_curvature_matches_closed_form() {
        let h = half_sz();
        let f = qfi_via_fidelity(&PureState::cbit().density(), &h, 5e-3).unwrap();
        assert!((f - 1.0).abs() < 1e-5);
        let inc = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert!(qfi_via_fidelity(&inc, &h, 5e-3).unwrap().abs() < 1e-5);
        let mut rng = rng_from_seed(3);
        let rho = random_density(&mut rng, 4, 4);
        let h4 = HermitianObservable::diagonal(&[0.0, 1.0, 2.0, 3.0]);
        let exact = qfi(&rho, &h4).unwrap();
        let est = qfi_via_fidelity(&rho, &h4, 5e-3).unwrap();
        assert!(
            (exact - est).abs() < 1e-5 * exact.max(1.0),
            "{exact} vs {est}"
        );
    }

    #[test]
    fn dephased_state_has_zero_qfi() {
        let mut rng = rng_from_seed(5);
        let rho = random_density(&mut rng, 3, 3);
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 1.0]);
        assert!(qfi(&dephase(&rho, &h).unwrap(), &h).unwrap() < 1e-12);
    }

    #[test]
    fn near_pure_bound_holds() {
        let rho = noisy_cbit(0.99);
        let h = half_sz();
        let p = purity_of_coherence(&rho, &h).unwrap().value;
        assert!(p >= near_pure_bound(&rho, &h).unwrap());
        assert!(matches!(
            near_pure_bound(&PureState::cbit().density(), &h),
            Err(Error::PureInput)
        ));
        // below the golden-ratio threshold the bound is vacuous
        assert!(near_pure_bound(&noisy_cbit(0.2), &h).unwrap() <= 0.0);
    }

    #[test]
    fn ceiling_arithmetic_and_mixing_witness() {
        let h = half_sz();
        let psi = PureState::cbit();
        assert!((cor_var_ceiling(&psi, &h, 0.01).unwrap() - 49.25).abs() < 1e-10);
        assert!(cor_var_ceiling(&psi, &h, 2.0 / 3.0).unwrap().abs() < 1e-12);
        assert!(cor_var_ceiling(&psi, &h, 0.0).is_err());
        for &eps in &[0.01, 0.1, 0.5] {
            // (1 − ε/2)ψ + (ε/2)ψ⊥ lies at trace distance ε from ψ
            let perp = PureState::normalized(vec![c64(1.0, 0.0), c64(-1.0, 0.0)])
                .unwrap()
                .density();
            let sigma =
                DensityMatrix::mixture(&[(1.0 - eps / 2.0, &psi.density()), (eps / 2.0, &perp)])
                    .unwrap();
            let p = purity_of_coherence(&sigma, &h).unwrap().value;
            assert!(p >= cor_var_ceiling(&psi, &h, eps).unwrap() - 1e-9);
        }
    }
}

//! Pure-state conversion rates, shift matching of energy distributions and
//! coherence cost.
//!
//! Conversions are certified at the distribution level: two pure states of
//! the same period are related by a time-translation invariant operation
//! with fidelity at least `1 − 2ε` whenever their energy distributions are
//! `ε`-close in total variation after an integer shift.

use serde::Serialize;

use crate::clock::{self, coherence_structure, extract_distribution, IntegerDistribution};
use crate::config::TOL;
use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianObservable, PureState};
use crate::measures;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionPlan {
    /// Output copies per input copy.
    pub rate: f64,
    pub shift_k: i64,
    pub tv_error: f64,
    pub fidelity_lower_bound: f64,
    pub input_copies: usize,
    pub output_copies: usize,
}

impl ConversionPlan {
    fn new(input_copies: usize, output_copies: usize, shift_k: i64, tv_error: f64) -> Self {
        let tv_error = tv_error.clamp(0.0, 1.0);
        Self {
            rate: output_copies as f64 / input_copies as f64,
            shift_k,
            tv_error,
            fidelity_lower_bound: (1.0 - 2.0 * tv_error).max(0.0),
            input_copies,
            output_copies,
        }
    }
}

/// Common period of two pure states; 0 only if both are eigenstates.
fn common_period(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
) -> Result<f64> {
    let t1 = clock::intrinsic_period(psi1, h1)?;
    let t2 = clock::intrinsic_period(psi2, h2)?;
    if t1 == 0.0 {
        return Ok(t2);
    }
    if t2 != 0.0 && (t1 - t2).abs() > 1e-9 * t1.max(t2) {
        return Err(Error::PeriodMismatch(format!("{t1} vs {t2}")));
    }
    Ok(t1)
}

/// Asymptotic rate `V₁/V₂` of `ψ₁ → ψ₂`.
pub fn max_rate(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
) -> Result<f64> {
    let v2 = measures::energy_variance(psi2, h2)?;
    if v2 <= TOL.rank_cutoff {
        return Err(Error::ZeroTargetVariance);
    }
    common_period(psi1, h1, psi2, h2)?;
    Ok(measures::energy_variance(psi1, h1)? / v2)
}

/// Shift `k` minimizing `tv(p, shift(q, k))`; ties go to smaller `|k|`,
/// then to negative `k`.
pub fn best_shift(p: &IntegerDistribution, q: &IntegerDistribution) -> (i64, f64) {
    let lo = p.offset - q.max_index();
    let hi = p.max_index() - q.offset;
    let mut best = (0i64, p.tv_distance(q));
    for k in lo..=hi {
        let e = p.tv_distance(&q.shift(k));
        let better = e < best.1 - 1e-15
            || ((e - best.1).abs() <= 1e-15 && (k.abs(), k >= 0) < (best.0.abs(), best.0 >= 0));
        if better {
            best = (k, e);
        }
    }
    best
}

/// One-copy plan from the two energy distributions at period `τ`.
pub fn single_shot_bound(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
    tau: f64,
) -> Result<ConversionPlan> {
    let p = extract_distribution(psi1, h1, tau)?.distribution;
    let q = extract_distribution(psi2, h2, tau)?.distribution;
    let (k, eps) = best_shift(&p, &q);
    Ok(ConversionPlan::new(1, 1, k, eps))
}

/// Best rational `num/den` with `den ≤ max_den`, by continued fractions.
pub fn snap_rational(x: f64, max_den: u64) -> (u64, u64) {
    assert!(x >= 0.0 && x.is_finite());
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let au = a as u64;
        let k2 = au.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den {
            break;
        }
        let h2 = au.saturating_mul(h1).saturating_add(h0);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac < 1e-15 || ((h1 as f64) / (k1 as f64) - x).abs() <= 1e-15 * x.max(1.0) {
            break;
        }
        r = 1.0 / frac;
    }
    (h1, k1)
}

/// `⌈R·m⌉` with `R` snapped to a rational first.
pub fn output_copies(rate: f64, m: usize) -> usize {
    let (num, den) = snap_rational(rate, 1_000_000);
    let prod = num as u128 * m as u128;
    prod.div_ceil(den as u128) as usize
}

struct SweepSetup {
    p1: IntegerDistribution,
    p2: IntegerDistribution,
    block1: usize,
    block2: usize,
    ratio: f64,
}

fn sweep_setup(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
) -> Result<SweepSetup> {
    let ratio = max_rate(psi1, h1, psi2, h2)?;
    let tau = common_period(psi1, h1, psi2, h2)?;
    let p1 = extract_distribution(psi1, h1, tau)?.distribution;
    let p2 = extract_distribution(psi2, h2, tau)?.distribution;
    let block = |p: &IntegerDistribution| -> Result<usize> {
        if p.support().len() < 2 {
            return Ok(1);
        }
        clock::overlap_copy_count(p, 64)
    };
    Ok(SweepSetup {
        block1: block(&p1)?,
        block2: block(&p2)?,
        p1,
        p2,
        ratio,
    })
}

fn round_up(n: usize, block: usize) -> usize {
    n.div_ceil(block) * block
}

fn plan_at(s: &SweepSetup, m_in: usize, m_out: usize) -> Result<ConversionPlan> {
    let pm = s.p1.convolve_n(m_in)?;
    let qm = s.p2.convolve_n(m_out)?;
    let (k, eps) = best_shift(&pm, &qm);
    Ok(ConversionPlan::new(m_in, m_out, k, eps))
}

/// For each `m`, compares `p₁^{*m}` with `p₂^{*⌈Rm⌉}` under the best shift.
///
/// Copy counts are rounded up to whole blocks of `overlap_copy_count` for
/// distributions that do not yet overlap their own unit shift.
pub fn iid_sweep(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
    rate: f64,
    m_list: &[usize],
) -> Result<Vec<ConversionPlan>> {
    if !(rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate {rate} must be positive"
        )));
    }
    let s = sweep_setup(psi1, h1, psi2, h2)?;
    m_list
        .iter()
        .map(|&m| {
            let m_in = round_up(m, s.block1);
            let m_out = round_up(output_copies(rate, m_in), s.block2);
            plan_at(&s, m_in, m_out)
        })
        .collect()
}

/// Like [`iid_sweep`], but may produce a few extra output copies near
/// `(V₁/V₂)·m` and discard them, which is itself time-translation
/// invariant. Reports the output count actually matched.
pub fn iid_sweep_with_discard(
    psi1: &PureState,
    h1: &HermitianObservable,
    psi2: &PureState,
    h2: &HermitianObservable,
    rate: f64,
    m_list: &[usize],
) -> Result<Vec<ConversionPlan>> {
    if !(rate > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate {rate} must be positive"
        )));
    }
    let s = sweep_setup(psi1, h1, psi2, h2)?;
    m_list
        .iter()
        .map(|&m| {
            let m_in = round_up(m, s.block1);
            let floor_out = round_up(output_copies(rate, m_in), s.block2);
            let centre = s.ratio * m_in as f64;
            let lo = (centre.floor() as usize).saturating_sub(1).max(floor_out);
            let hi = (centre.ceil() as usize + 1).max(floor_out);
            let mut best = plan_at(&s, m_in, floor_out)?;
            for m_out in lo..=hi {
                if m_out % s.block2 != 0 || m_out == floor_out {
                    continue;
                }
                let plan = plan_at(&s, m_in, m_out)?;
                if plan.tv_error < best.tv_error {
                    best = plan;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Necessary condition `R ≤ F_in/F_out` for an asymptotic TI conversion.
pub fn rate_feasibility(
    rho_in: &DensityMatrix,
    h_in: &HermitianObservable,
    rho_out: &DensityMatrix,
    h_out: &HermitianObservable,
    rate: f64,
) -> Result<bool> {
    let f_out = measures::qfi(rho_out, h_out)?;
    if f_out <= TOL.rank_cutoff {
        return Err(Error::ZeroTargetQfi);
    }
    let f_in = measures::qfi(rho_in, h_in)?;
    Ok(rate <= f_in / f_out + 1e-12)
}

/// Asymptotic c-bit cost `(τ/2π)²·F_H(ρ)` of a state of period `τ`.
pub fn coherence_cost(rho: &DensityMatrix, h: &HermitianObservable, tau: f64) -> Result<f64> {
    let s = coherence_structure(rho, h, tau)?;
    if s.gcd > 1 {
        return Err(Error::PeriodMismatch(format!(
            "state period is tau/{}",
            s.gcd
        )));
    }
    let scale = tau / (2.0 * std::f64::consts::PI);
    Ok(scale * scale * measures::qfi(rho, h)?)
}

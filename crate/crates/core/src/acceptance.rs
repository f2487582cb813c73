//! End-to-end acceptance checks with fixed seeds.
//!
//! Each check returns a [`CriterionResult`]; front ends print one line per
//! result and fail if any check fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::channels::{monotonicity_suite, MeasureId};
use crate::clock::{
    self, barbour_bound, extract_distribution, overlap_copy_count, tv_to_translated_poisson,
    IntegerDistribution,
};
use crate::conversion::{iid_sweep, max_rate};
use crate::distillation::{
    cirac_comparison, conditional_min_entropy, distillation_copy_floor, iid_copies,
    is_bound_resource, noisy_cbit, omega_state, qubit_infidelity_bound,
};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, DensityMatrix, HermitianObservable, PureState};
use crate::measures::{purity_of_coherence, qfi, qfi_via_fidelity, skew_information};
use crate::purification::{build_optimal_purification, optimal_ensemble, random_ensemble};
use crate::random::{random_density, random_hermitian, random_observable, rng_stream};

const SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(
    id: u32,
    name: &'static str,
    budget: Option<f64>,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(limit) = budget {
        if seconds > limit {
            passed = false;
            detail.push_str(&format!("; runtime {seconds:.1}s over {limit}s"));
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

fn tau() -> f64 {
    2.0 * PI
}

fn cbit_h() -> HermitianObservable {
    HermitianObservable::from_integer_levels(&[0, 1], tau())
}

/// Random `(ρ, H)` with dimension in `dims` and random rank.
fn random_pair(
    seed: u64,
    trial: u64,
    dims: std::ops::RangeInclusive<usize>,
    full_rank: bool,
) -> (DensityMatrix, HermitianObservable) {
    let mut rng = rng_stream(seed, trial);
    let d = rng.random_range(dims);
    let rank = if full_rank {
        d
    } else {
        rng.random_range(1..=d)
    };
    let rho = random_density(&mut rng, d, rank);
    (rho, random_observable(&mut rng, d))
}

pub fn purification_identity() -> CriterionResult {
    timed(
        1,
        "optimal purification variance equals F/4",
        Some(10.0),
        || {
            let (mut worst_rel, mut worst_kkt) = (0.0f64, 0.0f64);
            for t in 0..200 {
                let (rho, h) = random_pair(SEED + 1, t, 2..=6, false);
                let f = qfi(&rho, &h)?;
                let p = build_optimal_purification(&rho, &h)?;
                worst_rel = worst_rel.max((4.0 * p.total_variance - f).abs() / f.max(1e-300));
                worst_kkt = worst_kkt.max(p.kkt_residual);
            }
            Ok((
                worst_rel <= 1e-8 && worst_kkt < 1e-10,
                format!("max relative error {worst_rel:.2e}, max KKT residual {worst_kkt:.2e}"),
            ))
        },
    )
}

pub fn ensemble_identity() -> CriterionResult {
    timed(
        2,
        "optimal ensemble average variance equals F/4",
        Some(20.0),
        || {
            let (mut worst, mut undercut) = (0.0f64, f64::NEG_INFINITY);
            for t in 0..200 {
                let (rho, h) = random_pair(SEED + 2, t, 2..=5, false);
                let f = qfi(&rho, &h)?;
                let ens = optimal_ensemble(&rho, &h)?;
                worst = worst.max((4.0 * ens.average_variance - f).abs() / f.max(1e-300));
                let mut rng = rng_stream(SEED + 102, t);
                for _ in 0..100 {
                    let alt = random_ensemble(&rho, &h, &mut rng)?;
                    undercut = undercut.max(ens.average_variance - alt.average_variance);
                }
            }
            Ok((
                worst <= 1e-8 && undercut <= 1e-9,
                format!("max relative error {worst:.2e}, largest undercut {undercut:.2e}"),
            ))
        },
    )
}

pub fn monotonicity() -> CriterionResult {
    timed(
        3,
        "F, P, W, Renyi(1.5), Renyi(2) monotone under TI channels",
        Some(60.0),
        || {
            let mut parts = Vec::new();
            let mut ok = true;
            for m in [
                MeasureId::Qfi,
                MeasureId::Purity,
                MeasureId::Skew,
                MeasureId::Renyi(1.5),
                MeasureId::Renyi(2.0),
            ] {
                let r = monotonicity_suite(m, 1000, SEED + 3)?;
                ok &= r.passed(1e-8);
                parts.push(format!("{} {:.2e}", r.measure, r.max_violation));
            }
            Ok((ok, format!("max violations: {}", parts.join(", "))))
        },
    )
}

pub fn inequality_chain() -> CriterionResult {
    timed(
        4,
        "P >= F, F/2 <= W <= F, qubit purity identity",
        None,
        || {
            let slack = 1e-10;
            let (mut p_fail, mut w_low, mut w_high, mut q_err) = (0, 0, 0, 0.0f64);
            let mut w_ratio = (f64::INFINITY, 0.0f64);
            for t in 0..1000 {
                let (rho, h) = random_pair(SEED + 4, t, 2..=5, true);
                let f = qfi(&rho, &h)?;
                let p = purity_of_coherence(&rho, &h)?;
                let w = skew_information(&rho, &h)?;
                if p.is_finite() && p.value < f - slack {
                    p_fail += 1;
                }
                if w < f / 2.0 - slack {
                    w_low += 1;
                }
                if w > f + slack {
                    w_high += 1;
                }
                if f > 1e-12 {
                    w_ratio = (w_ratio.0.min(w / f), w_ratio.1.max(w / f));
                }
                if rho.dim() == 2 {
                    let predicted = f / (2.0 * (1.0 - rho.purity()));
                    q_err = q_err.max((p.value - predicted).abs() / p.value.max(1.0));
                }
            }
            Ok((
            p_fail == 0 && w_low == 0 && w_high == 0 && q_err <= 1e-10,
            format!(
                "P<F: {p_fail}, W<F/2: {w_low}, W>F: {w_high} (W/F in [{:.4}, {:.4}]), qubit identity error {q_err:.2e}",
                w_ratio.0, w_ratio.1
            ),
        ))
        },
    )
}

pub fn near_mixed_limit() -> CriterionResult {
    timed(
        5,
        "|P/F - 1| linear in epsilon near the maximally mixed state",
        None,
        || {
            let eps = [1e-2, 5e-3, 2.5e-3];
            let mut ok = true;
            let mut ratio_range = (f64::INFINITY, f64::NEG_INFINITY);
            for t in 0..20 {
                let mut rng = rng_stream(SEED + 5, t);
                let d = rng.random_range(2..=4usize);
                let h = random_observable(&mut rng, d);
                let a = random_hermitian(&mut rng, d);
                let shift = a.trace().re / d as f64;
                let a = &a - &ComplexMatrix::identity(d).scale(shift);
                let a = a.scale(1.0 / a.frobenius_norm());
                let mut dev = Vec::new();
                for &e in &eps {
                    let m = &ComplexMatrix::identity(d).scale(1.0 / d as f64) + &a.scale(e);
                    let rho = DensityMatrix::new(m)?;
                    let f = qfi(&rho, &h)?;
                    dev.push((purity_of_coherence(&rho, &h)?.value / f - 1.0).abs());
                }
                for w in dev.windows(2) {
                    let r = w[1] / w[0];
                    ratio_range = (ratio_range.0.min(r), ratio_range.1.max(r));
                    ok &= w[1] < w[0] && (1.0 / 3.0..=2.0 / 3.0).contains(&r);
                }
            }
            Ok((
                ok,
                format!(
                    "successive ratios in [{:.4}, {:.4}]",
                    ratio_range.0, ratio_range.1
                ),
            ))
        },
    )
}

pub fn fidelity_curvature() -> CriterionResult {
    timed(
        6,
        "QFI from fidelity curvature matches the closed form",
        None,
        || {
            let mut worst = 0.0f64;
            for t in 0..100 {
                let (rho, h) = random_pair(SEED + 6, t, 2..=5, false);
                let f = qfi(&rho, &h)?;
                let est = qfi_via_fidelity(&rho, &h, 5e-3)?;
                worst = worst.max((est - f).abs() / f.max(1.0));
            }
            Ok((worst <= 1e-5, format!("max scaled error {worst:.2e}")))
        },
    )
}

pub fn translated_poisson_convergence() -> CriterionResult {
    timed(
        7,
        "translated Poisson convergence and Barbour bound",
        Some(10.0),
        || {
            let mut ok = true;
            let mut parts = Vec::new();
            let fixtures = [
                ("bernoulli", IntegerDistribution::uniform_on(&[0, 1])),
                ("{0,2,3}", IntegerDistribution::uniform_on(&[0, 2, 3])),
            ];
            for (name, p) in fixtures {
                let mut tvs = Vec::new();
                for m in [16, 64, 256] {
                    let tv = tv_to_translated_poisson(&p, m)?;
                    let bound = barbour_bound(&p, m)?;
                    ok &= tv <= bound;
                    tvs.push(tv);
                }
                let r1 = tvs[1] / tvs[0];
                let r2 = tvs[2] / tvs[1];
                ok &= tvs[1] < tvs[0] && tvs[2] < tvs[1];
                ok &= [r1, r2].iter().all(|r| (0.3..=0.7).contains(r));
                parts.push(format!(
                    "{name}: tv {:.4e} {:.4e} {:.4e}, ratios {r1:.3} {r2:.3}",
                    tvs[0], tvs[1], tvs[2]
                ));
            }
            Ok((ok, parts.join("; ")))
        },
    )
}

pub fn rate_threshold() -> CriterionResult {
    timed(8, "conversion rate threshold at V1/V2", Some(30.0), || {
        let h4 = HermitianObservable::from_integer_levels(&[0, 1, 2, 3], tau());
        let c = PureState::cbit();
        let g = PureState::uniform_superposition(4, &[0, 2, 3]);
        let pairs = [
            ("cbit->cbit", &c, cbit_h(), &c, cbit_h()),
            ("{0,2,3}->cbit", &g, h4.clone(), &c, cbit_h()),
            ("cbit->{0,2,3}", &c, cbit_h(), &g, h4.clone()),
        ];
        let (mut below, mut above) = (true, true);
        let mut parts = Vec::new();
        for (name, a, ha, b, hb) in pairs {
            let ratio = max_rate(a, &ha, b, &hb)?;
            let lo = iid_sweep(a, &ha, b, &hb, 0.9 * ratio, &[256])?[0].tv_error;
            let hi = iid_sweep(a, &ha, b, &hb, 1.1 * ratio, &[256])?[0].tv_error;
            below &= lo < 0.05;
            above &= hi >= 0.1;
            parts.push(format!("{name}: tv(0.9R*) {lo:.4}, tv(1.1R*) {hi:.4}"));
        }
        Ok((
            below && above,
            format!(
                "below-threshold {}, above-threshold {}; {}",
                ok_word(below),
                ok_word(above),
                parts.join("; ")
            ),
        ))
    })
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn qubit_sandwich() -> CriterionResult {
    timed(
        9,
        "SDP fidelity sandwich on noisy c-bits",
        Some(60.0),
        || {
            let mut ok = true;
            let mut worst_gap = 0.0f64;
            let mut parts = Vec::new();
            for lambda in [0.3, 0.6, 0.9] {
                for n in 1..=3 {
                    let (sigma, h) = iid_copies(&noisy_cbit(lambda)?, &cbit_h(), n);
                    let r = conditional_min_entropy(&omega_state(
                        &sigma,
                        &h,
                        &PureState::cbit(),
                        &cbit_h(),
                    )?)?;
                    let f = r.optimum;
                    let lt = 2.0 * f - 1.0;
                    let lhs = lt * lt / (1.0 - lt * lt);
                    let rhs = n as f64 * lambda * lambda / (1.0 - lambda * lambda);
                    ok &= lhs <= rhs + 1e-6
                        && f >= (1.0 + lambda) / 2.0 - 1e-6
                        && r.primal_dual_gap < 1e-7;
                    worst_gap = worst_gap.max(r.primal_dual_gap);
                    parts.push(format!("λ={lambda} n={n}: F*={f:.6}"));
                }
            }
            let b = qubit_infidelity_bound(0.6, 10)?;
            ok &= (b.exact - 0.03927).abs() < 1e-5 && (b.asymptotic - 0.04444).abs() < 1e-5;
            Ok((
                ok,
                format!(
                    "max gap {worst_gap:.2e}; λ=0.6 n=10 exact {:.5} asymptotic {:.5}; {}",
                    b.exact,
                    b.asymptotic,
                    parts.join(", ")
                ),
            ))
        },
    )
}

pub fn bound_resources() -> CriterionResult {
    timed(
        10,
        "full-rank coherent states are bound resources",
        None,
        || {
            let (mut not_bound, mut ratio_range) = (0, (f64::INFINITY, f64::NEG_INFINITY));
            let mut ok = true;
            for t in 0..200 {
                let mut rng = rng_stream(SEED + 10, t);
                let d = rng.random_range(2..=5usize);
                let rho = random_density(&mut rng, d, d);
                let h = random_observable(&mut rng, d);
                if !is_bound_resource(&rho, &h)? {
                    not_bound += 1;
                }
                let floors: Vec<f64> = [0.04, 0.02, 0.01]
                    .iter()
                    .map(|&e| {
                        distillation_copy_floor(&rho, &h, &PureState::cbit(), &cbit_h(), e, 1.0)
                            .map(|v| v.value)
                    })
                    .collect::<Result<_>>()?;
                for w in floors.windows(2) {
                    let r = w[1] / w[0];
                    ratio_range = (ratio_range.0.min(r), ratio_range.1.max(r));
                    ok &= (1.9..=2.1).contains(&r);
                }
            }
            Ok((
                ok && not_bound == 0,
                format!(
                    "not bound: {not_bound}; copy-floor ratios in [{:.4}, {:.4}]",
                    ratio_range.0, ratio_range.1
                ),
            ))
        },
    )
}

pub fn period_fixtures() -> CriterionResult {
    timed(11, "period and overlap-count fixtures", None, || {
        let h = HermitianObservable::from_integer_levels(&[0, 1, 2, 3], tau());
        let eta = PureState::uniform_superposition(4, &[0, 2]);
        let gamma = PureState::uniform_superposition(4, &[0, 2, 3]);
        let eta_period = clock::period(&eta, &h, tau())?;
        let eta_gcd = overlap_copy_count(&extract_distribution(&eta, &h, tau())?.distribution, 16);
        let g_period = clock::period(&gamma, &h, tau())?;
        let g_l = overlap_copy_count(&extract_distribution(&gamma, &h, tau())?.distribution, 16)?;
        let checks = [
            eta_period == tau() / 2.0,
            matches!(eta_gcd, Err(Error::GcdNotOne(2))),
            g_period == tau(),
            g_l == 2,
        ];
        Ok((
            checks.iter().all(|&c| c),
            format!(
                "eta period {:.6}·τ, gcd error {}, gamma period {:.6}·τ, L = {g_l} (expected 2)",
                eta_period / tau(),
                eta_gcd.is_err(),
                g_period / tau()
            ),
        ))
    })
}

pub fn cirac_ratio() -> CriterionResult {
    timed(12, "Cirac comparison ratio 2/(1+λ)", None, || {
        let mut worst = 0.0f64;
        for lambda in [0.3, 0.6, 0.9] {
            let b = qubit_infidelity_bound(lambda, 10)?;
            let c = cirac_comparison(lambda, 10)?;
            worst = worst.max((c / b.asymptotic - 2.0 / (1.0 + lambda)).abs());
        }
        Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
    })
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        purification_identity(),
        ensemble_identity(),
        monotonicity(),
        inequality_chain(),
        near_mixed_limit(),
        fidelity_curvature(),
        translated_poisson_convergence(),
        rate_threshold(),
        qubit_sandwich(),
        bound_resources(),
        period_fixtures(),
        cirac_ratio(),
    ]
}

impl CriterionResult {
    /// `PASS 3 name (detail) [1.2s]`.
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({}) [{:.2}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

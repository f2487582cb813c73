//! Kraus channels, time-translation twirling and covariance checks.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::clock::integer_gap;
use crate::config::TOL;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::{ComplexMatrix, DensityMatrix, HermitianObservable};
use crate::measures;
use crate::random::{
    gaussian_matrix, orthonormalize_columns, random_density, random_integer_levels, rng_from_seed,
    rng_stream,
};

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        for k in &kraus {
            check_dim(d_out, k.rows())?;
            check_dim(d_in, k.cols())?;
        }
        let ch = Self { kraus, d_in, d_out };
        let r = ch.cptp_residual();
        if r > TOL.tol_cptp {
            return Err(Error::InvalidArgument(format!(
                "Σ K†K deviates from I by {r:e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(d)],
            d_in: d,
            d_out: d,
        }
    }

    /// Complete dephasing in the eigenspaces of `H`.
    pub fn dephasing(h: &HermitianObservable) -> Self {
        let kraus = h
            .eigenspaces()
            .iter()
            .map(|s| h.eigen().projector(&s.indices))
            .collect();
        Self {
            kraus,
            d_in: h.dim(),
            d_out: h.dim(),
        }
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Max-abs deviation of `Σ K†K` from the identity.
    pub fn cptp_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        (&sum - &ComplexMatrix::identity(self.d_in)).max_abs()
    }

    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        out
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.d_in, rho.dim())?;
        Ok(DensityMatrix::from_numerical(
            self.apply_matrix(rho.matrix()),
        ))
    }

    /// `Σ K ⊗ K̄`, acting on row-major vectorized inputs.
    pub fn superoperator(&self) -> ComplexMatrix {
        let n_out = self.d_out * self.d_out;
        let n_in = self.d_in * self.d_in;
        let mut s = ComplexMatrix::zeros(n_out, n_in);
        for k in &self.kraus {
            s = &s + &k.kron(&k.conj());
        }
        s
    }
}

/// Haar-like channel from a seeded Stinespring isometry.
pub fn random_channel(d_in: usize, d_out: usize, rank: usize, seed: u64) -> Result<KrausChannel> {
    random_channel_with(&mut rng_from_seed(seed), d_in, d_out, rank)
}

/// Same as [`random_channel`], drawing from a caller-supplied generator.
pub fn random_channel_with(
    rng: &mut impl Rng,
    d_in: usize,
    d_out: usize,
    rank: usize,
) -> Result<KrausChannel> {
    if d_in == 0 || d_out == 0 || rank == 0 || rank > d_in * d_out {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={}",
            d_in * d_out
        )));
    }
    if d_out * rank < d_in {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} too small for a {d_in} → {d_out} channel"
        )));
    }
    let v = orthonormalize_columns(&gaussian_matrix(rng, d_out * rank, d_in));
    let kraus = (0..rank)
        .map(|r| ComplexMatrix::from_fn(d_out, d_in, |i, j| v[(r * d_out + i, j)]))
        .collect();
    Ok(KrausChannel { kraus, d_in, d_out })
}

/// A channel covariant under the two time evolutions.
#[derive(Debug, Clone)]
pub struct TIChannel {
    pub base: KrausChannel,
    pub h_in: HermitianObservable,
    pub h_out: HermitianObservable,
    pub tau: f64,
    /// Bohr-frequency mode `n` of each Kraus operator, in units of `2π/τ`.
    pub mode_index: Vec<i64>,
}

impl TIChannel {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.base.apply(rho)
    }
}

/// Integer offsets `(E_k − E_0)τ/2π` of every eigenvalue.
fn integer_levels(h: &HermitianObservable, tau: f64) -> Result<Vec<i64>> {
    let e = h.eigenvalues();
    e.iter().map(|&x| integer_gap(x, e[0], tau)).collect()
}

/// Projects each Kraus operator onto its Bohr-frequency components.
///
/// For commensurate spectra the components `K_n` with
/// `⟨a|K_n|b⟩ = ⟨a|K|b⟩ δ(n_out(a) − n_in(b) = n)` form a Kraus set of the
/// time-averaged channel exactly: cross terms between different `n` carry
/// a phase `e^{2πi(n−n')t/τ}` that averages to zero over one period.
pub fn twirl(
    ch: &KrausChannel,
    h_in: &HermitianObservable,
    h_out: &HermitianObservable,
    tau: f64,
) -> Result<TIChannel> {
    check_dim(ch.d_in, h_in.dim())?;
    check_dim(ch.d_out, h_out.dim())?;
    let n_in = integer_levels(h_in, tau)?;
    let n_out = integer_levels(h_out, tau)?;
    let (v_in, v_out) = (h_in.eigenvectors(), h_out.eigenvectors());
    let lo = n_out.iter().min().unwrap() - n_in.iter().max().unwrap();
    let hi = n_out.iter().max().unwrap() - n_in.iter().min().unwrap();
    let mut kraus = Vec::new();
    let mut modes = Vec::new();
    for k in &ch.kraus {
        let local = &(&v_out.adjoint() * k) * v_in;
        for n in lo..=hi {
            let part = ComplexMatrix::from_fn(ch.d_out, ch.d_in, |a, b| {
                if n_out[a] - n_in[b] == n {
                    local[(a, b)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            if part.max_abs() > 1e-15 {
                kraus.push(&(v_out * &part) * &v_in.adjoint());
                modes.push(n);
            }
        }
    }
    Ok(TIChannel {
        base: KrausChannel {
            kraus,
            d_in: ch.d_in,
            d_out: ch.d_out,
        },
        h_in: h_in.clone(),
        h_out: h_out.clone(),
        tau,
        mode_index: modes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceCheck {
    pub is_ti: bool,
    pub residual: f64,
    pub samples: usize,
}

/// Checks `𝒰_out(t)∘E = E∘𝒰_in(t)` on the superoperator at equally spaced
/// times. Both sides are trigonometric polynomials in `t` of degree at most
/// `K = span_in + span_out`, so `2K + 1` samples decide equality.
pub fn is_ti(
    ch: &KrausChannel,
    h_in: &HermitianObservable,
    h_out: &HermitianObservable,
    tau: f64,
) -> Result<CovarianceCheck> {
    check_dim(ch.d_in, h_in.dim())?;
    check_dim(ch.d_out, h_out.dim())?;
    let span = |n: &[i64]| n.iter().max().unwrap() - n.iter().min().unwrap();
    let k = span(&integer_levels(h_in, tau)?) + span(&integer_levels(h_out, tau)?);
    let samples = (2 * k + 1) as usize;
    let s = ch.superoperator();
    let mut residual: f64 = 0.0;
    for j in 0..samples {
        let t = j as f64 * tau / samples as f64;
        let (ui, uo) = (h_in.evolution(t), h_out.evolution(t));
        let left = &uo.kron(&uo.conj()) * &s;
        let right = &s * &ui.kron(&ui.conj());
        residual = residual.max((&left - &right).max_abs());
    }
    Ok(CovarianceCheck {
        is_ti: residual < 1e-9,
        residual,
        samples,
    })
}

/// Monotone under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MeasureId {
    Qfi,
    Purity,
    Skew,
    Renyi(f64),
    Cost,
}

impl MeasureId {
    /// Accepts `F`, `P`, `W`, `cost`, and `renyi:<α>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "F" | "qfi" => Ok(Self::Qfi),
            "P" | "purity" => Ok(Self::Purity),
            "W" | "skew" => Ok(Self::Skew),
            "cost" => Ok(Self::Cost),
            _ => {
                let alpha = s
                    .strip_prefix("renyi:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown measure {s:?}")))?;
                if !(alpha > 1.0 && alpha <= 2.0) {
                    return Err(Error::AlphaOutOfRange(alpha));
                }
                Ok(Self::Renyi(alpha))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Qfi => "F".into(),
            Self::Purity => "P".into(),
            Self::Skew => "W".into(),
            Self::Renyi(a) => format!("renyi:{a}"),
            Self::Cost => "cost".into(),
        }
    }

    /// Value on `(ρ, H)`; `None` when infinite.
    pub fn evaluate(
        &self,
        rho: &DensityMatrix,
        h: &HermitianObservable,
        tau: f64,
    ) -> Result<Option<f64>> {
        let finite = |v: measures::MeasureValue| v.is_finite().then_some(v.value);
        Ok(match *self {
            Self::Qfi => Some(measures::qfi(rho, h)?),
            Self::Purity => finite(measures::purity_of_coherence(rho, h)?),
            Self::Skew => Some(measures::skew_information(rho, h)?),
            Self::Renyi(a) => finite(measures::renyi_purity_monotone(rho, h, a)?),
            Self::Cost => {
                let s = tau / (2.0 * std::f64::consts::PI);
                Some(s * s * measures::qfi(rho, h)?)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCase {
    pub trial: u64,
    pub d_in: usize,
    pub d_out: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub measure: String,
    pub trials: u64,
    pub seed: u64,
    /// Largest `after − before`; infinite outputs from finite inputs count
    /// as infinite violations.
    pub max_violation: f64,
    /// Trials skipped because the input value was infinite.
    pub infinite_inputs: u64,
    pub worst_case: Option<WorstCase>,
}

impl MonotonicityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_violation < tol
    }
}

/// Random `(ρ, H_in, H_out, E)` for one trial: dims 2–4, integer levels in
/// `0..=2` at `τ = 2π`, full-rank `ρ`, channel twirled before use.
pub fn random_ti_instance(seed: u64, trial: u64) -> Result<(DensityMatrix, TIChannel)> {
    let mut rng = rng_stream(seed, trial);
    let tau = 2.0 * std::f64::consts::PI;
    let d_in = rng.random_range(2..=4usize);
    let d_out = rng.random_range(2..=4usize);
    let h_in =
        HermitianObservable::from_integer_levels(&random_integer_levels(&mut rng, d_in, 2), tau);
    let h_out =
        HermitianObservable::from_integer_levels(&random_integer_levels(&mut rng, d_out, 2), tau);
    let rho = random_density(&mut rng, d_in, d_in);
    let rank = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out);
    let ch = random_channel_with(&mut rng, d_in, d_out, rank)?;
    Ok((rho, twirl(&ch, &h_in, &h_out, tau)?))
}

/// Compares a measure before and after random twirled channels.
pub fn monotonicity_suite(
    measure: MeasureId,
    trials: u64,
    seed: u64,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut report = MonotonicityReport {
        measure: measure.label(),
        trials,
        seed,
        max_violation: f64::NEG_INFINITY,
        infinite_inputs: 0,
        worst_case: None,
    };
    for trial in 0..trials {
        let (rho, ch) = random_ti_instance(seed, trial)?;
        let Some(before) = measure.evaluate(&rho, &ch.h_in, ch.tau)? else {
            report.infinite_inputs += 1;
            continue;
        };
        let out = ch.apply(&rho)?;
        let after = measure
            .evaluate(&out, &ch.h_out, ch.tau)?
            .unwrap_or(f64::INFINITY);
        let v = after - before;
        if v > report.max_violation {
            report.max_violation = v;
            report.worst_case = Some(WorstCase {
                trial,
                d_in: ch.base.d_in,
                d_out: ch.base.d_out,
                before,
                after,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{dephase, PureState};
    use crate::random::random_density;
    use std::f64::consts::PI;

    fn hq() -> HermitianObservable {
        HermitianObservable::from_integer_levels(&[0, 1], 2.0 * PI)
    }

    #[test]
    fn random_channels_are_cptp_and_deterministic() {
        let a = random_channel(3, 3, 4, 5).unwrap();
        assert!(a.cptp_residual() < 1e-10);
        assert_eq!(a, random_channel(3, 3, 4, 5).unwrap());
        let u = random_channel(3, 3, 1, 9).unwrap();
        let k = &u.kraus_ops()[0];
        assert!((&(k * &k.adjoint()) - &ComplexMatrix::identity(3)).max_abs() < 1e-12);
        assert!(random_channel(4, 2, 1, 1).is_err());
        assert!(random_channel(2, 2, 5, 1).is_err());
    }

    #[test]
    fn twirl_fixed_points() {
        let tau = 2.0 * PI;
        let h = HermitianObservable::from_integer_levels(&[0, 1, 1, 2], tau);
        let d = KrausChannel::dephasing(&h);
        let t = twirl(&d, &h, &h, tau).unwrap();
        assert!((&t.base.superoperator() - &d.superoperator()).max_abs() < 1e-10);
        let ch = random_channel(3, 2, 3, 2).unwrap();
        let zero = twirl(
            &ch,
            &HermitianObservable::zero(3),
            &HermitianObservable::zero(2),
            tau,
        )
        .unwrap();
        assert!((&zero.base.superoperator() - &ch.superoperator()).max_abs() < 1e-12);
    }

    #[test]
    fn twirl_matches_time_average() {
        let tau = 2.0 * PI;
        let ch = random_channel(2, 2, 3, 5).unwrap();
        let t = twirl(&ch, &hq(), &hq(), tau).unwrap();
        let n = 7;
        let mut avg = ComplexMatrix::zeros(4, 4);
        for j in 0..n {
            let time = j as f64 * tau / n as f64;
            let u = hq().evolution(time);
            let ud = u.adjoint();
            let pre = ud.kron(&ud.conj());
            let post = u.kron(&u.conj());
            avg = &avg + &(&(&pre * &ch.superoperator()) * &post).scale(1.0 / n as f64);
        }
        assert!((&avg - &t.base.superoperator()).max_abs() < 1e-12);
        assert!(t.base.cptp_residual() < 1e-10);
        let twice = twirl(&t.base, &hq(), &hq(), tau).unwrap();
        assert!((&twice.base.superoperator() - &t.base.superoperator()).max_abs() < 1e-10);
    }

    #[test]
    fn covariance_checks() {
        let tau = 2.0 * PI;
        let ch = random_channel(2, 2, 3, 5).unwrap();
        let raw = is_ti(&ch, &hq(), &hq(), tau).unwrap();
        assert!(!raw.is_ti && raw.residual > 1e-3);
        let t = twirl(&ch, &hq(), &hq(), tau).unwrap();
        assert!(is_ti(&t.base, &hq(), &hq(), tau).unwrap().residual < 1e-9);
        let d = is_ti(&KrausChannel::dephasing(&hq()), &hq(), &hq(), tau).unwrap();
        assert!(d.is_ti && d.residual < 1e-12);
    }

    #[test]
    fn apply_examples() {
        let rho = random_density(&mut rng_from_seed(3), 2, 2);
        let out = KrausChannel::identity(2).apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs() < 1e-15);
        let deph = KrausChannel::dephasing(&hq()).apply(&rho).unwrap();
        assert!((deph.matrix() - dephase(&rho, &hq()).unwrap().matrix()).max_abs() < 1e-15);
        assert!(measures::qfi(&deph, &hq()).unwrap() < 1e-14);
        let ch = random_channel(2, 3, 2, 8).unwrap();
        assert!((ch.apply_matrix(rho.matrix()).trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incoherent_inputs_stay_incoherent() {
        let tau = 2.0 * PI;
        let h3 = HermitianObservable::from_integer_levels(&[0, 1, 2], tau);
        let ch = twirl(&random_channel(2, 3, 3, 4).unwrap(), &hq(), &h3, tau).unwrap();
        let out = ch.apply(&PureState::basis(2, 1).density()).unwrap();
        assert!(measures::qfi(&out, &h3).unwrap() < 1e-10);
    }

    #[test]
    fn small_suites() {
        for m in [
            MeasureId::Qfi,
            MeasureId::Purity,
            MeasureId::Skew,
            MeasureId::Renyi(1.5),
            MeasureId::Cost,
        ] {
            let r = monotonicity_suite(m, 40, 11).unwrap();
            assert!(r.passed(1e-8), "{r:?}");
        }
        assert_eq!(MeasureId::parse("renyi:2").unwrap(), MeasureId::Renyi(2.0));
        assert!(MeasureId::parse("renyi:3").is_err());
    }
}

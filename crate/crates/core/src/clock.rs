//! Integer energy distributions of periodic states and their
//! translated-Poisson limits.
//!
//! A state of period `τ` only occupies energies `E_0 + 2πn/τ`; its energy
//! distribution `p(n) = ⟨ψ|Π_{2πn/τ}|ψ⟩` is a pmf on the integers, and the
//! energy distribution of `m` copies is the `m`-fold convolution.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::TOL;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::{ComplexMatrix, DensityMatrix, Eigenspace, HermitianObservable, PureState};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rounds `(e1 − e2)·τ/2π` to an integer, failing beyond `level_tol`.
pub(crate) fn integer_gap(e1: f64, e2: f64, tau: f64) -> Result<i64> {
    let x = (e1 - e2) * tau / (2.0 * PI);
    let k = x.round();
    if (x - k).abs() > TOL.level_tol * x.abs().max(1.0) {
        return Err(Error::IncommensurateSpectrum(e1 - e2));
    }
    Ok(k as i64)
}

/// Probability mass function on a window `[offset, offset + len)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegerDistribution {
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl IntegerDistribution {
    pub fn new(offset: i64, probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument(
                "probabilities must be nonnegative".into(),
            ));
        }
        if (total - 1.0).abs() > TOL.tol_prob * (probs.len() as f64).max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { offset, probs }.trimmed())
    }

    pub(crate) fn raw(offset: i64, probs: Vec<f64>) -> Self {
        Self { offset, probs }
    }

    pub fn point_mass(n: i64) -> Self {
        Self {
            offset: n,
            probs: vec![1.0],
        }
    }

    /// Uniform over the listed integers.
    pub fn uniform_on(support: &[i64]) -> Self {
        let lo = *support.iter().min().expect("nonempty");
        let hi = *support.iter().max().expect("nonempty");
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for &n in support {
            probs[(n - lo) as usize] += 1.0 / support.len() as f64;
        }
        Self { offset: lo, probs }
    }

    /// Mass at `n`.
    pub fn get(&self, n: i64) -> f64 {
        let i = n - self.offset;
        if i < 0 || i as usize >= self.probs.len() {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    /// Highest index in the window.
    pub fn max_index(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Drops exactly-zero entries at both ends.
    pub fn trimmed(mut self) -> Self {
        let first = self.probs.iter().position(|&p| p > 0.0).unwrap_or(0);
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        self.probs = self.probs[first..=last].to_vec();
        self.offset += first as i64;
        self
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| p * f((self.offset + i as i64) as f64))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.expectation(|x| (x - mu).powi(2))
    }

    /// Translate by `k`: the result has mass `p(n − k)` at `n`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            offset: self.offset + k,
            probs: self.probs.clone(),
        }
    }

    pub fn support(&self) -> Vec<i64> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| self.offset + i as i64)
            .collect()
    }

    /// gcd of differences between support points (0 for a point mass).
    pub fn support_gcd(&self) -> i64 {
        let s = self.support();
        s.iter().fold(0, |g, &n| gcd(g, n - s[0]))
    }

    /// Linear convolution.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, &a) in self.probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.probs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self {
            offset: self.offset + other.offset,
            probs: out,
        }
    }

    /// `m`-fold self-convolution by repeated squaring.
    pub fn convolve_n(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "copy count must be at least 1".into(),
            ));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut k = m;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.convolve(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.convolve(&base);
        }
        Ok(result.expect("m ≥ 1"))
    }

    /// `½ Σ |p(n) − q(n)|` over the union window.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.max_index().max(other.max_index());
        0.5 * (lo..=hi)
            .map(|n| (self.get(n) - other.get(n)).abs())
            .sum::<f64>()
    }
}

/// Total variation distance, free-function form.
pub fn tv_distance(p: &IntegerDistribution, q: &IntegerDistribution) -> f64 {
    p.tv_distance(q)
}

/// `m`-fold convolution, free-function form.
pub fn convolve_n(p: &IntegerDistribution, m: usize) -> Result<IntegerDistribution> {
    p.convolve_n(m)
}

/// Pure state whose occupied energies sit on the lattice `E_0 + 2πn/τ`.
#[derive(Debug, Clone)]
pub struct PeriodicClockState {
    pub state: PureState,
    pub hamiltonian: HermitianObservable,
    pub tau: f64,
    /// Occupied `n`, shifted so the lowest is 0.
    pub levels: Vec<i64>,
    pub distribution: IntegerDistribution,
}

impl PeriodicClockState {
    /// gcd of level differences; 0 for an eigenstate.
    pub fn level_gcd(&self) -> i64 {
        self.levels.iter().fold(0, |g, &n| gcd(g, n))
    }
}

fn occupied_spaces(psi: &PureState, h: &HermitianObservable) -> Vec<(Eigenspace, f64)> {
    h.eigenspaces()
        .into_iter()
        .filter_map(|sp| {
            let w: f64 = sp
                .indices
                .iter()
                .map(|&k| {
                    let v = h.eigenvectors().col(k);
                    v.iter()
                        .zip(psi.amplitudes())
                        .map(|(a, b)| a.conj() * b)
                        .sum::<num_complex::Complex64>()
                        .norm_sqr()
                })
                .sum();
            (w > TOL.rank_cutoff).then_some((sp, w))
        })
        .collect()
}

/// Energy distribution `p(n)` of `ψ`, reference-shifted so `n_min = 0`.
pub fn extract_distribution(
    psi: &PureState,
    h: &HermitianObservable,
    tau: f64,
) -> Result<PeriodicClockState> {
    check_dim(psi.dim(), h.dim())?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} must be positive"
        )));
    }
    let occ = occupied_spaces(psi, h);
    let e0 = occ[0].0.value;
    let mut levels = Vec::with_capacity(occ.len());
    for (sp, _) in &occ {
        levels.push(integer_gap(sp.value, e0, tau)?);
    }
    let total: f64 = occ.iter().map(|(_, w)| w).sum();
    let mut probs = vec![0.0; (*levels.last().unwrap() + 1) as usize];
    for ((_, w), &n) in occ.iter().zip(&levels) {
        probs[n as usize] += w / total;
    }
    Ok(PeriodicClockState {
        state: psi.clone(),
        hamiltonian: h.clone(),
        tau,
        levels,
        distribution: IntegerDistribution::raw(0, probs),
    })
}

/// Divisor `k` such that `ψ` has period `τ/k`; `None` for an eigenstate.
pub fn pure_period_divisor(
    psi: &PureState,
    h: &HermitianObservable,
    tau: f64,
) -> Result<Option<i64>> {
    let g = extract_distribution(psi, h, tau)?.level_gcd();
    Ok((g > 0).then_some(g))
}

/// Period `τ_ref / gcd(level differences)`; 0 flags an eigenstate.
pub fn period(psi: &PureState, h: &HermitianObservable, tau_ref: f64) -> Result<f64> {
    Ok(match pure_period_divisor(psi, h, tau_ref)? {
        Some(g) => tau_ref / g as f64,
        None => 0.0,
    })
}

/// Smallest positive `t` with `|⟨ψ|e^{-iHt}|ψ⟩| = 1`, found from the
/// occupied gaps by a tolerant real gcd; 0 for an eigenstate.
pub fn intrinsic_period(psi: &PureState, h: &HermitianObservable) -> Result<f64> {
    check_dim(psi.dim(), h.dim())?;
    let occ = occupied_spaces(psi, h);
    let e0 = occ[0].0.value;
    let gaps: Vec<f64> = occ.iter().skip(1).map(|(sp, _)| sp.value - e0).collect();
    if gaps.is_empty() {
        return Ok(0.0);
    }
    let scale = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let tol = 1e-9 * scale;
    let mut g = 0.0f64;
    for &x in &gaps {
        let (mut a, mut b) = (g.max(x), g.min(x));
        let mut steps = 0;
        while b > tol {
            (a, b) = (b, a % b);
            if b > a - tol && b > tol {
                b = 0.0;
            }
            steps += 1;
            if steps > 200 {
                return Err(Error::IncommensurateSpectrum(x));
            }
        }
        g = a;
    }
    // Confirm each gap is an integer multiple of the candidate unit.
    for &x in &gaps {
        let k = x / g;
        if (k - k.round()).abs() > 1e-7 || k.round() > 1e6 {
            return Err(Error::IncommensurateSpectrum(x));
        }
    }
    Ok(2.0 * PI / g)
}

/// Coherence-connected energy sectors of a mixed state.
#[derive(Debug, Clone)]
pub struct CoherenceStructure {
    pub spaces: Vec<Eigenspace>,
    /// Groups of indices into `spaces` linked by `Π_a ρ Π_b ≠ 0`.
    pub components: Vec<Vec<usize>>,
    /// gcd of the integer gaps of coherent pairs; 0 if incoherent.
    pub gcd: i64,
}

impl CoherenceStructure {
    pub fn component_projectors(&self, h: &HermitianObservable) -> Vec<ComplexMatrix> {
        self.components
            .iter()
            .map(|c| {
                let idx: Vec<usize> = c
                    .iter()
                    .flat_map(|&s| self.spaces[s].indices.clone())
                    .collect();
                h.eigen().projector(&idx)
            })
            .collect()
    }

    /// Period of the state in units of `τ`: `1/gcd`, or 0 if incoherent.
    pub fn period_fraction(&self) -> f64 {
        if self.gcd == 0 {
            0.0
        } else {
            1.0 / self.gcd as f64
        }
    }
}

/// Sectors of `ρ` under `H`, with the gcd of coherent level gaps.
///
/// Offsets between disconnected sectors are unconstrained; only gaps that
/// carry coherence must be multiples of `2π/τ`.
pub fn coherence_structure(
    rho: &DensityMatrix,
    h: &HermitianObservable,
    tau: f64,
) -> Result<CoherenceStructure> {
    check_dim(rho.dim(), h.dim())?;
    let spaces = h.eigenspaces();
    let projectors: Vec<ComplexMatrix> = spaces
        .iter()
        .map(|s| h.eigen().projector(&s.indices))
        .collect();
    let occupied: Vec<usize> = (0..spaces.len())
        .filter(|&a| projectors[a].re_trace_product(rho.matrix()) > TOL.rank_cutoff)
        .collect();
    let mut parent: Vec<usize> = (0..spaces.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut g = 0i64;
    for (i, &a) in occupied.iter().enumerate() {
        for &b in &occupied[i + 1..] {
            let block = &(&projectors[a] * rho.matrix()) * &projectors[b];
            if block.max_abs() <= TOL.rank_cutoff {
                continue;
            }
            g = gcd(g, integer_gap(spaces[b].value, spaces[a].value, tau)?);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<(usize, usize)> = Vec::new();
    for &a in &occupied {
        let r = find(&mut parent, a);
        match root_of.iter().find(|(root, _)| *root == r) {
            Some(&(_, c)) => components[c].push(a),
            None => {
                root_of.push((r, components.len()));
                components.push(vec![a]);
            }
        }
    }
    Ok(CoherenceStructure {
        spaces,
        components,
        gcd: g,
    })
}

/// Smallest `L ≤ L_max` such that `p^{*L}` overlaps its own unit shift.
pub fn overlap_copy_count(p: &IntegerDistribution, l_max: usize) -> Result<usize> {
    let g = p.support_gcd();
    if g != 1 {
        return Err(Error::GcdNotOne(g));
    }
    let mut conv = p.clone();
    for l in 1..=l_max {
        if l > 1 {
            conv = conv.convolve(p);
        }
        if conv.tv_distance(&conv.shift(1)) < 1.0 - TOL.tol_prob {
            return Ok(l);
        }
    }
    Err(Error::SearchExhausted(l_max))
}

/// Poisson variable shifted by an integer so that the mean is `μ` and the
/// variance lies in `[σ², σ² + 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct TranslatedPoisson {
    pub mu: f64,
    pub sigma2: f64,
    pub shift: i64,
    pub gamma: f64,
    pub distribution: IntegerDistribution,
}

impl TranslatedPoisson {
    /// Variance of the underlying Poisson variable, `σ² + γ`.
    pub fn poisson_rate(&self) -> f64 {
        self.sigma2 + self.gamma
    }
}

/// Poisson pmf on `[0, ∞)`, truncated so each dropped tail is below `eps/2`.
fn poisson_window(lambda: f64, eps: f64) -> IntegerDistribution {
    if lambda <= 0.0 {
        return IntegerDistribution::point_mass(0);
    }
    let kmax = (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as usize;
    let ln_lambda = lambda.ln();
    let mut ln_fact = 0.0;
    let mut probs = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        probs.push((k as f64 * ln_lambda - lambda - ln_fact).exp());
    }
    let mut lo = 0;
    let mut dropped = 0.0;
    while lo + 1 < probs.len() && dropped + probs[lo] < eps / 2.0 {
        dropped += probs[lo];
        lo += 1;
    }
    let mut hi = probs.len() - 1;
    dropped = 0.0;
    while hi > lo && dropped + probs[hi] < eps / 2.0 {
        dropped += probs[hi];
        hi -= 1;
    }
    IntegerDistribution::raw(lo as i64, probs[lo..=hi].to_vec())
}

/// `TP(μ, σ²)`: `Z − s ~ Poisson(σ² + γ)` with `s = ⌊μ − σ²⌋`, `γ = μ − σ² − s`.
pub fn translated_poisson(mu: f64, sigma2: f64) -> Result<TranslatedPoisson> {
    if !(sigma2 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma2 = {sigma2} must be nonnegative"
        )));
    }
    let s = (mu - sigma2).floor();
    let gamma = mu - sigma2 - s;
    let dist = poisson_window(sigma2 + gamma, TOL.tail_eps).shift(s as i64);
    Ok(TranslatedPoisson {
        mu,
        sigma2,
        shift: s as i64,
        gamma,
        distribution: dist,
    })
}

/// `tv(p^{*m}, TP(mμ, mσ²))`.
pub fn tv_to_translated_poisson(p: &IntegerDistribution, m: usize) -> Result<f64> {
    let pm = p.convolve_n(m)?;
    let tp = translated_poisson(m as f64 * p.mean(), m as f64 * p.variance())?;
    Ok(pm.tv_distance(&tp.distribution))
}

/// Per-copy constants of the translated-Poisson error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarbourTerms {
    /// Per-copy standard deviation.
    pub a: f64,
    /// `ν`, capped at ½.
    pub b: f64,
    /// `φ/σ²`.
    pub c: f64,
    pub phi: f64,
    pub nu: f64,
}

/// `φ = E[X(X−1)] + |μ−σ²|/σ² · E[(X−1)(X−2)] + E|X(X−1)(X−2)|/σ²`
/// and `ν = min(½, 1 − tv(p, p shifted by 1))`.
pub fn barbour_terms(p: &IntegerDistribution) -> Result<BarbourTerms> {
    let mu = p.mean();
    let var = p.variance();
    if var <= 1e-15 {
        return Err(Error::ZeroVariance);
    }
    let phi = p.expectation(|x| x * (x - 1.0))
        + (mu - var).abs() / var * p.expectation(|x| (x - 1.0) * (x - 2.0))
        + p.expectation(|x| (x * (x - 1.0) * (x - 2.0)).abs()) / var;
    let nu = (1.0 - p.tv_distance(&p.shift(1))).min(0.5);
    if nu <= TOL.tol_prob {
        return Err(Error::ZeroNu);
    }
    Ok(BarbourTerms {
        a: var.sqrt(),
        b: nu,
        c: phi / var,
        phi,
        nu,
    })
}

/// Upper bound `c/√(mb − ½) + 2/(ma)` on `tv(p^{*m}, TP(mμ, mσ²))`;
/// infinite while `mb ≤ ½`.
pub fn barbour_bound(p: &IntegerDistribution, m: usize) -> Result<f64> {
    let t = barbour_terms(p)?;
    let mf = m as f64;
    let inner = mf * t.b - 0.5;
    if inner <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(t.c / inner.sqrt() + 2.0 / (mf * t.a))
}

/// `min{x, √(2/e)(√(σ²+x) − √σ²)}`: TV distance bound between
/// `Poisson(σ²)` and `Poisson(σ² + x)`.
pub fn poisson_distance_bound(sigma2: f64, x: f64) -> f64 {
    x.min((2.0 / std::f64::consts::E).sqrt() * ((sigma2 + x).sqrt() - sigma2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern() -> IntegerDistribution {
        IntegerDistribution::uniform_on(&[0, 1])
    }

    fn gapped() -> IntegerDistribution {
        IntegerDistribution::uniform_on(&[0, 2, 3])
    }

    fn h4() -> HermitianObservable {
        HermitianObservable::from_integer_levels(&[0, 1, 2, 3, 4, 5], 2.0 * PI)
    }

    #[test]
    fn cbit_distribution() {
        let tau = 1.7;
        let h = HermitianObservable::diagonal(&[PI / tau, -PI / tau]);
        let c = extract_distribution(&PureState::cbit(), &h, tau).unwrap();
        assert_eq!(c.distribution.probs.len(), 2);
        assert!((c.distribution.probs[0] - 0.5).abs() < 1e-14);
        assert_eq!(c.levels, vec![0, 1]);
    }

    #[test]
    fn gapped_distribution_and_periods() {
        let tau = 2.0 * PI;
        let psi = PureState::uniform_superposition(6, &[0, 2, 3]);
        let c = extract_distribution(&psi, &h4(), tau).unwrap();
        assert_eq!(c.levels, vec![0, 2, 3]);
        assert!((c.distribution.get(2) - 1.0 / 3.0).abs() < 1e-14);
        let eta = PureState::uniform_superposition(6, &[0, 2]);
        assert_eq!(period(&eta, &h4(), tau).unwrap(), tau / 2.0);
        let gamma = PureState::uniform_superposition(6, &[0, 2, 5]);
        assert_eq!(period(&gamma, &h4(), tau).unwrap(), tau);
        assert_eq!(period(&PureState::basis(6, 3), &h4(), tau).unwrap(), 0.0);
        let point = extract_distribution(&PureState::basis(6, 3), &h4(), tau).unwrap();
        assert_eq!(point.distribution.probs, vec![1.0]);
    }

    #[test]
    fn incommensurate_levels_are_rejected() {
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 2.5]);
        let psi = PureState::uniform_superposition(3, &[0, 2]);
        assert!(matches!(
            extract_distribution(&psi, &h, 2.0 * PI),
            Err(Error::IncommensurateSpectrum(_))
        ));
    }

    #[test]
    fn intrinsic_period_of_gapped_states() {
        let psi = PureState::uniform_superposition(6, &[0, 2, 4]);
        assert!((intrinsic_period(&psi, &h4()).unwrap() - PI).abs() < 1e-9);
        let psi = PureState::uniform_superposition(6, &[0, 2, 3]);
        assert!((intrinsic_period(&psi, &h4()).unwrap() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn convolution_examples() {
        let b2 = bern().convolve_n(2).unwrap();
        assert_eq!(b2.probs, vec![0.25, 0.5, 0.25]);
        let g2 = gapped().convolve_n(2).unwrap();
        let expected = [1.0, 0.0, 2.0, 2.0, 1.0, 2.0, 1.0].map(|x: f64| x / 9.0);
        for (n, e) in expected.iter().enumerate() {
            assert!((g2.get(n as i64) - e).abs() < 1e-15);
        }
        assert_eq!(
            IntegerDistribution::point_mass(3).convolve_n(5).unwrap(),
            IntegerDistribution::point_mass(15)
        );
        assert!(bern().convolve_n(0).is_err());
    }

    #[test]
    fn tv_examples() {
        assert_eq!(bern().tv_distance(&bern()), 0.0);
        assert_eq!(bern().tv_distance(&bern().shift(5)), 1.0);
        assert!((bern().tv_distance(&bern().shift(1)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overlap_counts() {
        assert_eq!(overlap_copy_count(&bern(), 10).unwrap(), 1);
        // {0,2,3} already meets its shift at 3.
        assert_eq!(overlap_copy_count(&gapped(), 10).unwrap(), 1);
        assert_eq!(
            overlap_copy_count(&IntegerDistribution::uniform_on(&[0, 3, 5]), 10).unwrap(),
            2
        );
        assert!(matches!(
            overlap_copy_count(&IntegerDistribution::uniform_on(&[0, 2]), 10),
            Err(Error::GcdNotOne(2))
        ));
        let far = IntegerDistribution::uniform_on(&[0, 5, 7]);
        let l = overlap_copy_count(&far, 50).unwrap();
        let pl = far.convolve_n(l - 1).unwrap();
        assert!(pl.tv_distance(&pl.shift(1)) >= 1.0 - 1e-12 || l == 1);
        assert!(matches!(
            overlap_copy_count(&far, 1),
            Err(Error::SearchExhausted(1))
        ));
    }

    #[test]
    fn translated_poisson_example() {
        let tp = translated_poisson(3.7, 2.0).unwrap();
        assert_eq!(tp.shift, 1);
        assert!((tp.gamma - 0.7).abs() < 1e-12);
        assert!((tp.distribution.mean() - 3.7).abs() < 1e-10);
        assert!((tp.distribution.variance() - 2.7).abs() < 1e-10);
        let pm = translated_poisson(5.0, 0.0).unwrap();
        assert_eq!(pm.distribution, IntegerDistribution::point_mass(5));
        let exact = translated_poisson(6.0, 2.0).unwrap();
        assert_eq!(exact.gamma, 0.0);
        assert_eq!(exact.shift, 4);
    }

    #[test]
    fn bernoulli_barbour_constants() {
        let t = barbour_terms(&bern()).unwrap();
        assert!((t.phi - 1.0).abs() < 1e-15);
        assert!((t.c - 4.0).abs() < 1e-14);
        assert!((t.a - 0.5).abs() < 1e-15);
        assert_eq!(t.nu, 0.5);
        let b = barbour_bound(&bern(), 100).unwrap();
        let closed = 4.0 / (49.5f64).sqrt() + 0.04;
        assert!((b - closed).abs() < 1e-12);
        assert!((b - 0.6086).abs() < 1e-3);
        assert!(tv_to_translated_poisson(&bern(), 100).unwrap() <= b);
        assert!(barbour_bound(&bern(), 1_000_000).unwrap() < 0.01);
        assert!(matches!(
            barbour_terms(&IntegerDistribution::point_mass(2)),
            Err(Error::ZeroVariance)
        ));
        assert!(matches!(
            barbour_terms(&IntegerDistribution::uniform_on(&[0, 2])),
            Err(Error::ZeroNu)
        ));
    }

    #[test]
    fn poisson_distance() {
        assert_eq!(poisson_distance_bound(4.0, 0.0), 0.0);
        let b = poisson_distance_bound(4.0, 1.0);
        assert!((b - 0.2025).abs() < 1e-4);
        let p4 = poisson_window(4.0, 1e-15);
        let p5 = poisson_window(5.0, 1e-15);
        assert!(p4.tv_distance(&p5) <= b);
    }

    #[test]
    fn mixed_state_structure() {
        let tau = 2.0 * PI;
        let h = HermitianObservable::diagonal(&[0.0, 1.0, 0.5, 1.5]);
        let mut m = ComplexMatrix::from_real_diag(&[0.25; 4]);
        m[(0, 1)] = num_complex::Complex64::new(0.1, 0.0);
        m[(1, 0)] = num_complex::Complex64::new(0.1, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let s = coherence_structure(&rho, &h, tau).unwrap();
        assert_eq!(s.gcd, 1);
        assert_eq!(s.components.len(), 3);
    }
}

//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// One record holding every tolerance used in the crate.
///
/// Library functions read [`Tolerances::DEFAULT`]; the record is exposed so
/// front ends can print or serialize the values a run used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max-abs asymmetry accepted for a Hermitian input.
    pub tol_herm: f64,
    /// Eigendecomposition reconstruction residual.
    pub tol_recon: f64,
    /// Eigenvalues closer than this are one eigenspace.
    pub gap_cutoff: f64,
    /// Eigenvalues of a state above this are in the support.
    pub rank_cutoff: f64,
    /// QFI pairs with `p_j + p_k` at or below this are skipped.
    pub pair_cutoff: f64,
    pub tol_trace: f64,
    pub tol_psd: f64,
    pub tol_norm: f64,
    /// Generic slack for identities between computed quantities.
    pub tol_num: f64,
    /// Max-abs commutator norm treated as zero.
    pub tol_commute: f64,
    pub tol_cptp: f64,
    /// SDP feasibility slack.
    pub tol_sdp: f64,
    /// SDP duality gap target.
    pub gap_tol: f64,
    pub sdp_max_iter: usize,
    /// Truncated Poisson tail mass.
    pub tail_eps: f64,
    /// Mass tolerance for integer distributions.
    pub tol_prob: f64,
    /// Level quantization slack, in units of `2π/τ`.
    pub level_tol: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        tol_herm: 1e-10,
        tol_recon: 1e-10,
        gap_cutoff: 1e-8,
        rank_cutoff: 1e-10,
        pair_cutoff: 1e-14,
        tol_trace: 1e-10,
        tol_psd: 1e-10,
        tol_norm: 1e-10,
        tol_num: 1e-10,
        tol_commute: 1e-8,
        tol_cptp: 1e-10,
        tol_sdp: 1e-9,
        gap_tol: 1e-7,
        sdp_max_iter: 500,
        tail_eps: 1e-12,
        tol_prob: 1e-12,
        level_tol: 1e-9,
    };

    /// True when every tolerance is strictly positive.
    pub fn is_valid(&self) -> bool {
        [
            self.tol_herm,
            self.tol_recon,
            self.gap_cutoff,
            self.rank_cutoff,
            self.pair_cutoff,
            self.tol_trace,
            self.tol_psd,
            self.tol_norm,
            self.tol_num,
            self.tol_commute,
            self.tol_cptp,
            self.tol_sdp,
            self.gap_tol,
            self.tail_eps,
            self.tol_prob,
            self.level_tol,
        ]
        .iter()
        .all(|&t| t > 0.0)
            && self.sdp_max_iter > 0
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Shorthand for the default record.
pub const TOL: Tolerances = Tolerances::DEFAULT;

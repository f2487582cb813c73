//! Small dense primal-dual interior point solver for block-diagonal
//! complex semidefinite programs.
//!
//! Primal: `min ⟨C, X⟩` s.t. `⟨A_k, X⟩ = b_k`, `X ⪰ 0`.
//! Dual: `max bᵀy` s.t. `S = C − Σ y_k A_k ⪰ 0`.
//!
//! Every matrix is a list of Hermitian blocks and `⟨A, B⟩ = Re Tr(AB)`.
//! Search directions are HKM with a Mehrotra predictor-corrector step.

use crate::error::{Error, Result};
use crate::hermitian::{jacobi, ComplexMatrix};

pub type Blocks = Vec<ComplexMatrix>;

#[derive(Debug, Clone)]
pub struct BlockSdp {
    pub c: Blocks,
    /// `a[k]` is the `k`-th constraint matrix, one entry per block.
    pub a: Vec<Blocks>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Stop once `⟨X,S⟩` falls below this, relative to the objective scale.
    pub tol: f64,
    /// Relative primal and dual residuals required alongside `tol`.
    pub feas_tol: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Blocks,
    pub y: Vec<f64>,
    pub s: Blocks,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    /// False when the iteration stopped early; callers should judge the
    /// returned point by an independent certificate.
    pub converged: bool,
}

fn inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re_trace_product(y)).sum()
}

fn combine(a: &Blocks, sa: f64, b: &Blocks, sb: f64) -> Blocks {
    a.iter()
        .zip(b)
        .map(|(x, y)| &x.scale(sa) + &y.scale(sb))
        .collect()
}

fn sym(m: &ComplexMatrix) -> ComplexMatrix {
    m.hermitian_part()
}

impl BlockSdp {
    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    /// Total size `Σ n_blk`.
    pub fn total_dim(&self) -> usize {
        self.c.iter().map(|m| m.rows()).sum()
    }

    fn apply(&self, x: &Blocks) -> Vec<f64> {
        self.a.iter().map(|ak| inner(ak, x)).collect()
    }

    fn adjoint(&self, y: &[f64]) -> Blocks {
        let mut out: Blocks = self
            .c
            .iter()
            .map(|m| ComplexMatrix::zeros(m.rows(), m.cols()))
            .collect();
        for (ak, &yk) in self.a.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(ak) {
                *o = &*o + &a.scale(yk);
            }
        }
        out
    }

    /// Dual slack `C − 𝒜*(y)`.
    pub fn slack(&self, y: &[f64]) -> Blocks {
        let ay = self.adjoint(y);
        self.c
            .iter()
            .zip(&ay)
            .map(|(c, a)| (c - a).hermitian_part())
            .collect()
    }
}

/// Smallest eigenvalue over all blocks.
pub fn min_eigenvalue(m: &Blocks) -> f64 {
    m.iter()
        .filter(|b| b.rows() > 0)
        .map(|b| jacobi(&b.hermitian_part()).values[0])
        .fold(f64::INFINITY, f64::min)
}

/// Largest `α` keeping `X + αΔX ⪰ 0` (infinite if `ΔX ⪰ 0`).
fn max_step(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        if xb.rows() == 0 {
            continue;
        }
        let e = jacobi(&xb.hermitian_part());
        let inv_sqrt = e.map_spectrum(|l| 1.0 / l.max(1e-300).sqrt());
        let z = &(&inv_sqrt * db) * &inv_sqrt;
        let lmin = jacobi(&z.hermitian_part()).values[0];
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn inverse(m: &ComplexMatrix) -> ComplexMatrix {
    jacobi(&m.hermitian_part()).map_spectrum(|l| 1.0 / l)
}

/// Solves `M z = r` for symmetric positive definite `M`; `None` if the
/// factorization breaks down.
pub(crate) fn cholesky_solve(m: &[f64], n: usize, r: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut z = r.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= l[i * n + k] * z[k];
        }
        z[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            z[i] -= l[k * n + i] * z[k];
        }
        z[i] /= l[i * n + i];
    }
    Some(z)
}

struct Direction {
    dx: Blocks,
    dy: Vec<f64>,
    ds: Blocks,
}

/// Runs the interior point method from a strictly positive `(X₀, y₀)`.
///
/// Returns the last strictly feasible iterate with `converged = false` if
/// the Schur complement breaks down or the budget runs out before the
/// stopping rule is met.
pub fn solve(p: &BlockSdp, x0: Blocks, y0: Vec<f64>, opts: SdpOptions) -> Result<SdpSolution> {
    let m = p.num_constraints();
    let n_total = p.total_dim() as f64;
    let mut x = x0;
    let mut y = y0;
    let mut s = p.slack(&y);
    let b_norm = p.b.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let c_norm = p.c.iter().map(|c| c.max_abs()).fold(1.0, f64::max);
    let mut last_gap = f64::INFINITY;
    // Iterate with the smallest max(relative gap, residuals). Once μ is
    // tiny, rounding in the Schur solve can inflate the residuals again.
    let mut best: Option<(f64, SdpSolution)> = None;

    for it in 0..opts.max_iter {
        let pobj = inner(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let xs = inner(&x, &s);
        let ax = p.apply(&x);
        let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = p.adjoint(&y);
        let rd: Blocks =
            p.c.iter()
                .zip(&s)
                .zip(&aty)
                .map(|((c, s), a)| &(c - s) - a)
                .collect();
        let rp_norm = rp.iter().map(|v| v.abs()).fold(0.0, f64::max) / b_norm;
        let rd_norm = rd.iter().map(|r| r.max_abs()).fold(0.0, f64::max) / c_norm;
        let scale = 1.0 + pobj.abs().max(dobj.abs());
        last_gap = xs;
        let done = xs <= opts.tol * scale && rp_norm <= opts.feas_tol && rd_norm <= opts.feas_tol;
        let merit = (xs / scale).max(rp_norm).max(rd_norm);
        let snapshot = || SdpSolution {
            x: x.clone(),
            y: y.clone(),
            s: s.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            iterations: it,
            converged: done,
        };
        if done {
            return Ok(snapshot());
        }
        match &best {
            Some((b, _)) if *b <= merit => {
                if merit > 1e3 * *b {
                    break;
                }
            }
            _ => best = Some((merit, snapshot())),
        }
        if it + 1 == opts.max_iter {
            break;
        }
        let mu = xs / n_total;
        let s_inv: Blocks = s.iter().map(inverse).collect();

        // Schur complement M_kl = Re Tr(A_k X A_l S⁻¹).
        let g: Vec<Blocks> =
            p.a.iter()
                .map(|al| {
                    x.iter()
                        .zip(al)
                        .zip(&s_inv)
                        .map(|((xb, ab), si)| &(xb * ab) * si)
                        .collect()
                })
                .collect();
        let mut mm = vec![0.0; m * m];
        for k in 0..m {
            for l in k..m {
                let v = inner(&p.a[k], &g[l]);
                mm[k * m + l] = v;
                mm[l * m + k] = v;
            }
        }
        let x_rd_sinv: Blocks = x
            .iter()
            .zip(&rd)
            .zip(&s_inv)
            .map(|((xb, r), si)| &(xb * r) * si)
            .collect();

        let direction = |target: &Blocks| -> Option<Direction> {
            let rhs: Vec<f64> = (0..m)
                .map(|k| p.b[k] - inner(&p.a[k], target) + inner(&p.a[k], &x_rd_sinv))
                .collect();
            let dy = cholesky_solve(&mm, m, &rhs).or_else(|| {
                // Near the optimum M can lose definiteness to rounding.
                let shift = 1e-14 * (0..m).map(|k| mm[k * m + k]).fold(0.0, f64::max);
                let mut reg = mm.clone();
                for k in 0..m {
                    reg[k * m + k] += shift;
                }
                cholesky_solve(&reg, m, &rhs)
            })?;
            let ady = p.adjoint(&dy);
            let ds: Blocks = rd
                .iter()
                .zip(&ady)
                .map(|(r, a)| (r - a).hermitian_part())
                .collect();
            let dx: Blocks = target
                .iter()
                .zip(&x)
                .zip(ds.iter().zip(&s_inv))
                .map(|((t, xb), (d, si))| &(t - xb) - &sym(&(&(xb * d) * si)))
                .collect();
            Some(Direction { dx, dy, ds })
        };

        let zero_target: Blocks = s_inv.iter().map(|si| si.scale(0.0)).collect();
        let Some(pred) = direction(&zero_target) else {
            break;
        };
        let ap = max_step(&x, &pred.dx).min(1.0);
        let ad = max_step(&s, &pred.ds).min(1.0);
        let xs_pred = inner(
            &combine(&x, 1.0, &pred.dx, ap),
            &combine(&s, 1.0, &pred.ds, ad),
        );
        let sigma = (xs_pred / xs).clamp(0.0, 1.0).powi(3);

        let target: Blocks = s_inv
            .iter()
            .zip(pred.dx.iter().zip(&pred.ds))
            .map(|(si, (dxp, dsp))| &si.scale(sigma * mu) - &sym(&(&(dxp * dsp) * si)))
            .collect();
        let Some(dir) = direction(&target) else { break };
        let ap = (0.95 * max_step(&x, &dir.dx)).min(1.0);
        let ad = (0.95 * max_step(&s, &dir.ds)).min(1.0);
        x = combine(&x, 1.0, &dir.dx, ap)
            .iter()
            .map(|b| b.hermitian_part())
            .collect();
        for (yk, d) in y.iter_mut().zip(&dir.dy) {
            *yk += ad * d;
        }
        s = combine(&s, 1.0, &dir.ds, ad)
            .iter()
            .map(|b| b.hermitian_part())
            .collect();
    }
    best.map(|(_, sol)| sol).ok_or(Error::SolverStall {
        gap: last_gap,
        iterations: opts.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::c64;

    #[test]
    fn cholesky_matches_direct_solve() {
        let m = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let z = cholesky_solve(&m, 3, &[1.0, 2.0, 3.0]).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| m[i * 3 + j] * z[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-13);
        }
        assert!(cholesky_solve(&[1.0, 2.0, 2.0, 1.0], 2, &[1.0, 1.0]).is_none());
    }

    /// `max ⟨W, X⟩` with `Tr X = 1` is `λ_max(W)`.
    #[test]
    fn largest_eigenvalue_program() {
        let mut w = ComplexMatrix::from_real_diag(&[1.0, 2.0, 0.5]);
        w[(0, 1)] = c64(0.3, 0.4);
        w[(1, 0)] = c64(0.3, -0.4);
        let lmax = *jacobi(&w).values.last().unwrap();
        let p = BlockSdp {
            c: vec![w.scale(-1.0)],
            a: vec![vec![ComplexMatrix::identity(3)]],
            b: vec![1.0],
        };
        let x0 = vec![ComplexMatrix::identity(3).scale(1.0 / 3.0)];
        let sol = solve(
            &p,
            x0,
            vec![-(lmax + 1.0)],
            SdpOptions {
                max_iter: 100,
                tol: 1e-11,
                feas_tol: 1e-11,
            },
        )
        .unwrap();
        assert!((sol.dual_objective + lmax).abs() < 1e-9);
        assert!((sol.primal_objective + lmax).abs() < 1e-9);
    }
}

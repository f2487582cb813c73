//! Seeded generators for test instances.
//!
//! All draws go through ChaCha so a `(seed, stream)` pair reproduces the
//! same matrices on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{c64, ComplexMatrix, DensityMatrix, HermitianObservable, PureState};

pub type ForgeRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ForgeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under the same seed.
pub fn rng_stream(seed: u64, stream: u64) -> ForgeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_c(rng: &mut impl Rng) -> Complex64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_c(rng))
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    gaussian_matrix(rng, d, d).hermitian_part()
}

pub fn random_observable(rng: &mut impl Rng, d: usize) -> HermitianObservable {
    HermitianObservable::new(random_hermitian(rng, d)).expect("hermitian by construction")
}

/// Orthonormalizes the columns of `g` (modified Gram–Schmidt, two passes).
///
/// Requires `g` to have full column rank, which Gaussian draws do with
/// probability one.
pub fn orthonormalize_columns(g: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q = g.clone();
    for j in 0..cols {
        let mut v = q.col(j);
        for _pass in 0..2 {
            for k in 0..j {
                let u = q.col(k);
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for i in 0..rows {
                    v[i] -= proj * u[i];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        q.set_col(j, &v);
    }
    q
}

/// Haar-distributed unitary (QR of a Ginibre matrix).
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    orthonormalize_columns(&gaussian_matrix(rng, d, d))
}

pub fn random_pure(rng: &mut impl Rng, d: usize) -> PureState {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian_c(rng)).collect();
    PureState::normalized(v).expect("nonzero draw")
}

/// Random state `G G† / Tr`, with `G` a `d × rank` Ginibre matrix.
pub fn random_density(rng: &mut impl Rng, d: usize, rank: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, d, rank.max(1));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / t)).expect("valid by construction")
}

/// Diagonal Hamiltonian with integer levels drawn from `0..=max_level`.
pub fn random_integer_levels(rng: &mut impl Rng, d: usize, max_level: i64) -> Vec<i64> {
    (0..d).map(|_| rng.random_range(0..=max_level)).collect()
}

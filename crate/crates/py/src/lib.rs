//! Python bindings.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`, pure
//! states as flat lists. `hamiltonian_from_levels` builds exactly
//! commensurate Hamiltonians from integer levels in units of `2π/τ`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use coherence_forge::channels::{monotonicity_suite, MeasureId};
use coherence_forge::clock::{self, IntegerDistribution};
use coherence_forge::{
    distillation, io, measures, purification, ComplexMatrix, DensityMatrix, Error,
};
use coherence_forge::{HermitianObservable, PureState};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SolverStall { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    DensityMatrix::new(matrix(rows)?).map_err(to_py)
}

fn observable(rows: Vec<Vec<Complex64>>) -> PyResult<HermitianObservable> {
    HermitianObservable::new(matrix(rows)?).map_err(to_py)
}

fn pure(amps: Vec<Complex64>) -> PyResult<PureState> {
    PureState::new(amps).map_err(to_py)
}

/// Quantum Fisher information `F_H(ρ)`.
#[pyfunction]
fn qfi(rho: Vec<Vec<Complex64>>, h: Vec<Vec<Complex64>>) -> PyResult<f64> {
    measures::qfi(&density(rho)?, &observable(h)?).map_err(to_py)
}

/// Purity of coherence; `inf` when the support does not commute with `H`.
#[pyfunction]
fn purity_of_coherence(rho: Vec<Vec<Complex64>>, h: Vec<Vec<Complex64>>) -> PyResult<f64> {
    Ok(
        measures::purity_of_coherence(&density(rho)?, &observable(h)?)
            .map_err(to_py)?
            .as_f64(),
    )
}

#[pyfunction]
fn skew_information(rho: Vec<Vec<Complex64>>, h: Vec<Vec<Complex64>>) -> PyResult<f64> {
    measures::skew_information(&density(rho)?, &observable(h)?).map_err(to_py)
}

/// `H = diag(levels)·2π/τ`.
#[pyfunction]
#[pyo3(signature = (levels, tau = TWO_PI))]
fn hamiltonian_from_levels(levels: Vec<i64>, tau: f64) -> PyResult<Vec<Vec<Complex64>>> {
    if levels.is_empty() || tau.is_nan() || tau <= 0.0 {
        return Err(PyValueError::new_err(
            "need a non-empty level list and tau > 0",
        ));
    }
    Ok(rows_of(
        HermitianObservable::from_integer_levels(&levels, tau).matrix(),
    ))
}

/// Returns `(total_variance, kkt_residual, aux_hamiltonian)`.
#[pyfunction]
fn optimal_purification(
    rho: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
) -> PyResult<(f64, f64, Vec<Vec<Complex64>>)> {
    let p =
        purification::build_optimal_purification(&density(rho)?, &observable(h)?).map_err(to_py)?;
    Ok((
        p.total_variance,
        p.kkt_residual,
        rows_of(p.aux_hamiltonian.matrix()),
    ))
}

/// Energy distribution of a pure state as `(offset, probs)`.
#[pyfunction]
#[pyo3(signature = (psi, h, tau = TWO_PI))]
fn energy_distribution(
    psi: Vec<Complex64>,
    h: Vec<Vec<Complex64>>,
    tau: f64,
) -> PyResult<(i64, Vec<f64>)> {
    let c = clock::extract_distribution(&pure(psi)?, &observable(h)?, tau).map_err(to_py)?;
    Ok((c.distribution.offset, c.distribution.probs))
}

fn distribution(offset: i64, probs: Vec<f64>) -> PyResult<IntegerDistribution> {
    IntegerDistribution::new(offset, probs).map_err(to_py)
}

/// TV distance between `p^{*m}` and its translated Poisson.
#[pyfunction]
fn tv_to_translated_poisson(offset: i64, probs: Vec<f64>, m: usize) -> PyResult<f64> {
    clock::tv_to_translated_poisson(&distribution(offset, probs)?, m).map_err(to_py)
}

#[pyfunction]
fn barbour_bound(offset: i64, probs: Vec<f64>, m: usize) -> PyResult<f64> {
    clock::barbour_bound(&distribution(offset, probs)?, m).map_err(to_py)
}

/// Best covariant fidelity from `σ` to the pure target `ψ`.
#[pyfunction]
fn max_distill_fidelity(
    sigma: Vec<Vec<Complex64>>,
    h_a: Vec<Vec<Complex64>>,
    psi: Vec<Complex64>,
    h_b: Vec<Vec<Complex64>>,
) -> PyResult<f64> {
    distillation::max_distill_fidelity(
        &density(sigma)?,
        &observable(h_a)?,
        &pure(psi)?,
        &observable(h_b)?,
    )
    .map_err(to_py)
}

/// `(exact, asymptotic)` infidelity lower bounds for `n` noisy c-bits.
#[pyfunction]
fn qubit_infidelity_bound(lam: f64, n: usize) -> PyResult<(f64, f64)> {
    let b = distillation::qubit_infidelity_bound(lam, n).map_err(to_py)?;
    Ok((b.exact, b.asymptotic))
}

/// Monotonicity report as a JSON string.
#[pyfunction]
#[pyo3(signature = (measure, trials, seed = 7))]
fn monotonicity_report(measure: &str, trials: u64, seed: u64) -> PyResult<String> {
    let r = monotonicity_suite(MeasureId::parse(measure).map_err(to_py)?, trials, seed)
        .map_err(to_py)?;
    serde_json::to_string(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Loads a state file; returns a density matrix either way.
#[pyfunction]
fn load_state(text: &str) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(rows_of(
        io::parse_state(text).map_err(to_py)?.to_density().matrix(),
    ))
}

#[pymodule]
#[pyo3(name = "coherence_forge")]
fn forge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(purity_of_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(skew_information, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_from_levels, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_purification, m)?)?;
    m.add_function(wrap_pyfunction!(energy_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(tv_to_translated_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(barbour_bound, m)?)?;
    m.add_function(wrap_pyfunction!(max_distill_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_infidelity_bound, m)?)?;
    m.add_function(wrap_pyfunction!(monotonicity_report, m)?)?;
    m.add_function(wrap_pyfunction!(load_state, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

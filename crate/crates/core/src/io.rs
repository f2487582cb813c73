//! JSON ingestion and emission for states and Hamiltonians.
//!
//! States are `{"dim": d, "re": …, "im": …}`; one-dimensional `re`/`im`
//! arrays give a pure state and two-dimensional ones a density matrix.
//! Hamiltonians are either the same matrix schema or
//! `{"levels_in_2pi_over_tau": [..], "basis": {"re": .., "im": ..}}`, which
//! keeps spectra exactly commensurate with the supplied `τ`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, DensityMatrix, HermitianObservable, PureState};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Array {
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    re: Array,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Array>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum HamiltonianJson {
    Levels {
        levels_in_2pi_over_tau: Vec<i64>,
        #[serde(default)]
        basis: Option<ComplexJson>,
    },
    Matrix(ComplexJson),
}

/// A state file holds either kind of state.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(p) => p.dim(),
            Self::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => p.density(),
            Self::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            Self::Pure(p) => Some(p),
            Self::Mixed(_) => None,
        }
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn vector_of(j: &ComplexJson) -> Result<Option<Vec<Complex64>>> {
    let Array::Vector(re) = &j.re else {
        return Ok(None);
    };
    let im = match &j.im {
        None => vec![0.0; re.len()],
        Some(Array::Vector(im)) => im.clone(),
        Some(Array::Matrix(_)) => return Err(schema("re is a vector but im is a matrix")),
    };
    if im.len() != re.len() {
        return Err(schema(format!(
            "re has {} entries, im has {}",
            re.len(),
            im.len()
        )));
    }
    if let Some(d) = j.dim {
        if d != re.len() {
            return Err(schema(format!("dim {d} but {} amplitudes", re.len())));
        }
    }
    Ok(Some(
        re.iter()
            .zip(&im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect(),
    ))
}

fn matrix_of(j: &ComplexJson) -> Result<ComplexMatrix> {
    let Array::Matrix(re) = &j.re else {
        return Err(schema("expected a two-dimensional re array"));
    };
    let n = re.len();
    let im = match &j.im {
        None => vec![vec![0.0; n]; n],
        Some(Array::Matrix(im)) => im.clone(),
        Some(Array::Vector(v)) if v.is_empty() && n == 0 => vec![],
        Some(Array::Vector(_)) => return Err(schema("re is a matrix but im is a vector")),
    };
    if n == 0 || im.len() != n || re.iter().chain(&im).any(|row| row.len() != n) {
        return Err(schema("re and im must be square arrays of equal size"));
    }
    if let Some(d) = j.dim {
        if d != n {
            return Err(schema(format!("dim {d} but matrix is {n}x{n}")));
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        Complex64::new(re[r][c], im[r][c])
    }))
}

fn matrix_json(m: &ComplexMatrix) -> ComplexJson {
    let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| f(&m[(r, c)])).collect())
            .collect()
    };
    ComplexJson {
        dim: Some(m.rows()),
        re: Array::Matrix(rows(|z| z.re)),
        im: Some(Array::Matrix(rows(|z| z.im))),
    }
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let j: ComplexJson = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    match vector_of(&j)? {
        Some(v) => Ok(LoadedState::Pure(PureState::new(v)?)),
        None => Ok(LoadedState::Mixed(DensityMatrix::new(matrix_of(&j)?)?)),
    }
}

pub fn load_state(path: impl AsRef<Path>) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| schema(format!("{}: {e}", path.as_ref().display())))?;
    parse_state(&text)
}

pub fn pure_state_json(psi: &PureState) -> String {
    let a = psi.amplitudes();
    let j = ComplexJson {
        dim: Some(a.len()),
        re: Array::Vector(a.iter().map(|z| z.re).collect()),
        im: Some(Array::Vector(a.iter().map(|z| z.im).collect())),
    };
    serde_json::to_string(&j).expect("plain data")
}

pub fn density_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&matrix_json(rho.matrix())).expect("plain data")
}

pub fn state_json(s: &LoadedState) -> String {
    match s {
        LoadedState::Pure(p) => pure_state_json(p),
        LoadedState::Mixed(m) => density_json(m),
    }
}

/// How a Hamiltonian file was turned into an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianSource {
    /// Integer level list, exact by construction.
    Levels,
    /// Dense matrix whose gaps were rounded onto the `2π/τ` lattice; holds
    /// the largest eigenvalue shift.
    Snapped(f64),
    /// Dense matrix with gaps off the lattice, used as given.
    Incommensurate,
}

/// Reads a Hamiltonian; integer level lists are scaled by `2π/τ`.
pub fn parse_hamiltonian(text: &str, tau: f64) -> Result<HermitianObservable> {
    Ok(read_hamiltonian(text, tau)?.0)
}

/// Like [`parse_hamiltonian`], also reporting whether a dense matrix had to
/// be snapped to commensurate levels.
pub fn read_hamiltonian(text: &str, tau: f64) -> Result<(HermitianObservable, HamiltonianSource)> {
    let j: HamiltonianJson = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} must be positive"
        )));
    }
    match j {
        HamiltonianJson::Levels {
            levels_in_2pi_over_tau: levels,
            basis,
        } => {
            if levels.is_empty() {
                return Err(schema("empty level list"));
            }
            let h = match basis {
                None => HermitianObservable::from_integer_levels(&levels, tau),
                Some(b) => {
                    HermitianObservable::from_levels_in_basis(&levels, &matrix_of(&b)?, tau)?
                }
            };
            Ok((h, HamiltonianSource::Levels))
        }
        HamiltonianJson::Matrix(m) => {
            let h = HermitianObservable::new(matrix_of(&m)?)?;
            Ok(match snap_hamiltonian(&h, tau) {
                Ok((s, shift)) => (s, HamiltonianSource::Snapped(shift)),
                Err(_) => (h, HamiltonianSource::Incommensurate),
            })
        }
    }
}

/// Rounds every gap above the ground level to a multiple of `2π/τ`,
/// keeping the eigenbasis and the ground energy.
pub fn snap_hamiltonian(h: &HermitianObservable, tau: f64) -> Result<(HermitianObservable, f64)> {
    let e = h.eigenvalues();
    let e0 = e[0];
    let w = 2.0 * std::f64::consts::PI / tau;
    let mut snapped = Vec::with_capacity(e.len());
    for &x in e {
        snapped.push(e0 + crate::clock::integer_gap(x, e0, tau)? as f64 * w);
    }
    let shift = e
        .iter()
        .zip(&snapped)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let v = h.eigenvectors();
    let m = &(v * &ComplexMatrix::from_real_diag(&snapped)) * &v.adjoint();
    Ok((HermitianObservable::new(m.hermitian_part())?, shift))
}

pub fn load_hamiltonian(path: impl AsRef<Path>, tau: f64) -> Result<HermitianObservable> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| schema(format!("{}: {e}", path.as_ref().display())))?;
    parse_hamiltonian(&text, tau)
}

pub fn hamiltonian_json(h: &HermitianObservable) -> String {
    serde_json::to_string(&matrix_json(h.matrix())).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_pure, rng_from_seed};
    use std::f64::consts::PI;

    #[test]
    fn cbit_fixture() {
        let s = parse_state(r#"{"dim":2,"re":[0.7071067811865476,0.7071067811865476],"im":[0,0]}"#)
            .unwrap();
        assert!(matches!(s, LoadedState::Pure(ref p) if p.dim() == 2));
    }

    #[test]
    fn integer_levels() {
        let h = parse_hamiltonian(r#"{"levels_in_2pi_over_tau":[0,1,2,3]}"#, 2.0 * PI).unwrap();
        assert!(
            (h.matrix() - &ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0, 3.0])).max_abs() < 1e-15
        );
        let h = parse_hamiltonian(
            r#"{"levels_in_2pi_over_tau":[0,1],"basis":{"re":[[0,1],[1,0]]}}"#,
            PI,
        )
        .unwrap();
        assert!((h.matrix()[(0, 0)].re - 2.0).abs() < 1e-15 && h.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let bad_trace = r#"{"re":[[0.6,0],[0,0.6]]}"#;
        assert!(matches!(
            parse_state(bad_trace),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(parse_state("{not json"), Err(Error::Schema(_))));
        assert!(matches!(
            parse_state(r#"{"re":[[1,0]]}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_hamiltonian(r#"{"re":[[0,1],[0,0]]}"#, 1.0),
            Err(Error::NonHermitian(_))
        ));
    }

    #[test]
    fn round_trips() {
        let mut rng = rng_from_seed(12);
        let psi = random_pure(&mut rng, 4);
        let back = parse_state(&pure_state_json(&psi)).unwrap();
        assert_eq!(back.as_pure(), Some(&psi));
        let rho = random_density(&mut rng, 3, 2);
        let LoadedState::Mixed(back) = parse_state(&density_json(&rho)).unwrap() else {
            panic!()
        };
        assert!((back.matrix() - rho.matrix()).max_abs() <= 1e-12);
        let h = parse_hamiltonian(r#"{"levels_in_2pi_over_tau":[0,2,5]}"#, 2.0 * PI).unwrap();
        let h2 = parse_hamiltonian(&hamiltonian_json(&h), 2.0 * PI).unwrap();
        assert!((h.matrix() - h2.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn dense_input_is_snapped() {
        let (h, src) = read_hamiltonian(r#"{"re":[[0,0],[0,1.0000000001]]}"#, 2.0 * PI).unwrap();
        assert!(matches!(src, HamiltonianSource::Snapped(s) if (s - 1e-10).abs() < 1e-12));
        assert_eq!(h.eigenvalues()[1], 1.0);
        let (h, src) = read_hamiltonian(r#"{"re":[[0,0],[0,0.5]]}"#, 2.0 * PI).unwrap();
        assert_eq!(src, HamiltonianSource::Incommensurate);
        assert_eq!(h.eigenvalues()[1], 0.5);
        let (_, src) = read_hamiltonian(r#"{"levels_in_2pi_over_tau":[0,1]}"#, 2.0 * PI).unwrap();
        assert_eq!(src, HamiltonianSource::Levels);
    }
}

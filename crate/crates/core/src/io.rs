//! JSON state files.
//!
//! ```json
//! {"type": "pure", "n": 2, "amplitudes": [[0, 0], [0.7071067811865476, 0], ...]}
//! {"type": "density", "n": 1, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}
//! {"type": "schmidt", "lambda": [1, 0, 0, 0, 0], "psi": 0}
//! ```
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows. Floats
//! are written in shortest round-trip form, so write-then-read is exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{schmidt_state, DensityMatrix, PureState, QubitState, SchmidtParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Pure { n: usize, amplitudes: Vec<[f64; 2]> },
    Density { n: usize, matrix: Vec<Vec<[f64; 2]>> },
    Schmidt { lambda: [f64; 5], psi: f64 },
}

/// A validated state loaded from a [`StateFile`].
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl QubitState for LoadedState {
    fn num_qubits(&self) -> usize {
        match self {
            Self::Pure(p) => p.n(),
            Self::Density(d) => d.n(),
        }
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            Self::Pure(p) => p.reduce(keep),
            Self::Density(d) => d.reduce(keep),
        }
    }
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl StateFile {
    pub fn from_pure(state: &PureState) -> Self {
        Self::Pure {
            n: state.n(),
            amplitudes: state.amplitudes().iter().map(pair).collect(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self::Density {
            n: rho.n(),
            matrix: (0..m.rows()).map(|i| m.row(i).iter().map(pair).collect()).collect(),
        }
    }

    pub fn from_schmidt(params: &SchmidtParams) -> Self {
        Self::Schmidt {
            lambda: params.lambda(),
            psi: params.psi(),
        }
    }

    /// Checks every invariant of the described state and builds it.
    pub fn load(&self) -> Result<LoadedState> {
        match self {
            Self::Pure { n, amplitudes } => {
                let state = PureState::new(amplitudes.iter().map(complex).collect())?;
                if state.n() != *n {
                    return Err(validation(format!(
                        "file declares n = {n} but has {} amplitudes",
                        amplitudes.len()
                    )));
                }
                Ok(LoadedState::Pure(state))
            }
            Self::Density { n, matrix } => {
                let dim = matrix.len();
                if matrix.iter().any(|row| row.len() != dim) {
                    return Err(validation("density matrix rows have unequal lengths"));
                }
                let entries = matrix.iter().flatten().map(complex).collect();
                let rho = DensityMatrix::new(ComplexMatrix::from_vec(dim, dim, entries)?)?;
                if rho.n() != *n {
                    return Err(validation(format!("file declares n = {n} but matrix is {dim}x{dim}")));
                }
                Ok(LoadedState::Density(rho))
            }
            Self::Schmidt { lambda, psi } => Ok(LoadedState::Pure(schmidt_state(&SchmidtParams::new(*lambda, *psi)?))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Formats with at most 12 significant digits, dropping trailing zeros.
///
/// Plain notation is used for decimal exponents in `-5..12`, scientific
/// notation otherwise.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{named_state, random_mixed, NamedState};

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(2.0), "2");
        assert_eq!(format_sig12(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(format_sig12(4.0 * 2f64.sqrt() / 3.0), "1.88561808316");
        assert_eq!(format_sig12(32.0 / 3.0), "10.6666666667");
        assert_eq!(format_sig12(-0.25), "-0.25");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(6.123233995736766e-17), "6.12323399574e-17");
        assert_eq!(format_sig12(1.5e13), "1.5e13");
        assert_eq!(format_sig12(0.0001), "0.0001");
    }

    #[test]
    fn pure_file_loads() {
        let singlet = named_state(&NamedState::Singlet).unwrap();
        let file = StateFile::from_pure(&singlet);
        let text = file.to_json();
        assert!(text.contains("\"type\": \"pure\""));
        assert_eq!(
            StateFile::parse(&text).unwrap().load().unwrap(),
            LoadedState::Pure(singlet)
        );
    }

    #[test]
    fn density_file_round_trips_exactly() {
        let rho = random_mixed(2, 1, 4).unwrap();
        let file = StateFile::from_density(&rho);
        let back = StateFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.load().unwrap(), LoadedState::Density(rho));
    }

    #[test]
    fn schmidt_file_loads() {
        let text = r#"{"type": "schmidt", "lambda": [0.7071067811865476, 0, 0, 0, 0.7071067811865476], "psi": 0}"#;
        let state = StateFile::parse(text).unwrap().load().unwrap();
        assert_eq!(state, LoadedState::Pure(named_state(&NamedState::Ghz(3)).unwrap()));
    }

    #[test]
    fn invalid_files_are_rejected() {
        let bad = [
            r#"{"type": "pure", "n": 1, "amplitudes": [[1, 0], [1, 0]]}"#,
            r#"{"type": "pure", "n": 2, "amplitudes": [[1, 0], [0, 0]]}"#,
            r#"{"type": "density", "n": 1, "matrix": [[[1, 0], [0, 0]], [[0, 0]]]}"#,
            r#"{"type": "density", "n": 1, "matrix": [[[1, 0], [0.5, 0]], [[0, 0], [0, 0]]]}"#,
            r#"{"type": "schmidt", "lambda": [1, 1, 0, 0, 0], "psi": 0}"#,
        ];
        for text in bad {
            assert!(
                matches!(StateFile::parse(text).unwrap().load(), Err(Error::Validation(_))),
                "{text}"
            );
        }
        assert!(matches!(
            StateFile::parse(r#"{"type": "mystery"}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(StateFile::parse("not json"), Err(Error::Parse(_))));
    }
}

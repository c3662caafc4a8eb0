//! State and channel file formats.
//!
//! States are JSON objects
//! `{ "two_j": int, "kind": "pure"|"mixed", "amplitudes": [[re,im],...] }`
//! or with `"matrix": [[[re,im],...],...]` (row-major, basis order
//! m = j..-j). Parsers reject non-Hermitian/non-normalized input beyond
//! tolerance 1e-8 unless validation is disabled. Channels are
//! `{ "two_j": int, "f": [..] }`.

use crate::channel::{ChannelSpec, Provenance};
use crate::error::{Error, Result};
use crate::half::SpinQuantumNumber;
use crate::spin::{PureSpinState, SpinState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Serialized spin state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub two_j: u32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    /// Optional run metadata; ignored on input so outputs pipe cleanly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

impl StateFile {
    pub fn from_state(state: &SpinState<f64>) -> Self {
        let d = state.dim();
        let mut rows = Vec::with_capacity(d);
        for r in 0..d {
            let mut row = Vec::with_capacity(d);
            for c in 0..d {
                let z = state.matrix()[(r, c)];
                row.push([z.re, z.im]);
            }
            rows.push(row);
        }
        Self {
            two_j: state.j().two_j(),
            kind: "mixed".into(),
            amplitudes: None,
            matrix: Some(rows),
            manifest: None,
        }
    }

    pub fn from_pure(psi: &PureSpinState<f64>) -> Self {
        Self {
            two_j: psi.j().two_j(),
            kind: "pure".into(),
            amplitudes: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
            matrix: None,
            manifest: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state JSON: {e}")))
    }

    /// Decode into a density matrix, validating within `tol`
    /// (`f64::INFINITY` disables validation).
    pub fn to_state(&self, tol: f64) -> Result<SpinState<f64>> {
        let j = SpinQuantumNumber::from_two_j(self.two_j);
        match self.kind.as_str() {
            "pure" => {
                let amps = self.amplitudes.as_ref().ok_or_else(|| {
                    Error::Parse("pure state needs an \"amplitudes\" array".into())
                })?;
                if amps.len() != j.dim() {
                    return Err(Error::Dimension(format!(
                        "expected {} amplitudes, got {}",
                        j.dim(),
                        amps.len()
                    )));
                }
                let v = DVector::from_fn(j.dim(), |k, _| Complex::new(amps[k][0], amps[k][1]));
                let psi = if tol.is_finite() {
                    PureSpinState::new(j, v, tol)?
                } else {
                    PureSpinState::normalized(j, v)?
                };
                Ok(psi.projector())
            }
            "mixed" => {
                let rows = self.matrix.as_ref().ok_or_else(|| {
                    Error::Parse("mixed state needs a \"matrix\" array".into())
                })?;
                let d = j.dim();
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Dimension(format!("expected a {d}x{d} matrix")));
                }
                let m = DMatrix::from_fn(d, d, |r, c| {
                    Complex::new(rows[r][c][0], rows[r][c][1])
                });
                if tol.is_finite() {
                    SpinState::new(j, m, tol)
                } else {
                    Ok(SpinState::from_matrix_unchecked(j, m))
                }
            }
            other => Err(Error::Parse(format!(
                "unknown state kind '{other}' (expected \"pure\" or \"mixed\")"
            ))),
        }
    }

    /// Pure amplitudes when the file holds a pure state.
    pub fn to_pure(&self, tol: f64) -> Result<Option<PureSpinState<f64>>> {
        if self.kind != "pure" {
            return Ok(None);
        }
        let j = SpinQuantumNumber::from_two_j(self.two_j);
        let amps = self
            .amplitudes
            .as_ref()
            .ok_or_else(|| Error::Parse("pure state needs an \"amplitudes\" array".into()))?;
        let v = DVector::from_fn(j.dim(), |k, _| Complex::new(amps[k][0], amps[k][1]));
        let psi = if tol.is_finite() {
            PureSpinState::new(j, v, tol)?
        } else {
            PureSpinState::normalized(j, v)?
        };
        Ok(Some(psi))
    }
}

/// Serialized channel damping vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub two_j: u32,
    pub f: Vec<f64>,
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel JSON: {e}")))
    }

    pub fn to_spec(&self) -> Result<ChannelSpec<f64>> {
        ChannelSpec::new(SpinQuantumNumber::from_two_j(self.two_j), self.f.clone())
    }

    pub fn from_spec(spec: &ChannelSpec<f64>) -> Self {
        Self { two_j: spec.two_j, f: spec.f.clone() }
    }
}

impl From<ChannelSpec<f64>> for ChannelFile {
    fn from(spec: ChannelSpec<f64>) -> Self {
        let _ = Provenance::RawVector;
        Self::from_spec(&spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn state_roundtrip_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(201);
        let j = SpinQuantumNumber::from_two_j(3);
        let rho = crate::spin::random_mixed::<f64, _>(j, 2, &mut rng);
        let file = StateFile::from_state(&rho);
        let text = serde_json::to_string(&file).unwrap();
        let back = StateFile::parse(&text).unwrap().to_state(1e-8).unwrap();
        assert!((back.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn state_roundtrip_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(203);
        let j = SpinQuantumNumber::from_two_j(4);
        let psi = crate::spin::random_pure::<f64, _>(j, &mut rng);
        let file = StateFile::from_pure(&psi);
        let text = serde_json::to_string(&file).unwrap();
        let parsed = StateFile::parse(&text).unwrap();
        let back = parsed.to_pure(1e-8).unwrap().unwrap();
        assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn rejects_invalid_beyond_tolerance() {
        let text = r#"{"two_j": 1, "kind": "mixed",
            "matrix": [[[0.6,0],[0.1,0.2]],[[0.1,-0.2],[0.5,0]]]}"#;
        let file = StateFile::parse(text).unwrap();
        assert!(file.to_state(1e-8).is_err()); // trace 1.1
        assert!(file.to_state(f64::INFINITY).is_ok()); // --no-validate
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(StateFile::parse("{").is_err());
        let text = r#"{"two_j": 2, "kind": "pure", "amplitudes": [[1,0]]}"#;
        assert!(StateFile::parse(text).unwrap().to_state(1e-8).is_err());
        let text = r#"{"two_j": 1, "kind": "thermal"}"#;
        assert!(StateFile::parse(text).unwrap().to_state(1e-8).is_err());
    }

    #[test]
    fn manifest_field_is_tolerated() {
        let text = r#"{"two_j": 1, "kind": "pure", "amplitudes": [[1,0],[0,0]],
            "manifest": {"seed": 7}}"#;
        let file = StateFile::parse(text).unwrap();
        assert!(file.to_state(1e-8).is_ok());
    }

    #[test]
    fn channel_roundtrip() {
        let text = r#"{"two_j": 4, "f": [1.0, 0.5, 0.0, -0.25]}"#;
        let spec = ChannelFile::parse(text).unwrap().to_spec().unwrap();
        assert_eq!(spec.f.len(), 4);
        let bad = r#"{"two_j": 4, "f": [1.0, 2.0, 0.0, 0.0]}"#;
        assert!(ChannelFile::parse(bad).unwrap().to_spec().is_err());
    }
}

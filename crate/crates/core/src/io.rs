//! JSON formats for states, ensembles and quanton/detector models.
//!
//! ```json
//! {"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}
//! {"probs": [0.5, 0.5], "states": [{"re": [1, 0], "im": [0, 0]}, ...]}
//! {"amplitudes": [{"re": 0.6, "im": 0}, ...], "detectors": [{"re": [...], "im": [...]}, ...]}
//! {"rho": {"dim": ..., "re": ..., "im": ...}, "detectors": [...]}
//! ```
//!
//! `im` may be omitted for real data. Floats are written in shortest
//! round-trip form, so a write followed by a read is bit-exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::duality::{Quanton, QuantonDetectorModel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{self, DensityMatrix, PureEnsemble};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub probs: Vec<f64>,
    pub states: Vec<VectorJson>,
}

/// Amplitudes as a list of complex numbers or as one vector object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudesJson {
    Entries(Vec<ComplexJson>),
    Vector(VectorJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixJson>,
    pub detectors: Vec<VectorJson>,
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("non-finite number in {what}")))
    }
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| m[(i, j)].im).collect())
            .collect();
        Self {
            dim: d,
            re,
            im: Some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Parse("\"dim\" must be positive".into()));
        }
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) {
            return Err(Error::Parse(format!("\"re\" is not a {d}x{d} array")));
        }
        if let Some(im) = &self.im {
            if !shape_ok(im) {
                return Err(Error::Parse(format!("\"im\" is not a {d}x{d} array")));
            }
        }
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let re = finite(self.re[i][j], "\"re\"")?;
                let im = match &self.im {
                    Some(im) => finite(im[i][j], "\"im\"")?,
                    None => 0.0,
                };
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

impl VectorJson {
    pub fn from_vector(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: Some(v.iter().map(|z| z.im).collect()),
        }
    }

    pub fn to_vector(&self) -> Result<Vec<Complex64>> {
        if let Some(im) = &self.im {
            if im.len() != self.re.len() {
                return Err(Error::Parse(format!(
                    "vector has {} real and {} imaginary parts",
                    self.re.len(),
                    im.len()
                )));
            }
        }
        self.re
            .iter()
            .enumerate()
            .map(|(k, &re)| {
                let im = self.im.as_ref().map_or(0.0, |im| im[k]);
                Ok(Complex64::new(finite(re, "vector")?, finite(im, "vector")?))
            })
            .collect()
    }
}

impl EnsembleJson {
    pub fn from_ensemble(e: &PureEnsemble) -> Self {
        Self {
            probs: e.probs().to_vec(),
            states: e
                .states()
                .iter()
                .map(|v| VectorJson::from_vector(v))
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<PureEnsemble> {
        for &p in &self.probs {
            finite(p, "\"probs\"")?;
        }
        let states = self
            .states
            .iter()
            .map(VectorJson::to_vector)
            .collect::<Result<Vec<_>>>()?;
        PureEnsemble::new(self.probs.clone(), states)
    }
}

impl ModelJson {
    pub fn from_model(m: &QuantonDetectorModel) -> Self {
        let (amplitudes, rho) = match m.quanton() {
            Quanton::Pure(c) => (
                Some(AmplitudesJson::Entries(
                    c.iter()
                        .map(|z| ComplexJson { re: z.re, im: z.im })
                        .collect(),
                )),
                None,
            ),
            Quanton::Mixed(rho) => (None, Some(MatrixJson::from_matrix(rho.matrix()))),
        };
        Self {
            amplitudes,
            rho,
            detectors: m
                .detectors()
                .iter()
                .map(|v| VectorJson::from_vector(v))
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<QuantonDetectorModel> {
        let detectors = self
            .detectors
            .iter()
            .map(VectorJson::to_vector)
            .collect::<Result<Vec<_>>>()?;
        let quanton = match (&self.amplitudes, &self.rho) {
            (Some(a), None) => Quanton::Pure(match a {
                AmplitudesJson::Entries(e) => e
                    .iter()
                    .map(|z| {
                        Ok(Complex64::new(
                            finite(z.re, "amplitudes")?,
                            finite(z.im, "amplitudes")?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?,
                AmplitudesJson::Vector(v) => v.to_vector()?,
            }),
            (None, Some(rho)) => Quanton::Mixed(states::validate_density(rho.to_matrix()?)?),
            _ => {
                return Err(Error::Parse(
                    "model needs exactly one of \"amplitudes\" and \"rho\"".into(),
                ))
            }
        };
        QuantonDetectorModel::new(quanton, detectors)
    }
}

fn from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    from_str::<MatrixJson>(text)?.to_matrix()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String> {
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    Ok(to_string(&MatrixJson::from_matrix(m)))
}

/// Parses and validates a density matrix.
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    states::validate_density(matrix_from_json(text)?)
}

pub fn state_to_json(rho: &DensityMatrix) -> Result<String> {
    matrix_to_json(rho.matrix())
}

pub fn ensemble_from_json(text: &str) -> Result<PureEnsemble> {
    from_str::<EnsembleJson>(text)?.to_ensemble()
}

pub fn ensemble_to_json(e: &PureEnsemble) -> Result<String> {
    let j = EnsembleJson::from_ensemble(e);
    j.to_ensemble()?;
    Ok(to_string(&j))
}

pub fn model_from_json(text: &str) -> Result<QuantonDetectorModel> {
    from_str::<ModelJson>(text)?.to_model()
}

pub fn model_to_json(m: &QuantonDetectorModel) -> Result<String> {
    let j = ModelJson::from_model(m);
    j.to_model()?;
    Ok(to_string(&j))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    state_from_json(&read_text(path)?)
}

pub fn read_ensemble(path: &Path) -> Result<PureEnsemble> {
    ensemble_from_json(&read_text(path)?)
}

pub fn read_model(path: &Path) -> Result<QuantonDetectorModel> {
    model_from_json(&read_text(path)?)
}

/// Rounds to 12 significant digits and prints without trailing zeros.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float text");
    let mag = rounded.abs();
    if (1e-6..1e15).contains(&mag) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

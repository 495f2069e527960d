//! File formats and deterministic report rendering.
//!
//! Effects and samples travel as plain JSON documents with explicit
//! dimensions and row-major `[re, im]` pairs, small enough to diff and easy
//! to parse from any language. Reports render with sorted keys and
//! shortest-round-trip decimals, so identical invocations produce
//! byte-identical output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::effect::Effect;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, Tolerances};
use crate::strength::StrengthSample;

/// Symmetrization noise above this level is surfaced as a warning.
pub const ASYMMETRY_WARN: f64 = 1e-8;

/// Eigenvalue clamping beyond plain rounding noise is surfaced as a warning.
pub const CLAMP_WARN: f64 = 1e-13;

/// On-disk form of a Hermitian matrix intended to be an effect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major `[re, im]` pairs; exactly `dim * dim` of them.
    pub entries: Vec<[f64; 2]>,
}

impl EffectFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            detail: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_matrix(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::from_pairs(self.dim, &self.entries)
    }

    pub fn from_matrix(matrix: &HermitianMatrix, label: Option<String>) -> Self {
        Self {
            dim: matrix.dim(),
            label,
            entries: matrix.to_pairs(),
        }
    }

    pub fn render(&self) -> String {
        render_value(&serde_json::to_value(self).expect("effect files serialize"))
    }
}

/// One `(ray, strength)` row of a samples file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRow {
    /// `[re, im]` pairs of the ray components.
    pub ray: Vec<[f64; 2]>,
    pub value: f64,
}

/// On-disk form of a strength-sample collection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplesFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub samples: Vec<SampleRow>,
}

impl SamplesFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            detail: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_samples(&self) -> Result<Vec<StrengthSample>> {
        self.samples
            .iter()
            .map(|row| {
                let ray = crate::effect::Ray::from_pairs(&row.ray)?;
                if ray.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        left: self.dim,
                        right: ray.dim(),
                    });
                }
                StrengthSample::new(ray, row.value)
            })
            .collect()
    }

    pub fn from_samples(dim: usize, samples: &[StrengthSample], label: Option<String>) -> Self {
        Self {
            dim,
            label,
            samples: samples
                .iter()
                .map(|s| SampleRow {
                    ray: s.ray.to_pairs(),
                    value: s.value,
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        render_value(&serde_json::to_value(self).expect("samples files serialize"))
    }
}

/// Machine-readable command report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    /// Input digests and echoed scalar arguments.
    pub inputs: Vec<String>,
    pub results: Value,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, tolerances: Tolerances) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            results: Value::Null,
            tolerances,
            warnings: Vec::new(),
        }
    }

    pub fn push_input(&mut self, input: impl Into<String>) {
        self.inputs.push(input.into());
    }

    pub fn warn(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
    }

    /// Deterministic rendering: object keys sorted at every level, floats as
    /// shortest round-trip decimals, trailing newline.
    pub fn render(&self) -> String {
        render_value(&serde_json::to_value(self).expect("reports never hold non-finite floats"))
    }
}

fn render_value(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// An effect loaded from disk, with its input digest and any validation
/// warnings (asymmetry beyond [`ASYMMETRY_WARN`], eigenvalue clamping).
#[derive(Debug, Clone)]
pub struct LoadedEffect {
    pub effect: Effect,
    pub digest: String,
    pub label: Option<String>,
    pub warnings: Vec<String>,
}

pub fn load_effect(path: &Path, tol: Tolerances) -> Result<LoadedEffect> {
    let bytes = std::fs::read(path)?;
    let digest = format!("sha256:{}", sha256_hex(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        detail: e.to_string(),
    })?;
    let file = EffectFile::parse(&text)?;
    let matrix = file.to_matrix()?;
    let mut warnings = Vec::new();
    if matrix.max_asymmetry() > ASYMMETRY_WARN {
        warnings.push(format!(
            "asymmetry: entries deviate from Hermitian symmetry by {:.3e}; symmetrized",
            matrix.max_asymmetry()
        ));
    }
    let effect = Effect::new(matrix, tol)?;
    if effect.max_clamp_shift() > CLAMP_WARN {
        warnings.push(format!(
            "clamping: eigenvalues moved by up to {:.3e} into [0, 1]",
            effect.max_clamp_shift()
        ));
    }
    Ok(LoadedEffect {
        effect,
        digest,
        label: file.label,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::Ray;
    use num_complex::Complex64;

    #[test]
    fn effect_file_round_trip() {
        let matrix = HermitianMatrix::from_diagonal(&[0.5, 0.25]);
        let file = EffectFile::from_matrix(&matrix, Some("demo".into()));
        let text = file.render();
        let parsed = EffectFile::parse(&text).unwrap();
        assert_eq!(parsed.dim, 2);
        assert_eq!(parsed.label.as_deref(), Some("demo"));
        assert_eq!(parsed.to_matrix().unwrap().to_pairs(), matrix.to_pairs());
    }

    #[test]
    fn effect_file_rejects_malformed_input() {
        assert!(matches!(
            EffectFile::parse("not json"),
            Err(Error::Parse { .. })
        ));
        // Wrong entry count.
        let file = EffectFile {
            dim: 2,
            label: None,
            entries: vec![[1.0, 0.0]; 3],
        };
        assert!(file.to_matrix().is_err());
    }

    #[test]
    fn samples_file_round_trip_and_validation() {
        let ray =
            Ray::from_components(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let samples = vec![StrengthSample::new(ray, 1.0 / 3.0).unwrap()];
        let file = SamplesFile::from_samples(2, &samples, None);
        let parsed = SamplesFile::parse(&file.render()).unwrap();
        let back = parsed.to_samples().unwrap();
        assert_eq!(back.len(), 1);
        assert!((back[0].value - 1.0 / 3.0).abs() < 1e-15);

        let bad = SamplesFile {
            dim: 2,
            label: None,
            samples: vec![SampleRow {
                ray: vec![[1.0, 0.0]],
                value: 0.5,
            }],
        };
        assert!(matches!(
            bad.to_samples(),
            Err(Error::DimensionMismatch { .. })
        ));
        let out_of_range = SamplesFile {
            dim: 1,
            label: None,
            samples: vec![SampleRow {
                ray: vec![[1.0, 0.0]],
                value: 1.5,
            }],
        };
        assert!(out_of_range.to_samples().is_err());
    }

    #[test]
    fn report_rendering_is_sorted_and_stable() {
        let mut report = Report::new("demo", Tolerances::default());
        report.push_input("seed:42");
        report.results = serde_json::json!({"zeta": 1.0, "alpha": 0.5});
        let text = report.render();
        assert_eq!(text, report.render());
        let alpha = text.find("\"alpha\"").unwrap();
        let zeta = text.find("\"zeta\"").unwrap();
        assert!(alpha < zeta, "keys must render sorted");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn digests_are_stable() {
        assert_eq!(sha256_hex(b"effectscope"), sha256_hex(b"effectscope"),);
        assert_ne!(sha256_hex(b"a"), sha256_hex(b"b"));
        assert_eq!(sha256_hex(b"").len(), 64);
    }
}

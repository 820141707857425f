//! Problem configuration files: a custom problem or a named preset.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sl_spectra::casestudy::{dcr_sl_problem, DCRModel};
use sl_spectra::io::ProblemRecord;
use sl_spectra::SLProblem;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Dirichlet,
    Neumann,
    Dcr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub preset: PresetName,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none", default)]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemConfig {
    Preset(Preset),
    Custom(ProblemRecord),
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid problem config: {e}")))
    }

    pub fn preset(name: &str, d: Option<f64>, k0: Option<f64>) -> Result<Self, CliError> {
        let preset = match name {
            "dirichlet" => PresetName::Dirichlet,
            "neumann" => PresetName::Neumann,
            "dcr" => PresetName::Dcr,
            _ => return Err(CliError::Input(format!("unknown preset {name:?}"))),
        };
        Ok(ProblemConfig::Preset(Preset { preset, d, k0 }))
    }

    /// The DCR model of a `dcr` preset.
    pub fn dcr_model(&self) -> Result<Option<DCRModel>, CliError> {
        match self {
            ProblemConfig::Preset(Preset {
                preset: PresetName::Dcr,
                d,
                k0,
            }) => {
                let (Some(d), Some(k0)) = (d, k0) else {
                    return Err(CliError::Input("the dcr preset needs both D and k0".into()));
                };
                Ok(Some(DCRModel::new(*d, *k0)?))
            }
            _ => Ok(None),
        }
    }

    pub fn problem(&self) -> Result<SLProblem, CliError> {
        match self {
            ProblemConfig::Custom(rec) => Ok(rec.to_problem()?),
            ProblemConfig::Preset(p) => {
                if p.preset != PresetName::Dcr && (p.d.is_some() || p.k0.is_some()) {
                    return Err(CliError::Input("D and k0 apply only to the dcr preset".into()));
                }
                match p.preset {
                    PresetName::Dirichlet => Ok(SLProblem::dirichlet_laplacian()),
                    PresetName::Neumann => Ok(SLProblem::neumann_laplacian()),
                    PresetName::Dcr => Ok(dcr_sl_problem(&self.dcr_model()?.expect("dcr preset"))?),
                }
            }
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

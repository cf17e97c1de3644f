use std::path::{Path, PathBuf};

use qpolar::{ConstructionKind, DecoderKind, ErrorType, SimJob};
use serde::Deserialize;

use crate::beta::Beta;
use crate::code::CodeParams;
use crate::error::CliError;

/// A simulation request read from JSON. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    /// Log-blocklength; `N = 2^n`.
    pub n: usize,
    #[serde(rename = "K", default)]
    pub k: Option<usize>,
    #[serde(rename = "Kx", default)]
    pub k_x: Option<usize>,
    #[serde(rename = "Kz", default)]
    pub k_z: Option<usize>,
    #[serde(default)]
    pub construction: JobConstruction,
    pub decoders: Vec<DecoderKind>,
    #[serde(rename = "L", default = "default_list_size")]
    pub list_size: usize,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub error_type: ErrorType,
    #[serde(default)]
    pub early_stop: Option<u64>,
}

fn default_list_size() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConstruction {
    pub kind: ConstructionKind,
    #[serde(default)]
    pub beta: Option<Beta>,
    #[serde(default)]
    pub q1_info_index: Option<usize>,
}

impl Default for JobConstruction {
    fn default() -> Self {
        Self {
            kind: ConstructionKind::Pw,
            beta: None,
            q1_info_index: None,
        }
    }
}

impl JobFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read job file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("job file {}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn code_params(&self) -> CodeParams {
        CodeParams {
            n: self.n,
            k: self.k,
            k_x: self.k_x,
            k_z: self.k_z,
            kind: Some(self.construction.kind),
            beta: self.construction.beta.map(|b| b.0),
            q1_index: self.construction.q1_info_index,
        }
    }

    /// Builds and validates the simulation described by the file.
    pub fn to_sim_job(&self) -> Result<SimJob, CliError> {
        let code = self.code_params().build()?;
        let mut job = SimJob::new(code, self.decoders.clone(), self.list_size);
        job.p_grid = self.p_grid.clone();
        job.trials = self.trials;
        job.master_seed = self.seed;
        job.error_type = self.error_type;
        job.early_stop = self.early_stop;
        job.validate()?;
        Ok(job)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JOB: &str = r#"{"n": 6, "K": 2, "construction": {"kind": "pw", "beta": "2^(1/4)"},
        "decoders": ["SCL_E", "SCL_C"], "L": 4, "p_grid": [0.1], "trials": 100, "seed": 9,
        "out": "r.csv"}"#;

    #[test]
    fn parses_and_builds() {
        let f = JobFile::parse(JOB).unwrap();
        assert_eq!(f.decoders, vec![DecoderKind::SclE, DecoderKind::SclC]);
        assert_eq!(f.error_type, ErrorType::X);
        let job = f.to_sim_job().unwrap();
        assert_eq!(job.code.logical(), &[26, 37]);
        assert_eq!((job.list_size, job.master_seed), (4, 9));
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = JOB.replace("\"trials\"", "\"trails\"");
        assert!(matches!(JobFile::parse(&bad), Err(CliError::Usage(_))));
        let bad = JOB.replace("\"beta\"", "\"bta\"");
        assert!(matches!(JobFile::parse(&bad), Err(CliError::Usage(_))));
    }

    #[test]
    fn seed_required() {
        let bad = JOB.replace("\"seed\": 9,", "");
        assert!(JobFile::parse(&bad).is_err());
    }

    #[test]
    fn empty_grid_is_rejected_before_work() {
        let bad = JOB.replace("[0.1]", "[]");
        let f = JobFile::parse(&bad).unwrap();
        assert!(matches!(f.to_sim_job(), Err(CliError::Domain(_))));
    }
}

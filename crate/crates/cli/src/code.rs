use qpolar::{
    build_q1, build_qpc, build_symmetric_qpc, ConstructionKind, ConstructionSpec, HpwTerm,
    QuantumPolarCode,
};

use crate::beta::clamp_beta;
use crate::error::CliError;

/// Code parameters as given by flags or a job file, before validation.
#[derive(Debug, Clone, Default)]
pub struct CodeParams {
    pub n: usize,
    pub k: Option<usize>,
    pub k_x: Option<usize>,
    pub k_z: Option<usize>,
    pub kind: Option<ConstructionKind>,
    pub beta: Option<f64>,
    pub q1_index: Option<usize>,
}

impl CodeParams {
    pub fn spec(&self) -> Result<ConstructionSpec, CliError> {
        let kind = self.kind.unwrap_or(ConstructionKind::Pw);
        if self.beta.is_some() && !matches!(kind, ConstructionKind::Pw | ConstructionKind::Hpw) {
            return Err(CliError::Usage(format!(
                "beta only applies to the pw and hpw constructions, not {}",
                kind.as_str()
            )));
        }
        if self.q1_index.is_some() && kind != ConstructionKind::Q1 {
            return Err(CliError::Usage(
                "a Q1 index needs the q1 construction".into(),
            ));
        }
        let beta = self.beta.map(|b| {
            let (b, clamped) = clamp_beta(b);
            if clamped {
                eprintln!("warning: beta above 2 ranks rows like beta = 2; using 2");
            }
            b
        });
        Ok(match kind {
            ConstructionKind::Pw => beta.map_or_else(ConstructionSpec::pw, ConstructionSpec::pw_with_beta),
            ConstructionKind::Hpw => match beta {
                None => ConstructionSpec::hpw(),
                Some(b) => ConstructionSpec::Hpw {
                    hpw_terms: vec![
                        HpwTerm { coefficient: 1.0, beta: b },
                        HpwTerm { coefficient: 0.25, beta: b.powf(0.25) },
                    ],
                },
            },
            ConstructionKind::Rm => ConstructionSpec::rm(),
            ConstructionKind::Q1 => {
                let i = self.q1_index.ok_or_else(|| {
                    CliError::Usage("the q1 construction needs an information index".into())
                })?;
                ConstructionSpec::q1(i)
            }
        })
    }

    pub fn build(&self) -> Result<QuantumPolarCode, CliError> {
        let spec = self.spec()?;
        let dims = match (self.k, self.k_x, self.k_z) {
            (Some(k), None, None) => Some(Dims::Symmetric(k)),
            (None, Some(kx), Some(kz)) => Some(Dims::Split(kx, kz)),
            (None, None, None) => None,
            (Some(_), _, _) => {
                return Err(CliError::Usage("give either K or both Kx and Kz, not both".into()))
            }
            _ => return Err(CliError::Usage("Kx and Kz must be given together".into())),
        };
        let code = match (&spec, dims) {
            (ConstructionSpec::Q1 { q1_info_index }, None) => build_q1(self.n, *q1_info_index)?,
            (_, None) => {
                return Err(CliError::Usage(
                    "missing dimensions: give K (symmetric) or Kx and Kz".into(),
                ))
            }
            (_, Some(Dims::Symmetric(k))) => match spec {
                ConstructionSpec::Q1 { .. } if k != 1 => {
                    return Err(CliError::Usage(format!("a Q1 code has K = 1, got K = {k}")))
                }
                ConstructionSpec::Q1 { q1_info_index } => build_q1(self.n, q1_info_index)?,
                _ => build_symmetric_qpc(self.n, k, &spec)?,
            },
            (_, Some(Dims::Split(kx, kz))) => build_qpc(self.n, kx, kz, &spec)?,
        };
        Ok(code)
    }
}

enum Dims {
    Symmetric(usize),
    Split(usize, usize),
}

/// Row indices as `{a,b,...}`.
pub fn format_set(rows: &[usize]) -> String {
    let parts: Vec<String> = rows.iter().map(|r| r.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

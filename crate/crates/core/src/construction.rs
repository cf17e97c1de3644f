//! Reliability orderings for polar code rows and the classical codes they
//! induce.
//!
//! Rows of `E = F^{(x)n}` are indexed `0..N` from the top, with no bit
//! reversal. Every score-based construction ranks rows by descending score;
//! equal scores rank the larger row index first.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitBlock, BitsError};

/// Maximum supported log-blocklength (N = 2^24).
pub const MAX_LOG_LEN: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("log-blocklength n must be in 1..={MAX_LOG_LEN}, got {0}")]
    LogLength(usize),
    #[error("row index {index} out of range for N = {len}")]
    RowIndex { index: usize, len: usize },
    #[error("beta must be a positive finite number, got {0}")]
    Beta(f64),
    #[error("invalid higher-order weight terms: {0}")]
    HpwTerms(String),
    #[error("the Q1 construction has no row score; it freezes by position")]
    Q1HasNoScore,
    #[error("Q1 construction requires an information index in 1..N-1 (N = {len}), got {index:?}")]
    Q1Index { index: Option<usize>, len: usize },
    #[error("dimension K = {k} out of range 0..={len}")]
    Dimension { k: usize, len: usize },
    #[error("frozen values: {0}")]
    FrozenValues(String),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// One term `c * bin(i)_beta` of a higher-order polarization weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpwTerm {
    pub coefficient: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    Pw,
    Hpw,
    Rm,
    Q1,
}

impl ConstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::Pw => "pw",
            ConstructionKind::Hpw => "hpw",
            ConstructionKind::Rm => "rm",
            ConstructionKind::Q1 => "q1",
        }
    }
}

/// How rows are ranked (or, for Q1, frozen by position).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstructionSpec {
    /// Polarization weight `bin(i)_beta`.
    Pw { beta: f64 },
    /// `sum_a c_a * bin(i)_{beta_a}`.
    Hpw { hpw_terms: Vec<HpwTerm> },
    /// `wt(bin(i)) + i/N`.
    Rm,
    /// Single logical qubit at row `q1_info_index`.
    Q1 { q1_info_index: usize },
}

/// `2^(1/4)`, the default polarization weight base.
pub fn default_beta() -> f64 {
    2f64.powf(0.25)
}

impl ConstructionSpec {
    pub fn pw() -> Self {
        ConstructionSpec::Pw {
            beta: default_beta(),
        }
    }

    pub fn pw_with_beta(beta: f64) -> Self {
        ConstructionSpec::Pw { beta }
    }

    /// Second-order weight with `c_2 = 1/4` and `beta_1 = 2^(1/4) = beta_2^4`.
    pub fn hpw() -> Self {
        ConstructionSpec::Hpw {
            hpw_terms: vec![
                HpwTerm {
                    coefficient: 1.0,
                    beta: default_beta(),
                },
                HpwTerm {
                    coefficient: 0.25,
                    beta: 2f64.powf(1.0 / 16.0),
                },
            ],
        }
    }

    pub fn rm() -> Self {
        ConstructionSpec::Rm
    }

    pub fn q1(info_index: usize) -> Self {
        ConstructionSpec::Q1 {
            q1_info_index: info_index,
        }
    }

    pub fn kind(&self) -> ConstructionKind {
        match self {
            ConstructionSpec::Pw { .. } => ConstructionKind::Pw,
            ConstructionSpec::Hpw { .. } => ConstructionKind::Hpw,
            ConstructionSpec::Rm => ConstructionKind::Rm,
            ConstructionSpec::Q1 { .. } => ConstructionKind::Q1,
        }
    }

    /// The base used for display: PW beta, or the leading HPW beta.
    pub fn display_beta(&self) -> Option<f64> {
        match self {
            ConstructionSpec::Pw { beta } => Some(*beta),
            ConstructionSpec::Hpw { hpw_terms } => hpw_terms.first().map(|t| t.beta),
            ConstructionSpec::Rm | ConstructionSpec::Q1 { .. } => None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ConstructionError> {
        check_log_len(n)?;
        match self {
            ConstructionSpec::Pw { beta } => check_beta(*beta),
            ConstructionSpec::Hpw { hpw_terms } => {
                let first = hpw_terms
                    .first()
                    .ok_or_else(|| ConstructionError::HpwTerms("no terms".into()))?;
                if first.coefficient != 1.0 {
                    return Err(ConstructionError::HpwTerms(format!(
                        "leading coefficient must be 1, got {}",
                        first.coefficient
                    )));
                }
                for t in hpw_terms {
                    if !(t.coefficient.is_finite() && t.coefficient >= 0.0) {
                        return Err(ConstructionError::HpwTerms(format!(
                            "coefficient {} is not a nonnegative number",
                            t.coefficient
                        )));
                    }
                    if !(1.0..=2.0).contains(&t.beta) {
                        return Err(ConstructionError::HpwTerms(format!(
                            "beta {} outside [1, 2]",
                            t.beta
                        )));
                    }
                }
                Ok(())
            }
            ConstructionSpec::Rm => Ok(()),
            ConstructionSpec::Q1 { q1_info_index } => {
                let len = 1usize << n;
                if *q1_info_index == 0 || *q1_info_index >= len - 1 {
                    return Err(ConstructionError::Q1Index {
                        index: Some(*q1_info_index),
                        len,
                    });
                }
                Ok(())
            }
        }
    }
}

fn check_log_len(n: usize) -> Result<(), ConstructionError> {
    if (1..=MAX_LOG_LEN).contains(&n) {
        Ok(())
    } else {
        Err(ConstructionError::LogLength(n))
    }
}

fn check_beta(beta: f64) -> Result<(), ConstructionError> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(ConstructionError::Beta(beta))
    }
}

fn expansion_unchecked(i: usize, n: usize, beta: f64) -> f64 {
    let mut acc = 0.0;
    let mut power = 1.0;
    for j in 0..n {
        if (i >> j) & 1 == 1 {
            acc += power;
        }
        power *= beta;
    }
    acc
}

/// `bin(i)_beta = sum_j B_j beta^j` where `bin(i) = B_{n-1} ... B_0`.
pub fn beta_expansion(i: usize, n: usize, beta: f64) -> Result<f64, ConstructionError> {
    check_log_len(n)?;
    check_beta(beta)?;
    let len = 1usize << n;
    if i >= len {
        return Err(ConstructionError::RowIndex { index: i, len });
    }
    Ok(expansion_unchecked(i, n, beta))
}

/// Reliability score of row `i`.
pub fn construction_score(
    i: usize,
    n: usize,
    spec: &ConstructionSpec,
) -> Result<f64, ConstructionError> {
    spec.validate(n)?;
    let len = 1usize << n;
    if i >= len {
        return Err(ConstructionError::RowIndex { index: i, len });
    }
    score_unchecked(i, n, spec)
}

fn score_unchecked(i: usize, n: usize, spec: &ConstructionSpec) -> Result<f64, ConstructionError> {
    match spec {
        ConstructionSpec::Pw { beta } => Ok(expansion_unchecked(i, n, *beta)),
        ConstructionSpec::Hpw { hpw_terms } => Ok(hpw_terms
            .iter()
            .map(|t| t.coefficient * expansion_unchecked(i, n, t.beta))
            .sum()),
        ConstructionSpec::Rm => Ok(i.count_ones() as f64 + i as f64 / (1usize << n) as f64),
        ConstructionSpec::Q1 { .. } => Err(ConstructionError::Q1HasNoScore),
    }
}

/// All rows ordered by descending reliability; ties go to the larger index.
///
/// For Q1 the order is by descending index (the `beta = 2` ordering), which
/// is what its positional freezing corresponds to.
pub fn rank_rows(n: usize, spec: &ConstructionSpec) -> Result<Vec<usize>, ConstructionError> {
    spec.validate(n)?;
    let len = 1usize << n;
    if let ConstructionSpec::Q1 { .. } = spec {
        return Ok((0..len).rev().collect());
    }
    let mut scored = (0..len)
        .map(|i| score_unchecked(i, n, spec).map(|s| (s, i)))
        .collect::<Result<Vec<_>, _>>()?;
    scored.sort_by(|a, b| rank_cmp(*a, *b));
    Ok(scored.into_iter().map(|(_, i)| i).collect())
}

fn rank_cmp(a: (f64, usize), b: (f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(b.1.cmp(&a.1))
}

/// A classical polar code: information set `A`, frozen set `A^c` and the
/// values the frozen inputs are pinned to.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPolarCode {
    n: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    /// Length-N block; only frozen positions are meaningful, others are zero.
    frozen_values: BitBlock,
    frozen_mask: Vec<bool>,
    construction: Option<ConstructionSpec>,
}

impl ClassicalPolarCode {
    /// A code from an explicit information set. Frozen values default to zero.
    pub fn from_info_set(n: usize, info: &[usize]) -> Result<Self, ConstructionError> {
        check_log_len(n)?;
        let len = 1usize << n;
        let mut is_info = vec![false; len];
        for &i in info {
            if i >= len {
                return Err(ConstructionError::RowIndex { index: i, len });
            }
            is_info[i] = true;
        }
        let info_set: Vec<usize> = (0..len).filter(|&i| is_info[i]).collect();
        let frozen_set: Vec<usize> = (0..len).filter(|&i| !is_info[i]).collect();
        Ok(Self {
            n,
            info_set,
            frozen_set,
            frozen_values: BitBlock::zeros(len)?,
            frozen_mask: is_info.iter().map(|&b| !b).collect(),
            construction: None,
        })
    }

    pub fn log_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    /// Information indices, ascending.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen indices, ascending.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    /// Full-length block holding the frozen values at frozen positions.
    pub fn frozen_values(&self) -> &BitBlock {
        &self.frozen_values
    }

    pub fn construction(&self) -> Option<&ConstructionSpec> {
        self.construction.as_ref()
    }

    /// Sets the frozen values from bits listed in ascending frozen-index order.
    pub fn set_frozen_values(&mut self, values: &[bool]) -> Result<(), ConstructionError> {
        if values.len() != self.frozen_set.len() {
            return Err(ConstructionError::FrozenValues(format!(
                "expected {} values, got {}",
                self.frozen_set.len(),
                values.len()
            )));
        }
        let mut block = BitBlock::zeros(self.len())?;
        for (&i, &v) in self.frozen_set.iter().zip(values) {
            block.set(i, v);
        }
        self.frozen_values = block;
        Ok(())
    }

    pub fn with_frozen_values(mut self, values: &[bool]) -> Result<Self, ConstructionError> {
        self.set_frozen_values(values)?;
        Ok(self)
    }

    /// Encodes information bits (ascending info-index order) into `c = uE`.
    pub fn encode(&self, info_bits: &[bool]) -> Result<BitBlock, ConstructionError> {
        if info_bits.len() != self.info_set.len() {
            return Err(ConstructionError::Dimension {
                k: info_bits.len(),
                len: self.info_set.len(),
            });
        }
        let mut u = self.frozen_values.clone();
        for (&i, &b) in self.info_set.iter().zip(info_bits) {
            u.set(i, b);
        }
        u.transform_in_place();
        Ok(u)
    }

    /// `(cE)` restricted to the frozen set.
    pub fn syndrome(&self, word: &BitBlock) -> crate::bits::BitVector {
        word.transformed().gather(&self.frozen_set)
    }
}

/// The `[N, K]` polar code whose information set is the top `K` rows of
/// `rank_rows`. For Q1 this is the code with the first `N - K` rows frozen.
pub fn build_classical_code(
    n: usize,
    k: usize,
    spec: &ConstructionSpec,
    frozen_values: Option<&[bool]>,
) -> Result<ClassicalPolarCode, ConstructionError> {
    spec.validate(n)?;
    let len = 1usize << n;
    if k > len {
        return Err(ConstructionError::Dimension { k, len });
    }
    let order = rank_rows(n, spec)?;
    let mut code = ClassicalPolarCode::from_info_set(n, &order[..k])?;
    code.construction = Some(spec.clone());
    if let Some(values) = frozen_values {
        code.set_frozen_values(values)?;
    }
    Ok(code)
}

/// Serialized description of a classical code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalCodeDescription {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub construction: Option<ConstructionSpec>,
    pub info_set: Vec<usize>,
    pub frozen_set: Vec<usize>,
}

impl From<&ClassicalPolarCode> for ClassicalCodeDescription {
    fn from(code: &ClassicalPolarCode) -> Self {
        Self {
            n: code.n,
            k: code.dimension(),
            construction: code.construction.clone(),
            info_set: code.info_set.clone(),
            frozen_set: code.frozen_set.clone(),
        }
    }
}

//! Decision stages over a syndrome-decoding list, and exhaustive oracles.
//!
//! Both list rules work on a per-class summary: for every error class seen,
//! its weight histogram and its first lightest element. The min-weight rule
//! (SCL-E) picks the class holding the lightest element; the coset rule
//! (SCL-C) picks the class maximizing `sum_w N(w) q^w`, `q = p / (1 - p)`.
//! The exhaustive decoders build the same summary from the whole coset, so a
//! full list reproduces them exactly.
//!
//! Ties between classes are broken with a seeded generator. The coset rule
//! first evaluates the min-weight rule with the same seed and, on an exact
//! score tie involving that class, returns it; the two rules therefore never
//! disagree through randomness alone.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitBlock, BitVector};
use crate::quantum::{ClassLabel, QuantumError, QuantumPolarCode};
use crate::scl::DecodeList;

/// Largest blocklength the exhaustive decoders accept.
pub const EXACT_MAX_LEN: usize = 32;
/// Largest `K_Z` the exhaustive decoders accept (2^K_Z coset elements).
pub const EXACT_MAX_KZ: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("decode list is empty")]
    EmptyList,
    #[error("coset scoring requires 0 < p < 0.5, got {0}")]
    FlipProbability(f64),
    #[error("exhaustive decoding supports N <= {EXACT_MAX_LEN} and K_Z <= {EXACT_MAX_KZ}; got N = {len}, K_Z = {k_z}")]
    TooLarge { len: usize, k_z: usize },
    #[error("syndrome has length {got}, expected {expected}")]
    SyndromeLength { expected: usize, got: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Weight -> number of patterns of that weight.
pub type WeightHistogram = BTreeMap<usize, u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum SpectrumSource {
    FromList { list_size: usize },
    Exhaustive,
}

/// Per-class weight histograms for one syndrome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSpectrum {
    pub classes: BTreeMap<ClassLabel, WeightHistogram>,
    pub source: SpectrumSource,
}

impl ClassSpectrum {
    pub fn histogram(&self, label: &ClassLabel) -> Option<&WeightHistogram> {
        self.classes.get(label)
    }

    /// Lightest weight over all classes.
    pub fn min_weight(&self) -> Option<usize> {
        self.classes.values().filter_map(|h| h.keys().next().copied()).min()
    }

    pub fn total(&self) -> u64 {
        self.classes.values().flat_map(|h| h.values()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub chosen_label: ClassLabel,
    pub correction: BitBlock,
    /// Coset rule: log coset score. Min-weight rules: minus the class's
    /// lightest weight. Larger is better for both.
    pub per_class_score: BTreeMap<ClassLabel, f64>,
    pub tie_broken: bool,
}

impl Decision {
    pub fn dump(&self, syndrome: &BitVector) -> DecisionDump {
        DecisionDump {
            syndrome: syndrome.to_string(),
            chosen_label: self.chosen_label.to_string(),
            correction_weight: self.correction.weight(),
            per_class_score: self
                .per_class_score
                .iter()
                .map(|(l, s)| (l.to_string(), *s))
                .collect(),
            tie_broken: self.tie_broken,
        }
    }
}

/// JSON-friendly view of a decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionDump {
    pub syndrome: String,
    pub chosen_label: String,
    pub correction_weight: usize,
    pub per_class_score: BTreeMap<String, f64>,
    pub tie_broken: bool,
}

#[derive(Debug, Clone)]
struct ClassSummary {
    histogram: WeightHistogram,
    min_weight: usize,
    representative: BitBlock,
}

type Summaries = BTreeMap<ClassLabel, ClassSummary>;

fn add_pattern(summaries: &mut Summaries, label: ClassLabel, weight: usize, pattern: impl FnOnce() -> BitBlock) {
    match summaries.get_mut(&label) {
        Some(s) => {
            *s.histogram.entry(weight).or_insert(0) += 1;
            if weight < s.min_weight {
                s.min_weight = weight;
                s.representative = pattern();
            }
        }
        None => {
            summaries.insert(
                label,
                ClassSummary {
                    histogram: BTreeMap::from([(weight, 1)]),
                    min_weight: weight,
                    representative: pattern(),
                },
            );
        }
    }
}

fn list_summaries(qpc: &QuantumPolarCode, list: &DecodeList) -> Result<Summaries, DecisionError> {
    if list.is_empty() {
        return Err(DecisionError::EmptyList);
    }
    let mut seen: HashSet<&BitBlock> = HashSet::with_capacity(list.len());
    let mut summaries = Summaries::new();
    for entry in &list.entries {
        if !seen.insert(&entry.codeword) {
            continue;
        }
        let label = qpc.label_of_transform(&entry.u);
        add_pattern(&mut summaries, label, entry.codeword.weight(), || entry.codeword.clone());
    }
    Ok(summaries)
}

fn summaries_to_spectrum(summaries: &Summaries, source: SpectrumSource) -> ClassSpectrum {
    ClassSpectrum {
        classes: summaries
            .iter()
            .map(|(l, s)| (l.clone(), s.histogram.clone()))
            .collect(),
        source,
    }
}

/// Draws one of the tied classes with probability proportional to its
/// number of lightest patterns, i.e. a uniform draw over the tied patterns.
fn pick<'a>(tied: &[(&'a ClassLabel, u64)], tie_seed: u64) -> &'a ClassLabel {
    if tied.len() == 1 {
        return tied[0].0;
    }
    let total: u64 = tied.iter().map(|t| t.1).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(tie_seed);
    let mut r = rng.gen_range(0..total);
    for &(label, count) in tied {
        if r < count {
            return label;
        }
        r -= count;
    }
    unreachable!("draw below the total")
}

fn min_weight_choice(summaries: &Summaries, tie_seed: u64) -> Decision {
    let best = summaries.values().map(|s| s.min_weight).min().expect("nonempty");
    // BTreeMap iteration gives the labels sorted
    let tied: Vec<(&ClassLabel, u64)> = summaries
        .iter()
        .filter(|(_, s)| s.min_weight == best)
        .map(|(l, s)| (l, s.histogram[&best]))
        .collect();
    let chosen = pick(&tied, tie_seed).clone();
    Decision {
        correction: summaries[&chosen].representative.clone(),
        per_class_score: summaries
            .iter()
            .map(|(l, s)| (l.clone(), -(s.min_weight as f64)))
            .collect(),
        tie_broken: tied.len() > 1,
        chosen_label: chosen,
    }
}

fn coset_choice(summaries: &Summaries, p: f64, tie_seed: u64) -> Result<Decision, DecisionError> {
    check_p(p)?;
    let scores: BTreeMap<ClassLabel, f64> = summaries
        .iter()
        .map(|(l, s)| Ok((l.clone(), coset_score(&s.histogram, p)?)))
        .collect::<Result<_, DecisionError>>()?;
    let best = scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<&ClassLabel> = scores
        .iter()
        .filter(|(_, &s)| s == best)
        .map(|(l, _)| l)
        .collect();
    let tie_broken = tied.len() > 1;
    let chosen = if !tie_broken {
        tied[0].clone()
    } else {
        let reference = min_weight_choice(summaries, tie_seed).chosen_label;
        if tied.contains(&&reference) {
            reference
        } else {
            tied[0].clone()
        }
    };
    Ok(Decision {
        correction: summaries[&chosen].representative.clone(),
        per_class_score: scores,
        tie_broken,
        chosen_label: chosen,
    })
}

fn check_p(p: f64) -> Result<(), DecisionError> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(DecisionError::FlipProbability(p))
    }
}

/// `log sum_w N(w) q^w` with `q = p / (1 - p)`; `-inf` when empty.
pub fn coset_score(histogram: &WeightHistogram, p: f64) -> Result<f64, DecisionError> {
    check_p(p)?;
    let log_q = (p / (1.0 - p)).ln();
    let terms: Vec<f64> = histogram
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&w, &c)| (c as f64).ln() + w as f64 * log_q)
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln())
}

/// Min-weight decision over a syndrome-decoding list.
pub fn scl_e_decide(
    qpc: &QuantumPolarCode,
    list: &DecodeList,
    tie_seed: u64,
) -> Result<Decision, DecisionError> {
    Ok(min_weight_choice(&list_summaries(qpc, list)?, tie_seed))
}

/// Coset-probability decision over a syndrome-decoding list.
pub fn scl_c_decide(
    qpc: &QuantumPolarCode,
    list: &DecodeList,
    p: f64,
    tie_seed: u64,
) -> Result<Decision, DecisionError> {
    check_p(p)?;
    coset_choice(&list_summaries(qpc, list)?, p, tie_seed)
}

/// Both list decisions from one pass over the list.
pub fn scl_decide_both(
    qpc: &QuantumPolarCode,
    list: &DecodeList,
    p: f64,
    tie_seed: u64,
) -> Result<(Decision, Decision), DecisionError> {
    check_p(p)?;
    let summaries = list_summaries(qpc, list)?;
    Ok((min_weight_choice(&summaries, tie_seed), coset_choice(&summaries, p, tie_seed)?))
}

/// Histograms of the listed noise estimates, deduplicated, by class.
pub fn list_spectrum(
    qpc: &QuantumPolarCode,
    list: &DecodeList,
    list_size: usize,
) -> Result<ClassSpectrum, DecisionError> {
    Ok(summaries_to_spectrum(
        &list_summaries(qpc, list)?,
        SpectrumSource::FromList { list_size },
    ))
}

/// Calls `visit(pattern, label)` for each of the `2^K_Z` patterns with the
/// given syndrome, in Gray-code order. Patterns and labels are packed into
/// `u64`s: bit `j` of the pattern is position `j`; bit `t` of the label is
/// the `t`-th logical row.
pub fn for_each_coset_element(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
    mut visit: impl FnMut(u64, u64),
) -> Result<(), DecisionError> {
    let len = qpc.len();
    let k_z = qpc.k_z();
    if len > EXACT_MAX_LEN || k_z > EXACT_MAX_KZ {
        return Err(DecisionError::TooLarge { len, k_z });
    }
    let frozen = qpc.frozen_z();
    if syndrome.len() != frozen.len() {
        return Err(DecisionError::SyndromeLength {
            expected: frozen.len(),
            got: syndrome.len(),
        });
    }
    let mut u = BitBlock::zeros(len).expect("power of two");
    for (k, &i) in frozen.iter().enumerate() {
        u.set(i, syndrome.get(k));
    }
    let mut pattern = u.transformed().words()[0];
    let info = qpc.info_z();
    let rows: Vec<u64> = info
        .iter()
        .map(|&i| BitBlock::unit(len, i).expect("in range").transformed().words()[0])
        .collect();
    let label_bits: Vec<u64> = info
        .iter()
        .map(|i| match qpc.logical().binary_search(i) {
            Ok(t) => 1u64 << t,
            Err(_) => 0,
        })
        .collect();
    let mut label = 0u64;
    visit(pattern, label);
    for step in 1u64..1u64 << k_z {
        let j = step.trailing_zeros() as usize;
        pattern ^= rows[j];
        label ^= label_bits[j];
        visit(pattern, label);
    }
    Ok(())
}

fn exhaustive_summaries(qpc: &QuantumPolarCode, syndrome: &BitVector) -> Result<Summaries, DecisionError> {
    let len = qpc.len();
    let k = qpc.k();
    let mut packed: BTreeMap<u64, (WeightHistogram, usize, u64)> = BTreeMap::new();
    for_each_coset_element(qpc, syndrome, |pattern, label| {
        let w = pattern.count_ones() as usize;
        let entry = packed.entry(label).or_insert((BTreeMap::new(), usize::MAX, 0));
        *entry.0.entry(w).or_insert(0) += 1;
        if w < entry.1 {
            entry.1 = w;
            entry.2 = pattern;
        }
    })?;
    Ok(packed
        .into_iter()
        .map(|(label, (histogram, min_weight, rep))| {
            (
                ClassLabel(BitVector::from_u64(label, k)),
                ClassSummary {
                    histogram,
                    min_weight,
                    representative: BitBlock::new(BitVector::from_u64(rep, len))
                        .expect("power of two"),
                },
            )
        })
        .collect())
}

/// Complete per-class histograms for a syndrome (small codes only).
pub fn exhaustive_spectrum(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
) -> Result<ClassSpectrum, DecisionError> {
    Ok(summaries_to_spectrum(
        &exhaustive_summaries(qpc, syndrome)?,
        SpectrumSource::Exhaustive,
    ))
}

/// Exact maximum-likelihood (coset) decoding by enumeration.
pub fn exact_mld(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
    p: f64,
    tie_seed: u64,
) -> Result<Decision, DecisionError> {
    check_p(p)?;
    coset_choice(&exhaustive_summaries(qpc, syndrome)?, p, tie_seed)
}

/// Exact minimum-weight decoding by enumeration.
pub fn exact_mwd(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
    tie_seed: u64,
) -> Result<Decision, DecisionError> {
    Ok(min_weight_choice(&exhaustive_summaries(qpc, syndrome)?, tie_seed))
}

/// Both exact decisions from one enumeration.
pub fn exact_decide_both(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
    p: f64,
    tie_seed: u64,
) -> Result<(Decision, Decision), DecisionError> {
    check_p(p)?;
    let summaries = exhaustive_summaries(qpc, syndrome)?;
    Ok((min_weight_choice(&summaries, tie_seed), coset_choice(&summaries, p, tie_seed)?))
}

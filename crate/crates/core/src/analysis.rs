//! Weight spectra, distance bounds and the Q1 index scan.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVector;
use crate::decision::{exhaustive_spectrum, list_spectrum, ClassSpectrum, SpectrumSource};
use crate::quantum::{build_q1, QuantumPolarCode};
use crate::scl::SclDecoder;
use crate::sim::{
    combined_rate, estimate, sample_bsc, trial_rng, DecoderKind, ErrorType, SimError, SimJob,
    Stream,
};

/// Flip probability behind the syndrome decoder's LLRs when listing
/// low-weight patterns.
pub const DEFAULT_SPECTRUM_P: f64 = 0.05;

/// Per-class histograms of the noise patterns a size-`list_size` syndrome
/// decoder lists for `syndrome`.
pub fn weight_spectrum(
    qpc: &QuantumPolarCode,
    syndrome: &BitVector,
    p: f64,
    list_size: usize,
) -> Result<ClassSpectrum, SimError> {
    let mut decoder = SclDecoder::with_list_size(list_size)?;
    let list = decoder.decode_syndrome(qpc.x_noise_code(), syndrome, p)?;
    Ok(list_spectrum(qpc, &list, list_size)?)
}

/// `min over logical rows i of 2^wt(i)`, the weight of the lightest
/// logical row of `E`.
pub fn row_weight_bound(qpc: &QuantumPolarCode) -> usize {
    qpc.logical()
        .iter()
        .map(|&i| 1usize << i.count_ones())
        .min()
        .expect("at least one logical row")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub row_weight_bound: usize,
    /// Lightest nonzero-class pattern listed for the zero syndrome. `None`
    /// when the list holds only stabilizers.
    pub search_min: Option<usize>,
    pub search_list_size: usize,
    /// Exact X distance by enumeration, for small codes.
    pub exhaustive: Option<usize>,
}

/// Upper bounds on the weight of the lightest X logical operator.
pub fn distance_report(qpc: &QuantumPolarCode, list_size: usize) -> Result<DistanceReport, SimError> {
    let zero = BitVector::zeros(qpc.frozen_z().len());
    let spectrum = weight_spectrum(qpc, &zero, DEFAULT_SPECTRUM_P, list_size)?;
    let exhaustive = match exhaustive_spectrum(qpc, &zero) {
        Ok(s) => nonzero_class_min(&s),
        Err(_) => None,
    };
    Ok(DistanceReport {
        row_weight_bound: row_weight_bound(qpc),
        search_min: nonzero_class_min(&spectrum),
        search_list_size: list_size,
        exhaustive,
    })
}

fn nonzero_class_min(spectrum: &ClassSpectrum) -> Option<usize> {
    spectrum
        .classes
        .iter()
        .filter(|(label, _)| !label.is_zero())
        .filter_map(|(_, h)| h.keys().next().copied())
        .min()
}

/// How the spectra of a batch are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumMode {
    List { list_size: usize, decode_p: f64 },
    Exhaustive,
}

/// Spectrum of the syndrome of a sampled noise pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyndromeSpectrum {
    pub syndrome_id: u64,
    pub syndrome: BitVector,
    pub spectrum: ClassSpectrum,
}

/// Spectra for `count` syndromes of BSC(`noise_p`) noise. Syndrome `t` comes
/// from the X-noise stream of trial `t` under `seed`.
pub fn spectrum_batch(
    qpc: &QuantumPolarCode,
    count: u64,
    noise_p: f64,
    mode: SpectrumMode,
    seed: u64,
) -> Result<Vec<SyndromeSpectrum>, SimError> {
    (0..count)
        .into_par_iter()
        .map(|t| {
            let noise = sample_bsc(qpc.len(), noise_p, &mut trial_rng(seed, 0, t, Stream::XNoise));
            let syndrome = qpc.x_syndrome(&noise)?;
            let spectrum = match mode {
                SpectrumMode::List { list_size, decode_p } => {
                    weight_spectrum(qpc, &syndrome, decode_p, list_size)?
                }
                SpectrumMode::Exhaustive => exhaustive_spectrum(qpc, &syndrome)?,
            };
            Ok(SyndromeSpectrum {
                syndrome_id: t,
                syndrome,
                spectrum,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub class_label: String,
    pub weight: usize,
    pub count: u64,
    /// 0 for exhaustive spectra.
    pub list_size: usize,
    pub syndrome_id: u64,
    pub seed: u64,
}

pub fn spectrum_rows(batch: &[SyndromeSpectrum], seed: u64) -> Vec<SpectrumRow> {
    let mut rows = Vec::new();
    for item in batch {
        let list_size = match item.spectrum.source {
            SpectrumSource::FromList { list_size } => list_size,
            SpectrumSource::Exhaustive => 0,
        };
        for (label, hist) in &item.spectrum.classes {
            for (&weight, &count) in hist {
                rows.push(SpectrumRow {
                    class_label: label.to_string(),
                    weight,
                    count,
                    list_size,
                    syndrome_id: item.syndrome_id,
                    seed,
                });
            }
        }
    }
    rows
}

pub fn write_csv<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const SPECTRUM_HEADER: [&str; 6] = ["class_label", "weight", "count", "list_size", "syndrome_id", "seed"];

pub const Q1_SCAN_HEADER: [&str; 6] = ["i", "p", "trials", "P_L_X", "P_L_Z", "P_L"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Q1ScanRow {
    pub i: usize,
    pub p: f64,
    pub trials: u64,
    #[serde(rename = "P_L_X")]
    pub p_x: f64,
    #[serde(rename = "P_L_Z")]
    pub p_z: f64,
    #[serde(rename = "P_L")]
    pub p_l: f64,
}

/// SC-decoded X, Z and combined rates of the Q1 code at each candidate
/// information index. Every index sees the same noise draws.
pub fn q1_scan(
    n: usize,
    candidates: &[usize],
    p_grid: &[f64],
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<Q1ScanRow>, SimError> {
    let mut rows = Vec::new();
    for &i in candidates {
        let code = build_q1(n, i)?;
        let mut job = SimJob::new(code, vec![DecoderKind::Sc], 1);
        job.p_grid = p_grid.to_vec();
        job.trials = trials;
        job.master_seed = seed;
        job.threads = threads;
        let x = estimate(&job)?;
        job.error_type = ErrorType::Z;
        let z = estimate(&job)?;
        for (px, pz) in x.iter().zip(&z) {
            rows.push(Q1ScanRow {
                i,
                p: px.p,
                trials,
                p_x: px.estimate,
                p_z: pz.estimate,
                p_l: combined_rate(px.estimate, pz.estimate),
            });
        }
    }
    Ok(rows)
}

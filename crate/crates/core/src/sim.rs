//! Seeded Monte Carlo estimation of logical error rates.
//!
//! Every trial draws from its own generator keyed by
//! `(master_seed, p_index, trial_index, stream)`, so results depend only on
//! the job, never on scheduling or thread count. Trials are reduced as
//! counts.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitBlock, BitVector};
use crate::decision::{
    exact_decide_both, exact_mld, exact_mwd, scl_decide_both, scl_e_decide, DecisionError,
};
use crate::quantum::{QuantumError, QuantumPolarCode};
use crate::scl::{DecodeError, SclDecoder};

/// Trials per chunk when early stopping is enabled.
pub const EARLY_STOP_CHUNK: u64 = 1000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("decoder {decoder} returned a correction with the wrong syndrome (p index {p_index}, trial {trial})")]
    Inconsistent {
        decoder: DecoderKind,
        p_index: usize,
        trial: u64,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecoderKind {
    #[serde(rename = "SC")]
    Sc,
    /// Frame errors `n_hat != n` of the list decoder's output, which is the
    /// lightest listed pattern with class ties resolved as in SCL-E.
    #[serde(rename = "SCL_frame")]
    SclFrame,
    #[serde(rename = "SCL_E")]
    SclE,
    #[serde(rename = "SCL_C")]
    SclC,
    #[serde(rename = "MWD")]
    Mwd,
    #[serde(rename = "MLD")]
    Mld,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 6] = [
        DecoderKind::Sc,
        DecoderKind::SclFrame,
        DecoderKind::SclE,
        DecoderKind::SclC,
        DecoderKind::Mwd,
        DecoderKind::Mld,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Sc => "SC",
            DecoderKind::SclFrame => "SCL_frame",
            DecoderKind::SclE => "SCL_E",
            DecoderKind::SclC => "SCL_C",
            DecoderKind::Mwd => "MWD",
            DecoderKind::Mld => "MLD",
        }
    }

    fn uses_list(self) -> bool {
        matches!(self, DecoderKind::SclFrame | DecoderKind::SclE | DecoderKind::SclC)
    }

    /// List size reported for this decoder: `L` for list rules, 1 for SC and
    /// 0 for the exhaustive decoders.
    pub fn reported_list_size(self, list_size: usize) -> usize {
        match self {
            DecoderKind::Sc => 1,
            DecoderKind::Mwd | DecoderKind::Mld => 0,
            _ => list_size,
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown decoder {s:?}; expected one of SC, SCL_frame, SCL_E, SCL_C, MWD, MLD"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorType {
    /// Bit flips only.
    #[default]
    X,
    /// Phase flips only.
    Z,
    /// Independent bit and phase flips; a trial fails if either fails.
    Both,
}

#[derive(Debug, Clone)]
pub struct SimJob {
    pub code: QuantumPolarCode,
    pub decoders: Vec<DecoderKind>,
    pub list_size: usize,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub error_type: ErrorType,
    /// Stop a point once every decoder has this many logical errors,
    /// checked every [`EARLY_STOP_CHUNK`] trials.
    pub early_stop: Option<u64>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SimJob {
    pub fn new(code: QuantumPolarCode, decoders: Vec<DecoderKind>, list_size: usize) -> Self {
        Self {
            code,
            decoders,
            list_size,
            p_grid: Vec::new(),
            trials: 0,
            master_seed: 0,
            error_type: ErrorType::X,
            early_stop: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.decoders.is_empty() {
            return Err(SimError::InvalidJob("no decoders requested".into()));
        }
        if self.p_grid.is_empty() {
            return Err(SimError::InvalidJob("p_grid is empty".into()));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(**p > 0.0 && **p < 0.5)) {
            return Err(SimError::InvalidJob(format!("flip probability {p} outside (0, 0.5)")));
        }
        if self.trials == 0 {
            return Err(SimError::InvalidJob("trials must be at least 1".into()));
        }
        if self.list_size == 0 {
            return Err(SimError::InvalidJob("list size must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(SimError::InvalidJob("threads must be at least 1".into()));
        }
        if self.early_stop == Some(0) {
            return Err(SimError::InvalidJob("early_stop must be at least 1".into()));
        }
        let exact = self
            .decoders
            .iter()
            .any(|d| matches!(d, DecoderKind::Mwd | DecoderKind::Mld));
        if exact && self.code.len() > crate::decision::EXACT_MAX_LEN {
            return Err(SimError::InvalidJob(format!(
                "MWD/MLD need N <= {}, got N = {}",
                crate::decision::EXACT_MAX_LEN,
                self.code.len()
            )));
        }
        Ok(())
    }
}

/// Random stream roles within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    XNoise = 0,
    XTies = 1,
    ZNoise = 2,
    ZTies = 3,
}

/// The generator for one stream of one trial.
pub fn trial_rng(master_seed: u64, p_index: usize, trial: u64, stream: Stream) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(p_index as u64).to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..].copy_from_slice(&(stream as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// I.i.d. Bernoulli(`p`) flips.
pub fn sample_bsc<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> BitBlock {
    let p = p.clamp(0.0, 1.0);
    let mut words = vec![0u64; len.div_ceil(64)];
    for i in 0..len {
        if rng.gen_bool(p) {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    BitBlock::new(BitVector::from_words(words, len)).expect("power-of-two length")
}

/// `1 - (1 - P_X)(1 - P_Z)`.
pub fn combined_rate(p_x: f64, p_z: f64) -> f64 {
    1.0 - (1.0 - p_x) * (1.0 - p_z)
}

/// Outcome of one decoder on one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Outcome {
    pub frame_error: bool,
    pub logical_error: bool,
}

/// Reusable per-worker decoders.
pub struct Workspace {
    sc: SclDecoder,
    scl: SclDecoder,
}

impl Workspace {
    pub fn new(list_size: usize) -> Result<Self, SimError> {
        Ok(Self {
            sc: SclDecoder::with_list_size(1)?,
            scl: SclDecoder::with_list_size(list_size)?,
        })
    }
}

/// Decodes one X-type noise pattern with every decoder in `decoders`;
/// `outcomes[k]` corresponds to `decoders[k]`.
pub fn decode_x_noise(
    code: &QuantumPolarCode,
    noise: &BitBlock,
    p: f64,
    decoders: &[DecoderKind],
    tie_seed: u64,
    ws: &mut Workspace,
    outcomes: &mut [Outcome],
) -> Result<(), SimError> {
    let syndrome = code.x_syndrome(noise)?;
    let classical = code.x_noise_code();
    let evaluate = |correction: &BitBlock| -> Option<Outcome> {
        let residual = noise ^ correction;
        let (s, label) = code.syndrome_and_label(&residual).ok()?;
        if !s.is_zero() {
            return None;
        }
        Some(Outcome {
            frame_error: !residual.is_zero(),
            logical_error: !label.is_zero(),
        })
    };
    let inconsistent = |decoder| SimError::Inconsistent {
        decoder,
        p_index: usize::MAX,
        trial: u64::MAX,
    };

    let list = if decoders.iter().any(|d| d.uses_list()) {
        Some(ws.scl.decode_syndrome(classical, &syndrome, p)?)
    } else {
        None
    };
    let list_pair = match (&list, decoders.contains(&DecoderKind::SclC)) {
        (Some(list), true) => Some(scl_decide_both(code, list, p, tie_seed)?),
        _ => None,
    };
    let exact_pair = if decoders.contains(&DecoderKind::Mwd) && decoders.contains(&DecoderKind::Mld) {
        Some(exact_decide_both(code, &syndrome, p, tie_seed)?)
    } else {
        None
    };

    for (slot, &decoder) in outcomes.iter_mut().zip(decoders) {
        let outcome = match decoder {
            DecoderKind::Sc => {
                let sc = ws.sc.decode_syndrome(classical, &syndrome, p)?;
                evaluate(&sc.best().codeword)
            }
            DecoderKind::SclFrame | DecoderKind::SclE => {
                let d = match &list_pair {
                    Some((e, _)) => e.clone(),
                    None => scl_e_decide(code, list.as_ref().expect("list decoded"), tie_seed)?,
                };
                let o = evaluate(&d.correction);
                if decoder == DecoderKind::SclFrame {
                    o.map(|o| Outcome {
                        logical_error: o.frame_error,
                        ..o
                    })
                } else {
                    o
                }
            }
            DecoderKind::SclC => evaluate(&list_pair.as_ref().expect("pair decided").1.correction),
            DecoderKind::Mwd => {
                let d = match &exact_pair {
                    Some((w, _)) => w.clone(),
                    None => exact_mwd(code, &syndrome, tie_seed)?,
                };
                evaluate(&d.correction)
            }
            DecoderKind::Mld => {
                let d = match &exact_pair {
                    Some((_, m)) => m.clone(),
                    None => exact_mld(code, &syndrome, p, tie_seed)?,
                };
                evaluate(&d.correction)
            }
        };
        *slot = outcome.ok_or_else(|| inconsistent(decoder))?;
    }
    Ok(())
}

/// Runs trial `trial` at grid point `p_index`; returns one outcome per
/// requested decoder.
pub fn run_trial(
    job: &SimJob,
    mirror: &QuantumPolarCode,
    p_index: usize,
    trial: u64,
    ws: &mut Workspace,
) -> Result<Vec<Outcome>, SimError> {
    let p = job.p_grid[p_index];
    let len = job.code.len();
    let k = job.decoders.len();
    let with_context = |e: SimError| match e {
        SimError::Inconsistent { decoder, .. } => SimError::Inconsistent {
            decoder,
            p_index,
            trial,
        },
        other => other,
    };
    let mut x = vec![Outcome::default(); k];
    let mut z = vec![Outcome::default(); k];
    if matches!(job.error_type, ErrorType::X | ErrorType::Both) {
        let noise = sample_bsc(len, p, &mut trial_rng(job.master_seed, p_index, trial, Stream::XNoise));
        let tie_seed = trial_rng(job.master_seed, p_index, trial, Stream::XTies).gen();
        decode_x_noise(&job.code, &noise, p, &job.decoders, tie_seed, ws, &mut x)
            .map_err(with_context)?;
    }
    if matches!(job.error_type, ErrorType::Z | ErrorType::Both) {
        let noise = sample_bsc(len, p, &mut trial_rng(job.master_seed, p_index, trial, Stream::ZNoise));
        let tie_seed = trial_rng(job.master_seed, p_index, trial, Stream::ZTies).gen();
        // the Z problem is the mirror's X problem on the reversed pattern
        decode_x_noise(mirror, &noise.reversed(), p, &job.decoders, tie_seed, ws, &mut z)
            .map_err(with_context)?;
    }
    Ok(x
        .iter()
        .zip(&z)
        .map(|(a, b)| Outcome {
            frame_error: a.frame_error || b.frame_error,
            logical_error: a.logical_error || b.logical_error,
        })
        .collect())
}

/// One estimated rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPoint {
    pub p: f64,
    pub decoder: DecoderKind,
    pub list_size: usize,
    pub trials: u64,
    pub logical_errors: u64,
    pub frame_errors: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl SimPoint {
    fn from_counts(p: f64, decoder: DecoderKind, list_size: usize, trials: u64, logical: u64, frame: u64, seed: u64) -> Self {
        let estimate = logical as f64 / trials as f64;
        Self {
            p,
            decoder,
            list_size: decoder.reported_list_size(list_size),
            trials,
            logical_errors: logical,
            frame_errors: frame,
            estimate,
            stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Counts {
    logical: Vec<u64>,
    frame: Vec<u64>,
}

impl Counts {
    fn zeros(k: usize) -> Self {
        Self {
            logical: vec![0; k],
            frame: vec![0; k],
        }
    }

    fn add_outcomes(mut self, outcomes: &[Outcome]) -> Self {
        for (j, o) in outcomes.iter().enumerate() {
            self.logical[j] += o.logical_error as u64;
            self.frame[j] += o.frame_error as u64;
        }
        self
    }

    fn merge(mut self, other: Counts) -> Self {
        for j in 0..self.logical.len() {
            self.logical[j] += other.logical[j];
            self.frame[j] += other.frame[j];
        }
        self
    }
}

fn run_range(
    job: &SimJob,
    mirror: &QuantumPolarCode,
    p_index: usize,
    range: std::ops::Range<u64>,
) -> Result<Counts, SimError> {
    let k = job.decoders.len();
    range
        .into_par_iter()
        .map_init(
            || Workspace::new(job.list_size),
            |ws, t| {
                let ws = ws.as_mut().map_err(|e| SimError::InvalidJob(e.to_string()))?;
                run_trial(job, mirror, p_index, t, ws)
            },
        )
        .try_fold(
            || Counts::zeros(k),
            |acc, outcomes| outcomes.map(|o| acc.add_outcomes(&o)),
        )
        .try_reduce(|| Counts::zeros(k), |a, b| Ok(a.merge(b)))
}

fn estimate_in_pool(job: &SimJob) -> Result<Vec<SimPoint>, SimError> {
    let mirror = job.code.mirrored();
    let mut points = Vec::new();
    for (p_index, &p) in job.p_grid.iter().enumerate() {
        let (counts, trials) = match job.early_stop {
            None => (run_range(job, &mirror, p_index, 0..job.trials)?, job.trials),
            Some(target) => {
                let mut counts = Counts::zeros(job.decoders.len());
                let mut done = 0;
                while done < job.trials {
                    let end = (done + EARLY_STOP_CHUNK).min(job.trials);
                    counts = counts.merge(run_range(job, &mirror, p_index, done..end)?);
                    done = end;
                    if counts.logical.iter().all(|&c| c >= target) {
                        break;
                    }
                }
                (counts, done)
            }
        };
        for (j, &decoder) in job.decoders.iter().enumerate() {
            points.push(SimPoint::from_counts(
                p,
                decoder,
                job.list_size,
                trials,
                counts.logical[j],
                counts.frame[j],
                job.master_seed,
            ));
        }
    }
    Ok(points)
}

/// Estimates every (p, decoder) point of the job.
pub fn estimate(job: &SimJob) -> Result<Vec<SimPoint>, SimError> {
    job.validate()?;
    match job.threads {
        None => estimate_in_pool(job),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SimError::ThreadPool(e.to_string()))?
            .install(|| estimate_in_pool(job)),
    }
}

pub const RESULTS_HEADER: [&str; 14] = [
    "N",
    "K",
    "Kx",
    "Kz",
    "construction",
    "beta",
    "decoder",
    "L",
    "p",
    "trials",
    "logical_errors",
    "P_L",
    "stderr",
    "seed",
];

/// One results row, in header order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    #[serde(rename = "N")]
    pub len: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "Kx")]
    pub k_x: usize,
    #[serde(rename = "Kz")]
    pub k_z: usize,
    pub construction: String,
    pub beta: Option<f64>,
    pub decoder: DecoderKind,
    #[serde(rename = "L")]
    pub list_size: usize,
    pub p: f64,
    pub trials: u64,
    pub logical_errors: u64,
    #[serde(rename = "P_L")]
    pub rate: f64,
    pub stderr: f64,
    pub seed: u64,
}

pub fn result_records(code: &QuantumPolarCode, points: &[SimPoint]) -> Vec<ResultRecord> {
    let construction = code
        .construction()
        .map(|c| c.kind().as_str().to_string())
        .unwrap_or_else(|| "manual".into());
    let beta = code.construction().and_then(|c| c.display_beta());
    points
        .iter()
        .map(|pt| ResultRecord {
            len: code.len(),
            k: code.k(),
            k_x: code.k_x(),
            k_z: code.k_z(),
            construction: construction.clone(),
            beta,
            decoder: pt.decoder,
            list_size: pt.list_size,
            p: pt.p,
            trials: pt.trials,
            logical_errors: pt.logical_errors,
            rate: pt.estimate,
            stderr: pt.stderr,
            seed: pt.seed,
        })
        .collect()
}

pub fn write_results_csv<W: Write>(out: W, records: &[ResultRecord]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(RESULTS_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_json<W: Write>(out: W, records: &[ResultRecord]) -> Result<(), SimError> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

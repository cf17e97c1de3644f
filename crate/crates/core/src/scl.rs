//! LLR-domain successive-cancellation list decoding.
//!
//! The decoder walks input positions `0..N` in order. Each active path owns
//! (or shares, copy-on-write) one LLR array and one partial-sum array per
//! butterfly layer, so forking a path costs `O(1)` array references and total
//! work stays `O(L N log N)`.
//!
//! Layer `l` (1..=n) holds arrays of length `N >> l`. Going from layer `l - 1`
//! to layer `l`, position `j` pairs parent entries `j` and `j + m`: the left
//! child sees `f(a, b)` and the right child, once the left child's partial
//! sums `x` are known, sees `b + (1 - 2x) a`.
//!
//! Surviving paths are always kept in lexicographic order of their decision
//! prefixes. Pruning ranks candidates by metric and then by that order (a
//! continuation with 0 before one with 1), so equal metrics resolve the same
//! way for every list size.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{BitBlock, BitVector};
use crate::construction::ClassicalPolarCode;

/// Magnitude that infinite channel LLRs are clamped to on entry.
pub const DEFAULT_LLR_SATURATION: f64 = 1e6;

// exp(-50) < 2e-22: below this the correction terms of f are dropped.
const SOFTPLUS_CUTOFF: f64 = 50.0;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("flip probability must lie in (0, 1), got {0}")]
    FlipProbability(f64),
    #[error("expected {expected} channel LLRs, got {got}")]
    LlrLength { expected: usize, got: usize },
    #[error("expected a syndrome of length {expected}, got {got}")]
    SyndromeLength { expected: usize, got: usize },
    #[error("list size must be at least 1")]
    ListSize,
    #[error("channel LLR at position {0} is NaN")]
    NanLlr(usize),
}

/// Check-node combine rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CheckNodeKernel {
    /// `2 atanh(tanh(a/2) tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a) sign(b) min(|a|, |b|)`. An approximation; path metrics are
    /// then no longer posterior probabilities.
    MinSum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SclConfig {
    pub list_size: usize,
    pub llr_saturation: f64,
    pub kernel: CheckNodeKernel,
    /// Record surviving metrics after every information bit.
    pub record_trace: bool,
}

impl SclConfig {
    pub fn with_list_size(list_size: usize) -> Self {
        Self {
            list_size,
            ..Self::default()
        }
    }
}

impl Default for SclConfig {
    fn default() -> Self {
        Self {
            list_size: 1,
            llr_saturation: DEFAULT_LLR_SATURATION,
            kernel: CheckNodeKernel::Exact,
            record_trace: false,
        }
    }
}

/// `ln((1 - p) / p)` signed by the received bit.
pub fn bsc_llr(y: bool, p: f64) -> Result<f64, DecodeError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(DecodeError::FlipProbability(p));
    }
    let magnitude = ((1.0 - p) / p).ln();
    Ok(if y { -magnitude } else { magnitude })
}

/// `ln(1 + e^{-x})` for `x >= 0`.
#[inline]
fn log1p_exp_neg(x: f64) -> f64 {
    if x > SOFTPLUS_CUTOFF {
        0.0
    } else {
        (-x).exp().ln_1p()
    }
}

/// `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    x.max(0.0) + log1p_exp_neg(x.abs())
}

/// Check-node combine `f(a, b) = 2 atanh(tanh(a/2) tanh(b/2))`, evaluated as
/// `sign(a) sign(b) [m + ln(1+e^{-(|a|+|b|)}) - ln(1+e^{-(M-m)})]` with
/// `m`, `M` the smaller and larger magnitude.
#[inline]
pub fn check_node(a: f64, b: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    let (m, big) = if x < y { (x, y) } else { (y, x) };
    let gap = big - m;
    let magnitude = if gap > SOFTPLUS_CUTOFF {
        // both corrections are below the cutoff
        m
    } else {
        let s = (-gap).exp();
        let t = if m > SOFTPLUS_CUTOFF { 0.0 } else { s * (-2.0 * m).exp() };
        // ln((1 + t) / (1 + s))
        m + ((t - s) / (1.0 + s)).ln_1p()
    };
    if (a < 0.0) != (b < 0.0) {
        -magnitude
    } else {
        magnitude
    }
}

#[inline]
pub fn check_node_min_sum(a: f64, b: f64) -> f64 {
    let magnitude = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -magnitude
    } else {
        magnitude
    }
}

/// Bit-node combine `g(a, b, u) = b + (1 - 2u) a`.
#[inline]
pub fn bit_node(a: f64, b: f64, u: bool) -> f64 {
    if u {
        b - a
    } else {
        b + a
    }
}

/// Path metric after deciding `u` against an LLR:
/// `metric - ln(1 + exp(-(1 - 2u) llr))`.
#[inline]
pub fn pm_update(metric: f64, llr: f64, u: bool) -> f64 {
    let agreeing = if u { -llr } else { llr };
    metric - softplus(-agreeing)
}

/// One completed path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListEntry {
    /// Input decisions, frozen positions included.
    pub u: BitBlock,
    /// `u E`. In syndrome mode this is the noise estimate.
    pub codeword: BitBlock,
    /// Log of a quantity proportional to `Pr[u | y]`.
    pub metric: f64,
}

/// Surviving paths, best metric first; equal metrics keep prefix order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeList {
    pub entries: Vec<ListEntry>,
}

impl DecodeList {
    pub fn best(&self) -> &ListEntry {
        &self.entries[0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Surviving paths after pruning at one information bit, in prefix order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStage {
    pub phase: usize,
    pub metrics: Vec<f64>,
    /// Decisions `u_0..=u_phase` of each surviving path.
    pub prefixes: Vec<BitVector>,
}

struct Pool<T> {
    len: usize,
    data: Vec<T>,
    refs: Vec<u32>,
    free: Vec<u32>,
}

impl<T: Copy + Default> Pool<T> {
    fn new(len: usize, capacity: usize) -> Self {
        Self {
            len,
            data: vec![T::default(); len * capacity],
            refs: vec![0; capacity],
            free: (0..capacity as u32).rev().collect(),
        }
    }

    fn reset(&mut self) {
        let capacity = self.refs.len();
        self.refs.iter_mut().for_each(|r| *r = 0);
        self.free.clear();
        self.free.extend((0..capacity as u32).rev());
    }

    #[inline]
    fn alloc(&mut self) -> u32 {
        let id = self.free.pop().expect("array pool exhausted");
        self.refs[id as usize] = 1;
        id
    }

    #[inline]
    fn retain(&mut self, id: u32) {
        if id != NONE {
            self.refs[id as usize] += 1;
        }
    }

    #[inline]
    fn release(&mut self, id: u32) {
        if id != NONE {
            let r = &mut self.refs[id as usize];
            *r -= 1;
            if *r == 0 {
                self.free.push(id);
            }
        }
    }

    #[inline]
    fn slice(&self, id: u32) -> &[T] {
        let start = id as usize * self.len;
        &self.data[start..start + self.len]
    }

    #[inline]
    fn slice_mut(&mut self, id: u32) -> &mut [T] {
        let start = id as usize * self.len;
        &mut self.data[start..start + self.len]
    }

    /// Makes `*id` an exclusively owned array. Contents are preserved only
    /// when `keep` is set.
    #[inline]
    fn own(&mut self, id: &mut u32, keep: bool) {
        if *id != NONE && self.refs[*id as usize] == 1 {
            return;
        }
        let fresh = self.alloc();
        if *id != NONE {
            if keep {
                let len = self.len;
                let (src, dst) = (*id as usize * len, fresh as usize * len);
                self.data.copy_within(src..src + len, dst);
            }
            self.release(*id);
        }
        *id = fresh;
    }
}

/// Reusable SCL decoder workspace. Sized lazily for the code it is handed.
pub struct SclDecoder {
    config: SclConfig,
    n: usize,
    len: usize,
    words: usize,
    channel: Vec<f64>,
    llr_pools: Vec<Pool<f64>>,
    bit_pools: Vec<Pool<u8>>,
    llr_refs: Vec<u32>,
    bit_refs: Vec<u32>,
    metrics: Vec<f64>,
    decisions: Vec<u64>,
    order: Vec<usize>,
    next_order: Vec<usize>,
    free_slots: Vec<usize>,
    candidates: Vec<(f64, u32)>,
    candidate_metrics: Vec<f64>,
    keep: Vec<bool>,
    trace: Vec<TraceStage>,
}

impl SclDecoder {
    pub fn new(config: SclConfig) -> Result<Self, DecodeError> {
        if config.list_size == 0 {
            return Err(DecodeError::ListSize);
        }
        Ok(Self {
            config,
            n: 0,
            len: 0,
            words: 0,
            channel: Vec::new(),
            llr_pools: Vec::new(),
            bit_pools: Vec::new(),
            llr_refs: Vec::new(),
            bit_refs: Vec::new(),
            metrics: Vec::new(),
            decisions: Vec::new(),
            order: Vec::new(),
            next_order: Vec::new(),
            free_slots: Vec::new(),
            candidates: Vec::new(),
            candidate_metrics: Vec::new(),
            keep: Vec::new(),
            trace: Vec::new(),
        })
    }

    pub fn with_list_size(list_size: usize) -> Result<Self, DecodeError> {
        Self::new(SclConfig::with_list_size(list_size))
    }

    pub fn config(&self) -> &SclConfig {
        &self.config
    }

    /// Per-stage surviving metrics from the last decode, if recording.
    pub fn trace(&self) -> &[TraceStage] {
        &self.trace
    }

    /// JSON dump of the last decode's trace.
    pub fn trace_json(&self) -> String {
        serde_json::to_string(&self.trace).expect("trace serializes")
    }

    fn ensure_shape(&mut self, n: usize) {
        if self.n == n && !self.llr_pools.is_empty() {
            return;
        }
        let len = 1usize << n;
        // never more than 2^N paths
        let cap = if len >= 32 {
            self.config.list_size
        } else {
            self.config.list_size.min(1 << len)
        };
        self.n = n;
        self.len = len;
        self.words = len.div_ceil(64);
        self.llr_pools = (1..=n).map(|l| Pool::new(len >> l, cap)).collect();
        self.bit_pools = (1..=n).map(|l| Pool::new(2 * (len >> l), cap)).collect();
        self.llr_refs = vec![NONE; cap * n];
        self.bit_refs = vec![NONE; cap * n];
        self.metrics = vec![0.0; cap];
        self.decisions = vec![0; cap * self.words];
        self.order = Vec::with_capacity(cap);
        self.next_order = Vec::with_capacity(cap);
        self.free_slots = Vec::with_capacity(cap);
        self.candidates = Vec::with_capacity(2 * cap);
        self.keep = Vec::with_capacity(2 * cap);
    }

    fn capacity(&self) -> usize {
        self.metrics.len()
    }

    /// Decodes a received word given as channel LLRs; frozen inputs take the
    /// code's frozen values.
    pub fn decode_codeword(
        &mut self,
        code: &ClassicalPolarCode,
        llrs: &[f64],
    ) -> Result<DecodeList, DecodeError> {
        if llrs.len() != code.len() {
            return Err(DecodeError::LlrLength {
                expected: code.len(),
                got: llrs.len(),
            });
        }
        if let Some(pos) = llrs.iter().position(|x| x.is_nan()) {
            return Err(DecodeError::NanLlr(pos));
        }
        self.run(code.log_len(), code.frozen_mask(), code.frozen_values(), |ch| {
            ch.copy_from_slice(llrs)
        })
    }

    /// Syndrome decoding: the all-zero word through BSC(`p`) with frozen
    /// inputs set to `syndrome` (ascending frozen-index order). Each entry's
    /// `codeword` is a noise estimate `n` with `(nE)` on the frozen set equal
    /// to `syndrome`.
    pub fn decode_syndrome(
        &mut self,
        code: &ClassicalPolarCode,
        syndrome: &BitVector,
        p: f64,
    ) -> Result<DecodeList, DecodeError> {
        let frozen = code.frozen_set();
        if syndrome.len() != frozen.len() {
            return Err(DecodeError::SyndromeLength {
                expected: frozen.len(),
                got: syndrome.len(),
            });
        }
        let llr = bsc_llr(false, p)?;
        let mut values = BitBlock::zeros(code.len()).expect("code length is a power of two");
        for (k, &i) in frozen.iter().enumerate() {
            if syndrome.get(k) {
                values.set(i, true);
            }
        }
        self.run(code.log_len(), code.frozen_mask(), &values, |ch| ch.fill(llr))
    }

    fn run(
        &mut self,
        n: usize,
        frozen: &[bool],
        frozen_values: &BitBlock,
        fill_channel: impl FnOnce(&mut [f64]),
    ) -> Result<DecodeList, DecodeError> {
        self.ensure_shape(n);
        self.reset();
        self.channel.resize(self.len, 0.0);
        fill_channel(&mut self.channel);
        let sat = self.config.llr_saturation;
        for x in self.channel.iter_mut() {
            *x = x.clamp(-sat, sat);
        }

        let root = self.free_slots.pop().expect("at least one slot");
        self.metrics[root] = 0.0;
        self.order.push(root);

        for phase in 0..self.len {
            let start = if phase == 0 {
                1
            } else {
                n - phase.trailing_zeros() as usize
            };
            for k in 0..self.order.len() {
                let slot = self.order[k];
                self.compute_llrs(slot, phase, start);
            }
            if frozen[phase] {
                let value = frozen_values.get(phase);
                for k in 0..self.order.len() {
                    let slot = self.order[k];
                    let llr = self.leaf_llr(slot);
                    self.metrics[slot] = pm_update(self.metrics[slot], llr, value);
                    self.commit(slot, phase, value);
                }
            } else {
                self.branch(phase);
            }
        }

        let mut entries: Vec<ListEntry> = self
            .order
            .iter()
            .map(|&slot| {
                let w = self.words;
                let u = BitBlock::from_vector_unchecked(BitVector::from_words(
                    self.decisions[slot * w..(slot + 1) * w].to_vec(),
                    self.len,
                ));
                let codeword = u.transformed();
                ListEntry {
                    u,
                    codeword,
                    metric: self.metrics[slot],
                }
            })
            .collect();
        // stable: equal metrics stay in prefix order
        entries.sort_by(|a, b| b.metric.total_cmp(&a.metric));
        Ok(DecodeList { entries })
    }

    fn reset(&mut self) {
        for pool in &mut self.llr_pools {
            pool.reset();
        }
        for pool in &mut self.bit_pools {
            pool.reset();
        }
        self.llr_refs.fill(NONE);
        self.bit_refs.fill(NONE);
        self.decisions.fill(0);
        self.order.clear();
        self.free_slots.clear();
        self.free_slots.extend((0..self.capacity()).rev());
        self.trace.clear();
    }

    #[inline]
    fn leaf_llr(&self, slot: usize) -> f64 {
        let id = self.llr_refs[slot * self.n + self.n - 1];
        self.llr_pools[self.n - 1].slice(id)[0]
    }

    fn compute_llrs(&mut self, slot: usize, phase: usize, start: usize) {
        let n = self.n;
        let kernel = self.config.kernel;
        for layer in start..=n {
            let m = self.len >> layer;
            let idx = slot * n + layer - 1;
            let mut dst_id = self.llr_refs[idx];
            self.llr_pools[layer - 1].own(&mut dst_id, false);
            self.llr_refs[idx] = dst_id;

            let (lower, upper) = self.llr_pools.split_at_mut(layer - 1);
            let dst = upper[0].slice_mut(dst_id);
            let parent: &[f64] = if layer == 1 {
                &self.channel
            } else {
                lower[layer - 2].slice(self.llr_refs[idx - 1])
            };
            let (a, b) = parent.split_at(m);

            if layer == start && phase != 0 {
                let bits = &self.bit_pools[layer - 1].slice(self.bit_refs[idx])[..m];
                for j in 0..m {
                    dst[j] = bit_node(a[j], b[j], bits[j] != 0);
                }
            } else {
                match kernel {
                    CheckNodeKernel::Exact => {
                        for j in 0..m {
                            dst[j] = check_node(a[j], b[j]);
                        }
                    }
                    CheckNodeKernel::MinSum => {
                        for j in 0..m {
                            dst[j] = check_node_min_sum(a[j], b[j]);
                        }
                    }
                }
            }
        }
    }

    /// Records decision `value` at `phase` and propagates partial sums.
    fn commit(&mut self, slot: usize, phase: usize, value: bool) {
        let n = self.n;
        if value {
            self.decisions[slot * self.words + phase / 64] |= 1u64 << (phase % 64);
        }
        let leaf = slot * n + n - 1;
        let mut id = self.bit_refs[leaf];
        self.bit_pools[n - 1].own(&mut id, true);
        self.bit_refs[leaf] = id;
        self.bit_pools[n - 1].slice_mut(id)[phase & 1] = value as u8;

        if phase & 1 == 0 {
            return;
        }
        let mut layer = n;
        while layer >= 2 {
            let m = self.len >> layer;
            let side = (phase >> (n - layer + 1)) & 1;
            let src_idx = slot * n + layer - 1;
            let dst_idx = src_idx - 1;
            let mut dst_id = self.bit_refs[dst_idx];
            self.bit_pools[layer - 2].own(&mut dst_id, true);
            self.bit_refs[dst_idx] = dst_id;

            let (lower, upper) = self.bit_pools.split_at_mut(layer - 1);
            let src = upper[0].slice(self.bit_refs[src_idx]);
            let dst = &mut lower[layer - 2].slice_mut(dst_id)[side * 2 * m..(side + 1) * 2 * m];
            let (left, right) = src.split_at(m);
            let (d_left, d_right) = dst.split_at_mut(m);
            for j in 0..m {
                d_left[j] = left[j] ^ right[j];
            }
            d_right.copy_from_slice(right);

            if side == 0 {
                break;
            }
            layer -= 1;
        }
    }

    fn branch(&mut self, phase: usize) {
        let active = self.order.len();
        let list_size = self.capacity();
        self.candidates.clear();
        for k in 0..active {
            let slot = self.order[k];
            let llr = self.leaf_llr(slot);
            let m = self.metrics[slot];
            self.candidates.push((pm_update(m, llr, false), 2 * k as u32));
            self.candidates.push((pm_update(m, llr, true), 2 * k as u32 + 1));
        }

        self.keep.clear();
        self.keep.resize(2 * active, true);
        if 2 * active > list_size {
            let by_rank = |x: &(f64, u32), y: &(f64, u32)| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1));
            self.candidates.select_nth_unstable_by(list_size - 1, by_rank);
            self.keep.fill(false);
            for &(_, idx) in &self.candidates[..list_size] {
                self.keep[idx as usize] = true;
            }
        }
        let mut metric_of = std::mem::take(&mut self.candidate_metrics);
        metric_of.clear();
        metric_of.resize(2 * active, 0.0);
        for &(m, idx) in &self.candidates {
            metric_of[idx as usize] = m;
        }

        for k in 0..active {
            if !self.keep[2 * k] && !self.keep[2 * k + 1] {
                let slot = self.order[k];
                self.kill(slot);
            }
        }

        self.next_order.clear();
        for k in 0..active {
            let (keep0, keep1) = (self.keep[2 * k], self.keep[2 * k + 1]);
            let slot = self.order[k];
            match (keep0, keep1) {
                (true, true) => {
                    let twin = self.clone_path(slot);
                    self.metrics[slot] = metric_of[2 * k];
                    self.commit(slot, phase, false);
                    self.metrics[twin] = metric_of[2 * k + 1];
                    self.commit(twin, phase, true);
                    self.next_order.push(slot);
                    self.next_order.push(twin);
                }
                (true, false) => {
                    self.metrics[slot] = metric_of[2 * k];
                    self.commit(slot, phase, false);
                    self.next_order.push(slot);
                }
                (false, true) => {
                    self.metrics[slot] = metric_of[2 * k + 1];
                    self.commit(slot, phase, true);
                    self.next_order.push(slot);
                }
                (false, false) => {}
            }
        }
        std::mem::swap(&mut self.order, &mut self.next_order);
        self.candidate_metrics = metric_of;

        if self.config.record_trace {
            let w = self.words;
            let metrics = self.order.iter().map(|&s| self.metrics[s]).collect();
            let prefixes = self
                .order
                .iter()
                .map(|&s| {
                    let bits = BitVector::from_words(self.decisions[s * w..(s + 1) * w].to_vec(), self.len);
                    (0..=phase).map(|i| bits.get(i)).collect::<Vec<bool>>()
                })
                .map(|b| BitVector::from_bools(&b))
                .collect();
            self.trace.push(TraceStage {
                phase,
                metrics,
                prefixes,
            });
        }
    }

    fn kill(&mut self, slot: usize) {
        let n = self.n;
        for layer in 0..n {
            let idx = slot * n + layer;
            self.llr_pools[layer].release(self.llr_refs[idx]);
            self.bit_pools[layer].release(self.bit_refs[idx]);
            self.llr_refs[idx] = NONE;
            self.bit_refs[idx] = NONE;
        }
        let w = self.words;
        self.decisions[slot * w..(slot + 1) * w].fill(0);
        self.free_slots.push(slot);
    }

    fn clone_path(&mut self, slot: usize) -> usize {
        let twin = self.free_slots.pop().expect("path slots exhausted");
        let n = self.n;
        for layer in 0..n {
            let (src, dst) = (slot * n + layer, twin * n + layer);
            let (l, b) = (self.llr_refs[src], self.bit_refs[src]);
            self.llr_pools[layer].retain(l);
            self.bit_pools[layer].retain(b);
            self.llr_refs[dst] = l;
            self.bit_refs[dst] = b;
        }
        let w = self.words;
        self.decisions.copy_within(slot * w..(slot + 1) * w, twin * w);
        self.metrics[twin] = self.metrics[slot];
        twin
    }
}

/// Successive cancellation: the list decoder with `L = 1`.
pub fn sc_decode(code: &ClassicalPolarCode, llrs: &[f64]) -> Result<ListEntry, DecodeError> {
    let mut list = SclDecoder::with_list_size(1)?.decode_codeword(code, llrs)?;
    Ok(list.entries.swap_remove(0))
}

pub fn scl_decode_codeword(
    code: &ClassicalPolarCode,
    llrs: &[f64],
    list_size: usize,
) -> Result<DecodeList, DecodeError> {
    SclDecoder::with_list_size(list_size)?.decode_codeword(code, llrs)
}

pub fn scl_decode_syndrome(
    code: &ClassicalPolarCode,
    syndrome: &BitVector,
    p: f64,
    list_size: usize,
) -> Result<DecodeList, DecodeError> {
    SclDecoder::with_list_size(list_size)?.decode_syndrome(code, syndrome, p)
}

/// Channel LLRs for a hard-decision word received through BSC(`p`).
pub fn bsc_llrs(y: &BitBlock, p: f64) -> Result<Vec<f64>, DecodeError> {
    let magnitude = bsc_llr(false, p)?;
    Ok(y.iter().map(|b| if b { -magnitude } else { magnitude }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_classical_code, ConstructionSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bsc_log_likelihood(y: &BitBlock, x: &BitBlock, p: f64) -> f64 {
        let d = y.iter().zip(x.iter()).filter(|(a, b)| a != b).count();
        d as f64 * p.ln() + (y.len() - d) as f64 * (1.0 - p).ln()
    }

    // Every codeword of the code (frozen values included), by enumeration.
    fn codewords(code: &ClassicalPolarCode) -> Vec<BitBlock> {
        let k = code.dimension();
        (0..1u64 << k)
            .map(|m| {
                let bits: Vec<bool> = (0..k).map(|j| m >> j & 1 == 1).collect();
                code.encode(&bits).unwrap()
            })
            .collect()
    }

    fn ml_metric(code: &ClassicalPolarCode, y: &BitBlock, p: f64) -> f64 {
        codewords(code)
            .iter()
            .map(|c| bsc_log_likelihood(y, c, p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn random_block(rng: &mut ChaCha8Rng, len: usize, p: f64) -> BitBlock {
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(p)).collect();
        BitBlock::new(BitVector::from_bools(&bits)).unwrap()
    }

    fn random_code(rng: &mut ChaCha8Rng, n: usize) -> ClassicalPolarCode {
        let len = 1 << n;
        let info: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.5)).collect();
        let frozen_count = len - info.len();
        let values: Vec<bool> = (0..frozen_count).map(|_| rng.gen_bool(0.5)).collect();
        ClassicalPolarCode::from_info_set(n, &info)
            .unwrap()
            .with_frozen_values(&values)
            .unwrap()
    }

    #[test]
    fn bsc_llr_examples() {
        assert!((bsc_llr(false, 0.1).unwrap() - 9f64.ln()).abs() < 1e-12);
        assert!((bsc_llr(true, 0.1).unwrap() + 2.1972).abs() < 1e-4);
        assert_eq!(bsc_llr(false, 0.5).unwrap(), 0.0);
        assert!(bsc_llr(false, 0.0).is_err());
        assert!(bsc_llr(true, 1.0).is_err());
        assert!(bsc_llr(true, f64::NAN).is_err());
    }

    #[test]
    fn kernel_examples() {
        for a in [-3.0, 0.0, 0.7, 40.0] {
            assert_eq!(check_node(a, 0.0), 0.0);
            assert_eq!(check_node(0.0, a), 0.0);
        }
        assert!((check_node(1e6, 1.5) - 1.5).abs() < 1e-12);
        assert!((check_node(-1e6, 1.5) + 1.5).abs() < 1e-12);
        assert_eq!(bit_node(1.25, 2.0, false), 3.25);
        assert_eq!(bit_node(1.25, 2.0, true), 0.75);
        assert_eq!(check_node_min_sum(-2.0, 3.0), -2.0);
    }

    #[test]
    fn check_node_matches_tanh_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let a: f64 = rng.gen_range(-12.0..12.0);
            let b: f64 = rng.gen_range(-12.0..12.0);
            let direct = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
            assert!((check_node(a, b) - direct).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn pm_update_examples() {
        assert!((pm_update(0.0, 0.0, false) + 2f64.ln()).abs() < 1e-15);
        assert_eq!(pm_update(-1.5, f64::INFINITY, false), -1.5);
        assert!((pm_update(-1.0, 30.0, true) - (-1.0 - 30.0)).abs() < 1e-12);
        assert_eq!(pm_update(0.0, f64::INFINITY, true), f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_bad_inputs() {
        let code = build_classical_code(3, 4, &ConstructionSpec::pw(), None).unwrap();
        assert!(matches!(SclDecoder::with_list_size(0), Err(DecodeError::ListSize)));
        assert!(matches!(
            scl_decode_codeword(&code, &[0.0; 4], 2),
            Err(DecodeError::LlrLength { expected: 8, got: 4 })
        ));
        let mut llrs = [1.0; 8];
        llrs[3] = f64::NAN;
        assert!(matches!(scl_decode_codeword(&code, &llrs, 2), Err(DecodeError::NanLlr(3))));
        assert!(matches!(
            scl_decode_syndrome(&code, &BitVector::zeros(3), 0.1, 2),
            Err(DecodeError::SyndromeLength { expected: 4, got: 3 })
        ));
    }

    // The path metric of a completed path is ln W(y | uE): the decoder's
    // recursion is exact, so the metric itself is checkable in closed form.
    #[test]
    fn completed_metric_is_channel_log_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = 0.13;
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let code = random_code(&mut rng, n);
            let y = random_block(&mut rng, 1 << n, 0.5);
            let list = scl_decode_codeword(&code, &bsc_llrs(&y, p).unwrap(), 4).unwrap();
            for e in &list.entries {
                let want = bsc_log_likelihood(&y, &e.codeword, p);
                assert!((e.metric - want).abs() < 1e-9, "{} vs {want}", e.metric);
                for &i in code.frozen_set() {
                    assert_eq!(e.u.get(i), code.frozen_values().get(i));
                }
                assert_eq!(e.codeword, e.u.transformed());
            }
        }
    }

    #[test]
    fn full_list_enumerates_the_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4);
            let code = random_code(&mut rng, n);
            let y = random_block(&mut rng, 1 << n, 0.3);
            let list = scl_decode_codeword(&code, &bsc_llrs(&y, 0.2).unwrap(), 1 << code.dimension())
                .unwrap();
            let mut got: Vec<BitBlock> = list.entries.iter().map(|e| e.codeword.clone()).collect();
            let mut want = codewords(&code);
            got.sort();
            want.sort();
            assert_eq!(got, want);
            for w in list.entries.windows(2) {
                assert!(w[0].metric >= w[1].metric);
            }
        }
    }

    #[test]
    fn noiseless_input_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = build_classical_code(6, 30, &ConstructionSpec::pw(), None).unwrap();
        for _ in 0..20 {
            let bits: Vec<bool> = (0..30).map(|_| rng.gen_bool(0.5)).collect();
            let c = code.encode(&bits).unwrap();
            let llrs: Vec<f64> = c
                .iter()
                .map(|b| if b { f64::NEG_INFINITY } else { f64::INFINITY })
                .collect();
            let sc = sc_decode(&code, &llrs).unwrap();
            assert_eq!(sc.codeword, c);
            assert_eq!(sc.metric, 0.0);
            let list = scl_decode_codeword(&code, &llrs, 8).unwrap();
            assert_eq!(list.best().codeword, c);
        }
    }

    #[test]
    fn sc_corrects_single_flip_on_distance_four_code() {
        let code = build_classical_code(3, 4, &ConstructionSpec::pw(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for c in codewords(&code) {
            let mut y = c.clone();
            y.flip(rng.gen_range(0..8));
            let out = sc_decode(&code, &bsc_llrs(&y, 0.1).unwrap()).unwrap();
            assert_eq!(out.codeword, c);
        }
    }

    #[test]
    fn list_of_one_equals_sc() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let code = build_classical_code(6, 32, &ConstructionSpec::pw(), None).unwrap();
        for _ in 0..50 {
            let y = random_block(&mut rng, 64, 0.1);
            let llrs = bsc_llrs(&y, 0.1).unwrap();
            let list = scl_decode_codeword(&code, &llrs, 1).unwrap();
            assert_eq!(list.len(), 1);
            assert_eq!(list.entries[0], sc_decode(&code, &llrs).unwrap());
        }
    }

    #[test]
    fn full_list_top_is_ml_on_pw_8_4() {
        let code = build_classical_code(3, 4, &ConstructionSpec::pw(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut decoder = SclDecoder::with_list_size(16).unwrap();
        for _ in 0..1000 {
            let c = codewords(&code)[rng.gen_range(0..16)].clone();
            let mut y = c.clone();
            for j in 0..8 {
                if rng.gen_bool(0.1) {
                    y.flip(j);
                }
            }
            let list = decoder.decode_codeword(&code, &bsc_llrs(&y, 0.1).unwrap()).unwrap();
            let best = list.best();
            assert!((best.metric - ml_metric(&code, &y, 0.1)).abs() < 1e-9);
        }
    }

    #[test]
    fn ml_dominance_at_sixteen() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = 0.1;
        for trial in 0..300 {
            let k = rng.gen_range(2..=12);
            let code = build_classical_code(4, k, &ConstructionSpec::pw(), None).unwrap();
            let y = random_block(&mut rng, 16, 0.15);
            let ml = ml_metric(&code, &y, p);
            let list_size = [1, 2, 4, 8][trial % 4];
            let list = scl_decode_codeword(&code, &bsc_llrs(&y, p).unwrap(), list_size).unwrap();
            let top = list.best().metric;
            assert!(top <= ml + 1e-9);
            let on_list = list
                .entries
                .iter()
                .any(|e| (bsc_log_likelihood(&y, &e.codeword, p) - ml).abs() < 1e-9);
            assert_eq!(on_list, (top - ml).abs() < 1e-9);
        }
    }

    // Q1-structured: every frozen bit precedes every information bit.
    #[test]
    fn sc_is_ml_for_prefix_frozen_codes() {
        let p = 0.1;
        for k in 1..16 {
            let code = build_classical_code(4, k, &ConstructionSpec::q1(16 - k), None).unwrap_or_else(|_| {
                ClassicalPolarCode::from_info_set(4, &(16 - k..16).collect::<Vec<_>>()).unwrap()
            });
            assert!(code.frozen_set().iter().all(|&f| f < code.info_set()[0]));
            for y in 0..1u64 << 16 {
                let y = BitBlock::new(BitVector::from_u64(y, 16)).unwrap();
                let sc = sc_decode(&code, &bsc_llrs(&y, p).unwrap()).unwrap();
                assert!((sc.metric - ml_metric_fast(&code, &y, p)).abs() < 1e-9);
            }
        }
    }

    // Minimum distance from y to the code via its coset list.
    fn ml_metric_fast(code: &ClassicalPolarCode, y: &BitBlock, p: f64) -> f64 {
        thread_local! {
            static CACHE: std::cell::RefCell<Option<(Vec<usize>, Vec<u64>)>> = const { std::cell::RefCell::new(None) };
        }
        let words = CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.as_ref().map(|(info, _)| info.as_slice()) != Some(code.info_set()) {
                let ws = codewords(code).iter().map(|w| w.words()[0]).collect();
                *c = Some((code.info_set().to_vec(), ws));
            }
            c.as_ref().unwrap().1.clone()
        });
        let yw = y.words()[0];
        let d = words.iter().map(|w| (w ^ yw).count_ones()).min().unwrap() as f64;
        d * p.ln() + (16.0 - d) * (1.0 - p).ln()
    }

    #[test]
    fn syndrome_example_on_four_points() {
        let code = ClassicalPolarCode::from_info_set(2, &[2, 3]).unwrap();
        let noise = BitBlock::from_symbols(&[0, 0, 0, 1]).unwrap();
        assert_eq!(code.syndrome(&noise).to_string(), "11");
    }

    #[test]
    fn zero_syndrome_gives_zero_noise() {
        let code = build_classical_code(7, 60, &ConstructionSpec::pw(), None).unwrap();
        let s = BitVector::zeros(68);
        for l in [1, 4, 16] {
            let list = scl_decode_syndrome(&code, &s, 0.05, l).unwrap();
            assert!(list.best().codeword.is_zero());
        }
    }

    #[test]
    fn syndrome_mode_preserves_syndrome() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let code = build_classical_code(6, 26, &ConstructionSpec::pw(), None).unwrap();
        let mut decoder = SclDecoder::with_list_size(8).unwrap();
        for _ in 0..100 {
            let e = random_block(&mut rng, 64, 0.1);
            let s = code.syndrome(&e);
            let list = decoder.decode_syndrome(&code, &s, 0.1).unwrap();
            for entry in &list.entries {
                assert_eq!(code.syndrome(&entry.codeword), s);
                let w = entry.codeword.weight() as f64;
                let want = w * 0.1f64.ln() + (64.0 - w) * 0.9f64.ln();
                assert!((entry.metric - want).abs() < 1e-9);
            }
        }
    }

    // Syndrome decoding and codeword decoding explore the same coset; the
    // maps n -> n ^ y agree up to how equal metrics are ordered.
    #[test]
    fn syndrome_and_codeword_decoding_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = 0.1;
        let mut decoder = SclDecoder::with_list_size(4).unwrap();
        for _ in 0..1000 {
            let k = rng.gen_range(1..8);
            let code = build_classical_code(3, k, &ConstructionSpec::pw(), None).unwrap();
            let y = random_block(&mut rng, 8, 0.2);
            let s = code.syndrome(&y);
            let by_syndrome = decoder.decode_syndrome(&code, &s, p).unwrap();
            let by_codeword = decoder.decode_codeword(&code, &bsc_llrs(&y, p).unwrap()).unwrap();
            assert_eq!(by_syndrome.len(), by_codeword.len());
            assert!((by_syndrome.best().metric - by_codeword.best().metric).abs() < 1e-9);
            let top = by_syndrome.best().metric;
            let tied_s: std::collections::BTreeSet<BitBlock> = by_syndrome
                .entries
                .iter()
                .filter(|e| (e.metric - top).abs() < 1e-9)
                .map(|e| e.codeword.clone())
                .collect();
            let tied_c: Vec<BitBlock> = by_codeword
                .entries
                .iter()
                .filter(|e| (e.metric - top).abs() < 1e-9)
                .map(|e| &e.codeword ^ &y)
                .collect();
            if by_syndrome.len() == 1 << k {
                let set_c: std::collections::BTreeSet<BitBlock> = tied_c.into_iter().collect();
                assert_eq!(tied_s, set_c);
            } else {
                // a best codeword estimate maps to a best noise estimate
                assert!(tied_c.iter().all(|n| code.syndrome(n) == s));
            }
        }
    }

    #[test]
    fn best_metric_non_decreasing_in_list_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let code = build_classical_code(6, 32, &ConstructionSpec::pw(), None).unwrap();
        let mut decoders: Vec<SclDecoder> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&l| {
                SclDecoder::new(SclConfig {
                    record_trace: true,
                    ..SclConfig::with_list_size(l)
                })
                .unwrap()
            })
            .collect();
        let mut nested_failures = 0;
        for _ in 0..300 {
            let y = random_block(&mut rng, 64, 0.1);
            let llrs = bsc_llrs(&y, 0.1).unwrap();
            let lists: Vec<DecodeList> = decoders
                .iter_mut()
                .map(|d| d.decode_codeword(&code, &llrs).unwrap())
                .collect();
            for w in lists.windows(2) {
                assert!(w[1].best().metric >= w[0].best().metric - 1e-9);
            }
            for pair in decoders.windows(2) {
                for (small, big) in pair[0].trace().iter().zip(pair[1].trace()) {
                    if !small.prefixes.iter().all(|p| big.prefixes.contains(p)) {
                        nested_failures += 1;
                    }
                }
            }
        }
        eprintln!("stages whose survivors are not nested in the doubled list: {nested_failures}");
    }

    #[test]
    fn metrics_never_increase_along_the_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let code = build_classical_code(6, 32, &ConstructionSpec::pw(), None).unwrap();
        let mut d = SclDecoder::new(SclConfig {
            record_trace: true,
            ..SclConfig::with_list_size(4)
        })
        .unwrap();
        let y = random_block(&mut rng, 64, 0.1);
        d.decode_codeword(&code, &bsc_llrs(&y, 0.1).unwrap()).unwrap();
        assert_eq!(d.trace().len(), 32);
        for stage in d.trace() {
            assert!(stage.metrics.len() <= 4);
            assert!(stage.metrics.iter().all(|&m| m <= 0.0));
            assert!(stage.prefixes.windows(2).all(|w| w[0].to_symbols() < w[1].to_symbols()));
        }
        let json = d.trace_json();
        assert!(json.starts_with('['));
    }

    #[test]
    fn decoder_reuse_matches_fresh_decoder() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut shared = SclDecoder::with_list_size(8).unwrap();
        for n in [3, 5, 7, 5] {
            let code = build_classical_code(n, (1 << n) / 2, &ConstructionSpec::pw(), None).unwrap();
            let y = random_block(&mut rng, 1 << n, 0.1);
            let llrs = bsc_llrs(&y, 0.1).unwrap();
            assert_eq!(
                shared.decode_codeword(&code, &llrs).unwrap(),
                scl_decode_codeword(&code, &llrs, 8).unwrap()
            );
        }
    }
}

//! Quantum polar codes: classical polar construction, SCL decoding, CSS
//! quantum polar codes, coset-aware decision rules and Monte Carlo tooling.

pub mod bits;
pub mod construction;
pub mod analysis;
pub mod decision;
pub mod quantum;
pub mod scl;
pub mod sim;

pub use bits::{polar_transform, transform_row, BitBlock, BitVector, BitsError};
pub use construction::{
    build_classical_code, construction_score, rank_rows, ClassicalPolarCode, ConstructionError,
    ConstructionKind, ConstructionSpec, HpwTerm,
};
pub use scl::{
    sc_decode, scl_decode_codeword, scl_decode_syndrome, DecodeError, DecodeList, ListEntry,
    SclConfig, SclDecoder,
};
pub use quantum::{
    build_q1, build_qpc, build_symmetric_qpc, css_condition_holds, ClassLabel, QpcDescription,
    QuantumError, QuantumPolarCode,
};
pub use decision::{
    coset_score, exact_decide_both, exact_mld, exact_mwd, exhaustive_spectrum, list_spectrum, scl_c_decide,
    scl_decide_both, scl_e_decide, ClassSpectrum, Decision, DecisionDump, DecisionError,
    SpectrumSource, WeightHistogram,
};
pub use sim::{
    combined_rate, estimate, result_records, sample_bsc, write_results_csv, DecoderKind,
    ErrorType, ResultRecord, SimError, SimJob, SimPoint,
};
pub use analysis::{
    distance_report, q1_scan, row_weight_bound, spectrum_batch, spectrum_rows, weight_spectrum,
    DistanceReport, Q1ScanRow, SpectrumMode, SpectrumRow, SyndromeSpectrum, DEFAULT_SPECTRUM_P,
};

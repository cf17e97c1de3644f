use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use qpolar::analysis::{write_csv, Q1_SCAN_HEADER, SPECTRUM_HEADER};
use qpolar::{
    distance_report, estimate, q1_scan, result_records, row_weight_bound, spectrum_batch,
    spectrum_rows, write_results_csv, QpcDescription, QuantumPolarCode, SpectrumMode,
};
use serde::Serialize;

use crate::code::{format_set, CodeParams};
use crate::error::CliError;
use crate::job::JobFile;

/// Writes `bytes` to `out`, or to standard output.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ConstructOutput {
    #[serde(flatten)]
    code: QpcDescription,
    #[serde(rename = "N")]
    len: usize,
    #[serde(rename = "K")]
    k: usize,
    row_weight_bound: usize,
}

fn summary(code: &QuantumPolarCode) -> String {
    format!(
        "N = {}, Kx = {}, Kz = {}, K = {}\nlogical rows = {}\n|frozen_x| = {}, |frozen_z| = {}\nrow_weight_bound = {}\n",
        code.len(),
        code.k_x(),
        code.k_z(),
        code.k(),
        format_set(code.logical()),
        code.frozen_x().len(),
        code.frozen_z().len(),
        row_weight_bound(code),
    )
}

pub fn construct(params: &CodeParams, out: Option<&Path>) -> Result<(), CliError> {
    let code = params.build()?;
    let doc = ConstructOutput {
        code: code.description(),
        len: code.len(),
        k: code.k(),
        row_weight_bound: row_weight_bound(&code),
    };
    let mut json = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Domain(e.to_string()))?;
    json.push(b'\n');
    emit(out, &json)?;
    if out.is_some() {
        print!("{}", summary(&code));
    } else {
        eprint!("{}", summary(&code));
    }
    Ok(())
}

pub fn simulate(job_path: &Path, out_override: Option<&Path>) -> Result<(), CliError> {
    let file = JobFile::load(job_path)?;
    let job = file.to_sim_job()?;
    let out = out_override
        .map(Path::to_path_buf)
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::Usage("no output path: set `out` in the job or pass --out".into()))?;
    // Fail on an unwritable path before spending time on trials.
    File::create(&out).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", out.display())))?;
    let points = match estimate(&job) {
        Ok(p) => p,
        Err(e) => {
            let _ = std::fs::remove_file(&out);
            return Err(e.into());
        }
    };
    let records = result_records(&job.code, &points);
    let mut buf = Vec::new();
    write_results_csv(&mut buf, &records)?;
    emit(Some(&out), &buf)?;
    for pt in &points {
        println!(
            "{:>9}  p = {:<8}  P_L = {:.6} +/- {:.2e}  ({} of {})",
            pt.decoder.as_str(),
            pt.p,
            pt.estimate,
            pt.stderr,
            pt.logical_errors,
            pt.trials
        );
    }
    Ok(())
}

pub fn spectrum(
    params: &CodeParams,
    mode: SpectrumMode,
    count: u64,
    noise_p: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&noise_p) {
        return Err(CliError::Usage(format!("--noise-p must be in [0, 1], got {noise_p}")));
    }
    let code = params.build()?;
    let batch = spectrum_batch(&code, count, noise_p, mode, seed)?;
    let rows = spectrum_rows(&batch, seed);
    let mut buf = Vec::new();
    write_csv(&mut buf, &SPECTRUM_HEADER, &rows)?;
    emit(out, &buf)
}

#[derive(Serialize)]
struct DistanceRow {
    n: usize,
    #[serde(rename = "N")]
    len: usize,
    #[serde(rename = "K_X")]
    k_x: usize,
    #[serde(rename = "K_Z")]
    k_z: usize,
    construction: String,
    beta: Option<f64>,
    logical: String,
    row_weight_bound: usize,
    search_min: Option<usize>,
    search_list_size: usize,
    exhaustive: Option<usize>,
}

pub fn distance(params: &CodeParams, list_size: usize, out: Option<&Path>) -> Result<(), CliError> {
    let code = params.build()?;
    let r = distance_report(&code, list_size)?;
    let spec = code.construction();
    let row = DistanceRow {
        n: params.n,
        len: code.len(),
        k_x: code.k_x(),
        k_z: code.k_z(),
        construction: spec.map_or("manual", |s| s.kind().as_str()).to_string(),
        beta: spec.and_then(|s| s.display_beta()),
        logical: code
            .logical()
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        row_weight_bound: r.row_weight_bound,
        search_min: r.search_min,
        search_list_size: r.search_list_size,
        exhaustive: r.exhaustive,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &[], &[row])?;
    emit(out, &buf)
}

/// `3,5,9-12` with inclusive ranges.
pub fn parse_candidates(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = |part: &str| CliError::Usage(format!("bad candidate `{part}`; use e.g. 3,5,9-12"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(part))?;
                let b: usize = b.trim().parse().map_err(|_| bad(part))?;
                if a > b {
                    return Err(bad(part));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no candidate rows given".into()));
    }
    Ok(out)
}

pub fn q1scan(
    n: usize,
    candidates: &[usize],
    p_grid: &[f64],
    trials: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let rows = q1_scan(n, candidates, p_grid, trials, seed, None)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &Q1_SCAN_HEADER, &rows)?;
    emit(out, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates() {
        assert_eq!(parse_candidates("3,5,9-12").unwrap(), vec![3, 5, 9, 10, 11, 12]);
        assert_eq!(parse_candidates(" 7 ").unwrap(), vec![7]);
        for bad in ["", "a", "5-3", "1-", ","] {
            assert!(parse_candidates(bad).is_err(), "{bad}");
        }
    }
}

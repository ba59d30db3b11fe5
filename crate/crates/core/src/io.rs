// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! File formats: JSON for polynomials, phases and summaries, a dense
//! little-endian binary layout for complex matrices, CSV for traces.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::encodings::{BlockEncoding, EncodingHeader, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::polytools::Polynomial;
use crate::qet::QetAssembly;
use crate::qsp::PhaseFactors;
use crate::solvers::QcgTrace;
use num_complex::Complex64;

pub fn polynomial_to_json(p: &Polynomial) -> Result<String> {
    Ok(serde_json::to_string_pretty(p)?)
}

pub fn polynomial_from_json(s: &str) -> Result<Polynomial> {
    Ok(serde_json::from_str(s)?)
}

pub fn phases_to_json(phi: &PhaseFactors) -> Result<String> {
    Ok(serde_json::to_string_pretty(phi)?)
}

pub fn phases_from_json(s: &str) -> Result<PhaseFactors> {
    Ok(serde_json::from_str(s)?)
}

pub fn assembly_to_json(a: &QetAssembly) -> Result<String> {
    Ok(serde_json::to_string_pretty(a)?)
}

pub fn assembly_from_json(s: &str) -> Result<QetAssembly> {
    Ok(serde_json::from_str(s)?)
}

/// Row-major, interleaved re/im, little-endian f64.
pub fn encode_matrix(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn decode_matrix(bytes: &[u8], rows: usize, cols: usize) -> Result<CMatrix> {
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| Error::Format(format!("{rows}x{cols} matrix is too large")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "{} bytes for a {rows}x{cols} complex matrix, expected {expected}",
            bytes.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let k = 2 * (i * cols + j);
            let z = Complex64::new(f(k), f(k + 1));
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Format(format!("non-finite entry at ({i}, {j})")));
            }
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

pub fn header_to_json(h: &EncodingHeader) -> Result<String> {
    Ok(serde_json::to_string_pretty(h)?)
}

/// Rebuilds and revalidates an encoding from its header and matrix bytes.
pub fn decode_block_encoding(header_json: &str, bytes: &[u8]) -> Result<BlockEncoding> {
    let h: EncodingHeader = serde_json::from_str(header_json)?;
    let qubits = h.n_a.saturating_add(h.n_s);
    if qubits > MAX_QUBITS {
        return Err(Error::Format(format!("{qubits} qubits exceed the limit {MAX_QUBITS}")));
    }
    let dim = 1usize << qubits;
    let m = decode_matrix(bytes, dim, dim)?;
    BlockEncoding::new(m, h.alpha, h.n_a, h.n_s, h.eps)
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_block_encoding(be: &BlockEncoding, stem: &std::path::Path) -> Result<()> {
    std::fs::write(stem.with_extension("bin"), encode_matrix(be.unitary()))?;
    std::fs::write(stem.with_extension("json"), header_to_json(&be.header())?)?;
    Ok(())
}

pub fn read_block_encoding(stem: &std::path::Path) -> Result<BlockEncoding> {
    let header = std::fs::read_to_string(stem.with_extension("json"))?;
    let bytes = std::fs::read(stem.with_extension("bin"))?;
    decode_block_encoding(&header, &bytes)
}

/// One row of the residual trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub alpha_k: f64,
    pub beta_k: Option<f64>,
    pub rr_est: f64,
    #[serde(rename = "ppA_est")]
    pub ppa_est: f64,
    pub residual: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "P_max")]
    pub p_max: Option<f64>,
    #[serde(rename = "Pp_max")]
    pub pp_max: Option<f64>,
}

/// One row of the max-abs trace, indexed by polynomial index k + 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxAbsRow {
    pub k: usize,
    #[serde(rename = "X_max")]
    pub x_max: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    #[serde(rename = "P_max")]
    pub p_max: Option<f64>,
    #[serde(rename = "Pp_max")]
    pub pp_max: Option<f64>,
}

pub fn trace_rows(trace: &QcgTrace) -> Vec<TraceRow> {
    trace
        .iterations
        .iter()
        .map(|it| TraceRow {
            k: it.k,
            alpha_k: it.alpha_k,
            beta_k: it.beta_k,
            rr_est: it.rr_est,
            ppa_est: it.pp_est,
            residual: it.residual,
            r_max: it.r_max,
            p_max: it.p_max,
            pp_max: it.pp_max,
        })
        .collect()
}

pub fn max_abs_rows(trace: &QcgTrace) -> Vec<MaxAbsRow> {
    trace
        .iterations
        .iter()
        .map(|it| MaxAbsRow {
            k: it.k + 1,
            x_max: it.x_max,
            r_max: it.r_max,
            p_max: it.p_max,
            pp_max: it.pp_max,
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Trace rows with the finite and ordering checks a reader should apply.
pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceRow>> {
    let rows: Vec<TraceRow> = read_csv(r)?;
    for (i, row) in rows.iter().enumerate() {
        if row.k != i {
            return Err(Error::Format(format!("row {i} has k = {}", row.k)));
        }
        let vals = [row.alpha_k, row.rr_est, row.ppa_est, row.residual, row.r_max];
        let opts = [row.beta_k, row.p_max, row.pp_max];
        if vals.iter().chain(opts.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Format(format!("row {i} has a non-finite value")));
        }
    }
    Ok(rows)
}

pub fn trace_to_json(trace: &QcgTrace) -> Result<String> {
    Ok(serde_json::to_string_pretty(trace)?)
}

pub fn trace_from_json(s: &str) -> Result<QcgTrace> {
    Ok(serde_json::from_str(s)?)
}

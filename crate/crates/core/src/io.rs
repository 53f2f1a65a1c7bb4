//! Text formats: histories (one NDJSON header line followed by CSV), NDJSON diagnostic
//! streams and two-column series CSV. Numbers use the shortest round-trip decimal form.

use std::io::{BufRead, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::decay::TimeSeries;
use crate::error::{Error, Result};
use crate::history::FieldHistory;
use crate::modes::ModeHistory;
use crate::scalar::Real;

pub const HISTORY_COLUMNS: [&str; 11] =
    ["w", "v", "r", "re_phi", "im_phi", "Q", "re_dw_phi", "im_dw_phi", "re_dv_phi", "im_dv_phi", "F_vw"];

pub const MODE_COLUMNS: [&str; 5] = ["w", "v", "r", "re_psi", "im_psi"];

/// Identification written into every history header.
#[derive(Debug, Clone, Serialize)]
pub struct RunTag<'a> {
    pub run_id: &'a str,
    pub config_hash: &'a str,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_history<T: Real, W: Write>(h: &FieldHistory<T>, tag: &RunTag<'_>, out: &mut W) -> Result<()> {
    let g = &h.grid;
    let header = json!({
        "format": "mhdecay-history",
        "version": 1,
        "sector": "nonlinear",
        "run_id": tag.run_id,
        "config_hash": tag.config_hash,
        "grid": {"w0": g.w0.to_f64_lossy(), "w1": g.w1.to_f64_lossy(), "v0": g.v0.to_f64_lossy(),
                 "v1": g.v1.to_f64_lossy(), "delta": g.delta.to_f64_lossy(), "nw": h.nw(), "nv": h.nv()},
        "background": {"m": h.bg.m.to_f64_lossy()},
        "potential": potential_json(&h.potential),
        "gauge": {"amplitude": h.gauge.amplitude.to_f64_lossy(), "kw": h.gauge.kw.to_f64_lossy(), "kv": h.gauge.kv.to_f64_lossy()},
        "stats": h.stats,
        "columns": HISTORY_COLUMNS,
    });
    writeln!(out, "{header}").map_err(io_err)?;
    writeln!(out, "{}", HISTORY_COLUMNS.join(",")).map_err(io_err)?;
    for i in 0..h.nw() {
        for j in 0..h.nv() {
            let s = h.sample(i, j);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                h.w(i),
                h.v(j),
                h.r(i, j),
                s.phi.re,
                s.phi.im,
                h.q.get(i, j),
                s.dw_phi.re,
                s.dw_phi.im,
                s.dv_phi.re,
                s.dv_phi.im,
                s.f_vw
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

fn potential_json<T: Real>(p: &crate::fields::PotentialSpec<T>) -> Value {
    use crate::fields::PotentialSpec::*;
    match *p {
        Mass { c1 } => json!({"kind": "mass", "c1": c1.to_f64_lossy()}),
        Quartic { c2 } => json!({"kind": "quartic", "c2": c2.to_f64_lossy()}),
        SineGordon { c3, eta } => json!({"kind": "sine_gordon", "c3": c3.to_f64_lossy(), "eta": eta.to_f64_lossy()}),
        Toda { c4, lambda } => json!({"kind": "toda", "c4": c4.to_f64_lossy(), "lambda": lambda.to_f64_lossy()}),
    }
}

pub fn write_mode_history<T: Real, W: Write>(h: &ModeHistory<T>, tag: &RunTag<'_>, out: &mut W) -> Result<()> {
    let g = &h.grid;
    let header = json!({
        "format": "mhdecay-history",
        "version": 1,
        "sector": "mode",
        "run_id": tag.run_id,
        "config_hash": tag.config_hash,
        "grid": {"w0": g.w0.to_f64_lossy(), "w1": g.w1.to_f64_lossy(), "v0": g.v0.to_f64_lossy(),
                 "v1": g.v1.to_f64_lossy(), "delta": g.delta.to_f64_lossy(), "nw": h.nw(), "nv": h.nv()},
        "background": {"m": h.bg.m.to_f64_lossy()},
        "mode": {"s": h.spec.s, "l": h.spec.l, "k": h.k.to_f64_lossy()},
        "near_horizon_nodes": h.near_horizon_nodes,
        "columns": MODE_COLUMNS,
    });
    writeln!(out, "{header}").map_err(io_err)?;
    writeln!(out, "{}", MODE_COLUMNS.join(",")).map_err(io_err)?;
    for i in 0..h.nw() {
        for j in 0..h.nv() {
            let p = h.psi.get(i, j);
            writeln!(out, "{},{},{},{},{}", g.w(i), g.v(j), h.cache.r(i, j), p.re, p.im).map_err(io_err)?;
        }
    }
    Ok(())
}

/// A parsed history file.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryTable {
    pub header: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_history<R: BufRead>(input: R) -> Result<HistoryTable> {
    let mut lines = input.lines();
    let bad = |line: usize, m: String| Error::ConfigParse { line, message: m };
    let header_line = lines.next().ok_or_else(|| bad(1, "empty history".into()))?.map_err(io_err)?;
    let header: Value = serde_json::from_str(&header_line).map_err(|e| bad(1, format!("header: {e}")))?;
    let cols_line = lines.next().ok_or_else(|| bad(2, "missing column line".into()))?.map_err(io_err)?;
    let columns: Vec<String> = cols_line.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (n, l) in lines.enumerate() {
        let l = l.map_err(io_err)?;
        if l.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = l.split(',').map(str::parse).collect();
        let row = row.map_err(|e| bad(n + 3, format!("{e}")))?;
        if row.len() != columns.len() {
            return Err(bad(n + 3, format!("expected {} fields, found {}", columns.len(), row.len())));
        }
        rows.push(row);
    }
    Ok(HistoryTable { header, columns, rows })
}

/// Writes each item as one JSON line.
pub fn write_ndjson<S: Serialize, W: Write>(items: impl IntoIterator<Item = S>, out: &mut W) -> Result<()> {
    for it in items {
        let s = serde_json::to_string(&it).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{s}").map_err(io_err)?;
    }
    Ok(())
}

/// Two-column CSV `x,value`.
pub fn write_series<T: Real, W: Write>(s: &TimeSeries<T>, out: &mut W) -> Result<()> {
    let xname = match s.abscissa {
        crate::decay::Abscissa::V => "v",
        crate::decay::Abscissa::W => "w",
    };
    writeln!(out, "{xname},value").map_err(io_err)?;
    for (x, y) in s.x.iter().zip(&s.y) {
        writeln!(out, "{x},{y}").map_err(io_err)?;
    }
    Ok(())
}

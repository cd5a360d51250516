//! CSV rendering of selection tables and sweeps.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::io::Write;

use crate::criterion::SelectionResult;
use crate::error::{Error, Result};
use crate::experiments::SweepResult;
use crate::kernels::KernelModel;

pub const SELECTION_HEADER: [&str; 7] = [
    "kernel_index",
    "family_params",
    "contrast",
    "penalty",
    "criterion",
    "complexity",
    "selected_flag",
];

pub const SWEEP_HEADER: [&str; 6] = [
    "kappa",
    "replication",
    "selected_param",
    "complexity",
    "risk",
    "oracle_risk",
];

pub const SUMMARY_HEADER: [&str; 3] = ["kappa", "median_complexity", "median_risk_ratio"];

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Data(format!("write failed: {e}"))
}

pub fn write_selection_csv<W: Write>(
    out: W,
    family: &[KernelModel],
    sel: &SelectionResult,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SELECTION_HEADER).map_err(io_err)?;
    for (i, (k, row)) in family.iter().zip(&sel.rows).enumerate() {
        w.write_record([
            i.to_string(),
            k.label(),
            fmt_float(row.contrast),
            fmt_float(row.penalty),
            fmt_float(row.criterion),
            fmt_float(row.complexity_ptheta),
            u8::from(i == sel.selected_index).to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_sweep_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(io_err)?;
    for r in &sweep.rows {
        w.write_record([
            fmt_float(r.kappa),
            r.replication.to_string(),
            fmt_float(r.selected_param),
            fmt_float(r.complexity),
            fmt_float(r.risk),
            fmt_float(r.oracle_risk),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_summary_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(io_err)?;
    for s in &sweep.summaries {
        w.write_record([
            fmt_float(s.kappa),
            fmt_float(s.median_complexity),
            fmt_float(s.median_risk_ratio),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

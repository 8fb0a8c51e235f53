//! Sensitivity of the feedback schemes against a standard interferometer
//! given the same total squeezing.

use std::io::Write;

use rayon::prelude::*;
use su11_core::{scheme_qfi, QfiResult, SchemeConfig};

use crate::error::{Error, Result};
use crate::output::{csv_writer, format_float};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub loops: usize,
    pub sequential: QfiResult,
    pub partial: QfiResult,
    /// Standard interferometer with squeezing `N·r`.
    pub standard: QfiResult,
}

pub const COMPARE_HEADER: [&str; 7] = [
    "N",
    "delta_phi_sequential",
    "delta_phi_partial",
    "delta_phi_standard",
    "qfi_sequential",
    "qfi_partial",
    "qfi_standard",
];

/// Lossless comparison for `N = 1..=n_max` at a fixed phase.
pub fn compare_resources(r: f64, phi: f64, n_max: usize) -> Result<Vec<CompareRow>> {
    if n_max == 0 {
        return Err(Error::Spec("n_max must be >= 1".into()));
    }
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            Ok(CompareRow {
                loops: n,
                sequential: scheme_qfi(&SchemeConfig::sequential(r, n), phi)?,
                partial: scheme_qfi(&SchemeConfig::partial(r, n), phi)?,
                standard: scheme_qfi(&SchemeConfig::standard(n as f64 * r), phi)?,
            })
        })
        .collect()
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], precision: usize, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for row in rows {
        let f = |x| format_float(x, precision);
        w.write_record([
            row.loops.to_string(),
            f(row.sequential.delta_phi),
            f(row.partial.delta_phi),
            f(row.standard.delta_phi),
            f(row.sequential.h),
            f(row.partial.h),
            f(row.standard.h),
        ])?;
    }
    w.flush()?;
    Ok(())
}

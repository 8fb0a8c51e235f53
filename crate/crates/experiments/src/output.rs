//! CSV emission.

use std::io::Write;

use crate::error::Result;
use crate::sweep::SweepRow;

pub const SWEEP_HEADER: [&str; 16] = [
    "scheme",
    "r",
    "theta",
    "phi",
    "N",
    "eta",
    "k",
    "n1",
    "n2",
    "n_total",
    "qfi",
    "qfi_scaled",
    "delta_phi",
    "method",
    "qfi_formula",
    "error",
];

/// Rounds `x` to `precision` significant digits and prints the shortest
/// decimal that reads back to the rounded value. Plain notation is used
/// between 1e-5 and 1e16, exponent notation outside.
pub fn format_float(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let digits = precision.clamp(1, 17);
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let a = rounded.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Empty field for results of failed rows.
fn result_field(x: f64, failed: bool, precision: usize) -> String {
    if failed {
        String::new()
    } else {
        format_float(x, precision)
    }
}

pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], precision: usize, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let failed = row.error.is_some();
        let f = |x| format_float(x, precision);
        let res = |x| result_field(x, failed, precision);
        w.write_record([
            row.scheme.as_str().to_string(),
            f(row.r),
            f(row.theta),
            f(row.phi),
            row.loops.to_string(),
            f(row.eta),
            row.k.map(|k| k.to_string()).unwrap_or_default(),
            res(row.n1),
            res(row.n2),
            res(row.n_total),
            res(row.qfi),
            res(row.qfi_scaled),
            res(row.delta_phi),
            row.method.as_str().to_string(),
            row.formula
                .map(|f| f.as_str().to_string())
                .unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_csv_string(rows: &[SweepRow], precision: usize) -> Result<String> {
    let mut buf = Vec::new();
    write_sweep_csv(rows, precision, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.1, 17), "0.1");
        assert_eq!(format_float(1.0, 6), "1");
        assert_eq!(format_float(std::f64::consts::PI, 6), "3.14159");
        assert_eq!(format_float(std::f64::consts::PI, 17), "3.141592653589793");
        assert_eq!(format_float(123456.7, 6), "123457");
        assert_eq!(format_float(1.5e-9, 6), "1.5e-9");
        assert_eq!(format_float(2.0e20, 6), "2e20");
        assert_eq!(format_float(-0.0, 6), "0");
        assert_eq!(format_float(f64::INFINITY, 6), "inf");
        assert_eq!(format_float(f64::NAN, 6), "nan");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.010033377809537924, 1.0 / 3.0, 6.02214076e23, 1e-300] {
            assert_eq!(format_float(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}

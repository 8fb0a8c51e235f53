//! Companion gnuplot script for a sweep CSV.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::output::format_float;
use crate::sweep::SweepRow;

/// Row attributes that can distinguish one curve from another.
fn keys(row: &SweepRow, precision: usize) -> [(&'static str, String); 5] {
    [
        ("scheme", row.scheme.as_str().to_string()),
        ("r", format_float(row.r, precision)),
        ("eta", format_float(row.eta, precision)),
        ("N", row.loops.to_string()),
        ("phi", format_float(row.phi, precision)),
    ]
}

/// Script plotting column `y` against column `x` of `csv_path`, one curve
/// for each combination of the other grid coordinates that varies.
pub fn gnuplot_script(
    title: &str,
    csv_path: &str,
    rows: &[SweepRow],
    x: &str,
    y: &str,
    precision: usize,
) -> String {
    let all: Vec<_> = rows.iter().map(|r| keys(r, precision)).collect();
    let varying: Vec<usize> = (0..5)
        .filter(|&i| all[0][i].0 != x)
        .filter(|&i| all.iter().any(|k| k[i].1 != all[0][i].1))
        .collect();
    let curves: BTreeSet<Vec<(&str, String)>> = all
        .iter()
        .map(|k| varying.iter().map(|&i| k[i].clone()).collect())
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator comma");
    let _ = writeln!(s, "set datafile columnheaders");
    let _ = writeln!(s, "set title \"{title}\"");
    let _ = writeln!(s, "set xlabel \"{x}\"");
    let _ = writeln!(s, "set ylabel \"{y}\"");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "data = \"{csv_path}\"");
    if curves.len() <= 1 {
        let _ = writeln!(
            s,
            "plot data using \"{x}\":\"{y}\" with linespoints notitle"
        );
        return s;
    }
    let mut parts = Vec::new();
    for curve in &curves {
        let cond: Vec<String> = curve
            .iter()
            .map(|(k, v)| format!("strcol(\"{k}\") eq \"{v}\""))
            .collect();
        let label: Vec<String> = curve.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.push(format!(
            "data using \"{x}\":(({}) ? column(\"{y}\") : 1/0) with linespoints title \"{}\"",
            cond.join(" && "),
            label.join(" ")
        ));
    }
    let _ = writeln!(s, "plot \\\n    {}", parts.join(", \\\n    "));
    s
}

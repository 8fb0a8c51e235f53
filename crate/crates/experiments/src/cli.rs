//! Command-line front end. [`run`] takes the arguments and output streams
//! explicitly so the binary stays a one-line wrapper.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use su11_core::{estimate_period, SchemeConfig, SchemeKind};

use crate::compare::{compare_resources, write_compare_csv};
use crate::error::{Error, Result};
use crate::output::{csv_writer, format_float, write_sweep_csv};
use crate::plot::gnuplot_script;
use crate::presets::preset;
use crate::spec::{
    FormulaChoice, LoopRange, SwapInterval, SweepSpec, AUTO_PERIOD_MAX_LOOPS, DEFAULT_PRECISION,
};
use crate::sweep::run_sweep;
use crate::validate::{run_validation, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Simulate SU(1,1) interferometers with feedback and emit CSV data.
#[derive(Debug, Parser)]
#[command(name = "su11", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a parameter grid.
    Sweep(SweepArgs),
    /// Run a named figure preset; sweep flags override the preset.
    Figure {
        /// One of fig4a, fig4b, fig5a, fig5b, fig6a, fig6b, fig7, fig8, fig9.
        preset: String,
        /// Also write a gnuplot script that plots the CSV.
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Estimate the swap interval k (half the sequential intensity period).
    Period {
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        phi: f64,
        #[arg(long, default_value_t = AUTO_PERIOD_MAX_LOOPS)]
        max_loops: usize,
    },
    /// Compare sequential, partial and a standard interferometer squeezed by N·r.
    Compare {
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        phi: f64,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value = "-")]
        out: String,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
    },
    /// Run the release checks and print one JSON line per check.
    Validate {
        /// Relative tolerance of the analytic vs finite-difference QFI check.
        #[arg(long, default_value_t = 1e-6)]
        qfi_tolerance: f64,
        /// Relative tolerance of the derivative check.
        #[arg(long, default_value_t = 1e-6)]
        derivative_tolerance: f64,
        /// Corrupt one squeezer coefficient (the metric check must fail).
        #[arg(long)]
        perturb_squeezer_sign: bool,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON sweep spec; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Comma-separated list of standard, sequential, partial, swapping.
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<SchemeKind>>,
    /// Comma-separated squeezing amplitudes.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    r: Option<Vec<f64>>,
    /// Pump phase of every squeezer.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_max: Option<f64>,
    /// Number of phase points.
    #[arg(long)]
    phi_steps: Option<usize>,
    /// Inclusive loop range a..b.
    #[arg(long)]
    loops: Option<LoopRange>,
    /// Comma-separated loss rates in [0, 1].
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// Swap interval of the swapping scheme: an integer or "auto".
    #[arg(long)]
    swap_interval: Option<SwapInterval>,
    /// auto, pure or noisy.
    #[arg(long)]
    qfi_formula: Option<FormulaChoice>,
    /// Output file, or - for stdout.
    #[arg(long)]
    out: Option<String>,
    /// Significant digits, 6 to 17.
    #[arg(long)]
    precision: Option<usize>,
}

impl SweepArgs {
    fn resolve(self, base: SweepSpec) -> Result<SweepSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
                    path: path.clone(),
                    source,
                })?;
                SweepSpec::from_json(&text)?
            }
            None => base,
        };
        if let Some(v) = self.scheme {
            spec.schemes = v;
        }
        if let Some(v) = self.r {
            spec.r = v;
        }
        if let Some(v) = self.theta {
            spec.theta = v;
        }
        if self.phi_min.is_some() || self.phi_max.is_some() || self.phi_steps.is_some() {
            spec.phi_values = None;
        }
        if let Some(v) = self.phi_min {
            spec.phi_min = v;
            if self.phi_max.is_none() && spec.phi_max < v {
                spec.phi_max = v;
            }
        }
        if let Some(v) = self.phi_max {
            spec.phi_max = v;
        }
        if let Some(v) = self.phi_steps {
            spec.phi_steps = v;
        }
        if let Some(v) = self.loops {
            spec.loops = v;
        }
        if let Some(v) = self.eta {
            spec.eta = v;
        }
        if let Some(v) = self.swap_interval {
            spec.swap_interval = v;
        }
        if let Some(v) = self.qfi_formula {
            spec.qfi_formula = v;
        }
        if let Some(v) = self.out {
            spec.output = v;
        }
        if let Some(v) = self.precision {
            spec.precision = v;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn open_output<'a>(target: &str, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(if target == "-" {
        Box::new(stdout)
    } else {
        Box::new(BufWriter::new(File::create(target)?))
    })
}

/// Runs a sweep and writes its CSV; returns the number of failed rows.
fn sweep(
    spec: &SweepSpec,
    plot: Option<(&PathBuf, &str, &str, &str)>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<usize> {
    if plot.is_some() && spec.output == "-" {
        return Err(Error::Spec("--plot needs --out <path>".into()));
    }
    let rows = run_sweep(spec)?;
    write_sweep_csv(&rows, spec.precision, open_output(&spec.output, stdout)?)?;
    if let Some((path, title, x, y)) = plot {
        let script = gnuplot_script(title, &spec.output, &rows, x, y, spec.precision);
        std::fs::write(path, script)?;
    }
    let failed: Vec<_> = rows.iter().filter(|r| !r.is_ok()).collect();
    if let Some(first) = failed.first() {
        writeln!(
            stderr,
            "su11: {} of {} rows failed; first error: {}",
            failed.len(),
            rows.len(),
            first.error.as_deref().unwrap_or_default()
        )?;
    }
    Ok(failed.len())
}

fn exit_for_failures(failed: usize) -> i32 {
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Sweep(args) => {
            let spec = args.resolve(SweepSpec::default())?;
            Ok(exit_for_failures(sweep(&spec, None, stdout, stderr)?))
        }
        Command::Figure {
            preset: name,
            plot,
            sweep: args,
        } => {
            let p = preset(&name)?;
            let spec = args.resolve(p.spec.clone())?;
            let plot = plot.as_ref().map(|path| (path, p.title, p.x, p.y));
            Ok(exit_for_failures(sweep(&spec, plot, stdout, stderr)?))
        }
        Command::Period {
            r,
            theta,
            phi,
            max_loops,
        } => {
            let cfg = SchemeConfig::sequential(r, 1).with_pump_phases(theta, theta);
            let k = estimate_period(&cfg, phi, max_loops)?;
            let mut w = csv_writer(stdout);
            w.write_record(["r", "theta", "phi", "k"])?;
            let f = |x| format_float(x, DEFAULT_PRECISION);
            w.write_record([f(r), f(theta), f(phi), k.to_string()])?;
            w.flush()?;
            Ok(EXIT_OK)
        }
        Command::Compare {
            r,
            phi,
            n_max,
            out,
            precision,
        } => {
            SweepSpec {
                precision,
                ..SweepSpec::default()
            }
            .validate()?;
            let rows = compare_resources(r, phi, n_max)?;
            write_compare_csv(&rows, precision, open_output(&out, stdout)?)?;
            Ok(EXIT_OK)
        }
        Command::Validate {
            qfi_tolerance,
            derivative_tolerance,
            perturb_squeezer_sign,
        } => {
            let opts = ValidateOptions {
                qfi_tolerance,
                derivative_tolerance,
                perturb_squeezer: perturb_squeezer_sign,
            };
            let checks = run_validation(&opts);
            for c in &checks {
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string(c).expect("check serializes")
                )?;
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            let summary = serde_json::json!({
                "summary": true,
                "passed": passed,
                "failed": checks.len() - passed,
            });
            writeln!(stdout, "{summary}")?;
            Ok(exit_for_failures(checks.len() - passed))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let code = match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "su11: {e}");
            e.exit_code()
        }
    };
    let _ = stdout.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("su11").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_with_one() {
        for args in [
            &["sweep", "--bogus"][..],
            &["sweep", "--scheme", "mzi"],
            &["sweep", "--precision", "5"],
            &["sweep", "--loops", "3..1"],
            &["sweep", "--swap-interval", "often"],
            &["sweep", "--config", "/nonexistent/spec.json"],
            &["figure", "fig10"],
            &["figure", "fig7", "--plot", "x.gp"],
            &["compare", "--n-max", "0"],
            &[],
        ] {
            let (code, _, err) = call(args);
            assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn sweep_writes_csv_to_stdout() {
        let (code, out, _) = call(&[
            "sweep",
            "--scheme",
            "sequential,partial",
            "--r",
            "0.1",
            "--loops",
            "1..3",
            "--phi-min",
            "0",
            "--phi-max",
            "1",
            "--phi-steps",
            "2",
        ]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], crate::output::SWEEP_HEADER.join(","));
        assert_eq!(lines.len(), 1 + 2 * 3 * 2);
        assert!(!out.contains('\r'));
        assert!(lines[1].starts_with("sequential,0.1,0,0,1,0,,"));
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("spec.json");
        std::fs::write(
            &cfg,
            r#"{"schemes": ["partial"], "r": [0.05, 0.1], "loops": "1..4", "precision": 8}"#,
        )
        .unwrap();
        let path = cfg.to_str().unwrap();
        let (code, out, _) = call(&["sweep", "--config", path]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 1 + 2 * 4);
        let (code, out, _) = call(&["sweep", "--config", path, "--r", "0.2", "--loops", "2"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("partial,0.2,0,"));
    }

    #[test]
    fn figure_writes_csv_and_plot_script() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("fig5a.csv");
        let gp = dir.path().join("fig5a.gp");
        let (code, out, err) = call(&[
            "figure",
            "fig5a",
            "--out",
            csv.to_str().unwrap(),
            "--plot",
            gp.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(out.is_empty());
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 31);
        let script = std::fs::read_to_string(&gp).unwrap();
        assert!(script.contains(csv.to_str().unwrap()));
    }

    #[test]
    fn failed_rows_keep_the_output_and_exit_with_two() {
        let (code, out, err) = call(&[
            "sweep",
            "--scheme",
            "swapping",
            "--phi-min",
            "0.001",
            "--loops",
            "4",
        ]);
        assert_eq!(code, EXIT_FAILURE);
        assert_eq!(out.lines().count(), 2);
        assert!(out.contains("oscillation period not resolved"));
        assert!(err.contains("1 of 1 rows failed"));
    }

    #[test]
    fn period_and_compare() {
        let (code, out, _) = call(&["period", "--r", "0.1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().nth(1).unwrap(), "0.1,0,0.785398163397,4");
        let (code, _, err) = call(&["period", "--phi", "0.001"]);
        assert_eq!(code, EXIT_FAILURE, "{err}");
        let (code, out, _) = call(&["compare", "--n-max", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn validate_reports_a_perturbed_squeezer() {
        let (code, out, _) = call(&["validate", "--perturb-squeezer-sign"]);
        assert_eq!(code, EXIT_FAILURE);
        let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(first["name"], "metric-preservation");
        assert_eq!(first["passed"], false);
        let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
        assert_eq!(last["summary"], true);
    }
}

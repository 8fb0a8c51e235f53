//! Sweep specification, as read from JSON or assembled from CLI flags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use su11_core::SchemeKind;

use crate::error::{Error, Result};

pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;
pub const DEFAULT_PRECISION: usize = 12;

/// Loops scanned by `estimate_period` when the swap interval is "auto".
pub const AUTO_PERIOD_MAX_LOOPS: usize = 200;

/// Inclusive loop range `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopRange {
    pub start: usize,
    pub end: usize,
}

impl LoopRange {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.start..=self.end).contains(&n)
    }
}

impl fmt::Display for LoopRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for LoopRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spec(format!("loop range '{s}' is not of the form a..b"));
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                Ok(Self::new(parse(a)?, parse(b)?))
            }
            None => {
                let n = parse(s)?;
                Ok(Self::new(n, n))
            }
        }
    }
}

impl Serialize for LoopRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LoopRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Single(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Single(n) => Ok(Self::new(n, n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Swap interval `k` of the swapping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapInterval {
    Fixed(usize),
    /// Half the sequential intensity period at the row's `r` and `φ`.
    #[default]
    Auto,
}

impl fmt::Display for SwapInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwapInterval::Fixed(k) => write!(f, "{k}"),
            SwapInterval::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for SwapInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SwapInterval::Auto);
        }
        s.parse().map(SwapInterval::Fixed).map_err(|_| {
            Error::Spec(format!(
                "swap interval '{s}' is neither an integer nor 'auto'"
            ))
        })
    }
}

impl Serialize for SwapInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SwapInterval::Fixed(k) => s.serialize_u64(*k as u64),
            SwapInterval::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for SwapInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Fixed(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Fixed(k) => Ok(SwapInterval::Fixed(k)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which QFI expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaChoice {
    /// Pure-state formula without loss, lossy formula with loss.
    #[default]
    Auto,
    Pure,
    Noisy,
}

impl FromStr for FormulaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(FormulaChoice::Auto),
            "pure" => Ok(FormulaChoice::Pure),
            "noisy" => Ok(FormulaChoice::Noisy),
            other => Err(Error::Spec(format!("unknown qfi formula '{other}'"))),
        }
    }
}

mod scheme_list {
    use super::*;

    pub fn serialize<S: Serializer>(
        kinds: &[SchemeKind],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(kinds.iter().map(|k| k.as_str()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<SchemeKind>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(String),
            Many(Vec<String>),
        }
        let names = match Raw::deserialize(d)? {
            Raw::One(s) => vec![s],
            Raw::Many(v) => v,
        };
        names
            .iter()
            .map(|n| n.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

fn default_eta() -> Vec<f64> {
    vec![0.0]
}

fn default_loops() -> LoopRange {
    LoopRange::new(1, 1)
}

fn default_phi_steps() -> usize {
    1
}

fn default_output() -> String {
    "-".into()
}

fn default_precision() -> usize {
    DEFAULT_PRECISION
}

/// A full sweep: the Cartesian product of schemes, `r`, `eta`, loop counts
/// and phases.
///
/// The phase grid is `phi_steps` equally spaced points on
/// `[phi_min, phi_max]`, unless `phi_values` lists the phases explicitly.
/// Standard-interferometer rows are evaluated once per `(r, eta, phi)` with
/// `N = 1`, whatever the loop range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(with = "scheme_list")]
    pub schemes: Vec<SchemeKind>,
    pub r: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi_min: f64,
    #[serde(default)]
    pub phi_max: f64,
    #[serde(default = "default_phi_steps")]
    pub phi_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_values: Option<Vec<f64>>,
    #[serde(default = "default_loops")]
    pub loops: LoopRange,
    #[serde(default = "default_eta")]
    pub eta: Vec<f64>,
    #[serde(default)]
    pub swap_interval: SwapInterval,
    #[serde(default)]
    pub qfi_formula: FormulaChoice,
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            schemes: vec![SchemeKind::Sequential],
            r: vec![0.1],
            theta: 0.0,
            phi_min: std::f64::consts::FRAC_PI_4,
            phi_max: std::f64::consts::FRAC_PI_4,
            phi_steps: 1,
            phi_values: None,
            loops: default_loops(),
            eta: default_eta(),
            swap_interval: SwapInterval::Auto,
            qfi_formula: FormulaChoice::Auto,
            output: default_output(),
            precision: DEFAULT_PRECISION,
        }
    }
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Spec(format!("{name} grid is empty")));
    }
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Spec(format!("{name} value {v} is not finite"))),
        None => Ok(()),
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::Spec("no scheme selected".into()));
        }
        check_finite("r", &self.r)?;
        check_finite("eta", &self.eta)?;
        if let Some(e) = self.eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Spec(format!("eta {e} outside [0, 1]")));
        }
        if !self.theta.is_finite() {
            return Err(Error::Spec("theta must be finite".into()));
        }
        match &self.phi_values {
            Some(values) => check_finite("phi", values)?,
            None => {
                if self.phi_steps == 0 {
                    return Err(Error::Spec("phi_steps must be >= 1".into()));
                }
                check_finite("phi", &[self.phi_min, self.phi_max])?;
                if self.phi_max < self.phi_min {
                    return Err(Error::Spec(format!(
                        "phi_max {} is below phi_min {}",
                        self.phi_max, self.phi_min
                    )));
                }
            }
        }
        if self.loops.start == 0 || self.loops.end < self.loops.start {
            return Err(Error::Spec(format!(
                "loop range {} must satisfy 1 <= a <= b",
                self.loops
            )));
        }
        if self.swap_interval == SwapInterval::Fixed(0) {
            return Err(Error::Spec("swap interval must be >= 1".into()));
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision) {
            return Err(Error::Spec(format!(
                "precision {} outside [{MIN_PRECISION}, {MAX_PRECISION}]",
                self.precision
            )));
        }
        Ok(())
    }

    /// Phase grid in ascending order.
    pub fn phi_grid(&self) -> Vec<f64> {
        let mut grid = match &self.phi_values {
            Some(values) => values.clone(),
            None if self.phi_steps == 1 => vec![self.phi_min],
            None => {
                let last = (self.phi_steps - 1) as f64;
                let span = self.phi_max - self.phi_min;
                (0..self.phi_steps)
                    .map(|i| {
                        if i + 1 == self.phi_steps {
                            self.phi_max
                        } else {
                            self.phi_min + span * (i as f64 / last)
                        }
                    })
                    .collect()
            }
        };
        sort_dedup(&mut grid);
        grid
    }

    /// Schemes in canonical order without duplicates.
    pub fn scheme_order(&self) -> Vec<SchemeKind> {
        let mut kinds = self.schemes.clone();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    pub fn r_grid(&self) -> Vec<f64> {
        let mut v = self.r.clone();
        sort_dedup(&mut v);
        v
    }

    pub fn eta_grid(&self) -> Vec<f64> {
        let mut v = self.eta.clone();
        sort_dedup(&mut v);
        v
    }
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a == b);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_range_parsing() {
        assert_eq!("1..20".parse::<LoopRange>().unwrap(), LoopRange::new(1, 20));
        assert_eq!("3..=5".parse::<LoopRange>().unwrap(), LoopRange::new(3, 5));
        assert_eq!("7".parse::<LoopRange>().unwrap(), LoopRange::new(7, 7));
        assert!("a..b".parse::<LoopRange>().is_err());
    }

    #[test]
    fn swap_interval_parsing() {
        assert_eq!("auto".parse::<SwapInterval>().unwrap(), SwapInterval::Auto);
        assert_eq!("4".parse::<SwapInterval>().unwrap(), SwapInterval::Fixed(4));
        assert!("four".parse::<SwapInterval>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = SweepSpec {
            schemes: vec![SchemeKind::Partial, SchemeKind::Swapping],
            r: vec![0.1, 0.2],
            loops: LoopRange::new(2, 9),
            swap_interval: SwapInterval::Fixed(4),
            eta: vec![0.0, 0.5],
            ..SweepSpec::default()
        };
        let back = SweepSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn json_defaults_and_unknown_fields() {
        let spec = SweepSpec::from_json(
            r#"{"schemes": "partial", "r": [0.1], "loops": "1..10", "swap_interval": "auto"}"#,
        )
        .unwrap();
        assert_eq!(spec.schemes, vec![SchemeKind::Partial]);
        assert_eq!(spec.eta, vec![0.0]);
        assert_eq!(spec.precision, DEFAULT_PRECISION);
        assert!(SweepSpec::from_json(r#"{"schemes": [], "r": [0.1], "bogus": 1}"#).is_err());
        assert!(SweepSpec::from_json(r#"{"schemes": ["mzi"], "r": [0.1]}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let ok = SweepSpec::default();
        ok.validate().unwrap();
        let cases = [
            SweepSpec {
                r: vec![],
                ..ok.clone()
            },
            SweepSpec {
                phi_steps: 0,
                ..ok.clone()
            },
            SweepSpec {
                precision: 5,
                ..ok.clone()
            },
            SweepSpec {
                precision: 18,
                ..ok.clone()
            },
            SweepSpec {
                eta: vec![1.5],
                ..ok.clone()
            },
            SweepSpec {
                loops: LoopRange::new(0, 3),
                ..ok.clone()
            },
            SweepSpec {
                loops: LoopRange::new(4, 3),
                ..ok.clone()
            },
            SweepSpec {
                schemes: vec![],
                ..ok.clone()
            },
            SweepSpec {
                swap_interval: SwapInterval::Fixed(0),
                ..ok.clone()
            },
        ];
        for case in cases {
            assert!(case.validate().is_err(), "{case:?}");
        }
    }

    #[test]
    fn phi_grid_counts_points_and_hits_endpoints() {
        let spec = SweepSpec {
            phi_min: 0.0,
            phi_max: std::f64::consts::PI,
            phi_steps: 100,
            ..SweepSpec::default()
        };
        let grid = spec.phi_grid();
        assert_eq!(grid.len(), 100);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[99], std::f64::consts::PI);
        let explicit = SweepSpec {
            phi_values: Some(vec![0.5, 0.1, 0.5]),
            ..SweepSpec::default()
        };
        assert_eq!(explicit.phi_grid(), vec![0.1, 0.5]);
    }
}

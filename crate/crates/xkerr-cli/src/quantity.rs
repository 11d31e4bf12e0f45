//! Unit-tagged parameter values.
//!
//! A dimensional value is written as `"<number> <unit>"`. Rates and
//! couplings are angular: `rad/s` with SI prefixes, or `Hz` with SI
//! prefixes for an ordinary frequency `ω/2π`. The tag `omega_m` means a
//! multiple of the mechanical frequency. Dimensionless values are plain
//! numbers or fractions such as `"1/20"`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Dimensionless,
    /// Angular rate in rad/s.
    Rate,
    Voltage,
    Capacitance,
    Inductance,
    Temperature,
    /// Power in dBm.
    Power,
    Time,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Dimensionless => "dimensionless",
            Dimension::Rate => "rate",
            Dimension::Voltage => "voltage",
            Dimension::Capacitance => "capacitance",
            Dimension::Inductance => "inductance",
            Dimension::Temperature => "temperature",
            Dimension::Power => "power",
            Dimension::Time => "time",
        };
        f.write_str(s)
    }
}

/// A parsed value before relative tags are resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    Absolute(f64),
    /// Multiple of `ω_M`.
    PerOmegaM(f64),
}

fn prefix(p: &str) -> Option<f64> {
    Some(match p {
        "" => 1.0,
        "k" => 1e3,
        "M" => 1e6,
        "G" => 1e9,
        "m" => 1e-3,
        "u" | "µ" => 1e-6,
        "n" => 1e-9,
        "p" => 1e-12,
        "f" => 1e-15,
        "a" => 1e-18,
        _ => return None,
    })
}

/// Scale factor to rad/s, V, F, H, K, dBm or s.
fn unit_scale(unit: &str) -> Option<(Dimension, f64)> {
    if unit == "dBm" {
        return Some((Dimension::Power, 1.0));
    }
    if let Some(p) = unit.strip_suffix("rad/s") {
        return prefix(p).map(|s| (Dimension::Rate, s));
    }
    if let Some(p) = unit.strip_suffix("Hz") {
        return prefix(p).map(|s| (Dimension::Rate, 2.0 * PI * s));
    }
    let (dim, p) = if let Some(p) = unit.strip_suffix('V') {
        (Dimension::Voltage, p)
    } else if let Some(p) = unit.strip_suffix('F') {
        (Dimension::Capacitance, p)
    } else if let Some(p) = unit.strip_suffix('H') {
        (Dimension::Inductance, p)
    } else if let Some(p) = unit.strip_suffix('K') {
        (Dimension::Temperature, p)
    } else if let Some(p) = unit.strip_suffix('s') {
        (Dimension::Time, p)
    } else {
        return None;
    };
    prefix(p).map(|s| (dim, s))
}

/// Parses a plain number or a fraction `a/b`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0.0).then_some(a / b)
        }
        None => s.parse().ok(),
    }
}

/// Parses `value` for a key of dimension `dim`.
pub fn parse(key: &str, value: &str, dim: Dimension) -> Result<Quantity, CliError> {
    let value = value.trim();
    let (num, unit) = match value.find(char::is_whitespace) {
        Some(i) => (&value[..i], value[i..].trim()),
        None => (value, ""),
    };
    let bad = |reason: String| CliError::Config(format!("`{key}` = \"{value}\": {reason}"));
    let x = parse_number(num).ok_or_else(|| bad("not a number".into()))?;
    if dim == Dimension::Dimensionless {
        return if unit.is_empty() { Ok(Quantity::Absolute(x)) } else { Err(bad("expected a plain number".into())) };
    }
    if unit.is_empty() {
        return Err(bad(format!("missing unit tag for a {dim} value")));
    }
    if unit == "omega_m" {
        return if dim == Dimension::Rate {
            Ok(Quantity::PerOmegaM(x))
        } else {
            Err(bad(format!("`omega_m` is a rate, expected {dim}")))
        };
    }
    match unit_scale(unit) {
        Some((d, s)) if d == dim => Ok(Quantity::Absolute(x * s)),
        Some((d, _)) => Err(bad(format!("unit `{unit}` is a {d}, expected {dim}"))),
        None => Err(bad(format!("unknown unit `{unit}`"))),
    }
}

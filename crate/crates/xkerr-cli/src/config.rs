//! Run configuration, parameter schema and per-point resolution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xkerr::catgen::GridSpec;
use xkerr::circuit::{self, CircuitParams, GmModel, ValidityReport, DEFAULT_VALIDITY_THRESHOLD};
use xkerr::units::{E_CHARGE, PLANCK};
use xkerr::{Drive, DriveAndBath, EffectiveCouplings, Thermal, C64};

use crate::error::CliError;
use crate::quantity::{self, Dimension, Quantity};
use crate::sweep::Sweep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Couplings,
    G2trace,
    G2map,
    Pbmap,
    Thermal,
    Cat,
    Wigner,
    Negativity,
    Entangle,
    Stability,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Couplings => "couplings",
            Command::G2trace => "g2trace",
            Command::G2map => "g2map",
            Command::Pbmap => "pbmap",
            Command::Thermal => "thermal",
            Command::Cat => "cat",
            Command::Wigner => "wigner",
            Command::Negativity => "negativity",
            Command::Entangle => "entangle",
            Command::Stability => "stability",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A raw parameter: a plain number, or text carrying a unit tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

pub type ParamMap = BTreeMap<String, ParamValue>;

/// Everything needed to reproduce a run. Stored verbatim in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub preset: Option<String>,
    /// Preset values merged with file and command-line overrides.
    pub params: ParamMap,
    pub sweeps: Vec<String>,
    pub format: Format,
    pub threads: Option<usize>,
    pub force: bool,
    /// Bound on steady-state residuals and trace/Hermiticity errors.
    pub tol: f64,
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Parameter file: optional preset base, parameters and sweeps.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub preset: Option<String>,
    #[serde(default)]
    pub params: ParamMap,
    #[serde(default)]
    pub sweep: Vec<String>,
}

impl ParamFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path.extension().and_then(|e| e.to_str()) == Some("json"))
    }

    pub fn parse(text: &str, json: bool) -> Result<Self, CliError> {
        if json {
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("parameter file: {e}")))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(format!("parameter file: {e}")))
        }
    }
}

/// Known parameter keys and their dimensions.
pub const KEYS: &[(&str, Dimension)] = &[
    // couplings, given directly
    ("omega_c", Dimension::Rate),
    ("omega_m", Dimension::Rate),
    ("g0", Dimension::Rate),
    ("g_ck", Dimension::Rate),
    ("g_ck_prime", Dimension::Rate),
    ("g_ck_prime_scale", Dimension::Dimensionless),
    // circuit
    ("e_j", Dimension::Rate),
    ("ratio_ej_ec", Dimension::Dimensionless),
    ("delta_ng0", Dimension::Dimensionless),
    ("v_g", Dimension::Voltage),
    ("c", Dimension::Capacitance),
    ("c_g0", Dimension::Capacitance),
    ("c_sum", Dimension::Capacitance),
    ("l", Dimension::Inductance),
    ("impedance_ratio", Dimension::Dimensionless),
    ("g_m", Dimension::Rate),
    ("g_m_per_ec", Dimension::Dimensionless),
    ("validity_threshold", Dimension::Dimensionless),
    // drive and baths
    ("delta_c", Dimension::Rate),
    ("omega_drive", Dimension::Rate),
    ("power", Dimension::Power),
    ("kappa", Dimension::Rate),
    ("gamma", Dimension::Rate),
    ("n_th", Dimension::Dimensionless),
    ("temperature", Dimension::Temperature),
    // truncation
    ("n_a", Dimension::Dimensionless),
    ("n_m", Dimension::Dimensionless),
    ("l_max", Dimension::Dimensionless),
    // cat states and Wigner grids
    ("k", Dimension::Dimensionless),
    ("n", Dimension::Dimensionless),
    ("xi", Dimension::Dimensionless),
    ("xi_im", Dimension::Dimensionless),
    ("t_stop_tau", Dimension::Dimensionless),
    ("t_steps", Dimension::Dimensionless),
    ("grid_min", Dimension::Dimensionless),
    ("grid_max", Dimension::Dimensionless),
    ("grid_points", Dimension::Dimensionless),
];

/// Keys taking a text value rather than a quantity.
pub const TEXT_KEYS: &[&str] = &["g_m_model"];

const CIRCUIT_KEYS: &[&str] = &[
    "e_j", "ratio_ej_ec", "delta_ng0", "v_g", "c", "c_g0", "c_sum", "l", "impedance_ratio", "g_m", "g_m_per_ec",
];

pub fn dimension(key: &str) -> Result<Dimension, CliError> {
    KEYS.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, d)| *d)
        .ok_or_else(|| CliError::Config(format!("unknown parameter `{key}`")))
}

pub fn is_circuit_key(key: &str) -> bool {
    CIRCUIT_KEYS.contains(&key)
}

/// Parsed parameter values, before coupling-dependent tags are resolved.
#[derive(Clone, Debug, Default)]
pub struct Values {
    quantities: BTreeMap<String, Quantity>,
    text: BTreeMap<String, String>,
}

impl Values {
    pub fn parse(map: &ParamMap) -> Result<Self, CliError> {
        let mut v = Values::default();
        for (key, raw) in map {
            if TEXT_KEYS.contains(&key.as_str()) {
                match raw {
                    ParamValue::Text(s) => v.text.insert(key.clone(), s.clone()),
                    ParamValue::Number(_) => return Err(CliError::Config(format!("`{key}` takes a text value"))),
                };
                continue;
            }
            let dim = dimension(key)?;
            let q = match raw {
                ParamValue::Number(x) if dim == Dimension::Dimensionless => Quantity::Absolute(*x),
                ParamValue::Number(x) => {
                    return Err(CliError::Config(format!("`{key}` = {x}: missing unit tag for a {dim} value")))
                }
                ParamValue::Text(s) => quantity::parse(key, s, dim)?,
            };
            v.quantities.insert(key.clone(), q);
        }
        Ok(v)
    }

    pub fn set(&mut self, key: &str, q: Quantity) {
        self.quantities.insert(key.to_string(), q);
    }

    fn get(&self, key: &str) -> Option<Quantity> {
        self.quantities.get(key).copied()
    }

    fn absolute(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Quantity::Absolute(x)) => Ok(Some(x)),
            Some(Quantity::PerOmegaM(_)) => {
                Err(CliError::Config(format!("`{key}` cannot be given relative to omega_m")))
            }
        }
    }

    fn require(&self, key: &str) -> Result<f64, CliError> {
        self.absolute(key)?.ok_or_else(|| CliError::Config(format!("missing parameter `{key}`")))
    }

    fn rate(&self, key: &str, omega_m: f64) -> Option<f64> {
        self.get(key).map(|q| match q {
            Quantity::Absolute(x) => x,
            Quantity::PerOmegaM(x) => x * omega_m,
        })
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.absolute(key)? {
            None => Ok(default),
            Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(x as usize),
            Some(x) => Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {x}"))),
        }
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.absolute(key)?.unwrap_or(default))
    }

    pub fn uses_circuit(&self) -> bool {
        !self.quantities.contains_key("g_ck")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Couplings pinned in the parameters.
    Direct,
    /// Couplings derived from circuit parameters.
    Circuit,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatSettings {
    pub k: u32,
    pub n: u32,
    pub xi: C64,
    pub t_stop_tau: f64,
    pub t_steps: Option<usize>,
    pub grid: GridSpec,
}

/// Fully resolved inputs at one sweep point.
#[derive(Clone, Debug, Serialize)]
pub struct Setup {
    pub source: Source,
    pub circuit: Option<CircuitParams>,
    pub eff: EffectiveCouplings,
    pub validity: Option<ValidityReport>,
    pub bath: DriveAndBath,
    pub n_a: usize,
    pub n_m: usize,
    pub l_max: usize,
    pub cat: CatSettings,
}

impl Setup {
    /// Configuration problems are [`CliError::Config`]; failures of the
    /// coupling pipeline are [`CliError::Model`] and belong to the point.
    pub fn resolve(v: &Values) -> Result<Self, CliError> {
        let n_a = v.count("n_a", 4)?;
        let n_m = v.count("n_m", 12)?;
        let (source, circuit, mut eff, validity) = if v.uses_circuit() {
            let p = circuit_params(v)?;
            let p = p.with_shifted_targets(v.require("omega_c")?, v.require("omega_m")?)?;
            let threshold = v.number("validity_threshold", DEFAULT_VALIDITY_THRESHOLD)?;
            let n_max = n_a.saturating_sub(1).max(1) as u32;
            let (_, eff, report) = circuit::couplings(&p, n_max, threshold)?;
            (Source::Circuit, Some(p), eff, Some(report))
        } else {
            let eff = EffectiveCouplings::new(
                v.require("omega_c")?,
                v.require("omega_m")?,
                v.require("g0")?,
                v.require("g_ck")?,
                v.require("g_ck_prime")?,
            );
            (Source::Direct, None, eff, None)
        };
        let scale = v.number("g_ck_prime_scale", 1.0)?;
        if scale != 1.0 {
            eff = eff.with_g_ck_prime(scale * eff.g_ck_prime);
        }
        let bath = bath(v, eff.omega_m)?;
        let cat = CatSettings {
            k: v.count("k", 2)? as u32,
            n: v.count("n", 1)? as u32,
            xi: C64::new(v.number("xi", 4.0)?, v.number("xi_im", 0.0)?),
            t_stop_tau: v.number("t_stop_tau", 1.0)?,
            t_steps: v.absolute("t_steps")?.map(|_| v.count("t_steps", 0)).transpose()?,
            grid: GridSpec {
                min: v.number("grid_min", -10.0)?,
                max: v.number("grid_max", 10.0)?,
                points: v.count("grid_points", 201)?,
            },
        };
        Ok(Setup { source, circuit, eff, validity, bath, n_a, n_m, l_max: v.count("l_max", 20)?, cat })
    }

    /// Whether the validity gate admits this point. Pinned couplings are
    /// not gated.
    pub fn valid(&self) -> bool {
        self.validity.as_ref().map_or(true, |r| r.usable())
    }
}

fn circuit_params(v: &Values) -> Result<CircuitParams, CliError> {
    let c = v.require("c")?;
    let l = match (v.absolute("l")?, v.absolute("impedance_ratio")?) {
        (Some(l), None) => l,
        (None, Some(r)) => {
            // 4Z₀e²/h = r with Z₀ = √(L/C)
            let z0 = r * PLANCK / (4.0 * E_CHARGE * E_CHARGE);
            z0 * z0 * c
        }
        _ => return Err(CliError::Config("give exactly one of `l` and `impedance_ratio`".into())),
    };
    let g_m = match (v.absolute("g_m")?, v.absolute("g_m_per_ec")?, v.text.get("g_m_model").map(String::as_str)) {
        (Some(g), None, None) => GmModel::Direct(g),
        (None, Some(k), None) => GmModel::PerChargingEnergy(k),
        (None, None, Some("formula")) => GmModel::Formula,
        (None, None, Some(other)) => return Err(CliError::Config(format!("unknown g_m_model `{other}`"))),
        _ => return Err(CliError::Config("give exactly one of `g_m`, `g_m_per_ec` and `g_m_model`".into())),
    };
    Ok(CircuitParams {
        e_j: v.require("e_j")?,
        ratio_ej_ec: v.absolute("ratio_ej_ec")?,
        delta_ng0: v.require("delta_ng0")?,
        v_g: v.require("v_g")?,
        c,
        c_g0: v.absolute("c_g0")?,
        c_sum: v.absolute("c_sum")?,
        l,
        // replaced by the shifted-target inversion
        omega_c0: v.require("omega_c")?,
        omega_m0: v.require("omega_m")?,
        phi_a: 0.0,
        g_m,
    })
}

fn bath(v: &Values, omega_m: f64) -> Result<DriveAndBath, CliError> {
    let drive = match (v.rate("omega_drive", omega_m), v.absolute("power")?) {
        (Some(o), None) => Drive::Amplitude(o),
        (None, Some(p)) => Drive::PowerDbm(p),
        (None, None) => Drive::Amplitude(0.0),
        _ => return Err(CliError::Config("give at most one of `omega_drive` and `power`".into())),
    };
    let thermal = match (v.absolute("n_th")?, v.absolute("temperature")?) {
        (Some(n), None) => Thermal::Occupation(n),
        (None, Some(t)) => Thermal::Temperature(t),
        (None, None) => Thermal::Occupation(0.0),
        _ => return Err(CliError::Config("give at most one of `n_th` and `temperature`".into())),
    };
    Ok(DriveAndBath {
        delta_c: v.rate("delta_c", omega_m).unwrap_or(0.0),
        drive,
        kappa: v.rate("kappa", omega_m).unwrap_or(0.0),
        gamma: v.rate("gamma", omega_m).unwrap_or(0.0),
        thermal,
    })
}

/// Builds a [`RunConfig`] from a preset, a parameter file and overrides,
/// later sources winning.
pub fn assemble(
    command: Command,
    preset: Option<&str>,
    file: Option<ParamFile>,
    overrides: &[(String, ParamValue)],
    extra_sweeps: &[String],
) -> Result<RunConfig, CliError> {
    let file = file.unwrap_or_default();
    let preset_name = match (preset, file.preset.as_deref()) {
        (Some(p), _) | (None, Some(p)) => Some(p.to_string()),
        (None, None) => None,
    };
    let mut params = ParamMap::new();
    let mut sweeps = Vec::new();
    if let Some(name) = &preset_name {
        let p = crate::presets::load(name)?;
        params.extend(p.params);
        sweeps = p.sweep;
    }
    params.extend(file.params);
    if !file.sweep.is_empty() {
        sweeps = file.sweep;
    }
    for (k, v) in overrides {
        params.insert(k.clone(), v.clone());
    }
    if !extra_sweeps.is_empty() {
        sweeps = extra_sweeps.to_vec();
    }
    let cfg = RunConfig {
        command,
        preset: preset_name,
        params,
        sweeps,
        format: Format::Csv,
        threads: None,
        force: false,
        tol: DEFAULT_TOL,
    };
    cfg.check()?;
    Ok(cfg)
}

impl RunConfig {
    /// Parses parameters and sweeps without evaluating anything.
    pub fn check(&self) -> Result<(Values, Vec<Sweep>), CliError> {
        let values = Values::parse(&self.params)?;
        let sweeps = self.sweeps.iter().map(|s| Sweep::parse(s)).collect::<Result<Vec<_>, _>>()?;
        for (i, a) in sweeps.iter().enumerate() {
            if sweeps[..i].iter().any(|b| b.key == a.key) {
                return Err(CliError::Config(format!("`{}` is swept twice", a.key)));
            }
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tolerance must be > 0, got {}", self.tol)));
        }
        Ok((values, sweeps))
    }

    pub fn load_manifest(path: &Path) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Partial {
            config: RunConfig,
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let m: Partial = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("manifest: {e}")))?;
        m.config.check()?;
        Ok(m.config)
    }
}

/// Parses a `key=value` override. Numbers stay numbers; anything else is text.
pub fn parse_override(s: &str) -> Result<(String, ParamValue), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("expected key=value, got `{s}`")))?;
    let k = k.trim().to_string();
    let v = v.trim();
    let value = match v.parse::<f64>() {
        Ok(x) => ParamValue::Number(x),
        Err(_) => ParamValue::Text(v.to_string()),
    };
    Ok((k, value))
}

/// Default output directory for a command.
pub fn default_out(command: Command) -> PathBuf {
    PathBuf::from(format!("out/{}", command.name()))
}

//! Layered `key = value` configuration: figure preset, then config file,
//! then command-line flags, each overriding the one before.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use optowig_core::{GaussianState, GridPreset, InputState, KernelKind, PhaseSpaceGrid, QuadratureSettings, SystemParams};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<optowig_core::Error> for ConfigError {
    fn from(e: optowig_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type CResult<T> = Result<T, ConfigError>;

/// Keys taking a real value. Sweep axes must be one of these.
pub const REAL_KEYS: &[&str] = &[
    "g0_over_kappa",
    "detuning",
    "omega_m",
    "gamma",
    "n_bath",
    "k",
    "k2",
    "alpha",
    "r_l",
    "theta",
    "eta",
    "n_bar",
    "r_m",
    "x_min",
    "x_max",
    "p_min",
    "p_max",
    "cutoff",
    "tail_tolerance",
];

const INTEGER_KEYS: &[&str] = &[
    "n",
    "nx",
    "np",
    "nodes",
    "truncation",
    "witness_levels",
    "periods",
    "steps_per_period",
    "steady_points",
    "threads",
];

const TEXT_KEYS: &[&str] = &["input", "kernel", "grid", "command", "out", "preset"];

pub fn canonical_key(raw: &str) -> String {
    raw.trim().to_ascii_lowercase().replace('-', "_")
}

fn is_known(key: &str) -> bool {
    key == "axis" || REAL_KEYS.contains(&key) || INTEGER_KEYS.contains(&key) || TEXT_KEYS.contains(&key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn parse(words: &[&str]) -> CResult<Self> {
        let [name, min, max, count] = words else {
            return Err(ConfigError(format!(
                "axis needs `name min max count`, got `{}`",
                words.join(" ")
            )));
        };
        let name = canonical_key(name);
        if !REAL_KEYS.contains(&name.as_str()) {
            return Err(ConfigError(format!(
                "axis `{name}` is not a real-valued parameter; choose one of {}",
                REAL_KEYS.join(", ")
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError(format!("axis `{name}`: `{s}` is not a finite number")))
        };
        let count: usize = count
            .parse()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or_else(|| ConfigError(format!("axis `{name}`: count `{count}` must be a positive integer")))?;
        let (min, max) = (num(min)?, num(max)?);
        Ok(AxisSpec { name, min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let m = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| (self.min * (m - i as f64) + self.max * i as f64) / m)
            .collect()
    }

    pub fn to_words(&self) -> String {
        format!("{} {} {} {}", self.name, self.min, self.max, self.count)
    }
}

/// One source of settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub values: BTreeMap<String, String>,
    pub axes: Vec<AxisSpec>,
}

impl Layer {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    /// Later layers win key by key; axes are replaced as a whole.
    pub fn overlay(&mut self, top: &Layer) {
        for (k, v) in &top.values {
            self.values.insert(k.clone(), v.clone());
        }
        if !top.axes.is_empty() {
            self.axes = top.axes.clone();
        }
    }

    pub fn parse_text(text: &str, origin: &str) -> CResult<Self> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let at = format!("{origin}:{}", i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError(format!("{at}: expected `key = value`, got `{line}`")));
            };
            let key = canonical_key(k);
            let value = v.trim();
            if !is_known(&key) {
                return Err(ConfigError(format!("{at}: unknown key `{}`", k.trim())));
            }
            if key == "axis" {
                let words: Vec<&str> = value.split_whitespace().collect();
                let axis = AxisSpec::parse(&words).map_err(|e| ConfigError(format!("{at}: {e}")))?;
                layer.axes.push(axis);
                continue;
            }
            if layer.values.insert(key.clone(), value.to_string()).is_some() {
                return Err(ConfigError(format!("{at}: `{key}` given twice")));
            }
        }
        Ok(layer)
    }

    pub fn read_file(path: &Path) -> CResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_text(&text, &path.display().to_string())
    }
}

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pulsed,
    PhotonCount,
    Baseline,
    Depth,
    Steady,
    ValidateRwa,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Pulsed,
        Command::PhotonCount,
        Command::Baseline,
        Command::Depth,
        Command::Steady,
        Command::ValidateRwa,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Pulsed => "pulsed",
            Command::PhotonCount => "photon-count",
            Command::Baseline => "baseline",
            Command::Depth => "depth",
            Command::Steady => "steady",
            Command::ValidateRwa => "validate-rwa",
            Command::Sweep => "sweep",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridChoice {
    Preset(GridPreset),
    Explicit(PhaseSpaceGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Coherent,
    SqueezedVacuum,
}

/// Which state `depth` analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthKernel {
    Deterministic,
    PhotonCount,
}

/// Typed settings for one run, plus the effective value of every key read.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Command,
    pub params: SystemParams,
    pub input: Input,
    pub alpha: f64,
    pub r_l: f64,
    pub theta: f64,
    pub n: u32,
    pub eta: f64,
    pub state: GaussianState,
    pub grid: GridChoice,
    pub quad: QuadratureSettings,
    pub depth_kernel: DepthKernel,
    pub truncation: usize,
    pub tail_tolerance: f64,
    pub witness_levels: usize,
    pub periods: usize,
    pub steps_per_period: usize,
    pub steady_points: usize,
    /// Sweep only.
    pub inner: Option<Command>,
    pub axes: Vec<AxisSpec>,
    /// Effective configuration, in input units, for provenance.
    pub resolved: BTreeMap<String, Value>,
}

struct Reader<'a> {
    layer: &'a Layer,
    resolved: BTreeMap<String, Value>,
}

impl<'a> Reader<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.layer.values.get(key).map(String::as_str)
    }

    fn real(&mut self, key: &str, default: f64) -> CResult<f64> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ConfigError(format!("field `{key}`: `{s}` is not a finite number")))?,
        };
        self.resolved.insert(key.into(), Value::from(v));
        Ok(v)
    }

    fn optional_real(&mut self, key: &str) -> CResult<Option<f64>> {
        if self.raw(key).is_none() {
            return Ok(None);
        }
        self.real(key, 0.0).map(Some)
    }

    fn integer(&mut self, key: &str, default: usize) -> CResult<usize> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("field `{key}`: `{s}` is not a non-negative integer")))?,
        };
        self.resolved.insert(key.into(), Value::from(v));
        Ok(v)
    }

    fn choice<T: Copy>(&mut self, key: &str, default: &str, options: &[(&str, T)]) -> CResult<T> {
        let s = self.raw(key).unwrap_or(default);
        let found = options.iter().find(|(n, _)| *n == s).map(|(_, v)| *v).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            ConfigError(format!("field `{key}`: `{s}` is not one of {}", names.join(", ")))
        })?;
        self.resolved.insert(key.into(), Value::from(s));
        Ok(found)
    }
}

impl Settings {
    pub fn parse(command: Command, layer: &Layer) -> CResult<Self> {
        let mut r = Reader { layer, resolved: BTreeMap::new() };

        let (inner, axes) = if command == Command::Sweep {
            let name = r.raw("command").ok_or_else(|| {
                ConfigError("sweep needs `--command` naming the pipeline to sweep".into())
            })?;
            let inner = Command::from_name(name)
                .filter(|c| !matches!(c, Command::Sweep | Command::ValidateRwa))
                .ok_or_else(|| {
                    ConfigError(format!(
                        "field `command`: cannot sweep `{name}`; use pulsed, photon-count, baseline, depth or steady"
                    ))
                })?;
            r.resolved.insert("command".into(), Value::from(name));
            if layer.axes.is_empty() || layer.axes.len() > 2 {
                return Err(ConfigError(format!("sweep needs one or two axes, got {}", layer.axes.len())));
            }
            if layer.axes.len() == 2 && layer.axes[0].name == layer.axes[1].name {
                return Err(ConfigError(format!("both axes sweep `{}`", layer.axes[0].name)));
            }
            for a in &layer.axes {
                if layer.values.contains_key(&a.name) {
                    return Err(ConfigError(format!("`{}` is both fixed and swept", a.name)));
                }
            }
            r.resolved.insert(
                "axis".into(),
                Value::from(layer.axes.iter().map(AxisSpec::to_words).collect::<Vec<_>>()),
            );
            (Some(inner), layer.axes.clone())
        } else {
            if !layer.axes.is_empty() {
                return Err(ConfigError("`axis` is only valid for sweep".into()));
            }
            if layer.values.contains_key("command") {
                return Err(ConfigError("`command` is only valid for sweep".into()));
            }
            (None, Vec::new())
        };
        let target = inner.unwrap_or(command);

        let g = r.real("g0_over_kappa", 1.0)?;
        let detuning = r.real("detuning", 0.0)?;
        let continuous = matches!(target, Command::Steady | Command::ValidateRwa);
        let params = if continuous {
            // rates as frequency/2π in Hz, flux in s⁻¹
            let omega_hz = r.real("omega_m", 1e5)?;
            let gamma_hz = r.real("gamma", 1e-3)?;
            SystemParams::builder(g)
                .detuning(detuning)
                .omega_m(2.0 * PI * omega_hz)
                .gamma(2.0 * PI * gamma_hz)
                .n_bath(r.real("n_bath", 0.0)?)
                .flux_k(r.real("k", 0.1)?)
                .flux_k2(r.real("k2", 0.0)?)
                .build()?
        } else {
            SystemParams::pulsed(g, detuning)?
        };

        let pulsed = !continuous;
        let input = if pulsed {
            r.choice("input", "coherent", &[("coherent", Input::Coherent), ("squeezed-vacuum", Input::SqueezedVacuum)])?
        } else {
            Input::Coherent
        };
        let (mut alpha, mut r_l, mut theta) = (0.0, 0.0, 0.0);
        if pulsed {
            match input {
                Input::Coherent => alpha = r.real("alpha", 2.0)?,
                Input::SqueezedVacuum => {
                    r_l = r.real("r_l", 0.691)?;
                    theta = r.real("theta", 0.0)?;
                }
            }
        }
        let depth_kernel = if target == Command::Depth {
            r.choice(
                "kernel",
                "deterministic",
                &[("deterministic", DepthKernel::Deterministic), ("photon-count", DepthKernel::PhotonCount)],
            )?
        } else {
            DepthKernel::Deterministic
        };
        let counting = target == Command::PhotonCount || depth_kernel == DepthKernel::PhotonCount;
        let (n, eta) = if counting {
            let n = r.integer("n", 1)?;
            let n = u32::try_from(n).map_err(|_| ConfigError(format!("field `n`: {n} is too large")))?;
            (n, r.real("eta", 1.0)?)
        } else {
            (0, 1.0)
        };
        if counting && eta < 1.0 && input != Input::Coherent {
            return Err(ConfigError("lossy photon counting (eta < 1) needs a coherent input".into()));
        }

        let state = if pulsed {
            GaussianState::squeezed_thermal(r.real("n_bar", 0.0)?, r.real("r_m", 0.0)?)?
        } else {
            GaussianState::vacuum()
        };

        let grid = if pulsed { Some(read_grid(&mut r)?) } else { None };
        let quad = if pulsed && target != Command::Baseline {
            let cutoff = r.real("cutoff", 8.0)?;
            let nodes = match r.raw("nodes") {
                Some(_) => Some(r.integer("nodes", 0)?),
                None => None,
            };
            QuadratureSettings { cutoff, nodes }
        } else {
            QuadratureSettings::default()
        };

        let (mut truncation, mut tail_tolerance, mut witness_levels, mut periods, mut steps, mut steady_points) =
            (0, 0.0, 0, 0, 0, 0);
        if continuous {
            let default_n = if target == Command::ValidateRwa { 100 } else { 200 };
            truncation = r.integer("truncation", default_n)?;
            if target == Command::Steady {
                tail_tolerance = r.real("tail_tolerance", 1e-10)?;
                witness_levels = r.integer("witness_levels", 100)?;
                steady_points = r.integer("steady_points", 401)?;
            } else {
                periods = r.integer("periods", 100)?;
                steps = r.integer("steps_per_period", optowig_core::steady::lindblad::MIN_STEPS_PER_PERIOD)?;
            }
        }

        // swept keys are provenance of the axes, not fixed values
        for a in &axes {
            r.resolved.remove(&a.name);
        }

        let unused: Vec<&String> = layer
            .values
            .keys()
            .filter(|k| !r.resolved.contains_key(*k) && !matches!(k.as_str(), "out" | "threads" | "preset"))
            .collect();
        if !unused.is_empty() {
            let names: Vec<&str> = unused.iter().map(|s| s.as_str()).collect();
            return Err(ConfigError(format!("`{}` has no effect on {}", names.join("`, `"), target.name())));
        }

        Ok(Settings {
            command,
            params,
            input,
            alpha,
            r_l,
            theta,
            n,
            eta,
            state,
            grid: grid.unwrap_or(GridChoice::Preset(GridPreset::Default)),
            quad,
            depth_kernel,
            truncation,
            tail_tolerance,
            witness_levels,
            periods,
            steps_per_period: steps,
            steady_points,
            inner,
            axes,
            resolved: r.resolved,
        })
    }

    /// Optical input as a state, for heralding and the baseline mixture.
    pub fn input_state(&self) -> InputState {
        match self.input {
            Input::Coherent => InputState::Coherent { alpha: Complex64::new(self.alpha, 0.0) },
            Input::SqueezedVacuum => InputState::SqueezedVacuum { r_l: self.r_l, theta: self.theta },
        }
    }

    pub fn deterministic_kernel(&self) -> KernelKind {
        match self.input {
            Input::Coherent => KernelKind::DeterministicCoherent { alpha: Complex64::new(self.alpha, 0.0) },
            Input::SqueezedVacuum => KernelKind::DeterministicSqueezedVac { r_l: self.r_l, theta: self.theta },
        }
    }

    pub fn counting_kernel(&self) -> KernelKind {
        if self.eta < 1.0 {
            KernelKind::LossyPhotonCount { n: self.n, eta: self.eta, alpha: Complex64::new(self.alpha, 0.0) }
        } else {
            KernelKind::PhotonCount { n: self.n }
        }
    }

    /// The effective configuration as a config file.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.resolved {
            match v {
                Value::Array(items) => {
                    for item in items {
                        out.push_str(&format!("{k} = {}\n", item.as_str().unwrap_or_default()));
                    }
                }
                Value::String(s) => out.push_str(&format!("{k} = {s}\n")),
                other => out.push_str(&format!("{k} = {other}\n")),
            }
        }
        out
    }
}

fn read_grid(r: &mut Reader) -> CResult<GridChoice> {
    let bounds = ["x_min", "x_max", "p_min", "p_max"];
    let given = bounds.iter().filter(|k| r.raw(k).is_some()).count();
    if given == 0 {
        let preset = r.choice(
            "grid",
            "default",
            &[("default", GridPreset::Default), ("paper-repro", GridPreset::PaperRepro)],
        )?;
        return Ok(GridChoice::Preset(preset));
    }
    if given < 4 || r.raw("grid").is_some() {
        return Err(ConfigError(
            "explicit grids need all of x_min, x_max, p_min, p_max and no `grid` preset".into(),
        ));
    }
    let mut b = [0.0; 4];
    for (slot, k) in b.iter_mut().zip(bounds) {
        *slot = r.optional_real(k)?.unwrap_or_default();
    }
    let nx = r.integer("nx", 241)?;
    let np = r.integer("np", 241)?;
    Ok(GridChoice::Explicit(PhaseSpaceGrid::new(b[0], b[1], b[2], b[3], nx, np)?))
}

//! Artifact files: CSV data, a JSON sidecar per CSV, `report.json` and the
//! effective configuration as `run.conf`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use optowig_core::VERSION;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{Diagnostics, Failure, Metrics, Outcome};
use crate::config::Settings;
use crate::presets::Preset;

pub const CONFIG_FILE: &str = "run.conf";

/// Where artifacts go and what produced them.
pub struct Sink<'a> {
    pub dir: PathBuf,
    pub settings: &'a Settings,
    pub preset: Option<&'a Preset>,
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Value>,
    params: &'a std::collections::BTreeMap<String, Value>,
    metrics: &'a Metrics,
    diagnostics: &'a Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failures: Option<&'a [Value]>,
}

impl<'a> Sink<'a> {
    pub fn create(dir: PathBuf, settings: &'a Settings, preset: Option<&'a Preset>) -> Result<Self, Failure> {
        fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
        let sink = Sink { dir, settings, preset };
        let conf = sink.dir.join(CONFIG_FILE);
        fs::write(&conf, settings.to_config_text()).map_err(|e| io_failure(&conf, e))?;
        Ok(sink)
    }

    fn preset_json(&self) -> Option<Value> {
        self.preset.map(|p| json!({ "name": p.name, "expected_delta": p.expected_delta }))
    }

    /// Writes `name` through `fill`, then its provenance sidecar.
    pub fn csv<F>(&self, name: &str, columns: &[&str], extra: Value, fill: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(&path, e))?;

        let mut meta = json!({
            "file": name,
            "columns": columns,
            "tool": "optowig",
            "version": VERSION,
            "command": self.settings.command.name(),
            "preset": self.preset_json(),
            "config": self.settings.resolved,
            "system": self.settings.params,
            "rerun": format!("optowig {} --config {CONFIG_FILE}", self.settings.command.name()),
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
            m.extend(e);
        }
        self.json(&format!("{name}.json"), &meta)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| io_failure(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))
    }

    pub fn report(
        &self,
        metrics: &Metrics,
        diagnostics: &Diagnostics,
        partial: Option<bool>,
        failures: Option<&[Value]>,
    ) -> Result<(), Failure> {
        let r = Report {
            command: self.settings.command.name(),
            version: VERSION,
            preset: self.preset_json(),
            params: &self.settings.resolved,
            metrics,
            diagnostics,
            partial,
            failures,
        };
        self.json("report.json", &r)
    }

    /// Everything a single-point run produces.
    pub fn single(&self, o: &Outcome) -> Result<(), Failure> {
        if let Some(w) = &o.artifacts.wigner {
            let extra = json!({ "grid": w.grid, "quadrature": o.diagnostics.quadrature });
            self.csv("wigner.csv", &["X", "P", "W"], extra, |f| {
                w.write_csv(f).map_err(|e| std::io::Error::other(e.to_string()))
            })?;
        }
        if let Some(pop) = &o.artifacts.populations {
            let extra = json!({ "truncation": o.diagnostics.truncation });
            self.csv("populations.csv", &["n", "P_n"], extra, |f| {
                pop.write_csv(f).map_err(|e| std::io::Error::other(e.to_string()))
            })?;
        }
        if let Some(v) = &o.artifacts.fidelity {
            let extra = json!({ "steps_per_period": v.steps_per_period, "max_trace_drift": v.max_trace_drift });
            self.csv("fidelity.csv", &["period", "fidelity"], extra, |f| {
                writeln!(f, "period,fidelity")?;
                for (k, x) in v.fidelity.iter().enumerate() {
                    writeln!(f, "{k},{x:.16e}")?;
                }
                Ok(())
            })?;
        }
        self.report(&o.metrics, &o.diagnostics, None, None)
    }
}

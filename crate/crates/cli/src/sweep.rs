//! Parameter sweeps over one or two axes.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{evaluate, Diagnostics, Failure, Metrics};
use crate::config::{Command, Layer, Settings};
use crate::output::Sink;

pub struct Point {
    pub coords: Vec<f64>,
    pub result: Result<Metrics, Failure>,
}

/// Axis-ordered points, the first axis varying slowest.
pub fn points(s: &Settings) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in &s.axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values().into_iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Settings for one point: the fixed keys plus the swept values.
fn point_settings(s: &Settings, base: &Layer, coords: &[f64]) -> Result<Settings, Failure> {
    let inner = s.inner.expect("sweep settings carry an inner command");
    let mut layer = Layer { values: base.values.clone(), axes: Vec::new() };
    layer.values.remove("command");
    for (axis, v) in s.axes.iter().zip(coords) {
        layer.set(&axis.name, format!("{v:?}"));
    }
    Ok(Settings::parse(inner, &layer)?)
}

/// Runs every point on the rayon pool; results come back in axis order.
pub fn evaluate_all(s: &Settings, base: &Layer) -> Vec<Point> {
    points(s)
        .into_par_iter()
        .map(|coords| {
            let result = point_settings(s, base, &coords).and_then(|ps| evaluate(&ps)).map(|o| o.metrics);
            Point { coords, result }
        })
        .collect()
}

fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn run(s: &Settings, base: &Layer, sink: &Sink) -> Result<(), Failure> {
    let start = Instant::now();
    let results = evaluate_all(s, base);
    let inner = s.inner.expect("sweep settings carry an inner command");

    let mut columns: Vec<&str> = s.axes.iter().map(|a| a.name.as_str()).collect();
    columns.extend(["delta", "min_w", "min_x", "min_p"]);
    let with_witness = inner == Command::Steady;
    let with_depth = inner == Command::Depth;
    if with_witness {
        columns.push("witness");
    }
    if with_depth {
        columns.push("tau_inf");
    }

    let mut failures = Vec::new();
    let mut worst = None;
    for p in &results {
        if let Err(f) = &p.result {
            failures.push(json!({ "point": p.coords, "exit_code": f.exit_code(), "error": f.message() }));
            worst = worst.max(Some(f.exit_code()));
        }
    }
    let partial = !failures.is_empty();

    let header = columns.join(",");
    sink.csv("sweep.csv", &columns, json!({ "partial": partial, "points": results.len() }), |f| {
        writeln!(f, "{header}")?;
        for p in &results {
            let Ok(m) = &p.result else { continue };
            let mut row: Vec<String> = p.coords.iter().map(|&c| field(Some(c))).collect();
            row.extend([field(m.delta), field(m.min_w), field(m.min_x), field(m.min_p)]);
            if with_witness {
                row.push(field(m.witness));
            }
            if with_depth {
                row.push(field(m.tau_inf));
            }
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    })?;

    let diagnostics = Diagnostics {
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        notes: vec![format!("{} of {} points succeeded", results.len() - failures.len(), results.len())],
        ..Default::default()
    };
    sink.report(&Metrics::default(), &diagnostics, Some(partial), partial.then_some(failures.as_slice()))?;

    match worst {
        None => Ok(()),
        Some(code) => {
            let msg = format!("{} sweep point(s) failed; partial results written", failures.len());
            let first: Vec<&Value> = failures.iter().take(1).collect();
            let detail = first.first().and_then(|v| v["error"].as_str()).unwrap_or_default().to_string();
            let msg = format!("{msg} (first: {detail})");
            Err(if code == 2 { Failure::Config(msg) } else { Failure::Numerical(msg) })
        }
    }
}

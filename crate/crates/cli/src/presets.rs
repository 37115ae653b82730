//! Named parameter sets.
//!
//! Single-state presets use the `paper-repro` grid. Sweep ranges are
//! chosen to run in minutes.

use crate::config::{AxisSpec, Command, ConfigError, Layer};

pub struct Preset {
    pub name: &'static str,
    pub command: Command,
    pub values: &'static [(&'static str, &'static str)],
    pub axes: &'static [(&'static str, f64, f64, usize)],
    /// Reference negative volume, where one is known.
    pub expected_delta: Option<f64>,
}

const SQUEEZED_M: (&str, &str) = ("r_m", "0.691");
const REPRO: (&str, &str) = ("grid", "paper-repro");

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("detuning", "0"), ("g0_over_kappa", "2"), REPRO],
        axes: &[],
        expected_delta: Some(0.016),
    },
    Preset {
        name: "fig1b",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("detuning", "0"), ("g0_over_kappa", "1"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.016),
    },
    Preset {
        name: "fig1c",
        command: Command::Pulsed,
        values: &[
            ("input", "squeezed-vacuum"),
            ("r_l", "0.691"),
            ("detuning", "0"),
            ("g0_over_kappa", "0.5"),
            SQUEEZED_M,
            REPRO,
        ],
        axes: &[],
        expected_delta: Some(0.016),
    },
    Preset {
        name: "fig1d",
        command: Command::Sweep,
        values: &[("command", "pulsed"), ("alpha", "2")],
        axes: &[("g0_over_kappa", 0.2, 2.0, 10), ("detuning", 0.0, 3.0, 7)],
        expected_delta: None,
    },
    Preset {
        name: "fig1e",
        command: Command::Sweep,
        values: &[("command", "pulsed"), ("input", "squeezed-vacuum"), ("r_l", "0.691"), ("detuning", "0")],
        axes: &[("g0_over_kappa", 0.1, 1.5, 8), ("r_m", 0.0, 1.0, 6)],
        expected_delta: None,
    },
    Preset {
        name: "fig1f",
        command: Command::Sweep,
        values: &[("command", "pulsed"), ("alpha", "2"), ("detuning", "0")],
        axes: &[("g0_over_kappa", 0.5, 3.0, 6), ("n_bar", 0.0, 1.0, 6)],
        expected_delta: None,
    },
    Preset {
        name: "fig2-inset",
        command: Command::PhotonCount,
        values: &[("n", "1"), ("alpha", "2"), ("detuning", "0"), ("g0_over_kappa", "1"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.39),
    },
    Preset {
        name: "fig3a",
        command: Command::Steady,
        values: &[
            ("g0_over_kappa", "5"),
            ("k", "0.05"),
            ("n_bath", "0"),
            ("gamma", "1e-3"),
            ("omega_m", "1e5"),
        ],
        axes: &[],
        expected_delta: None,
    },
    Preset {
        name: "figS1a",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "0.8"), ("detuning", "0"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.00648),
    },
    Preset {
        name: "figS1b",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "0.8"), ("detuning", "1.5"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.01190),
    },
    Preset {
        name: "figS1c",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "0.8"), ("detuning", "3"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.02091),
    },
    Preset {
        name: "figS1d",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "1.8"), ("detuning", "0"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.09507),
    },
    Preset {
        name: "figS1e",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "1.8"), ("detuning", "1.5"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.09602),
    },
    Preset {
        name: "figS1f",
        command: Command::Pulsed,
        values: &[("alpha", "2"), ("g0_over_kappa", "1.8"), ("detuning", "3"), SQUEEZED_M, REPRO],
        axes: &[],
        expected_delta: Some(0.09790),
    },
    Preset {
        name: "figS2",
        command: Command::Sweep,
        values: &[("command", "depth"), ("alpha", "2"), ("detuning", "0"), ("n_bar", "0"), SQUEEZED_M],
        axes: &[("g0_over_kappa", 0.5, 2.0, 7)],
        expected_delta: None,
    },
    Preset {
        name: "figS3",
        command: Command::ValidateRwa,
        values: &[
            ("g0_over_kappa", "3"),
            ("k", "0.1"),
            ("n_bath", "0"),
            ("gamma", "1e-3"),
            ("omega_m", "1e5"),
            ("truncation", "100"),
            ("periods", "100"),
        ],
        axes: &[],
        expected_delta: None,
    },
    Preset {
        name: "figS4a",
        command: Command::Sweep,
        values: &[("command", "steady"), ("n_bath", "0"), ("gamma", "1e-3"), ("omega_m", "1e5")],
        axes: &[("g0_over_kappa", 1.0, 6.0, 11), ("k", 0.02, 0.2, 4)],
        expected_delta: None,
    },
    Preset {
        name: "figS4b",
        command: Command::Sweep,
        values: &[("command", "steady"), ("k", "0.1"), ("gamma", "1e-3"), ("omega_m", "1e5")],
        axes: &[("g0_over_kappa", 1.0, 6.0, 11), ("n_bath", 0.0, 2.0, 5)],
        expected_delta: None,
    },
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn find(name: &str) -> Result<&'static Preset, ConfigError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        ConfigError(format!(
            "unknown preset `{name}`; valid presets are default, paper-repro, {}",
            names().join(", ")
        ))
    })
}

impl Preset {
    pub fn layer(&self) -> Layer {
        let mut l = Layer::default();
        for (k, v) in self.values {
            l.set(k, *v);
        }
        l.axes = self
            .axes
            .iter()
            .map(|&(name, min, max, count)| AxisSpec { name: name.into(), min, max, count })
            .collect();
        l
    }
}

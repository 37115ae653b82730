mod commands;
mod config;
mod output;
mod presets;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches};
use optowig_core::{GridPreset, VERSION};

use commands::Failure;
use config::{AxisSpec, Command, ConfigError, Layer, Settings};
use output::Sink;

const DEFAULT_OUT: &str = "optowig-out";

/// Every settable key, with its help line.
const FLAGS: &[(&str, &str)] = &[
    ("g0_over_kappa", "single-photon coupling over cavity linewidth"),
    ("detuning", "normalised optical detuning"),
    ("omega_m", "mechanical frequency / 2π in Hz (steady, validate-rwa)"),
    ("gamma", "mechanical damping / 2π in Hz (steady, validate-rwa)"),
    ("n_bath", "thermal occupation of the mechanical bath"),
    ("k", "photon flux parameter in 1/s"),
    ("k2", "second flux parameter in 1/s (only 0 is supported)"),
    ("alpha", "coherent pulse amplitude"),
    ("r_l", "optical squeezing parameter"),
    ("theta", "optical squeezing angle"),
    ("n", "detected photon number"),
    ("eta", "detection efficiency"),
    ("n_bar", "initial mechanical thermal occupation"),
    ("r_m", "initial mechanical momentum squeezing"),
    ("input", "optical input: coherent | squeezed-vacuum"),
    ("kernel", "state analysed by depth: deterministic | photon-count"),
    ("grid", "grid preset: default | paper-repro"),
    ("x_min", "explicit grid bound"),
    ("x_max", "explicit grid bound"),
    ("p_min", "explicit grid bound"),
    ("p_max", "explicit grid bound"),
    ("nx", "explicit grid points along X"),
    ("np", "explicit grid points along P"),
    ("nodes", "fixed quadrature node count"),
    ("cutoff", "quadrature half-width in units of the state width"),
    ("truncation", "highest retained Fock level"),
    ("tail_tolerance", "largest population allowed in the top two levels"),
    ("witness_levels", "odd levels summed by the witness"),
    ("periods", "mechanical periods to propagate"),
    ("steps_per_period", "RK4 steps per mechanical period"),
    ("steady_points", "grid points per axis for the steady-state Wigner function"),
    ("command", "pipeline evaluated at each sweep point"),
    ("out", "output directory"),
    ("threads", "worker threads (0 = all cores)"),
    ("preset", "figure preset or grid preset name"),
];

fn about(c: Command) -> &'static str {
    match c {
        Command::Pulsed => "Mechanical Wigner function after one pulse",
        Command::PhotonCount => "Wigner function conditioned on detecting n photons",
        Command::Baseline => "Same pulse through a linear phase shifter, for comparison",
        Command::Depth => "Nonclassical depth of a pulsed state",
        Command::Steady => "Steady state under continuous drive",
        Command::ValidateRwa => "Check the rotating-wave steady state against full propagation",
        Command::Sweep => "Evaluate a pipeline over one or two parameter axes",
    }
}

fn cli() -> clap::Command {
    let mut app = clap::Command::new("optowig")
        .version(VERSION)
        .about("Mechanical Wigner negativity from nonlinear cavity optomechanics")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in Command::ALL {
        let mut sub = clap::Command::new(c.name()).about(about(c)).arg(
            Arg::new("config").long("config").value_name("FILE").help("key = value file; flags override it"),
        );
        for (key, help) in FLAGS {
            sub = sub.arg(
                Arg::new(*key)
                    .long(key.replace('_', "-"))
                    .value_name("VALUE")
                    .allow_negative_numbers(true)
                    .help(*help),
            );
        }
        sub = sub.arg(
            Arg::new("axis")
                .long("axis")
                .num_args(4)
                .value_names(["NAME", "MIN", "MAX", "COUNT"])
                .action(ArgAction::Append)
                .allow_negative_numbers(true)
                .help("sweep axis; give up to two"),
        );
        app = app.subcommand(sub);
    }
    app.subcommand(clap::Command::new("presets").about("List figure presets"))
}

fn flag_layer(m: &ArgMatches) -> Result<Layer, ConfigError> {
    let mut l = Layer::default();
    for (key, _) in FLAGS {
        if let Some(v) = m.get_one::<String>(key) {
            l.set(key, v.clone());
        }
    }
    if let Some(groups) = m.get_occurrences::<String>("axis") {
        for g in groups {
            let words: Vec<&str> = g.map(String::as_str).collect();
            l.axes.push(AxisSpec::parse(&words)?);
        }
    }
    Ok(l)
}

fn list_presets() {
    for p in presets::PRESETS {
        let values: Vec<String> = p.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let axes: Vec<String> = p.axes.iter().map(|a| format!("{} {}..{} x{}", a.0, a.1, a.2, a.3)).collect();
        let mut line = format!("{:<11} {:<13} {}", p.name, p.command.name(), values.join(" "));
        if !axes.is_empty() {
            line.push_str(&format!(" | axes: {}", axes.join(", ")));
        }
        println!("{line}");
    }
}

fn run(command: Command, m: &ArgMatches) -> Result<(), Failure> {
    let flags = flag_layer(m)?;
    let file = match m.get_one::<String>("config") {
        Some(path) => Layer::read_file(&PathBuf::from(path))?,
        None => Layer::default(),
    };

    let mut layer = Layer::default();
    let preset_name = flags.values.get("preset").or(file.values.get("preset")).cloned();
    let mut preset = None;
    if let Some(name) = preset_name {
        if GridPreset::from_name(&name).is_some() {
            layer.set("grid", name);
        } else {
            let p = presets::find(&name)?;
            if p.command != command {
                return Err(ConfigError(format!("preset `{name}` runs with `optowig {}`", p.command.name())).into());
            }
            layer = p.layer();
            preset = Some(p);
        }
    }
    layer.overlay(&file);
    layer.overlay(&flags);

    let out = layer.values.remove("out").unwrap_or_else(|| DEFAULT_OUT.into());
    layer.values.remove("preset");
    if let Some(t) = layer.values.remove("threads") {
        let n: usize = t
            .parse()
            .map_err(|_| ConfigError(format!("field `threads`: `{t}` is not a non-negative integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot start {n} threads: {e}")))?;
    }

    let settings = Settings::parse(command, &layer)?;
    let sink = Sink::create(PathBuf::from(out), &settings, preset)?;
    if command == Command::Sweep {
        return sweep::run(&settings, &layer, &sink);
    }
    let outcome = commands::evaluate(&settings)?;
    sink.single(&outcome)?;
    let m = &outcome.metrics;
    let show = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    println!(
        "{}: delta={} min_w={} at ({}, {}) witness={} tau_inf={}",
        command.name(),
        show(m.delta),
        m.min_w.map(|x| format!("{x:.4e}")).unwrap_or_else(|| "-".into()),
        show(m.min_x),
        show(m.min_p),
        show(m.witness),
        show(m.tau_inf),
    );
    if let Some(f) = m.min_fidelity {
        println!("min fidelity {f:.9}");
    }
    for note in &outcome.diagnostics.notes {
        eprintln!("note: {note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    if name == "presets" {
        list_presets();
        return ExitCode::SUCCESS;
    }
    let command = Command::from_name(name).expect("subcommands mirror Command::ALL");
    match run(command, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

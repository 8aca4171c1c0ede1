use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ripplemod::analysis::{
    compare_runs, parse_range, psd, run_metrics, sweep_modulation_index, LossModel, RunData, RunMetrics, SweepTable,
    Window, ANALYSIS_SEGMENTS,
};
use ripplemod::io::{self as rio, ConfigError, LinePlot, Series};
use ripplemod::AnalysisError;
use ripplemod_core::cellmodel::{ImpedanceModel, ReducedFilterParams};
use ripplemod_core::sim::{module_parameters, run_scenario, RunSummary, ScenarioConfig, SchedulerKind, Trace};
use ripplemod_core::topology::{enumerate_string_states, ShareTable};

const EXIT_CONFIG: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "ripplemod", version, about = "Reconfigurable battery string simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace, event log and report.
    Simulate {
        config: PathBuf,
        #[arg(short, long, env = "RIPPLEMOD_OUT", default_value = "out")]
        out: PathBuf,
        /// Skip the CSV copy of the trace.
        #[arg(long)]
        no_csv: bool,
    },
    /// Compare battery loss of both schedulers over a range of modulation indices.
    Sweep {
        /// Inclusive `start:stop:step` range.
        #[arg(long = "m", default_value = "0.3:0.95:0.05")]
        range: String,
        /// Template scenario; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModelArg::Randles)]
        model: ModelArg,
        #[arg(short, long, env = "RIPPLEMOD_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Power spectral density of one module current from a saved trace.
    Spectrum {
        trace: PathBuf,
        #[arg(long, default_value_t = 0)]
        module: usize,
        #[arg(long, default_value_t = ANALYSIS_SEGMENTS)]
        segments: usize,
        #[arg(short, long, env = "RIPPLEMOD_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Compare two simulate output directories.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long, env = "RIPPLEMOD_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Export the cell impedance profile of the configured battery.
    Impedance {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Module whose parameters to use.
        #[arg(long, default_value_t = 0)]
        module: usize,
        #[arg(long, value_enum, default_value_t = ModelArg::Randles)]
        model: ModelArg,
        #[arg(long, default_value_t = 1e-3)]
        from: f64,
        #[arg(long, default_value_t = 1e6)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        per_decade: usize,
        #[arg(short, long, env = "RIPPLEMOD_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Print the enumerated state space as CSV.
    States {
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Add the current share of every module, solved at the reference current.
        #[arg(long)]
        shares: bool,
        /// Module parameters for the share table.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        current: f64,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Randles,
    Reduced,
}

impl From<ModelArg> for LossModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Randles => LossModel::Randles,
            ModelArg::Reduced => LossModel::Reduced,
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    scheduler: SchedulerKind,
    summary: &'a RunSummary,
    metrics: Option<&'a RunMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics_error: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<ConfigError>() {
            return EXIT_CONFIG;
        }
        if let Some(ripplemod_core::Error::Config { .. } | ripplemod_core::Error::ModuleCount(..)) = cause.downcast_ref() {
            return EXIT_CONFIG;
        }
        if let Some(AnalysisError::ConfigMismatch(_)) = cause.downcast_ref() {
            return EXIT_CONFIG;
        }
    }
    EXIT_RUNTIME
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, no_csv } => simulate(&config, &out, !no_csv),
        Command::Sweep { range, config, model, out } => sweep(&range, config.as_deref(), model.into(), &out),
        Command::Spectrum { trace, module, segments, out } => spectrum(&trace, module, segments, &out),
        Command::Compare { a, b, out } => compare(&a, &b, &out),
        Command::Impedance {
            config,
            module,
            model,
            from,
            to,
            per_decade,
            out,
        } => impedance(config.as_deref(), module, model, (from, to, per_decade), &out),
        Command::States { n, shares, config, current, out } => states(n, shares, config.as_deref(), current, out.as_deref()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn template(path: Option<&Path>) -> Result<ScenarioConfig> {
    Ok(match path {
        Some(p) => rio::load_config(p)?,
        None => ScenarioConfig::default(),
    })
}

fn simulate(config_path: &Path, out: &Path, csv: bool) -> Result<()> {
    let config = rio::load_config(config_path)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let (trace, summary) = run_scenario(&config).context("simulation failed")?;

    fs::write(out.join("config.toml"), rio::to_toml(&config))?;
    rio::write_trace_binary(create(&out.join("trace.bin"))?, &trace)?;
    if csv {
        rio::write_trace_csv(create(&out.join("trace.csv"))?, &trace)?;
    }
    rio::write_events(create(&out.join("events.jsonl"))?, &trace.events)?;

    let run = RunData {
        config: &config,
        trace: &trace,
        batteries: &summary.initial_batteries,
    };
    let metrics = run_metrics(run, 0.5 / config.meas_period);
    let report = RunReport {
        scheduler: config.scheduler,
        summary: &summary,
        metrics: metrics.as_ref().ok(),
        metrics_error: metrics.as_ref().err().map(|e| e.to_string()),
    };
    serde_json::to_writer_pretty(create(&out.join("report.json"))?, &report)?;
    fs::write(out.join("report.txt"), run_text(&config, &summary, metrics.as_ref().ok()))?;
    if let Err(e) = &metrics {
        eprintln!("warning: spectral metrics skipped: {e}");
    }
    println!("{} ticks written to {}", summary.ticks, out.display());
    Ok(())
}

fn run_text(config: &ScenarioConfig, summary: &RunSummary, metrics: Option<&RunMetrics>) -> String {
    let mut s = format!(
        "scheduler          {}\nmodules            {}\nmodulation index   {}\nticks              {}\n\
         table updates      {}\nobserver rebuilds  {}\nclamp events       {}\nrelaxations        {}\n\
         saturations        {}\nsoc clamps         {}\n",
        config.scheduler.as_str(),
        config.modules,
        config.modulation_index,
        summary.ticks,
        summary.table_updates,
        summary.observer_rebuilds,
        summary.clamp_events,
        summary.relaxations,
        summary.saturations,
        summary.soc_clamps,
    );
    if let Some(m) = metrics {
        s += &format!(
            "sub-100 Hz energy  {:.4e} A^2\ncentroid           {:.1} Hz\npulsation          {:.1} dB\n\
             comb present       {}\npattern ratio      {:.2}\nbattery loss       {:.4} W\n",
            m.sub100_energy,
            m.centroid,
            m.pulsation_db,
            m.comb.present,
            m.mean_pattern_ratio(),
            m.loss_total
        );
    }
    s
}

fn sweep(range: &str, config: Option<&Path>, model: LossModel, out: &Path) -> Result<()> {
    let indices = parse_range(range)?;
    let template = template(config)?;
    let table = sweep_modulation_index(&template, &indices, model)?;

    fs::create_dir_all(out)?;
    for row in &table.rows {
        let dir = out.join(format!("m{:.3}_{}", row.modulation_index, row.scheduler.as_str()));
        fs::create_dir_all(&dir)?;
        let cfg = ScenarioConfig {
            modulation_index: row.modulation_index,
            scheduler: row.scheduler,
            ..template.clone()
        };
        fs::write(dir.join("config.toml"), rio::to_toml(&cfg))?;
        fs::write(dir.join("row.json"), serde_json::to_vec_pretty(row)?)?;
    }

    let mut csv = Vec::new();
    rio::write_sweep_csv(&mut csv, &table)?;
    rio::write_atomic(&out.join("sweep.json"), &serde_json::to_vec_pretty(&table)?)?;
    rio::write_atomic(&out.join("sweep.svg"), sweep_plot(&table).as_bytes())?;
    rio::write_atomic(&out.join("sweep.csv"), &csv)?;
    io::stdout().write_all(&csv)?;
    Ok(())
}

fn sweep_plot(table: &SweepTable) -> String {
    let series = [SchedulerKind::Reference, SchedulerKind::Proposed]
        .into_iter()
        .map(|s| Series {
            label: s.as_str().into(),
            points: table
                .rows
                .iter()
                .filter(|r| r.scheduler == s)
                .map(|r| (r.modulation_index, r.mean_loss))
                .collect(),
        })
        .collect();
    LinePlot {
        title: "Mean battery loss per module".into(),
        x_label: "modulation index".into(),
        y_label: "loss [W]".into(),
        series,
        ..Default::default()
    }
    .to_svg()
}

fn spectrum(trace_path: &Path, module: usize, segments: usize, out: &Path) -> Result<()> {
    let trace = rio::read_trace(trace_path).with_context(|| format!("cannot read {}", trace_path.display()))?;
    if module >= trace.modules {
        bail!(ConfigError::Invalid {
            field: "module".into(),
            reason: format!("trace has {} modules", trace.modules),
        });
    }
    let p = psd(&trace.module_current(module), trace.tick_rate, Window::Hann, segments)?;
    fs::create_dir_all(out)?;
    rio::write_psd_csv(create(&out.join("psd.csv"))?, &p)?;
    let plot = LinePlot {
        title: format!("Module {module} current PSD"),
        x_label: "frequency [Hz]".into(),
        y_label: "PSD [A^2/Hz]".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: format!("module {module}"),
            points: p.frequencies.iter().copied().zip(p.density.iter().copied()).collect(),
        }],
    };
    fs::write(out.join("psd.svg"), plot.to_svg())?;
    println!("{} bins written to {}", p.frequencies.len(), out.display());
    Ok(())
}

fn load_run(dir: &Path) -> Result<(ScenarioConfig, Trace)> {
    let config = rio::load_config(&dir.join("config.toml"))?;
    let bin = dir.join("trace.bin");
    let path = if bin.exists() { bin } else { dir.join("trace.csv") };
    let trace = rio::read_trace(&path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok((config, trace))
}

fn compare(a: &Path, b: &Path, out: &Path) -> Result<()> {
    let (ca, ta) = load_run(a)?;
    let (cb, tb) = load_run(b)?;
    let ba = module_parameters(&ca);
    let bb = module_parameters(&cb);
    let report = compare_runs(
        RunData { config: &ca, trace: &ta, batteries: &ba },
        RunData { config: &cb, trace: &tb, batteries: &bb },
    )?;
    fs::create_dir_all(out)?;
    serde_json::to_writer_pretty(create(&out.join("compare.json"))?, &report)?;
    let text = report.to_text();
    fs::write(out.join("compare.txt"), &text)?;
    let series = [(&report.a, "A"), (&report.b, "B")]
        .into_iter()
        .map(|(m, tag)| Series {
            label: format!("{tag} {}", m.scheduler.as_str()),
            points: m
                .spectrum
                .frequencies
                .iter()
                .copied()
                .zip(m.spectrum.density.iter().copied())
                .collect(),
        })
        .collect();
    let plot = LinePlot {
        title: "Module current PSD, mean over modules".into(),
        x_label: "frequency [Hz]".into(),
        y_label: "PSD [A^2/Hz]".into(),
        log_x: true,
        log_y: true,
        series,
    };
    fs::write(out.join("compare.svg"), plot.to_svg())?;
    print!("{text}");
    Ok(())
}

fn impedance(
    config: Option<&Path>,
    module: usize,
    model: ModelArg,
    (from, to, per_decade): (f64, f64, usize),
    out: &Path,
) -> Result<()> {
    if !(from > 0.0 && to > from && per_decade > 0) {
        bail!(ConfigError::Invalid {
            field: "from/to/per_decade".into(),
            reason: "need 0 < from < to and a positive point density".into(),
        });
    }
    let cfg = template(config)?;
    let batteries = module_parameters(&cfg);
    let battery = batteries.get(module).ok_or_else(|| ConfigError::Invalid {
        field: "module".into(),
        reason: format!("config has {} modules", batteries.len()),
    })?;
    let points = ((to / from).log10() * per_decade as f64).round() as usize;
    let frequencies: Vec<f64> = (0..=points)
        .map(|k| from * 10f64.powf(k as f64 / per_decade as f64))
        .collect();
    let randles = battery.randles;
    let reduced = ReducedFilterParams::from_randles(&randles);
    let z: &dyn ImpedanceModel = match model {
        ModelArg::Randles => &randles,
        ModelArg::Reduced => &reduced,
    };
    fs::create_dir_all(out)?;
    rio::write_impedance_csv(create(&out.join("impedance.csv"))?, z, &frequencies)?;
    let magnitude = frequencies
        .iter()
        .map(|&f| Ok((f, z.impedance(f)?.norm())))
        .collect::<ripplemod_core::Result<Vec<_>>>()?;
    let plot = LinePlot {
        title: "Cell impedance magnitude".into(),
        x_label: "frequency [Hz]".into(),
        y_label: "|Z| [ohm]".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: format!("module {module}"),
            points: magnitude,
        }],
    };
    fs::write(out.join("impedance.svg"), plot.to_svg())?;
    println!("{} points written to {}", frequencies.len(), out.display());
    Ok(())
}

fn states(n: usize, shares: bool, config: Option<&Path>, current: f64, out: Option<&Path>) -> Result<()> {
    let space = enumerate_string_states(n, None)?;
    let table = if shares {
        let mut cfg = template(config)?;
        cfg.modules = n;
        if !cfg.module.is_empty() && cfg.module.len() != n {
            bail!(ConfigError::Invalid {
                field: "module".into(),
                reason: format!("config lists {} modules but --n is {n}", cfg.module.len()),
            });
        }
        let electrical = module_parameters(&cfg)
            .iter()
            .map(|b| b.electrical())
            .collect::<ripplemod_core::Result<Vec<_>>>()?;
        Some(ShareTable::build(&space, &electrical, current)?)
    } else {
        None
    };
    match out {
        Some(path) => rio::write_states_csv(create(path)?, &space, table.as_ref())?,
        None => rio::write_states_csv(io::stdout().lock(), &space, table.as_ref())?,
    }
    Ok(())
}

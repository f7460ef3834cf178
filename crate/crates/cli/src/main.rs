//! `phonon-dd`: runs the built-in decoupling experiments, sweeps and pulse
//! designs, and writes CSV results.
//!
//! Exit status: 0 when every checked result is within tolerance, 1 when one
//! is not, 2 on configuration or propagation errors.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use phonon_dd::chain::fifty_fifty_time;
use phonon_dd::pulse::ShapedPulse;
use phonon_dd::scenario::{
    catalog, emit_report, find_scenario, parse_config, run_scenario, sweep, write_results_csv, ResultRecord,
    ScenarioConfig, ScenarioRun, SweepAxis, SweepRow,
};
use phonon_dd::trap::TrapParams;

#[derive(Parser)]
#[command(name = "phonon-dd", version, about = "Phonon-hopping decoupling experiments")]
struct Cli {
    /// Directory for CSV output
    #[arg(long, global = true, env = "PHONON_DD_OUT", default_value = "phonon-dd-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run built-in scenarios or scenario files
    Run {
        /// Scenario names, config files, or `all`
        #[arg(required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run one scenario over a range of one parameter
    Sweep {
        /// Scenario name or config file
        target: String,
        /// n_r, d (µm), T_P (µs) or n_max
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// List the built-in scenarios
    Catalog,
    /// Run scenarios and compare them with the stored reference errors
    Report {
        /// Scenario names or config files; all built-ins when empty
        targets: Vec<String>,
    },
    /// Trap-modulation pulses
    Pulse {
        #[command(subcommand)]
        command: PulseCommand,
    },
}

#[derive(Args)]
struct Overrides {
    /// Fixed Fock cutoff (turns off the convergence loop)
    #[arg(long)]
    cutoff: Option<usize>,
    /// Write every basis state to the populations CSV
    #[arg(long)]
    full_dump: bool,
    /// Print the schedule as well
    #[arg(long)]
    show_schedule: bool,
}

#[derive(Subcommand)]
enum PulseCommand {
    /// Solve for the strength giving a target phase and export the waveform
    Design(DesignArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    tp_us: f64,
    #[arg(long)]
    tud_us: f64,
    #[arg(long, default_value_t = 6.0)]
    sigma: f64,
    #[arg(long, default_value_t = 2.2)]
    omega0_mhz: f64,
    /// Phase in rad
    #[arg(long, default_value_t = std::f64::consts::PI)]
    target_phase: f64,
    /// CSV file for the sampled waveform
    #[arg(long)]
    export: Option<PathBuf>,
    /// Add U0/V0 columns for a trap with this RF drive frequency
    #[arg(long)]
    trap_rf_mhz: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    trap_r0_mm: f64,
    #[arg(long, default_value_t = 0.5)]
    trap_axial_mhz: f64,
}

fn load(target: &str) -> anyhow::Result<ScenarioConfig> {
    if let Some(c) = find_scenario(target) {
        return Ok(c);
    }
    let path = Path::new(target);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_config(&text).with_context(|| format!("in {}", path.display()));
    }
    bail!("`{target}` is neither a built-in scenario nor a file (try `phonon-dd catalog`)")
}

fn load_all(targets: &[String]) -> anyhow::Result<Vec<ScenarioConfig>> {
    if targets.is_empty() || targets.iter().any(|t| t == "all") {
        return Ok(catalog());
    }
    targets.iter().map(|t| load(t)).collect()
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn append_results(dir: &Path, record: &ResultRecord) -> anyhow::Result<()> {
    let path = dir.join("results.csv");
    let fresh = !path.exists();
    let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
    if fresh {
        writeln!(f, "{}", ResultRecord::CSV_HEADER)?;
    }
    writeln!(f, "{}", record.csv_row())?;
    Ok(())
}

fn write_run(dir: &Path, run: &ScenarioRun) -> anyhow::Result<()> {
    let name = &run.config.name;
    let mut pops = create(dir, &format!("{name}_populations.csv"))?;
    run.write_populations_csv(&mut pops)?;
    pops.flush()?;
    let mut sched = create(dir, &format!("{name}_schedule.txt"))?;
    sched.write_all(run.schedule.to_text().as_bytes())?;
    sched.flush()?;
    append_results(dir, &run.record)
}

fn print_record(run: &ScenarioRun) {
    let r = &run.record;
    let metric = match r.error_eb {
        Some(eb) => format!("<E_B> = {eb:.3e}  (<E> = {:.3e})", r.error_e),
        None => format!("<E> = {:.3e}", r.error_e),
    };
    let history: Vec<String> = r.cutoff_history.iter().map(|(c, e)| format!("{c}:{e:.3e}")).collect();
    println!(
        "{:<8} {metric}  n_max {}{}  drift {:.1e}  leakage {:.1e}{}  [{}]  {:.1}s",
        r.scenario,
        r.cutoff,
        if r.converged { "" } else { " (not converged)" },
        r.norm_drift,
        r.boundary_leakage,
        if r.leakage_exceeded { " (over limit)" } else { "" },
        history.join(" "),
        r.wall_time.as_secs_f64()
    );
}

/// Exit status from the report verdicts.
fn verdict_code(records: &[ResultRecord]) -> anyhow::Result<ExitCode> {
    let report = emit_report(records)?;
    print!("\n{}", report.to_table());
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_run(out: &Path, targets: &[String], o: &Overrides) -> anyhow::Result<ExitCode> {
    let mut records = Vec::new();
    for mut config in load_all(targets)? {
        if let Some(c) = o.cutoff {
            config.cutoff = c;
            config.max_cutoff = c;
            config.converge = false;
        }
        config.full_dump |= o.full_dump;
        let run = run_scenario(&config)?;
        if o.show_schedule {
            print!("{}", run.schedule.to_text());
        }
        print_record(&run);
        write_run(out, &run)?;
        records.push(run.record);
    }
    verdict_code(&records)
}

fn cmd_sweep(out: &Path, target: &str, axis: &str, values: &[f64]) -> anyhow::Result<ExitCode> {
    let base = load(target)?;
    let axis: SweepAxis = axis.parse()?;
    let rows = sweep(&base, axis, values)?;
    let mut w = create(out, &format!("{}_sweep_{axis}.csv", base.name))?;
    writeln!(w, "{}", SweepRow::CSV_HEADER)?;
    let mut failed = false;
    for row in &rows {
        writeln!(w, "{}", row.csv_row())?;
        match &row.outcome {
            Ok(r) => println!(
                "{axis} = {:<8} error {:.3e}  n_max {}",
                row.value,
                r.headline(),
                r.cutoff
            ),
            Err(e) => {
                failed = true;
                println!("{axis} = {:<8} failed: {e}", row.value);
            }
        }
    }
    w.flush()?;
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_catalog() -> anyhow::Result<ExitCode> {
    println!(
        "{:<8} {:>2} {:>7} {:>9} {:>8} {:>4}  description",
        "name", "M", "d[um]", "k/2pi[Hz]", "T[us]", "n_r"
    );
    for c in catalog() {
        let kappa = c.coupling_rate()?;
        println!(
            "{:<8} {:>2} {:>7.1} {:>9.1} {:>8.2} {:>4}  {}",
            c.name,
            c.mode_count,
            c.spacing * 1e6,
            kappa / (2.0 * std::f64::consts::PI),
            fifty_fifty_time(kappa) * 1e6,
            c.repetitions,
            c.description
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(out: &Path, targets: &[String]) -> anyhow::Result<ExitCode> {
    let mut records = Vec::new();
    for config in load_all(targets)? {
        let run = run_scenario(&config)?;
        print_record(&run);
        records.push(run.record);
    }
    let mut w = create(out, "results.csv")?;
    write_results_csv(&records, &mut w)?;
    w.flush()?;
    let report = emit_report(&records)?;
    let mut r = create(out, "report.csv")?;
    r.write_all(report.to_csv().as_bytes())?;
    r.flush()?;
    print!("\n{}", report.to_table());
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_design(a: &DesignArgs) -> anyhow::Result<ExitCode> {
    use std::f64::consts::PI;
    let w0 = 2.0 * PI * a.omega0_mhz * 1e6;
    let pulse = ShapedPulse::design(a.tp_us * 1e-6, a.tud_us * 1e-6, a.sigma, w0, a.target_phase)?;
    println!("k                 {:.6}", pulse.params.strength);
    println!("phase             {:.9} rad", pulse.achieved_phase);
    println!(
        "plateau excursion {:.3} kHz",
        pulse.plateau_excursion() / (2.0 * PI) / 1e3
    );
    println!("boundary mismatch {:.2e}", pulse.boundary_mismatch());
    println!("Ermakov residual  {:.2e}", pulse.ermakov_residual());
    let trap = a
        .trap_rf_mhz
        .map(|rf| {
            TrapParams::for_radial_frequency(
                2.0 * PI * rf * 1e6,
                a.trap_r0_mm * 1e-3,
                2.0 * PI * a.trap_axial_mhz * 1e6,
                w0,
            )
        })
        .transpose()?;
    if let Some(path) = &a.export {
        let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
        let mut w = BufWriter::new(file);
        pulse.write_csv(trap.as_ref(), &mut w)?;
        w.flush()?;
        println!("wrote {} samples to {}", pulse.samples.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { targets, overrides } => cmd_run(&cli.out, targets, overrides),
        Command::Sweep { target, axis, values } => cmd_sweep(&cli.out, target, axis, values),
        Command::Catalog => cmd_catalog(),
        Command::Report { targets } => cmd_report(&cli.out, targets),
        Command::Pulse {
            command: PulseCommand::Design(args),
        } => cmd_design(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

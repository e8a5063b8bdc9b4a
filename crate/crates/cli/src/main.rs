use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use serde_json::{json, Value};

use quarkonium_cli::checks::Fault;
use quarkonium_cli::commands::{action_table, critical, poincare, scan, validate};
use quarkonium_cli::config::{Config, CriticalMode, MassConvention, Panel, RatioForm, ResolvedSystem};
use quarkonium_cli::sidecar::{format_of, open_output, write_sidecar, Format};
use quarkonium_cli::{CliError, OmegaUnit, Result};
use quarkonium_core::ScanMode;

/// Classical chaotization of driven quarkonium.
#[derive(Debug, Parser)]
#[command(name = "quarkonium", version)]
struct Cli {
    /// TOML configuration file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Quarkonium preset: uu, dd, ss, cc, bb.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Coulomb coupling in core units.
    #[arg(long, global = true)]
    z: Option<f64>,
    /// Confining force in core units.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Quark mass in MeV; overrides the preset
    #[arg(long, global = true, value_name = "MEV")]
    mass_mev: Option<f64>,
    /// quark or reduced.
    #[arg(long, global = true)]
    mass_convention: Option<String>,
    /// Drive frequency, read according to --omega-unit
    #[arg(long, global = true)]
    omega: Option<f64>,
    /// hz (angular, s⁻¹), ev (ħω) or natural.
    #[arg(long, global = true)]
    omega_unit: Option<String>,
    /// Field ratio, in the form set by --ratio-form
    #[arg(long, global = true)]
    eps_ratio: Option<f64>,
    /// Output file; CSV unless it ends in .json. Standard output otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Recorded in the metadata; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// More logging: -v info, -vv debug
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical field at chosen actions, or the comparison with the published tables.
    CriticalField {
        /// Actions to evaluate, comma separated
        #[arg(long, value_delimiter = ',')]
        n: Vec<f64>,
        /// hydrogen, small_a, large_a, three_d, numeric.
        #[arg(long, value_delimiter = ',')]
        mode: Vec<String>,
        /// Lower resonance index of the overlapping pair
        #[arg(long)]
        k: Option<u32>,
        /// Recompute both published tables under every frequency reading.
        #[arg(long)]
        tables: bool,
    },
    /// Critical field against the action.
    Scan {
        /// hydrogen, small_a, large_a, numeric.
        #[arg(long, value_delimiter = ',')]
        mode: Vec<String>,
        /// Smallest action of the log grid
        #[arg(long)]
        n_min: Option<f64>,
        /// Largest action of the log grid
        #[arg(long)]
        n_max: Option<f64>,
        /// Number of grid points
        #[arg(long)]
        points: Option<usize>,
    },
    /// Stroboscopic sections of the figure panels.
    Poincare {
        /// Take ε_cr/ε from the caption of figure 2, 3 or 4.
        #[arg(long)]
        figure: Option<u8>,
        /// How --eps-ratio reads: eps_cr_over_eps or eps_over_eps_cr.
        #[arg(long)]
        ratio_form: Option<String>,
        /// Panels a (hydrogen), b (small_a), c (large_a).
        #[arg(long, value_delimiter = ',')]
        mode: Vec<String>,
        /// Drive periods per trajectory
        #[arg(long)]
        periods: Option<usize>,
        /// Also classify each trajectory with the divergence proxy.
        #[arg(long)]
        chaos: bool,
    },
    /// Action-angle chart with closed-form and asymptotic columns.
    ActionTable {
        /// Smallest action of the log grid
        #[arg(long)]
        n_min: Option<f64>,
        /// Largest action of the log grid
        #[arg(long)]
        n_max: Option<f64>,
        /// Number of grid points
        #[arg(long)]
        points: Option<usize>,
    },
    /// Run the invariant suite.
    Validate {
        /// Negative control: convention.
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn parse_list<T: std::str::FromStr>(items: &[String], field: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    items
        .iter()
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| CliError::config(field, e.to_string()))
        })
        .collect()
}

fn apply_globals(cli: &Cli, cfg: &mut Config) -> Result<()> {
    let s = &mut cfg.system;
    if let Some(p) = &cli.preset {
        s.preset = Some(p.clone());
    }
    if cli.z.is_some() {
        s.z = cli.z;
        s.alpha_s = None;
    }
    if cli.lambda.is_some() {
        s.lambda = cli.lambda;
        s.lambda_gev2 = None;
    }
    if cli.mass_mev.is_some() {
        s.mass_mev = cli.mass_mev;
    }
    if let Some(m) = &cli.mass_convention {
        s.mass_convention = match m.as_str() {
            "quark" => MassConvention::Quark,
            "reduced" => MassConvention::Reduced,
            other => {
                return Err(CliError::config(
                    "mass_convention",
                    format!("unknown {other:?} (quark, reduced)"),
                ))
            }
        };
    }
    if cli.omega.is_some() {
        cfg.drive.omega = cli.omega;
    }
    if let Some(u) = &cli.omega_unit {
        cfg.drive.omega_unit = Some(u.parse::<OmegaUnit>()?);
    }
    if cli.eps_ratio.is_some() {
        cfg.drive.eps_ratio = cli.eps_ratio;
    }
    if cli.jobs.is_some() {
        cfg.run.jobs = cli.jobs;
    }
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    Ok(())
}

fn system_details(sys: &ResolvedSystem) -> Value {
    json!({
        "z": sys.params.z,
        "lambda": sys.params.lambda,
        "l": sys.params.l,
        "omega_core": sys.omega,
        "omega_input": sys.omega_input.map(|(w, u)| json!({"value": w, "unit": u})),
        "mass_scale_mev": sys.params.mass_scale_mev,
        "preset": sys.preset.map(|p| p.name),
    })
}

fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

use std::io::Write;

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    apply_globals(&cli, &mut cfg)?;
    let out = cli.out.as_deref();
    let format = format_of(out);

    let (name, details) = match &cli.command {
        Command::CriticalField { n, mode, k, tables } => {
            if !n.is_empty() {
                cfg.critical.n = n.clone();
            }
            if !mode.is_empty() {
                cfg.critical.modes = parse_list::<CriticalMode>(mode, "mode")?;
            }
            if let Some(k) = k {
                cfg.critical.k = *k;
            }
            configure_threads(&cfg)?;
            if *tables {
                let report = critical::table_comparison(cfg.system.mass_convention, cfg.critical.k)?;
                match format {
                    Format::Json => write_json(out, &report)?,
                    Format::Csv => critical::write_table_csv(&report.rows, open_output(out)?)?,
                }
                for b in &report.best {
                    log::info!(
                        "table {}: best match {:?} with ω read as {} (mean |log10 ratio| {:.2})",
                        b.table,
                        b.formula,
                        b.omega_unit,
                        b.mean_abs_log10_ratio
                    );
                }
                (
                    "critical-field --tables",
                    json!({"fits": report.fits, "best": report.best}),
                )
            } else {
                let (sys, rows) = critical::critical_field_rows(&cfg)?;
                match format {
                    Format::Json => write_json(out, &rows)?,
                    Format::Csv => critical::write_critical_csv(&rows, open_output(out)?)?,
                }
                (
                    "critical-field",
                    json!({"system": system_details(&sys), "rows": rows.len()}),
                )
            }
        }
        Command::Scan {
            mode,
            n_min,
            n_max,
            points,
        } => {
            if !mode.is_empty() {
                cfg.scan.modes = parse_list::<ScanMode>(mode, "mode")?;
            }
            if let Some(v) = n_min {
                cfg.scan.n_min = *v;
            }
            if let Some(v) = n_max {
                cfg.scan.n_max = *v;
            }
            if let Some(v) = points {
                cfg.scan.points = *v;
            }
            configure_threads(&cfg)?;
            let res = scan::run_scan(&cfg)?;
            match format {
                Format::Json => write_json(out, &json!({"rows": res.rows, "gaps": res.gaps}))?,
                Format::Csv => scan::write_scan(&res, open_output(out)?)?,
            }
            (
                "scan",
                json!({"system": system_details(&res.system), "rows": res.rows.len(), "gaps": res.gaps}),
            )
        }
        Command::Poincare {
            figure,
            ratio_form,
            mode,
            periods,
            chaos,
        } => {
            if figure.is_some() {
                cfg.poincare.figure = *figure;
            }
            if let Some(f) = ratio_form {
                cfg.drive.ratio_form = match f.as_str() {
                    "eps_cr_over_eps" => RatioForm::EpsCrOverEps,
                    "eps_over_eps_cr" => RatioForm::EpsOverEpsCr,
                    other => {
                        return Err(CliError::config(
                            "ratio_form",
                            format!("unknown {other:?} (eps_cr_over_eps, eps_over_eps_cr)"),
                        ))
                    }
                };
            }
            if !mode.is_empty() {
                cfg.poincare.panels = parse_list::<Panel>(mode, "mode")?;
            }
            if let Some(p) = periods {
                cfg.poincare.periods = *p;
            }
            if *chaos {
                cfg.poincare.chaos = true;
            }
            configure_threads(&cfg)?;
            let runs = poincare::run_poincare(&cfg)?;
            let summaries: Vec<_> = runs.iter().map(|r| r.summary.clone()).collect();
            match format {
                Format::Json => {
                    let all: Vec<_> = runs
                        .iter()
                        .map(|r| json!({"summary": r.summary, "trajectories": r.trajectories}))
                        .collect();
                    write_json(out, &all)?
                }
                Format::Csv => poincare::write_poincare_csv(&runs, open_output(out)?)?,
            }
            (
                "poincare",
                json!({"eps_over_eps_cr": cfg.poincare_eps_over_eps_cr()?, "panels": summaries}),
            )
        }
        Command::ActionTable { n_min, n_max, points } => {
            if let Some(v) = n_min {
                cfg.action_table.n_min = *v;
            }
            if let Some(v) = n_max {
                cfg.action_table.n_max = *v;
            }
            if let Some(v) = points {
                cfg.action_table.points = *v;
            }
            let sys = cfg.resolve_system()?;
            let rows = action_table::action_table(&cfg)?;
            match format {
                Format::Json => write_json(out, &rows)?,
                Format::Csv => action_table::write_action_csv(&rows, open_output(out)?)?,
            }
            (
                "action-table",
                json!({"system": system_details(&sys), "rows": rows.len()}),
            )
        }
        Command::Validate { inject_fault } => {
            let fault = match inject_fault.as_deref() {
                None => Fault::None,
                Some("convention") => Fault::Convention,
                Some(other) => {
                    return Err(CliError::config(
                        "inject_fault",
                        format!("unknown fault {other:?} (convention)"),
                    ))
                }
            };
            configure_threads(&cfg)?;
            let report = validate::run_validate(fault);
            match format {
                Format::Json => write_json(out, &report)?,
                Format::Csv => {
                    let mut w = open_output(out)?;
                    validate::write_report_text(&report, &mut w)?;
                    w.flush()?;
                }
            }
            if let Some(path) = out {
                write_sidecar(path, "validate", &cfg, json!({"passed": report.passed}))?;
            }
            if !report.passed {
                let failed: Vec<&str> = report
                    .groups
                    .iter()
                    .filter(|g| !g.passed())
                    .map(|g| g.name.as_str())
                    .collect();
                return Err(CliError::Validation(failed.join(", ")));
            }
            return Ok(());
        }
    };
    if let Some(path) = out {
        let meta = write_sidecar(path, name, &cfg, details)?;
        log::info!("metadata written to {}", meta.display());
    }
    Ok(())
}

fn configure_threads(cfg: &Config) -> Result<()> {
    if let Some(j) = cfg.run.jobs {
        if j == 0 {
            return Err(CliError::config("run.jobs", "must be ≥ 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::config("run.jobs", e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) | Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

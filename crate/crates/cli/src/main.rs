//! Command-line harness: `run` executes one configured scenario, `sweep`
//! fans runs out over a parameter and fits the scaling of the summary
//! metric, `report` regenerates derived artifacts from a finished run
//! directory without re-simulating.
//!
//! Exit codes: 0 ok, 2 configuration error, 4 failed hypothesis check,
//! 3 numeric abort, 1 anything else (I/O).

use clap::{Parser, Subcommand, ValueEnum};
use reconnect2d_core::sweep::{
    eps_sweep, inviscid_order, nu_sweep, run_many, stability_sweep, InviscidReport,
    StabilityReport,
};
use reconnect2d_core::{
    regenerate_report, run_scenario, run_scenario_with_echo, Config, Error, RunSummary, Scenario,
};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "reconnect2d",
    version,
    about = "2D coupled active-scalar merger laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the scenario once per parameter value and fit the metric's
    /// log-log slope across the values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: Param,
        /// Comma-separated parameter values, e.g. 1e-3,1e-4,1e-5.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Regenerate heatmaps and CSV summaries inside a finished run
    /// directory (no re-simulation).
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Param {
    /// Resistivity ν (both species); metric = terminal L² gap to ν = 0.
    Nu,
    /// Data scale ε; metric = terminal L^{3/2} screened-unscreened gap.
    Eps,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run { config } => cmd_run(&config),
        Cmd::Sweep {
            config,
            param,
            values,
        } => cmd_sweep(&config, param, &values),
        Cmd::Report { dir } => cmd_report(&dir),
    };
    match outcome {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) => 2,
                Error::Numeric(_) => 3,
                Error::Hypothesis(_) => 4,
                Error::Io(_) => 1,
            };
            std::process::exit(code);
        }
    }
}

fn describe(summary: &RunSummary, sc: &Scenario) {
    println!(
        "run: {} [{}] -> {}",
        summary.scenario_name,
        sc.variant,
        summary.out_dir.display()
    );
    println!(
        "hypothesis checks: {} passed; steps: {}; final t = {}",
        sc.checks.len(),
        summary.steps,
        sc.settings.t_end
    );
    if let Some(t) = summary.first_overlap {
        println!("first support overlap at t = {t:.6}");
    }
    for &(t, from, to) in &summary.component_changes {
        println!("F-support components {from} -> {to} at t = {t:.6}");
    }
    match (summary.merger_detected, summary.predicted_merger) {
        (Some(t), Some(pred)) => {
            println!(
                "merger detected at t = {t:.8} (closed-form prediction {pred:.8}, rel. diff {:.2e})",
                (t - pred).abs() / pred
            );
        }
        (Some(t), None) => println!("merger detected at t = {t:.6}"),
        (None, Some(pred)) => {
            println!("no merger within the horizon (closed-form prediction {pred:.8})")
        }
        (None, None) => {}
    }
}

fn cmd_run(config_path: &Path) -> Result<(), Error> {
    let cfg = Config::load(config_path)?;
    let sc = cfg.to_scenario()?;
    let summary = run_scenario_with_echo(&sc, &cfg.out_dir, Some(&cfg.raw))?;
    describe(&summary, &sc);
    println!("manifest: {}", cfg.out_dir.join("manifest.json").display());
    Ok(())
}

fn cmd_sweep(config_path: &Path, param: Param, values: &[f64]) -> Result<(), Error> {
    if values.len() < 2 {
        return Err(Error::Config(format!(
            "sweep needs >= 2 values to fit a slope, got {}",
            values.len()
        )));
    }
    let cfg = Config::load(config_path)?;
    let spec = cfg.smooth_spec()?;

    // one artifact directory per value
    let (tag, scenarios) = match param {
        Param::Nu => ("nu", nu_sweep(&spec, values)?),
        Param::Eps => ("eps", eps_sweep(values, &spec)?),
    };
    let jobs: Vec<_> = scenarios
        .iter()
        .zip(values)
        .map(|(sc, &v)| {
            let dir = cfg.out_dir.join(format!("{tag}_{v}"));
            move || run_scenario(sc, &dir)
        })
        .collect();
    for (summary, sc) in run_many(jobs)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .zip(&scenarios)
    {
        describe(summary, sc);
    }

    // scaling fit over the family (lockstep re-runs, shared step size)
    let t_end = spec.settings.t_end;
    let (metrics, slope, label) = match param {
        Param::Nu => {
            let report: InviscidReport = inviscid_order(&spec, values, t_end)?;
            let metrics = values
                .iter()
                .map(|&v| {
                    report
                        .points
                        .iter()
                        .find(|q| q.nu == v)
                        .map(|q| q.gap_l2)
                        .expect("every requested nu is measured")
                })
                .collect::<Vec<_>>();
            (metrics, report.order_l2, "order")
        }
        Param::Eps => {
            let report: StabilityReport = stability_sweep(values, &spec, t_end, 1.5)?;
            let metrics = values
                .iter()
                .map(|&v| {
                    report
                        .points
                        .iter()
                        .find(|q| q.eps == v)
                        .map(|q| q.gap_lp)
                        .expect("every requested eps is measured")
                })
                .collect::<Vec<_>>();
            (metrics, report.gap_slope, "slope")
        }
    };

    std::fs::create_dir_all(&cfg.out_dir)?;
    let table = cfg.out_dir.join("sweep_summary.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&table)?);
    writeln!(out, "value,metric,fitted_slope")?;
    for (&v, &m) in values.iter().zip(&metrics) {
        writeln!(out, "{v},{m},{slope}")?;
    }
    out.flush()?;
    println!("{label}={slope:.4}");
    println!("summary: {}", table.display());
    Ok(())
}

fn cmd_report(dir: &Path) -> Result<(), Error> {
    regenerate_report(dir)?;
    println!("report artifacts regenerated in {}", dir.display());
    Ok(())
}

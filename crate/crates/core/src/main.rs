use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use saiqh::data_io::{
    compare, load_observed, load_scenario, read_trajectory, write_report, write_trajectory,
    Mapping, Scenario,
};
use saiqh::stability::classify_r0;
use saiqh::sweep::run_sweep;
use saiqh::{
    dfe, endemic_equilibrium, endemic_lambda, fixed_point_residual, reproduction_number,
    reproduction_number_expanded, verify_descent, Error, ErrorKind, Scheme, StepConfig,
};

#[derive(Parser)]
#[command(name = "saiqh", version, about = "Discrete-time SAIQH epidemic model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Nsfd,
    Rk4,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Nsfd => Scheme::Nsfd,
            SchemeArg::Rk4 => Scheme::Rk4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepScheme {
    Nsfd,
    Rk4,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    #[value(name = "I")]
    I,
    #[value(name = "IHH")]
    Ihh,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Scenario file; keys it omits take the bundled Portugal values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a scenario key, e.g. `--set beta=3.86`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory CSV.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        #[arg(long, allow_hyphen_values = true, value_parser = positive_float)]
        h: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report R0, equilibria and stability; check a trajectory's Lyapunov descent.
    Analyze {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// NSFD trajectory to check for Lyapunov descent.
        #[arg(long)]
        traj: Option<PathBuf>,
        /// Where the stability report goes when --traj is given.
        #[arg(long, default_value = "stability_report.json")]
        out: PathBuf,
    },
    /// Compare a trajectory against observed active cases.
    Compare {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long)]
        observed: PathBuf,
        #[arg(long, value_enum, default_value = "I")]
        mapping: MappingArg,
        #[arg(long, default_value = "fit_report.json")]
        out: PathBuf,
    },
    /// Check positivity and boundedness over a list of step sizes.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long = "h-list", value_delimiter = ',', allow_hyphen_values = true,
              value_parser = positive_float, required = true)]
        h_list: Vec<f64>,
        #[arg(long, value_enum, default_value = "nsfd")]
        scheme: SweepScheme,
    },
}

fn positive_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}`: step size must be finite and > 0"))
    }
}

fn load(args: &ScenarioArgs) -> saiqh::Result<Scenario> {
    let mut scenario = match &args.config {
        Some(path) => load_scenario(path)?,
        None => Scenario::bundled(),
    };
    for o in &args.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("override `{o}` is not KEY=VALUE")))?;
        scenario = scenario.with_override(k.trim(), v.trim())?;
    }
    Ok(scenario)
}

fn fmt_state(s: &saiqh::State64) -> String {
    format!(
        "S={:.6e} A={:.6e} I={:.6e} Q={:.6e} H={:.6e} Hbar={:.6e}",
        s.susceptible, s.asymptomatic, s.infected, s.quarantined, s.hospitalized, s.icu
    )
}

fn run(cli: Cli) -> saiqh::Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            scenario,
            scheme,
            h,
            steps,
            out,
        } => {
            let sc = load(&scenario)?;
            let scheme = scheme.map(Scheme::from).unwrap_or(sc.scheme);
            let h = h.unwrap_or(sc.h);
            let steps = steps.map(|s| s as usize).unwrap_or(sc.n_steps);
            let started = Instant::now();
            let traj = sc.run_with(scheme, h, steps)?;
            let elapsed = started.elapsed();
            write_trajectory(&traj, &out)?;
            println!("R0 = {:.6}", reproduction_number(&sc.params)?);
            println!(
                "scheme = {scheme}, h = {h}, steps = {steps}, t_end = {} d",
                traj.time(steps)
            );
            println!("final: {}", fmt_state(traj.last()));
            println!("wall time: {:.3} ms", elapsed.as_secs_f64() * 1e3);
            println!("wrote {} ({} rows)", out.display(), traj.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            scenario,
            traj,
            out,
        } => {
            let sc = load(&scenario)?;
            let p = &sc.params;
            let r0 = reproduction_number(p)?;
            let classification = classify_r0(r0);
            let cfg = StepConfig::new(sc.h)?;
            println!("R0 (factored)  = {r0:.15}");
            println!("R0 (expanded)  = {:.15}", reproduction_number_expanded(p)?);
            let e0 = dfe(p)?;
            println!("DFE: {}", fmt_state(&e0.state));
            println!(
                "DFE residual (h = {}): {:.3e}",
                sc.h,
                fixed_point_residual(p, &e0.state, &cfg)?
            );
            match endemic_lambda(p) {
                Ok(l) => println!("lambda*: {l:.6e}"),
                Err(e) => println!("lambda*: {e}"),
            }
            match endemic_equilibrium(p) {
                Ok(ee) => {
                    println!("EE: {}", fmt_state(&ee.state));
                    println!(
                        "EE residual (h = {}): {:.3e}",
                        sc.h,
                        fixed_point_residual(p, &ee.state, &cfg)?
                    );
                }
                Err(Error::NoEndemicEquilibrium { .. }) => println!("EE: none: R0 <= 1"),
                Err(e) => println!("EE: {e}"),
            }
            let label = serde_json::to_value(classification)?;
            println!("classification: {}", label.as_str().unwrap_or_default());
            if let Some(path) = traj {
                let t = read_trajectory(&path)?;
                let report = verify_descent(p, &t)?;
                write_report(&report, &out)?;
                println!(
                    "lyapunov: {} violations, defined from step {}, verified = {}",
                    report.descent_violations,
                    report
                        .first_defined()
                        .map_or_else(|| "-".to_string(), |k| k.to_string()),
                    report.verified
                );
                println!("wrote {}", out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            traj,
            observed,
            mapping,
            out,
        } => {
            let t = read_trajectory(&traj)?;
            let obs = load_observed(&observed)?;
            let mapping = match mapping {
                MappingArg::I => Mapping::IOnly,
                MappingArg::Ihh => Mapping::IPlusHPlusHbar,
            };
            let report = compare(&t, &obs, mapping)?;
            write_report(&report, &out)?;
            println!(
                "n = {}  rmse = {:.6}  mae = {:.6}  max_abs_error = {:.6}",
                report.n_points, report.rmse, report.mae, report.max_abs_error
            );
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            scenario,
            h_list,
            scheme,
        } => {
            let sc = load(&scenario)?;
            let schemes: &[Scheme] = match scheme {
                SweepScheme::Nsfd => &[Scheme::Nsfd],
                SweepScheme::Rk4 => &[Scheme::Rk4],
                SweepScheme::Both => &[Scheme::Nsfd, Scheme::Rk4],
            };
            let rows = run_sweep(&sc, &h_list, schemes)?;
            println!(
                "{:>10} {:>6} {:>9} {:>16} {:>16} {:>16} {:>10}",
                "h", "scheme", "steps", "min_component", "max_N", "bound", "violations"
            );
            for r in &rows {
                println!(
                    "{:>10} {:>6} {:>9} {:>16.8e} {:>16.8e} {:>16.8e} {:>10}{}",
                    r.h,
                    r.scheme.to_string(),
                    r.steps,
                    r.min_component,
                    r.max_population,
                    r.population_bound,
                    r.violations,
                    r.failure
                        .as_deref()
                        .map(|f| format!("  ({f})"))
                        .unwrap_or_default()
                );
            }
            if rows.iter().any(|r| r.violations > 0) {
                eprintln!("error: feasible region left for at least one step size");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_code(kind: ErrorKind) -> ExitCode {
    ExitCode::from(match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::Io => 3,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use subgc::bounds::{self, BoundReport, GridSpec, TuneStrategy};
use subgc::experiment::{run_job, write_csv, CurveRow, Experiment, JobKind, ResultRow, CURVE_HEADER, RESULT_HEADER};
use subgc::montecarlo::{convergence_curve, estimate_failure, EventSpec, Statistic};
use subgc::{Curve, Distribution, Executor};

mod svg;

#[derive(Debug, Parser)]
#[command(name = "subgc", version, about = "Submultiplicative Glivenko-Cantelli bounds and simulations")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write results here instead of stdout (a directory for `sweep batch`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "SUBGC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a closed-form bound.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Estimate an event frequency by simulation.
    #[command(subcommand)]
    Simulate(SimCmd),
    /// Run a family of simulations.
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Render two CSV columns as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
enum BoundCmd {
    /// 2 exp(-2 n eps^2).
    Massart {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Three-term failure bound at an explicit or tuned (p, q).
    Lemma {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, requires = "q", conflicts_with = "tune")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        q: Option<f64>,
        #[arg(long, value_enum, requires = "delta")]
        tune: Option<Tune>,
        #[arg(long)]
        delta: Option<f64>,
        /// Grid points per axis for `--tune grid`.
        #[arg(long, default_value_t = 240)]
        grid_points: usize,
    },
    /// Sample size for the submultiplicative event.
    SubmultN0 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Sample size for uniform revenue estimation under a moment bound.
    RevenueN0 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        theta: f64,
        /// Bound on E[V^(1+theta)].
        #[arg(long = "C", alias = "c")]
        c: f64,
    },
    /// Truncated tail sums bracketing E[V].
    TailSums {
        #[arg(long)]
        dist: Distribution,
        #[arg(long, default_value_t = 1000)]
        terms: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tune {
    #[value(name = "paper", alias = "closed-form")]
    ClosedForm,
    Grid,
}

#[derive(Debug, Args)]
struct SimCommon {
    #[arg(long)]
    dist: Distribution,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Debug, Subcommand)]
enum SimCmd {
    Gc {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value = "cdf")]
        side: Curve,
        /// Report the three-term bound at this (p, q).
        #[arg(long, requires = "q")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        q: Option<f64>,
    },
    Revenue {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long)]
        eps: f64,
    },
    Region {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
    },
    Implication {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long = "C", alias = "c")]
        c: f64,
    },
}

#[derive(Debug, Subcommand)]
enum SweepCmd {
    /// Quartiles of a statistic across sample sizes.
    Curve {
        #[arg(long)]
        dist: Distribution,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value = "revenue-error")]
        statistic: Statistic,
    },
    /// Violation frequency across exponents at a fixed sample size.
    Alpha {
        #[arg(long)]
        dist: Distribution,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long, default_value = "cdf")]
        side: Curve,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Run a JSON experiment config.
    Batch {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    x: String,
    /// One or more y columns, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    y: Vec<String>,
    #[arg(long)]
    logx: bool,
    #[arg(long)]
    logy: bool,
    #[arg(long)]
    title: Option<String>,
}

/// Bad input from the user: exit code 2.
#[derive(Debug)]
struct UserError(String);

impl std::fmt::Display for UserError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UserError {}

fn user(msg: impl Into<String>) -> anyhow::Error {
    UserError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UserError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<subgc::Error>() {
            return match e {
                subgc::Error::Io { source, .. } if source.kind() != io::ErrorKind::NotFound => 1,
                _ => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("# config: {cli:?}");
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn executor(cli: &Cli) -> Executor {
    Executor::Parallel { threads: cli.threads }
}

/// Sends `bytes` to `--out` or stdout.
fn emit(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_rows<T: serde::Serialize>(cli: &Cli, header: &str, rows: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Csv => write_csv(&mut buf, header, rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, rows)?;
            buf.push(b'\n');
        }
    }
    emit(cli, &buf)
}

/// `key,value` lines or one JSON object.
fn emit_record(cli: &Cli, value: &serde_json::Value) -> Result<()> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, value)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["field", "value"])?;
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    let text = match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), text.as_str()])?;
                }
            }
            w.flush()?;
            drop(w);
        }
    }
    emit(cli, &buf)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Bound(cmd) => run_bound(cli, cmd),
        Command::Simulate(cmd) => run_simulate(cli, cmd),
        Command::Sweep(cmd) => run_sweep(cli, cmd),
        Command::Plot(args) => run_plot(cli, args),
    }
}

fn report_value(report: &BoundReport) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(report)?)
}

fn run_bound(cli: &Cli, cmd: &BoundCmd) -> Result<()> {
    let value = match *cmd {
        BoundCmd::Massart { n, eps } => {
            let bound = bounds::massart_bound(n, eps)?;
            serde_json::json!({ "n": n, "eps": eps, "bound": bound, "vacuous": bound >= 1.0 })
        }
        BoundCmd::Lemma {
            n,
            eps,
            alpha,
            p,
            q,
            tune,
            delta,
            grid_points,
        } => {
            let report = match (p, q, tune, delta) {
                (Some(p), Some(q), None, _) => bounds::lemma_failure_bound(n, eps, alpha, p, q)?,
                (None, None, Some(tune), Some(delta)) => {
                    let strategy = match tune {
                        Tune::ClosedForm => TuneStrategy::ClosedForm,
                        Tune::Grid => TuneStrategy::Grid,
                    };
                    let grid = GridSpec {
                        p_points: grid_points,
                        q_points: grid_points,
                        ..GridSpec::default()
                    };
                    bounds::tune_pq(n, eps, alpha, delta, strategy, &grid, &executor(cli))?
                }
                _ => return Err(user("give either --p and --q, or --tune and --delta")),
            };
            if !report.feasible {
                eprintln!("{}", serde_json::to_string(&report)?);
                return Err(user(format!("preconditions fail: {}", report.diagnostics.join("; "))));
            }
            report_value(&report)?
        }
        BoundCmd::SubmultN0 { eps, delta, alpha } => serde_json::to_value(bounds::n0_submult_terms(eps, delta, alpha)?)?,
        BoundCmd::RevenueN0 { eps, delta, theta, c } => serde_json::to_value(bounds::n0_revenue(eps, delta, theta, c)?)?,
        BoundCmd::TailSums { dist, terms } => {
            let sums = bounds::tail_sum_bounds(&dist, terms)?;
            let mut v = serde_json::to_value(sums)?;
            v["dist"] = serde_json::Value::String(dist.to_string());
            v["mean"] = serde_json::to_value(dist.moment(1.0)?)?;
            v
        }
    };
    emit_record(cli, &value)
}

fn run_simulate(cli: &Cli, cmd: &SimCmd) -> Result<()> {
    let kind = match cmd {
        SimCmd::Gc {
            common,
            eps,
            alpha,
            side,
            p,
            q,
        } => JobKind::Gc {
            dist: common.dist,
            n: common.n,
            eps: *eps,
            alpha: *alpha,
            side: *side,
            trials: common.trials,
            p: *p,
            q: *q,
        },
        SimCmd::Revenue { common, eps } => JobKind::Revenue {
            dist: common.dist,
            n: common.n,
            eps: *eps,
            trials: common.trials,
        },
        SimCmd::Region {
            common,
            eps,
            alpha,
            p,
            q,
        } => JobKind::Region {
            dist: common.dist,
            n: common.n,
            eps: *eps,
            alpha: *alpha,
            p: *p,
            q: *q,
            trials: common.trials,
        },
        SimCmd::Implication { common, eps, theta, c } => JobKind::Implication {
            dist: common.dist,
            n: common.n,
            eps: *eps,
            theta: *theta,
            c: *c,
            trials: common.trials,
        },
    };
    let mut buf = Vec::new();
    run_job("simulate", &kind, cli.seed, &executor(cli), &mut buf)?;
    match cli.format {
        Format::Csv => emit(cli, &buf),
        Format::Json => {
            let rows = csv::Reader::from_reader(buf.as_slice())
                .deserialize()
                .collect::<std::result::Result<Vec<ResultRow>, _>>()?;
            emit_rows(cli, RESULT_HEADER, &rows)
        }
    }
}

fn run_sweep(cli: &Cli, cmd: &SweepCmd) -> Result<()> {
    let exec = executor(cli);
    match cmd {
        SweepCmd::Curve {
            dist,
            n_list,
            trials,
            statistic,
        } => {
            let rows: Vec<CurveRow> = convergence_curve(dist, n_list, *trials, cli.seed, *statistic, &exec)?
                .into_iter()
                .map(|p| CurveRow::new("sweep", p))
                .collect();
            emit_rows(cli, CURVE_HEADER, &rows)
        }
        SweepCmd::Alpha {
            dist,
            n,
            eps,
            alphas,
            side,
            trials,
        } => {
            let mut rows = Vec::with_capacity(alphas.len());
            for &alpha in alphas {
                let event = EventSpec::Gc {
                    eps: *eps,
                    alpha,
                    side: *side,
                };
                for est in estimate_failure(dist, *n, &event, *trials, cli.seed, &exec)? {
                    rows.push(ResultRow::new("sweep", est, None));
                }
            }
            emit_rows(cli, RESULT_HEADER, &rows)
        }
        SweepCmd::Batch { config } => {
            let mut exp = Experiment::load(config)?;
            if exp.config.seed.is_none() {
                exp.config.seed = Some(cli.seed);
            }
            let dir = cli
                .out
                .clone()
                .or_else(|| exp.config.out_dir.clone())
                .ok_or_else(|| user("no output directory: set `out_dir` in the config or pass --out"))?;
            let result = exp.run(&exec)?;
            for path in result.write(&dir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn run_plot(cli: &Cli, args: &PlotArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|e| user(format!("reading {}: {e}", args.input.display())))?;
    let series = svg::load_series(&text, &args.x, &args.y).map_err(|e| user(e.to_string()))?;
    let opts = svg::PlotOptions {
        x_label: args.x.clone(),
        y_label: args.y.join(", "),
        log_x: args.logx,
        log_y: args.logy,
        title: args.title.clone(),
    };
    let doc = svg::render(&series, &opts).map_err(|e| user(e.to_string()))?;
    emit(cli, doc.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::bail;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&user("bad")), 2);
        let lib: anyhow::Error = subgc::Error::Parse("x".into()).into();
        assert_eq!(exit_code(&lib), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("boom")), 1);
        let wrapped = anyhow::Error::from(subgc::Error::Infeasible("x".into())).context("while running");
        assert_eq!(exit_code(&wrapped), 2);
    }

    #[test]
    fn bail_is_internal() {
        fn f() -> Result<()> {
            bail!("internal")
        }
        assert_eq!(exit_code(&f().unwrap_err()), 1);
    }
}

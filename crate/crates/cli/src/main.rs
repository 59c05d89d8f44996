use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rankone::dispersion::{
    disp_probability_bound, exact_dispersion, halton, n_disp_upper, DispMethod, PointSet,
};
use rankone::recovery::{recover, RecoveryConfig};
use rankone::search::{plan, PlanInput};
use rankone::tensor::{sup_distance_bound, QueryOracle};
use rankone_cli::config::{ExperimentConfig, StrategyChoice};
use rankone_cli::output::{read_points, to_json, write_json_file, write_points, write_table_file, Row};
use rankone_cli::run::{
    plan_input, run_adversary, run_curves, run_pipeline, run_search, AdversaryMode, AdversaryParams,
};
use rankone_cli::CliError;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "rankone", version, about = "Rank-one tensor approximation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Directory for the CSV and JSON outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Budgets and regime for a class.
    Plan {
        #[arg(long)]
        r: Option<u32>,
        #[arg(long = "M")]
        m: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "V")]
        v: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        deterministic: bool,
    },
    /// Phase one only.
    Search {
        #[arg(long, value_enum)]
        strategy: Option<StrategyChoice>,
        #[arg(long)]
        n1: Option<u64>,
        /// Ignore any configured n1 and use the planner's budget.
        #[arg(long)]
        params_from_plan: bool,
    },
    /// Phase two from a given center.
    Recover {
        /// Comma-separated coordinates of z*.
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        #[arg(long)]
        n2: Option<u64>,
    },
    /// Full pipeline over all trials.
    Approx {
        #[arg(long, value_enum)]
        strategy: Option<StrategyChoice>,
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long)]
        n2: Option<u64>,
    },
    /// Exact dispersion of a point set.
    Dispersion {
        /// CSV file, one point per row.
        #[arg(long, conflicts_with_all = ["halton", "uniform"])]
        points: Option<PathBuf>,
        /// First n Halton points.
        #[arg(long, conflicts_with = "uniform")]
        halton: Option<usize>,
        /// n uniform points drawn from the master seed.
        #[arg(long)]
        uniform: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Reference volume for the probability and size bounds.
        #[arg(long = "V")]
        v: Option<f64>,
        /// Also write the point set to this CSV file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Fooling-family lower bounds.
    Adversary {
        #[arg(long, value_enum, default_value = "det")]
        mode: AdversaryMode,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyChoice,
        #[arg(long, default_value_t = 8)]
        probes: u64,
    },
    /// Recovery error against the phase-two budget.
    Curves {
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<u64>,
    },
}

fn load_config(g: &Global) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &g.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(t) = g.threads {
        cfg.threads = t;
    }
    if g.out.is_some() {
        cfg.out = g.out.clone();
    }
    Ok(cfg)
}

fn out_dir(cfg_out: &Option<PathBuf>) -> Result<Option<&Path>, CliError> {
    if let Some(dir) = cfg_out {
        fs::create_dir_all(dir)?;
    }
    Ok(cfg_out.as_deref())
}

fn emit<S: Serialize, R: Row>(
    dir: Option<&Path>,
    stem: &str,
    summary: &S,
    rows: Option<&[R]>,
) -> Result<(), CliError> {
    if let Some(dir) = dir {
        if let Some(rows) = rows {
            write_table_file(&dir.join(format!("{stem}.csv")), rows)?;
        }
        write_json_file(&dir.join(format!("{stem}.json")), summary)?;
    }
    println!("{}", to_json(summary)?);
    Ok(())
}

#[derive(Serialize)]
struct NoRows;

impl Row for NoRows {
    const COLUMNS: &'static [&'static str] = &[];
}

#[derive(Serialize)]
struct BracketRow {
    n2: u64,
    queries: u64,
    error_upper: f64,
    error_lower: f64,
}

impl Row for BracketRow {
    const COLUMNS: &'static [&'static str] = &["n2", "queries", "error_upper", "error_lower"];
}

fn need<T>(x: Option<T>, name: &str) -> Result<T, CliError> {
    x.ok_or_else(|| CliError::config(format!("plan: --{name} is required without --config")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Plan {
            r,
            m,
            d,
            eps,
            v,
            p,
            deterministic,
        } => {
            let base = match &g.config {
                Some(_) => {
                    let cfg = load_config(g)?;
                    cfg.validate()?;
                    Some(plan_input(&cfg, &cfg.tensor_for(0)?))
                }
                None => None,
            };
            let input = PlanInput {
                r: need(r.or(base.map(|b| b.r)), "r")?,
                m: need(m.or(base.map(|b| b.m)), "M")?,
                d: need(d.or(base.map(|b| b.d)), "d")?,
                eps: eps.or(base.map(|b| b.eps)).unwrap_or(0.1),
                v: v.or(base.and_then(|b| b.v)),
                p: p.or(base.map(|b| b.p)).unwrap_or(0.1),
                deterministic: deterministic || base.is_some_and(|b| b.deterministic),
            };
            #[derive(Serialize)]
            struct PlanOut {
                input: PlanInput,
                plan: rankone::search::BudgetPlan,
            }
            let out = PlanOut {
                input,
                plan: plan(&input)?,
            };
            emit::<_, NoRows>(out_dir(&g.out)?, "plan", &out, None)
        }
        Command::Search {
            strategy,
            n1,
            params_from_plan,
        } => {
            let mut cfg = load_config(g)?;
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if n1.is_some() {
                cfg.n1 = n1;
            }
            let (prepared, outcome) = run_search(&cfg, params_from_plan)?;
            #[derive(Serialize)]
            struct SearchOut {
                config: ExperimentConfig,
                strategy: StrategyChoice,
                n1: u64,
                plan: rankone::search::BudgetPlan,
                outcome: rankone::search::SearchOutcome,
            }
            let out = SearchOut {
                strategy: prepared.choice,
                n1: prepared.n1,
                plan: prepared.plan,
                outcome,
                config: cfg.clone(),
            };
            emit::<_, NoRows>(out_dir(&cfg.out)?, "search", &out, None)
        }
        Command::Recover { z, n2 } => {
            let mut cfg = load_config(g)?;
            if n2.is_some() {
                cfg.n2 = n2;
            }
            cfg.validate()?;
            let t = cfg.tensor_for(0)?;
            let n2 = match cfg.n2 {
                Some(n) => n,
                None => plan(&plan_input(&cfg, &t))?.n2,
            };
            let mut o = QueryOracle::new(&t).with_budget(n2);
            let a = recover(&mut o, &z, &RecoveryConfig::new(t.r(), n2))?;
            let b = sup_distance_bound(&t, &a.lines, a.center_value, &cfg.measure)?;
            let row = BracketRow {
                n2,
                queries: o.count(),
                error_upper: b.upper,
                error_lower: b.lower,
            };
            let dir = out_dir(&cfg.out)?;
            if let Some(dir) = dir {
                write_table_file(&dir.join("bracket.csv"), &[row])?;
            } else {
                let mut w = std::io::stdout().lock();
                rankone_cli::output::write_table(&mut w, &[row])?;
            }
            emit::<_, NoRows>(dir, "approximant", &a, None)
        }
        Command::Approx { strategy, n1, n2 } => {
            let mut cfg = load_config(g)?;
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if n1.is_some() {
                cfg.n1 = n1;
            }
            if n2.is_some() {
                cfg.n2 = n2;
            }
            let res = run_pipeline(&cfg)?;
            emit(out_dir(&cfg.out)?, "trials", &res.summary, Some(&res.rows))
        }
        Command::Dispersion {
            points,
            halton: h,
            uniform,
            d,
            v,
            export,
        } => {
            let cfg = load_config(g)?;
            let ps: PointSet = match (points, h, uniform) {
                (Some(p), _, _) => read_points(&p)?,
                (None, Some(n), _) => halton(n, d.ok_or_else(|| CliError::config("--halton needs --d"))?)?,
                (None, None, Some(n)) => {
                    PointSet::uniform(n, d.ok_or_else(|| CliError::config("--uniform needs --d"))?, cfg.seed)?
                }
                _ => return Err(CliError::config("dispersion needs --points, --halton or --uniform")),
            };
            if let Some(path) = &export {
                write_points(fs::File::create(path)?, &ps)?;
            }
            let res = exact_dispersion(&ps)?;
            #[derive(Serialize)]
            struct DispOut {
                n: usize,
                d: usize,
                provenance: rankone::dispersion::Provenance,
                dispersion: rankone::dispersion::DispersionResult,
                #[serde(rename = "V")]
                v: Option<f64>,
                probability_bound: Option<f64>,
                n_disp_behw: Option<u64>,
                n_disp_halton: Option<u64>,
            }
            let n = ps.len();
            let dim = ps.dim();
            let out = DispOut {
                n,
                d: dim,
                provenance: ps.provenance(),
                dispersion: res,
                v,
                probability_bound: v.map(|v| disp_probability_bound(n as u64, dim, v)),
                n_disp_behw: v.and_then(|v| n_disp_upper(v, dim, DispMethod::Behw).ok()),
                n_disp_halton: v.and_then(|v| n_disp_upper(v, dim, DispMethod::Halton).ok()),
            };
            emit::<_, NoRows>(out_dir(&cfg.out)?, "dispersion", &out, None)
        }
        Command::Adversary {
            mode,
            d,
            r,
            n,
            strategy,
            probes,
        } => {
            let cfg = load_config(g)?;
            let params = AdversaryParams {
                mode,
                d,
                r,
                n,
                trials: g.trials.unwrap_or(100),
                strategy,
                seed: cfg.seed,
                probes,
            };
            let (rows, summary) = run_adversary(&params)?;
            emit(out_dir(&cfg.out)?, "adversary", &summary, Some(&rows))
        }
        Command::Curves { budgets } => {
            let mut cfg = load_config(g)?;
            if !budgets.is_empty() {
                cfg.budgets = budgets;
            }
            let res = run_curves(&cfg)?;
            emit(out_dir(&cfg.out)?, "curves", &res.summary, Some(&res.rows))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Seeded execution of experiments: full pipelines, convergence sweeps and
//! the adversary harness.

use rankone::adversary::{fool_deterministic, fool_randomized, DeterministicFooling, RandomizedTrial};
use rankone::dispersion::halton;
use rankone::pipeline::{two_phase, Approximation, Strategy};
use rankone::recovery::{recover, RecoveryConfig};
use rankone::rng;
use rankone::search::{plan, BudgetPlan, PlanInput, Regime, SearchOutcome, SubsetSearchParams};
use rankone::tensor::{sup_distance_bound, sup_norm, ErrorBracket, MeasureConfig, QueryOracle, RankOneTensor};
use rankone::univariate::factorial;
use serde::Serialize;

use crate::config::{ExperimentConfig, StrategyChoice};
use crate::output::Row;
use crate::stats::{fit_order, wilson, OrderFit};
use crate::CliError;

/// Runs `f(0..n)` on up to `threads` scoped workers and returns the results in
/// index order. The first error by index wins, so the outcome does not
/// depend on the thread count.
pub fn par_map<T, F>(n: u64, threads: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync,
{
    if threads <= 1 || n <= 1 {
        return (0..n).map(&f).collect();
    }
    let threads = threads.min(n as usize);
    let f = &f;
    let mut all: Vec<(u64, Result<T, CliError>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                s.spawn(move || {
                    (k as u64..n)
                        .step_by(threads)
                        .map(|i| (i, f(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial worker panicked"))
            .collect()
    });
    all.sort_by_key(|p| p.0);
    all.into_iter().map(|p| p.1).collect()
}

/// Budgets and phase-one strategy for one tensor.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub plan: BudgetPlan,
    pub choice: StrategyChoice,
    pub strategy: Strategy,
    pub n1: u64,
    pub n2: u64,
}

pub fn plan_input(cfg: &ExperimentConfig, t: &RankOneTensor) -> PlanInput {
    PlanInput {
        r: t.r(),
        m: t.m(),
        d: t.dim(),
        eps: cfg.eps,
        v: cfg.volume_bound(t),
        p: cfg.p,
        deterministic: cfg.strategy == StrategyChoice::Det,
    }
}

pub fn prepare(cfg: &ExperimentConfig, t: &RankOneTensor) -> Result<Prepared, CliError> {
    let input = plan_input(cfg, t);
    let plan = plan(&input)?;
    let choice = match cfg.strategy {
        StrategyChoice::Auto => match plan.regime {
            Regime::TrivialMSmall => StrategyChoice::Single,
            Regime::SubsetSearch => StrategyChoice::Subset,
            Regime::SupportClassRandom => StrategyChoice::Multi,
            Regime::SupportClassDeterministic => StrategyChoice::Det,
            Regime::Intractable => {
                if cfg.n1.is_none() {
                    return Err(rankone::Error::Precondition(
                        "intractable regime (M >= 2^r r!): set n1 and a strategy explicitly".into(),
                    )
                    .into());
                }
                StrategyChoice::Multi
            }
        },
        c => c,
    };
    let planned = cfg.n1.unwrap_or(plan.n1);
    let (strategy, n1) = match choice {
        StrategyChoice::Single => (Strategy::Uniform, 1),
        StrategyChoice::Multi | StrategyChoice::Auto => (Strategy::Uniform, planned),
        StrategyChoice::Subset => match plan.subset {
            Some(params) => (Strategy::Subset(params), planned),
            None => {
                let params = SubsetSearchParams::new(input.r, input.m, input.eps)?.clamped_to(input.d);
                let n = params.n1_required(input.d, input.p).ceil().max(1.0);
                let n = if n >= u64::MAX as f64 { u64::MAX } else { n as u64 };
                (Strategy::Subset(params), cfg.n1.unwrap_or(n))
            }
        },
        StrategyChoice::Det => {
            let ps = cfg.point_set.build(input.d, planned)?;
            let n = ps.len() as u64;
            (Strategy::Deterministic(ps), n)
        }
    };
    let n2 = cfg.n2.unwrap_or(plan.n2);
    Ok(Prepared {
        plan,
        choice,
        strategy,
        n1,
        n2,
    })
}

/// Bracket for an approximation; the zero output incurs `‖f‖_∞`.
pub fn measure(t: &RankOneTensor, a: &Approximation, m: &MeasureConfig) -> Result<ErrorBracket, CliError> {
    Ok(match a {
        Approximation::RankOne(a) => sup_distance_bound(t, &a.lines, a.center_value, m)?,
        _ if a.is_zero() => {
            let s = sup_norm(t, m.grid);
            ErrorBracket { upper: s, lower: s }
        }
        _ => {
            return Err(CliError::config("only zero and rank-one outputs can be measured"));
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub queries_phase1: u64,
    pub queries_phase2: u64,
    pub found: bool,
    pub error_upper: f64,
    pub error_lower: f64,
}

impl Row for TrialRow {
    const COLUMNS: &'static [&'static str] = &[
        "trial",
        "seed",
        "queries_phase1",
        "queries_phase2",
        "found",
        "error_upper",
        "error_lower",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub config: ExperimentConfig,
    pub trials: u64,
    pub found: u64,
    pub success_frequency: Option<f64>,
    pub success_wilson95: Option<(f64, f64)>,
    /// Trials with `error_upper <= eps`.
    pub within_eps: u64,
    pub within_eps_frequency: Option<f64>,
    pub within_eps_wilson95: Option<(f64, f64)>,
    pub max_error_upper: Option<f64>,
    pub strategy: Option<StrategyChoice>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    /// Success probability guaranteed by the planner for phase one.
    pub theorem_bound: Option<f64>,
    /// Whether the upper end of the Wilson interval reaches `theorem_bound`.
    pub bound_consistent: Option<bool>,
    pub plan: Option<BudgetPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResults {
    pub rows: Vec<TrialRow>,
    pub summary: PipelineSummary,
}

struct TrialOutcome {
    row: TrialRow,
    prepared: Prepared,
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialOutcome, CliError> {
    let seed = rng::trial_seed(cfg.seed, trial);
    let t = cfg.tensor_for(trial)?;
    let prepared = prepare(cfg, &t)?;
    let mut oracle = QueryOracle::new(&t).with_budget(prepared.n1.saturating_add(prepared.n2));
    let rc = RecoveryConfig::new(t.r(), prepared.n2);
    let out = two_phase(&mut oracle, &prepared.strategy, prepared.n1, &rc, seed)?;
    let b = measure(&t, &out.approximation, &cfg.measure)?;
    Ok(TrialOutcome {
        row: TrialRow {
            trial,
            seed,
            queries_phase1: out.queries_phase1,
            queries_phase2: out.queries_phase2,
            found: out.search.found(),
            error_upper: b.upper,
            error_lower: b.lower,
        },
        prepared,
    })
}

/// Plan, search, recover and measure every trial of `cfg`.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineResults, CliError> {
    cfg.validate()?;
    let outcomes = par_map(cfg.trials, cfg.threads, |i| run_trial(cfg, i))?;
    let first = outcomes.first().map(|o| &o.prepared);
    let rows: Vec<TrialRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    let n = rows.len() as u64;
    let found = rows.iter().filter(|r| r.found).count() as u64;
    let within = rows.iter().filter(|r| r.error_upper <= cfg.eps).count() as u64;
    let freq = |k: u64| (n > 0).then(|| k as f64 / n as f64);
    let ci = wilson(found, n, 1.96);
    let bound = first.map(|p| p.plan.success_prob_lower);
    let summary = PipelineSummary {
        config: cfg.clone(),
        trials: n,
        found,
        success_frequency: freq(found),
        success_wilson95: ci,
        within_eps: within,
        within_eps_frequency: freq(within),
        within_eps_wilson95: wilson(within, n, 1.96),
        max_error_upper: rows.iter().map(|r| r.error_upper).reduce(f64::max),
        strategy: first.map(|p| p.choice),
        n1: first.map(|p| p.n1),
        n2: first.map(|p| p.n2),
        theorem_bound: bound,
        bound_consistent: ci.zip(bound).map(|((_, hi), b)| hi >= b),
        plan: first.map(|p| p.plan.clone()),
    };
    Ok(PipelineResults { rows, summary })
}

/// Runs the phase-one search for trial 0 of `cfg`.
pub fn run_search(cfg: &ExperimentConfig, from_plan: bool) -> Result<(Prepared, SearchOutcome), CliError> {
    cfg.validate()?;
    let t = cfg.tensor_for(0)?;
    let mut c = cfg.clone();
    if from_plan {
        c.n1 = None;
    }
    let prepared = prepare(&c, &t)?;
    let mut oracle = QueryOracle::new(&t).with_budget(prepared.n1);
    let out = prepared
        .strategy
        .search(&mut oracle, prepared.n1, rng::trial_seed(cfg.seed, 0))?;
    Ok((prepared, out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub trial: u64,
    pub n2: u64,
    pub queries: u64,
    pub error_upper: f64,
    pub error_lower: f64,
    /// `C_r M d^(r+1) n2^-r`.
    pub contract: f64,
}

impl Row for CurveRow {
    const COLUMNS: &'static [&'static str] = &["trial", "n2", "queries", "error_upper", "error_lower", "contract"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub config: ExperimentConfig,
    pub budgets: Vec<u64>,
    /// Fit of `error_upper` against `n2` per trial.
    pub fits: Vec<OrderFit>,
    pub worst_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveResults {
    pub rows: Vec<CurveRow>,
    pub summary: CurveSummary,
}

pub fn default_budgets(d: usize) -> Vec<u64> {
    [6, 12, 24, 48, 96].iter().map(|k| k * d as u64).collect()
}

/// Convergence sweep: for every trial, locate `z*` once and recover with each
/// phase-two budget.
pub fn run_curves(cfg: &ExperimentConfig) -> Result<CurveResults, CliError> {
    cfg.validate()?;
    let budgets = if cfg.budgets.is_empty() {
        default_budgets(cfg.dim())
    } else {
        cfg.budgets.clone()
    };
    let per_trial = par_map(cfg.trials, cfg.threads, |trial| {
        let seed = rng::trial_seed(cfg.seed, trial);
        let t = cfg.tensor_for(trial)?;
        let prepared = prepare(cfg, &t)?;
        let mut o = QueryOracle::new(&t);
        let found = prepared.strategy.search(&mut o, prepared.n1, seed)?;
        let z = found
            .best_nonzero()
            .ok_or_else(|| rankone::Error::Precondition(format!("trial {trial}: phase one found no nonzero")))?
            .point
            .clone();
        let mut rows = Vec::with_capacity(budgets.len());
        for &n2 in &budgets {
            let rc = RecoveryConfig::new(t.r(), n2);
            let mut o = QueryOracle::new(&t).with_budget(n2);
            let a = recover(&mut o, &z, &rc)?;
            let b = sup_distance_bound(&t, &a.lines, a.center_value, &cfg.measure)?;
            rows.push(CurveRow {
                trial,
                n2,
                queries: o.count(),
                error_upper: b.upper,
                error_lower: b.lower,
                contract: rc.error_contract(t.dim(), t.m()),
            });
        }
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n2 as f64, r.error_upper)).collect();
        Ok((rows, fit_order(&pairs)?))
    })?;
    let fits: Vec<OrderFit> = per_trial.iter().map(|p| p.1).collect();
    Ok(CurveResults {
        rows: per_trial.into_iter().flat_map(|p| p.0).collect(),
        summary: CurveSummary {
            config: cfg.clone(),
            budgets,
            worst_slope: fits.iter().map(|f| f.slope).reduce(f64::max),
            fits,
        },
    })
}

/// Search pattern of the adversary harness.
fn adversary_strategy(choice: StrategyChoice, d: usize, r: u32, n1: u64, det: bool) -> Result<Strategy, CliError> {
    Ok(match choice {
        StrategyChoice::Auto if det => Strategy::Deterministic(halton(n1 as usize, d)?),
        StrategyChoice::Det => Strategy::Deterministic(halton(n1 as usize, d)?),
        StrategyChoice::Subset => {
            // the fooling family sits at M = 2^r r!, just outside the subset regime
            let top = 2f64.powi(r as i32) * factorial(r);
            Strategy::Subset(SubsetSearchParams::new(r, 0.9 * top, 0.5)?.clamped_to(d))
        }
        _ => Strategy::Uniform,
    })
}

/// The two-phase algorithm with total budget `n`: phase two gets the minimum
/// recovery budget when `n` exceeds it, phase one the rest.
pub fn budgeted_algorithm(
    strategy: &Strategy,
    single: bool,
    d: usize,
    r: u32,
    n: u64,
) -> impl Fn(&mut QueryOracle<'_>, u64) -> rankone::Result<Approximation> + '_ {
    let min = RecoveryConfig::min_budget(r, d);
    let n1 = if n > min { n - min } else { n };
    let n1 = if single { n1.min(1) } else { n1 };
    let n2 = n - n1;
    move |oracle, seed| {
        if n2 >= min {
            return Ok(two_phase(oracle, strategy, n1, &RecoveryConfig::new(r, n2), seed)?.approximation);
        }
        strategy.search(oracle, n1, seed)?;
        Ok(Approximation::Zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryMode {
    Det,
    Ran,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversaryParams {
    pub mode: AdversaryMode,
    pub d: usize,
    pub r: u32,
    pub n: u64,
    pub trials: u64,
    pub strategy: StrategyChoice,
    pub seed: u64,
    /// Random points per orthant added to the corner when measuring.
    pub probes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryRow {
    pub trial: u64,
    pub seed: u64,
    pub orthant: u64,
    pub sign: f64,
    pub queries: u64,
    pub error: f64,
}

impl Row for AdversaryRow {
    const COLUMNS: &'static [&'static str] = &["trial", "seed", "orthant", "sign", "queries", "error"];
}

impl From<&RandomizedTrial> for AdversaryRow {
    fn from(t: &RandomizedTrial) -> Self {
        Self {
            trial: t.trial,
            seed: t.seed,
            orthant: t.orthant,
            sign: t.sign,
            queries: t.queries,
            error: t.error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarySummary {
    pub params: AdversaryParams,
    pub trials: u64,
    /// Root mean square error (deterministic mode: the certified error).
    pub rms: f64,
    pub rms_se: f64,
    pub rms_ci95: (f64, f64),
    /// 1 for deterministic algorithms, `sqrt(2)/2` for randomized ones.
    pub floor: f64,
    pub floor_consistent: bool,
}

pub fn run_adversary(p: &AdversaryParams) -> Result<(Vec<AdversaryRow>, AdversarySummary), CliError> {
    let det = p.mode == AdversaryMode::Det;
    let min = RecoveryConfig::min_budget(p.r, p.d);
    let n1 = if p.n > min { p.n - min } else { p.n };
    let strategy = adversary_strategy(p.strategy, p.d, p.r, n1, det)?;
    let alg = budgeted_algorithm(&strategy, p.strategy == StrategyChoice::Single, p.d, p.r, p.n);
    let (rows, rms, se, floor) = match p.mode {
        AdversaryMode::Det => {
            let seed = rng::trial_seed(p.seed, 0);
            let DeterministicFooling {
                error_lower,
                orthant,
                sign,
                queries,
            } = fool_deterministic(|o| alg(o, seed), p.n, p.d, p.r)?;
            let row = AdversaryRow {
                trial: 0,
                seed,
                orthant,
                sign,
                queries,
                error: error_lower,
            };
            (vec![row], error_lower, 0.0, 1.0)
        }
        AdversaryMode::Ran => {
            let rep = fool_randomized(&alg, p.d, p.r, p.n, p.trials, p.probes, p.seed)?;
            let rows = rep.trials.iter().map(AdversaryRow::from).collect();
            (rows, rep.rms, rep.rms_se, rep.floor)
        }
    };
    let summary = AdversarySummary {
        params: *p,
        trials: rows.len() as u64,
        rms,
        rms_se: se,
        rms_ci95: (rms - 1.96 * se, rms + 1.96 * se),
        floor,
        floor_consistent: rms + 3.0 * se >= floor,
    };
    Ok((rows, summary))
}

//! `scps`: generate instances, solve them, simulate plans and cross-check
//! solvers against exhaustive enumeration.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when an
//! internal invariant breaks (for example `verify` finding a gap to the oracle).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scps::generator::{generate, Availability, GenConfig, Layout, DEFAULT_CONCENTRATION};
use scps::instance::{ActionSpace, Instance, SearchPlan, Variant, DEFAULT_TR_MINUTES, SCHEMA_VERSION};
use scps::labeling::{self, DominanceMode, LabelingConfig};
use scps::mdp::{expected_cost, CostBreakdown};
use scps::oracle::{enumerate_optimal, DEFAULT_MAX_CHARGERS};
use scps::reduction::{q_lower_bound, reduce_tsp};
use scps::rollout::{BasePolicy, RolloutConfig};
use scps::simulation::run_experiment;
use scps::solver::{solve, with_action_space, Algorithm, SolveOptions, SolveOutput};
use scps::ScpsError;

/// Tolerance for oracle cross-checks.
const CHECK_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "scps", version, about = "Stochastic charging-station search solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance
    Gen(GenArgs),
    /// Solve an instance with one algorithm
    Solve(SolveArgs),
    /// Simulate the plans of several algorithms on sampled availabilities
    Simulate(SimulateArgs),
    /// Expected cost and runtime of several algorithms side by side
    Compare(CompareArgs),
    /// Build the instance of a decision-TSP reduction
    ReduceTsp(ReduceArgs),
    /// Cross-check the solvers against exhaustive enumeration
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayoutKind {
    Uniform,
    Clustered,
    Grid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaseKind {
    Greedy,
    Nearest,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value = "a", value_parser = parse_variant)]
    variant: Variant,
    /// Number of chargers (the start vertex comes on top)
    #[arg(long, default_value_t = 10)]
    chargers: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    layout: LayoutKind,
    /// Side of the square area in meters (uniform and clustered layouts)
    #[arg(long, default_value_t = 5000.0)]
    side_m: f64,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 600.0)]
    spread_m: f64,
    /// Blocks per side of the street grid
    #[arg(long, default_value_t = 8)]
    blocks: usize,
    #[arg(long, default_value_t = 500.0)]
    block_m: f64,
    #[arg(long, default_value_t = 30.0)]
    speed_kmh: f64,
    #[arg(long, default_value = "med", value_parser = parse_availability)]
    availability: Availability,
    #[arg(long, default_value_t = DEFAULT_CONCENTRATION)]
    concentration: f64,
    #[arg(long, env = "SCPS_SEED", default_value_t = 0)]
    seed: u64,
    /// Search budget in minutes
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[arg(long)]
    beta_bar: Option<f64>,
    #[arg(long, default_value = "co")]
    action_space: String,
    #[arg(long, default_value_t = DEFAULT_TR_MINUTES)]
    t_r: f64,
    /// Enable recovery with this mean occupation time in minutes
    #[arg(long)]
    recovery_mu_inv: Option<f64>,
    /// Enable the energy model with this initial state of charge
    #[arg(long)]
    energy_b0: Option<f64>,
    /// Drop chargers farther than this from the start
    #[arg(long)]
    radius_m: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SolverFlags {
    /// Dominance rule for the labeling algorithms
    #[arg(long, value_parser = parse_dominance)]
    dominance: Option<DominanceMode>,
    /// Override the action space: co, dn, dn-r or tr
    #[arg(long)]
    action_space: Option<String>,
    /// Travel-time threshold of the tr action space, in minutes
    #[arg(long, default_value_t = DEFAULT_TR_MINUTES)]
    t_r: f64,
    /// Time limit of the labeling algorithms in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_labels: Option<u64>,
    /// Rollout lookahead in epochs; unlimited when absent
    #[arg(long)]
    lookahead: Option<usize>,
    #[arg(long, value_enum, default_value = "greedy")]
    base_policy: BaseKind,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "le", value_parser = parse_algorithm)]
    algo: Algorithm,
    #[command(flatten)]
    solver: SolverFlags,
    /// Also enumerate every plan and fail with exit 2 on a gap
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    #[arg(long, env = "SCPS_SEED", default_value_t = 0)]
    seed: u64,
    /// Comma-separated algorithms
    #[arg(long, value_delimiter = ',', default_value = "le,lh,ro,greedy,naive", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    solver: SolverFlags,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "le,lh,ro,greedy,naive", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Time limit of LH in seconds
    #[arg(long, default_value_t = 1.0)]
    lh_time_limit: f64,
    /// Also price every plan with recovering stations of this mean occupation time
    #[arg(long)]
    recovery_mu_inv: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// JSON file holding the integer distance matrix
    #[arg(long)]
    distances: PathBuf,
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// Tour length threshold
    #[arg(long)]
    theta: f64,
    /// Occupation probability; defaults halfway between its lower bound and 1
    #[arg(long)]
    q: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CHARGERS)]
    max_chargers: usize,
    /// Dominance rule the labeling run is checked with
    #[arg(long, default_value = "exact", value_parser = parse_dominance)]
    dominance: DominanceMode,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(ScpsError),
    Breach(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(ScpsError::ContractViolation(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Breach(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Breach(m) => write!(f, "invariant breach: {m}"),
        }
    }
}

impl From<ScpsError> for CliError {
    fn from(e: ScpsError) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| format!("unknown variant '{s}' (expected a, b, c or d)"))
}

fn parse_availability(s: &str) -> Result<Availability, String> {
    Availability::parse(s).ok_or_else(|| format!("unknown availability '{s}' (expected low, med or high)"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm '{s}' (expected le, lh, ro, greedy or naive)"))
}

fn parse_dominance(s: &str) -> Result<DominanceMode, String> {
    DominanceMode::parse(s).ok_or_else(|| {
        format!("unknown dominance '{s}' (expected exact, heuristic, sharpened, recovery, energy or toggles:01011)")
    })
}

fn space(name: &str, t_r: f64) -> CliResult<ActionSpace> {
    ActionSpace::parse(name, t_r)
        .ok_or_else(|| CliError::Usage(format!("--action-space: unknown value '{name}' (expected co, dn, dn-r or tr)")))
}

fn positive_seconds(flag: &str, secs: f64) -> CliResult<Duration> {
    Duration::try_from_secs_f64(secs)
        .ok()
        .filter(|_| secs > 0.0)
        .ok_or_else(|| CliError::Usage(format!("{flag}: expected a positive number of seconds, got {secs}")))
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    Instance::load(path).map_err(|e| CliError::Usage(format!("--instance {}: {e}", path.display())))
}

impl SolverFlags {
    fn options(&self, algo: Algorithm) -> CliResult<SolveOptions> {
        let time_limit = self.time_limit.map(|s| positive_seconds("--time-limit", s)).transpose()?;
        let dominance = match (algo, self.dominance) {
            (Algorithm::Le | Algorithm::Lh, d) => d,
            _ => None,
        };
        Ok(SolveOptions {
            dominance,
            time_limit,
            max_labels: self.max_labels,
            rollout: RolloutConfig {
                lookahead: self.lookahead,
                base_policy: match self.base_policy {
                    BaseKind::Greedy => BasePolicy::GreedyScore,
                    BaseKind::Nearest => BasePolicy::Nearest,
                },
            },
        })
    }

    fn override_space(&self) -> CliResult<Option<ActionSpace>> {
        self.action_space.as_deref().map(|s| space(s, self.t_r)).transpose()
    }

    /// Instance an algorithm runs on: the explicit override, else the
    /// algorithm's preferred space for the variant, else the instance's own.
    fn target(&self, inst: &Instance, algo: Algorithm, preferred: bool) -> CliResult<Instance> {
        let chosen = match self.override_space()? {
            Some(s) => Some(s),
            None if preferred => algo.preferred_action_space(inst.variant),
            None => None,
        };
        Ok(chosen.map_or_else(|| inst.clone(), |s| with_action_space(inst, s)))
    }
}

fn emit(out: &Output, text: &str) -> CliResult<()> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("--output {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn no_csv(cmd: &str) -> CliError {
    CliError::Usage(format!("--format: {cmd} only writes json"))
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn visits(plan: &SearchPlan) -> String {
    plan.visits.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    if a.out.format == Format::Csv {
        return Err(no_csv("gen"));
    }
    let layout = match a.layout {
        LayoutKind::Uniform => Layout::UniformSquare { side_m: a.side_m },
        LayoutKind::Clustered => Layout::Clustered {
            clusters: a.clusters,
            side_m: a.side_m,
            spread_m: a.spread_m,
        },
        LayoutKind::Grid => Layout::ManhattanGrid {
            blocks: a.blocks,
            block_m: a.block_m,
        },
    };
    let cfg = GenConfig {
        n_stations: a.chargers,
        layout,
        speed_kmh: a.speed_kmh,
        availability: a.availability,
        concentration: a.concentration,
        seed: a.seed,
        t_max: a.t_max,
        beta_bar: a.beta_bar,
        action_space: space(&a.action_space, a.t_r)?,
        recovery_mu_inv: a.recovery_mu_inv,
        energy_b0: a.energy_b0,
        radius_m: a.radius_m,
    };
    let inst = generate(&cfg, a.variant)?;
    emit(&a.out, &json(&inst))
}

#[derive(Serialize)]
struct OracleCheck {
    alpha: f64,
    plan: SearchPlan,
    plans_enumerated: u64,
}

#[derive(Serialize)]
struct SolveReport {
    #[serde(flatten)]
    output: SolveOutput,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

const SOLVE_CSV_HEADER: &str = "algorithm,action_space,alpha,A,rho,rho_bar,t,t_s,visits,wait_at_end,runtime_ms";

fn solve_csv_row(o: &SolveOutput) -> String {
    let c = &o.cost;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        o.algorithm.name(),
        o.action_space.name(),
        c.alpha,
        c.partial_cost,
        c.rho,
        c.rho_bar,
        c.travel,
        opt(c.success_time),
        visits(&o.plan),
        o.plan.wait_at_end,
        o.stats.runtime_ms()
    )
}

fn cmd_solve(a: &SolveArgs) -> CliResult<()> {
    let inst = a.solver.target(&load_instance(&a.instance)?, a.algo, false)?;
    let output = solve(&inst, a.algo, &a.solver.options(a.algo)?)?;
    let oracle = if a.oracle {
        let best = enumerate_optimal(&inst, DEFAULT_MAX_CHARGERS)?;
        check_against(&output, best.best_alpha)?;
        Some(OracleCheck {
            alpha: best.best_alpha,
            plan: best.best_plan,
            plans_enumerated: best.plans_enumerated,
        })
    } else {
        None
    };
    let text = match a.out.format {
        Format::Json => json(&SolveReport { output, oracle }),
        Format::Csv => format!("{SOLVE_CSV_HEADER}\n{}", solve_csv_row(&output)),
    };
    emit(&a.out, &text)
}

/// Exact algorithms must hit the optimum, the rest may not undercut it.
fn check_against(out: &SolveOutput, optimum: f64) -> CliResult<()> {
    let alpha = out.cost.alpha;
    let exact = out.algorithm == Algorithm::Le;
    if alpha < optimum - CHECK_TOL || (exact && alpha > optimum + CHECK_TOL) {
        return Err(CliError::Breach(format!(
            "{} found {alpha}, enumeration {optimum}",
            out.algorithm.name()
        )));
    }
    Ok(())
}

fn solve_all(inst: &Instance, algos: &[Algorithm], flags: &SolverFlags, lh_limit: Option<Duration>) -> CliResult<Vec<SolveOutput>> {
    if algos.is_empty() {
        return Err(CliError::Usage("--algos: need at least one algorithm".into()));
    }
    algos
        .iter()
        .map(|&algo| {
            let target = flags.target(inst, algo, true)?;
            let mut opts = flags.options(algo)?;
            if algo == Algorithm::Lh && opts.time_limit.is_none() {
                opts.time_limit = lh_limit;
            }
            Ok(solve(&target, algo, &opts)?)
        })
        .collect()
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    if a.runs == 0 {
        return Err(CliError::Usage("--runs: must be at least 1".into()));
    }
    let inst = load_instance(&a.instance)?;
    if inst.recovery {
        return Err(CliError::Usage(
            "--instance: simulation needs static availabilities; use compare --recovery-mu-inv".into(),
        ));
    }
    let outputs = solve_all(&inst, &a.algos, &a.solver, None)?;
    let plans: Vec<(String, SearchPlan)> = outputs
        .into_iter()
        .map(|o| (o.algorithm.name().to_string(), o.plan))
        .collect();
    let report = run_experiment(&inst, &plans, a.runs, a.seed)?;
    let text = match a.out.format {
        Format::Json => json(&report),
        Format::Csv => report.to_csv(),
    };
    emit(&a.out, &text)
}

#[derive(Serialize)]
struct CompareRow {
    algorithm: Algorithm,
    action_space: ActionSpace,
    alpha: f64,
    runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_with_recovery: Option<f64>,
    plan: SearchPlan,
    cost: CostBreakdown,
}

#[derive(Serialize)]
struct CompareReport {
    schema: u32,
    variant: Variant,
    chargers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovery_mu_inv: Option<f64>,
    rows: Vec<CompareRow>,
}

fn cmd_compare(a: &CompareArgs) -> CliResult<()> {
    let inst = load_instance(&a.instance)?;
    let lh_limit = positive_seconds("--lh-time-limit", a.lh_time_limit)?;
    let outputs = solve_all(&inst, &a.algos, &a.solver, Some(lh_limit))?;
    let recovering = match a.recovery_mu_inv {
        Some(mu) if !(mu > 0.0 && mu.is_finite()) => {
            return Err(CliError::Usage(format!("--recovery-mu-inv: expected a positive number, got {mu}")))
        }
        Some(mu) => {
            let mut r = inst.clone();
            r.recovery = true;
            for s in r.stations.iter_mut().skip(1) {
                s.mu_inv = Some(mu);
            }
            Some(r)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for o in outputs {
        let alpha_with_recovery = match &recovering {
            Some(r) => Some(expected_cost(&with_action_space(r, o.action_space), &o.plan)?.alpha),
            None => None,
        };
        rows.push(CompareRow {
            algorithm: o.algorithm,
            action_space: o.action_space,
            alpha: o.cost.alpha,
            runtime_ms: o.stats.runtime_ms(),
            alpha_with_recovery,
            plan: o.plan,
            cost: o.cost,
        });
    }
    let text = match a.out.format {
        Format::Json => json(&CompareReport {
            schema: SCHEMA_VERSION,
            variant: inst.variant,
            chargers: inst.charger_count(),
            recovery_mu_inv: a.recovery_mu_inv,
            rows,
        }),
        Format::Csv => {
            let mut s = String::from("algorithm,action_space,alpha,runtime_ms,alpha_with_recovery,visits\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.algorithm.name(),
                    r.action_space.name(),
                    r.alpha,
                    r.runtime_ms,
                    opt(r.alpha_with_recovery),
                    visits(&r.plan)
                ));
            }
            s
        }
    };
    emit(&a.out, &text)
}

fn cmd_reduce(a: &ReduceArgs) -> CliResult<()> {
    if a.out.format == Format::Csv {
        return Err(no_csv("reduce-tsp"));
    }
    let raw = fs::read_to_string(&a.distances)
        .map_err(|e| CliError::Usage(format!("--distances {}: {e}", a.distances.display())))?;
    let d: Vec<Vec<f64>> = serde_json::from_str(&raw)
        .map_err(|e| CliError::Usage(format!("--distances {}: {e}", a.distances.display())))?;
    let q = match a.q {
        Some(q) => q,
        None => {
            let delta = d.iter().flatten().copied().fold(0.0, f64::max);
            (q_lower_bound(delta, d.len()) + 1.0) / 2.0
        }
    };
    let red = reduce_tsp(&d, a.start, q, a.theta)?;
    emit(&a.out, &json(&red))
}

#[derive(Serialize)]
struct AlgorithmCheck {
    algorithm: Algorithm,
    alpha: f64,
    ok: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    chargers: usize,
    dominance: DominanceMode,
    oracle_alpha: f64,
    oracle_plan: SearchPlan,
    plans_enumerated: u64,
    labeling_alpha: f64,
    labeling_plan: SearchPlan,
    checks: Vec<AlgorithmCheck>,
    ok: bool,
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let inst = load_instance(&a.instance)?;
    let best = enumerate_optimal(&inst, a.max_chargers)?;
    let lab = labeling::solve(&inst, &LabelingConfig::with_mode(a.dominance))?;
    let mut checks = vec![AlgorithmCheck {
        algorithm: Algorithm::Le,
        alpha: lab.cost.alpha,
        ok: (lab.cost.alpha - best.best_alpha).abs() <= CHECK_TOL,
    }];
    for algo in [Algorithm::Lh, Algorithm::Ro, Algorithm::Greedy, Algorithm::Naive] {
        let alpha = solve(&inst, algo, &SolveOptions::default())?.cost.alpha;
        checks.push(AlgorithmCheck {
            algorithm: algo,
            alpha,
            ok: alpha >= best.best_alpha - CHECK_TOL,
        });
    }
    let ok = checks.iter().all(|c| c.ok);
    let report = VerifyReport {
        schema: SCHEMA_VERSION,
        chargers: inst.charger_count(),
        dominance: a.dominance,
        oracle_alpha: best.best_alpha,
        oracle_plan: best.best_plan,
        plans_enumerated: best.plans_enumerated,
        labeling_alpha: lab.cost.alpha,
        labeling_plan: lab.plan,
        checks,
        ok,
    };
    let text = match a.out.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("algorithm,alpha,oracle_alpha,ok\n");
            for c in &report.checks {
                s.push_str(&format!("{},{},{},{}\n", c.algorithm.name(), c.alpha, report.oracle_alpha, c.ok));
            }
            s
        }
    };
    emit(&a.out, &text)?;
    if !ok {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.ok).map(|c| c.algorithm.name()).collect();
        return Err(CliError::Breach(format!("{} disagree with enumeration", failed.join(", "))));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::ReduceTsp(a) => cmd_reduce(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

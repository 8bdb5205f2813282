//! Implementations of the `synth` subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use clap::Args;
use rayon::prelude::*;
use synth_core::dsl::{cascade_search_space, count_programs, Task};
use synth_core::hybrid::{
    compression_budget, compute_cost, hybrid_solve, CommandFallback, FallbackGenerator,
    FallbackMode, NoisyOracleFallback, NullFallback, OracleFallback, PricingConfig, RunLedger,
};
use synth_core::metrics::{aggregate, CorpusReport, GroupKey, TaskScore};
use synth_core::records::{
    read_jsonl, write_jsonl, Money, RankedRule, ResultFileRecord, SlrResultRecord, TaskFileRecord,
    TokenCounts,
};
use synth_core::slr::{count_rule_candidates, induce_rule, render_rule, SlrTask};
use synth_core::solvers::{solve_ensemble, SolveResult};
use synth_core::taskgen::{generate_slr_instance, generate_task, GenError, GenSpec};

use crate::{CliError, SolverFlags};

fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_tasks(path: &Path, wrap_boundaries: bool) -> Result<Vec<Task>, CliError> {
    let records: Vec<TaskFileRecord> = read_jsonl(open_reader(path)?)?;
    records
        .into_iter()
        .map(|record| {
            record
                .into_task(wrap_boundaries)
                .map_err(|e| CliError::Input(e.to_string()))
        })
        .collect()
}

fn load_slr_tasks(path: &Path) -> Result<Vec<SlrTask>, CliError> {
    Ok(read_jsonl(open_reader(path)?)?)
}

/// Runs `f` over the items on a worker pool, preserving input order.
fn run_parallel<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Input(format!("worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(|item| f(item)).collect()))
}

fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad range {text:?}; expected N or MIN..MAX"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Ok((lo, hi))
    } else {
        let n = text.trim().parse().map_err(|_| bad())?;
        Ok((n, n))
    }
}

fn build_report(tasks: &[Task], results: &[SolveResult]) -> CorpusReport {
    let scores: Vec<TaskScore> = results
        .iter()
        .zip(tasks)
        .map(|(result, task)| TaskScore::evaluate(&result.program, task))
        .collect();
    aggregate(&scores, |i, _| tasks[i].gt_complexity().map(GroupKey::from))
}

// ---------------------------------------------------------------------------
// solve

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Task file (JSONL).
    #[arg(long)]
    tasks: PathBuf,
    /// Result file to write (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Wrap every string as `#s#` at ingestion.
    #[arg(long)]
    wrap_boundaries: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also write the corpus report as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

pub fn solve(args: SolveArgs) -> Result<(), CliError> {
    let strategies = args.solver.strategies()?;
    let cfg = args.solver.config();
    let tasks = load_tasks(&args.tasks, args.wrap_boundaries)?;
    let results = run_parallel(args.workers, &tasks, |task| {
        solve_ensemble(task, &strategies, &cfg)
    })?;

    let records = tasks.iter().zip(&results).map(|(task, result)| ResultFileRecord {
        task_id: task.task_id.clone(),
        success: result.success,
        reward: result.reward,
        program: result.program.clone(),
        complexity: result.complexity,
        strategy_id: result.strategy_id.clone(),
        tokens: TokenCounts::default(),
        cost: Money::default(),
    });
    write_jsonl(create_writer(&args.out)?, records)?;

    let report = build_report(&tasks, &results);
    print!("{}", report.to_text_table());
    if let Some(path) = args.report_json {
        let mut w = create_writer(&path)?;
        serde_json::to_writer(&mut w, &report).map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Output task file (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Number of tasks.
    #[arg(long)]
    count: u64,
    /// Alphabet characters, e.g. "abc".
    #[arg(long, default_value = "abc")]
    alphabet: String,
    /// Ground-truth cascade length range, e.g. "2..5".
    #[arg(long, default_value = "2..5")]
    cascade_len: String,
    /// Examples per task.
    #[arg(long, default_value_t = 5)]
    examples: usize,
    /// Input string length range, e.g. "3..10".
    #[arg(long, default_value = "3..10")]
    string_len: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Wrap generated strings in `#` boundary markers.
    #[arg(long)]
    wrap_boundaries: bool,
    /// Program budget override (default: the maximum cascade length).
    #[arg(long)]
    budget: Option<usize>,
}

pub fn gen(args: GenArgs) -> Result<(), CliError> {
    let spec = GenSpec {
        alphabet: args.alphabet.chars().collect(),
        cascade_length_range: parse_range(&args.cascade_len)?,
        n_examples: args.examples,
        string_length_range: parse_range(&args.string_len)?,
        seed: args.seed,
        wrap_boundaries: args.wrap_boundaries,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut writer = create_writer(&args.out)?;
    for index in 0..args.count {
        let mut task = generate_task(&spec, index).map_err(|e| match e {
            GenError::Exhausted { .. } => CliError::Exhausted(e.to_string()),
            GenError::InvalidSpec(_) => CliError::Usage(e.to_string()),
        })?;
        if let Some(budget) = args.budget {
            task.max_programs = budget.max(1);
        }
        let record = TaskFileRecord::from_task(&task);
        let line = serde_json::to_string(&record).map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen-slr

#[derive(Args, Debug)]
pub struct GenSlrArgs {
    /// Output task file (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Number of instances.
    #[arg(long)]
    count: u64,
    /// Trains per instance.
    #[arg(long, default_value_t = 6)]
    trains: usize,
    /// Maximum cars per train.
    #[arg(long, default_value_t = 4)]
    max_cars: usize,
    /// Planted rule complexity range, e.g. "1..3".
    #[arg(long, default_value = "1..2")]
    rule_complexity: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

pub fn gen_slr(args: GenSlrArgs) -> Result<(), CliError> {
    let complexity = parse_range(&args.rule_complexity)?;
    if complexity.0 == 0 || complexity.0 > complexity.1 {
        return Err(CliError::Usage(format!("bad rule complexity range {complexity:?}")));
    }
    let mut writer = create_writer(&args.out)?;
    for index in 0..args.count {
        // a sampled rule can be unsatisfiable or vacuous on random trains;
        // retry with fresh rules before giving up
        let mut task = None;
        for rule_attempt in 0..50u64 {
            let instance_seed = args.seed.wrapping_add(index).wrapping_add(rule_attempt << 32);
            let rule = match sample_rule(instance_seed, complexity, args.max_cars) {
                Ok(rule) => rule,
                Err(_) => continue,
            };
            if let Ok(t) = generate_slr_instance(args.trains, args.max_cars, &rule, instance_seed) {
                task = Some(t);
                break;
            }
        }
        let mut task = task.ok_or_else(|| {
            CliError::Exhausted(format!("no satisfiable planted rule for instance {index}"))
        })?;
        task.task_id = format!("slr-{index:05}");
        let line = serde_json::to_string(&task).map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Samples a planted rule of the requested complexity. Lives here rather
/// than in the library because the mix of literal shapes is a CLI choice.
fn sample_rule(
    seed: u64,
    complexity_range: (usize, usize),
    max_cars: usize,
) -> Result<synth_core::slr::Rule, GenError> {
    use rand::{Rng, SeedableRng};
    use synth_core::slr::{AttrValue, CarLength, Color, Literal, Rule, WallType};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xB1ED);
    let complexity = rng.gen_range(complexity_range.0..=complexity_range.1);
    for _ in 0..200 {
        let mut literals = Vec::with_capacity(complexity);
        let mut next_var = 0usize;
        for _ in 0..complexity {
            let value = match rng.gen_range(0..4) {
                0 => AttrValue::Color(Color::ALL[rng.gen_range(0..Color::ALL.len())]),
                1 => AttrValue::Len(CarLength::ALL[rng.gen_range(0..CarLength::ALL.len())]),
                2 => AttrValue::Wall(WallType::ALL[rng.gen_range(0..WallType::ALL.len())]),
                _ => AttrValue::Num(rng.gen_range(1..=max_cars.max(1) as u32)),
            };
            // mostly positive literals on a small pool of variables, with an
            // occasional universal negation
            if rng.gen_bool(0.15) {
                literals.push(Literal::NegatedExists { value });
            } else {
                let var = if next_var == 0 || rng.gen_bool(0.5) {
                    let v = next_var.min(1);
                    next_var = (next_var + 1).min(2);
                    v
                } else {
                    rng.gen_range(0..next_var.max(1))
                };
                literals.push(Literal::Positive { var, value });
            }
        }
        // same attribute twice on one variable is unsatisfiable
        let mut conflict = false;
        for (i, a) in literals.iter().enumerate() {
            for b in literals.iter().skip(i + 1) {
                if let (
                    Literal::Positive { var: va, value: xa },
                    Literal::Positive { var: vb, value: xb },
                ) = (a, b)
                {
                    if va == vb && xa.attribute() == xb.attribute() {
                        conflict = true;
                    }
                }
            }
        }
        if conflict {
            continue;
        }
        if let Ok(rule) = Rule::new(literals) {
            return Ok(rule);
        }
    }
    Err(GenError::Exhausted { index: seed, attempts: 200 })
}

// ---------------------------------------------------------------------------
// slr

#[derive(Args, Debug)]
pub struct SlrArgs {
    /// Task file (JSONL).
    #[arg(long)]
    tasks: PathBuf,
    /// Result file to write (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Maximum body literals to search.
    #[arg(long, default_value_t = 4)]
    max_literals: usize,
    /// Ranked candidates to report when no perfect rule exists.
    #[arg(long, default_value_t = 1)]
    top_k: usize,
    /// External verifier: rendered rule on stdin, decimal score on stdout;
    /// `{task_id}` in the command is replaced per task.
    #[arg(long)]
    verifier_cmd: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn external_score(command: &str, task_id: &str, rule_text: &str) -> Result<f64, CliError> {
    let command = command.replace("{task_id}", task_id);
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| CliError::Input(format!("verifier for {task_id}: {e}")))?;
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(rule_text.as_bytes())
        .map_err(|e| CliError::Input(format!("verifier for {task_id}: {e}")))?;
    let output = child
        .wait_with_output()
        .map_err(|e| CliError::Input(format!("verifier for {task_id}: {e}")))?;
    if !output.status.success() {
        return Err(CliError::Input(format!(
            "verifier for {task_id} exited with {}",
            output.status
        )));
    }
    String::from_utf8_lossy(&output.stdout)
        .trim()
        .parse()
        .map_err(|e| CliError::Input(format!("verifier for {task_id}: bad score: {e}")))
}

pub fn slr(args: SlrArgs) -> Result<(), CliError> {
    let tasks = load_slr_tasks(&args.tasks)?;
    let outcomes = run_parallel(args.workers, &tasks, |task| {
        induce_rule(task, args.max_literals, args.top_k.max(1))
            .map_err(|e| e.to_string())
            .map(|induction| (task.task_id.clone(), induction))
    })?;

    let mut records = Vec::with_capacity(outcomes.len());
    let mut solved = 0usize;
    for outcome in outcomes {
        let (task_id, induction) = outcome.map_err(CliError::Input)?;
        let ranked: Vec<RankedRule> = induction
            .candidates
            .iter()
            .map(|c| RankedRule {
                rule: render_rule(&c.rule),
                score: c.score,
                complexity: c.rule.complexity(),
            })
            .collect();
        let Some(best) = ranked.first().cloned() else {
            return Err(CliError::Input(format!("task {task_id}: no candidate rules")));
        };
        let score = match &args.verifier_cmd {
            Some(cmd) => external_score(cmd, &task_id, &best.rule)?,
            None => best.score,
        };
        let success = score == 1.0;
        solved += usize::from(success);
        records.push(SlrResultRecord {
            task_id,
            success,
            score,
            rule: best.rule,
            complexity: best.complexity,
            candidates: if args.top_k > 1 { ranked } else { Vec::new() },
            single_class: induction.single_class,
        });
    }
    let n = records.len();
    write_jsonl(create_writer(&args.out)?, &records)?;
    println!(
        "solved {solved}/{n} ({:.1}%)",
        100.0 * solved as f64 / n.max(1) as f64
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// hybrid

#[derive(Args, Debug)]
pub struct HybridArgs {
    /// Task file (JSONL).
    #[arg(long)]
    tasks: PathBuf,
    /// Ledger file to write (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Fallback generator: `oracle`, `noisy:<p>`, `cmd:<command>`, `none`.
    #[arg(long, default_value = "none")]
    fallback: String,
    /// Candidate drawing mode.
    #[arg(long, value_enum, default_value_t = ModeArg::BestOfK)]
    mode: ModeArg,
    #[arg(long, default_value_t = 4)]
    max_attempts: usize,
    /// Currency per million input tokens.
    #[arg(long, default_value_t = 0.039)]
    input_price: f64,
    /// Currency per million output tokens.
    #[arg(long, default_value_t = 0.190)]
    output_price: f64,
    /// One-time solver construction cost.
    #[arg(long, default_value_t = 2.00)]
    construction_cost: f64,
    #[arg(long)]
    wrap_boundaries: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    BestOfK,
    DirectFeedback,
}

enum FallbackSpec {
    None,
    Oracle,
    Noisy(f64),
    Command(String),
}

impl FallbackSpec {
    fn parse(text: &str) -> Result<FallbackSpec, CliError> {
        if text == "none" {
            return Ok(FallbackSpec::None);
        }
        if text == "oracle" {
            return Ok(FallbackSpec::Oracle);
        }
        if let Some(p) = text.strip_prefix("noisy:") {
            let p: f64 = p
                .parse()
                .map_err(|_| CliError::Usage(format!("bad corruption probability in {text:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage("corruption probability must be in [0,1]".into()));
            }
            return Ok(FallbackSpec::Noisy(p));
        }
        if let Some(cmd) = text.strip_prefix("cmd:") {
            return Ok(FallbackSpec::Command(cmd.to_owned()));
        }
        Err(CliError::Usage(format!(
            "bad fallback {text:?}; expected oracle, noisy:<p>, cmd:<command>, or none"
        )))
    }

    fn build(&self, seed: u64) -> Box<dyn FallbackGenerator> {
        match self {
            FallbackSpec::None => Box::new(NullFallback),
            FallbackSpec::Oracle => Box::new(OracleFallback),
            FallbackSpec::Noisy(p) => Box::new(NoisyOracleFallback { corruption: *p, seed }),
            FallbackSpec::Command(cmd) => Box::new(CommandFallback { command: cmd.clone() }),
        }
    }
}

pub fn hybrid(args: HybridArgs) -> Result<(), CliError> {
    let strategies = args.solver.strategies()?;
    let cfg = args.solver.config();
    let spec = FallbackSpec::parse(&args.fallback)?;
    let mode = match args.mode {
        ModeArg::BestOfK => FallbackMode::BestOfK,
        ModeArg::DirectFeedback => FallbackMode::DirectFeedback,
    };
    if args.max_attempts == 0 {
        return Err(CliError::Usage("--max-attempts must be at least 1".into()));
    }
    let pricing = PricingConfig {
        input_price: Money::from_decimal(args.input_price),
        output_price: Money::from_decimal(args.output_price),
        construction_cost: Money::from_decimal(args.construction_cost),
    };
    let tasks = load_tasks(&args.tasks, args.wrap_boundaries)?;

    let ledgers: Vec<RunLedger> = run_parallel(args.workers, &tasks, |task| {
        let mut generator = spec.build(cfg.seed);
        hybrid_solve(task, &strategies, &cfg, generator.as_mut(), args.max_attempts, mode, &pricing)
    })?;

    write_jsonl(create_writer(&args.out)?, &ledgers)?;

    let n = ledgers.len();
    let solved = ledgers.iter().filter(|l| l.final_reward == 1.0).count();
    let solver_solved = ledgers.iter().filter(|l| !l.fallback_used).count();
    let tokens = ledgers.iter().fold(TokenCounts::default(), |mut acc, l| {
        acc.add(TokenCounts { input: l.input_tokens, output: l.output_tokens });
        acc
    });
    let cost = compute_cost(&ledgers, &pricing, false);
    let cost_with_construction = compute_cost(&ledgers, &pricing, true);
    println!("tasks: {n}");
    println!("accuracy: {:.1}", 100.0 * solved as f64 / n.max(1) as f64);
    println!("solver_solved: {solver_solved}");
    println!("fallback_invoked: {}", n - solver_solved);
    println!("input_tokens: {}", tokens.input);
    println!("output_tokens: {}", tokens.output);
    println!("cost: {cost}");
    println!("cost_with_construction: {cost_with_construction}");
    Ok(())
}

// ---------------------------------------------------------------------------
// space / slr-space

#[derive(Args, Debug)]
pub struct SpaceArgs {
    /// Alphabet size V.
    alphabet_size: u64,
    /// Maximum cascade length.
    max_len: u32,
}

pub fn space(args: SpaceArgs) -> Result<(), CliError> {
    if args.alphabet_size == 0 || args.max_len == 0 {
        return Err(CliError::Usage("alphabet size and max length must be positive".into()));
    }
    println!("programs: {}", count_programs(args.alphabet_size));
    println!("search-space: {}", cascade_search_space(args.alphabet_size, args.max_len));
    Ok(())
}

#[derive(Args, Debug)]
pub struct SlrSpaceArgs {
    /// Ground literal vocabulary size L.
    literal_count: u64,
}

pub fn slr_space(args: SlrSpaceArgs) -> Result<(), CliError> {
    if args.literal_count == 0 {
        return Err(CliError::Usage("literal count must be positive".into()));
    }
    println!("candidates: {}", count_rule_candidates(args.literal_count));
    Ok(())
}

// ---------------------------------------------------------------------------
// compress

#[derive(Args, Debug)]
pub struct CompressArgs {
    /// Task file (JSONL).
    #[arg(long)]
    tasks: PathBuf,
    /// Comma-separated compression ratios, e.g. "1,2,3,5".
    #[arg(long, default_value = "1,2,3,5")]
    ratios: String,
    #[arg(long)]
    wrap_boundaries: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also write the per-ratio rows as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, serde::Serialize)]
struct CompressRow {
    ratio: f64,
    accuracy: f64,
    mean_programs: f64,
}

pub fn compress(args: CompressArgs) -> Result<(), CliError> {
    let strategies = args.solver.strategies()?;
    let cfg = args.solver.config();
    let ratios: Vec<f64> = args
        .ratios
        .split(',')
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0)
                .ok_or_else(|| CliError::Usage(format!("bad ratio {r:?}")))
        })
        .collect::<Result<_, _>>()?;
    if ratios.is_empty() {
        return Err(CliError::Usage("need at least one ratio".into()));
    }
    let tasks = load_tasks(&args.tasks, args.wrap_boundaries)?;

    let mut rows = Vec::with_capacity(ratios.len());
    println!("{:>8} {:>8} {:>14}", "ratio", "acc%", "mean_programs");
    for &ratio in &ratios {
        let budgeted: Vec<Task> = tasks
            .iter()
            .map(|task| {
                let mut t = task.clone();
                t.max_programs = compression_budget(t.examples.len(), ratio);
                t
            })
            .collect();
        let results = run_parallel(args.workers, &budgeted, |task| {
            solve_ensemble(task, &strategies, &cfg)
        })?;
        for (task, result) in budgeted.iter().zip(&results) {
            debug_assert!(result.complexity <= task.max_programs);
        }
        let n = results.len().max(1);
        let accuracy = 100.0 * results.iter().filter(|r| r.success).count() as f64 / n as f64;
        let mean_programs =
            results.iter().map(|r| r.complexity as f64).sum::<f64>() / n as f64;
        println!("{ratio:>8} {accuracy:>8.1} {mean_programs:>14.2}");
        rows.push(CompressRow { ratio, accuracy, mean_programs });
    }
    if let Some(path) = args.out {
        let mut w = create_writer(&path)?;
        serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(w)?;
    }
    Ok(())
}


use clap::{Args, Parser, Subcommand};
use memdp_core::benchgen::{self, RandomParams};
use memdp_core::envgraph::EnvGraph;
use memdp_core::error::{FormatError, GenError};
use memdp_core::io::{model_to_json, parse_model, parse_policy, policy_to_json};
use memdp_core::reference::{crosscheck_seed, verify_policy, CrosscheckConfig};
use memdp_core::solver::{find_policy_with_observer, Resolution};
use memdp_core::{BoundMode, Heuristic, Memdp, SolveError, SolveOptions, Verdict};
use rayon::prelude::*;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

mod exit {
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const RESOURCE: u8 = 4;
    pub const VERIFY: u8 = 5;
    pub const DISAGREE: u8 = 6;
}

#[derive(Parser)]
#[command(name = "memdp", version, about = "Almost-sure reachability for multiple-environment MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether one policy wins in every environment.
    Solve(SolveArgs),
    /// Check a policy file against a model, environment by environment.
    Verify { model: PathBuf, policy: PathBuf },
    /// Write a generated model to stdout or a file.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Print the environment graph reachable from the full environment set.
    Graph {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the solver against the reference oracles on random models.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
struct SolveArgs {
    model: PathBuf,
    #[arg(long, default_value = "negentropy")]
    heuristic: Heuristic,
    #[arg(long, default_value = "both")]
    bounds: BoundMode,
    /// First slice bound [default: max(1024, |S|·|I|)].
    #[arg(long)]
    bound0: Option<usize>,
    #[arg(long, default_value_t = 2)]
    growth: usize,
    #[arg(long, default_value_t = 3)]
    stagnation: usize,
    /// Recorded in the statistics; the solver itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Maximum number of game nodes per slice.
    #[arg(long)]
    memcap: Option<usize>,
    /// JSON-lines statistics output.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Policy output, written when satisfiable.
    #[arg(long)]
    policy: Option<PathBuf>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 200)]
    seeds: u64,
    #[arg(long, default_value_t = 6)]
    states: usize,
    #[arg(long, default_value_t = 3)]
    envs: usize,
    #[arg(long, default_value_t = 3)]
    actions: usize,
    /// Allow cycles in the generated models.
    #[arg(long)]
    cyclic: bool,
}

#[derive(Subcommand)]
enum Family {
    /// Three environments guessing game over s0, s1, good, bad.
    RunningExample,
    /// Policies need 2^n memory states; --unsat drops one guess stage.
    Exponential {
        n: usize,
        #[arg(long)]
        unsat: bool,
    },
    /// Reduction from a QDIMACS formula, or a random one with --random.
    Qbf {
        #[arg(required_unless_present = "random")]
        formula: Option<PathBuf>,
        #[arg(long)]
        random: Option<u64>,
    },
    Grid {
        width: usize,
        height: usize,
        #[arg(long)]
        no_sensing: bool,
    },
    Frogger {
        width: usize,
        height: usize,
        #[arg(long, default_value_t = 1)]
        car_width: usize,
        #[arg(long, default_value_t = 4)]
        phases: usize,
    },
    Pacman { width: usize, height: usize },
    Catchman { width: usize, height: usize },
    Mastermind { pegs: usize, colors: usize, guesses: usize },
    InfiniteBelief,
    Random {
        seed: u64,
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 3)]
        envs: usize,
        #[arg(long, default_value_t = 3)]
        actions: usize,
        #[arg(long)]
        cyclic: bool,
    },
}

/// A failure carrying its exit code.
struct Failure(u8, String);

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure(exit::PARSE, e.to_string())
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        match e {
            GenError::MalformedFormula(_) => Failure(exit::PARSE, e.to_string()),
            _ => Failure(exit::USAGE, e.to_string()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::ResourceLimit(_) => Failure(exit::RESOURCE, e.to_string()),
            SolveError::NoTargets => Failure(exit::PARSE, e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure(exit::PARSE, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn read_model(path: &Path) -> Result<Memdp, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure(exit::PARSE, format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure(exit::RESOURCE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify { model, policy } => verify(&model, &policy),
        Command::Gen { family, output } => gen(family, output.as_deref()),
        Command::Graph { model, output } => {
            read_model(&model).and_then(|m| write_out(output.as_deref(), &EnvGraph::reachable(&m, &m.all_envs()).to_dot()))
        }
        Command::Crosscheck(args) => crosscheck(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let m = read_model(&args.model)?;
    if let Some(t) = args.timeout {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure(exit::USAGE, format!("invalid timeout {t}")));
        }
    }
    if args.growth < 2 {
        return Err(Failure(exit::USAGE, "growth must be at least 2".into()));
    }
    let opts = SolveOptions {
        heuristic: args.heuristic,
        bounds: args.bounds,
        bound0: args.bound0,
        growth: args.growth,
        stagnation: args.stagnation,
        timeout: args.timeout.map(Duration::from_secs_f64),
        memcap: args.memcap,
        ..SolveOptions::default()
    };
    let mut stats_file = match &args.stats {
        Some(p) => Some(fs::File::create(p).map_err(|e| Failure(exit::RESOURCE, format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut stats_err = None;
    let outcome = find_policy_with_observer(&m, &opts, |rec| {
        if let Some(f) = stats_file.as_mut() {
            let line = serde_json::to_string(rec).expect("stats serialize");
            if let Err(e) = writeln!(f, "{line}") {
                stats_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(f) = stats_file.as_mut() {
        let summary = serde_json::json!({
            "summary": {
                "verdict": outcome.verdict,
                "resolution": outcome.resolution,
                "iterations": outcome.stats.iterations,
                "peak_slice": outcome.stats.peak_slice,
                "explored": outcome.stats.explored,
                "wall_time_ms": outcome.stats.wall_time_ms,
                "heuristic": opts.heuristic.name(),
                "bounds": opts.bounds.name(),
                "seed": args.seed,
            }
        });
        if let Err(e) = writeln!(f, "{summary}") {
            stats_err.get_or_insert(e);
        }
    }
    if let Some(e) = stats_err {
        return Err(Failure(exit::RESOURCE, format!("writing statistics: {e}")));
    }
    match outcome.verdict {
        Verdict::Satisfiable => {
            println!("SAT");
            if let (Some(p), Some(fsc)) = (&args.policy, &outcome.policy) {
                write_out(Some(p), &policy_to_json(&m, fsc))?;
            }
        }
        Verdict::Unsatisfiable => {
            println!("UNSAT");
            if outcome.resolution == Resolution::GameOnly {
                eprintln!(
                    "warning: cyclic model too large for the explicit check; \
                     the unsatisfiable verdict holds for the belief-support game only"
                );
            }
        }
    }
    Ok(())
}

fn verify(model: &Path, policy: &Path) -> Result<(), Failure> {
    let m = read_model(model)?;
    let fsc = parse_policy(&m, &read(policy)?).map_err(|e| Failure(exit::PARSE, format!("{}: {e}", policy.display())))?;
    let report = verify_policy(&m, &fsc).map_err(|e| Failure(exit::VERIFY, e.to_string()))?;
    println!("env\tresult\twitness");
    for v in &report.envs {
        let witness = v
            .witness
            .as_ref()
            .map(|o| format!("{} {}", m.state_name(o.state), memdp_core::envgraph::one_based(&o.belief)))
            .unwrap_or_else(|| "-".into());
        println!("{}\t{}\t{}", v.env + 1, if v.pass { "pass" } else { "FAIL" }, witness);
    }
    if report.all_pass() {
        Ok(())
    } else {
        let failing: Vec<String> = report.failing().iter().map(|e| (e + 1).to_string()).collect();
        Err(Failure(exit::VERIFY, format!("policy fails in environments {}", failing.join(", "))))
    }
}

fn gen(family: Family, output: Option<&Path>) -> Result<(), Failure> {
    let m = match family {
        Family::RunningExample => benchgen::running_example(),
        Family::Exponential { n, unsat: false } => benchgen::gen_exponential(n)?,
        Family::Exponential { n, unsat: true } => benchgen::gen_exponential_unsat(n)?,
        Family::Qbf { random: Some(seed), .. } => benchgen::gen_qbf(&benchgen::random_qbf(seed, 3, 6, 4))?,
        Family::Qbf { formula, random: None } => {
            let path = formula.expect("clap requires a formula");
            benchgen::gen_qbf(&benchgen::parse_qdimacs(&read(&path)?)?)?
        }
        Family::Grid { width, height, no_sensing } => benchgen::gen_grid(width, height, !no_sensing)?,
        Family::Frogger { width, height, car_width, phases } => {
            benchgen::gen_frogger(width, height, car_width, phases)?
        }
        Family::Pacman { width, height } => benchgen::gen_pacman(width, height)?,
        Family::Catchman { width, height } => benchgen::gen_catchman(width, height)?,
        Family::Mastermind { pegs, colors, guesses } => benchgen::gen_mastermind(pegs, colors, guesses)?,
        Family::InfiniteBelief => benchgen::gen_infinite_belief(),
        Family::Random { seed, states, envs, actions, cyclic } => {
            benchgen::gen_random(&RandomParams::new(seed, states, envs, actions, !cyclic))
        }
    };
    write_out(output, &model_to_json(&m))
}

fn crosscheck(args: CrosscheckArgs) -> Result<(), Failure> {
    let cfg = CrosscheckConfig {
        max_states: args.states,
        max_envs: args.envs,
        max_actions: args.actions,
        acyclic: !args.cyclic,
        ..CrosscheckConfig::default()
    };
    let end = args.first_seed.saturating_add(args.seeds);
    let records: Vec<_> = (args.first_seed..end)
        .into_par_iter()
        .map(|seed| crosscheck_seed(seed, &cfg))
        .collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in &records {
        let line = serde_json::to_string(r).expect("records serialize");
        let _ = writeln!(out, "{line}");
    }
    let bad = records.iter().filter(|r| !r.agree).count();
    let sat = records.iter().filter(|r| r.explicit_bomdp).count();
    eprintln!("{} seeds, {sat} satisfiable, {bad} disagreements", records.len());
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure(exit::DISAGREE, String::new()))
    }
}

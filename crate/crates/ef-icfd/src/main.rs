use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ef_icfd::epas::{
    self, randomized_miss_bound, reduce_agents, ColoringProvider, SolveOptions, SolveOutcome,
};
use ef_icfd::error::Error;
use ef_icfd::exact::{self, solve_exact, solve_vector_sum};
use ef_icfd::gen::{gen_random, gen_reduction, gen_shape, RandomSpec, Shape};
use ef_icfd::instance::Setting;
use ef_icfd::io::{
    allocation_from_json, allocation_to_json, instance_from_json, instance_to_json,
    motif_from_json, vector_sum_from_json,
};
use ef_icfd::motif::{brute_force_motif, max_colorful_connected};
use ef_icfd::numerics::{parse_rational, ApproxParams, Rational};
use ef_icfd::verify::verify;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_GUARD: u8 = 2;
const EXIT_NO_CERTIFICATE: u8 = 3;

#[derive(Parser)]
#[command(name = "ef-icfd", version, about = "Envy-free connected fair division on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an instance file.
    Validate { instance: PathBuf },
    /// Find a valid envy-free (or (1+eps)-envy-free) allocation.
    Solve(SolveArgs),
    /// Check an allocation against an instance.
    Verify {
        instance: PathBuf,
        allocation: PathBuf,
        /// Slack for the approximate envy check (default 0: exact).
        #[arg(long, default_value = "0")]
        epsilon: String,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Maximum-weight connected colorful subgraph of a motif graph file.
    Motif {
        graph: PathBuf,
        /// Use the exhaustive oracle instead of the dynamic program.
        #[arg(long)]
        brute_force: bool,
    },
    /// Apply the agent-count reduction rule and print the reduced
    /// instance.
    Reduce { instance: PathBuf },
    /// Solve a vector-sum input directly by brute force.
    VectorSum { input: PathBuf },
    /// Sweep random instances and print one CSV row per solve.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMode::Epas)]
    mode: SolveMode,
    /// Envy slack eps > 0 (rational, e.g. "4", "1/10", "0.25").
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Override the derived bucket parameter; must satisfy x^2 + 3x <= eps.
    #[arg(long)]
    epsilon_prime: Option<String>,
    #[arg(long, value_enum, default_value_t = ColoringsArg::Exhaustive)]
    colorings: ColoringsArg,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    /// Brute force; exact envy-freeness.
    Exact,
    /// The parameterized approximation scheme.
    Epas,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColoringsArg {
    Exhaustive,
    Randomized,
}

#[derive(Subcommand)]
enum GenCommand {
    /// The star-graph construction from a vector-sum input.
    Reduction {
        #[arg(long)]
        from: PathBuf,
    },
    /// Seeded random instance.
    Random {
        #[arg(short, long)]
        m: usize,
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        max_value: u128,
        #[arg(long, default_value_t = 0.5)]
        edge_density: f64,
        /// Number of distinct valuation types (default: n).
        #[arg(long)]
        num_types: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SettingArg::Optional)]
        setting: SettingArg,
        /// Do not force a connected graph.
        #[arg(long)]
        disconnected: bool,
    },
    /// Bare graph of a named shape (vertices and edges only).
    Shape {
        #[command(subcommand)]
        shape: ShapeCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    Optional,
    Mandatory,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Setting {
        match s {
            SettingArg::Optional => Setting::Optional,
            SettingArg::Mandatory => Setting::Mandatory,
        }
    }
}

#[derive(Subcommand)]
enum ShapeCommand {
    Star {
        #[arg(long)]
        leaves: usize,
    },
    Path {
        #[arg(long)]
        length: usize,
    },
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts, e.g. "4,6,8".
    #[arg(long, value_delimiter = ',', default_values_t = Vec::<usize>::new())]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = Vec::<usize>::new())]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = Vec::<usize>::new())]
    p: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = Vec::<String>::new())]
    epsilon: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SettingArg::Optional)]
    setting: SettingArg,
    #[arg(long, default_value_t = 100)]
    max_value: u128,
}

fn env_guard(name: &str, default: u64) -> u64 {
    match std::env::var(name) {
        Ok(v) => v.parse().unwrap_or(default),
        Err(_) => default,
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            let code = match e {
                Error::GuardExceeded { .. } => EXIT_GUARD,
                _ => EXIT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { instance } => {
            let inst = instance_from_json(&read(&instance)?)?;
            println!(
                "{}",
                json!({
                    "ok": true,
                    "vertices": inst.vertex_count(),
                    "edges": inst.edges().len(),
                    "agents": inst.agent_count(),
                    "p": inst.p(),
                    "setting": inst.setting(),
                })
            );
            Ok(EXIT_OK)
        }
        Command::Solve(args) => cmd_solve(args),
        Command::Verify {
            instance,
            allocation,
            epsilon,
        } => {
            let inst = instance_from_json(&read(&instance)?)?;
            let alloc = allocation_from_json(&read(&allocation)?)?;
            let eps = parse_rational(&epsilon)?;
            let report = verify(&inst, &alloc, &eps)?;
            let ok = report.valid && report.eps_envy_free;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if ok { EXIT_OK } else { EXIT_NO_CERTIFICATE })
        }
        Command::Gen(gen) => cmd_gen(gen),
        Command::Motif { graph, brute_force } => {
            let (g, names) = motif_from_json(&read(&graph)?)?;
            let solution = if brute_force {
                let guard = env_guard("EFICFD_MOTIF_GUARD", 10_000_000);
                brute_force_motif(&g, guard)?
            } else {
                max_colorful_connected(&g)?.0
            };
            match solution {
                Some(sol) => {
                    let named: Vec<&str> =
                        sol.vertices.iter().map(|&v| names[v].as_str()).collect();
                    println!(
                        "{}",
                        json!({"found": true, "vertices": named, "weight": sol.weight.to_string()})
                    );
                    Ok(EXIT_OK)
                }
                None => {
                    println!("{}", json!({"found": false}));
                    Ok(EXIT_NO_CERTIFICATE)
                }
            }
        }
        Command::Reduce { instance } => {
            let inst = instance_from_json(&read(&instance)?)?;
            let (reduced, back) = reduce_agents(&inst);
            eprintln!(
                "kept {} of {} agents; dropped: [{}]",
                back.kept.len(),
                inst.agent_count(),
                back.dropped.join(", ")
            );
            println!("{}", instance_to_json(&reduced));
            Ok(EXIT_OK)
        }
        Command::VectorSum { input } => {
            let vs = vector_sum_from_json(&read(&input)?)?;
            let guard = env_guard("EFICFD_VECTOR_SUM_GUARD", exact::DEFAULT_VECTOR_SUM_GUARD);
            match solve_vector_sum(&vs, guard)? {
                Some(indices) => {
                    println!("{}", json!({"found": true, "indices": indices}));
                    Ok(EXIT_OK)
                }
                None => {
                    println!("{}", json!({"found": false}));
                    Ok(EXIT_NO_CERTIFICATE)
                }
            }
        }
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Error> {
    let inst = instance_from_json(&read(&args.instance)?)?;
    let eps = parse_rational(&args.epsilon)?;
    match args.mode {
        SolveMode::Exact => {
            let guard = env_guard("EFICFD_EXACT_GUARD", exact::DEFAULT_EXACT_GUARD);
            match solve_exact(&inst, guard)? {
                Some(alloc) => {
                    let report = verify(&inst, &alloc, &eps)?;
                    assert!(report.valid && report.envy_free);
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "outcome": "allocation",
                            "allocation": serde_json::from_str::<serde_json::Value>(&allocation_to_json(&alloc))?,
                            "report": report,
                        }))?
                    );
                    Ok(EXIT_OK)
                }
                None => {
                    println!(
                        "{}",
                        json!({
                            "outcome": "no-certificate",
                            "statement": "no valid and envy-free allocation exists",
                            "mode": "exact",
                        })
                    );
                    Ok(EXIT_NO_CERTIFICATE)
                }
            }
        }
        SolveMode::Epas => {
            let provider = match args.colorings {
                ColoringsArg::Exhaustive => ColoringProvider::Exhaustive,
                ColoringsArg::Randomized => ColoringProvider::Randomized {
                    trials: args.trials,
                    seed: args.seed,
                },
            };
            let opts = SolveOptions {
                provider,
                eps_prime_override: match &args.epsilon_prime {
                    Some(s) => Some(parse_rational(s)?),
                    None => None,
                },
                threads: args.threads.max(1),
                coloring_guard: env_guard("EFICFD_COLORING_GUARD", epas::DEFAULT_COLORING_GUARD),
                profile_guard: env_guard("EFICFD_PROFILE_GUARD", epas::DEFAULT_PROFILE_GUARD),
            };
            let params = if inst.p() > 0 {
                Some(ApproxParams::new(
                    eps.clone(),
                    inst.p(),
                    opts.eps_prime_override.clone(),
                )?)
            } else {
                None
            };
            let (outcome, stats) = epas::solve_epas(&inst, &eps, &opts)?;
            let params_json = params.map(|p| {
                json!({
                    "epsilon": p.eps.to_string(),
                    "epsilon_prime": p.eps_prime.to_string(),
                    "q": p.q.to_string(),
                    "t": p.t,
                })
            });
            match outcome {
                SolveOutcome::Found { allocation, report } => {
                    // Independent re-check before printing.
                    let recheck = verify(&inst, &allocation, &eps)?;
                    assert!(recheck.valid && recheck.eps_envy_free);
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "outcome": "allocation",
                            "allocation": serde_json::from_str::<serde_json::Value>(&allocation_to_json(&allocation))?,
                            "report": report,
                            "parameters": params_json,
                            "stats": stats,
                        }))?
                    );
                    Ok(EXIT_OK)
                }
                SolveOutcome::NoCertificate {
                    statement,
                    colorings_mode,
                    trials,
                    seed,
                } => {
                    let miss = trials.map(|tr| randomized_miss_bound(inst.p(), tr).to_string());
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "outcome": "no-certificate",
                            "statement": statement,
                            "colorings": colorings_mode,
                            "trials": trials,
                            "seed": seed,
                            "miss_probability_bound": miss,
                            "parameters": params_json,
                            "stats": stats,
                        }))?
                    );
                    Ok(EXIT_NO_CERTIFICATE)
                }
            }
        }
    }
}

fn cmd_gen(gen: GenCommand) -> Result<u8, Error> {
    match gen {
        GenCommand::Reduction { from } => {
            let vs = vector_sum_from_json(&read(&from)?)?;
            let inst = gen_reduction(&vs)?;
            println!("{}", instance_to_json(&inst));
        }
        GenCommand::Random {
            m,
            n,
            p,
            max_value,
            edge_density,
            num_types,
            seed,
            setting,
            disconnected,
        } => {
            let spec = RandomSpec {
                m,
                n,
                p,
                max_value,
                edge_density,
                num_types: num_types.unwrap_or(n),
                seed,
                setting: setting.into(),
                connected: !disconnected,
            };
            println!("{}", instance_to_json(&gen_random(&spec)?));
        }
        GenCommand::Shape { shape } => {
            let shape = match shape {
                ShapeCommand::Star { leaves } => Shape::Star { leaves },
                ShapeCommand::Path { length } => Shape::Path { length },
                ShapeCommand::Grid { rows, cols } => Shape::Grid { rows, cols },
            };
            let (vertices, edges) = gen_shape(shape)?;
            println!("{}", json!({"vertices": vertices, "edges": edges}));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    println!("m,n,p,epsilon,t,profiles,subroutine_calls,wall_ms,outcome");
    let mut seed = args.seed;
    for &m in &args.m {
        for &n in &args.n {
            for &p in &args.p {
                if p > m {
                    continue;
                }
                for eps_text in &args.epsilon {
                    let eps: Rational = parse_rational(eps_text)?;
                    let spec = RandomSpec {
                        m,
                        n,
                        p,
                        max_value: args.max_value,
                        edge_density: 0.5,
                        num_types: n,
                        seed,
                        setting: args.setting.into(),
                        connected: true,
                    };
                    seed += 1;
                    let inst = gen_random(&spec)?;
                    let t = if p > 0 {
                        ApproxParams::new(eps.clone(), p, None)?.t
                    } else {
                        0
                    };
                    let start = Instant::now();
                    let (outcome, stats) =
                        epas::solve_epas(&inst, &eps, &SolveOptions::default())?;
                    let wall_ms = start.elapsed().as_millis();
                    let label = match outcome {
                        SolveOutcome::Found { .. } => "allocation",
                        SolveOutcome::NoCertificate { .. } => "no-certificate",
                    };
                    println!(
                        "{},{},{},{},{},{},{},{},{}",
                        m,
                        n,
                        p,
                        eps_text,
                        t,
                        stats.profiles_enumerated,
                        stats.subroutine_calls,
                        wall_ms,
                        label
                    );
                }
            }
        }
    }
    Ok(EXIT_OK)
}

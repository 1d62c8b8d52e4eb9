use std::io::{self, Write};
use std::net::SocketAddr;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itree_core::combinators::ExplorationBudget;
use itree_core::zmachine::CheckMode;
use itree_core::Strategy;
use itree_dsl::builtin::BUILTINS;
use itree_dsl::{load, parse_model, print_model, Definitions};

use itree_cli::animation::{Animation, ApiError, StartRequest};
use itree_cli::source::{arguments, const_bindings, model_text};
use itree_cli::{repl, report, stdio};

#[derive(Parser)]
#[command(name = "itree", version, about = "Animate and check interaction-tree models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// A `.itm` file, or the name of a built-in model (see `itree models`).
    model: String,
    /// Binds a constant, e.g. `--const maxbuf=3` or `--const VAL={0,1}`.
    #[arg(long = "const", value_name = "NAME=VALUE")]
    consts: Vec<String>,
}

impl ModelArgs {
    fn load(&self) -> Result<Definitions, ApiError> {
        let text = model_text(&self.model, true)?;
        let bindings = const_bindings(self.consts.iter().map(String::as_str))?;
        Ok(load(&text, &bindings)?)
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Silent steps allowed between visible events.
    #[arg(long, default_value_t = 20)]
    tau_fuel: usize,
    /// Longest trace explored.
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 200_000)]
    max_nodes: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Parallel)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Sequential,
    Parallel,
}

impl BudgetArgs {
    fn budget(&self) -> ExplorationBudget {
        let strategy = match self.strategy {
            StrategyArg::Sequential => Strategy::Sequential,
            StrategyArg::Parallel => Strategy::Parallel,
        };
        ExplorationBudget::default()
            .with_tau_fuel(self.tau_fuel)
            .with_trace_len(self.depth)
            .with_max_nodes(self.max_nodes)
            .with_strategy(strategy)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Reachable,
}

#[derive(Subcommand)]
enum Command {
    /// Step through a process interactively.
    Animate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        target: String,
        /// Argument values, one per parameter, e.g. `--args '[]'`.
        #[arg(long, num_args = 1..)]
        args: Vec<String>,
        #[arg(long, default_value_t = 20)]
        tau_budget: usize,
    },
    /// Run a process until it terminates, waits for an event or runs out of fuel.
    Execute {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        target: String,
        #[arg(long, num_args = 1..)]
        args: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check Z-Machine proof obligations and `assert` items; prints JSON.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Bounded traces, failures and divergences of a target, as JSON.
    Fd {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        target: String,
        #[arg(long, num_args = 1..)]
        args: Vec<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Parse a model and print it in canonical form.
    Parse {
        model: String,
        /// Print the syntax tree as JSON instead.
        #[arg(long)]
        emit_ast: bool,
    },
    /// Serve the session protocol on stdin and stdout, one JSON object per line.
    Session,
    /// Serve the session protocol over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// List the built-in models.
    Models,
}

fn print_json(v: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(v).expect("reports serialise");
    // A closed pipe (`itree fd ... | head`) just ends the output.
    if let Err(e) = writeln!(io::stdout().lock(), "{text}") {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, ApiError> {
    match cli.command {
        Command::Animate {
            model,
            target,
            args,
            tau_budget,
        } => {
            let req = StartRequest {
                model: Some(model.model.clone()),
                target,
                args,
                consts: model
                    .consts
                    .iter()
                    .filter_map(|p| p.split_once('=').map(|(k, v)| (k.trim().to_string(), v.to_string())))
                    .collect(),
                tau_budget: Some(tau_budget),
                ..Default::default()
            };
            let anim = Animation::start(&req, true)?;
            let stdin = io::stdin();
            repl::run(anim, stdin.lock(), io::stdout()).map_err(|e| ApiError::new("io", e.to_string()))?;
        }
        Command::Execute {
            model,
            target,
            args,
            fuel,
            json,
        } => {
            let defs = model.load()?;
            let args = arguments(args.iter().map(String::as_str))?;
            let view = report::run(&defs, &target, &args, fuel)?;
            if json {
                print_json(&view);
            } else {
                match view {
                    report::ExecView::Terminated { state, taus } => println!("Terminated after {taus} internal steps: {state}"),
                    report::ExecView::Menu { events, .. } => println!("Waiting for one of: {}", events.join(", ")),
                    report::ExecView::Deadlock { .. } => println!("Deadlocked."),
                    report::ExecView::Timeout { taus } => println!("No result after {taus} internal steps."),
                }
            }
        }
        Command::Check { model, mode, budget } => {
            let defs = model.load()?;
            let mode = match mode {
                ModeArg::Exhaustive => CheckMode::Exhaustive,
                ModeArg::Reachable => CheckMode::Reachable,
            };
            let r = report::check(&defs, mode, &budget.budget())?;
            print_json(&r);
            if !r.all_hold {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Fd {
            model,
            target,
            args,
            budget,
        } => {
            let defs = model.load()?;
            let args = arguments(args.iter().map(String::as_str))?;
            print_json(&report::fd(&defs, &target, &args, &budget.budget())?);
        }
        Command::Parse { model, emit_ast } => {
            let text = model_text(&model, true)?;
            let ast = parse_model(&text).map_err(|e| ApiError::from(itree_dsl::ModelError::Parse(e)))?;
            if emit_ast {
                print_json(&ast);
            } else {
                print!("{}", print_model(&ast));
            }
        }
        Command::Session => {
            let stdin = io::stdin();
            stdio::run(stdin.lock(), io::stdout()).map_err(|e| ApiError::new("io", e.to_string()))?;
        }
        Command::Serve { host, port } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| ApiError::new("bad_request", format!("bad address: {e}")))?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| ApiError::new("io", e.to_string()))?;
            rt.block_on(itree_cli::http::serve(addr)).map_err(|e| ApiError::new("io", e.to_string()))?;
        }
        Command::Models => {
            let mut out = io::stdout();
            for b in BUILTINS {
                writeln!(out, "{:<16} {}", b.name, b.summary).ok();
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

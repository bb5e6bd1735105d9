//! `elp-resolve`: analyze, render and resolve conflicts in extended logic
//! programs, or serve the HTTP API.
//!
//! Exit codes: 0 success or conflict-free, 1 conflicts remain, 2 some
//! conflicts cannot be resolved by extension, 3 unreadable or malformed
//! input, 4 invalid script step, 5 bind failure, 6 analysis limits
//! exceeded, 7 uniform check on a program that still has conflicts.

mod interactive;

use std::io::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use elp_resolve_core::cover::AnalysisOptions;
use elp_resolve_core::report::Report;
use elp_resolve_core::session::{Selection, Session, SessionConfig, SessionFile, Status, Step};
use elp_resolve_core::solver::MAX_ATOMS;
use elp_resolve_core::{parse_program, print_program, Error, Program};
use elp_resolve_service::{app, AppState};

const EXIT_CONFLICTS: u8 = 1;
const EXIT_BLOCKED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_STEP: u8 = 4;
const EXIT_BIND: u8 = 5;
const EXIT_LIMITS: u8 = 6;
const EXIT_NOT_CLEAN: u8 = 7;

#[derive(Parser)]
#[command(name = "elp-resolve", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report conflicts, conflict groups, extensions and covers.
    Analyze {
        input: PathBuf,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        opts: AnalysisArgs,
    },
    /// Print the λ-graph of the selected cover.
    Graph {
        input: PathBuf,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        opts: AnalysisArgs,
    },
    /// Apply a sequence of choices and print the resulting program.
    Resolve {
        input: PathBuf,
        /// JSON list of steps, e.g. `[{"extension":"~f","targets":["r10"]}]`.
        #[arg(long, conflicts_with_all = ["interactive_tty", "suggest"])]
        script: Option<PathBuf>,
        /// Prompt for choices on the terminal.
        #[arg(long, conflicts_with = "suggest")]
        interactive_tty: bool,
        /// Follow the default suggestion until nothing is left.
        #[arg(long)]
        suggest: bool,
        /// Write the session (program plus steps) to this file.
        #[arg(long)]
        save: Option<PathBuf>,
        #[command(flatten)]
        opts: AnalysisArgs,
    },
    /// Check that a conflict-free program stays consistent under facts.
    Uniform {
        input: PathBuf,
        /// Try every relevant fact set instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of static UI assets served for non-API paths.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Session file to load at startup; its id is printed.
        #[arg(long)]
        session: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct AnalysisArgs {
    /// Index of the group cover to use (default: fewest groups).
    #[arg(long)]
    cover: Option<usize>,
    /// Index of the minimum clique cover to use.
    #[arg(long)]
    clique_cover: Option<usize>,
    #[arg(long)]
    extension_cap: Option<usize>,
    #[arg(long)]
    cover_cap: Option<usize>,
    /// Keep every extension of groups next to a stranded anchor.
    #[arg(long)]
    no_proxy_restriction: bool,
}

impl AnalysisArgs {
    fn config(&self) -> SessionConfig {
        let defaults = AnalysisOptions::default();
        SessionConfig {
            cover: self.cover.map_or(Selection::Auto, Selection::Index),
            clique_cover: self.clique_cover.map_or(Selection::Auto, Selection::Index),
            analysis: AnalysisOptions {
                extension_cap: self.extension_cap.unwrap_or(defaults.extension_cap),
                cover_cap: self.cover_cap.unwrap_or(defaults.cover_cap),
                proxy_restriction: !self.no_proxy_restriction,
            },
        }
    }
}

/// A failure with its exit code; the message goes to stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::DuplicateRuleId { .. } | Error::MalformedExtension(_) => {
                EXIT_INPUT
            }
            Error::TooLarge { .. } | Error::TooManyExtensions { .. } => EXIT_LIMITS,
            Error::NotClean => EXIT_NOT_CLEAN,
            Error::InvalidSelection { .. } => EXIT_INPUT,
            _ => EXIT_STEP,
        };
        Failure(code, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze {
            input, json, opts, ..
        } => analyze(&input, json, &opts),
        Command::Graph {
            input, dot, opts, ..
        } => graph(&input, dot, &opts),
        Command::Resolve {
            input,
            script,
            interactive_tty,
            suggest,
            save,
            opts,
        } => resolve(
            &input,
            script.as_deref(),
            interactive_tty,
            suggest,
            save.as_deref(),
            &opts,
        ),
        Command::Uniform {
            input,
            exhaustive,
            samples,
            seed,
        } => uniform(&input, exhaustive, samples, seed),
        Command::Serve {
            port,
            host,
            static_dir,
            session,
        } => serve(SocketAddr::new(host, port), static_dir, session.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn status_code(s: &Session) -> u8 {
    let state = s.state();
    if !state.unresolvable.is_empty() || state.status == Status::Blocked {
        EXIT_BLOCKED
    } else if state.status == Status::Resolving {
        EXIT_CONFLICTS
    } else {
        0
    }
}

fn analyze(input: &Path, json: bool, opts: &AnalysisArgs) -> CmdResult {
    let session = Session::start(load(input)?, opts.config())?;
    let report = Report::from_state(session.state());
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(status_code(&session))
}

fn graph(input: &Path, dot: bool, opts: &AnalysisArgs) -> CmdResult {
    let session = Session::start(load(input)?, opts.config())?;
    let text = session
        .state()
        .graph
        .export(if dot { "dot" } else { "json" })?;
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    Ok(0)
}

fn resolve(
    input: &Path,
    script: Option<&Path>,
    interactive_tty: bool,
    suggest: bool,
    save: Option<&Path>,
    opts: &AnalysisArgs,
) -> CmdResult {
    let program = load(input)?;
    let session = if let Some(path) = script {
        let steps: Vec<Step> = serde_json::from_str(&read(path)?)
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        Session::replay(program, opts.config(), &steps)
            .map_err(|(i, e)| Failure(EXIT_STEP, format!("step {i}: {e}")))?
    } else {
        let mut session = Session::start(program, opts.config())?;
        if interactive_tty {
            let stdin = std::io::stdin();
            interactive::run(&mut session, &mut stdin.lock(), &mut std::io::stderr())
                .map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
        } else if suggest {
            session.resolve_with_suggestions()?;
        }
        session
    };
    if let Some(path) = save {
        let file = serde_json::to_string_pretty(&session.to_file()).expect("session serializes");
        std::fs::write(path, file + "\n")
            .map_err(|e| Failure(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{}", print_program(&session.state().current));
    Ok(match status_code(&session) {
        0 => 0,
        _ => EXIT_CONFLICTS,
    })
}

fn uniform(input: &Path, exhaustive: bool, samples: usize, seed: u64) -> CmdResult {
    let session = Session::start(load(input)?, SessionConfig::default())?;
    let report = if exhaustive {
        session.check_uniform_exhaustive(MAX_ATOMS)?
    } else {
        session.check_uniform(samples, seed)?
    };
    println!(
        "{} fact sets checked{}, {} contradictory",
        report.samples,
        if report.exhaustive {
            " (exhaustive)"
        } else {
            ""
        },
        report.failures.len()
    );
    for f in &report.failures {
        let lits: Vec<String> = f.iter().map(|l| l.to_string()).collect();
        println!("  {{{}}}", lits.join(", "));
    }
    Ok(if report.passed() { 0 } else { EXIT_CONFLICTS })
}

fn serve(addr: SocketAddr, static_dir: Option<PathBuf>, session: Option<&Path>) -> CmdResult {
    let state = Arc::new(AppState::default());
    let preload = match session {
        Some(path) => {
            let file: SessionFile = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            Some(state.sessions.insert(Session::from_file(&file)?))
        }
        None => None,
    };
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| Failure(EXIT_BIND, format!("cannot start runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure(EXIT_BIND, format!("cannot bind {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| Failure(EXIT_BIND, e.to_string()))?;
        let mut out = std::io::stdout();
        let _ = writeln!(out, "listening on http://{local}");
        if let Some(id) = preload {
            let _ = writeln!(out, "session {id}");
        }
        let _ = out.flush();
        axum::serve(listener, app(state, static_dir))
            .await
            .map_err(|e| Failure(EXIT_BIND, e.to_string()))?;
        Ok(0)
    })
}
